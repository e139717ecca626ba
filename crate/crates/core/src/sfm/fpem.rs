use crate::error::Result;
use crate::rng::Rng;
use crate::sfm::conv::{SepConvWeights, resize_bilinear, sep_conv};
use crate::sfm::{FeatureMap, FeaturePyramid, PYRAMID_LEVELS};

/// One FPEM stage: three up-scale convolutions (strides 16, 8, 4), and for
/// the down-scale pass three stride-2 reductions plus three fusions
/// (strides 8, 16, 32).
#[derive(Debug, Clone, PartialEq)]
pub struct FpemWeights {
    pub up: Vec<SepConvWeights>,
    pub down_reduce: Vec<SepConvWeights>,
    pub down: Vec<SepConvWeights>,
}

impl FpemWeights {
    fn build(mut f: impl FnMut() -> SepConvWeights) -> Self {
        let n = PYRAMID_LEVELS - 1;
        let up = (0..n).map(|_| f()).collect();
        let down_reduce = (0..n).map(|_| f()).collect();
        let down = (0..n).map(|_| f()).collect();
        FpemWeights {
            up,
            down_reduce,
            down,
        }
    }

    pub fn identity(channels: usize) -> Self {
        Self::build(|| SepConvWeights::identity(channels))
    }

    pub fn zeros(channels: usize) -> Self {
        Self::build(|| SepConvWeights::zeros(channels, channels))
    }

    pub fn seeded(channels: usize, rng: &mut Rng) -> Self {
        Self::build(|| SepConvWeights::seeded(channels, channels, rng))
    }

    pub(crate) fn convs(&self) -> impl Iterator<Item = (String, &SepConvWeights)> {
        self.up
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("up.{i}"), w))
            .chain(
                self.down_reduce
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (format!("down_reduce.{i}"), w)),
            )
            .chain(
                self.down
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (format!("down.{i}"), w)),
            )
    }

    pub(crate) fn convs_mut(&mut self) -> impl Iterator<Item = &mut SepConvWeights> {
        self.up
            .iter_mut()
            .chain(self.down_reduce.iter_mut())
            .chain(self.down.iter_mut())
    }
}

/// Up-scale pass from stride 32 to stride 4, then down-scale pass back to
/// stride 32. Output level shapes equal the input's.
pub fn fpem(pyr: &FeaturePyramid, w: &FpemWeights) -> Result<FeaturePyramid> {
    let levels = pyr.levels();
    let mut up: Vec<FeatureMap> = levels.to_vec();
    for i in (0..PYRAMID_LEVELS - 1).rev() {
        let target = &levels[i];
        let coarse = resize_bilinear(&up[i + 1], target.height, target.width);
        up[i] = sep_conv(&target.add(&coarse)?, &w.up[i], 1, 1)?;
    }
    let mut out = Vec::with_capacity(PYRAMID_LEVELS);
    out.push(up[0].clone());
    for i in 1..PYRAMID_LEVELS {
        let reduced = sep_conv(&out[i - 1], &w.down_reduce[i - 1], 1, 2)?;
        out.push(sep_conv(&up[i].add(&reduced)?, &w.down[i - 1], 1, 1)?);
    }
    FeaturePyramid::new(out)
}
