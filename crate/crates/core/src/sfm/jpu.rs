use crate::error::Result;
use crate::rng::Rng;
use crate::sfm::conv::{SepConvWeights, resize_bilinear, sep_conv};
use crate::sfm::{FeatureMap, FeaturePyramid, PYRAMID_LEVELS};

pub const JPU_DILATIONS: [usize; 4] = [1, 2, 4, 8];

/// Per-level projections (C → C) and four dilated branches (4C → C).
#[derive(Debug, Clone, PartialEq)]
pub struct JpuWeights {
    pub project: Vec<SepConvWeights>,
    pub branches: Vec<SepConvWeights>,
}

impl JpuWeights {
    pub fn zeros(channels: usize) -> Self {
        JpuWeights {
            project: (0..PYRAMID_LEVELS)
                .map(|_| SepConvWeights::zeros(channels, channels))
                .collect(),
            branches: JPU_DILATIONS
                .iter()
                .map(|_| SepConvWeights::zeros(PYRAMID_LEVELS * channels, channels))
                .collect(),
        }
    }

    pub fn seeded(channels: usize, rng: &mut Rng) -> Self {
        JpuWeights {
            project: (0..PYRAMID_LEVELS)
                .map(|_| SepConvWeights::seeded(channels, channels, rng))
                .collect(),
            branches: JPU_DILATIONS
                .iter()
                .map(|_| SepConvWeights::seeded(PYRAMID_LEVELS * channels, channels, rng))
                .collect(),
        }
    }

    pub(crate) fn convs(&self) -> impl Iterator<Item = (String, &SepConvWeights)> {
        self.project
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("project.{i}"), w))
            .chain(
                self.branches
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (format!("branch.{i}"), w)),
            )
    }

    pub(crate) fn convs_mut(&mut self) -> impl Iterator<Item = &mut SepConvWeights> {
        self.project.iter_mut().chain(self.branches.iter_mut())
    }
}

/// Projected levels upsampled to stride 4 and stacked (4C channels).
pub fn jpu_fused_input(pyr: &FeaturePyramid, w: &JpuWeights) -> Result<FeatureMap> {
    let base = &pyr.levels()[0];
    let ups = pyr
        .levels()
        .iter()
        .zip(&w.project)
        .map(|(level, proj)| {
            let p = sep_conv(level, proj, 1, 1)?;
            Ok(resize_bilinear(&p, base.height, base.width))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMap::concat(&ups)
}

/// Joint pyramid upsampling: four parallel dilated separable convolutions
/// over the fused stride-4 input, concatenated to 4C channels.
pub fn jpu(pyr: &FeaturePyramid, w: &JpuWeights) -> Result<FeatureMap> {
    let fused = jpu_fused_input(pyr, w)?;
    let branches = JPU_DILATIONS
        .iter()
        .zip(&w.branches)
        .map(|(&d, bw)| sep_conv(&fused, bw, d, 1))
        .collect::<Result<Vec<_>>>()?;
    FeatureMap::concat(&branches)
}
