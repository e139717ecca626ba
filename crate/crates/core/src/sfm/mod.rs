//! Forward-only semantic fusion module: cascaded FPEM stages followed by a
//! JPU head, over a four-level feature pyramid at strides 4/8/16/32.
//!
//! Everything here is toy-scale and seeded; there is no training.

mod conv;
mod fpem;
mod jpu;
mod weights;

pub use conv::{SepConvWeights, resize_bilinear, sep_conv, upsample2x};
pub use fpem::{FpemWeights, fpem};
pub use jpu::{JPU_DILATIONS, JpuWeights, jpu, jpu_fused_input};
pub use weights::{SfmWeights, TensorEntry, WeightsSidecar, read_weights, write_weights};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Channel-major feature tensor: `data[(c * height + y) * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::BufferLength {
                expected: channels * height * width,
                found: data.len(),
            });
        }
        Ok(FeatureMap {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        FeatureMap {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }

    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        FeatureMap {
            channels,
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn add(&self, other: &FeatureMap) -> Result<FeatureMap> {
        if self.shape() != other.shape() {
            return Err(Error::Pyramid(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(FeatureMap {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            ..*self
        })
    }

    /// Stacks maps of equal spatial size along the channel axis.
    pub fn concat(maps: &[FeatureMap]) -> Result<FeatureMap> {
        let first = maps
            .first()
            .ok_or_else(|| Error::Pyramid("nothing to concatenate".into()))?;
        let (h, w) = (first.height, first.width);
        if maps.iter().any(|m| m.height != h || m.width != w) {
            return Err(Error::Pyramid(
                "concatenated maps differ in spatial size".into(),
            ));
        }
        let channels = maps.iter().map(|m| m.channels).sum();
        let data = maps.iter().flat_map(|m| m.data.iter().copied()).collect();
        Ok(FeatureMap {
            channels,
            height: h,
            width: w,
            data,
        })
    }

    /// Hex SHA-256 of the little-endian bytes of `data`.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.data {
            h.update(v.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub const PYRAMID_LEVELS: usize = 4;

/// Four maps at strides 4, 8, 16, 32; each level is the previous one halved
/// with ceiling division, and all share a channel count.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePyramid {
    levels: Vec<FeatureMap>,
}

impl FeaturePyramid {
    pub fn new(levels: Vec<FeatureMap>) -> Result<Self> {
        if levels.len() != PYRAMID_LEVELS {
            return Err(Error::Pyramid(format!(
                "expected {PYRAMID_LEVELS} levels, got {}",
                levels.len()
            )));
        }
        let c = levels[0].channels;
        if c == 0 || levels[0].height == 0 || levels[0].width == 0 {
            return Err(Error::Pyramid("base level is empty".into()));
        }
        for (i, pair) in levels.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if b.channels != c {
                return Err(Error::Pyramid(format!(
                    "level {} has {} channels, expected {c}",
                    i + 1,
                    b.channels
                )));
            }
            if b.height != a.height.div_ceil(2) || b.width != a.width.div_ceil(2) {
                return Err(Error::Pyramid(format!(
                    "level {} is {}x{}, expected {}x{}",
                    i + 1,
                    b.height,
                    b.width,
                    a.height.div_ceil(2),
                    a.width.div_ceil(2)
                )));
            }
        }
        Ok(FeaturePyramid { levels })
    }

    /// Level shapes for a stride-4 base of `height × width`.
    pub fn level_dims(height: usize, width: usize) -> [(usize, usize); PYRAMID_LEVELS] {
        let mut dims = [(height, width); PYRAMID_LEVELS];
        for i in 1..PYRAMID_LEVELS {
            dims[i] = (dims[i - 1].0.div_ceil(2), dims[i - 1].1.div_ceil(2));
        }
        dims
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        let levels = Self::level_dims(height, width)
            .iter()
            .map(|&(h, w)| FeatureMap::zeros(channels, h, w))
            .collect();
        FeaturePyramid { levels }
    }

    /// Uniform `[0, 1)` activations.
    pub fn seeded(channels: usize, height: usize, width: usize, rng: &mut Rng) -> Self {
        let levels = Self::level_dims(height, width)
            .iter()
            .map(|&(h, w)| FeatureMap::from_fn(channels, h, w, |_, _, _| rng.unit()))
            .collect();
        FeaturePyramid { levels }
    }

    pub fn levels(&self) -> &[FeatureMap] {
        &self.levels
    }

    pub fn channels(&self) -> usize {
        self.levels[0].channels
    }

    pub fn into_levels(self) -> Vec<FeatureMap> {
        self.levels
    }
}

/// `n_fpem` cascaded FPEM stages, then the JPU head.
pub fn sfm_forward(
    pyr: &FeaturePyramid,
    weights: &SfmWeights,
    n_fpem: usize,
) -> Result<FeatureMap> {
    if n_fpem == 0 {
        return Err(Error::InvalidParameter(
            "at least one FPEM stage is required".into(),
        ));
    }
    if n_fpem > weights.fpem.len() {
        return Err(Error::InvalidParameter(format!(
            "{n_fpem} FPEM stages requested, weights hold {}",
            weights.fpem.len()
        )));
    }
    let mut cur = fpem(pyr, &weights.fpem[0])?;
    for w in &weights.fpem[1..n_fpem] {
        cur = fpem(&cur, w)?;
    }
    jpu(&cur, &weights.jpu)
}
