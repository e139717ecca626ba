//! Seeded SFM weights and their on-disk form: a flat little-endian `f64`
//! array plus a JSON sidecar listing every tensor's name, shape and offset
//! (in elements) into the array.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::write_atomic;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sfm::fpem::FpemWeights;
use crate::sfm::jpu::JpuWeights;

pub const WEIGHTS_FORMAT: &str = "matteforge-sfm-weights";

#[derive(Debug, Clone, PartialEq)]
pub struct SfmWeights {
    pub channels: usize,
    pub fpem: Vec<FpemWeights>,
    pub jpu: JpuWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSidecar {
    pub format: String,
    pub dtype: String,
    pub byte_order: String,
    pub channels: usize,
    pub n_fpem: usize,
    pub total: usize,
    pub tensors: Vec<TensorEntry>,
}

impl SfmWeights {
    pub fn seeded(channels: usize, n_fpem: usize, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let fpem = (0..n_fpem)
            .map(|_| FpemWeights::seeded(channels, &mut rng))
            .collect();
        let jpu = JpuWeights::seeded(channels, &mut rng);
        SfmWeights {
            channels,
            fpem,
            jpu,
        }
    }

    pub fn zeros(channels: usize, n_fpem: usize) -> Self {
        SfmWeights {
            channels,
            fpem: (0..n_fpem).map(|_| FpemWeights::zeros(channels)).collect(),
            jpu: JpuWeights::zeros(channels),
        }
    }

    /// Same weights with every bias set to zero.
    pub fn without_bias(&self) -> Self {
        let mut w = self.clone();
        for f in w.fpem.iter_mut() {
            f.convs_mut()
                .for_each(|c| c.bias.iter_mut().for_each(|b| *b = 0.0));
        }
        w.jpu
            .convs_mut()
            .for_each(|c| c.bias.iter_mut().for_each(|b| *b = 0.0));
        w
    }

    fn named_tensors(&self) -> Vec<(String, Vec<usize>, &[f64])> {
        let mut out = Vec::new();
        for (s, f) in self.fpem.iter().enumerate() {
            for (name, conv) in f.convs() {
                for (t, shape, data) in conv.tensors() {
                    out.push((format!("fpem.{s}.{name}.{t}"), shape, data));
                }
            }
        }
        for (name, conv) in self.jpu.convs() {
            for (t, shape, data) in conv.tensors() {
                out.push((format!("jpu.{name}.{t}"), shape, data));
            }
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out = Vec::new();
        for f in self.fpem.iter_mut() {
            for conv in f.convs_mut() {
                out.extend(conv.tensors_mut());
            }
        }
        for conv in self.jpu.convs_mut() {
            out.extend(conv.tensors_mut());
        }
        out
    }

    pub fn to_flat(&self) -> (Vec<f64>, WeightsSidecar) {
        let mut flat = Vec::new();
        let mut tensors = Vec::new();
        for (name, shape, data) in self.named_tensors() {
            tensors.push(TensorEntry {
                name,
                shape,
                offset: flat.len(),
            });
            flat.extend_from_slice(data);
        }
        let sidecar = WeightsSidecar {
            format: WEIGHTS_FORMAT.into(),
            dtype: "f64".into(),
            byte_order: "little-endian".into(),
            channels: self.channels,
            n_fpem: self.fpem.len(),
            total: flat.len(),
            tensors,
        };
        (flat, sidecar)
    }

    pub fn from_flat(flat: &[f64], sidecar: &WeightsSidecar) -> Result<Self> {
        if sidecar.format != WEIGHTS_FORMAT
            || sidecar.dtype != "f64"
            || sidecar.byte_order != "little-endian"
        {
            return Err(Error::Format(format!(
                "unsupported weights sidecar ({}, {}, {})",
                sidecar.format, sidecar.dtype, sidecar.byte_order
            )));
        }
        let mut w = SfmWeights::zeros(sidecar.channels, sidecar.n_fpem);
        let (_, expected) = w.to_flat();
        if expected.tensors != sidecar.tensors || flat.len() != expected.total {
            return Err(Error::Format(
                "weights sidecar does not match the expected tensor layout".into(),
            ));
        }
        let mut pos = 0;
        for t in w.tensors_mut() {
            let n = t.len();
            t.copy_from_slice(&flat[pos..pos + n]);
            pos += n;
        }
        Ok(w)
    }
}

/// Writes `<stem>.bin` and `<stem>.json`.
pub fn write_weights(weights: &SfmWeights, stem: &Path) -> Result<()> {
    let (flat, sidecar) = weights.to_flat();
    let bytes: Vec<u8> = flat.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_atomic(&stem.with_extension("bin"), &bytes)?;
    let json = serde_json::to_vec_pretty(&sidecar)?;
    write_atomic(&stem.with_extension("json"), &json)
}

pub fn read_weights(stem: &Path) -> Result<SfmWeights> {
    let bin = stem.with_extension("bin");
    let json = stem.with_extension("json");
    let bytes = std::fs::read(&bin).map_err(|e| Error::from(e).at(&bin))?;
    let sidecar: WeightsSidecar =
        serde_json::from_slice(&std::fs::read(&json).map_err(|e| Error::from(e).at(&json))?)
            .map_err(|e| Error::from(e).at(&json))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Format("weights payload is not a whole number of f64".into()).at(&bin));
    }
    let flat: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SfmWeights::from_flat(&flat, &sidecar)
}
