use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::harness::{
    GuidanceKind, MeanMetrics, Scene, TestsetParams, build_testset, mean_metrics,
};
use crate::metrics::{MetricParams, evaluate};
use crate::raster::{AlphaMatte, Dims, GuidanceMap, Label};

/// Stand-in for a matting network: maps a scene and its guidance to a matte.
pub trait Predictor: Sync {
    fn predict(&self, scene: &Scene, guidance: &GuidanceMap) -> AlphaMatte;
}

/// Returns the ground truth unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroundTruth;

impl Predictor for GroundTruth {
    fn predict(&self, scene: &Scene, _guidance: &GuidanceMap) -> AlphaMatte {
        scene.alpha.clone()
    }
}

/// Ground truth degraded by a fixed blur, except near labelled guidance
/// pixels: `pred = w·gt + (1 − w)·blur(gt)`, where `w` is the guidance's
/// known-pixel indicator blurred at `hint_sigma`.
#[derive(Debug, Clone, Copy)]
pub struct BlurOracle {
    pub sigma: f64,
    pub hint_sigma: f64,
}

impl Default for BlurOracle {
    fn default() -> Self {
        BlurOracle {
            sigma: 2.0,
            hint_sigma: 6.0,
        }
    }
}

impl Predictor for BlurOracle {
    fn predict(&self, scene: &Scene, guidance: &GuidanceMap) -> AlphaMatte {
        let (w, h) = (scene.alpha.width(), scene.alpha.height());
        let blurred = gaussian_blur(scene.alpha.data(), w, h, self.sigma);
        let known: Vec<f64> = guidance
            .labels()
            .iter()
            .map(|&l| if l == Label::Unknown { 0.0 } else { 1.0 })
            .collect();
        let weight = gaussian_blur(&known, w, h, self.hint_sigma);
        let gt = scene.alpha.data();
        AlphaMatte::from_fn(w, h, |x, y| {
            let i = y * w + x;
            let k = weight[i].clamp(0.0, 1.0);
            k * gt[i] + (1.0 - k) * blurred[i]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub seed: u64,
    pub mean: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: GuidanceKind,
    pub variants: Vec<VariantSummary>,
    pub mean: MeanMetrics,
    /// Population standard deviation across variants.
    pub std: MeanMetrics,
}

/// Population standard deviation (divides by `n`).
pub fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n).sqrt()
}

/// Builds one test set per seed, runs `predictor` on each, and reports
/// per-variant means plus the spread across variants.
pub fn stability_report(
    scenes: &[Scene],
    kind: GuidanceKind,
    seeds: &[u64],
    predictor: &dyn Predictor,
    params: &TestsetParams,
    metric_params: &MetricParams,
) -> Result<StabilityReport> {
    if seeds.len() < 2 {
        return Err(Error::InvalidParameter(
            "stability needs at least two variants".into(),
        ));
    }
    let mut variants = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let set = build_testset(scenes, kind, params, seed)?;
        let reports = scenes
            .par_iter()
            .zip(set.maps.par_iter())
            .map(|(scene, (_, guidance))| {
                let pred = predictor.predict(scene, guidance);
                evaluate(&pred, &scene.alpha, &scene.trimap, metric_params)
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = mean_metrics(&reports)
            .ok_or_else(|| Error::InvalidParameter("no scenes to evaluate".into()))?;
        variants.push(VariantSummary { seed, mean });
    }
    let column =
        |f: fn(&MeanMetrics) -> f64| variants.iter().map(|v| f(&v.mean)).collect::<Vec<_>>();
    let mean_of = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let fields: [fn(&MeanMetrics) -> f64; 5] =
        [|m| m.sad, |m| m.mse, |m| m.grad, |m| m.conn, |m| m.pixels_t];
    let means = fields.map(|f| mean_of(column(f)));
    let stds = fields.map(|f| population_std(&column(f)));
    let pack = |a: [f64; 5]| MeanMetrics {
        sad: a[0],
        mse: a[1],
        grad: a[2],
        conn: a[3],
        pixels_t: a[4],
    };
    Ok(StabilityReport {
        kind,
        variants,
        mean: pack(means),
        std: pack(stds),
    })
}
