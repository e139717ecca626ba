//! SAD, MSE, gradient and connectivity errors over a trimap's transition
//! region.
//!
//! SAD, Grad and Conn are reported in thousands; MSE is a plain mean over the
//! region. On an empty region SAD, Grad and Conn are 0 and MSE is an error.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{DEFAULT_SIGMA, GaussianDerivativeKernel, gradient_magnitude};
use crate::raster::{AlphaMatte, BinaryMask, Dims, Trimap, ensure_same_dims};
use crate::trimap::partition;

pub const DEFAULT_THETA: f64 = 0.15;
pub const DEFAULT_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricParams {
    pub sigma: f64,
    pub theta: f64,
    pub levels: usize,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            sigma: DEFAULT_SIGMA,
            theta: DEFAULT_THETA,
            levels: DEFAULT_LEVELS,
        }
    }
}

impl MetricParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be >= 0, got {}",
                self.theta
            )));
        }
        if self.levels == 0 {
            return Err(Error::InvalidParameter("levels must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub sad: f64,
    pub mse: f64,
    pub grad: f64,
    pub conn: f64,
    #[serde(rename = "pixels_T")]
    pub pixels_t: usize,
}

fn check(pred: &AlphaMatte, gt: &AlphaMatte, region: &BinaryMask) -> Result<()> {
    ensure_same_dims("gt", pred, gt)?;
    ensure_same_dims("region", pred, region)
}

fn region_sum(values: impl Iterator<Item = f64>, region: &BinaryMask) -> f64 {
    values
        .zip(region.data())
        .filter(|(_, r)| **r)
        .map(|(v, _)| v)
        .sum()
}

pub fn sad(pred: &AlphaMatte, gt: &AlphaMatte, region: &BinaryMask) -> Result<f64> {
    check(pred, gt, region)?;
    let diffs = pred
        .data()
        .iter()
        .zip(gt.data())
        .map(|(p, g)| (p - g).abs());
    Ok(region_sum(diffs, region) / 1000.0)
}

pub fn mse(pred: &AlphaMatte, gt: &AlphaMatte, region: &BinaryMask) -> Result<f64> {
    check(pred, gt, region)?;
    let n = region.count();
    if n == 0 {
        return Err(Error::EmptyRegion { metric: "mse" });
    }
    let sq = pred
        .data()
        .iter()
        .zip(gt.data())
        .map(|(p, g)| (p - g) * (p - g));
    Ok(region_sum(sq, region) / n as f64)
}

/// Squared difference of Gaussian-derivative gradient magnitudes, summed
/// over the region, in thousands.
pub fn grad_metric(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: &BinaryMask,
    sigma: f64,
) -> Result<f64> {
    check(pred, gt, region)?;
    let (w, h) = (pred.width(), pred.height());
    if w == 0 || h == 0 {
        return Ok(0.0);
    }
    let k = GaussianDerivativeKernel::new(sigma);
    let mp = gradient_magnitude(pred.data(), w, h, &k);
    let mg = gradient_magnitude(gt.data(), w, h, &k);
    let sq = mp.iter().zip(&mg).map(|(a, b)| (a - b) * (a - b));
    Ok(region_sum(sq, region) / 1000.0)
}

/// Largest 4-connected component of `mask`; ties go to the component whose
/// first pixel comes earliest in row-major order.
pub fn largest_component(mask: &[bool], width: usize, height: usize) -> Vec<bool> {
    let n = width * height;
    let mut label = vec![usize::MAX; n];
    let mut best: Option<(usize, usize)> = None; // (label, size)
    let mut queue = VecDeque::new();
    let mut next = 0;
    for start in 0..n {
        if !mask[start] || label[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        label[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % width, i / width);
            let mut visit = |j: usize| {
                if mask[j] && label[j] == usize::MAX {
                    label[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < width {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - width);
            }
            if y + 1 < height {
                visit(i + width);
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((id, size));
        }
    }
    match best {
        Some((id, _)) => label.iter().map(|&l| l == id).collect(),
        None => vec![false; n],
    }
}

/// Per-pixel level at which each pixel stops belonging to the largest
/// component of `pred >= l ∧ gt >= l`. Pixels that never drop out get 1.
pub fn connectivity_levels(pred: &AlphaMatte, gt: &AlphaMatte, levels: usize) -> Vec<f64> {
    let (w, h) = (pred.width(), pred.height());
    let mut level = vec![-1.0f64; w * h];
    for k in 1..=levels {
        let th = k as f64 / levels as f64;
        let both: Vec<bool> = pred
            .data()
            .iter()
            .zip(gt.data())
            .map(|(&p, &g)| p >= th && g >= th)
            .collect();
        let omega = largest_component(&both, w, h);
        let prev = (k - 1) as f64 / levels as f64;
        for (l, &inside) in level.iter_mut().zip(&omega) {
            if *l == -1.0 && !inside {
                *l = prev;
            }
        }
    }
    for l in level.iter_mut() {
        if *l == -1.0 {
            *l = 1.0;
        }
    }
    level
}

pub fn conn_metric(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: &BinaryMask,
    theta: f64,
    levels: usize,
) -> Result<f64> {
    check(pred, gt, region)?;
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be >= 1".into()));
    }
    let level = connectivity_levels(pred, gt, levels);
    let phi = |a: f64, l: f64| {
        let d = a - l;
        if d >= theta { 1.0 - d } else { 1.0 }
    };
    let diffs = pred
        .data()
        .iter()
        .zip(gt.data())
        .zip(&level)
        .map(|((&p, &g), &l)| (phi(p, l) - phi(g, l)).abs());
    Ok(region_sum(diffs, region) / 1000.0)
}

/// All four metrics over the transition region of `eval_trimap`.
pub fn evaluate(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    eval_trimap: &Trimap,
    params: &MetricParams,
) -> Result<MetricReport> {
    params.validate()?;
    ensure_same_dims("gt", pred, gt)?;
    ensure_same_dims("trimap", pred, eval_trimap)?;
    let region = partition(eval_trimap).transition;
    Ok(MetricReport {
        sad: sad(pred, gt, &region)?,
        mse: mse(pred, gt, &region)?,
        grad: grad_metric(pred, gt, &region, params.sigma)?,
        conn: conn_metric(pred, gt, &region, params.theta, params.levels)?,
        pixels_t: region.count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{Label, LabelMap};

    #[test]
    fn sad_forced_arithmetic() {
        let p = AlphaMatte::filled(100, 100, 1.0);
        let g = AlphaMatte::filled(100, 100, 0.0);
        let r = BinaryMask::full(100, 100);
        assert_eq!(sad(&p, &g, &r).unwrap(), 10.0);
    }

    #[test]
    fn mse_constant_error() {
        let p = AlphaMatte::filled(5, 5, 0.6);
        let g = AlphaMatte::filled(5, 5, 0.5);
        let v = mse(&p, &g, &BinaryMask::full(5, 5)).unwrap();
        assert!((v - 0.01).abs() < 1e-15);
    }

    #[test]
    fn mse_empty_region_errors() {
        let p = AlphaMatte::filled(2, 2, 0.6);
        assert!(matches!(
            mse(&p, &p, &BinaryMask::empty(2, 2)),
            Err(Error::EmptyRegion { metric: "mse" })
        ));
        assert_eq!(sad(&p, &p, &BinaryMask::empty(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn grad_constants_zero() {
        let p = AlphaMatte::filled(8, 8, 0.2);
        let g = AlphaMatte::filled(8, 8, 0.9);
        assert!(grad_metric(&p, &g, &BinaryMask::full(8, 8), 1.4).unwrap() < 1e-30);
    }

    #[test]
    fn conn_identical_binary_blobs() {
        let a = AlphaMatte::from_fn(10, 10, |x, y| {
            if (2..6).contains(&x) && (3..8).contains(&y) {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(
            conn_metric(&a, &a, &BinaryMask::full(10, 10), 0.15, 10).unwrap(),
            0.0
        );
    }

    #[test]
    fn largest_component_ties_go_first() {
        // two single pixels; the earlier one wins
        let mask = [false, true, false, true];
        assert_eq!(
            largest_component(&mask, 4, 1),
            vec![false, true, false, false]
        );
        assert_eq!(largest_component(&[false; 4], 2, 2), vec![false; 4]);
    }

    #[test]
    fn evaluate_zero_report() {
        let g = AlphaMatte::from_fn(12, 12, |x, y| ((x * 7 + y * 3) % 10) as f64 / 10.0);
        let t = LabelMap::filled(12, 12, Label::Unknown);
        let r = evaluate(&g, &g, &t, &MetricParams::default()).unwrap();
        assert_eq!(
            (r.sad, r.mse, r.grad, r.conn, r.pixels_t),
            (0.0, 0.0, 0.0, 0.0, 144)
        );
    }

    #[test]
    fn mismatched_shapes() {
        let a = AlphaMatte::filled(3, 3, 0.0);
        let b = AlphaMatte::filled(3, 4, 0.0);
        assert!(matches!(
            sad(&a, &b, &BinaryMask::full(3, 3)),
            Err(Error::DimensionMismatch { operand: "gt", .. })
        ));
    }
}
