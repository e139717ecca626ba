//! Training loss: ℓ2 on known pixels, ℓ1 on transition pixels, plus ℓ1 on
//! gradient magnitudes over the whole image, with its analytic derivative.
//!
//! At the ℓ1 kinks (`pred == gt` on the transition region, equal gradient
//! magnitudes, or a zero predicted gradient) the subgradient 0 is used.
//! Gradient magnitudes within [`KINK_EPS`] of each other, or of zero, count
//! as kinks: filtering a constant image leaves rounding residue of ~1e-17.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{GaussianDerivativeKernel, gradient, gradient_adjoint};
use crate::raster::{AlphaMatte, Dims, ensure_same_dims};
use crate::trimap::RegionPartition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l2_known: f64,
    pub l1_transition: f64,
    pub grad_term: f64,
    pub total: f64,
}

fn check(pred: &AlphaMatte, gt: &AlphaMatte) -> Result<()> {
    ensure_same_dims("gt", pred, gt)?;
    if pred.is_empty() {
        return Err(Error::InvalidParameter("loss of an empty image".into()));
    }
    Ok(())
}

fn check_partition(pred: &AlphaMatte, part: &RegionPartition) -> Result<()> {
    ensure_same_dims("known", pred, &part.known)?;
    ensure_same_dims("transition", pred, &part.transition)
}

pub const KINK_EPS: f64 = 1e-12;

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean absolute difference of Gaussian-derivative gradient magnitudes.
pub fn grad_loss(pred: &AlphaMatte, gt: &AlphaMatte, sigma: f64) -> Result<f64> {
    check(pred, gt)?;
    let (w, h) = (pred.width(), pred.height());
    let k = GaussianDerivativeKernel::new(sigma);
    let (px, py) = gradient(pred.data(), w, h, &k);
    let (gx, gy) = gradient(gt.data(), w, h, &k);
    let total: f64 = (0..w * h)
        .map(|i| (px[i].hypot(py[i]) - gx[i].hypot(gy[i])).abs())
        .sum();
    Ok(total / (w * h) as f64)
}

pub fn matting_loss(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    part: &RegionPartition,
    sigma: f64,
) -> Result<LossBreakdown> {
    check(pred, gt)?;
    check_partition(pred, part)?;
    let (mut sq, mut nk, mut abs, mut nt) = (0.0, 0usize, 0.0, 0usize);
    for (i, (p, g)) in pred.data().iter().zip(gt.data()).enumerate() {
        let d = p - g;
        if part.known.data()[i] {
            sq += d * d;
            nk += 1;
        }
        if part.transition.data()[i] {
            abs += d.abs();
            nt += 1;
        }
    }
    let l2_known = if nk > 0 { sq / nk as f64 } else { 0.0 };
    let l1_transition = if nt > 0 { abs / nt as f64 } else { 0.0 };
    let grad_term = grad_loss(pred, gt, sigma)?;
    Ok(LossBreakdown {
        l2_known,
        l1_transition,
        grad_term,
        total: l2_known + l1_transition + grad_term,
    })
}

/// ∂(total loss)/∂pred, per pixel.
pub fn loss_gradient(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    part: &RegionPartition,
    sigma: f64,
) -> Result<Vec<f64>> {
    check(pred, gt)?;
    check_partition(pred, part)?;
    let (w, h) = (pred.width(), pred.height());
    let n = w * h;
    let nk = part.known.count();
    let nt = part.transition.count();

    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let d = pred.data()[i] - gt.data()[i];
        if part.known.data()[i] {
            *o += 2.0 * d / nk as f64;
        }
        if part.transition.data()[i] {
            *o += sign(d) / nt as f64;
        }
    }

    let k = GaussianDerivativeKernel::new(sigma);
    let (px, py) = gradient(pred.data(), w, h, &k);
    let (gx, gy) = gradient(gt.data(), w, h, &k);
    let mut dgx = vec![0.0; n];
    let mut dgy = vec![0.0; n];
    for i in 0..n {
        let m = px[i].hypot(py[i]);
        let diff = m - gx[i].hypot(gy[i]);
        if m <= KINK_EPS || diff.abs() <= KINK_EPS {
            continue;
        }
        let s = sign(diff) / n as f64;
        dgx[i] = s * px[i] / m;
        dgy[i] = s * py[i] / m;
    }
    for (o, a) in out.iter_mut().zip(gradient_adjoint(&dgx, &dgy, w, h, &k)) {
        *o += a;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryMask;

    fn all_known(w: usize, h: usize) -> RegionPartition {
        RegionPartition {
            known: BinaryMask::full(w, h),
            transition: BinaryMask::empty(w, h),
        }
    }

    #[test]
    fn identical_inputs_zero_everything() {
        let g = AlphaMatte::from_fn(9, 7, |x, y| ((x * 3 + y * 5) % 7) as f64 / 7.0);
        let part = RegionPartition {
            known: BinaryMask::from_fn(9, 7, |x, _| x < 4),
            transition: BinaryMask::from_fn(9, 7, |x, _| x >= 4),
        };
        let l = matting_loss(&g, &g, &part, 1.4).unwrap();
        assert_eq!(
            (l.l2_known, l.l1_transition, l.grad_term, l.total),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(
            loss_gradient(&g, &g, &part, 1.4)
                .unwrap()
                .iter()
                .all(|&v| v == 0.0)
        );
    }

    #[test]
    fn constant_offset_on_known() {
        let g = AlphaMatte::filled(6, 6, 0.3);
        let p = AlphaMatte::filled(6, 6, 0.4);
        let l = matting_loss(&p, &g, &all_known(6, 6), 1.4).unwrap();
        assert!((l.l2_known - 0.01).abs() < 1e-15);
        assert_eq!(l.l1_transition, 0.0);
        // constant images have no gradient term
        assert!(l.grad_term.abs() < 1e-15);
        let d = loss_gradient(&p, &g, &all_known(6, 6), 1.4).unwrap();
        for v in d {
            assert!((v - 2.0 * 0.1 / 36.0).abs() < 1e-15);
        }
    }

    #[test]
    fn shape_mismatch() {
        let a = AlphaMatte::filled(3, 3, 0.0);
        let b = AlphaMatte::filled(4, 3, 0.0);
        assert!(grad_loss(&a, &b, 1.4).is_err());
        assert!(matting_loss(&a, &a, &all_known(2, 2), 1.4).is_err());
    }
}
