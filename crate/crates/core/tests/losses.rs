mod common;

use common::*;
use matteforge::filter::{DEFAULT_SIGMA, GaussianDerivativeKernel, gradient};
use matteforge::losses::{loss_gradient, matting_loss};
use matteforge::trimap::{RegionPartition, partition};
use matteforge::{AlphaMatte, BinaryMask, Rng};

/// Random instance whose loss is differentiable with margin `m` at every pixel.
fn kink_free(
    rng: &mut Rng,
    w: usize,
    h: usize,
    m: f64,
) -> (AlphaMatte, AlphaMatte, RegionPartition) {
    let k = GaussianDerivativeKernel::new(DEFAULT_SIGMA);
    loop {
        let g = random_matte(rng, w, h);
        let p = AlphaMatte::from_fn(w, h, |x, y| {
            let v = g.get(x, y) + rng.uniform(-0.4, 0.4);
            if (v - g.get(x, y)).abs() < 0.05 {
                g.get(x, y) + 0.05
            } else {
                v
            }
        });
        let (px, py) = gradient(p.data(), w, h, &k);
        let (gx, gy) = gradient(g.data(), w, h, &k);
        let smooth = (0..w * h).all(|i| {
            let mp = px[i].hypot(py[i]);
            mp > m && (mp - gx[i].hypot(gy[i])).abs() > m
        });
        if smooth {
            let t = random_trimap(rng, w, h);
            return (p, g, partition(&t));
        }
    }
}

#[test]
fn loss_value_matches_oracle() {
    let mut rng = Rng::new(31);
    for _ in 0..20 {
        let (w, h) = (
            rng.range_inclusive(2, 14) as usize,
            rng.range_inclusive(2, 14) as usize,
        );
        let p = random_matte(&mut rng, w, h);
        let g = random_matte(&mut rng, w, h);
        let part = partition(&random_trimap(&mut rng, w, h));
        let l = matting_loss(&p, &g, &part, DEFAULT_SIGMA).unwrap();
        let o = oracle_loss(
            p.data(),
            g.data(),
            part.known.data(),
            part.transition.data(),
            w,
            h,
            DEFAULT_SIGMA,
        );
        assert!((l.total - o).abs() < 1e-12, "{} vs {o}", l.total);
        assert_eq!(l.total, l.l2_known + l.l1_transition + l.grad_term);
    }
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let mut rng = Rng::new(32);
    let h_step = 1e-5;
    for _ in 0..10 {
        let (p, g, part) = kink_free(&mut rng, 10, 10, 1e-3);
        let an = loss_gradient(&p, &g, &part, DEFAULT_SIGMA).unwrap();
        let base = p.data().to_vec();
        for i in 0..base.len() {
            let eval = |v: f64| {
                let mut q = base.clone();
                q[i] = v;
                oracle_loss(
                    &q,
                    g.data(),
                    part.known.data(),
                    part.transition.data(),
                    10,
                    10,
                    DEFAULT_SIGMA,
                )
            };
            let num = (eval(base[i] + h_step) - eval(base[i] - h_step)) / (2.0 * h_step);
            let rel = (an[i] - num).abs() / an[i].abs().max(num.abs()).max(1e-8);
            assert!(rel < 1e-4, "pixel {i}: analytic {} numeric {num}", an[i]);
        }
    }
}

#[test]
fn l2_and_l1_sensitivities_cross_at_half() {
    // single-pixel error e: d(e²)/de = 2e against d|e|/de = 1
    let gt = AlphaMatte::filled(1, 1, 0.0);
    let known = RegionPartition {
        known: BinaryMask::full(1, 1),
        transition: BinaryMask::empty(1, 1),
    };
    let trans = RegionPartition {
        known: BinaryMask::empty(1, 1),
        transition: BinaryMask::full(1, 1),
    };
    let sens = |part: &RegionPartition, e: f64| {
        loss_gradient(&AlphaMatte::filled(1, 1, e), &gt, part, DEFAULT_SIGMA).unwrap()[0]
    };
    let gap = |e: f64| sens(&known, e) - sens(&trans, e);
    assert!(gap(0.25) < 0.0 && gap(0.75) > 0.0);
    let (mut lo, mut hi) = (0.1, 0.9);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 { lo = mid } else { hi = mid }
    }
    assert!((0.5 * (lo + hi) - 0.5).abs() < 1e-9);
}

#[test]
fn empty_regions_contribute_nothing() {
    let p = AlphaMatte::filled(3, 3, 0.2);
    let g = AlphaMatte::filled(3, 3, 0.7);
    let part = RegionPartition {
        known: BinaryMask::empty(3, 3),
        transition: BinaryMask::empty(3, 3),
    };
    let l = matting_loss(&p, &g, &part, DEFAULT_SIGMA).unwrap();
    assert_eq!((l.l2_known, l.l1_transition), (0.0, 0.0));
}
