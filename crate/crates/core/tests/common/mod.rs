//! Brute-force reference implementations shared by the integration tests.
//! Each one follows the textbook definition directly and shares no code
//! with the library beyond its public types.
#![allow(dead_code, clippy::needless_range_loop)]

use matteforge::sfm::{FeatureMap, SepConvWeights};
use matteforge::{AlphaMatte, BinaryMask, Dims, Label, LabelMap, Rng};

// ---------------------------------------------------------------- random inputs

pub fn random_mask(rng: &mut Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.unit() < density)
}

/// Blobby alpha: a few soft disks, with some exact 0/1 plateaus.
pub fn random_alpha(rng: &mut Rng, w: usize, h: usize) -> AlphaMatte {
    let n = rng.range_inclusive(1, 3);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.uniform(0.0, w as f64),
                rng.uniform(0.0, h as f64),
                rng.uniform(2.0, (w.min(h) as f64 / 2.0).max(2.5)),
                rng.uniform(0.5, 4.0),
            )
        })
        .collect();
    AlphaMatte::from_fn(w, h, |x, y| {
        blobs
            .iter()
            .map(|&(cx, cy, r, soft)| {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                ((r - d) / soft + 0.5).clamp(0.0, 1.0)
            })
            .fold(0.0, f64::max)
    })
}

pub fn random_matte(rng: &mut Rng, w: usize, h: usize) -> AlphaMatte {
    AlphaMatte::from_fn(w, h, |_, _| rng.unit())
}

/// Values drawn from `{0, 1/q, …, 1}`, so ties and exact thresholds occur.
pub fn random_quantized_matte(rng: &mut Rng, w: usize, h: usize, q: u64) -> AlphaMatte {
    AlphaMatte::from_fn(w, h, |_, _| rng.range_inclusive(0, q) as f64 / q as f64)
}

pub fn random_trimap(rng: &mut Rng, w: usize, h: usize) -> LabelMap {
    LabelMap::from_fn(w, h, |_, _| match rng.below(3) {
        0 => Label::Background,
        1 => Label::Unknown,
        _ => Label::Foreground,
    })
}

// ---------------------------------------------------------------- morphology

fn clampi(v: isize, n: usize) -> usize {
    v.clamp(0, n as isize - 1) as usize
}

/// Erosion by every offset with `dx² + dy² <= r²`, replicate border.
pub fn brute_erode(mask: &BinaryMask, r: u32) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let r = r as isize;
    BinaryMask::from_fn(w, h, |x, y| {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r
                    && !mask.get(clampi(x as isize + dx, w), clampi(y as isize + dy, h))
                {
                    return false;
                }
            }
        }
        true
    })
}

pub fn brute_dilate(mask: &BinaryMask, r: u32) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let r = r as isize;
    BinaryMask::from_fn(w, h, |x, y| {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r
                    && mask.get(clampi(x as isize + dx, w), clampi(y as isize + dy, h))
                {
                    return true;
                }
            }
        }
        false
    })
}

/// Trimap from alpha: erode `{α ≥ 254/255}` and `{α ≤ 1/255}` by disks.
pub fn brute_trimap(alpha: &AlphaMatte, rf: u32, rb: u32) -> LabelMap {
    let (w, h) = (alpha.width(), alpha.height());
    let eps = 1.0 / 255.0;
    let fg = brute_erode(
        &BinaryMask::from_fn(w, h, |x, y| alpha.get(x, y) >= 1.0 - eps),
        rf,
    );
    let bg = brute_erode(
        &BinaryMask::from_fn(w, h, |x, y| alpha.get(x, y) <= eps),
        rb,
    );
    LabelMap::from_fn(w, h, |x, y| {
        if fg.get(x, y) {
            Label::Foreground
        } else if bg.get(x, y) {
            Label::Background
        } else {
            Label::Unknown
        }
    })
}

// ---------------------------------------------------------------- metrics

/// Gaussian-derivative filter taps rebuilt from their definition: Gaussian
/// normalized to unit sum, derivative `k·g(k)` scaled for unit ramp response,
/// half-width the first integer where the Gaussian density is <= 0.01.
pub fn oracle_taps(sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let peak = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
    let mut r = 1usize;
    while peak * (-((r * r) as f64) / (2.0 * sigma * sigma)).exp() > 0.01 {
        r += 1;
    }
    let ri = r as isize;
    let g: Vec<f64> = (-ri..=ri)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    let g: Vec<f64> = g.into_iter().map(|v| v / s).collect();
    let raw: Vec<f64> = (-ri..=ri).zip(&g).map(|(k, v)| k as f64 * v).collect();
    let resp: f64 = (-ri..=ri).zip(&raw).map(|(k, v)| k as f64 * v).sum();
    (g, raw.into_iter().map(|v| v / resp).collect())
}

/// Dense 2-D correlation of the outer-product kernels, replicate border.
pub fn dense_gradient(img: &[f64], w: usize, h: usize, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let (g, d) = oracle_taps(sigma);
    let r = (g.len() / 2) as isize;
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let (mut sx, mut sy) = (0.0, 0.0);
            for j in -r..=r {
                for i in -r..=r {
                    let v = img[clampi(y as isize + j, h) * w + clampi(x as isize + i, w)];
                    sx += g[(j + r) as usize] * d[(i + r) as usize] * v;
                    sy += d[(j + r) as usize] * g[(i + r) as usize] * v;
                }
            }
            gx[y * w + x] = sx;
            gy[y * w + x] = sy;
        }
    }
    (gx, gy)
}

pub fn brute_sad(p: &AlphaMatte, g: &AlphaMatte, region: &BinaryMask) -> f64 {
    let mut s = 0.0;
    for y in 0..p.height() {
        for x in 0..p.width() {
            if region.get(x, y) {
                s += (p.get(x, y) - g.get(x, y)).abs();
            }
        }
    }
    s / 1000.0
}

pub fn brute_mse(p: &AlphaMatte, g: &AlphaMatte, region: &BinaryMask) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for y in 0..p.height() {
        for x in 0..p.width() {
            if region.get(x, y) {
                s += (p.get(x, y) - g.get(x, y)).powi(2);
                n += 1;
            }
        }
    }
    s / n as f64
}

pub fn brute_grad(p: &AlphaMatte, g: &AlphaMatte, region: &BinaryMask, sigma: f64) -> f64 {
    let (w, h) = (p.width(), p.height());
    let (px, py) = dense_gradient(p.data(), w, h, sigma);
    let (gx, gy) = dense_gradient(g.data(), w, h, sigma);
    let mut s = 0.0;
    for i in 0..w * h {
        if region.data()[i] {
            let mp = (px[i] * px[i] + py[i] * py[i]).sqrt();
            let mg = (gx[i] * gx[i] + gy[i] * gy[i]).sqrt();
            s += (mp - mg).powi(2);
        }
    }
    s / 1000.0
}

/// Largest 4-connected component by union-find; on equal sizes the
/// component holding the smallest row-major index wins.
pub fn uf_largest_component(mask: &[bool], w: usize, h: usize) -> Vec<bool> {
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let n = w * h;
    let mut parent: Vec<usize> = (0..n).collect();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask[i] {
                continue;
            }
            for j in [(x + 1 < w).then(|| i + 1), (y + 1 < h).then(|| i + w)]
                .into_iter()
                .flatten()
            {
                if mask[j] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    // keep the smaller index as root so roots are first pixels
                    if a < b {
                        parent[b] = a;
                    } else if b < a {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut size = vec![0usize; n];
    for i in 0..n {
        if mask[i] {
            let r = find(&mut parent, i);
            size[r] += 1;
        }
    }
    let mut best: Option<usize> = None;
    for root in 0..n {
        if size[root] > 0 && best.is_none_or(|b| size[root] > size[b]) {
            best = Some(root);
        }
    }
    (0..n)
        .map(|i| mask[i] && best == Some(find(&mut parent, i)))
        .collect()
}

pub fn brute_conn(
    p: &AlphaMatte,
    g: &AlphaMatte,
    region: &BinaryMask,
    theta: f64,
    levels: usize,
) -> f64 {
    let (w, h) = (p.width(), p.height());
    let n = w * h;
    let mut l: Vec<Option<f64>> = vec![None; n];
    for k in 1..=levels {
        let t = k as f64 / levels as f64;
        let m: Vec<bool> = (0..n)
            .map(|i| p.data()[i] >= t && g.data()[i] >= t)
            .collect();
        let omega = uf_largest_component(&m, w, h);
        for i in 0..n {
            if l[i].is_none() && !omega[i] {
                l[i] = Some((k - 1) as f64 / levels as f64);
            }
        }
    }
    let mut s = 0.0;
    for i in 0..n {
        if !region.data()[i] {
            continue;
        }
        let li = l[i].unwrap_or(1.0);
        let phi = |a: f64| {
            let d = a - li;
            if d >= theta { 1.0 - d } else { 1.0 }
        };
        s += (phi(p.data()[i]) - phi(g.data()[i])).abs();
    }
    s / 1000.0
}

// ---------------------------------------------------------------- losses

/// Total loss written out from its three terms.
pub fn oracle_loss(
    p: &[f64],
    g: &[f64],
    known: &[bool],
    trans: &[bool],
    w: usize,
    h: usize,
    sigma: f64,
) -> f64 {
    let n = w * h;
    let nk = known.iter().filter(|&&b| b).count();
    let nt = trans.iter().filter(|&&b| b).count();
    let l2: f64 = (0..n)
        .filter(|&i| known[i])
        .map(|i| (p[i] - g[i]).powi(2))
        .sum::<f64>()
        / nk.max(1) as f64;
    let l1: f64 = (0..n)
        .filter(|&i| trans[i])
        .map(|i| (p[i] - g[i]).abs())
        .sum::<f64>()
        / nt.max(1) as f64;
    let (px, py) = dense_gradient(p, w, h, sigma);
    let (gx, gy) = dense_gradient(g, w, h, sigma);
    let lg: f64 = (0..n)
        .map(|i| (px[i].hypot(py[i]) - gx[i].hypot(gy[i])).abs())
        .sum::<f64>()
        / n as f64;
    l2 + l1 + lg
}

// ---------------------------------------------------------------- sfm

/// Full dense convolution with kernel `pw[o][c]·dw[c][ky][kx]` over an
/// explicitly replicate-padded input, sampled every `stride` px.
pub fn dense_sep_conv(
    fm: &FeatureMap,
    w: &SepConvWeights,
    dilation: usize,
    stride: usize,
) -> FeatureMap {
    let (c_in, h, wd) = fm.shape();
    let d = dilation;
    let (ph, pw) = (h + 2 * d, wd + 2 * d);
    let mut padded = vec![0.0; c_in * ph * pw];
    for c in 0..c_in {
        for y in 0..ph {
            for x in 0..pw {
                let sy = clampi(y as isize - d as isize, h);
                let sx = clampi(x as isize - d as isize, wd);
                padded[(c * ph + y) * pw + x] = fm.get(c, sy, sx);
            }
        }
    }
    let (oh, ow) = (h.div_ceil(stride), wd.div_ceil(stride));
    FeatureMap::from_fn(w.out_channels, oh, ow, |o, oy, ox| {
        let mut acc = 0.0;
        for c in 0..c_in {
            for ky in 0..3 {
                for kx in 0..3 {
                    let k = w.pointwise[o * c_in + c] * w.depthwise[c * 9 + ky * 3 + kx];
                    let (y, x) = (oy * stride + ky * d, ox * stride + kx * d);
                    acc += k * padded[(c * ph + y) * pw + x];
                }
            }
        }
        (w.scale[o] * acc + w.bias[o]).max(0.0)
    })
}

/// Bilinear resize from the half-pixel mapping `src = (dst + ½)·in/out − ½`,
/// clamped into the grid.
pub fn oracle_resize(fm: &FeatureMap, oh: usize, ow: usize) -> FeatureMap {
    let (_, h, w) = fm.shape();
    let axis = |dst: usize, n_in: usize, n_out: usize| {
        let s =
            ((dst as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = (i0 + 1).min(n_in - 1);
        (i0, i1, s - i0 as f64)
    };
    FeatureMap::from_fn(fm.channels, oh, ow, |c, y, x| {
        let (y0, y1, ty) = axis(y, h, oh);
        let (x0, x1, tx) = axis(x, w, ow);
        (1.0 - ty) * ((1.0 - tx) * fm.get(c, y0, x0) + tx * fm.get(c, y0, x1))
            + ty * ((1.0 - tx) * fm.get(c, y1, x0) + tx * fm.get(c, y1, x1))
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Distance between two finite floats in units in the last place.
pub fn ulps(a: f64, b: f64) -> u64 {
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 { i64::MIN - bits } else { bits }
    };
    key(a).abs_diff(key(b))
}
