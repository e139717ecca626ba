//! Separable Gaussian and first-order Gaussian-derivative filtering with
//! replicate borders, and the adjoint of the same operators.
//!
//! Filters are correlations: `out[x] = Σ_k in[clamp(x + k)] · taps[k]`,
//! with `k` running over `-radius..=radius`.

/// Default scale of the derivative filter, shared by the gradient metric and loss.
pub const DEFAULT_SIGMA: f64 = 1.4;

/// Gaussian and first-derivative taps for one scale.
///
/// `gauss` sums to 1. `deriv` is antisymmetric and normalized so a unit
/// ramp has response exactly 1 (`Σ k·deriv[k] = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDerivativeKernel {
    pub sigma: f64,
    pub radius: usize,
    pub gauss: Vec<f64>,
    pub deriv: Vec<f64>,
}

impl GaussianDerivativeKernel {
    /// Half-width is where the Gaussian density drops to 0.01,
    /// `ceil(σ·sqrt(-2 ln(sqrt(2π)·σ·0.01)))`, and at least 1.
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        let arg = (2.0 * std::f64::consts::PI).sqrt() * sigma * 0.01;
        let radius = if arg < 1.0 {
            (sigma * (-2.0 * arg.ln()).sqrt()).ceil() as usize
        } else {
            (3.0 * sigma).ceil() as usize
        }
        .max(1);
        let r = radius as isize;
        let raw: Vec<f64> = (-r..=r)
            .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        let gauss: Vec<f64> = raw.iter().map(|g| g / total).collect();
        let moment: f64 = (-r..=r).zip(&gauss).map(|(k, g)| (k * k) as f64 * g).sum();
        let deriv = (-r..=r)
            .zip(&gauss)
            .map(|(k, g)| k as f64 * g / moment)
            .collect();
        GaussianDerivativeKernel {
            sigma,
            radius,
            gauss,
            deriv,
        }
    }
}

/// Gaussian smoothing taps with half-width `ceil(3σ)`, summing to 1.
pub fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|g| g / total).collect()
}

#[inline]
fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Correlates each row with `taps`.
pub fn correlate_rows(data: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (j, t) in taps.iter().enumerate() {
                acc += row[clamp_index(x as isize + j as isize - r, width)] * t;
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Correlates each column with `taps`.
pub fn correlate_cols(data: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for (j, t) in taps.iter().enumerate() {
            let src = clamp_index(y as isize + j as isize - r, height);
            let src_row = &data[src * width..(src + 1) * width];
            let dst = &mut out[y * width..(y + 1) * width];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += s * t;
            }
        }
    }
    out
}

/// Adjoint of [`correlate_rows`]: scatters each output back onto the
/// clamped inputs it read.
pub fn correlate_rows_adjoint(grad: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; grad.len()];
    for y in 0..height {
        for x in 0..width {
            let g = grad[y * width + x];
            for (j, t) in taps.iter().enumerate() {
                out[y * width + clamp_index(x as isize + j as isize - r, width)] += g * t;
            }
        }
    }
    out
}

/// Adjoint of [`correlate_cols`].
pub fn correlate_cols_adjoint(grad: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let r = (taps.len() / 2) as isize;
    let mut out = vec![0.0; grad.len()];
    for y in 0..height {
        for (j, t) in taps.iter().enumerate() {
            let dst = clamp_index(y as isize + j as isize - r, height);
            for x in 0..width {
                out[dst * width + x] += grad[y * width + x] * t;
            }
        }
    }
    out
}

/// Horizontal and vertical Gaussian-derivative responses.
pub fn gradient(
    data: &[f64],
    width: usize,
    height: usize,
    k: &GaussianDerivativeKernel,
) -> (Vec<f64>, Vec<f64>) {
    let gx = correlate_cols(
        &correlate_rows(data, width, height, &k.deriv),
        width,
        height,
        &k.gauss,
    );
    let gy = correlate_rows(
        &correlate_cols(data, width, height, &k.deriv),
        width,
        height,
        &k.gauss,
    );
    (gx, gy)
}

/// Per-pixel `sqrt(gx² + gy²)`.
pub fn gradient_magnitude(
    data: &[f64],
    width: usize,
    height: usize,
    k: &GaussianDerivativeKernel,
) -> Vec<f64> {
    let (gx, gy) = gradient(data, width, height, k);
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
}

/// Adjoint of [`gradient`]: maps `(∂L/∂gx, ∂L/∂gy)` to `∂L/∂data`.
pub fn gradient_adjoint(
    dgx: &[f64],
    dgy: &[f64],
    width: usize,
    height: usize,
    k: &GaussianDerivativeKernel,
) -> Vec<f64> {
    let ax = correlate_rows_adjoint(
        &correlate_cols_adjoint(dgx, width, height, &k.gauss),
        width,
        height,
        &k.deriv,
    );
    let ay = correlate_cols_adjoint(
        &correlate_rows_adjoint(dgy, width, height, &k.gauss),
        width,
        height,
        &k.deriv,
    );
    ax.iter().zip(&ay).map(|(a, b)| a + b).collect()
}

/// Separable Gaussian blur with replicate borders.
pub fn gaussian_blur(data: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return data.to_vec();
    }
    let taps = gaussian_taps(sigma);
    correlate_cols(
        &correlate_rows(data, width, height, &taps),
        width,
        height,
        &taps,
    )
}
