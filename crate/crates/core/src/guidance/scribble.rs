//! Cubic scribble curves through sampled points, rasterized by disk stamping.

use crate::error::{Error, Result};
use crate::guidance::sampling::PointSet;
use crate::raster::{BinaryMask, Dims};

pub type ScribbleMask = BinaryMask;

/// Maximum arc-length advance between consecutive stamps, in pixels.
pub const STAMP_SPACING: f64 = 0.5;

const MAX_STAMPS_PER_CURVE: usize = 1 << 22;

/// Sets every pixel whose center lies within `radius` of `(cx, cy)`.
pub fn stamp_disk(mask: &mut BinaryMask, cx: f64, cy: f64, radius: f64) {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    if w == 0 || h == 0 || radius < 0.0 {
        return;
    }
    let r2 = radius * radius;
    let inside = |x: isize, y: isize| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        dx * dx + dy * dy <= r2
    };
    let y0 = ((cy - radius).ceil() as isize).max(0);
    let y1 = ((cy + radius).floor() as isize).min(h - 1);
    for y in y0..=y1 {
        let dy = y as f64 - cy;
        let rem = r2 - dy * dy;
        if rem < 0.0 {
            continue;
        }
        let half = rem.sqrt();
        let mut lo = (cx - half).ceil() as isize;
        let mut hi = (cx + half).floor() as isize;
        // settle sqrt rounding against the exact predicate
        while inside(lo - 1, y) {
            lo -= 1;
        }
        while lo <= hi && !inside(lo, y) {
            lo += 1;
        }
        while inside(hi + 1, y) {
            hi += 1;
        }
        while hi >= lo && !inside(hi, y) {
            hi -= 1;
        }
        let lo = lo.max(0);
        let hi = hi.min(w - 1);
        for x in lo..=hi {
            mask.set(x as usize, y as usize, true);
        }
    }
}

/// A cubic `v = a·u³ + b·u² + c·u + d` in the normalized abscissa
/// `u = (t - center) / half_span`, with `t` running over `[lo, hi]`.
///
/// When `transposed`, `t` is the row coordinate and `v` the column.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicCurve {
    pub coef: [f64; 4],
    pub lo: f64,
    pub hi: f64,
    pub transposed: bool,
}

impl CubicCurve {
    fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half_span(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center()) / self.half_span();
        let [a, b, c, d] = self.coef;
        ((a * u + b) * u + c) * u + d
    }

    /// dv/dt.
    pub fn slope(&self, t: f64) -> f64 {
        let u = (t - self.center()) / self.half_span();
        let [a, b, c, _] = self.coef;
        ((3.0 * a * u + 2.0 * b) * u + c) / self.half_span()
    }

    /// Curve point at parameter `t` as `(x, y)`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        if self.transposed {
            (self.eval(t), t)
        } else {
            (t, self.eval(t))
        }
    }

    /// Parameters spaced so consecutive points are at most
    /// [`STAMP_SPACING`] px apart along the curve; always ends at `hi`.
    pub fn stamp_params(&self) -> Vec<f64> {
        let mut ts = Vec::new();
        let mut t = self.lo;
        while t < self.hi && ts.len() < MAX_STAMPS_PER_CURVE {
            ts.push(t);
            let s = self.slope(t);
            let mut dt = STAMP_SPACING / (1.0 + s * s).sqrt();
            let (x0, y0) = self.point(t);
            // curvature can stretch the chord past the tangent estimate
            loop {
                let (x1, y1) = self.point((t + dt).min(self.hi));
                if (x1 - x0).hypot(y1 - y0) <= STAMP_SPACING {
                    break;
                }
                dt *= 0.5;
            }
            t += dt;
        }
        ts.push(self.hi);
        ts
    }
}

/// Minimum-norm coefficients `[a, b, c, d]` of a cubic through three points
/// with distinct abscissae, solved in the normalized coordinate `u ∈ [-1, 1]`.
///
/// Solves `(A Aᵀ) w = v`, then `coef = Aᵀ w`, with rows `A_i = [u³, u², u, 1]`.
fn min_norm_cubic(us: [f64; 3], vs: [f64; 3]) -> [f64; 4] {
    let rows: [[f64; 4]; 3] = us.map(|u| [u * u * u, u * u, u, 1.0]);
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..4).map(|k| rows[i][k] * rows[j][k]).sum();
        }
        m[i][3] = vs[i];
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (v, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
        }
    }
    let mut w = [0.0f64; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|k| m[i][k] * w[k]).sum();
        w[i] = (m[i][3] - tail) / m[i][i];
    }
    let mut coef = [0.0f64; 4];
    for (k, c) in coef.iter_mut().enumerate() {
        *c = (0..3).map(|i| rows[i][k] * w[i]).sum();
    }
    coef
}

fn distinct3(v: [f64; 3]) -> bool {
    v[0] != v[1] && v[1] != v[2] && v[0] != v[2]
}

/// Fits `y(x)` through the triple; if two x coincide, fits `x(y)` instead.
/// Returns `None` when both axes repeat a coordinate.
pub fn fit_cubic(triple: [(usize, usize); 3]) -> Option<CubicCurve> {
    let xs = triple.map(|p| p.0 as f64);
    let ys = triple.map(|p| p.1 as f64);
    let (ts, vs, transposed) = if distinct3(xs) {
        (xs, ys, false)
    } else if distinct3(ys) {
        (ys, xs, true)
    } else {
        return None;
    };
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let us = ts.map(|t| (t - center) / half);
    Some(CubicCurve {
        coef: min_norm_cubic(us, vs),
        lo,
        hi,
        transposed,
    })
}

/// Rasterizes scribbles: each consecutive triple of points becomes a cubic
/// stroked with disks of diameter `thickness`; leftover points and
/// degenerate triples are stamped as single disks.
pub fn fit_scribble(
    points: &PointSet,
    thickness: u32,
    width: usize,
    height: usize,
) -> Result<ScribbleMask> {
    if thickness < 1 {
        return Err(Error::InvalidParameter(
            "scribble thickness must be >= 1".into(),
        ));
    }
    let radius = thickness as f64 / 2.0;
    let mut mask = BinaryMask::empty(width, height);
    if width == 0 || height == 0 {
        return Ok(mask);
    }
    let covers_canvas = |cx: f64, cy: f64| {
        [
            (0.0, 0.0),
            (width as f64 - 1.0, 0.0),
            (0.0, height as f64 - 1.0),
            (width as f64 - 1.0, height as f64 - 1.0),
        ]
        .iter()
        .all(|&(x, y)| (x - cx).powi(2) + (y - cy).powi(2) <= radius * radius)
    };
    let stamp = |mask: &mut BinaryMask, cx: f64, cy: f64| -> bool {
        if covers_canvas(cx, cy) {
            *mask = BinaryMask::full(width, height);
            return true;
        }
        stamp_disk(mask, cx, cy, radius);
        false
    };

    for chunk in points.points.chunks(3) {
        let curve = match chunk {
            &[a, b, c] => fit_cubic([a, b, c]),
            _ => None,
        };
        match curve {
            Some(curve) => {
                for t in curve.stamp_params() {
                    let (x, y) = curve.point(t);
                    if stamp(&mut mask, x, y) {
                        return Ok(mask);
                    }
                }
                // the polynomial interpolates its points; stamp them exactly too
                for &(x, y) in chunk {
                    stamp(&mut mask, x as f64, y as f64);
                }
            }
            None => {
                for &(x, y) in chunk {
                    if stamp(&mut mask, x as f64, y as f64) {
                        return Ok(mask);
                    }
                }
            }
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::sampling::Region;

    fn set(points: &[(usize, usize)]) -> PointSet {
        PointSet {
            points: points.to_vec(),
            region: Region::Foreground,
        }
    }

    #[test]
    fn no_points_no_mask() {
        assert!(fit_scribble(&set(&[]), 10, 20, 20).unwrap().none());
    }

    #[test]
    fn zero_thickness_rejected() {
        assert!(fit_scribble(&set(&[(1, 1)]), 0, 4, 4).is_err());
    }

    #[test]
    fn single_point_disk_area() {
        let m = fit_scribble(&set(&[(60, 60)]), 40, 120, 120).unwrap();
        let area = std::f64::consts::PI * 400.0;
        let got = m.count() as f64;
        assert!((got - area).abs() / area < 0.05, "{got}");
    }

    #[test]
    fn cubic_interpolates_triple() {
        for triple in [[(3, 10), (40, 2), (90, 55)], [(5, 5), (5, 40), (30, 80)]] {
            let c = fit_cubic(triple).unwrap();
            for (x, y) in triple {
                let (px, py) = if c.transposed {
                    (c.eval(y as f64), y as f64)
                } else {
                    (x as f64, c.eval(x as f64))
                };
                assert!((px - x as f64).abs() < 1e-9 && (py - y as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn collinear_equally_spaced_is_straight() {
        let c = fit_cubic([(10, 7), (110, 7), (210, 7)]).unwrap();
        assert_eq!(c.coef, [0.0, 0.0, 0.0, 7.0]);
    }

    #[test]
    fn doubly_degenerate_triple() {
        assert!(fit_cubic([(0, 0), (0, 9), (9, 0)]).is_none());
    }

    #[test]
    fn stamps_are_dense() {
        let c = fit_cubic([(0, 0), (30, 60), (60, 5)]).unwrap();
        let ts = c.stamp_params();
        for pair in ts.windows(2) {
            let (a, b) = (c.point(pair[0]), c.point(pair[1]));
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            assert!(d <= STAMP_SPACING, "gap {d}");
        }
    }

    #[test]
    fn huge_thickness_fills_canvas() {
        let m = fit_scribble(&set(&[(2, 3), (10, 12), (20, 4)]), 800, 32, 32).unwrap();
        assert_eq!(m.count(), 32 * 32);
    }
}
