use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sfm::FeatureMap;

/// Depthwise 3x3 then pointwise 1x1, a per-channel affine (stands in for
/// inference-time batch norm), and ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct SepConvWeights {
    pub in_channels: usize,
    pub out_channels: usize,
    /// `[in_channels][3][3]`
    pub depthwise: Vec<f64>,
    /// `[out_channels][in_channels]`
    pub pointwise: Vec<f64>,
    pub scale: Vec<f64>,
    pub bias: Vec<f64>,
}

pub const KERNEL: usize = 3;

impl SepConvWeights {
    pub fn zeros(in_channels: usize, out_channels: usize) -> Self {
        SepConvWeights {
            in_channels,
            out_channels,
            depthwise: vec![0.0; in_channels * KERNEL * KERNEL],
            pointwise: vec![0.0; out_channels * in_channels],
            scale: vec![0.0; out_channels],
            bias: vec![0.0; out_channels],
        }
    }

    /// Center-tap depthwise, identity pointwise, unit scale, zero bias.
    pub fn identity(channels: usize) -> Self {
        let mut w = Self::zeros(channels, channels);
        for c in 0..channels {
            w.depthwise[c * 9 + 4] = 1.0;
            w.pointwise[c * channels + c] = 1.0;
            w.scale[c] = 1.0;
        }
        w
    }

    /// Uniform fan-in scaled weights, scale in `[0.5, 1.5)`, bias in `[-0.1, 0.1)`.
    pub fn seeded(in_channels: usize, out_channels: usize, rng: &mut Rng) -> Self {
        let dw = (6.0 / 9.0f64).sqrt();
        let pw = (6.0 / in_channels as f64).sqrt();
        SepConvWeights {
            in_channels,
            out_channels,
            depthwise: (0..in_channels * 9).map(|_| rng.uniform(-dw, dw)).collect(),
            pointwise: (0..out_channels * in_channels)
                .map(|_| rng.uniform(-pw, pw))
                .collect(),
            scale: (0..out_channels).map(|_| rng.uniform(0.5, 1.5)).collect(),
            bias: (0..out_channels).map(|_| rng.uniform(-0.1, 0.1)).collect(),
        }
    }

    pub fn without_bias(mut self) -> Self {
        self.bias.iter_mut().for_each(|b| *b = 0.0);
        self
    }

    pub(crate) fn tensors(&self) -> [(&'static str, Vec<usize>, &[f64]); 4] {
        [
            (
                "depthwise",
                vec![self.in_channels, KERNEL, KERNEL],
                &self.depthwise,
            ),
            (
                "pointwise",
                vec![self.out_channels, self.in_channels],
                &self.pointwise,
            ),
            ("scale", vec![self.out_channels], &self.scale),
            ("bias", vec![self.out_channels], &self.bias),
        ]
    }

    pub(crate) fn tensors_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [
            &mut self.depthwise,
            &mut self.pointwise,
            &mut self.scale,
            &mut self.bias,
        ]
    }
}

#[inline]
fn clamp(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Separable convolution with replicate padding of `dilation` px, so stride 1
/// preserves the spatial size; stride 2 gives `ceil(n / 2)`.
pub fn sep_conv(
    fm: &FeatureMap,
    w: &SepConvWeights,
    dilation: usize,
    stride: usize,
) -> Result<FeatureMap> {
    if fm.channels != w.in_channels {
        return Err(Error::ChannelMismatch {
            expected: w.in_channels,
            found: fm.channels,
        });
    }
    if dilation < 1 {
        return Err(Error::InvalidParameter("dilation must be >= 1".into()));
    }
    if !(stride == 1 || stride == 2) {
        return Err(Error::InvalidParameter(format!(
            "stride must be 1 or 2, got {stride}"
        )));
    }
    let (h, wd) = (fm.height, fm.width);
    let (oh, ow) = (h.div_ceil(stride), wd.div_ceil(stride));
    let d = dilation as isize;

    let mut depth = vec![0.0; fm.channels * oh * ow];
    for c in 0..fm.channels {
        let k = &w.depthwise[c * 9..c * 9 + 9];
        let plane = &fm.data[c * h * wd..(c + 1) * h * wd];
        for oy in 0..oh {
            let cy = (oy * stride) as isize;
            let rows = [clamp(cy - d, h), clamp(cy, h), clamp(cy + d, h)];
            for ox in 0..ow {
                let cx = (ox * stride) as isize;
                let cols = [clamp(cx - d, wd), clamp(cx, wd), clamp(cx + d, wd)];
                let mut acc = 0.0;
                for (ky, &ry) in rows.iter().enumerate() {
                    for (kx, &rx) in cols.iter().enumerate() {
                        acc += plane[ry * wd + rx] * k[ky * 3 + kx];
                    }
                }
                depth[(c * oh + oy) * ow + ox] = acc;
            }
        }
    }

    let plane = oh * ow;
    let mut out = vec![0.0; w.out_channels * plane];
    for o in 0..w.out_channels {
        let dst = &mut out[o * plane..(o + 1) * plane];
        for c in 0..w.in_channels {
            let m = w.pointwise[o * w.in_channels + c];
            let src = &depth[c * plane..(c + 1) * plane];
            for (a, s) in dst.iter_mut().zip(src) {
                *a += m * s;
            }
        }
        for a in dst.iter_mut() {
            *a = (w.scale[o] * *a + w.bias[o]).max(0.0);
        }
    }
    FeatureMap::new(w.out_channels, oh, ow, out)
}

/// Source coordinate and blend weight for one output index
/// (half-pixel centers, clamped at the low edge).
fn sample_axis(dst: usize, in_len: usize, out_len: usize) -> (usize, usize, f64) {
    let scale = in_len as f64 / out_len as f64;
    let src = ((dst as f64 + 0.5) * scale - 0.5).max(0.0);
    let i0 = (src.floor() as usize).min(in_len - 1);
    let i1 = (i0 + 1).min(in_len - 1);
    (i0, i1, src - i0 as f64)
}

/// Bilinear resize with half-pixel sampling (`align_corners = false`).
pub fn resize_bilinear(fm: &FeatureMap, height: usize, width: usize) -> FeatureMap {
    if fm.height == 0 || fm.width == 0 {
        return FeatureMap::zeros(fm.channels, height, width);
    }
    let ys: Vec<_> = (0..height)
        .map(|y| sample_axis(y, fm.height, height))
        .collect();
    let xs: Vec<_> = (0..width)
        .map(|x| sample_axis(x, fm.width, width))
        .collect();
    let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
    FeatureMap::from_fn(fm.channels, height, width, |c, y, x| {
        let (y0, y1, ty) = ys[y];
        let (x0, x1, tx) = xs[x];
        let top = lerp(fm.get(c, y0, x0), fm.get(c, y0, x1), tx);
        let bottom = lerp(fm.get(c, y1, x0), fm.get(c, y1, x1), tx);
        lerp(top, bottom, ty)
    })
}

/// Upsamples to `target`, normally twice the input size.
pub fn upsample2x(fm: &FeatureMap, target: (usize, usize)) -> FeatureMap {
    resize_bilinear(fm, target.0, target.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_passes_nonnegative_input() {
        let fm = FeatureMap::from_fn(3, 5, 6, |c, y, x| (c * 31 + y * 7 + x) as f64 / 13.0);
        for d in [1, 2, 4, 8] {
            assert_eq!(
                sep_conv(&fm, &SepConvWeights::identity(3), d, 1).unwrap(),
                fm
            );
        }
    }

    #[test]
    fn zero_weights_zero_output() {
        let fm = FeatureMap::from_fn(2, 4, 4, |_, y, x| (y + x) as f64);
        let out = sep_conv(&fm, &SepConvWeights::zeros(2, 2), 1, 1).unwrap();
        assert!(out.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stride_two_ceil() {
        let fm = FeatureMap::zeros(1, 7, 5);
        let out = sep_conv(&fm, &SepConvWeights::identity(1), 1, 2).unwrap();
        assert_eq!(out.shape(), (1, 4, 3));
    }

    #[test]
    fn channel_mismatch() {
        let fm = FeatureMap::zeros(2, 3, 3);
        assert!(matches!(
            sep_conv(&fm, &SepConvWeights::identity(3), 1, 1),
            Err(Error::ChannelMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn bilinear_constant_and_single_pixel() {
        let c = FeatureMap::from_fn(2, 3, 3, |_, _, _| 0.7);
        assert!(resize_bilinear(&c, 6, 6).data.iter().all(|&v| v == 0.7));
        let one = FeatureMap::new(1, 1, 1, vec![2.5]).unwrap();
        assert!(resize_bilinear(&one, 4, 3).data.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn bilinear_two_by_two_ramp() {
        // rows/cols sample at source coords 0, 0.25, 0.75, 1 after clamping
        let ramp = FeatureMap::new(1, 2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let up = upsample2x(&ramp, (4, 4));
        let axis = [0.0, 0.25, 0.75, 1.0];
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(up.get(0, y, x), 2.0 * axis[y] + axis[x]);
            }
        }
    }
}
