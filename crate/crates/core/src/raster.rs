//! Raster types shared by every stage, plus the composition equation.

use crate::error::{Error, Result};

/// Width and height of a raster.
pub trait Dims {
    fn width(&self) -> usize;
    fn height(&self) -> usize;

    fn len(&self) -> usize {
        self.width() * self.height()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

macro_rules! impl_dims {
    ($($t:ty),*) => {$(
        impl Dims for $t {
            fn width(&self) -> usize { self.width }
            fn height(&self) -> usize { self.height }
        }
    )*};
}

pub(crate) fn ensure_same_dims(
    operand: &'static str,
    expected: &impl Dims,
    found: &impl Dims,
) -> Result<()> {
    if expected.width() != found.width() || expected.height() != found.height() {
        return Err(Error::DimensionMismatch {
            operand,
            expected_w: expected.width(),
            expected_h: expected.height(),
            found_w: found.width(),
            found_h: found.height(),
        });
    }
    Ok(())
}

fn ensure_unit(values: &[f64], width: usize, stride: usize) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            let p = i / stride;
            return Err(Error::OutOfRange {
                x: p % width.max(1),
                y: p / width.max(1),
                value: v,
            });
        }
    }
    Ok(())
}

/// Row-major RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageRgb {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::BufferLength {
                expected: width * height * 3,
                found: data.len(),
            });
        }
        ensure_unit(&data, width, 3)?;
        Ok(ImageRgb {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a per-pixel function; channels are clamped to `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).iter().map(|c| c.clamp(0.0, 1.0)));
            }
        }
        ImageRgb {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Single-channel opacity map in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatte {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl AlphaMatte {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                found: data.len(),
            });
        }
        ensure_unit(&data, width, 1)?;
        Ok(AlphaMatte {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        AlphaMatte {
            width,
            height,
            data: vec![value.clamp(0.0, 1.0); width * height],
        }
    }

    /// Builds a matte from a per-pixel function; values are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        AlphaMatte {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `1 - alpha` per pixel.
    pub fn complement(&self) -> AlphaMatte {
        AlphaMatte {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|a| 1.0 - a).collect(),
        }
    }
}

/// Hard binary mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(BinaryMask {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        BinaryMask {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn none(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Coordinates of set pixels in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        ensure_same_dims("mask", self, other)?;
        Ok(self.zip_with(other, |a, b| a && b))
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        ensure_same_dims("mask", self, other)?;
        Ok(self.zip_with(other, |a, b| a || b))
    }

    pub fn not(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|b| !b).collect(),
        }
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// One pixel of a three-valued map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Label {
    Background = 0,
    Unknown = 1,
    Foreground = 2,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Background => 0.0,
            Label::Unknown => 0.5,
            Label::Foreground => 1.0,
        }
    }

    pub fn byte(self) -> u8 {
        match self {
            Label::Background => 0,
            Label::Unknown => 128,
            Label::Foreground => 255,
        }
    }

    pub fn from_value(v: f64) -> Option<Label> {
        if v == 0.0 {
            Some(Label::Background)
        } else if v == 0.5 {
            Some(Label::Unknown)
        } else if v == 1.0 {
            Some(Label::Foreground)
        } else {
            None
        }
    }

    pub fn from_byte(b: u8) -> Option<Label> {
        match b {
            0 => Some(Label::Background),
            128 => Some(Label::Unknown),
            255 => Some(Label::Foreground),
            _ => None,
        }
    }
}

/// A three-valued map over {0, 0.5, 1}: background, unknown, foreground.
///
/// Trimaps, scribblemaps, clickmaps and the no-guidance map all share this
/// representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    width: usize,
    height: usize,
    data: Vec<Label>,
}

pub type Trimap = LabelMap;
pub type GuidanceMap = LabelMap;

impl LabelMap {
    pub fn new(width: usize, height: usize, data: Vec<Label>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                found: data.len(),
            });
        }
        Ok(LabelMap {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, label: Label) -> Self {
        LabelMap {
            width,
            height,
            data: vec![label; width * height],
        }
    }

    /// Validates real values against the {0, 0.5, 1} palette, reporting the
    /// first offending pixel in row-major order.
    pub fn from_values(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                found: values.len(),
            });
        }
        let data = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Label::from_value(v).ok_or(Error::Palette {
                    x: i % width.max(1),
                    y: i / width.max(1),
                    value: v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LabelMap {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Label) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        LabelMap {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Label {
        self.data[y * self.width + x]
    }

    pub fn labels(&self) -> &[Label] {
        &self.data
    }

    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|l| l.value()).collect()
    }

    pub fn mask_of(&self, label: Label) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&l| l == label).collect(),
        }
    }

    pub fn count(&self, label: Label) -> usize {
        self.data.iter().filter(|&&l| l == label).count()
    }
}

impl_dims!(ImageRgb, AlphaMatte, BinaryMask, LabelMap);

/// `I = alpha * F + (1 - alpha) * B` per pixel and channel, clamped to `[0, 1]`.
pub fn composite(fg: &ImageRgb, bg: &ImageRgb, alpha: &AlphaMatte) -> Result<ImageRgb> {
    ensure_same_dims("bg", fg, bg)?;
    ensure_same_dims("alpha", fg, alpha)?;
    let mut data = Vec::with_capacity(fg.data.len());
    for (i, &a) in alpha.data.iter().enumerate() {
        for c in 0..3 {
            let k = i * 3 + c;
            let v = a * fg.data[k] + (1.0 - a) * bg.data[k];
            data.push(v.clamp(0.0, 1.0));
        }
    }
    Ok(ImageRgb {
        width: fg.width,
        height: fg.height,
        data,
    })
}
