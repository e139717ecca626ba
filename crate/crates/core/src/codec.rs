//! PNG encoding for mattes, three-valued maps and RGB images.
//!
//! Reals become bytes as `floor(v * 255 + 0.5)` (round half up), bytes become
//! reals as `b / 255`. Three-valued maps use the palette 0 / 128 / 255.

use std::io::Cursor;
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::error::{Error, Result};
use crate::raster::{AlphaMatte, Dims, ImageRgb, Label, LabelMap};

/// Round-half-up quantization of a value in `[0, 1]` to a byte.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

pub fn dequantize(b: u8) -> f64 {
    b as f64 / 255.0
}

struct Raw {
    width: usize,
    height: usize,
    color: ColorType,
    bytes: Vec<u8>,
}

fn decode_raw(bytes: &[u8]) -> Result<Raw> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder.read_info()?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != BitDepth::Eight {
        return Err(Error::Format(format!(
            "expected 8-bit samples, found {depth:?}"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf)?;
    buf.truncate(frame.buffer_size());
    Ok(Raw {
        width: frame.width as usize,
        height: frame.height as usize,
        color,
        bytes: buf,
    })
}

fn decode_gray(bytes: &[u8]) -> Result<Raw> {
    let raw = decode_raw(bytes)?;
    if raw.color != ColorType::Grayscale {
        return Err(Error::Format(format!(
            "expected single-channel grayscale, found {:?}",
            raw.color
        )));
    }
    Ok(raw)
}

fn encode_raw(width: usize, height: usize, color: ColorType, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(out)
}

pub fn decode_matte(bytes: &[u8]) -> Result<AlphaMatte> {
    let raw = decode_gray(bytes)?;
    AlphaMatte::new(
        raw.width,
        raw.height,
        raw.bytes.iter().map(|&b| dequantize(b)).collect(),
    )
}

/// Decodes a trimap or guidance map; any byte outside {0, 128, 255} is a
/// palette error naming the first offending pixel.
pub fn decode_labels(bytes: &[u8]) -> Result<LabelMap> {
    let raw = decode_gray(bytes)?;
    let w = raw.width.max(1);
    let labels = raw
        .bytes
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            Label::from_byte(b).ok_or(Error::Palette {
                x: i % w,
                y: i / w,
                value: dequantize(b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabelMap::new(raw.width, raw.height, labels)
}

pub fn decode_rgb(bytes: &[u8]) -> Result<ImageRgb> {
    let raw = decode_raw(bytes)?;
    if raw.color != ColorType::Rgb {
        return Err(Error::Format(format!(
            "expected 8-bit RGB, found {:?}",
            raw.color
        )));
    }
    ImageRgb::new(
        raw.width,
        raw.height,
        raw.bytes.iter().map(|&b| dequantize(b)).collect(),
    )
}

pub fn encode_matte(m: &AlphaMatte) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = m.data().iter().map(|&v| quantize(v)).collect();
    encode_raw(m.width(), m.height(), ColorType::Grayscale, &bytes)
}

pub fn encode_labels(m: &LabelMap) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = m.labels().iter().map(|l| l.byte()).collect();
    encode_raw(m.width(), m.height(), ColorType::Grayscale, &bytes)
}

pub fn encode_rgb(img: &ImageRgb) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    encode_raw(img.width(), img.height(), ColorType::Rgb, &bytes)
}

/// Raw 8-bit grayscale samples, for callers that need the byte payload.
pub fn gray_bytes(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let raw = decode_gray(bytes)?;
    Ok((raw.width, raw.height, raw.bytes))
}

pub fn encode_gray_bytes(width: usize, height: usize, data: &[u8]) -> Result<Vec<u8>> {
    if data.len() != width * height {
        return Err(Error::BufferLength {
            expected: width * height,
            found: data.len(),
        });
    }
    encode_raw(width, height, ColorType::Grayscale, data)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::from(e).at(path))
}

pub fn read_matte(path: &Path) -> Result<AlphaMatte> {
    decode_matte(&read(path)?).map_err(|e| e.at(path))
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    decode_labels(&read(path)?).map_err(|e| e.at(path))
}

pub fn read_rgb(path: &Path) -> Result<ImageRgb> {
    decode_rgb(&read(path)?).map_err(|e| e.at(path))
}

/// Writes via a sibling temp file and renames on success, so a failed write
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;

    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::from(e).at(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::from(e).at(dir))?;
    tmp.write_all(bytes).map_err(|e| Error::from(e).at(path))?;
    tmp.persist(path)
        .map_err(|e| Error::from(e.error).at(path))?;
    Ok(())
}
