//! C ABI over `matteforge`.
//!
//! Mattes and three-valued maps cross the boundary as opaque handles that
//! the caller releases with the matching `*_free`. Every fallible call
//! returns an [`MfStatus`]; on failure [`mf_last_error`] describes it.
//! Panics are caught at the boundary and reported as `MF_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::path::Path;
use std::ptr;

use matteforge::codec::{
    dequantize, encode_labels, encode_matte, read_labels, read_matte, write_atomic,
};
use matteforge::guidance::{
    CLICK_DIAMETER, SamplingParams, ThicknessSchedule, deform, synth_clickmap,
};
use matteforge::losses::matting_loss;
use matteforge::metrics::{MetricParams, evaluate};
use matteforge::trimap::{make_trimap, partition};
use matteforge::{AlphaMatte, Dims, Error, Label, LabelMap, Rng};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Format = 4,
    Io = 5,
    EmptyRegion = 6,
    Internal = 7,
}

/// Alpha matte with values in [0, 1], row-major.
pub struct MfMatte(AlphaMatte);

/// Trimap or guidance map over {0, 0.5, 1}.
pub struct MfLabelMap(LabelMap);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MfMetricReport {
    pub sad: f64,
    pub mse: f64,
    pub grad: f64,
    pub conn: f64,
    /// Pixels in the evaluation (unknown) region.
    pub pixels_t: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MfLossBreakdown {
    pub l2_known: f64,
    pub l1_transition: f64,
    pub grad_term: f64,
    pub total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MfStatus {
    match e {
        Error::File { source, .. } => status_of(source),
        Error::DimensionMismatch { .. }
        | Error::BufferLength { .. }
        | Error::ChannelMismatch { .. } => MfStatus::DimensionMismatch,
        Error::OutOfRange { .. } | Error::InvalidParameter(_) | Error::Overlap { .. } => {
            MfStatus::InvalidArgument
        }
        Error::Palette { .. } | Error::Format(_) | Error::PngDecode(_) | Error::PngEncode(_) => {
            MfStatus::Format
        }
        Error::Io(_) => MfStatus::Io,
        Error::EmptyRegion { .. } => MfStatus::EmptyRegion,
        _ => MfStatus::Internal,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, records any failure and maps it to a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MfStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MfStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MfStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: the caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    // SAFETY: non-null and NUL-terminated per the API contract.
    let s = unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Error::InvalidParameter("path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    // SAFETY: `out` is non-null and writable per the API contract.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[unsafe(no_mangle)]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `width * height` values from `data` into a new matte.
///
/// # Safety
/// `data` must be valid for `width * height` reads; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_new(
    width: usize,
    height: usize,
    data: *const f64,
    out: *mut *mut MfMatte,
) -> MfStatus {
    guard(|| {
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidParameter("size overflow".into()))?;
        if data.is_null() && n > 0 {
            return Err(Fail::Null("data"));
        }
        let values = if n == 0 {
            Vec::new()
        } else {
            // SAFETY: non-null and valid for `n` reads per the contract.
            unsafe { std::slice::from_raw_parts(data, n) }.to_vec()
        };
        store(out, MfMatte(AlphaMatte::new(width, height, values)?))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_read_png(
    path: *const c_char,
    out: *mut *mut MfMatte,
) -> MfStatus {
    guard(|| {
        let path = unsafe { path_arg(path) }?;
        store(out, MfMatte(read_matte(path)?))
    })
}

/// # Safety
/// `matte` must be a live handle; `path` a NUL-terminated string.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_write_png(
    matte: *const MfMatte,
    path: *const c_char,
) -> MfStatus {
    guard(|| {
        let m = unsafe { deref(matte, "matte") }?;
        let path = unsafe { path_arg(path) }?;
        write_atomic(path, &encode_matte(&m.0)?)?;
        Ok(())
    })
}

/// # Safety
/// `matte` must be NULL or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_width(matte: *const MfMatte) -> usize {
    unsafe { matte.as_ref() }.map_or(0, |m| m.0.width())
}

/// # Safety
/// `matte` must be NULL or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_height(matte: *const MfMatte) -> usize {
    unsafe { matte.as_ref() }.map_or(0, |m| m.0.height())
}

/// Borrowed pointer to `width * height` row-major values; valid while the
/// handle lives. NULL for a NULL handle.
///
/// # Safety
/// `matte` must be NULL or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_data(matte: *const MfMatte) -> *const f64 {
    unsafe { matte.as_ref() }.map_or(ptr::null(), |m| m.0.data().as_ptr())
}

/// # Safety
/// `matte` must be NULL or a handle from this library not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matte_free(matte: *mut MfMatte) {
    if !matte.is_null() {
        // SAFETY: allocated by `store` and not yet freed.
        drop(unsafe { Box::from_raw(matte) });
    }
}

/// New map from palette bytes (0 = background, 128 = unknown,
/// 255 = foreground).
///
/// # Safety
/// `bytes` must be valid for `width * height` reads; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_new(
    width: usize,
    height: usize,
    bytes: *const u8,
    out: *mut *mut MfLabelMap,
) -> MfStatus {
    guard(|| {
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidParameter("size overflow".into()))?;
        if bytes.is_null() && n > 0 {
            return Err(Fail::Null("bytes"));
        }
        let raw: &[u8] = if n == 0 {
            &[]
        } else {
            unsafe { std::slice::from_raw_parts(bytes, n) }
        };
        let labels = raw
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                Label::from_byte(b).ok_or(Error::Palette {
                    x: i % width.max(1),
                    y: i / width,
                    value: dequantize(b),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        store(out, MfLabelMap(LabelMap::new(width, height, labels)?))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_read_png(
    path: *const c_char,
    out: *mut *mut MfLabelMap,
) -> MfStatus {
    guard(|| {
        let path = unsafe { path_arg(path) }?;
        store(out, MfLabelMap(read_labels(path)?))
    })
}

/// # Safety
/// `map` must be a live handle; `path` a NUL-terminated string.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_write_png(
    map: *const MfLabelMap,
    path: *const c_char,
) -> MfStatus {
    guard(|| {
        let m = unsafe { deref(map, "map") }?;
        let path = unsafe { path_arg(path) }?;
        write_atomic(path, &encode_labels(&m.0)?)?;
        Ok(())
    })
}

/// # Safety
/// `map` must be NULL or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_width(map: *const MfLabelMap) -> usize {
    unsafe { map.as_ref() }.map_or(0, |m| m.0.width())
}

/// # Safety
/// `map` must be NULL or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_height(map: *const MfLabelMap) -> usize {
    unsafe { map.as_ref() }.map_or(0, |m| m.0.height())
}

/// Copies the palette bytes into `buf`, which must hold `width * height`.
///
/// # Safety
/// `map` must be a live handle; `buf` valid for `len` writes.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_copy_bytes(
    map: *const MfLabelMap,
    buf: *mut u8,
    len: usize,
) -> MfStatus {
    guard(|| {
        let m = unsafe { deref(map, "map") }?;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        let labels = m.0.labels();
        if len < labels.len() {
            return Err(Error::InvalidParameter(format!(
                "buffer holds {len} bytes, need {}",
                labels.len()
            ))
            .into());
        }
        // SAFETY: `buf` is valid for `len >= labels.len()` writes.
        let dst = unsafe { std::slice::from_raw_parts_mut(buf, labels.len()) };
        for (d, l) in dst.iter_mut().zip(labels) {
            *d = l.byte();
        }
        Ok(())
    })
}

/// # Safety
/// `map` must be NULL or a handle from this library not yet freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_labelmap_free(map: *mut MfLabelMap) {
    if !map.is_null() {
        drop(unsafe { Box::from_raw(map) });
    }
}

/// Trimap by eroding the pure-foreground and pure-background sets with
/// disks of the given radii.
///
/// # Safety
/// `alpha` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_make_trimap(
    alpha: *const MfMatte,
    fg_shrink: u32,
    bg_shrink: u32,
    out: *mut *mut MfLabelMap,
) -> MfStatus {
    guard(|| {
        let a = unsafe { deref(alpha, "alpha") }?;
        store(out, MfLabelMap(make_trimap(&a.0, fg_shrink, bg_shrink)))
    })
}

/// Scribble thickness in pixels at a training step under the default schedule.
#[unsafe(no_mangle)]
pub extern "C" fn mf_thickness_at(step: u64) -> u32 {
    ThicknessSchedule::default().thickness_at(step)
}

/// Scribblemap from a trimap at `step` under the default schedule.
///
/// # Safety
/// `trimap` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_deform(
    trimap: *const MfLabelMap,
    step: u64,
    seed: u64,
    out: *mut *mut MfLabelMap,
) -> MfStatus {
    guard(|| {
        let t = unsafe { deref(trimap, "trimap") }?;
        let g = deform(
            &t.0,
            step,
            &ThicknessSchedule::default(),
            &mut Rng::new(seed),
        )?;
        store(out, MfLabelMap(g))
    })
}

/// Clickmap from a trimap; `diameter` 0 selects the default of 40 px.
///
/// # Safety
/// `trimap` must be a live handle; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_clickmap(
    trimap: *const MfLabelMap,
    diameter: u32,
    seed: u64,
    out: *mut *mut MfLabelMap,
) -> MfStatus {
    guard(|| {
        let t = unsafe { deref(trimap, "trimap") }?;
        let d = if diameter == 0 {
            CLICK_DIAMETER
        } else {
            diameter
        };
        let g = synth_clickmap(&t.0, d, &SamplingParams::default(), &mut Rng::new(seed))?;
        store(out, MfLabelMap(g))
    })
}

/// SAD, MSE, Grad and Conn over the unknown region of `trimap`, with the
/// default metric constants.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_evaluate(
    pred: *const MfMatte,
    gt: *const MfMatte,
    trimap: *const MfLabelMap,
    out: *mut MfMetricReport,
) -> MfStatus {
    guard(|| {
        let (p, g, t) = unsafe {
            (
                deref(pred, "pred")?,
                deref(gt, "gt")?,
                deref(trimap, "trimap")?,
            )
        };
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let r = evaluate(&p.0, &g.0, &t.0, &MetricParams::default())?;
        // SAFETY: checked non-null above.
        unsafe {
            *out = MfMetricReport {
                sad: r.sad,
                mse: r.mse,
                grad: r.grad,
                conn: r.conn,
                pixels_t: r.pixels_t as u64,
            }
        };
        Ok(())
    })
}

/// Training loss of `pred` against `gt`, split by the trimap's known and
/// unknown regions. `sigma` is the gradient filter scale.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mf_matting_loss(
    pred: *const MfMatte,
    gt: *const MfMatte,
    trimap: *const MfLabelMap,
    sigma: f64,
    out: *mut MfLossBreakdown,
) -> MfStatus {
    guard(|| {
        let (p, g, t) = unsafe {
            (
                deref(pred, "pred")?,
                deref(gt, "gt")?,
                deref(trimap, "trimap")?,
            )
        };
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(
                Error::InvalidParameter(format!("sigma must be positive, got {sigma}")).into(),
            );
        }
        let l = matting_loss(&p.0, &g.0, &partition(&t.0), sigma)?;
        unsafe {
            *out = MfLossBreakdown {
                l2_known: l.l2_known,
                l1_transition: l.l1_transition,
                grad_term: l.grad_term,
                total: l.total,
            }
        };
        Ok(())
    })
}
