//! C ABI over knotscan. Every fallible call returns a [`KsStatus`]; on
//! failure `ks_last_error` describes the problem. Handles are opaque and
//! owned by the caller, who releases them with the matching `_free`.
//! Strings returned through `char **` are released with `ks_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use knotscan::image::{
    count_crossings, image_to_pd, render_pd, DetectOptions, RasterImage, RenderOptions, StrokeStyle,
};
use knotscan::jones::jones;
use knotscan::pd::{parse_pd, PdCode};
use knotscan::pipeline::identify_image;
use knotscan::table::{builtin_table, classify, load_table, InvariantIndex};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidDiagram = 4,
    Io = 5,
    /// A pipeline stage failed; the message names it.
    Stage = 6,
    Panic = 7,
}

/// A validated PD code.
pub struct KsPd {
    inner: PdCode,
}

/// A knot table indexed by Jones polynomial.
pub struct KsTable {
    index: InvariantIndex,
}

/// A grayscale raster.
pub struct KsImage {
    inner: RasterImage,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nulls replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

type Fallible = Result<(), (KsStatus, String)>;

fn guard(f: impl FnOnce() -> Fallible) -> KsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            KsStatus::Panic
        }
    }
}

fn fail(status: KsStatus, e: impl std::fmt::Display) -> (KsStatus, String) {
    (status, e.to_string())
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, (KsStatus, String)> {
    if s.is_null() {
        return Err((KsStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(KsStatus::InvalidUtf8, e))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (KsStatus, String)> {
    p.as_ref().ok_or((KsStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Fallible {
    if out.is_null() {
        return Err((KsStatus::NullArgument, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Fallible {
    if out.is_null() {
        return Err((KsStatus::NullArgument, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(|e| fail(KsStatus::InvalidUtf8, e))?.into_raw();
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, v: T) -> Fallible {
    if out.is_null() {
        return Err((KsStatus::NullArgument, "null output pointer".into()));
    }
    *out = v;
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ks_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ks_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates `PD[X[..],...]` text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ks_pd_parse(text: *const c_char, out: *mut *mut KsPd) -> KsStatus {
    guard(|| {
        let pd = parse_pd(c_str(text)?).map_err(|e| fail(KsStatus::Parse, e))?;
        let report = pd.validate();
        if !report.is_ok() {
            return Err(fail(KsStatus::InvalidDiagram, report));
        }
        put(out, KsPd { inner: pd })
    })
}

/// # Safety
/// `pd` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ks_pd_free(pd: *mut KsPd) {
    if !pd.is_null() {
        drop(Box::from_raw(pd));
    }
}

/// # Safety
/// `pd` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_pd_crossings(pd: *const KsPd, out: *mut usize) -> KsStatus {
    guard(|| put_value(out, handle(pd)?.inner.n()))
}

/// # Safety
/// `pd` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_pd_writhe(pd: *const KsPd, out: *mut i32) -> KsStatus {
    guard(|| {
        let w = handle(pd)?.inner.writhe().map_err(|e| fail(KsStatus::InvalidDiagram, e))?;
        put_value(out, w)
    })
}

/// Canonical PD text.
///
/// # Safety
/// `pd` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_pd_to_string(pd: *const KsPd, out: *mut *mut c_char) -> KsStatus {
    guard(|| put_string(out, handle(pd)?.inner.to_string()))
}

/// Jones polynomial as canonical text, e.g. `-q^-4+q^-3+q^-1`.
///
/// # Safety
/// `pd` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_jones(pd: *const KsPd, out: *mut *mut c_char) -> KsStatus {
    guard(|| {
        let value = jones(&handle(pd)?.inner).map_err(|e| fail(KsStatus::Stage, format!("invariant stage: {e}")))?;
        put_string(out, value.to_string())
    })
}

/// The shipped table, indexed for knots up to `c0` crossings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ks_table_builtin(c0: usize, out: *mut *mut KsTable) -> KsStatus {
    guard(|| {
        let records = builtin_table().map_err(|e| fail(KsStatus::Parse, e))?;
        put(out, KsTable { index: InvariantIndex::build(&records, c0) })
    })
}

/// A table from a CSV file with header `name,crossing_number,pd`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_table_load(path: *const c_char, c0: usize, out: *mut *mut KsTable) -> KsStatus {
    guard(|| {
        let records = load_table(Path::new(c_str(path)?)).map_err(|e| match e {
            knotscan::table::TableError::Io(e) => fail(KsStatus::Io, e),
            e => fail(KsStatus::Parse, e),
        })?;
        put(out, KsTable { index: InvariantIndex::build(&records, c0) })
    })
}

/// # Safety
/// `table` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ks_table_free(table: *mut KsTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Classification report for a diagram as JSON. A search miss is not an
/// error: inspect the report's stages.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_classify_pd(table: *const KsTable, pd: *const KsPd, out: *mut *mut c_char) -> KsStatus {
    guard(|| {
        let report = classify(&handle(pd)?.inner, &handle(table)?.index);
        put_string(out, serde_json::to_string(&report).map_err(|e| fail(KsStatus::Panic, e))?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_image_load_png(path: *const c_char, out: *mut *mut KsImage) -> KsStatus {
    guard(|| {
        let img = RasterImage::from_png(Path::new(c_str(path)?)).map_err(|e| fail(KsStatus::Io, e))?;
        put(out, KsImage { inner: img })
    })
}

/// # Safety
/// `img` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ks_image_save_png(img: *const KsImage, path: *const c_char) -> KsStatus {
    guard(|| handle(img)?.inner.to_png(Path::new(c_str(path)?)).map_err(|e| fail(KsStatus::Io, e)))
}

/// # Safety
/// `img` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ks_image_size(img: *const KsImage, width: *mut usize, height: *mut usize) -> KsStatus {
    guard(|| {
        let img = &handle(img)?.inner;
        put_value(width, img.width())?;
        put_value(height, img.height())
    })
}

/// # Safety
/// `img` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ks_image_free(img: *mut KsImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Draws the diagram in broken-understrand style (`solid` = 0) or with
/// both strands continuous.
///
/// # Safety
/// `pd` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_render(
    pd: *const KsPd,
    size: usize,
    stroke: f64,
    gap: f64,
    seed: u64,
    solid: bool,
    out: *mut *mut KsImage,
) -> KsStatus {
    guard(|| {
        let style = if solid { StrokeStyle::Solid } else { StrokeStyle::Broken };
        let opts = RenderOptions { size, stroke, gap, seed, style };
        let img = render_pd(&handle(pd)?.inner, &opts).map_err(|e| fail(KsStatus::Stage, format!("render: {e}")))?;
        put(out, KsImage { inner: img })
    })
}

/// # Safety
/// `img` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_count_crossings(img: *const KsImage, out: *mut usize) -> KsStatus {
    guard(|| {
        let n = count_crossings(&handle(img)?.inner)
            .map_err(|e| fail(KsStatus::Stage, format!("perception stage: {e}")))?;
        put_value(out, n)
    })
}

/// Reconstructs a diagram from an image; `gap` is the expected under-strand
/// gap in pixels (6 for default renders).
///
/// # Safety
/// `img` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_image_to_pd(img: *const KsImage, gap: f64, out: *mut *mut KsPd) -> KsStatus {
    guard(|| {
        let rec = image_to_pd(&handle(img)?.inner, &DetectOptions { gap })
            .map_err(|e| fail(KsStatus::Stage, format!("perception stage: {e}")))?;
        put(out, KsPd { inner: rec.pd })
    })
}

/// Full pipeline report as JSON, in the same shape as `knotscan identify
/// --json`. Returns `Stage` with the report still written when a stage
/// fails.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ks_identify_image(
    table: *const KsTable,
    img: *const KsImage,
    gap: f64,
    out: *mut *mut c_char,
) -> KsStatus {
    guard(|| {
        let report = identify_image(&handle(img)?.inner, "image", &handle(table)?.index, &DetectOptions { gap });
        put_string(out, serde_json::to_string(&report).map_err(|e| fail(KsStatus::Panic, e))?)?;
        match report.failed_stage {
            None => Ok(()),
            Some(stage) => Err((KsStatus::Stage, format!("{stage} stage failed"))),
        }
    })
}
