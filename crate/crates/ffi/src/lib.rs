//! C ABI over `tokenprune`.
//!
//! Objects cross the boundary as opaque handles created by `tp_*_new` or an
//! operation with an out-parameter and released with the matching
//! `tp_*_free`. Every fallible call returns a [`TpStatus`]; on failure
//! [`tp_last_error_message`] describes what went wrong on the calling thread.
//! Panics never unwind into C: they are caught and reported as
//! [`TpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tokenprune::io::{parse_config, to_json};
use tokenprune::ssp::stratum_budgets;
use tokenprune::vision::{partition_frame, RasterImage};
use tokenprune::{
    plan_history, prune, CompressionConfig, Error, ErrorKind, HistoryBudgetPlan, ImportanceMap, PartitionMask,
    PruneSelection, Stratum, TokenGrid,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid configuration or malformed config JSON.
    InvalidConfig = 2,
    /// Malformed input data such as wrong buffer lengths or channel counts.
    InvalidInput = 3,
    /// The inputs are well-formed but the request cannot be met, for
    /// example a history budget smaller than the frame count.
    Domain = 4,
    /// An index argument was out of range.
    OutOfRange = 5,
    /// Internal panic; the library state is unchanged.
    Panic = 6,
}

/// Stratum of a token in a selection.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpStratum {
    Pruned = 0,
    Foreground = 1,
    Background = 2,
    Uniform = 3,
}

impl From<Option<Stratum>> for TpStratum {
    fn from(s: Option<Stratum>) -> Self {
        match s {
            None => TpStratum::Pruned,
            Some(Stratum::Foreground) => TpStratum::Foreground,
            Some(Stratum::Background) => TpStratum::Background,
            Some(Stratum::Uniform) => TpStratum::Uniform,
        }
    }
}

/// One history frame of a plan.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpFramePlan {
    pub lag: usize,
    pub original_tokens: usize,
    pub quota: usize,
    pub realized_tokens: usize,
    pub scale: f64,
    pub target_width: u32,
    pub target_height: u32,
}

/// Per-stratum budgets of a current frame.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TpStratumBudget {
    pub k_total: usize,
    pub k_fg: usize,
    pub k_bg: usize,
    pub k_res: usize,
}

/// Opaque configuration handle.
pub struct TpConfig(CompressionConfig);

/// Opaque history plan handle.
pub struct TpPlan(HistoryBudgetPlan);

/// Opaque current-frame selection handle.
pub struct TpSelection(PruneSelection);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(err: &Error) -> TpStatus {
    if let Error::InvalidInput(_) = err {
        return TpStatus::InvalidInput;
    }
    match err.kind() {
        ErrorKind::Config => TpStatus::InvalidConfig,
        ErrorKind::Input => TpStatus::InvalidInput,
        ErrorKind::Domain => TpStatus::Domain,
    }
}

/// Runs `f`, recording any failure for [`tp_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), (TpStatus, String)>) -> TpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            TpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            TpStatus::Panic
        }
    }
}

fn lib<T>(r: tokenprune::Result<T>) -> Result<T, (TpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TpStatus, String) {
    (TpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TpStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (TpStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn tp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn tp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A configuration holding the defaults.
#[no_mangle]
pub extern "C" fn tp_config_new_default() -> *mut TpConfig {
    Box::into_raw(Box::new(TpConfig(CompressionConfig::default())))
}

/// Parses a JSON configuration; fields it omits keep their defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tp_config_from_json(json: *const c_char, out: *mut *mut TpConfig) -> TpStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (TpStatus::InvalidInput, format!("json is not UTF-8: {e}")))?;
        put(out, TpConfig(lib(parse_config(text))?));
        Ok(())
    })
}

/// Sets the four retention ratios. The handle is left unchanged if the new
/// values are invalid.
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_config_set_ratios(
    config: *mut TpConfig,
    lambda: f64,
    gamma: f64,
    mu: f64,
    rho: f64,
) -> TpStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let next = CompressionConfig {
            lambda,
            gamma,
            mu,
            rho,
            ..cfg.0.clone()
        };
        lib(next.validate())?;
        cfg.0 = next;
        Ok(())
    })
}

/// Sets the history window length.
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_config_set_history_len(config: *mut TpConfig, history_len: usize) -> TpStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let next = CompressionConfig {
            history_len,
            ..cfg.0.clone()
        };
        lib(next.validate())?;
        cfg.0 = next;
        Ok(())
    })
}

/// The configuration as JSON; release it with [`tp_string_free`].
///
/// # Safety
/// `config` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_config_to_json(config: *const TpConfig) -> *mut c_char {
    match config.as_ref() {
        Some(c) => CString::new(to_json(&c.0)).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `config` must be null or a live handle from this library; it is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn tp_config_free(config: *mut TpConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Plans the resizing of `frames` history frames, lag 1 first.
///
/// # Safety
/// `widths` and `heights` must each point to `frames` values, `config` must
/// be a live handle and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_history(
    config: *const TpConfig,
    widths: *const u32,
    heights: *const u32,
    frames: usize,
    out: *mut *mut TpPlan,
) -> TpStatus {
    guard(|| {
        let cfg = deref(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let w = slice(widths, frames, "widths")?;
        let h = slice(heights, frames, "heights")?;
        let dims: Vec<(u32, u32)> = w.iter().copied().zip(h.iter().copied()).collect();
        put(out, TpPlan(lib(plan_history(&dims, &cfg.0))?));
        Ok(())
    })
}

/// Total history budget of a plan; 0 for a null handle.
///
/// # Safety
/// `plan` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_budget(plan: *const TpPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.0.budget_total)
}

/// Number of frames in a plan; 0 for a null handle.
///
/// # Safety
/// `plan` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_frame_count(plan: *const TpPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.0.frames.len())
}

/// Copies frame `index` (0 for lag 1) of a plan into `out`.
///
/// # Safety
/// `plan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_frame(plan: *const TpPlan, index: usize, out: *mut TpFramePlan) -> TpStatus {
    guard(|| {
        let p = deref(plan, "plan")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let f = p.0.frames.get(index).ok_or_else(|| {
            (
                TpStatus::OutOfRange,
                format!("frame {index} of a {}-frame plan", p.0.frames.len()),
            )
        })?;
        *out = TpFramePlan {
            lag: f.lag,
            original_tokens: f.original_tokens,
            quota: f.quota,
            realized_tokens: f.realized_tokens,
            scale: f.scale,
            target_width: f.target_dims.0,
            target_height: f.target_dims.1,
        };
        Ok(())
    })
}

/// The plan as JSON; release it with [`tp_string_free`].
///
/// # Safety
/// `plan` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_to_json(plan: *const TpPlan) -> *mut c_char {
    match plan.as_ref() {
        Some(p) => CString::new(to_json(&p.0)).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `plan` must be null or a live handle from this library; it is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn tp_plan_free(plan: *mut TpPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Per-stratum budgets for a frame of `n_total` tokens, `n_fg` foreground.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_stratum_budgets(
    n_total: usize,
    n_fg: usize,
    mu: f64,
    rho: f64,
    out: *mut TpStratumBudget,
) -> TpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let b = lib(stratum_budgets(n_total, n_fg, mu, rho))?;
        *out = TpStratumBudget {
            k_total: b.k_total,
            k_fg: b.k_fg,
            k_bg: b.k_bg,
            k_res: b.k_res,
        };
        Ok(())
    })
}

/// Foreground partition of an 8-bit image with 1 (gray) or 3 (RGB)
/// interleaved channels. Writes one byte per token (1 foreground, 0
/// background) in row-major order into `mask` and the grid shape into
/// `rows` and `cols`. With `mask_len` too small nothing is written to `mask`
/// and [`TpStatus::OutOfRange`] is returned, `rows` and `cols` still set.
///
/// # Safety
/// `pixels` must point to `width * height * channels` bytes, `mask` to
/// `mask_len` writable bytes, and `rows`, `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_partition(
    config: *const TpConfig,
    pixels: *const u8,
    width: u32,
    height: u32,
    channels: u8,
    mask: *mut u8,
    mask_len: usize,
    rows: *mut usize,
    cols: *mut usize,
) -> TpStatus {
    guard(|| {
        let cfg = deref(config, "config")?;
        let rows = rows.as_mut().ok_or_else(|| null("rows"))?;
        let cols = cols.as_mut().ok_or_else(|| null("cols"))?;
        let len = width as usize * height as usize * channels as usize;
        let data = slice(pixels, len, "pixels")?.to_vec();
        let img = lib(RasterImage::new(width, height, channels, data))?;
        let part = lib(partition_frame(&img, &cfg.0))?;
        let grid = part.grid();
        (*rows, *cols) = (grid.rows, grid.cols);
        let n = grid.token_count();
        if mask_len < n {
            return Err((TpStatus::OutOfRange, format!("mask holds {mask_len} bytes, need {n}")));
        }
        if mask.is_null() {
            return Err(null("mask"));
        }
        let out = std::slice::from_raw_parts_mut(mask, n);
        for (o, &f) in out.iter_mut().zip(part.flags()) {
            *o = f as u8;
        }
        Ok(())
    })
}

/// Prunes a `rows × cols` frame under the config's `mu` and `rho`. `scores`
/// holds one non-negative score per token and `foreground` one byte per
/// token (non-zero for foreground), both row-major.
///
/// # Safety
/// `scores` and `foreground` must each point to `rows * cols` values,
/// `config` must be a live handle and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tp_prune(
    config: *const TpConfig,
    rows: usize,
    cols: usize,
    scores: *const f64,
    foreground: *const u8,
    out: *mut *mut TpSelection,
) -> TpStatus {
    guard(|| {
        let cfg = deref(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = lib(TokenGrid::new(rows, cols, cfg.0.patch_px, cfg.0.merge_factor))?;
        let n = grid.token_count();
        let s = slice(scores, n, "scores")?;
        let fg = slice(foreground, n, "foreground")?;
        let scores = lib(ImportanceMap::new(grid, s.to_vec()))?;
        let part = lib(PartitionMask::new(grid, fg.iter().map(|&b| b != 0).collect()))?;
        put(out, TpSelection(lib(prune(&grid, &scores, &part, cfg.0.mu, cfg.0.rho))?));
        Ok(())
    })
}

/// Number of retained tokens; 0 for a null handle.
///
/// # Safety
/// `selection` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tp_selection_len(selection: *const TpSelection) -> usize {
    selection.as_ref().map_or(0, |s| s.0.len())
}

/// The `i`-th retained token in row-major order and its stratum.
///
/// # Safety
/// `selection` must be a live handle; `token` and `stratum` writable.
#[no_mangle]
pub unsafe extern "C" fn tp_selection_get(
    selection: *const TpSelection,
    i: usize,
    token: *mut usize,
    stratum: *mut TpStratum,
) -> TpStatus {
    guard(|| {
        let s = deref(selection, "selection")?;
        let token = token.as_mut().ok_or_else(|| null("token"))?;
        let stratum = stratum.as_mut().ok_or_else(|| null("stratum"))?;
        let t = s.0.retained().get(i).ok_or_else(|| {
            (
                TpStatus::OutOfRange,
                format!("token {i} of a {}-token selection", s.0.len()),
            )
        })?;
        *token = t.index;
        *stratum = Some(t.stratum).into();
        Ok(())
    })
}

/// Writes the stratum of every grid token, pruned ones included, into `out`
/// (`out_len` must be at least `rows * cols`).
///
/// # Safety
/// `selection` must be a live handle and `out` point to `out_len` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn tp_selection_strata(
    selection: *const TpSelection,
    out: *mut TpStratum,
    out_len: usize,
) -> TpStatus {
    guard(|| {
        let s = deref(selection, "selection")?;
        let map = s.0.stratum_map();
        if out_len < map.len() {
            return Err((TpStatus::OutOfRange, format!("buffer holds {out_len}, need {}", map.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, map.len());
        for (d, m) in dst.iter_mut().zip(map) {
            *d = m.into();
        }
        Ok(())
    })
}

/// # Safety
/// `selection` must be null or a live handle from this library; it is
/// invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn tp_selection_free(selection: *mut TpSelection) {
    if !selection.is_null() {
        drop(Box::from_raw(selection));
    }
}
