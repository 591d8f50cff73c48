//! C ABI for warntrack.
//!
//! Objects cross the boundary as opaque pointers created by `wt_*_parse` or
//! `wt_track` and released with the matching `wt_*_free`. Every fallible
//! call returns a [`WtStatus`]; on failure [`wt_last_error_message`] holds a
//! description for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use warntrack::ingest::{
    parse_refactorings, parse_report, ParseOptions, RefactoringRecord, ReportFormat, SourceTree,
};
use warntrack::tracker::{track, CommitIds};
use warntrack::{Approach, Error, MatchConfig, Side, TrackingReport, WarningSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    MalformedReport = 3,
    SchemaViolation = 4,
    FileMissing = 5,
    Config = 6,
    Io = 7,
    InvalidInput = 8,
    Internal = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtSide {
    Pre = 0,
    Post = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtApproach {
    Soa = 0,
    Improved = 1,
}

/// Warnings of one revision.
pub struct WtWarningSet(WarningSet);

/// Parsed refactoring records.
pub struct WtRecords(Vec<RefactoringRecord>);

/// Result of tracking one commit pair.
pub struct WtReport(TrackingReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> WtStatus {
    match err {
        Error::MalformedReport { .. } | Error::MissingAttribute { .. } => WtStatus::MalformedReport,
        Error::SchemaViolation(_) => WtStatus::SchemaViolation,
        Error::FileMissing(_) => WtStatus::FileMissing,
        Error::Config(_) => WtStatus::Config,
        Error::Io { .. } => WtStatus::Io,
        e if e.is_input_error() => WtStatus::InvalidInput,
        _ => WtStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status plus error message.
fn guard(f: impl FnOnce() -> Result<(), (WtStatus, String)>) -> WtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WtStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside warntrack");
            WtStatus::Panic
        }
    }
}

fn fail(err: Error) -> (WtStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (WtStatus, String) {
    (WtStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, (WtStatus, String)> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| (WtStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is a NUL-terminated string.
unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (WtStatus, String)> {
    opt_str(p, what)?.ok_or_else(|| null(what))
}

/// # Safety
/// `data` points to `len` readable bytes, or `len` is 0.
unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], (WtStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Message describing the last failed call on this thread, or null. The
/// pointer stays valid until the next `wt_*` call on the same thread.
#[no_mangle]
pub extern "C" fn wt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a warning report. `format` is `"spotbugs"`, `"pmd"` or
/// `"generic"`; `project` and `strip_prefix` may be null.
///
/// # Safety
/// String arguments are null or NUL-terminated; `data` points to `len`
/// bytes; `out` is a valid pointer to write the result to.
#[no_mangle]
pub unsafe extern "C" fn wt_warning_set_parse(
    format: *const c_char,
    data: *const u8,
    len: usize,
    side: WtSide,
    project: *const c_char,
    strip_prefix: *const c_char,
    out: *mut *mut WtWarningSet,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let format: ReportFormat = req_str(format, "format")?.parse().map_err(fail)?;
        let opts = ParseOptions {
            project: opt_str(project, "project")?.unwrap_or_default().to_string(),
            strip_prefix: opt_str(strip_prefix, "strip_prefix")?.map(str::to_string),
        };
        let side = match side {
            WtSide::Pre => Side::Pre,
            WtSide::Post => Side::Post,
        };
        let set = parse_report(format, bytes(data, len)?, side, &opts).map_err(fail)?;
        *out = Box::into_raw(Box::new(WtWarningSet(set)));
        Ok(())
    })
}

/// Number of warnings in a set; 0 for null.
///
/// # Safety
/// `set` is null or a live pointer from [`wt_warning_set_parse`].
#[no_mangle]
pub unsafe extern "C" fn wt_warning_set_len(set: *const WtWarningSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `set` is null or a pointer from [`wt_warning_set_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_warning_set_free(set: *mut WtWarningSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Parses refactoring records (flat list or RefactoringMiner JSON).
///
/// # Safety
/// `data` points to `len` bytes; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_records_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut WtRecords,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let records = parse_refactorings(bytes(data, len)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(WtRecords(records)));
        Ok(())
    })
}

/// # Safety
/// `records` is null or a live pointer from [`wt_records_parse`].
#[no_mangle]
pub unsafe extern "C" fn wt_records_len(records: *const WtRecords) -> usize {
    records.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `records` is null or a pointer from [`wt_records_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_records_free(records: *mut WtRecords) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

/// Tracks one commit pair. `records`, `config_toml` and the commit ids may
/// be null. The baseline approach ignores `records`.
///
/// # Safety
/// `pre` and `post` are live warning sets; `records` is null or live;
/// strings are null or NUL-terminated; `out` is a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wt_track(
    approach: WtApproach,
    pre: *const WtWarningSet,
    post: *const WtWarningSet,
    pre_root: *const c_char,
    post_root: *const c_char,
    records: *const WtRecords,
    config_toml: *const c_char,
    pre_commit: *const c_char,
    post_commit: *const c_char,
    out: *mut *mut WtReport,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pre = pre.as_ref().ok_or_else(|| null("pre"))?;
        let post = post.as_ref().ok_or_else(|| null("post"))?;
        let pre_root = req_str(pre_root, "pre_root")?;
        let post_root = req_str(post_root, "post_root")?;
        for root in [pre_root, post_root] {
            if !Path::new(root).is_dir() {
                return Err(fail(Error::FileMissing(root.to_string())));
            }
        }
        let cfg = match opt_str(config_toml, "config_toml")? {
            Some(text) => MatchConfig::from_toml(text).map_err(fail)?,
            None => MatchConfig::default(),
        };
        let empty = Vec::new();
        let records = records.as_ref().map_or(&empty, |r| &r.0);
        let commits = CommitIds {
            pre: opt_str(pre_commit, "pre_commit")?
                .unwrap_or_default()
                .to_string(),
            post: opt_str(post_commit, "post_commit")?
                .unwrap_or_default()
                .to_string(),
        };
        let approach = match approach {
            WtApproach::Soa => Approach::Soa,
            WtApproach::Improved => Approach::Improved,
        };
        let report = track(
            approach,
            &pre.0,
            &post.0,
            &SourceTree::open(pre_root),
            &SourceTree::open(post_root),
            records,
            &cfg,
            &commits,
        )
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(WtReport(report)));
        Ok(())
    })
}

/// Counts of each status in a report. Any output pointer may be null.
///
/// # Safety
/// `report` is a live report; non-null outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn wt_report_counts(
    report: *const WtReport,
    persistent: *mut usize,
    resolved: *mut usize,
    newly_introduced: *mut usize,
) -> WtStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        for (p, v) in [
            (persistent, r.persistent_count()),
            (resolved, r.resolved.len()),
            (newly_introduced, r.newly_introduced.len()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Canonical JSON form of a report. Free the string with
/// [`wt_string_free`].
///
/// # Safety
/// `report` is a live report; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wt_report_to_json(
    report: *const WtReport,
    out: *mut *mut c_char,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = &report.as_ref().ok_or_else(|| null("report"))?.0;
        let text = CString::new(r.to_json()).map_err(|e| (WtStatus::Internal, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` is null or a pointer from [`wt_track`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_report_free(report: *mut WtReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` is null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
