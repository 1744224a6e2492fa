//! C ABI over `nmsse`.
//!
//! Configs and results are opaque handles owned by the caller and released
//! with the matching `*_free`. Every fallible call returns an
//! [`NmsseStatus`]; the message of the most recent failure on the calling
//! thread is available from [`nmsse_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nmsse::config::{Mode, ScenarioConfig};
use nmsse::ensemble::{run_ensemble, BlochError, EnsembleResult};
use nmsse::models::BlochVector;
use nmsse::output::write_series;
use nmsse::run::{exact_curve, master_curve};
use nmsse::sse::Scenario;
use nmsse::{Error, TimeGrid};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmsseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Numerical = 4,
    Trajectory = 5,
    Io = 6,
    OutOfRange = 7,
    Unsupported = 8,
    Panic = 9,
}

/// One grid point of a Bloch series. Standard errors are 0 for series that
/// have none.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NmssePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub norm: f64,
    pub x_se: f64,
    pub y_se: f64,
    pub z_se: f64,
}

/// Opaque scenario configuration.
pub struct NmsseConfig {
    inner: ScenarioConfig,
}

/// Opaque Bloch time series: an ensemble mean, a single trajectory, or a
/// reference curve.
pub struct NmsseSeries {
    grid: TimeGrid,
    bloch: Vec<BlochVector>,
    errors: Option<Vec<BlochError>>,
    ensemble: Option<EnsembleResult>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NmsseStatus {
    match e {
        Error::Config { .. } => NmsseStatus::Config,
        Error::Io(_) | Error::Csv { .. } => NmsseStatus::Io,
        Error::Trajectory { .. } | Error::Ensemble { .. } => NmsseStatus::Trajectory,
        Error::GridMismatch(_) | Error::HistoryTooShort { .. } => NmsseStatus::OutOfRange,
        Error::NotSymmetric | Error::SampleMismatch(_) => NmsseStatus::Unsupported,
        _ => NmsseStatus::Numerical,
    }
}

fn guard<F>(f: F) -> NmsseStatus
where
    F: FnOnce() -> Result<(), (NmsseStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NmsseStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside nmsse".into());
            NmsseStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (NmsseStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NmsseStatus, String) {
    (NmsseStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (NmsseStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (NmsseStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (NmsseStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nmsse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nmsse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New config holding the defaults (coherent actual SSE, delta 2, dt 1e-4,
/// t_final 3, 1000 trajectories, seed 0).
#[no_mangle]
pub extern "C" fn nmsse_config_new() -> *mut NmsseConfig {
    Box::into_raw(Box::new(NmsseConfig {
        inner: ScenarioConfig::default(),
    }))
}

/// # Safety
/// `config` must come from [`nmsse_config_new`] and not be freed yet, or be
/// NULL.
#[no_mangle]
pub unsafe extern "C" fn nmsse_config_free(config: *mut NmsseConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets one field using config-file keys and values, e.g. `("unraveling",
/// "quadrature")` or `("n_traj", "4000")`.
///
/// # Safety
/// `config` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn nmsse_config_set(
    config: *mut NmsseConfig,
    key: *const c_char,
    value: *const c_char,
) -> NmsseStatus {
    guard(|| {
        let cfg = out_arg(config, "config")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        cfg.inner.set(key, value).map_err(lib_err)
    })
}

/// Checks the config without running anything.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nmsse_config_validate(config: *const NmsseConfig) -> NmsseStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        cfg.inner.validate().map_err(lib_err)
    })
}

fn boxed(series: NmsseSeries, out: &mut *mut NmsseSeries) {
    *out = Box::into_raw(Box::new(series));
}

/// Runs the SSE ensemble described by `config` (mode must be `sse`).
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmsse_run_ensemble(
    config: *const NmsseConfig,
    out: *mut *mut NmsseSeries,
) -> NmsseStatus {
    guard(|| {
        let cfg = &config.as_ref().ok_or_else(|| null("config"))?.inner;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let scenario = Scenario::new(cfg).map_err(lib_err)?;
        let threads = cfg
            .threads
            .unwrap_or_else(nmsse::ensemble::default_threads);
        let r = run_ensemble(&scenario, cfg.n_traj, threads).map_err(lib_err)?;
        boxed(
            NmsseSeries {
                grid: r.grid,
                bloch: r.mean_bloch.clone(),
                errors: Some(r.std_error.clone()),
                ensemble: Some(r),
            },
            out,
        );
        Ok(())
    })
}

/// Runs trajectory `index` of the SSE scenario.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmsse_run_trajectory(
    config: *const NmsseConfig,
    index: u64,
    out: *mut *mut NmsseSeries,
) -> NmsseStatus {
    guard(|| {
        let cfg = &config.as_ref().ok_or_else(|| null("config"))?.inner;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let rec = Scenario::new(cfg)
            .and_then(|s| s.run_trajectory(index))
            .map_err(lib_err)?;
        boxed(
            NmsseSeries {
                grid: rec.grid,
                bloch: rec.bloch,
                errors: None,
                ensemble: None,
            },
            out,
        );
        Ok(())
    })
}

/// Reference curve for the config: the exact solution for `exact` and
/// colored-noise `sse` configs, the Lindblad solution for `master` and
/// Markov `sse` configs.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmsse_run_reference(
    config: *const NmsseConfig,
    out: *mut *mut NmsseSeries,
) -> NmsseStatus {
    guard(|| {
        let cfg = &config.as_ref().ok_or_else(|| null("config"))?.inner;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        cfg.validate().map_err(lib_err)?;
        let grid = cfg.grid().map_err(lib_err)?;
        let markov = cfg.mode == Mode::Master || (cfg.mode == Mode::Sse && cfg.unraveling.is_markov());
        let bloch = if markov {
            master_curve(cfg.gamma().map_err(lib_err)?, grid).map_err(lib_err)?
        } else {
            exact_curve(cfg.g, cfg.delta, grid)
        };
        boxed(
            NmsseSeries {
                grid,
                bloch,
                errors: None,
                ensemble: None,
            },
            out,
        );
        Ok(())
    })
}

/// # Safety
/// `series` must come from one of the `nmsse_run_*` calls and not be freed
/// yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn nmsse_series_free(series: *mut NmsseSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of grid points; 0 for NULL.
///
/// # Safety
/// `series` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn nmsse_series_len(series: *const NmsseSeries) -> usize {
    series.as_ref().map_or(0, |s| s.bloch.len())
}

/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmsse_series_point(
    series: *const NmsseSeries,
    index: usize,
    out: *mut NmssePoint,
) -> NmsseStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let out = out_arg(out, "out")?;
        let b = s.bloch.get(index).ok_or_else(|| {
            (
                NmsseStatus::OutOfRange,
                format!("index {index} out of range for {} points", s.bloch.len()),
            )
        })?;
        let e = s.errors.as_ref().map_or(BlochError::default(), |e| e[index]);
        *out = NmssePoint {
            t: s.grid.t(index),
            x: b.x,
            y: b.y,
            z: b.z,
            norm: b.norm,
            x_se: e.x,
            y_se: e.y,
            z_se: e.z,
        };
        Ok(())
    })
}

/// Smallest eigenvalue of the averaged density matrix at `index`. Only
/// ensemble series carry density matrices.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmsse_series_min_eigenvalue(
    series: *const NmsseSeries,
    index: usize,
    out: *mut f64,
) -> NmsseStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let out = out_arg(out, "out")?;
        let e = s.ensemble.as_ref().ok_or_else(|| {
            (
                NmsseStatus::Unsupported,
                "series is not an ensemble".to_string(),
            )
        })?;
        let rho = e.mean_density.get(index).ok_or_else(|| {
            (
                NmsseStatus::OutOfRange,
                format!("index {index} out of range"),
            )
        })?;
        *out = rho.min_eigenvalue();
        Ok(())
    })
}

/// Writes the series as CSV.
///
/// # Safety
/// `series` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nmsse_series_write_csv(
    series: *const NmsseSeries,
    path: *const c_char,
) -> NmsseStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let path = str_arg(path, "path")?;
        write_series(s.grid, &s.bloch, s.errors.as_deref(), Some(Path::new(path))).map_err(lib_err)
    })
}
