//! C ABI over `raqsim`.
//!
//! Configurations and result tables are opaque handles released with the
//! matching `_free` call. Every fallible call returns a
//! [`RaqsimStatus`]; on failure the message is available from
//! [`raqsim_last_error`] on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use raqsim::config::{load_config, Config, ConfigError};
use raqsim::constants::linear_to_db;
use raqsim::output::write_csv;
use raqsim::rates::{lower_bounds, Scheme, System};
use raqsim::sweep::{run_sweep, Preset, SweepRow, SweepSpec};
use raqsim::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaqsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration or argument.
    Validation = 3,
    Io = 4,
    Domain = 5,
    /// A solve or inversion failed its conditioning checks.
    Numerical = 6,
    OutOfRange = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

pub const RAQSIM_SYSTEM_RAQ: u32 = 0;
pub const RAQSIM_SYSTEM_MMIMO: u32 = 1;
pub const RAQSIM_SCHEME_MRC: u32 = 0;
pub const RAQSIM_SCHEME_ZF: u32 = 1;

/// A validated simulator configuration.
pub struct RaqsimConfig(Config);

/// Rows of a finished sweep.
pub struct RaqsimTable(Vec<SweepRow>);

/// Front-end figures of both receivers at the configured array size.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RaqsimFrontend {
    pub chi_re: f64,
    pub chi_im: f64,
    /// dχ/dΩ_l, s/rad.
    pub chi_slope_re: f64,
    pub chi_slope_im: f64,
    pub probe_output_power_w: f64,
    pub gain: f64,
    pub cos2_phase: f64,
    pub effective_aperture_m2: f64,
    pub noise_power_w: f64,
    pub mmimo_gain: f64,
    pub mmimo_aperture_m2: f64,
    pub mmimo_noise_power_w: f64,
    pub snr_advantage_db: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RaqsimRow {
    /// Grid value of the swept axis (M, K or P_s in dBm).
    pub value: f64,
    pub system: u32,
    pub scheme: u32,
    pub rate_mc: f64,
    pub rate_lb: f64,
    pub ci: f64,
    /// False when the point failed; rates are NaN then.
    pub ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(RaqsimStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) | Error::Csv(_) | Error::Config(ConfigError::Io { .. }) => {
                RaqsimStatus::Io
            }
            _ if e.is_validation() => RaqsimStatus::Validation,
            Error::SingularSteadyState { .. }
            | Error::ZeroDenominator { .. }
            | Error::SlopeNotConverged { .. }
            | Error::Combiner { .. } => RaqsimStatus::Numerical,
            _ => RaqsimStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RaqsimStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure(RaqsimStatus::Panic, format!("panic: {msg}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error("");
            RaqsimStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(&msg);
            status
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RaqsimStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(RaqsimStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn config<'a>(p: *const RaqsimConfig) -> Result<&'a Config, Failure> {
    p.as_ref().map(|c| &c.0).ok_or_else(|| null("config"))
}

fn system(v: u32) -> Result<System, Failure> {
    match v {
        RAQSIM_SYSTEM_RAQ => Ok(System::Raq),
        RAQSIM_SYSTEM_MMIMO => Ok(System::Mmimo),
        _ => Err(Failure(
            RaqsimStatus::OutOfRange,
            format!("unknown system {v}"),
        )),
    }
}

fn scheme(v: u32) -> Result<Scheme, Failure> {
    match v {
        RAQSIM_SCHEME_MRC => Ok(Scheme::Mrc),
        RAQSIM_SCHEME_ZF => Ok(Scheme::Zf),
        _ => Err(Failure(
            RaqsimStatus::OutOfRange,
            format!("unknown scheme {v}"),
        )),
    }
}

fn validated(cfg: Config) -> Result<Box<RaqsimConfig>, Failure> {
    cfg.validate().map_err(Error::from)?;
    Ok(Box::new(RaqsimConfig(cfg)))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next `raqsim_*` call on this thread.
#[no_mangle]
pub extern "C" fn raqsim_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn raqsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a JSON configuration.
#[no_mangle]
pub unsafe extern "C" fn raqsim_config_from_json(
    json: *const c_char,
    out: *mut *mut RaqsimConfig,
) -> RaqsimStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let cfg = Config::from_json_str(text(json, "json")?).map_err(Error::from)?;
        *out = Box::into_raw(validated(cfg)?);
        Ok(())
    })
}

/// Reads, parses and validates a JSON configuration file.
#[no_mangle]
pub unsafe extern "C" fn raqsim_config_load(
    path: *const c_char,
    out: *mut *mut RaqsimConfig,
) -> RaqsimStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let cfg = load_config(Path::new(text(path, "path")?)).map_err(Error::from)?;
        *out = Box::into_raw(validated(cfg)?);
        Ok(())
    })
}

/// The built-in default configuration.
#[no_mangle]
pub unsafe extern "C" fn raqsim_config_template(out: *mut *mut RaqsimConfig) -> RaqsimStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Box::into_raw(validated(Config::template())?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn raqsim_config_free(cfg: *mut RaqsimConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

#[no_mangle]
pub unsafe extern "C" fn raqsim_frontend_report(
    cfg: *const RaqsimConfig,
    out: *mut RaqsimFrontend,
) -> RaqsimStatus {
    guard(|| {
        let cfg = config(cfg)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let fr = cfg.fronts(cfg.array.elements)?;
        let r = &fr.report.response;
        let mm = &fr.mmimo_front;
        let raq_snr = r.effective_gain() * r.effective_aperture / r.noise_power;
        let mm_snr = mm.gain() * mm.aperture / mm.noise_power;
        *out = RaqsimFrontend {
            chi_re: fr.report.chi.re,
            chi_im: fr.report.chi.im,
            chi_slope_re: fr.report.chi_slope.re,
            chi_slope_im: fr.report.chi_slope.im,
            probe_output_power_w: fr.report.probe_output.power,
            gain: r.gain,
            cos2_phase: r.cos2_phase(),
            effective_aperture_m2: r.effective_aperture,
            noise_power_w: r.noise_power,
            mmimo_gain: mm.gain(),
            mmimo_aperture_m2: mm.aperture,
            mmimo_noise_power_w: mm.noise_power,
            snr_advantage_db: linear_to_db(raq_snr / mm_snr),
        };
        Ok(())
    })
}

/// Per-user closed-form lower bounds for the configured drop, M, K and P_s.
/// Writes `min(K, capacity)` values to `out` and K to `*users`.
#[no_mangle]
pub unsafe extern "C" fn raqsim_lower_bounds(
    cfg: *const RaqsimConfig,
    system_id: u32,
    scheme_id: u32,
    out: *mut f64,
    capacity: usize,
    users: *mut usize,
) -> RaqsimStatus {
    guard(|| {
        let cfg = config(cfg)?;
        let (system, scheme) = (system(system_id)?, scheme(scheme_id)?);
        let users = users.as_mut().ok_or_else(|| null("users"))?;
        if out.is_null() && capacity > 0 {
            return Err(null("out"));
        }
        let fr = cfg.fronts(cfg.array.elements)?;
        let (_, profile) = cfg.large_scale(cfg.users.count, cfg.simulation.seed)?;
        let front = match system {
            System::Raq => &fr.raq,
            System::Mmimo => &fr.mmimo,
        };
        let lb = lower_bounds(&front.bound_inputs(scheme, &profile.beta, cfg.transmit_power_w()))?;
        *users = lb.len();
        let n = lb.len().min(capacity);
        if n > 0 {
            std::slice::from_raw_parts_mut(out, n).copy_from_slice(&lb[..n]);
        }
        Ok(())
    })
}

/// Runs `preset` ("fig-M", "fig-K" or "fig-P"). `trials == 0` keeps the
/// configured trial count. Uses the global worker pool.
#[no_mangle]
pub unsafe extern "C" fn raqsim_run_preset(
    cfg: *const RaqsimConfig,
    preset: *const c_char,
    trials: usize,
    out: *mut *mut RaqsimTable,
) -> RaqsimStatus {
    guard(|| {
        let cfg = config(cfg)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let preset: Preset = text(preset, "preset")?.parse()?;
        let mut spec = SweepSpec::preset(preset, cfg);
        if trials > 0 {
            spec.trials = trials;
        }
        let result = run_sweep(&spec, cfg, None)?;
        *out = Box::into_raw(Box::new(RaqsimTable(result.rows)));
        Ok(())
    })
}

/// Number of rows, or 0 for a null table.
#[no_mangle]
pub unsafe extern "C" fn raqsim_table_len(table: *const RaqsimTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn raqsim_table_row(
    table: *const RaqsimTable,
    index: usize,
    out: *mut RaqsimRow,
) -> RaqsimStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = table.0.get(index).ok_or_else(|| {
            Failure(
                RaqsimStatus::OutOfRange,
                format!("row {index} of {}", table.0.len()),
            )
        })?;
        *out = RaqsimRow {
            value: r.value,
            system: match r.system {
                System::Raq => RAQSIM_SYSTEM_RAQ,
                System::Mmimo => RAQSIM_SYSTEM_MMIMO,
            },
            scheme: match r.scheme {
                Scheme::Mrc => RAQSIM_SCHEME_MRC,
                Scheme::Zf => RAQSIM_SCHEME_ZF,
            },
            rate_mc: r.rate_mc,
            rate_lb: r.rate_lb,
            ci: r.ci,
            ok: r.err.is_empty(),
        };
        Ok(())
    })
}

/// Writes the table in the same CSV format as the command-line tool.
#[no_mangle]
pub unsafe extern "C" fn raqsim_table_write_csv(
    table: *const RaqsimTable,
    path: *const c_char,
) -> RaqsimStatus {
    guard(|| {
        let table = table.as_ref().ok_or_else(|| null("table"))?;
        write_csv(&table.0, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn raqsim_table_free(table: *mut RaqsimTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
