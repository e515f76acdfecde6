//! C ABI over `crimedyn`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible call returns a
//! [`CrimedynStatus`]; on failure a message is available from
//! [`crimedyn_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crimedyn::analysis::thresholds;
use crimedyn::error::{exit, Error};
use crimedyn::integrator::{integrate, SolverConfig, Trajectory};
use crimedyn::sensitivity::{nfsi_derived, nfsi_finite_difference, DEFAULT_REL_STEP};
use crimedyn::{ModelParams, StateVec, Strictness};

/// Status codes; the non-zero values below 5 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrimedynStatus {
    Ok = 0,
    /// Malformed or out-of-range input.
    Validation = 2,
    /// Mathematically inadmissible, e.g. Lambda <= 0.
    Inadmissible = 3,
    /// Solver or eigenvalue failure.
    Numerical = 4,
    NullArgument = 5,
    /// A Rust panic was caught; this is a bug.
    Internal = 6,
}

/// Opaque parameter set.
pub struct CrimedynParams(ModelParams);

/// Opaque time series.
pub struct CrimedynTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CrimedynThresholds {
    pub lambda: f64,
    pub r0: f64,
    /// Published closed form.
    pub alpha_star: f64,
    /// Sign change of the quadratic's linear coefficient.
    pub alpha_star_consistent: f64,
    pub r0_critical: f64,
    pub beta_star: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CrimedynSolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub output_interval: f64,
    pub max_steps: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CrimedynStatus {
    match e.exit_code() {
        exit::INADMISSIBLE => CrimedynStatus::Inadmissible,
        exit::NUMERICAL => CrimedynStatus::Numerical,
        _ => CrimedynStatus::Validation,
    }
}

fn fail(status: CrimedynStatus, message: impl Into<String>) -> CrimedynStatus {
    set_error(message.into());
    status
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), CrimedynStatus>) -> CrimedynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrimedynStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(CrimedynStatus::Internal, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CrimedynStatus>;
}

impl<T> OrStatus<T> for crimedyn::Result<T> {
    fn or_status(self) -> Result<T, CrimedynStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, CrimedynStatus> {
    if p.is_null() {
        return Err(fail(CrimedynStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(CrimedynStatus::Validation, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, CrimedynStatus> {
    p.as_ref().ok_or_else(|| fail(CrimedynStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, CrimedynStatus> {
    p.as_mut().ok_or_else(|| fail(CrimedynStatus::NullArgument, format!("{what} is null")))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn crimedyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn crimedyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a parameter set from a shipped preset name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_params_preset(name: *const c_char, out: *mut *mut CrimedynParams) -> CrimedynStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let preset = crimedyn::presets::by_name(str_arg(name, "name")?).or_status()?;
        *out = Box::into_raw(Box::new(CrimedynParams(preset.params)));
        Ok(())
    })
}

/// Parses and validates `name = value` text or JSON.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_params_parse(text: *const c_char, out: *mut *mut CrimedynParams) -> CrimedynStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let params = ModelParams::parse(str_arg(text, "text")?).or_status()?;
        params.validate(Strictness::Strict).or_status()?;
        *out = Box::into_raw(Box::new(CrimedynParams(params)));
        Ok(())
    })
}

/// # Safety
/// `params` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_params_free(params: *mut CrimedynParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets one parameter and re-validates; on failure the handle is unchanged.
///
/// # Safety
/// `params` must be a live handle; `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_params_set(
    params: *mut CrimedynParams,
    name: *const c_char,
    value: f64,
) -> CrimedynStatus {
    guard(|| {
        let p = out_arg(params, "params")?;
        let next = p.0.with(str_arg(name, "name")?, value).or_status()?;
        next.validate(Strictness::Strict).or_status()?;
        p.0 = next;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle; `name` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_params_get(
    params: *const CrimedynParams,
    name: *const c_char,
    out: *mut f64,
) -> CrimedynStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        let name = str_arg(name, "name")?;
        let out = out_arg(out, "out")?;
        *out = p.0.get(name).ok_or_else(|| fail(CrimedynStatus::Validation, format!("unknown parameter `{name}`")))?;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_r0(params: *const CrimedynParams, out: *mut f64) -> CrimedynStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        let out = out_arg(out, "out")?;
        *out = crimedyn::analysis::r0(&p.0).or_status()?;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_thresholds(
    params: *const CrimedynParams,
    out: *mut CrimedynThresholds,
) -> CrimedynStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        let out = out_arg(out, "out")?;
        let t = thresholds(&p.0).or_status()?;
        *out = CrimedynThresholds {
            lambda: t.lambda_cap,
            r0: t.r0,
            alpha_star: t.alpha_star,
            alpha_star_consistent: t.alpha_star_consistent,
            r0_critical: t.r0_critical,
            beta_star: t.beta_star,
        };
        Ok(())
    })
}

/// Normalized sensitivity index of R0 to `name`: closed form and central difference.
///
/// # Safety
/// `params` must be a live handle; `name` a NUL-terminated string; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_sensitivity(
    params: *const CrimedynParams,
    name: *const c_char,
    derived: *mut f64,
    finite_difference: *mut f64,
) -> CrimedynStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        let name = str_arg(name, "name")?;
        let d = out_arg(derived, "derived")?;
        let fd = out_arg(finite_difference, "finite_difference")?;
        *d = nfsi_derived(&p.0, name).or_status()?;
        *fd = nfsi_finite_difference(&p.0, name, DEFAULT_REL_STEP).or_status()?;
        Ok(())
    })
}

/// Default solver options.
#[no_mangle]
pub extern "C" fn crimedyn_solver_defaults() -> CrimedynSolverOptions {
    let d = SolverConfig::default();
    CrimedynSolverOptions {
        rel_tol: d.rel_tol,
        abs_tol: d.abs_tol,
        output_interval: d.output_interval,
        max_steps: d.max_steps,
    }
}

/// Integrates from `y0 = [S1, S2, C, R]` to `t_end`. `options` may be null for defaults.
///
/// # Safety
/// `params` must be a live handle; `y0` must point to 4 doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_simulate(
    params: *const CrimedynParams,
    y0: *const f64,
    t_end: f64,
    options: *const CrimedynSolverOptions,
    out: *mut *mut CrimedynTrajectory,
) -> CrimedynStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        let out = out_arg(out, "out")?;
        if y0.is_null() {
            return Err(fail(CrimedynStatus::NullArgument, "y0 is null"));
        }
        let y = std::slice::from_raw_parts(y0, 4);
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(fail(CrimedynStatus::Validation, format!("t_end must be positive, got {t_end}")));
        }
        let opts = options.as_ref().copied().unwrap_or_else(|| crimedyn_solver_defaults());
        let cfg = SolverConfig {
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            output_interval: opts.output_interval,
            max_steps: opts.max_steps,
            ..SolverConfig::default()
        };
        cfg.validate().or_status()?;
        let start = StateVec::new(y[0], y[1], y[2], y[3]);
        let traj = integrate(&p.0, &start, t_end, &cfg).or_status()?;
        *out = Box::into_raw(Box::new(CrimedynTrajectory(traj)));
        Ok(())
    })
}

/// Number of samples; 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_trajectory_len(traj: *const CrimedynTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.times.len())
}

/// Sample `index`: its time and `[S1, S2, C, R]`.
///
/// # Safety
/// `traj` must be a live handle; `t` writable; `state` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_trajectory_get(
    traj: *const CrimedynTrajectory,
    index: usize,
    t: *mut f64,
    state: *mut f64,
) -> CrimedynStatus {
    guard(|| {
        let tr = ref_arg(traj, "traj")?;
        let t = out_arg(t, "t")?;
        if state.is_null() {
            return Err(fail(CrimedynStatus::NullArgument, "state is null"));
        }
        let n = tr.0.times.len();
        if index >= n {
            return Err(fail(CrimedynStatus::Validation, format!("index {index} out of range ({n} samples)")));
        }
        *t = tr.0.times[index];
        std::slice::from_raw_parts_mut(state, 4).copy_from_slice(&tr.0.states[index].to_array());
        Ok(())
    })
}

/// # Safety
/// `traj` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn crimedyn_trajectory_free(traj: *mut CrimedynTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
