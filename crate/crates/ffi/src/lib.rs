//! C ABI over `fracmild`.
//!
//! Grid functions and solutions cross the boundary as opaque handles that the
//! caller releases with the matching `*_free`. Every fallible call returns an
//! [`FmStatus`]; on failure the message is available from
//! [`fm_last_error_message`] on the same thread.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use fracmild::config::{bundled, RunConfig};
use fracmild::exponents::{check_global_scalar, ScalarParams};
use fracmild::kernel::{eval_kernel, KernelSpec};
use fracmild::semigroup::Propagator;
use fracmild::solver::{certified_solve, CertifiedRun};
use fracmild::{Error, Geometry, GridFunction, Rat};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Diverged = 4,
    Io = 5,
    Config = 6,
    Format = 7,
    Panic = 8,
}

/// Sampled function on a periodic box.
pub struct FmGridFunction(GridFunction);

/// Outcome of a certified solve.
pub struct FmSolution(CertifiedRun);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FmStatus {
    match e {
        Error::Inadmissible(_) => FmStatus::Inadmissible,
        Error::Diverged { .. } => FmStatus::Diverged,
        Error::Io(_) => FmStatus::Io,
        Error::Config { .. } => FmStatus::Config,
        Error::Format(_) => FmStatus::Format,
        _ => FmStatus::InvalidArgument,
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

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FmStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            FmStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            FmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Lib(Error::InvalidParameter(format!("{what} is not UTF-8"))))
}

unsafe fn rat_arg(p: *const c_char, what: &'static str) -> Result<Rat, Fail> {
    Ok(str_arg(p, what)?.parse::<Rat>()?)
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Global admissibility of the scalar problem. Rationals are passed as text
/// (`"3/2"`, `"-0.25"`). `alpha` receives the exponent as a double.
///
/// # Safety
/// String arguments must be NUL-terminated; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_check_scalar(
    beta: *const c_char,
    n: u32,
    p: *const c_char,
    a: *const c_char,
    sigma: *const c_char,
    admissible: *mut bool,
    alpha: *mut f64,
) -> FmStatus {
    guard(|| {
        let params = ScalarParams::new(
            rat_arg(beta, "beta")?,
            n,
            rat_arg(p, "p")?,
            rat_arg(a, "a")?,
            rat_arg(sigma, "sigma")?,
        )?;
        let report = check_global_scalar(&params)?;
        *out_arg(admissible, "admissible")? = report.admissible;
        if let Some(alpha) = alpha.as_mut() {
            *alpha = report.alpha().map_or(f64::NAN, |a| a.to_f64());
        }
        Ok(())
    })
}

/// Radial kernel `K_β(t, r)` at `len` radii.
///
/// # Safety
/// `radii` and `values` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fm_kernel_eval(
    beta: f64,
    n: u32,
    t: f64,
    radii: *const f64,
    values: *mut f64,
    len: usize,
) -> FmStatus {
    guard(|| {
        let radii = slice_arg(radii, len, "radii")?;
        let out = slice_out(values, len, "values")?;
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("t must be > 0, got {t}")).into());
        }
        let spec = KernelSpec::new(beta, n as usize, t.min(1.0))?;
        out.copy_from_slice(&eval_kernel(&spec, t, radii)?.values);
        Ok(())
    })
}

/// Grid function on `[−L, L)^dim` with `samples` points per axis from
/// row-major `values`; `len` must be `samples^dim`.
///
/// # Safety
/// `values` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_new(
    dim: u32,
    half_width: f64,
    samples: usize,
    values: *const f64,
    len: usize,
    out: *mut *mut FmGridFunction,
) -> FmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let geom = Geometry::new(dim as usize, half_width, samples)?;
        let vals = slice_arg(values, len, "values")?.to_vec();
        let u = GridFunction::new(geom, vals)?;
        *out = Box::into_raw(Box::new(FmGridFunction(u)));
        Ok(())
    })
}

/// Reads a grid function from an FRGF file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_load(path: *const c_char, out: *mut *mut FmGridFunction) -> FmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let u = GridFunction::load_frgf(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(FmGridFunction(u)));
        Ok(())
    })
}

/// Writes a grid function as FRGF.
///
/// # Safety
/// `u` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_save(u: *const FmGridFunction, path: *const c_char) -> FmStatus {
    guard(|| {
        let u = ref_arg(u, "u")?;
        u.0.save_frgf(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `u` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_len(u: *const FmGridFunction) -> usize {
    u.as_ref().map_or(0, |u| u.0.values().len())
}

/// Copies the samples into `values`, which must hold exactly `len` doubles.
///
/// # Safety
/// `u` must be a live handle; `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_values(u: *const FmGridFunction, values: *mut f64, len: usize) -> FmStatus {
    guard(|| {
        let u = ref_arg(u, "u")?;
        let src = u.0.values();
        if len != src.len() {
            return Err(Error::InvalidParameter(format!("buffer holds {len} values, function has {}", src.len())).into());
        }
        slice_out(values, len, "values")?.copy_from_slice(src);
        Ok(())
    })
}

/// `S(t)u` for the fractional heat semigroup of order `beta`.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_semigroup_apply(
    u: *const FmGridFunction,
    beta: f64,
    t: f64,
    out: *mut *mut FmGridFunction,
) -> FmStatus {
    guard(|| {
        let u = ref_arg(u, "u")?;
        let out = out_arg(out, "out")?;
        let v = Propagator::new(*u.0.geometry(), beta)?.apply(t, &u.0)?;
        *out = Box::into_raw(Box::new(FmGridFunction(v)));
        Ok(())
    })
}

/// Releases a grid function; null is ignored.
///
/// # Safety
/// `u` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_function_free(u: *mut FmGridFunction) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Certified solve of a run config, given as a file path or the name of a
/// bundled config, with the initial data multiplied by `scale`. Iteration
/// that blows up returns [`FmStatus::Diverged`]; running out of sweeps
/// succeeds with `fm_solution_converged` false.
///
/// # Safety
/// `config` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_solve(
    config: *const c_char,
    scale: f64,
    allow_local: bool,
    out: *mut *mut FmSolution,
) -> FmStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(config, "config")?;
        let cfg = if Path::new(name).exists() {
            RunConfig::load(name)?
        } else {
            let text = bundled(name).ok_or_else(|| Error::InvalidParameter(format!("no config {name:?}")))?;
            RunConfig::parse(text)?
        };
        let u0 = cfg.initial_data(scale)?;
        let run = certified_solve(
            &u0,
            &cfg.form()?,
            &cfg.scalar_params()?,
            &cfg.time_grid()?,
            cfg.solver.tol,
            cfg.solver.max_iter,
            &cfg.options(),
            allow_local,
        )?;
        *out = Box::into_raw(Box::new(FmSolution(run)));
        Ok(())
    })
}

/// Whether the iteration met its tolerance; false for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_converged(sol: *const FmSolution) -> bool {
    sol.as_ref().is_some_and(|s| s.0.convergence.converged)
}

/// `X`-norm of the trajectory; NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_x_norm(sol: *const FmSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.trajectory.x_norm())
}

/// Number of stored times; 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_len(sol: *const FmSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.trajectory.states.len())
}

/// Time and state at index `k`; `state` may be null when only the time is wanted.
///
/// # Safety
/// `sol` must be a live handle; out-pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_state(
    sol: *const FmSolution,
    k: usize,
    time: *mut f64,
    state: *mut *mut FmGridFunction,
) -> FmStatus {
    guard(|| {
        let traj = &ref_arg(sol, "sol")?.0.trajectory;
        let u = traj.states.get(k).ok_or_else(|| {
            Error::InvalidParameter(format!("index {k} out of range for {} states", traj.states.len()))
        })?;
        if let Some(t) = time.as_mut() {
            *t = traj.grid.points()[k];
        }
        if let Some(s) = state.as_mut() {
            *s = Box::into_raw(Box::new(FmGridFunction(u.clone())));
        }
        Ok(())
    })
}

/// Plain-text report (regime, constants, norms, iterate deltas); release
/// with [`fm_string_free`]. Null for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_report(sol: *const FmSolution) -> *mut c_char {
    match sol.as_ref() {
        Some(s) => CString::new(s.0.to_text()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// Releases a solution; null is ignored.
///
/// # Safety
/// `sol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fm_solution_free(sol: *mut FmSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
