//! C ABI for `logspec`.
//!
//! Every fallible function returns an [`LsStatus`]; on failure the message is
//! available from [`ls_last_error_message`] on the same thread. Results are
//! written through out-pointers. Solutions and expansions are opaque handles
//! released with their `_free` function.
//!
//! Callbacks may be invoked concurrently from worker threads and must be
//! thread-safe together with their `user_data`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use logspec::approx;
use logspec::fracops;
use logspec::logbasis::{self, BasisParams, Expansion};
use logspec::solvers::{self, BvpProblem, BvpSolution, IvpProblem, IvpSolution, RhsMode, ScalarFn, SolverConfig};
use logspec::spacetime::{self, DiffusionProblem, SpaceTimeFn, SpaceTimeSolution};
use logspec::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Convergence = 3,
    NonFinite = 4,
    Singular = 5,
    Mismatch = 6,
    Config = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Basis family `(alpha, beta, lambda)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LsBasisParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsRhsMode {
    Interpolate = 0,
    Project = 1,
}

/// Solver configuration. `inner_rule_size = 0` selects the default `2n + 16`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LsSolverConfig {
    pub params: LsBasisParams,
    pub n: usize,
    pub inner_rule_size: usize,
    pub rhs_mode: LsRhsMode,
}

/// `f(t, user_data)`.
pub type LsScalarFn = Option<unsafe extern "C" fn(t: f64, user_data: *mut c_void) -> f64>;

/// `f(x1, x2, t, user_data)`.
pub type LsSpaceTimeFn = Option<unsafe extern "C" fn(x1: f64, x2: f64, t: f64, user_data: *mut c_void) -> f64>;

/// Opaque GLOF expansion.
pub struct LsExpansion(Expansion);

/// Opaque initial-value-problem solution.
pub struct LsIvpSolution(IvpSolution);

/// Opaque boundary-value-problem solution.
pub struct LsBvpSolution(BvpSolution);

/// Opaque space-time diffusion solution.
pub struct LsDiffusionSolution(SpaceTimeSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::Domain(_) => LsStatus::Domain,
        Error::Convergence(_) => LsStatus::Convergence,
        Error::NonFinite { .. } => LsStatus::NonFinite,
        Error::Singular { .. } => LsStatus::Singular,
        Error::Mismatch(_) => LsStatus::Mismatch,
        Error::Config(_) => LsStatus::Config,
    }
}

struct Failure(LsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status and the last-error message.
fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            clear_last_error();
            LsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            LsStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, needed: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < needed {
        return Err(Failure(LsStatus::BufferTooSmall, format!("{what} holds {len} values, {needed} needed")));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

fn params(p: LsBasisParams) -> Result<BasisParams, Failure> {
    Ok(BasisParams::new(p.alpha, p.beta, p.lambda)?)
}

fn config(c: LsSolverConfig) -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::new(params(c.params)?, c.n)?;
    if c.inner_rule_size != 0 {
        cfg = cfg.with_inner(c.inner_rule_size)?;
    }
    Ok(cfg.with_rhs_mode(match c.rhs_mode {
        LsRhsMode::Interpolate => RhsMode::Interpolate,
        LsRhsMode::Project => RhsMode::Project,
    }))
}

#[derive(Clone, Copy)]
struct UserData(*mut c_void);

// The caller guarantees thread safety of callbacks and their data.
unsafe impl Send for UserData {}
unsafe impl Sync for UserData {}

fn scalar_callback(f: LsScalarFn, data: *mut c_void, what: &str) -> Result<ScalarFn, Failure> {
    let f = f.ok_or_else(|| null(what))?;
    let data = UserData(data);
    Ok(Arc::new(move |t| {
        let d = data;
        unsafe { f(t, d.0) }
    }))
}

fn space_time_callback(f: LsSpaceTimeFn, data: *mut c_void) -> Result<SpaceTimeFn, Failure> {
    let f = f.ok_or_else(|| null("forcing callback"))?;
    let data = UserData(data);
    Ok(Arc::new(move |x1, x2, t| {
        let d = data;
        unsafe { f(x1, x2, t, d.0) }
    }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Writes `S_0(t), ..., S_n(t)` into `out[0..=n]`.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_glof_eval_all(
    p: LsBasisParams,
    n: usize,
    t: f64,
    out: *mut f64,
    out_len: usize,
) -> LsStatus {
    guard(|| {
        let dst = out_slice(out, out_len, n + 1, "out")?;
        dst.copy_from_slice(&logbasis::glof_eval_all(&params(p)?, n, t)?);
        Ok(())
    })
}

/// Writes the `n + 1` Gauss-GLOF nodes (decreasing) and weights.
///
/// # Safety
/// `nodes` and `weights` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_gauss_glof(
    p: LsBasisParams,
    n: usize,
    nodes: *mut f64,
    weights: *mut f64,
    len: usize,
) -> LsStatus {
    guard(|| {
        let rule = logbasis::gauss_glof(&params(p)?, n)?;
        out_slice(nodes, len, n + 1, "nodes")?.copy_from_slice(rule.nodes());
        out_slice(weights, len, n + 1, "weights")?.copy_from_slice(rule.weights());
        Ok(())
    })
}

/// `E_gamma(z)`.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn ls_mittag_leffler(gamma: f64, z: f64, out: *mut f64) -> LsStatus {
    guard(|| write(out, fracops::mittag_leffler(gamma, z)?, "out"))
}

/// Weighted projection of `f` onto degree `n`, using `n + 1 + oversample` quadrature points.
///
/// # Safety
/// `out` must be a valid pointer; `f` must be callable with `user_data`.
#[no_mangle]
pub unsafe extern "C" fn ls_project(
    p: LsBasisParams,
    n: usize,
    f: LsScalarFn,
    user_data: *mut c_void,
    oversample: usize,
    out: *mut *mut LsExpansion,
) -> LsStatus {
    guard(|| {
        let f = scalar_callback(f, user_data, "f")?;
        let e = approx::project(&params(p)?, n, |t| f(t), oversample)?;
        write(out, Box::into_raw(Box::new(LsExpansion(e))), "out")
    })
}

/// Interpolation of `f` at the `n + 1` Gauss-GLOF nodes.
///
/// # Safety
/// `out` must be a valid pointer; `f` must be callable with `user_data`.
#[no_mangle]
pub unsafe extern "C" fn ls_interpolate(
    p: LsBasisParams,
    n: usize,
    f: LsScalarFn,
    user_data: *mut c_void,
    out: *mut *mut LsExpansion,
) -> LsStatus {
    guard(|| {
        let f = scalar_callback(f, user_data, "f")?;
        let e = approx::interpolate(&params(p)?, n, |t| f(t))?;
        write(out, Box::into_raw(Box::new(LsExpansion(e))), "out")
    })
}

/// Polynomial degree of an expansion.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_expansion_degree(e: *const LsExpansion) -> usize {
    e.as_ref().map_or(0, |e| e.0.degree())
}

/// Writes the plain-basis coefficients `c_0..c_degree`.
///
/// # Safety
/// `e` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ls_expansion_coeffs(e: *const LsExpansion, out: *mut f64, len: usize) -> LsStatus {
    guard(|| {
        let c = handle(e, "expansion")?.0.plain_coeffs();
        out_slice(out, len, c.len(), "out")?.copy_from_slice(&c);
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_expansion_eval(e: *const LsExpansion, t: f64, out: *mut f64) -> LsStatus {
    guard(|| write(out, handle(e, "expansion")?.0.eval(t)?, "out"))
}

/// # Safety
/// `e` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_expansion_free(e: *mut LsExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Solves `CD^nu u + q u = g` on (0, 1) with `u(0) = u0`.
///
/// # Safety
/// `out` must be a valid pointer; callbacks must be callable with their data.
#[no_mangle]
pub unsafe extern "C" fn ls_solve_ivp(
    nu: f64,
    q: LsScalarFn,
    q_data: *mut c_void,
    g: LsScalarFn,
    g_data: *mut c_void,
    u0: f64,
    cfg: LsSolverConfig,
    out: *mut *mut LsIvpSolution,
) -> LsStatus {
    guard(|| {
        let prob = IvpProblem::new(nu, scalar_callback(q, q_data, "q")?, scalar_callback(g, g_data, "g")?, u0)?;
        let sol = solvers::solve_ivp(&prob, &config(cfg)?)?;
        write(out, Box::into_raw(Box::new(LsIvpSolution(sol))), "out")
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_ivp_eval(s: *const LsIvpSolution, t: f64, out: *mut f64) -> LsStatus {
    guard(|| write(out, handle(s, "solution")?.0.eval(t)?, "out"))
}

/// One-norm condition estimate of the solved system, or NaN for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_ivp_cond(s: *const LsIvpSolution) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.cond)
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_ivp_free(s: *mut LsIvpSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Solves `-D^mu u + q u = g` on (0, 1) with `u(0) = u(1) = 0`.
///
/// # Safety
/// `out` must be a valid pointer; callbacks must be callable with their data.
#[no_mangle]
pub unsafe extern "C" fn ls_solve_bvp(
    mu: f64,
    q: LsScalarFn,
    q_data: *mut c_void,
    g: LsScalarFn,
    g_data: *mut c_void,
    cfg: LsSolverConfig,
    out: *mut *mut LsBvpSolution,
) -> LsStatus {
    guard(|| {
        let prob = BvpProblem::new(mu, scalar_callback(q, q_data, "q")?, scalar_callback(g, g_data, "g")?)?;
        let sol = solvers::solve_bvp(&prob, &config(cfg)?)?;
        write(out, Box::into_raw(Box::new(LsBvpSolution(sol))), "out")
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_bvp_eval(s: *const LsBvpSolution, t: f64, out: *mut f64) -> LsStatus {
    guard(|| write(out, handle(s, "solution")?.0.eval(t)?, "out"))
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_bvp_cond(s: *const LsBvpSolution) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.cond)
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_bvp_free(s: *mut LsBvpSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Solves `CD^nu u - Δu = f` on `(-1,1)^2 x (0, T)` with zero boundary and initial data.
/// `cfg.n` is the time degree and `nx` the spatial degree.
///
/// # Safety
/// `out` must be a valid pointer; `f` must be callable with `user_data`.
#[no_mangle]
pub unsafe extern "C" fn ls_solve_diffusion(
    nu: f64,
    f: LsSpaceTimeFn,
    user_data: *mut c_void,
    t_final: f64,
    nx: usize,
    cfg: LsSolverConfig,
    out: *mut *mut LsDiffusionSolution,
) -> LsStatus {
    guard(|| {
        let prob = DiffusionProblem::new(nu, space_time_callback(f, user_data)?, t_final)?;
        let sol = spacetime::solve_diffusion(&prob, nx, &config(cfg)?)?;
        write(out, Box::into_raw(Box::new(LsDiffusionSolution(sol))), "out")
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_diffusion_eval(
    s: *const LsDiffusionSolution,
    x1: f64,
    x2: f64,
    t: f64,
    out: *mut f64,
) -> LsStatus {
    guard(|| write(out, handle(s, "solution")?.0.eval(x1, x2, t)?, "out"))
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_diffusion_cond(s: *const LsDiffusionSolution) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.cond())
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ls_diffusion_free(s: *mut LsDiffusionSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
