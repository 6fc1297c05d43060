//! C interface to the `critbound` numerics.
//!
//! Every fallible call returns a [`CbStatus`]; on failure the message is
//! kept per thread and read with [`cb_last_error_message`]. Radial solves
//! go through an opaque [`CbSolver`] handle created by [`cb_solver_new`]
//! and released by [`cb_solver_free`]. Results are written through caller
//! pointers; nothing returned needs freeing except the handle.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use critbound::asymptotics::{threshold_gap_with, GapOptions, GapRegime};
use critbound::bubbles::{
    eval_bubble, ground_state_level, sobolev_constants, BubbleKind, BubbleSpec,
};
use critbound::quadrature::{BoundaryModel, SphereRule};
use critbound::solver::{find_excited_state, MountainPassResult, SolverConfig};
use critbound::Error;

pub const CB_BUBBLE_INTERIOR: i32 = 0;
pub const CB_BUBBLE_TRACE: i32 = 1;
pub const CB_BUBBLE_CORNER: i32 = 2;

pub const CB_REGIME_VOLUME_CRITICAL: i32 = 0;
pub const CB_REGIME_TRACE_CRITICAL: i32 = 1;
pub const CB_REGIME_DOUBLE_CRITICAL: i32 = 2;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbStatus {
    CbOk = 0,
    CbNullPointer = 1,
    CbInvalidArgument = 2,
    /// Quadrature, fit or root-finding failure.
    CbNumerical = 3,
    /// The solver stopped above its gradient tolerance or lost the
    /// requested nodal structure.
    CbNoConvergence = 4,
    /// The handle has no solution yet.
    CbNotSolved = 5,
    /// Output buffer too small.
    CbBufferTooSmall = 6,
    CbPanic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> CbStatus {
    match err {
        Error::Dimension { .. } | Error::Parameter { .. } | Error::Mismatch { .. } => {
            CbStatus::CbInvalidArgument
        }
        Error::NoConvergence { .. } | Error::NodalStructure { .. } | Error::TrivialSolution => {
            CbStatus::CbNoConvergence
        }
        _ => CbStatus::CbNumerical,
    }
}

fn fail(err: Error) -> CbStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn guarded(f: impl FnOnce() -> CbStatus) -> CbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == CbStatus::CbOk {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => {
            set_error("internal panic");
            CbStatus::CbPanic
        }
    }
}

macro_rules! out_ptr {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(p) => p,
            None => {
                set_error(concat!("null pointer: ", stringify!($p)));
                return CbStatus::CbNullPointer;
            }
        }
    };
}

fn dim_of(dim: u32) -> usize {
    dim as usize
}

fn bubble_kind(kind: i32) -> Option<BubbleKind> {
    match kind {
        CB_BUBBLE_INTERIOR => Some(BubbleKind::Interior),
        CB_BUBBLE_TRACE => Some(BubbleKind::Trace),
        CB_BUBBLE_CORNER => Some(BubbleKind::Corner),
        _ => None,
    }
}

fn gap_regime(regime: i32) -> Option<GapRegime> {
    match regime {
        CB_REGIME_VOLUME_CRITICAL => Some(GapRegime::VolCrit),
        CB_REGIME_TRACE_CRITICAL => Some(GapRegime::TraceCrit),
        CB_REGIME_DOUBLE_CRITICAL => Some(GapRegime::DoubleCrit),
        _ => None,
    }
}

/// Message of the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cb_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Best Sobolev constant `S` and trace constant `S_T` in dimension `dim`.
///
/// # Safety
/// `s` and `s_trace` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_sobolev_constants(
    dim: u32,
    s: *mut f64,
    s_trace: *mut f64,
) -> CbStatus {
    guarded(|| {
        let s = out_ptr!(s);
        let s_trace = out_ptr!(s_trace);
        match sobolev_constants(dim_of(dim)) {
            Ok(c) => {
                *s = c.s;
                *s_trace = c.s_trace;
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Energy of the doubly critical half-space bubble.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_ground_state_level(dim: u32, out: *mut f64) -> CbStatus {
    guarded(|| {
        let out = out_ptr!(out);
        match ground_state_level(dim_of(dim)) {
            Ok(v) => {
                *out = v;
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Value of a bubble (`CB_BUBBLE_*`) of scale `eps` at a point of the
/// closed upper half-space; `point` holds `dim` coordinates, `x_N` last.
///
/// # Safety
/// `point` must be null or valid for `dim` reads; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cb_bubble_value(
    kind: i32,
    dim: u32,
    eps: f64,
    point: *const f64,
    out: *mut f64,
) -> CbStatus {
    guarded(|| {
        let out = out_ptr!(out);
        if point.is_null() {
            set_error("null pointer: point");
            return CbStatus::CbNullPointer;
        }
        let Some(kind) = bubble_kind(kind) else {
            set_error(format!("unknown bubble kind {kind}"));
            return CbStatus::CbInvalidArgument;
        };
        let dim = dim_of(dim);
        let point = std::slice::from_raw_parts(point, dim);
        match BubbleSpec::new(kind, dim, eps).and_then(|spec| eval_bubble(&spec, point)) {
            Ok(v) => {
                *out = v;
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Threshold gap of a regime (`CB_REGIME_*`) on the model domain with all
/// principal curvatures equal to `curvature` on a patch of radius
/// `patch_radius`, cut by the ball of radius `radius`. `subcritical` is
/// the non-critical exponent (ignored, pass NaN, for the doubly critical
/// regime).
///
/// # Safety
/// `t_eps` and `gap` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_threshold_gap(
    regime: i32,
    dim: u32,
    curvature: f64,
    patch_radius: f64,
    radius: f64,
    eps: f64,
    subcritical: f64,
    t_eps: *mut f64,
    gap: *mut f64,
) -> CbStatus {
    guarded(|| {
        let t_eps = out_ptr!(t_eps);
        let gap = out_ptr!(gap);
        let Some(regime) = gap_regime(regime) else {
            set_error(format!("unknown regime {regime}"));
            return CbStatus::CbInvalidArgument;
        };
        let dim = dim_of(dim);
        let sub = (regime != GapRegime::DoubleCrit).then_some(subcritical);
        let opts = GapOptions {
            radius,
            rule: SphereRule::Auto,
        };
        let run = || {
            let mut model = BoundaryModel::uniform(dim, curvature, patch_radius)?;
            if dim == 3 {
                model = model.with_curvature_bounds(curvature, curvature)?;
            }
            threshold_gap_with(regime, dim, &model, eps, sub, &opts)
        };
        match run() {
            Ok(g) => {
                *t_eps = g.t_eps;
                *gap = g.gap;
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Radial solver on a ball, holding its configuration and last solution.
pub struct CbSolver {
    config: SolverConfig,
    result: Option<MountainPassResult>,
}

/// Creates a solver for `-Δu + u = |u|^{r-2}u` in the ball of radius
/// `radius` with `∂u/∂ν = |u|^{q-2}u` on its boundary.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_new(
    dim: u32,
    radius: f64,
    r: f64,
    q: f64,
    mesh_cells: usize,
    tol: f64,
    out: *mut *mut CbSolver,
) -> CbStatus {
    guarded(|| {
        let out = out_ptr!(out);
        *out = std::ptr::null_mut();
        match SolverConfig::new(dim_of(dim), radius, r, q, mesh_cells, tol) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(CbSolver {
                    config,
                    result: None,
                }));
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `solver` must be null or a handle from [`cb_solver_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_free(solver: *mut CbSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Computes the least-energy radial solution with `nodes` sign changes
/// (0 for the ground state) and stores it in the handle.
///
/// # Safety
/// `solver` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_solve(solver: *mut CbSolver, nodes: u32) -> CbStatus {
    guarded(|| {
        let solver = out_ptr!(solver);
        solver.result = None;
        match find_excited_state(&solver.config, nodes as usize) {
            Ok(res) => {
                solver.result = Some(res);
                CbStatus::CbOk
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn solved<'a>(solver: *const CbSolver) -> Result<&'a MountainPassResult, CbStatus> {
    let Some(solver) = solver.as_ref() else {
        set_error("null pointer: solver");
        return Err(CbStatus::CbNullPointer);
    };
    solver.result.as_ref().ok_or_else(|| {
        set_error("no solution computed yet");
        CbStatus::CbNotSolved
    })
}

/// Energy level, dual gradient norm and sign-change count of the stored
/// solution. Any output pointer may be null.
///
/// # Safety
/// `solver` must be null or a live handle; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_summary(
    solver: *const CbSolver,
    level: *mut f64,
    grad_norm: *mut f64,
    sign_changes: *mut u32,
) -> CbStatus {
    guarded(|| {
        let res = match solved(solver) {
            Ok(r) => r,
            Err(s) => return s,
        };
        if let Some(p) = level.as_mut() {
            *p = res.level;
        }
        if let Some(p) = grad_norm.as_mut() {
            *p = res.grad_norm;
        }
        if let Some(p) = sign_changes.as_mut() {
            *p = res.sign_changes as u32;
        }
        CbStatus::CbOk
    })
}

/// Number of mesh nodes of the stored solution.
///
/// # Safety
/// `solver` must be null or a live handle; `len` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_len(solver: *const CbSolver, len: *mut usize) -> CbStatus {
    guarded(|| {
        let len = out_ptr!(len);
        match solved(solver) {
            Ok(res) => {
                *len = res.nodes.len();
                CbStatus::CbOk
            }
            Err(s) => s,
        }
    })
}

/// Copies the radii and nodal values of the stored solution into buffers
/// of capacity `cap`.
///
/// # Safety
/// `solver` must be null or a live handle; `rho` and `u` null or valid for
/// `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn cb_solver_copy_solution(
    solver: *const CbSolver,
    rho: *mut f64,
    u: *mut f64,
    cap: usize,
) -> CbStatus {
    guarded(|| {
        let res = match solved(solver) {
            Ok(r) => r,
            Err(s) => return s,
        };
        if rho.is_null() || u.is_null() {
            set_error("null pointer: output buffer");
            return CbStatus::CbNullPointer;
        }
        let n = res.nodes.len();
        if cap < n {
            set_error(format!("buffer holds {cap} values, solution has {n}"));
            return CbStatus::CbBufferTooSmall;
        }
        std::slice::from_raw_parts_mut(rho, n).copy_from_slice(&res.nodes);
        std::slice::from_raw_parts_mut(u, n).copy_from_slice(&res.field.values);
        CbStatus::CbOk
    })
}
