//! C interface to `sobolev-stab`.
//!
//! Every fallible function returns an [`SsStatus`]; on failure the message is kept per thread and
//! can be read with [`ss_last_error`]. Handles are opaque and must be released with their `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use sobolev_stab::cli::{execute, Command, RunConfig};
use sobolev_stab::functionals::deficit;
use sobolev_stab::inequalities::{required_constant, GridSpec, InequalityId, InequalitySpec};
use sobolev_stab::integrate::{build_rule_with_angular, QuadratureRule};
use sobolev_stab::spectrum::{solve_channel, FormKind, MeshSpec, SLChannel};
use sobolev_stab::zonal::{BumpProfile, ZonalField};
use sobolev_stab::{Error, Params};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Configuration = 3,
    Construction = 4,
    Evaluation = 5,
    Eigen = 6,
    NonConvergence = 7,
    Parse = 8,
    Io = 9,
    /// Any other library error.
    Failed = 10,
    /// A Rust panic was caught at the boundary.
    Panic = 11,
    /// A report was produced but at least one of its checks failed.
    CheckFailed = 12,
}

impl From<&Error> for SsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => SsStatus::Domain,
            Error::Configuration(_) | Error::MeshInadequate(_) | Error::GridTooCoarse(_) => SsStatus::Configuration,
            Error::Construction(_) => SsStatus::Construction,
            Error::Evaluation(_) | Error::NormMismatch(_) => SsStatus::Evaluation,
            Error::Eigen(_) => SsStatus::Eigen,
            Error::NonConvergence { .. } => SsStatus::NonConvergence,
            Error::Parse { .. } => SsStatus::Parse,
            Error::Io(_) => SsStatus::Io,
            Error::Fit(_) => SsStatus::Failed,
        }
    }
}

/// The elementary inequalities, in the order of the library's `InequalityId::ALL`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsInequality {
    Num1 = 0,
    Num2 = 1,
    Num3 = 2,
    Num4 = 3,
    Num4Reverse = 4,
}

impl From<SsInequality> for InequalityId {
    fn from(id: SsInequality) -> Self {
        match id {
            SsInequality::Num1 => InequalityId::Num1,
            SsInequality::Num2 => InequalityId::Num2,
            SsInequality::Num3 => InequalityId::Num3,
            SsInequality::Num4 => InequalityId::Num4,
            SsInequality::Num4Reverse => InequalityId::Num4Reverse,
        }
    }
}

/// Derived constants of an admissible (n, p).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SsConstants {
    pub sharp_constant: f64,
    /// The sharp constant to the power p.
    pub sharp_constant_pow_p: f64,
    pub kappa0: f64,
    pub pstar: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Far-field decay exponent of the extremal.
    pub decay_rate: f64,
}

/// Opaque (n, p) handle.
pub struct SsParams(Params);

/// Opaque quadrature rule handle, tied to the params it was built for.
pub struct SsRule {
    params: Params,
    rule: QuadratureRule,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), (SsStatus, String)>>(f: F) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside sobolev-stab".into());
            SsStatus::Panic
        }
    }
}

fn lib(e: Error) -> (SsStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(what: &str) -> (SsStatus, String) {
    (SsStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failure on this thread, or an empty string. Valid until the next call on
/// this thread; do not free it.
#[no_mangle]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ss_params_new(n: usize, p: f64, out: *mut *mut SsParams) -> SsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let params = Params::new(n, p).map_err(lib)?;
        *out = Box::into_raw(Box::new(SsParams(params)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from [`ss_params_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_params_free(params: *mut SsParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_params_constants(params: *const SsParams, out: *mut SsConstants) -> SsStatus {
    guard(|| {
        let q = &params.as_ref().ok_or_else(|| null("params"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SsConstants {
            sharp_constant: q.s,
            sharp_constant_pow_p: q.sp,
            kappa0: q.kappa0,
            pstar: q.pstar,
            alpha1: q.alpha1,
            alpha2: q.alpha2,
            decay_rate: q.decay_rate(),
        };
        Ok(())
    })
}

/// Builds a quadrature rule; `angular` is the number of Gauss nodes in the polar angle.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_rule_new(
    params: *const SsParams,
    count: usize,
    rmax: f64,
    angular: usize,
    out: *mut *mut SsRule,
) -> SsStatus {
    guard(|| {
        let q = params.as_ref().ok_or_else(|| null("params"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rule = build_rule_with_angular(&q, count, rmax, angular).map_err(lib)?;
        *out = Box::into_raw(Box::new(SsRule { params: q, rule }));
        Ok(())
    })
}

/// # Safety
/// `rule` must be null or a handle from [`ss_rule_new`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ss_rule_free(rule: *mut SsRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Deficit of the unit extremal plus `eps` times a smooth bump of the given radius and spherical
/// degree, integrated with `rule`.
///
/// # Safety
/// `rule` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_bump_deficit(
    rule: *const SsRule,
    eps: f64,
    radius: f64,
    degree: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let r = rule.as_ref().ok_or_else(|| null("rule"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(radius > 0.0 && radius.is_finite() && eps.is_finite()) {
            return Err((SsStatus::Domain, "need a finite eps and a positive radius".into()));
        }
        let q = &r.params;
        let bump = ZonalField::empty(q.n).with_term(1.0, Arc::new(BumpProfile { radius, power: 0 }), degree, 0.0);
        let u = ZonalField::bubble(q, 1.0, 1.0, 0.0).plus(eps, &bump);
        *out = deficit(&u, q, &r.rule).map_err(lib)?;
        Ok(())
    })
}

/// Lowest `count` eigenvalues of the linearized operator in spherical degree `degree`, on a mesh
/// of `elements` finite elements; written to `out[0..count]`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for `count` writes.
#[no_mangle]
pub unsafe extern "C" fn ss_channel_eigenvalues(
    params: *const SsParams,
    degree: usize,
    elements: usize,
    count: usize,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let q = &params.as_ref().ok_or_else(|| null("params"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let mesh = MeshSpec { elements, ..MeshSpec::default() };
        let channel = SLChannel::new(q, degree, FormKind::Linearized, mesh).map_err(lib)?;
        let pairs = solve_channel(&channel, count).map_err(lib)?;
        let dst = std::slice::from_raw_parts_mut(out, count);
        for (d, pair) in dst.iter_mut().zip(&pairs) {
            *d = pair.alpha;
        }
        Ok(())
    })
}

/// Empirical lower bound on the admissible constant of one elementary inequality. `kappa` is
/// ignored by the inequalities that do not take it.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ss_required_constant(
    id: SsInequality,
    n: usize,
    p: f64,
    kappa: f64,
    out: *mut f64,
) -> SsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = InequalitySpec::new(id.into(), p, n, Some(kappa)).map_err(lib)?;
        *out = required_constant(&spec, &GridSpec::default()).map_err(lib)?;
        Ok(())
    })
}

/// Runs a CLI subcommand (`"constants"`, `"spectrum"`, ..., `"all"`) with a `key = value` config
/// text and writes its report files. Returns [`SsStatus::CheckFailed`] if any check failed.
///
/// # Safety
/// `command` must be a NUL-terminated string; `config` may be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ss_run(command: *const c_char, config: *const c_char) -> SsStatus {
    guard(|| {
        if command.is_null() {
            return Err(null("command"));
        }
        let name = CStr::from_ptr(command).to_str().map_err(|e| (SsStatus::Parse, e.to_string()))?;
        let cmd = Command::EACH
            .iter()
            .chain(std::iter::once(&Command::All))
            .find(|c| c.name() == name)
            .copied()
            .ok_or_else(|| (SsStatus::Parse, format!("unknown command `{name}`")))?;
        let mut cfg = RunConfig::default();
        if !config.is_null() {
            let text = CStr::from_ptr(config).to_str().map_err(|e| (SsStatus::Parse, e.to_string()))?;
            cfg.apply_text(text).map_err(lib)?;
        }
        cfg.validate().map_err(lib)?;
        let (reports, _) = execute(cmd, &cfg).map_err(lib)?;
        let failed: Vec<String> =
            reports.iter().flat_map(|r| r.checks.iter()).filter(|c| !c.pass).map(|c| c.line()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err((SsStatus::CheckFailed, failed.join("\n")))
        }
    })
}
