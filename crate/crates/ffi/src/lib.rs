//! C ABI over the core library: opaque model handles, status codes, and a
//! thread-local last-error message. The header is generated into
//! `include/stratclass.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stratclass_core::dist::{CostDiffDistribution, FeatureDistribution};
use stratclass_core::oracle::{simulate, SimOptions};
use stratclass_core::policy::{
    decomposition, nonstrategic_utility, optimize, optimize_nonstrategic, strategic_utility,
    PreferenceWeights,
};
use stratclass_core::{PopulationModel, PopulationSpec};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    InvalidArgument = 1,
    InvalidModel = 2,
    IllPosed = 3,
    Internal = 4,
}

/// Opaque population model handle.
pub struct ScModel(PopulationModel);

/// Simulation flag: every manipulator is caught.
pub const SC_SIM_AUDIT_EVERYONE: u32 = 1;
/// Simulation flag: agents never manipulate.
pub const SC_SIM_MANIPULATION_DISABLED: u32 = 2;

/// Aggregate outcome of one simulated round.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct ScSimulationSummary {
    pub manipulation_rate: f64,
    pub mean_utility: f64,
    pub post_qualification_rate: f64,
    pub caught_rate_unqualified: f64,
    pub caught_rate_population: f64,
    pub acceptance_rate: f64,
}

/// Copies the most recent error message on this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in
/// bytes, or 0 when no error is recorded.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be NULL with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn sc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let guard = e.borrow();
        let Some(msg) = guard.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), n);
            // keep the copy NUL terminated even when truncated
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Builds a Gaussian-family model. Pass NaN for both bounds to use the
/// default search interval. Returns NULL on failure (see `sc_last_error`).
#[no_mangle]
pub extern "C" fn sc_model_new_gaussian(
    alpha: f64,
    q: f64,
    eps: f64,
    u: f64,
    p1_mean: f64,
    p1_std: f64,
    p0_mean: f64,
    p0_std: f64,
    pi_mean: f64,
    pi_std: f64,
    cost_mean: f64,
    cost_std: f64,
    theta_lo: f64,
    theta_hi: f64,
) -> *mut ScModel {
    let build = || -> Result<PopulationModel, String> {
        let spec = PopulationSpec {
            alpha,
            p1: FeatureDistribution::gaussian(p1_mean, p1_std).map_err(|e| e.to_string())?,
            p0: FeatureDistribution::gaussian(p0_mean, p0_std).map_err(|e| e.to_string())?,
            p_improved: FeatureDistribution::gaussian(pi_mean, pi_std)
                .map_err(|e| e.to_string())?,
            cost_diff: CostDiffDistribution::gaussian(cost_mean, cost_std)
                .map_err(|e| e.to_string())?,
            q,
            eps,
            u,
            theta_bounds: if theta_lo.is_nan() && theta_hi.is_nan() {
                None
            } else {
                Some((theta_lo, theta_hi))
            },
        };
        spec.build().map_err(|e| e.to_string())
    };
    match catch_unwind(build) {
        Ok(Ok(model)) => Box::into_raw(Box::new(ScModel(model))),
        Ok(Err(msg)) => {
            set_error(msg);
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic".into());
            ptr::null_mut()
        }
    }
}

/// Frees a model handle. NULL is ignored.
///
/// # Safety
/// `model` must be a pointer returned by a constructor and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sc_model_free(model: *mut ScModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn eval_scalar(
    model: *const ScModel,
    theta: f64,
    out: *mut f64,
    f: impl Fn(&PopulationModel, f64) -> f64,
) -> ScStatus {
    if model.is_null() || out.is_null() {
        set_error("NULL pointer argument".into());
        return ScStatus::InvalidArgument;
    }
    if !theta.is_finite() {
        set_error(format!("theta must be finite, got {theta}"));
        return ScStatus::InvalidArgument;
    }
    let model = &(*model).0;
    match catch_unwind(AssertUnwindSafe(|| f(model, theta))) {
        Ok(v) => {
            *out = v;
            ScStatus::Ok
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Internal
        }
    }
}

/// Cost-free utility gap between manipulation and improvement.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_net_gap(model: *const ScModel, theta: f64, out: *mut f64) -> ScStatus {
    eval_scalar(model, theta, out, |m, t| m.net_gap(t))
}

/// Probability that an unqualified agent manipulates at `theta`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_manipulation_probability(
    model: *const ScModel,
    theta: f64,
    out: *mut f64,
) -> ScStatus {
    eval_scalar(model, theta, out, |m, t| m.manipulation_probability(t))
}

/// Decision-maker utility ignoring strategic behavior.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_nonstrategic_utility(
    model: *const ScModel,
    theta: f64,
    out: *mut f64,
) -> ScStatus {
    eval_scalar(model, theta, out, nonstrategic_utility)
}

/// Decision-maker utility against best-responding agents.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_strategic_utility(
    model: *const ScModel,
    theta: f64,
    out: *mut f64,
) -> ScStatus {
    eval_scalar(model, theta, out, strategic_utility)
}

/// The three decomposition terms at `theta`.
///
/// # Safety
/// `model` must be a live handle; `phi1`, `phi2`, `phi3` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_decomposition(
    model: *const ScModel,
    theta: f64,
    phi1: *mut f64,
    phi2: *mut f64,
    phi3: *mut f64,
) -> ScStatus {
    if phi1.is_null() || phi2.is_null() || phi3.is_null() {
        set_error("NULL pointer argument".into());
        return ScStatus::InvalidArgument;
    }
    let mut tmp = 0.0;
    let status = eval_scalar(model, theta, &mut tmp, |m, t| {
        let d = decomposition(m, t);
        unsafe {
            *phi1 = d.phi1;
            *phi2 = d.phi2;
        }
        d.phi3
    });
    if status == ScStatus::Ok {
        *phi3 = tmp;
    }
    status
}

/// Maximizes the adjusted objective; writes the optimal threshold and the
/// actual (strategic) utility there.
///
/// # Safety
/// `model` must be a live handle; `out_theta`, `out_utility` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_optimize(
    model: *const ScModel,
    k1: f64,
    k2: f64,
    k3: f64,
    out_theta: *mut f64,
    out_utility: *mut f64,
) -> ScStatus {
    if model.is_null() || out_theta.is_null() || out_utility.is_null() {
        set_error("NULL pointer argument".into());
        return ScStatus::InvalidArgument;
    }
    let weights = match PreferenceWeights::new(k1, k2, k3) {
        Ok(w) => w,
        Err(e) => {
            set_error(e.to_string());
            return ScStatus::InvalidArgument;
        }
    };
    let m = &(*model).0;
    match catch_unwind(AssertUnwindSafe(|| optimize(m, weights))) {
        Ok(r) => {
            *out_theta = r.theta_star;
            *out_utility = r.actual_utility;
            ScStatus::Ok
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Internal
        }
    }
}

/// Maximizes the non-strategic objective; writes the optimal threshold and
/// the actual (strategic) utility there.
///
/// # Safety
/// `model` must be a live handle; `out_theta`, `out_utility` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_optimize_nonstrategic(
    model: *const ScModel,
    out_theta: *mut f64,
    out_utility: *mut f64,
) -> ScStatus {
    if model.is_null() || out_theta.is_null() || out_utility.is_null() {
        set_error("NULL pointer argument".into());
        return ScStatus::InvalidArgument;
    }
    let m = &(*model).0;
    match catch_unwind(AssertUnwindSafe(|| optimize_nonstrategic(m))) {
        Ok(r) => {
            *out_theta = r.theta_star;
            *out_utility = r.actual_utility;
            ScStatus::Ok
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Internal
        }
    }
}

/// Simulates `n` agents at `theta` with the given flag bitmask
/// (`SC_SIM_*`). Deterministic for a fixed seed.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_simulate(
    model: *const ScModel,
    theta: f64,
    n: usize,
    seed: u64,
    flags: u32,
    out: *mut ScSimulationSummary,
) -> ScStatus {
    if model.is_null() || out.is_null() {
        set_error("NULL pointer argument".into());
        return ScStatus::InvalidArgument;
    }
    if n == 0 || !theta.is_finite() {
        set_error("need n >= 1 and finite theta".into());
        return ScStatus::InvalidArgument;
    }
    let m = &(*model).0;
    let options = SimOptions {
        audit_everyone: flags & SC_SIM_AUDIT_EVERYONE != 0,
        manipulation_disabled: flags & SC_SIM_MANIPULATION_DISABLED != 0,
        record_samples: false,
    };
    match catch_unwind(AssertUnwindSafe(|| simulate(m, theta, n, seed, options))) {
        Ok(r) => {
            *out = ScSimulationSummary {
                manipulation_rate: r.manipulation_rate,
                mean_utility: r.mean_utility,
                post_qualification_rate: r.post_qualification_rate,
                caught_rate_unqualified: r.caught_rate_unqualified,
                caught_rate_population: r.caught_rate_population,
                acceptance_rate: r.acceptance_rate,
            };
            ScStatus::Ok
        }
        Err(_) => {
            set_error("internal panic".into());
            ScStatus::Internal
        }
    }
}
