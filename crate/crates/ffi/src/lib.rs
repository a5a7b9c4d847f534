//! C ABI over the sampler and optimizer: opaque handles, integer status
//! codes, flat `f64` buffers. The generated header lands in
//! `include/dikin.h`.
//!
//! Conventions: every function returns a [`DikinStatus`]; outputs go
//! through pointers supplied by the caller; a failing call leaves a
//! message retrievable with [`dikin_last_error_message`] on the same
//! thread. Handles are freed with their matching `_free` function and
//! must not be used across a free.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use nalgebra::DVector;

use dikin_core::body::BodySpec;
use dikin_core::chain::{AggregateModel, ChainConfig, ChainState, StepOutcome};
use dikin_core::error::Error;
use dikin_core::optimizer::{las_vegas_optimize, HatWalkConfig, OptimizeStatus, OptimizerConfig};

/// Status code of every FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DikinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Infeasible = 4,
    NumericFailure = 5,
    BudgetExhausted = 6,
    InternalPanic = 7,
}

/// Outcome tag of one walk step.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DikinStepOutcome {
    Lazy = 0,
    Outside = 1,
    Filtered = 2,
    Accepted = 3,
}

/// Result block of one optimization run.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DikinOptimizeResult {
    /// 1 when the stopping rule fired, 0 on budget exhaustion.
    pub success: u8,
    pub objective_value: f64,
    pub steps_used: u64,
    pub tau_budget: u64,
    pub hard_cap: u64,
}

/// Opaque body handle.
pub struct DikinBody {
    spec: Arc<BodySpec>,
}

/// Opaque chain handle.
pub struct DikinChain {
    state: ChainState<AggregateModel>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> DikinStatus {
    match err {
        Error::Json(_) | Error::InvalidSpec { .. } => DikinStatus::ParseError,
        Error::InvalidConfig(_)
        | Error::DimensionMismatch { .. }
        | Error::TooFewSamples { .. }
        | Error::Io(_) => DikinStatus::InvalidArgument,
        Error::InfeasiblePoint { .. } | Error::StepTooLarge => DikinStatus::Infeasible,
        Error::Numeric(_) | Error::UnboundedBody(_) | Error::ProjectiveDomain(_) => {
            DikinStatus::NumericFailure
        }
    }
}

fn fail(err: &Error) -> DikinStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guarded<F: FnOnce() -> DikinStatus>(f: F) -> DikinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            DikinStatus::InternalPanic
        }
    }
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dikin_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a body-spec JSON document into a new handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn dikin_body_parse_json(
    json: *const c_char,
    out: *mut *mut DikinBody,
) -> DikinStatus {
    if json.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| {
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("body document is not valid UTF-8");
                return DikinStatus::ParseError;
            }
        };
        match dikin_core::body::parse_body_spec(text) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(DikinBody {
                    spec: Arc::new(spec),
                }));
                DikinStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Frees a body handle; a null pointer is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dikin_body_free(body: *mut DikinBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Ambient dimension of the body, 0 on a null handle.
#[no_mangle]
pub unsafe extern "C" fn dikin_body_dim(body: *const DikinBody) -> usize {
    if body.is_null() {
        return 0;
    }
    (*body).spec.dim()
}

/// Strict membership test of the `dim`-vector at `x`.
#[no_mangle]
pub unsafe extern "C" fn dikin_body_contains(
    body: *const DikinBody,
    x: *const f64,
    len: usize,
    out: *mut u8,
) -> DikinStatus {
    if body.is_null() || x.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| {
        let spec = &(*body).spec;
        let point = DVector::from_column_slice(std::slice::from_raw_parts(x, len));
        match spec.membership(&point) {
            Ok(inside) => {
                *out = inside as u8;
                DikinStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Complexity parameter of the body.
#[no_mangle]
pub unsafe extern "C" fn dikin_body_complexity_parameter(
    body: *const DikinBody,
    out: *mut f64,
) -> DikinStatus {
    if body.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    *out = dikin_core::barrier::complexity_parameter(&(*body).spec);
    DikinStatus::Ok
}

/// Aggregate barrier evaluation at `x`: value, and optionally gradient
/// (`len` doubles) and Hessian (`len²` doubles, row-major).
#[no_mangle]
pub unsafe extern "C" fn dikin_barrier_eval(
    body: *const DikinBody,
    x: *const f64,
    len: usize,
    out_value: *mut f64,
    out_gradient: *mut f64,
    out_hessian: *mut f64,
) -> DikinStatus {
    if body.is_null() || x.is_null() || out_value.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| {
        let spec = &(*body).spec;
        let point = DVector::from_column_slice(std::slice::from_raw_parts(x, len));
        if point.len() != spec.dim() {
            set_error("point has the wrong dimension");
            return DikinStatus::InvalidArgument;
        }
        match dikin_core::barrier::aggregate_barrier_eval(spec, &spec.weights(), &point) {
            Ok(eval) => {
                *out_value = eval.value;
                if !out_gradient.is_null() {
                    let dst = std::slice::from_raw_parts_mut(out_gradient, len);
                    dst.copy_from_slice(eval.gradient.as_slice());
                }
                if !out_hessian.is_null() {
                    let dst = std::slice::from_raw_parts_mut(out_hessian, len * len);
                    for i in 0..len {
                        for j in 0..len {
                            dst[i * len + j] = eval.hessian[(i, j)];
                        }
                    }
                }
                DikinStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Creates a walk over the body. `start` may be null for the origin.
#[no_mangle]
pub unsafe extern "C" fn dikin_chain_new(
    body: *const DikinBody,
    radius: f64,
    laziness: f64,
    seed: u64,
    start: *const f64,
    out: *mut *mut DikinChain,
) -> DikinStatus {
    if body.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| {
        let spec = Arc::clone(&(*body).spec);
        let n = spec.dim();
        let start_vec = if start.is_null() {
            DVector::zeros(n)
        } else {
            DVector::from_column_slice(std::slice::from_raw_parts(start, n))
        };
        let config = ChainConfig {
            radius,
            laziness,
            seed,
            ..ChainConfig::default()
        };
        let weights = spec.weights();
        let model = AggregateModel::new(spec, weights);
        match ChainState::new(model, config, start_vec) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(DikinChain { state }));
                DikinStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Frees a chain handle; a null pointer is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dikin_chain_free(chain: *mut DikinChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Advances one step; reports the outcome tag.
#[no_mangle]
pub unsafe extern "C" fn dikin_chain_step(
    chain: *mut DikinChain,
    out_outcome: *mut DikinStepOutcome,
) -> DikinStatus {
    if chain.is_null() || out_outcome.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| match (*chain).state.metropolis_step() {
        Ok(record) => {
            *out_outcome = match record.outcome {
                StepOutcome::Lazy => DikinStepOutcome::Lazy,
                StepOutcome::Outside => DikinStepOutcome::Outside,
                StepOutcome::Filtered => DikinStepOutcome::Filtered,
                StepOutcome::Accepted => DikinStepOutcome::Accepted,
            };
            DikinStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Copies the current position into `out` (`dim` doubles).
#[no_mangle]
pub unsafe extern "C" fn dikin_chain_position(
    chain: *const DikinChain,
    out: *mut f64,
) -> DikinStatus {
    if chain.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    let position = (*chain).state.position();
    let dst = std::slice::from_raw_parts_mut(out, position.len());
    dst.copy_from_slice(position.as_slice());
    DikinStatus::Ok
}

/// Runs `count · thin` steps, writing every `thin`-th position into
/// `out` (`count × dim` doubles, row-major).
#[no_mangle]
pub unsafe extern "C" fn dikin_chain_sample(
    chain: *mut DikinChain,
    count: usize,
    thin: usize,
    out: *mut f64,
) -> DikinStatus {
    if chain.is_null() || out.is_null() {
        return DikinStatus::NullPointer;
    }
    if thin == 0 {
        set_error("thin must be positive");
        return DikinStatus::InvalidArgument;
    }
    guarded(|| {
        let state = &mut (*chain).state;
        let n = state.position().len();
        let dst = std::slice::from_raw_parts_mut(out, count * n);
        for k in 0..count {
            for _ in 0..thin {
                if let Err(err) = state.metropolis_step() {
                    return fail(&err);
                }
            }
            dst[k * n..(k + 1) * n].copy_from_slice(state.position().as_slice());
        }
        DikinStatus::Ok
    })
}

/// Maximizes `cᵀx` over the body by the projective walk. `hard_cap` of 0
/// resolves to ten times the step budget. On success and on budget
/// exhaustion alike, `out_x` receives the returned point.
#[no_mangle]
pub unsafe extern "C" fn dikin_optimize(
    body: *const DikinBody,
    objective: *const f64,
    len: usize,
    epsilon: f64,
    delta: f64,
    centrality: f64,
    seed: u64,
    radius: f64,
    j_cap: f64,
    budget_c1: f64,
    budget_c2: f64,
    hard_cap: u64,
    out_x: *mut f64,
    out_result: *mut DikinOptimizeResult,
) -> DikinStatus {
    if body.is_null() || objective.is_null() || out_x.is_null() || out_result.is_null() {
        return DikinStatus::NullPointer;
    }
    guarded(|| {
        let spec = &(*body).spec;
        let c = DVector::from_column_slice(std::slice::from_raw_parts(objective, len));
        let mut opt = OptimizerConfig::new(c, epsilon, delta, centrality);
        opt.budget_c1 = budget_c1;
        opt.budget_c2 = budget_c2;
        opt.hard_cap = (hard_cap > 0).then_some(hard_cap);
        let walk = HatWalkConfig {
            radius,
            seed,
            j_cap,
            ..HatWalkConfig::default()
        };
        match las_vegas_optimize(spec, &spec.weights(), &opt, &walk) {
            Ok(outcome) => {
                let dst = std::slice::from_raw_parts_mut(out_x, spec.dim());
                dst.copy_from_slice(outcome.x.as_slice());
                *out_result = DikinOptimizeResult {
                    success: (outcome.status == OptimizeStatus::Success) as u8,
                    objective_value: outcome.objective_value,
                    steps_used: outcome.steps_used,
                    tau_budget: outcome.tau_budget,
                    hard_cap: outcome.hard_cap,
                };
                if outcome.status == OptimizeStatus::BudgetExhausted {
                    set_error("step budget exhausted before the stopping rule fired");
                    DikinStatus::BudgetExhausted
                } else {
                    DikinStatus::Ok
                }
            }
            Err(err) => fail(&err),
        }
    })
}
