//! The Dikin walk: lazy coin, Gaussian proposal with inverse-Hessian
//! covariance, membership check, Metropolis filter.
//!
//! One chain is strictly sequential; independent chains with distinct
//! RNG streams parallelize freely. The RNG lives inside `ChainState` so
//! a run is replayable from (spec, config, seed) alone.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::sync::Arc;

use crate::barrier::{self, BarrierEval};
use crate::body::{BarrierWeights, BodySpec};
use crate::error::{Error, Result};
use crate::linalg::{self, HessianFactor};

/// Step-radius default `r = 1/20`.
pub const DEFAULT_RADIUS: f64 = 0.05;
/// Largest radius inside the Gaussian tail-estimate regime.
pub const MAX_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Walk configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ChainConfig {
    /// Dikin step radius `r`.
    pub radius: f64,
    /// Probability of staying put each step.
    pub laziness: f64,
    pub seed: u64,
    pub max_steps: u64,
    pub burn_in: u64,
    /// Emit every `thinning`-th post-burn-in point.
    pub thinning: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            radius: DEFAULT_RADIUS,
            laziness: 0.5,
            seed: 0,
            max_steps: 10_000,
            burn_in: 0,
            thinning: 1,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= MAX_RADIUS) {
            return Err(Error::InvalidConfig(format!(
                "radius must lie in (0, 1/√2]; got {}",
                self.radius
            )));
        }
        if !(0.0..=1.0).contains(&self.laziness) {
            return Err(Error::InvalidConfig("laziness must lie in [0, 1]".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning stride must be positive".into()));
        }
        Ok(())
    }
}

/// Anything the walk can run on: a membership test plus a barrier
/// evaluation with a positive-definite Hessian.
pub trait BarrierModel {
    fn dim(&self) -> usize;
    fn contains(&self, x: &DVector<f64>) -> bool;
    fn eval(&self, x: &DVector<f64>) -> Result<(BarrierEval, HessianFactor)>;
}

/// The weighted aggregate barrier of a body spec.
#[derive(Clone)]
pub struct AggregateModel {
    spec: Arc<BodySpec>,
    weights: BarrierWeights,
}

impl AggregateModel {
    pub fn new(spec: Arc<BodySpec>, weights: BarrierWeights) -> Self {
        AggregateModel { spec, weights }
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }
}

impl BarrierModel for AggregateModel {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        self.spec.contains(x)
    }

    fn eval(&self, x: &DVector<f64>) -> Result<(BarrierEval, HessianFactor)> {
        barrier::aggregate_eval_with_factor(&self.spec, &self.weights, x)
    }
}

/// How a step ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    /// The lazy coin came up heads; no proposal drawn.
    Lazy,
    /// Proposal fell outside the body.
    Outside,
    /// Proposal was interior but the filter rejected it.
    Filtered,
    Accepted,
}

/// Per-step accounting for diagnostics.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub outcome: StepOutcome,
    pub proposal: Option<DVector<f64>>,
    /// `ln G_x(z)` of the drawn proposal.
    pub log_gx_z: Option<f64>,
    /// `ln G_z(x)`; present only when the proposal was interior.
    pub log_gz_x: Option<f64>,
    /// Local step length `‖x−z‖_x`.
    pub step_local_norm: Option<f64>,
}

impl StepRecord {
    fn trivial(outcome: StepOutcome) -> Self {
        StepRecord {
            outcome,
            proposal: None,
            log_gx_z: None,
            log_gz_x: None,
            step_local_norm: None,
        }
    }
}

/// `ln G_x(z) = (n/2) ln(n/(πr²)) − n‖x−z‖²_x / r² + V(x)`.
///
/// `eval_at` must be the barrier evaluation at `x`. Defined for any `z`
/// (the raw Gaussian density); membership is the walk's business.
pub fn log_proposal_density(
    eval_at: &BarrierEval,
    x: &DVector<f64>,
    z: &DVector<f64>,
    radius: f64,
) -> f64 {
    let n = x.len() as f64;
    let quad = linalg::local_norm_sq(&eval_at.hessian, &(z - x));
    0.5 * n * (n / (std::f64::consts::PI * radius * radius)).ln()
        - n * quad / (radius * radius)
        + eval_at.vterm
}

/// Walk state: the current point with its cached barrier evaluation and
/// factorization, plus the RNG.
pub struct ChainState<M: BarrierModel> {
    model: M,
    config: ChainConfig,
    x: DVector<f64>,
    eval: BarrierEval,
    factor: HessianFactor,
    steps_taken: u64,
    rng: ChaCha8Rng,
}

impl<M: BarrierModel> ChainState<M> {
    pub fn new(model: M, config: ChainConfig, start: DVector<f64>) -> Result<Self> {
        config.validate()?;
        if start.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                context: "chain start",
                expected: model.dim(),
                found: start.len(),
            });
        }
        if !model.contains(&start) {
            return Err(Error::InfeasiblePoint { what: "the body (chain start)" });
        }
        let (eval, factor) = model.eval(&start)?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(ChainState {
            model,
            config,
            x: start,
            eval,
            factor,
            steps_taken: 0,
            rng,
        })
    }

    pub fn position(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn eval(&self) -> &BarrierEval {
        &self.eval
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    /// Draws `z = x + (r/√(2n)) L⁻ᵀ g`, the Gaussian with density `G_x`.
    pub fn propose(&mut self) -> DVector<f64> {
        let n = self.model.dim();
        let g = DVector::from_fn(n, |_, _| self.rng.sample::<f64, _>(StandardNormal));
        let scale = self.config.radius / (2.0 * n as f64).sqrt();
        &self.x + self.factor.whiten_inverse(&g) * scale
    }

    /// One step of the walk.
    pub fn metropolis_step(&mut self) -> Result<StepRecord> {
        self.steps_taken += 1;
        if self.rng.random::<f64>() < self.config.laziness {
            return Ok(StepRecord::trivial(StepOutcome::Lazy));
        }
        let z = self.propose();
        let log_gx_z = log_proposal_density(&self.eval, &self.x, &z, self.config.radius);
        let step_norm = linalg::local_norm(&self.eval.hessian, &(&z - &self.x));
        if !self.model.contains(&z) {
            return Ok(StepRecord {
                outcome: StepOutcome::Outside,
                proposal: Some(z),
                log_gx_z: Some(log_gx_z),
                log_gz_x: None,
                step_local_norm: Some(step_norm),
            });
        }
        let (eval_z, factor_z) = self.model.eval(&z)?;
        let log_gz_x = log_proposal_density(&eval_z, &z, &self.x, self.config.radius);
        let log_ratio = log_gz_x - log_gx_z;
        let u: f64 = self.rng.random();
        let accepted = u.ln() < log_ratio;
        let record = StepRecord {
            outcome: if accepted {
                StepOutcome::Accepted
            } else {
                StepOutcome::Filtered
            },
            proposal: Some(z.clone()),
            log_gx_z: Some(log_gx_z),
            log_gz_x: Some(log_gz_x),
            step_local_norm: Some(step_norm),
        };
        if accepted {
            self.x = z;
            self.eval = eval_z;
            self.factor = factor_z;
            debug_assert!(self.model.contains(&self.x), "accepted an infeasible point");
        }
        Ok(record)
    }
}

/// Aggregate counts of a finished run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub steps: u64,
    pub accepted: u64,
    pub outside: u64,
    pub lazy: u64,
    pub filtered: u64,
    /// Accepted fraction of the non-lazy steps.
    pub acceptance_rate: f64,
    /// Mean `‖x−z‖_x` over accepted steps.
    pub mean_step_local_norm: f64,
}

/// A finished run: thinned samples plus the summary.
pub struct ChainRun {
    pub samples: Vec<DVector<f64>>,
    pub summary: RunSummary,
}

/// Runs `config.max_steps` Metropolis steps from `start`, emitting every
/// `thinning`-th point after `burn_in`.
pub fn run_chain(
    spec: &BodySpec,
    weights: &BarrierWeights,
    config: &ChainConfig,
    start: &DVector<f64>,
) -> Result<ChainRun> {
    let model = AggregateModel::new(Arc::new(spec.clone()), *weights);
    let mut state = ChainState::new(model, config.clone(), start.clone())?;
    let mut samples = Vec::new();
    let mut accepted = 0u64;
    let mut outside = 0u64;
    let mut lazy = 0u64;
    let mut filtered = 0u64;
    let mut norm_sum = 0.0;
    for step in 1..=config.max_steps {
        let record = state.metropolis_step()?;
        match record.outcome {
            StepOutcome::Lazy => lazy += 1,
            StepOutcome::Outside => outside += 1,
            StepOutcome::Filtered => filtered += 1,
            StepOutcome::Accepted => {
                accepted += 1;
                norm_sum += record.step_local_norm.unwrap_or(0.0);
            }
        }
        if step > config.burn_in && (step - config.burn_in) % config.thinning == 0 {
            samples.push(state.position().clone());
        }
    }
    let non_lazy = config.max_steps - lazy;
    let summary = RunSummary {
        schema_version: 1,
        steps: config.max_steps,
        accepted,
        outside,
        lazy,
        filtered,
        acceptance_rate: if non_lazy > 0 {
            accepted as f64 / non_lazy as f64
        } else {
            0.0
        },
        mean_step_local_norm: if accepted > 0 {
            norm_sum / accepted as f64
        } else {
            0.0
        },
    };
    Ok(ChainRun { samples, summary })
}
