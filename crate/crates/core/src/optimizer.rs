//! Linear optimization by a single random walk: projective transform
//! `T(x) = x/(1 − cᵀx)`, hat barriers on `K̂ = T(Q)`, the Dikin walk in
//! hat coordinates mapped back through `T⁻¹`, and the stopping rule
//! `cᵀx ≥ 1 − ε`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use std::sync::Arc;

use crate::barrier::{self, BarrierEval};
use crate::body::{BarrierWeights, BodySpec};
use crate::chain::{BarrierModel, ChainConfig, ChainState, DEFAULT_RADIUS};
use crate::error::{Error, Result};
use crate::linalg::HessianFactor;

/// Default cap constraint `cᵀy ≤ J` keeping the hat body bounded.
pub const DEFAULT_J_CAP: f64 = 1e6;

/// `T(x) = x / (1 − cᵀx)`; requires `cᵀx < 1`.
pub fn projective_map(c: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let denom = 1.0 - c.dot(x);
    if denom <= 0.0 {
        return Err(Error::ProjectiveDomain(format!(
            "cᵀx = {} is not below 1",
            c.dot(x)
        )));
    }
    Ok(x / denom)
}

/// `T⁻¹(y) = y / (1 + cᵀy)`; requires `1 + cᵀy > 0`.
pub fn projective_inverse(c: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let denom = 1.0 + c.dot(y);
    if denom <= 0.0 {
        return Err(Error::ProjectiveDomain(format!(
            "1 + cᵀy = {denom} is not positive"
        )));
    }
    Ok(y / denom)
}

/// Pushes a barrier evaluation at `x = y/(1+cᵀy)` through the projective
/// substitution, yielding the hat-barrier evaluation at `y`:
/// `F̂(y) = F(x(y)) − ν ln(1 + cᵀy)`.
///
/// For a hyperbolic (or logarithmic) part with parameter `ν` this is the
/// hat body's own barrier of the same class and parameter; on the
/// interval, for instance, it reproduces the hat polytope's log barrier
/// exactly.
pub fn hat_transform(
    base: &BarrierEval,
    x: &DVector<f64>,
    c: &DVector<f64>,
    t: f64,
    nu: f64,
) -> BarrierEval {
    let n = x.len();
    // J = (I − x cᵀ)/t, the Jacobian of y ↦ x.
    let mut jac = DMatrix::identity(n, n);
    jac.ger(-1.0, x, c, 1.0);
    jac /= t;

    let value = base.value - nu * t.ln();
    let gradient = jac.transpose() * &base.gradient - c * (nu / t);

    let mut hessian = jac.transpose() * &base.hessian * &jac;
    let gc = &base.gradient * c.transpose();
    hessian -= (&gc + gc.transpose()) / (t * t);
    let coeff = (2.0 * base.gradient.dot(x) + nu) / (t * t);
    hessian.ger(coeff, c, c, 1.0);
    crate::linalg::symmetrize(&mut hessian);

    BarrierEval {
        value,
        gradient,
        hessian,
        vterm: f64::NEG_INFINITY,
    }
}

/// Hat transform for a generic self-concordant part:
/// `F̂_s(y) = κ_s (F_s(x(y)) − 2ν_s ln(1 + cᵀy))` with the κ_s of the
/// conic-hull construction.
pub fn hat_generic_transform(
    base: &BarrierEval,
    x: &DVector<f64>,
    c: &DVector<f64>,
    t: f64,
    nu_s: f64,
) -> BarrierEval {
    let kappa = kappa_s(nu_s);
    let inner = hat_transform(base, x, c, t, 2.0 * nu_s);
    BarrierEval {
        value: kappa * inner.value,
        gradient: inner.gradient * kappa,
        hessian: inner.hessian * kappa,
        vterm: f64::NEG_INFINITY,
    }
}

/// Multiplier `κ_s = (8/(3√3) + (1/(2√ν_s)) (7/3)^{3/2})²` of the
/// generic hat construction.
pub fn kappa_s(nu_s: f64) -> f64 {
    let base = 8.0 / (3.0 * 3.0f64.sqrt()) + (7.0f64 / 3.0).powf(1.5) / (2.0 * nu_s.sqrt());
    base * base
}

/// Reported bound `(3.08 √ν + 3.57)²` on the generic hat parameter.
pub fn hat_generic_parameter_bound(nu: f64) -> f64 {
    let b = 3.08 * nu.sqrt() + 3.57;
    b * b
}

/// The hat body `K̂ = T(Q)` capped by `cᵀy ≤ J`, with its aggregate hat
/// barrier. Implements the walk's model interface.
#[derive(Clone)]
pub struct HatBody {
    spec: Arc<BodySpec>,
    c: DVector<f64>,
    weights: BarrierWeights,
    j_cap: f64,
}

impl HatBody {
    pub fn new(
        spec: Arc<BodySpec>,
        c: DVector<f64>,
        weights: BarrierWeights,
        j_cap: f64,
    ) -> Result<Self> {
        if c.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                context: "objective",
                expected: spec.dim(),
                found: c.len(),
            });
        }
        if !c.iter().all(|v| v.is_finite()) || c.norm() == 0.0 {
            return Err(Error::InvalidConfig("objective must be finite and nonzero".into()));
        }
        if !(j_cap > 0.0) {
            return Err(Error::InvalidConfig("J cap must be positive".into()));
        }
        Ok(HatBody {
            spec,
            c,
            weights,
            j_cap,
        })
    }

    pub fn objective(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn j_cap(&self) -> f64 {
        self.j_cap
    }

    /// `T⁻¹(y)` when defined.
    pub fn pull_back(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        projective_inverse(&self.c, y)
    }
}

impl BarrierModel for HatBody {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn contains(&self, y: &DVector<f64>) -> bool {
        let cy = self.c.dot(y);
        let t = 1.0 + cy;
        if t <= 0.0 || cy >= self.j_cap {
            return false;
        }
        self.spec.contains(&(y / t))
    }

    fn eval(&self, y: &DVector<f64>) -> Result<(BarrierEval, HessianFactor)> {
        let cy = self.c.dot(y);
        let t = 1.0 + cy;
        if t <= 0.0 || cy >= self.j_cap {
            return Err(Error::InfeasiblePoint { what: "the hat body" });
        }
        let x = y / t;
        if !self.spec.contains(&x) {
            return Err(Error::InfeasiblePoint { what: "the hat body" });
        }
        let n = self.spec.dim();
        let mut total = BarrierEval {
            value: 0.0,
            gradient: DVector::zeros(n),
            hessian: DMatrix::zeros(n, n),
            vterm: f64::NEG_INFINITY,
        };
        let mut add = |part: BarrierEval, w: f64| {
            if w != 0.0 {
                total.value += w * part.value;
                total.gradient += part.gradient * w;
                total.hessian += part.hessian * w;
            }
        };
        if let Some(lin) = self.spec.linear() {
            let base = barrier::log_barrier_eval(&lin.a, &lin.b, &x)?;
            add(
                hat_transform(&base, &x, &self.c, t, lin.rows() as f64),
                self.weights.linear,
            );
        }
        if let Some(psd) = self.spec.psd() {
            let base = barrier::logdet_barrier_eval(&psd.coeffs, &psd.bound, &x)?;
            add(
                hat_transform(&base, &x, &self.c, t, psd.size() as f64),
                self.weights.hyperbolic,
            );
        }
        if !self.spec.ellipsoids().is_empty() {
            let base = barrier::ellipsoid_barrier_eval(self.spec.ellipsoids(), &x)?;
            let nu = 2.0 * self.spec.ellipsoids().len() as f64;
            add(hat_transform(&base, &x, &self.c, t, nu), self.weights.hyperbolic);
        }
        // The cap row −ln(J − cᵀy) is a plain linear constraint of the
        // hat body itself, not composed through T.
        {
            let slack = self.j_cap - cy;
            total.value += self.weights.linear * (-slack.ln());
            total.gradient += &self.c * (self.weights.linear / slack);
            total
                .hessian
                .ger(self.weights.linear / (slack * slack), &self.c, &self.c, 1.0);
        }
        let factor = HessianFactor::new(&total.hessian)?;
        total.vterm = factor.half_log_det();
        Ok((total, factor))
    }
}

/// Optimization problem and budget parameters.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerConfig {
    /// Objective `c`, pre-scaled so the target level set is `cᵀx = 1`.
    #[serde(skip)]
    pub objective: DVector<f64>,
    pub epsilon: f64,
    pub delta: f64,
    /// Chord-centrality bound `s ≥ 1` of the origin in `Q`.
    pub centrality: f64,
    /// Leading constant of the step budget.
    pub budget_c1: f64,
    /// Constant on the `n ln(sν/ε)` term.
    pub budget_c2: f64,
    /// Hard step cap; `None` resolves to `10·τ(ε, δ)`.
    pub hard_cap: Option<u64>,
    /// Start point; `None` is the canonical origin start.
    #[serde(skip)]
    pub start: Option<DVector<f64>>,
}

impl OptimizerConfig {
    pub fn new(objective: DVector<f64>, epsilon: f64, delta: f64, centrality: f64) -> Self {
        OptimizerConfig {
            objective,
            epsilon,
            delta,
            centrality,
            budget_c1: 1.0,
            budget_c2: 1.0,
            hard_cap: None,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig("epsilon must lie in (0,1)".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig("delta must lie in (0,1)".into()));
        }
        if !(self.centrality >= 1.0) {
            return Err(Error::InvalidConfig("centrality bound s must be ≥ 1".into()));
        }
        if !(self.budget_c1 > 0.0 && self.budget_c2 > 0.0) {
            return Err(Error::InvalidConfig("budget constants must be positive".into()));
        }
        Ok(())
    }
}

/// Walk parameters for the hat chain.
#[derive(Clone, Debug, Serialize)]
pub struct HatWalkConfig {
    pub radius: f64,
    pub laziness: f64,
    pub seed: u64,
    pub j_cap: f64,
    /// Record the full point trace (memory-heavy on long runs).
    pub record_points: bool,
}

impl Default for HatWalkConfig {
    fn default() -> Self {
        HatWalkConfig {
            radius: DEFAULT_RADIUS,
            laziness: 0.5,
            seed: 0,
            j_cap: DEFAULT_J_CAP,
            record_points: false,
        }
    }
}

/// Step budget `τ(ε, δ) = ⌈C₁·n·ν·(ln(1/δ) + C₂·n·ln(sν/ε))⌉`.
pub fn tau_budget(n: usize, nu: f64, s: f64, epsilon: f64, delta: f64, c1: f64, c2: f64) -> u64 {
    let nf = n as f64;
    let tau = c1 * nf * nu * ((1.0 / delta).ln() + c2 * nf * (s * nu / epsilon).ln());
    tau.ceil().max(1.0) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeStatus {
    Success,
    BudgetExhausted,
}

/// Result of one optimization run.
#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub status: OptimizeStatus,
    /// Returned point: the stopping point on success, the best point seen
    /// when the budget ran out.
    pub x: DVector<f64>,
    pub objective_value: f64,
    pub steps_used: u64,
    pub tau_budget: u64,
    pub hard_cap: u64,
    pub seed: u64,
    pub j_cap: f64,
    /// `cᵀx_i` after every step (the running maximum is nondecreasing by
    /// construction of the best tracker).
    pub objective_trace: Vec<f64>,
    /// Full point trace when requested.
    pub points: Option<Vec<DVector<f64>>>,
}

/// Runs the lazy Dikin walk on the capped hat body from `T(0) = 0`,
/// stopping the first time `cᵀx_i ≥ 1 − ε` or when the hard cap is hit
/// (`budget_exhausted` is a reported status, not an error).
pub fn las_vegas_optimize(
    spec: &BodySpec,
    weights: &BarrierWeights,
    opt: &OptimizerConfig,
    walk: &HatWalkConfig,
) -> Result<OptimizeOutcome> {
    opt.validate()?;
    let n = spec.dim();
    let c = opt.objective.clone();
    let x0 = opt.start.clone().unwrap_or_else(|| DVector::zeros(n));
    if !spec.membership(&x0)? {
        return Err(Error::InfeasiblePoint { what: "the body (optimizer start)" });
    }
    if c.dot(&x0) >= 1.0 {
        return Err(Error::InvalidConfig("cᵀx₀ must be below 1 at the start".into()));
    }
    let nu = barrier::complexity_parameter(spec);
    let tau = tau_budget(
        n,
        nu,
        opt.centrality,
        opt.epsilon,
        opt.delta,
        opt.budget_c1,
        opt.budget_c2,
    );
    let hard_cap = opt.hard_cap.unwrap_or(tau.saturating_mul(10));
    let threshold = 1.0 - opt.epsilon;

    let hat = HatBody::new(Arc::new(spec.clone()), c.clone(), *weights, walk.j_cap)?;
    let chain_config = ChainConfig {
        radius: walk.radius,
        laziness: walk.laziness,
        seed: walk.seed,
        max_steps: hard_cap.max(1),
        burn_in: 0,
        thinning: 1,
    };
    let y0 = projective_map(&c, &x0)?;
    let mut state = ChainState::new(hat, chain_config, y0)?;

    let objective_of = |y: &DVector<f64>| {
        let cy = c.dot(y);
        cy / (1.0 + cy)
    };

    let mut objective_trace = Vec::new();
    let mut points = walk.record_points.then(Vec::new);
    let mut best_y = state.position().clone();
    let mut best_obj = objective_of(&best_y);
    let mut steps_used = 0u64;

    let status = loop {
        let current = objective_of(state.position());
        if current >= threshold {
            break OptimizeStatus::Success;
        }
        if steps_used >= hard_cap {
            break OptimizeStatus::BudgetExhausted;
        }
        state.metropolis_step()?;
        steps_used += 1;
        let obj = objective_of(state.position());
        objective_trace.push(obj);
        if let Some(pts) = points.as_mut() {
            pts.push(state.model().pull_back(state.position())?);
        }
        if obj > best_obj {
            best_obj = obj;
            best_y = state.position().clone();
        }
    };

    let y_final = match status {
        OptimizeStatus::Success => state.position().clone(),
        OptimizeStatus::BudgetExhausted => best_y,
    };
    let x = projective_inverse(&c, &y_final)?;
    let objective_value = c.dot(&x);
    Ok(OptimizeOutcome {
        status,
        x,
        objective_value,
        steps_used,
        tau_budget: tau,
        hard_cap,
        seed: walk.seed,
        j_cap: walk.j_cap,
        objective_trace,
        points,
    })
}

/// Draws a uniformly random interior point of `spec` by rejection from
/// the box `[-half, half]ⁿ`; convenience for tests and diagnostics.
pub fn rejection_point<R: Rng>(spec: &BodySpec, half: f64, rng: &mut R) -> DVector<f64> {
    loop {
        let x = DVector::from_fn(spec.dim(), |_, _| rng.random_range(-half..half));
        if spec.contains(&x) {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Ellipsoid;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projective_map_examples() {
        let c = dvector![1.0, 0.0];
        assert_eq!(
            projective_map(&c, &dvector![0.0, 0.0]).unwrap(),
            dvector![0.0, 0.0]
        );
        // T((½,0)) = (1,0) for c = e₁.
        let y = projective_map(&c, &dvector![0.5, 0.0]).unwrap();
        assert!((y - dvector![1.0, 0.0]).amax() < 1e-15);
        assert!(projective_map(&c, &dvector![1.0, 0.0]).is_err());
    }

    #[test]
    fn projective_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = dvector![0.7, -0.3, 0.1];
        for _ in 0..1000 {
            let x = dvector![
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.9..0.9),
                rng.random_range(-0.9..0.9)
            ];
            if c.dot(&x) >= 1.0 {
                continue;
            }
            let y = projective_map(&c, &x).unwrap();
            let back = projective_inverse(&c, &y).unwrap();
            assert!((back - &x).amax() < 1e-10);
        }
    }

    #[test]
    fn kappa_s_at_one() {
        // (8/(3√3) + ½ (7/3)^{3/2})² ≈ 11.03, hand-evaluated to 11.0337805.
        assert!((kappa_s(1.0) - 11.033_780_497_022_857).abs() < 1e-9);
    }

    #[test]
    fn hat_log_barrier_matches_interval_closed_form() {
        // K = [−1,1], c = 1: F̂_ℓ(y) = −ln(1 + 2y) exactly.
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let lin = interval.linear().unwrap();
        let c = dvector![1.0];
        for y in [-0.4, -0.1, 0.0, 0.5, 3.0, 10.0] {
            let t = 1.0 + y;
            let x = dvector![y / t];
            let base = barrier::log_barrier_eval(&lin.a, &lin.b, &x).unwrap();
            let hat = hat_transform(&base, &x, &c, t, 2.0);
            let slack = 1.0 + 2.0 * y;
            assert!((hat.value - (-slack.ln())).abs() < 1e-12, "value at y={y}");
            assert!((hat.gradient[0] - (-2.0 / slack)).abs() < 1e-11, "grad at y={y}");
            assert!(
                (hat.hessian[(0, 0)] - 4.0 / (slack * slack)).abs() < 1e-10,
                "hess at y={y}"
            );
        }
    }

    #[test]
    fn hat_value_at_origin_equals_base_value() {
        // ln 1 = 0 kills the correction term at y = 0.
        let ball = Ellipsoid::new(nalgebra::DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let x = dvector![0.0, 0.0];
        let base = barrier::ellipsoid_barrier_eval(&[ball], &x).unwrap();
        let hat = hat_transform(&base, &x, &dvector![0.3, 0.4], 1.0, 2.0);
        assert_eq!(hat.value, base.value);
    }

    fn fd_check_hat(eval_at: impl Fn(&DVector<f64>) -> BarrierEval, y: &DVector<f64>) {
        let n = y.len();
        let e = eval_at(y);
        let h = 1e-5;
        for i in 0..n {
            let mut yp = y.clone();
            yp[i] += h;
            let mut ym = y.clone();
            ym[i] -= h;
            let fp = eval_at(&yp);
            let fm = eval_at(&ym);
            let fd_grad = (fp.value - fm.value) / (2.0 * h);
            let scale = e.gradient[i].abs().max(1.0);
            assert!(
                (fd_grad - e.gradient[i]).abs() / scale < 1e-4,
                "grad[{i}]: fd {fd_grad} vs {}",
                e.gradient[i]
            );
            let fd_hess_col = (&fp.gradient - &fm.gradient) / (2.0 * h);
            for j in 0..n {
                let scale = e.hessian[(j, i)].abs().max(1.0);
                assert!(
                    (fd_hess_col[j] - e.hessian[(j, i)]).abs() / scale < 1e-4,
                    "hess[{j},{i}]"
                );
            }
        }
    }

    #[test]
    fn hat_transform_matches_finite_differences() {
        let square = BodySpec::cube(2, 1.0).unwrap();
        let lin = square.linear().unwrap().clone();
        let c = dvector![0.8, -0.2];
        let eval_at = |y: &DVector<f64>| {
            let t = 1.0 + c.dot(y);
            let x = y / t;
            let base = barrier::log_barrier_eval(&lin.a, &lin.b, &x).unwrap();
            hat_transform(&base, &x, &c, t, 4.0)
        };
        fd_check_hat(eval_at, &dvector![0.2, 0.3]);
        fd_check_hat(eval_at, &dvector![-0.1, 0.4]);
    }

    #[test]
    fn hat_generic_transform_matches_finite_differences() {
        // Ball barrier declared as a generic ν_s = 1 part.
        let ball = Ellipsoid::new(nalgebra::DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let c = dvector![0.5, 0.1];
        let eval_at = move |y: &DVector<f64>| {
            let t = 1.0 + c.dot(y);
            let x = y / t;
            let base = barrier::ellipsoid_barrier_eval(std::slice::from_ref(&ball), &x).unwrap();
            hat_generic_transform(&base, &x, &c, t, 1.0)
        };
        fd_check_hat(&eval_at, &dvector![0.1, -0.2]);
        fd_check_hat(&eval_at, &dvector![0.3, 0.2]);
    }

    #[test]
    fn tau_budget_example_and_monotonicity() {
        // ⌈8 (ln 10 + 2 ln 40)⌉ = 78.
        assert_eq!(tau_budget(2, 4.0, 1.0, 0.1, 0.1, 1.0, 1.0), 78);
        let base = tau_budget(2, 4.0, 1.0, 0.1, 0.1, 1.0, 1.0);
        assert!(tau_budget(3, 4.0, 1.0, 0.1, 0.1, 1.0, 1.0) >= base);
        assert!(tau_budget(2, 8.0, 1.0, 0.1, 0.1, 1.0, 1.0) >= base);
        assert!(tau_budget(2, 4.0, 2.0, 0.1, 0.1, 1.0, 1.0) >= base);
        assert!(tau_budget(2, 4.0, 1.0, 0.05, 0.1, 1.0, 1.0) >= base);
        assert!(tau_budget(2, 4.0, 1.0, 0.1, 0.05, 1.0, 1.0) >= base);
        // Doubling ν at least doubles τ; the log factor adds a hair.
        let t1 = tau_budget(2, 4.0, 1.0, 0.1, 0.1, 1.0, 1.0) as f64;
        let t2 = tau_budget(2, 8.0, 1.0, 0.1, 0.1, 1.0, 1.0) as f64;
        assert!(t2 / t1 >= 2.0 && t2 / t1 < 2.5, "ratio {}", t2 / t1);
    }

    #[test]
    fn hat_parameter_bound_arithmetic() {
        // (3.08 + 3.57)² at ν = 1.
        assert!((hat_generic_parameter_bound(1.0) - 44.2225).abs() < 1e-10);
    }

    #[test]
    fn hat_chord_ratio_inflation_is_logarithmic_in_inv_eps() {
        // Q_eps = [−1, 1−ε] with c = 1 maps to [−1/2, (1−ε)/ε]; the chord
        // ratio through the origin grows like ln(1/ε) and no faster than
        // ln 2 + ln(1/ε).
        let mut previous = 0.0;
        for eps in [0.2, 0.1, 0.05, 0.02, 0.01] {
            let q_eps = BodySpec::polytope(
                nalgebra::dmatrix![1.0; -1.0],
                dvector![1.0 - eps, 1.0],
            )
            .unwrap();
            let chord =
                crate::geometry::chord_endpoints(&q_eps, &dvector![0.0], &dvector![1.0]).unwrap();
            let c = dvector![1.0];
            let p_img = projective_map(&c, &chord.p).unwrap();
            let q_img = projective_map(&c, &chord.q).unwrap();
            let ratio = (q_img.norm() / p_img.norm()).max(p_img.norm() / q_img.norm());
            let log_ratio = ratio.ln();
            assert!(
                log_ratio <= (1.0f64 / eps).ln() + 2.0f64.ln() + 1e-9,
                "eps {eps}: log ratio {log_ratio}"
            );
            assert!(log_ratio > previous, "not monotone in 1/eps");
            previous = log_ratio;
        }
    }

    #[test]
    fn hat_membership_matches_pullback() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let hat = HatBody::new(
            Arc::new(interval),
            dvector![1.0],
            BarrierWeights::defaults(1),
            1e6,
        )
        .unwrap();
        // K̂ = (−½, ∞) capped at 1e6.
        assert!(hat.contains(&dvector![0.0]));
        assert!(hat.contains(&dvector![100.0]));
        assert!(!hat.contains(&dvector![-0.5]));
        assert!(!hat.contains(&dvector![1e7]));
    }

    #[test]
    fn immediate_success_when_start_satisfies_the_bound() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let mut opt = OptimizerConfig::new(dvector![1.0], 0.05, 0.1, 1.0);
        opt.start = Some(dvector![0.96]);
        let out = las_vegas_optimize(
            &interval,
            &BarrierWeights::defaults(1),
            &opt,
            &HatWalkConfig::default(),
        )
        .unwrap();
        assert_eq!(out.status, OptimizeStatus::Success);
        assert_eq!(out.steps_used, 0);
        assert_eq!(out.x, dvector![0.96]);
    }

    #[test]
    fn start_at_or_beyond_the_level_set_is_rejected() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let mut opt = OptimizerConfig::new(dvector![2.0], 0.05, 0.1, 1.0);
        opt.start = Some(dvector![0.6]);
        assert!(matches!(
            las_vegas_optimize(
                &interval,
                &BarrierWeights::defaults(1),
                &opt,
                &HatWalkConfig::default(),
            ),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn optimizer_interval_reaches_the_target() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let mut opt = OptimizerConfig::new(dvector![1.0], 0.1, 0.1, 1.0);
        opt.budget_c1 = 64.0;
        let walk = HatWalkConfig {
            radius: 0.5,
            seed: 7,
            ..HatWalkConfig::default()
        };
        let out =
            las_vegas_optimize(&interval, &BarrierWeights::defaults(1), &opt, &walk).unwrap();
        assert_eq!(out.status, OptimizeStatus::Success, "steps {}", out.steps_used);
        assert!(out.objective_value >= 0.9);
        assert!(interval.contains(&out.x));
    }

    #[test]
    fn budget_exhausted_returns_best_seen() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let mut opt = OptimizerConfig::new(dvector![1.0], 0.01, 0.1, 1.0);
        opt.hard_cap = Some(5);
        let walk = HatWalkConfig {
            seed: 3,
            record_points: true,
            ..HatWalkConfig::default()
        };
        let out =
            las_vegas_optimize(&interval, &BarrierWeights::defaults(1), &opt, &walk).unwrap();
        assert_eq!(out.status, OptimizeStatus::BudgetExhausted);
        assert_eq!(out.steps_used, 5);
        let best_traced = out
            .objective_trace
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        assert!((out.objective_value - best_traced.max(0.0)).abs() < 1e-12);
        // Every intermediate point stays strictly inside Q.
        for p in out.points.as_ref().unwrap() {
            assert!(interval.contains(p));
            assert!(p[0] < 1.0);
        }
    }

    #[test]
    fn rejection_point_is_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ball = Ellipsoid::new(nalgebra::DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let spec = BodySpec::new(2, None, None, vec![ball], None).unwrap();
        for _ in 0..100 {
            assert!(spec.contains(&rejection_point(&spec, 1.0, &mut rng)));
        }
    }
}
