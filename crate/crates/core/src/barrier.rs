//! Barrier evaluation: values, gradients, Hessians and the log-det term
//! for the logarithmic, log-det and ellipsoid barrier families, plus
//! their weighted aggregate.

use nalgebra::{DMatrix, DVector};

use crate::body::{BarrierWeights, BodySpec, Ellipsoid};
use crate::error::{Error, Result};
use crate::linalg::{self, HessianFactor};

/// Default finite-difference step for derivative probes, in local-norm
/// units (the stencil stays inside the unit Dikin ellipsoid).
pub const FD_STEP_DEFAULT: f64 = 1e-4;

/// Tolerance on the self-concordance ratios.
pub const SC_RATIO_TOL: f64 = 0.01;

/// One barrier evaluation at a point.
#[derive(Clone, Debug)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    /// `½ ln det hessian`; `-inf` when the Hessian of a lone part is
    /// singular (a rank-deficient linear part, say).
    pub vterm: f64,
}

impl BarrierEval {
    fn zero(n: usize) -> Self {
        BarrierEval {
            value: 0.0,
            gradient: DVector::zeros(n),
            hessian: DMatrix::zeros(n, n),
            vterm: f64::NEG_INFINITY,
        }
    }

    fn fill_vterm(mut self) -> Self {
        self.vterm = match HessianFactor::new(&self.hessian) {
            Ok(f) => f.half_log_det(),
            Err(_) => f64::NEG_INFINITY,
        };
        self
    }

    /// Factorize the Hessian; fails if it is not positive definite.
    pub fn factor(&self) -> Result<HessianFactor> {
        HessianFactor::new(&self.hessian)
    }
}

/// `F(x) = −∑ ln(bᵢ − aᵢᵀx)` with gradient `∑ aᵢ/sᵢ` and Hessian
/// `∑ aᵢaᵢᵀ/sᵢ² = AᵀD²A`.
pub fn log_barrier_eval(a: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>) -> Result<BarrierEval> {
    let n = a.ncols();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "log_barrier_eval",
            expected: n,
            found: x.len(),
        });
    }
    let slacks = b - a * x;
    if slacks.iter().any(|s| *s <= 0.0) {
        return Err(Error::InfeasiblePoint { what: "the linear part" });
    }
    let mut value = 0.0;
    let mut gradient = DVector::zeros(n);
    let mut hessian = DMatrix::zeros(n, n);
    for i in 0..a.nrows() {
        let s = slacks[i];
        let row = a.row(i).transpose();
        value -= s.ln();
        gradient += &row / s;
        hessian.ger(1.0 / (s * s), &row, &row, 1.0);
    }
    linalg::symmetrize(&mut hessian);
    Ok(BarrierEval {
        value,
        gradient,
        hessian,
        vterm: 0.0,
    }
    .fill_vterm())
}

/// `F(x) = −ln det S(x)` on the slice `S(x) = B − ∑ xᵢAᵢ ≻ 0`; gradient
/// `Tr(S⁻¹Aᵢ)` and Hessian `Tr(S⁻¹AᵢS⁻¹Aⱼ)`, assembled through the
/// symmetric congruences `Nᵢ = L⁻¹AᵢL⁻ᵀ` of `S = LLᵀ` so the Hessian is
/// exactly symmetric and positive semidefinite by construction.
pub fn logdet_barrier_eval(
    coeffs: &[DMatrix<f64>],
    bound: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<BarrierEval> {
    let n = coeffs.len();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "logdet_barrier_eval",
            expected: n,
            found: x.len(),
        });
    }
    let mut s = bound.clone();
    for (i, ai) in coeffs.iter().enumerate() {
        s -= ai * x[i];
    }
    let chol = nalgebra::Cholesky::new(s)
        .ok_or(Error::InfeasiblePoint { what: "the semidefinite part" })?;
    let lower = chol.l();
    let value = -2.0 * lower.diagonal().iter().map(|d| d.ln()).sum::<f64>();

    // Nᵢ = L⁻¹ Aᵢ L⁻ᵀ (symmetric).
    let congruences: Vec<DMatrix<f64>> = coeffs
        .iter()
        .map(|ai| {
            let half = lower
                .solve_lower_triangular(ai)
                .expect("Cholesky factor has positive diagonal");
            lower
                .solve_lower_triangular(&half.transpose())
                .expect("Cholesky factor has positive diagonal")
        })
        .collect();

    let gradient = DVector::from_iterator(n, congruences.iter().map(|ni| ni.trace()));
    let mut hessian = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let hij = congruences[i].dot(&congruences[j]);
            hessian[(i, j)] = hij;
            hessian[(j, i)] = hij;
        }
    }
    Ok(BarrierEval {
        value,
        gradient,
        hessian,
        vterm: 0.0,
    }
    .fill_vterm())
}

/// `F(x) = −∑ⱼ ln(1 − ‖uⱼ‖²)` with `uⱼ = Aⱼ⁻¹(x − cⱼ)`, assembled by the
/// chain rule through each affine map.
pub fn ellipsoid_barrier_eval(maps: &[Ellipsoid], x: &DVector<f64>) -> Result<BarrierEval> {
    if maps.is_empty() {
        return Ok(BarrierEval::zero(x.len()));
    }
    let n = x.len();
    let mut value = 0.0;
    let mut gradient = DVector::zeros(n);
    let mut hessian = DMatrix::zeros(n, n);
    for e in maps {
        if e.center.len() != n {
            return Err(Error::DimensionMismatch {
                context: "ellipsoid_barrier_eval",
                expected: e.center.len(),
                found: n,
            });
        }
        let u = e.pullback(x);
        let gap = 1.0 - u.norm_squared();
        if gap <= 0.0 {
            return Err(Error::InfeasiblePoint { what: "an ellipsoid part" });
        }
        value -= gap.ln();
        // In u-coordinates: ∇ = 2u/g, ∇² = 2I/g + 4uuᵀ/g²; pull back by A⁻¹.
        let pulled = e.inverse().transpose() * &u;
        gradient += &pulled * (2.0 / gap);
        let mut h = e.inverse().transpose() * e.inverse() * (2.0 / gap);
        h.ger(4.0 / (gap * gap), &pulled, &pulled, 1.0);
        hessian += h;
    }
    linalg::symmetrize(&mut hessian);
    Ok(BarrierEval {
        value,
        gradient,
        hessian,
        vterm: 0.0,
    }
    .fill_vterm())
}

/// Componentwise weighted sum `w_ℓ F_ℓ + w_h (F_psd + F_ell)` of the
/// present parts, with the log-det term recomputed from the summed
/// Hessian. Also returns the factorization so callers sampling from the
/// walk do not factorize twice.
pub fn aggregate_eval_with_factor(
    spec: &BodySpec,
    weights: &BarrierWeights,
    x: &DVector<f64>,
) -> Result<(BarrierEval, HessianFactor)> {
    if !spec.membership(x)? {
        return Err(Error::InfeasiblePoint { what: "the body" });
    }
    let n = spec.dim();
    let mut total = BarrierEval::zero(n);
    let mut add = |part: BarrierEval, w: f64| {
        if w != 0.0 {
            total.value += w * part.value;
            total.gradient += part.gradient * w;
            total.hessian += part.hessian * w;
        }
    };
    if let Some(lin) = spec.linear() {
        add(log_barrier_eval(&lin.a, &lin.b, x)?, weights.linear);
    }
    if let Some(psd) = spec.psd() {
        add(
            logdet_barrier_eval(&psd.coeffs, &psd.bound, x)?,
            weights.hyperbolic,
        );
    }
    if !spec.ellipsoids().is_empty() {
        add(
            ellipsoid_barrier_eval(spec.ellipsoids(), x)?,
            weights.hyperbolic,
        );
    }
    let factor = HessianFactor::new(&total.hessian)?;
    total.vterm = factor.half_log_det();
    Ok((total, factor))
}

/// Weighted aggregate barrier per the body's parts.
pub fn aggregate_barrier_eval(
    spec: &BodySpec,
    weights: &BarrierWeights,
    x: &DVector<f64>,
) -> Result<BarrierEval> {
    aggregate_eval_with_factor(spec, weights, x).map(|(eval, _)| eval)
}

/// Complexity parameter `ν = m + n·ν_h + (n·ν_s)²` from the given part
/// parameters.
pub fn complexity_parameter_parts(m: usize, n: usize, nu_h: usize, nu_s: usize) -> f64 {
    let (m, n, nu_h, nu_s) = (m as f64, n as f64, nu_h as f64, nu_s as f64);
    m + n * nu_h + (n * nu_s) * (n * nu_s)
}

/// Complexity parameter of a body spec.
pub fn complexity_parameter(spec: &BodySpec) -> f64 {
    complexity_parameter_parts(
        spec.num_linear(),
        spec.dim(),
        spec.nu_hyperbolic(),
        spec.nu_generic(),
    )
}

/// Upper bound on the self-concordance parameter of the default
/// aggregate, `m + n·ν_h + n²·ν_s`. Kept separate from the complexity
/// parameter; the step budget consumes the latter.
pub fn self_concordance_bound(spec: &BodySpec) -> f64 {
    let (n, nu_h, nu_s) = (
        spec.dim() as f64,
        spec.nu_hyperbolic() as f64,
        spec.nu_generic() as f64,
    );
    spec.num_linear() as f64 + n * nu_h + n * n * nu_s
}

/// Self-concordance parameter of the weighted aggregate (`ν(wF) = w·ν(F)`
/// summed over the present parts).
pub fn weighted_sc_parameter(spec: &BodySpec, weights: &BarrierWeights) -> f64 {
    let mut nu = 0.0;
    if spec.linear().is_some() {
        nu += weights.linear * spec.num_linear() as f64;
    }
    nu += weights.hyperbolic * spec.nu_hyperbolic() as f64;
    nu += weights.generic * spec.nu_generic() as f64;
    nu
}

/// Measured self-concordance ratios at one point and direction.
#[derive(Clone, Copy, Debug)]
pub struct ScReport {
    /// `|D³F[h,h,h]| / (2 (D²F[h,h])^{3/2})`, D³ by central differences
    /// of the quadratic form; at most `1 + tol` for a valid barrier.
    pub d3_ratio: f64,
    /// `(DF[h])² / (ν · D²F[h,h])`; at most `1 + tol`.
    pub lipschitz_ratio: f64,
}

/// Probes the two self-concordance inequalities of the weighted
/// aggregate at `x` along `h`. `fd_step` is measured in local-norm
/// units; anything below 1 keeps the stencil inside the body.
pub fn self_concordance_check(
    spec: &BodySpec,
    weights: &BarrierWeights,
    x: &DVector<f64>,
    h: &DVector<f64>,
    fd_step: f64,
) -> Result<ScReport> {
    if h.norm() == 0.0 {
        return Err(Error::InvalidConfig("direction h must be nonzero".into()));
    }
    let nu = weighted_sc_parameter(spec, weights);
    if nu <= 0.0 {
        return Err(Error::InvalidConfig(
            "the weighted barrier has zero self-concordance parameter".into(),
        ));
    }
    let eval = aggregate_barrier_eval(spec, weights, x)?;
    let d2 = linalg::local_norm_sq(&eval.hessian, h);
    if d2 <= 0.0 {
        return Err(Error::Numeric("degenerate quadratic form along h".into()));
    }
    let t = fd_step / d2.sqrt();
    let xp = x + h * t;
    let xm = x - h * t;
    if !spec.contains(&xp) || !spec.contains(&xm) {
        return Err(Error::StepTooLarge);
    }
    let d2p = linalg::local_norm_sq(&aggregate_barrier_eval(spec, weights, &xp)?.hessian, h);
    let d2m = linalg::local_norm_sq(&aggregate_barrier_eval(spec, weights, &xm)?.hessian, h);
    let d3 = (d2p - d2m) / (2.0 * t);
    let df = eval.gradient.dot(h);
    Ok(ScReport {
        d3_ratio: d3.abs() / (2.0 * d2.powf(1.5)),
        lipschitz_ratio: df * df / (nu * d2),
    })
}
