//! Local geometry of a body: chords, the Hilbert metric, the symmetric
//! gauge, and a discretized Riemannian distance along straight segments.

use nalgebra::DVector;

use crate::barrier;
use crate::body::{BarrierWeights, BodySpec};
use crate::error::{Error, Result};
use crate::linalg;

/// Ray-parameter tolerance for chord-endpoint bisection.
pub const CHORD_TOL: f64 = 1e-12;
/// Ray-parameter tolerance for gauge bisection.
pub const GAUGE_TOL: f64 = 1e-10;
/// A ray still inside the body beyond this parameter means the body is
/// unbounded (or malformed).
pub const UNBOUNDED_RAY: f64 = 1e12;

/// A chord of the body through a base point, with both boundary
/// endpoints and signed arc-length coordinates along the unit direction.
#[derive(Clone, Debug)]
pub struct Chord {
    pub p: DVector<f64>,
    pub q: DVector<f64>,
    pub base: DVector<f64>,
    pub direction: DVector<f64>,
    /// Signed coordinate of `p` along `direction` (negative).
    pub t_backward: f64,
    /// Signed coordinate of `q` along `direction` (positive).
    pub t_forward: f64,
}

impl Chord {
    pub fn length(&self) -> f64 {
        self.t_forward - self.t_backward
    }

    /// Point at signed coordinate `t` along the chord.
    pub fn at(&self, t: f64) -> DVector<f64> {
        &self.base + &self.direction * t
    }
}

/// Crossing parameter of the ray `x + t·d`, `t > 0`, out of one
/// constraint part, testing with `inside`. Exact slack ratios handle the
/// linear part separately; this bisection serves the nonlinear parts.
fn bisect_crossing<F: Fn(&DVector<f64>) -> bool>(
    x: &DVector<f64>,
    d: &DVector<f64>,
    inside: F,
    tol: f64,
) -> Result<Option<f64>> {
    let mut hi = 1.0;
    while inside(&(x + d * hi)) {
        hi *= 2.0;
        if hi > UNBOUNDED_RAY {
            return Ok(None);
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if inside(&(x + d * mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Crossing parameter of the ray `x + t·d` out of the whole body:
/// closed-form slack ratios for the linear part, bisection to `tol` for
/// the PSD and ellipsoid parts, combined by taking the minimum.
/// `None` means the ray never leaves the body within `UNBOUNDED_RAY`.
fn ray_crossing(
    spec: &BodySpec,
    x: &DVector<f64>,
    d: &DVector<f64>,
    tol: f64,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    let mut fold = |candidate: Option<f64>| {
        if let Some(t) = candidate {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    };

    if let Some(lin) = spec.linear() {
        let slacks = lin.slacks(x);
        let rates = &lin.a * d;
        let mut t_lin = f64::INFINITY;
        for i in 0..slacks.len() {
            if rates[i] > 0.0 {
                t_lin = t_lin.min(slacks[i] / rates[i]);
            }
        }
        if t_lin.is_finite() {
            fold(Some(t_lin));
        }
    }
    if let Some(psd) = spec.psd() {
        fold(bisect_crossing(x, d, |y| psd.contains(y), tol)?);
    }
    for e in spec.ellipsoids() {
        fold(bisect_crossing(x, d, |y| e.contains(y), tol)?);
    }
    Ok(best)
}

/// Both boundary crossings of the line through `x` along `dir`.
pub fn chord_endpoints(spec: &BodySpec, x: &DVector<f64>, dir: &DVector<f64>) -> Result<Chord> {
    if !spec.membership(x)? {
        return Err(Error::InfeasiblePoint { what: "the body" });
    }
    let norm = dir.norm();
    if norm == 0.0 {
        return Err(Error::InvalidConfig("chord direction must be nonzero".into()));
    }
    let d = dir / norm;
    let neg = -&d;
    let t_forward = ray_crossing(spec, x, &d, CHORD_TOL)?
        .ok_or(Error::UnboundedBody(UNBOUNDED_RAY))?;
    let t_backward = ray_crossing(spec, x, &neg, CHORD_TOL)?
        .ok_or(Error::UnboundedBody(UNBOUNDED_RAY))?;
    Ok(Chord {
        p: x - &d * t_backward,
        q: x + &d * t_forward,
        base: x.clone(),
        direction: d,
        t_backward: -t_backward,
        t_forward,
    })
}

/// Hilbert (projective) distance
/// `d_H(x,y) = ln(1 + |x−y||p−q| / (|p−x||q−y|))` with `p,x,y,q` in order
/// along their common chord. `x = y` returns 0 by convention.
pub fn hilbert_distance(spec: &BodySpec, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let diff = y - x;
    let dist = diff.norm();
    if dist == 0.0 {
        return Ok(0.0);
    }
    if !spec.membership(y)? {
        return Err(Error::InfeasiblePoint { what: "the body" });
    }
    let chord = chord_endpoints(spec, x, &diff)?;
    // x sits at coordinate 0, y at `dist` > 0.
    let px = -chord.t_backward;
    let qy = chord.t_forward - dist;
    Ok((1.0 + dist * chord.length() / (px * qy)).ln())
}

/// Symmetric gauge `|v|_x`: the reciprocal of
/// `α* = sup {α : x ± αv ∈ K}`. Returns 0 when the body is unbounded in
/// both directions of `±v`.
pub fn symmetric_gauge(spec: &BodySpec, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    symmetric_gauge_by(x, v, |t_x| spec.contains(t_x))
}

/// Gauge against an arbitrary membership predicate; used for per-part
/// sandwich checks.
pub fn symmetric_gauge_by<F: Fn(&DVector<f64>) -> bool>(
    x: &DVector<f64>,
    v: &DVector<f64>,
    inside: F,
) -> Result<f64> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidConfig("gauge direction must be nonzero".into()));
    }
    if !inside(x) {
        return Err(Error::InfeasiblePoint { what: "the part" });
    }
    let d = v / norm;
    let neg = -&d;
    let plus = bisect_crossing(x, &d, &inside, GAUGE_TOL)?;
    let minus = bisect_crossing(x, &neg, &inside, GAUGE_TOL)?;
    let alpha_units = match (plus, minus) {
        (None, None) => return Ok(0.0),
        (Some(t), None) | (None, Some(t)) => t,
        (Some(a), Some(b)) => a.min(b),
    };
    // alpha_units is in arc length; α* in units of v divides by ‖v‖.
    Ok(norm / alpha_units)
}

/// Trapezoidal upper approximation of the Riemannian distance along the
/// straight segment `[x, y]` under the aggregate-barrier metric.
pub fn riemannian_distance_approx(
    spec: &BodySpec,
    weights: &BarrierWeights,
    x: &DVector<f64>,
    y: &DVector<f64>,
    segments: usize,
) -> Result<f64> {
    if segments == 0 {
        return Err(Error::InvalidConfig("segments must be at least 1".into()));
    }
    let step = y - x;
    if step.norm() == 0.0 {
        return Ok(0.0);
    }
    let m = segments;
    let mut sum = 0.0;
    for k in 0..=m {
        let z = x + &step * (k as f64 / m as f64);
        let eval = barrier::aggregate_barrier_eval(spec, weights, &z)?;
        let f = linalg::local_norm(&eval.hessian, &step);
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        sum += w * f;
    }
    Ok(sum / m as f64)
}

/// Per-part gauge/local-norm sandwich measurement.
#[derive(Clone, Debug)]
pub struct GaugeSandwich {
    pub part: &'static str,
    pub gauge: f64,
    pub norm: f64,
    /// Theoretical factor: `√m`, `√ν_h`, or `2(1+3ν_s)`.
    pub factor: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Checks `gauge ≤ norm ≤ factor · gauge` for every unweighted part
/// barrier of the body along `v`.
pub fn gauge_sandwich_check(
    spec: &BodySpec,
    x: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<Vec<GaugeSandwich>> {
    let mut reports = Vec::new();
    let slack = 1e-9;
    let mut push = |part: &'static str, gauge: f64, norm: f64, factor: f64| {
        reports.push(GaugeSandwich {
            part,
            gauge,
            norm,
            factor,
            lower_ok: gauge <= norm * (1.0 + slack) + 1e-12,
            upper_ok: norm <= factor * gauge * (1.0 + slack) + 1e-12,
        });
    };

    if let Some(lin) = spec.linear() {
        let gauge = symmetric_gauge_by(x, v, |y| lin.contains(y))?;
        let eval = barrier::log_barrier_eval(&lin.a, &lin.b, x)?;
        let norm = linalg::local_norm(&eval.hessian, v);
        push("log", gauge, norm, (lin.rows() as f64).sqrt());
    }

    let has_psd = spec.psd().is_some();
    let has_ell = !spec.ellipsoids().is_empty();
    if has_psd || has_ell {
        let gauge = symmetric_gauge_by(x, v, |y| {
            spec.psd().is_none_or(|p| p.contains(y))
                && spec.ellipsoids().iter().all(|e| e.contains(y))
        })?;
        let mut norm_sq = 0.0;
        if let Some(psd) = spec.psd() {
            let eval = barrier::logdet_barrier_eval(&psd.coeffs, &psd.bound, x)?;
            norm_sq += linalg::local_norm_sq(&eval.hessian, v);
        }
        if has_ell {
            let eval = barrier::ellipsoid_barrier_eval(spec.ellipsoids(), x)?;
            norm_sq += linalg::local_norm_sq(&eval.hessian, v);
        }
        let nu_h = spec.nu_hyperbolic() as f64;
        push("hyperbolic", gauge, norm_sq.max(0.0).sqrt(), nu_h.sqrt());
    }

    Ok(reports)
}

/// Cross-ratio `(a : b : c : d)` of four signed coordinates on a line.
pub fn cross_ratio(a: f64, b: f64, c: f64, d: f64) -> f64 {
    ((a - c) * (b - d)) / ((a - d) * (b - c))
}

/// Cross-ratio with the first point at infinity: `lim (a:b:c:d), a → ∞`.
pub fn cross_ratio_inf(b: f64, c: f64, d: f64) -> f64 {
    (b - d) / (b - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::Ellipsoid;
    use nalgebra::{DMatrix, DVector, dvector};

    fn unit_square() -> BodySpec {
        BodySpec::cube(2, 1.0).unwrap()
    }

    fn unit_ball(n: usize) -> BodySpec {
        let ball = Ellipsoid::new(DMatrix::identity(n, n), DVector::zeros(n)).unwrap();
        BodySpec::new(n, None, None, vec![ball], None).unwrap()
    }

    #[test]
    fn square_chord_along_axis() {
        let chord =
            chord_endpoints(&unit_square(), &dvector![0.0, 0.0], &dvector![1.0, 0.0]).unwrap();
        assert!((&chord.p - dvector![-1.0, 0.0]).amax() < 1e-12);
        assert!((&chord.q - dvector![1.0, 0.0]).amax() < 1e-12);
    }

    #[test]
    fn interval_chord_off_center() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let chord = chord_endpoints(&interval, &dvector![0.5], &dvector![1.0]).unwrap();
        assert!((chord.p[0] + 1.0).abs() < 1e-12);
        assert!((chord.q[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_chord_solves_quadratic() {
        // From (½, 0) along e₂ the crossings are (½, ±√3/2).
        let chord =
            chord_endpoints(&unit_ball(2), &dvector![0.5, 0.0], &dvector![0.0, 1.0]).unwrap();
        let root = (3.0f64).sqrt() / 2.0;
        assert!((chord.q[1] - root).abs() < 1e-9);
        assert!((chord.p[1] + root).abs() < 1e-9);
    }

    #[test]
    fn chord_endpoints_straddle_the_boundary() {
        // Just inside at ±1e-8 before the endpoint, just outside beyond it.
        let spec = unit_ball(2);
        let x = dvector![0.2, -0.1];
        let chord = chord_endpoints(&spec, &x, &dvector![1.0, 2.0]).unwrap();
        for t in [chord.t_backward, chord.t_forward] {
            let inside = chord.at(t - 1e-8 * t.signum());
            let outside = chord.at(t + 1e-8 * t.signum());
            assert!(spec.contains(&inside));
            assert!(!spec.contains(&outside));
        }
    }

    #[test]
    fn unbounded_ray_is_reported() {
        // A slab is unbounded along its free direction.
        let slab = BodySpec::polytope(
            nalgebra::dmatrix![1.0, 0.0; -1.0, 0.0],
            dvector![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            chord_endpoints(&slab, &dvector![0.0, 0.0], &dvector![0.0, 1.0]),
            Err(Error::UnboundedBody(_))
        ));
    }

    #[test]
    fn hilbert_interval_value() {
        // |x−y| = ½, |p−q| = 2, |p−x| = 1, |q−y| = ½ gives ln 3.
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let d = hilbert_distance(&interval, &dvector![0.0], &dvector![0.5]).unwrap();
        assert!((d - 3.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn hilbert_zero_and_symmetry() {
        let square = unit_square();
        let x = dvector![0.2, 0.3];
        let y = dvector![-0.4, 0.1];
        assert_eq!(hilbert_distance(&square, &x, &x).unwrap(), 0.0);
        let dxy = hilbert_distance(&square, &x, &y).unwrap();
        let dyx = hilbert_distance(&square, &y, &x).unwrap();
        assert!((dxy - dyx).abs() < 1e-10);
    }

    #[test]
    fn hilbert_additive_along_chords() {
        let square = unit_square();
        let x = dvector![-0.5, -0.25];
        let y = dvector![0.6, 0.3];
        let z = dvector![0.1, 0.05]; // on the segment between them
        let dxz = hilbert_distance(&square, &x, &z).unwrap();
        let dzy = hilbert_distance(&square, &z, &y).unwrap();
        let dxy = hilbert_distance(&square, &x, &y).unwrap();
        assert!((dxz + dzy - dxy).abs() < 1e-9);
    }

    #[test]
    fn gauge_unit_ball_center() {
        let ball = unit_ball(2);
        let g = symmetric_gauge(&ball, &dvector![0.0, 0.0], &dvector![1.0, 0.0]).unwrap();
        assert!((g - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gauge_square_off_center() {
        // α* = ½ limited by the +v side, so the gauge is 2.
        let square = unit_square();
        let g = symmetric_gauge(&square, &dvector![0.5, 0.0], &dvector![1.0, 0.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gauge_is_homogeneous() {
        let square = unit_square();
        let x = dvector![0.3, -0.2];
        let v = dvector![0.4, 1.1];
        let g1 = symmetric_gauge(&square, &x, &v).unwrap();
        let g3 = symmetric_gauge(&square, &x, &(&v * 3.0)).unwrap();
        assert!((g3 - 3.0 * g1).abs() < 1e-7 * g1.max(1.0));
    }

    #[test]
    fn riemannian_distance_converges_and_is_sandwiched() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let w = crate::body::BarrierWeights::defaults(1);
        let x = dvector![0.0];
        let y = dvector![0.5];
        let coarse = riemannian_distance_approx(&interval, &w, &x, &y, 64).unwrap();
        let fine = riemannian_distance_approx(&interval, &w, &x, &y, 128).unwrap();
        assert!((coarse - fine).abs() / fine < 0.01);

        // Norm-distance sandwich: t − t² ≤ d ≤ −ln(1 − t) for t = ‖x−y‖_x < 1.
        let eval = barrier::aggregate_barrier_eval(&interval, &w, &x).unwrap();
        let t = linalg::local_norm(&eval.hessian, &(&y - &x));
        assert!(t < 1.0);
        assert!(fine >= t - t * t - 1e-9);
        assert!(fine <= -(1.0 - t).ln() + 1e-9);
    }

    #[test]
    fn riemannian_distance_zero_for_equal_points() {
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let w = crate::body::BarrierWeights::defaults(1);
        let x = dvector![0.3];
        assert_eq!(
            riemannian_distance_approx(&interval, &w, &x, &x, 16).unwrap(),
            0.0
        );
    }

    #[test]
    fn gauge_sandwich_ball_center() {
        // Gauge 1, norm √2, hyperbolic factor √2: equality at the top.
        let ball = unit_ball(2);
        let reports =
            gauge_sandwich_check(&ball, &dvector![0.0, 0.0], &dvector![1.0, 0.0]).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert!((r.gauge - 1.0).abs() < 1e-8);
        assert!((r.norm - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(r.lower_ok && r.upper_ok, "{r:?}");
    }

    #[test]
    fn gauge_sandwich_interval_near_boundary() {
        // At x = 0.9: gauge 10, norm √(1/0.01 + 1/3.61) ≈ 10.014, √m = √2.
        let interval = BodySpec::cube(1, 1.0).unwrap();
        let reports =
            gauge_sandwich_check(&interval, &dvector![0.9], &dvector![1.0]).unwrap();
        let r = &reports[0];
        assert!((r.gauge - 10.0).abs() < 1e-6);
        let expected = (1.0f64 / 0.01 + 1.0 / 3.61).sqrt();
        assert!((r.norm - expected).abs() < 1e-9);
        assert!(r.lower_ok && r.upper_ok);
    }

    #[test]
    fn gauge_sandwich_holds_across_random_points() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let bodies = [unit_square(), unit_ball(2)];
        for spec in &bodies {
            for _ in 0..50 {
                let x = loop {
                    let cand = dvector![
                        rng.random_range(-0.95..0.95),
                        rng.random_range(-0.95..0.95)
                    ];
                    if spec.contains(&cand) {
                        break cand;
                    }
                };
                let v = dvector![
                    rng.random_range(-1.0..1.0f64),
                    rng.random_range(-1.0..1.0)
                ];
                if v.norm() < 1e-3 {
                    continue;
                }
                for r in gauge_sandwich_check(spec, &x, &v).unwrap() {
                    assert!(r.lower_ok && r.upper_ok, "{r:?} at x={x:?} v={v:?}");
                }
            }
        }
    }

    #[test]
    fn cross_ratio_definition() {
        // (a:b:c:d) with a,b,c,d = 2,0,1,-1 is ((2-1)(0+1))/((2+1)(0-1)) = -1/3.
        assert!((cross_ratio(2.0, 0.0, 1.0, -1.0) + 1.0 / 3.0).abs() < 1e-15);
        assert!((cross_ratio_inf(0.0, 1.0, -1.0) + 1.0).abs() < 1e-15);
    }
}
