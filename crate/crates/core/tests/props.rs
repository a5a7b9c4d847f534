//! Property tests of the cheap algebraic invariants.

use nalgebra::{dvector, DMatrix, DVector};
use proptest::prelude::*;

use dikin_core::body::BodySpec;
use dikin_core::geometry::symmetric_gauge;
use dikin_core::linalg::local_norm;
use dikin_core::optimizer::{projective_inverse, projective_map, tau_budget};

proptest! {
    // ‖t·v‖_H = |t|·‖v‖_H for any SPD H built as AᵀA + I.
    #[test]
    fn local_norm_is_absolutely_homogeneous(
        entries in proptest::array::uniform4(-3.0..3.0f64),
        v0 in -5.0..5.0f64,
        v1 in -5.0..5.0f64,
        t in -4.0..4.0f64,
    ) {
        let a = DMatrix::from_row_slice(2, 2, &entries);
        let h = a.transpose() * &a + DMatrix::identity(2, 2);
        let v = dvector![v0, v1];
        let lhs = local_norm(&h, &(&v * t));
        let rhs = t.abs() * local_norm(&h, &v);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    // The symmetric gauge scales linearly in its direction argument.
    #[test]
    fn gauge_scales_with_the_direction(
        x0 in -0.8..0.8f64,
        x1 in -0.8..0.8f64,
        v0 in -1.0..1.0f64,
        v1 in -1.0..1.0f64,
        t in 0.1..5.0f64,
    ) {
        prop_assume!(v0.abs() + v1.abs() > 1e-3);
        let square = BodySpec::cube(2, 1.0).unwrap();
        let x = dvector![x0, x1];
        let v = dvector![v0, v1];
        let g1 = symmetric_gauge(&square, &x, &v).unwrap();
        let gt = symmetric_gauge(&square, &x, &(&v * t)).unwrap();
        prop_assert!((gt - t * g1).abs() <= 1e-6 * (t * g1).max(1.0));
    }

    // T⁻¹ ∘ T is the identity wherever T is defined.
    #[test]
    fn projective_roundtrip(
        x0 in -0.9..0.9f64,
        x1 in -0.9..0.9f64,
        c0 in -1.0..1.0f64,
        c1 in -1.0..1.0f64,
    ) {
        let c = dvector![c0, c1];
        let x = dvector![x0, x1];
        prop_assume!(c.dot(&x) < 0.95);
        let y = projective_map(&c, &x).unwrap();
        let back = projective_inverse(&c, &y).unwrap();
        prop_assert!((back - &x).amax() <= 1e-10);
    }

    // The step budget never decreases in any of its arguments.
    #[test]
    fn tau_budget_is_monotone(
        n in 1usize..20,
        nu in 1.0..100.0f64,
        s in 1.0..50.0f64,
        eps in 0.01..0.5f64,
        delta in 0.01..0.5f64,
    ) {
        let base = tau_budget(n, nu, s, eps, delta, 1.0, 1.0);
        prop_assert!(tau_budget(n + 1, nu, s, eps, delta, 1.0, 1.0) >= base);
        prop_assert!(tau_budget(n, nu * 1.5, s, eps, delta, 1.0, 1.0) >= base);
        prop_assert!(tau_budget(n, nu, s * 1.5, eps, delta, 1.0, 1.0) >= base);
        prop_assert!(tau_budget(n, nu, s, eps * 0.5, delta, 1.0, 1.0) >= base);
        prop_assert!(tau_budget(n, nu, s, eps, delta * 0.5, 1.0, 1.0) >= base);
    }
}

// Membership of the emitted stream is preserved under thinning and
// burn-in bookkeeping (a plain test; the chain itself is exercised all
// over the suite).
#[test]
fn emitted_sample_count_matches_the_bookkeeping() {
    use dikin_core::chain::{run_chain, ChainConfig};
    let square = BodySpec::cube(2, 1.0).unwrap();
    let config = ChainConfig {
        max_steps: 1000,
        burn_in: 100,
        thinning: 7,
        seed: 8,
        ..ChainConfig::default()
    };
    let run = run_chain(&square, &square.weights(), &config, &DVector::zeros(2)).unwrap();
    assert_eq!(run.samples.len(), (1000 - 100) / 7);
}
