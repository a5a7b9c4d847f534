//! Dense SPD factorization and local-norm helpers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative reconstruction error the factorization must meet.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Cholesky factorization `H = L Lᵀ` of a symmetric positive-definite
/// Hessian.
///
/// Carries everything downstream code needs without re-factorizing:
/// solves `H⁻¹ v`, the whitening transform `L⁻ᵀ g` (so that `L⁻ᵀ g` has
/// covariance `H⁻¹` for standard Gaussian `g`), and `½ ln det H`.
#[derive(Clone, Debug)]
pub struct HessianFactor {
    chol: Cholesky<f64, Dyn>,
    lower: DMatrix<f64>,
}

impl HessianFactor {
    /// Factorizes `h`; fails with a numeric error if `h` is not
    /// positive definite to working precision.
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        let chol = Cholesky::new(h.clone())
            .ok_or_else(|| Error::Numeric("Hessian is not positive definite".into()))?;
        let lower = chol.l();
        let factor = HessianFactor { chol, lower };
        debug_assert!(
            factor.reconstruction_error(h) <= RECONSTRUCTION_TOL,
            "Cholesky reconstruction error above tolerance"
        );
        Ok(factor)
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `H⁻¹ v`.
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(v)
    }

    /// `L⁻ᵀ g`: maps a standard Gaussian to one with covariance `H⁻¹`.
    pub fn whiten_inverse(&self, g: &DVector<f64>) -> DVector<f64> {
        self.lower
            .transpose()
            .solve_upper_triangular(g)
            .expect("Cholesky factor has positive diagonal")
    }

    /// `½ ln det H`.
    pub fn half_log_det(&self) -> f64 {
        self.lower.diagonal().iter().map(|d| d.ln()).sum()
    }

    /// Max-norm error of `L Lᵀ` against `h`, relative to `max(1, |h|)`.
    pub fn reconstruction_error(&self, h: &DMatrix<f64>) -> f64 {
        let rebuilt = &self.lower * self.lower.transpose();
        let scale = h.amax().max(1.0);
        (rebuilt - h).amax() / scale
    }
}

/// Quadratic form `vᵀ H v`.
pub fn local_norm_sq(h: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(h * v))
}

/// Local norm `‖v‖ = √(vᵀ H v)`; zero vector maps to zero.
pub fn local_norm(h: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    local_norm_sq(h, v).max(0.0).sqrt()
}

/// Largest absolute entry of `m − mᵀ` relative to `max(1, |m|)`.
pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() / scale
}

/// Clamp tiny negative round-off in a should-be-symmetric product.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn local_norm_euclidean() {
        let h = DMatrix::identity(2, 2);
        assert_eq!(local_norm(&h, &dvector![3.0, 4.0]), 5.0);
    }

    #[test]
    fn local_norm_diagonal() {
        let h = dmatrix![4.0, 0.0; 0.0, 1.0];
        assert_eq!(local_norm(&h, &dvector![1.0, 0.0]), 2.0);
    }

    #[test]
    fn local_norm_scaled_identity() {
        // √(vᵀ (2I) v) with v = (1,1) is 2.
        let h = 2.0 * DMatrix::identity(2, 2);
        assert!((local_norm(&h, &dvector![1.0, 1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let h = dmatrix![2.0, 0.3; 0.3, 1.0];
        assert_eq!(local_norm(&h, &dvector![0.0, 0.0]), 0.0);
    }

    #[test]
    fn factor_roundtrip_and_logdet() {
        let h = dmatrix![4.0, 1.0, 0.5; 1.0, 3.0, 0.2; 0.5, 0.2, 2.0];
        let f = HessianFactor::new(&h).unwrap();
        assert!(f.reconstruction_error(&h) <= RECONSTRUCTION_TOL);

        let det = h.determinant();
        assert!((f.half_log_det() - 0.5 * det.ln()).abs() < 1e-12);

        let v = dvector![1.0, -2.0, 0.5];
        let solved = f.solve(&v);
        let back = &h * solved;
        assert!((back - &v).amax() < 1e-12);
    }

    #[test]
    fn whiten_inverse_matches_covariance() {
        let h = dmatrix![4.0, 1.0; 1.0, 3.0];
        let f = HessianFactor::new(&h).unwrap();
        // W Wᵀ must equal H⁻¹ where W g = whiten_inverse(g).
        let e0 = f.whiten_inverse(&dvector![1.0, 0.0]);
        let e1 = f.whiten_inverse(&dvector![0.0, 1.0]);
        let w = DMatrix::from_columns(&[e0, e1]);
        let wwt = &w * w.transpose();
        let hinv = h.try_inverse().unwrap();
        assert!((wwt - hinv).amax() < 1e-12);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let h = dmatrix![1.0, 2.0; 2.0, 1.0];
        assert!(HessianFactor::new(&h).is_err());
    }
}
