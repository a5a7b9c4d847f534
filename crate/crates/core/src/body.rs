//! Convex-body specifications.
//!
//! A body is the intersection of up to three kinds of constraint parts:
//! linear inequalities `Ax ≤ b`, a semidefinite slice `∑ xᵢ Aᵢ ⪯ B`, and
//! ellipsoids `‖Aⱼ⁻¹(x − cⱼ)‖ < 1`. The origin is the canonical start of
//! every walk and must be strictly interior to each part.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Linear part `{x : Ax < b}` (strict interior).
#[derive(Clone, Debug)]
pub struct LinearPart {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearPart {
    /// Slack vector `b − Ax`.
    pub fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b - &self.a * x
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.slacks(x).iter().all(|s| *s > 0.0)
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }
}

/// Semidefinite slice `{x : S(x) = B − ∑ xᵢ Aᵢ ≻ 0}`.
#[derive(Clone, Debug)]
pub struct PsdPart {
    pub coeffs: Vec<DMatrix<f64>>,
    pub bound: DMatrix<f64>,
}

impl PsdPart {
    /// `S(x) = B − ∑ xᵢ Aᵢ`.
    pub fn slack_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut s = self.bound.clone();
        for (i, ai) in self.coeffs.iter().enumerate() {
            s -= ai * x[i];
        }
        s
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        Cholesky::new(self.slack_matrix(x)).is_some()
    }

    /// Side length of the constraint matrices.
    pub fn size(&self) -> usize {
        self.bound.nrows()
    }
}

/// One ellipsoid `{x : ‖A⁻¹(x − c)‖ < 1}` with nonsingular `A`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub shape: DMatrix<f64>,
    pub center: DVector<f64>,
    inv: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(shape: DMatrix<f64>, center: DVector<f64>) -> Result<Self> {
        let inv = shape.clone().try_inverse().ok_or_else(|| Error::InvalidSpec {
            field: "ellipsoids".into(),
            message: "ellipsoid matrix is singular".into(),
        })?;
        Ok(Ellipsoid { shape, center, inv })
    }

    /// `u = A⁻¹(x − c)`.
    pub fn pullback(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.inv * (x - &self.center)
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.pullback(x).norm_squared() < 1.0
    }
}

/// Aggregation weights of Def-4 type: `w_ℓ F_ℓ + w_h F_h + w_s F_s`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BarrierWeights {
    pub linear: f64,
    pub hyperbolic: f64,
    pub generic: f64,
}

impl BarrierWeights {
    /// Defaults for an `n`-dimensional body: `(1, n, n²)`.
    pub fn defaults(n: usize) -> Self {
        let nf = n as f64;
        BarrierWeights {
            linear: 1.0,
            hyperbolic: nf,
            generic: nf * nf,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("l", self.linear),
            ("h", self.hyperbolic),
            ("s", self.generic),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidSpec {
                    field: format!("weights.{name}"),
                    message: "weights must be finite and nonnegative".into(),
                });
            }
        }
        Ok(())
    }
}

/// Declarative description of the body.
#[derive(Clone, Debug)]
pub struct BodySpec {
    dim: usize,
    linear: Option<LinearPart>,
    psd: Option<PsdPart>,
    ellipsoids: Vec<Ellipsoid>,
    weights: BarrierWeights,
}

impl BodySpec {
    pub fn new(
        dim: usize,
        linear: Option<LinearPart>,
        psd: Option<PsdPart>,
        ellipsoids: Vec<Ellipsoid>,
        weights: Option<BarrierWeights>,
    ) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| BarrierWeights::defaults(dim));
        let spec = BodySpec {
            dim,
            linear,
            psd,
            ellipsoids,
            weights,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Convenience constructor for `{x : Ax < b}`.
    pub fn polytope(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let dim = a.ncols();
        BodySpec::new(dim, Some(LinearPart { a, b }), None, Vec::new(), None)
    }

    /// The axis-aligned cube `{|xᵢ| ≤ half}` in `n` dimensions.
    pub fn cube(n: usize, half: f64) -> Result<Self> {
        let mut a = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            a[(2 * i, i)] = 1.0;
            a[(2 * i + 1, i)] = -1.0;
        }
        let b = DVector::from_element(2 * n, half);
        BodySpec::polytope(a, b)
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec {
                field: "dimension".into(),
                message: "dimension must be positive".into(),
            });
        }
        if self.linear.is_none() && self.psd.is_none() && self.ellipsoids.is_empty() {
            return Err(Error::InvalidSpec {
                field: "<root>".into(),
                message: "at least one constraint part is required".into(),
            });
        }
        self.weights.validate()?;

        if let Some(lin) = &self.linear {
            if lin.a.ncols() != self.dim {
                return Err(Error::InvalidSpec {
                    field: "linear.A".into(),
                    message: format!(
                        "has {} columns, dimension is {}",
                        lin.a.ncols(),
                        self.dim
                    ),
                });
            }
            if lin.b.len() != lin.a.nrows() {
                return Err(Error::InvalidSpec {
                    field: "linear.b".into(),
                    message: format!(
                        "has {} entries, A has {} rows",
                        lin.b.len(),
                        lin.a.nrows()
                    ),
                });
            }
            // Origin feasibility is simply b > 0.
            if let Some(i) = lin.b.iter().position(|bi| *bi <= 0.0) {
                return Err(Error::InvalidSpec {
                    field: "linear.b".into(),
                    message: format!("entry {i} makes the origin infeasible (b[{i}] ≤ 0)"),
                });
            }
        }

        if let Some(psd) = &self.psd {
            if psd.coeffs.len() != self.dim {
                return Err(Error::InvalidSpec {
                    field: "psd.Ai".into(),
                    message: format!(
                        "expected {} coefficient matrices, found {}",
                        self.dim,
                        psd.coeffs.len()
                    ),
                });
            }
            let size = psd.bound.nrows();
            check_symmetric(&psd.bound, size, "psd.B")?;
            for (i, ai) in psd.coeffs.iter().enumerate() {
                check_symmetric(ai, size, &format!("psd.Ai[{i}]"))?;
            }
            if Cholesky::new(psd.bound.clone()).is_none() {
                return Err(Error::InvalidSpec {
                    field: "psd.B".into(),
                    message: "origin infeasible: B is not positive definite".into(),
                });
            }
        }

        for (j, ell) in self.ellipsoids.iter().enumerate() {
            if ell.shape.nrows() != self.dim || ell.shape.ncols() != self.dim {
                return Err(Error::InvalidSpec {
                    field: format!("ellipsoids[{j}].A"),
                    message: format!(
                        "must be {n}×{n}, found {}×{}",
                        ell.shape.nrows(),
                        ell.shape.ncols(),
                        n = self.dim
                    ),
                });
            }
            if ell.center.len() != self.dim {
                return Err(Error::InvalidSpec {
                    field: format!("ellipsoids[{j}].center"),
                    message: format!("must have {} entries", self.dim),
                });
            }
            if !ell.contains(&DVector::zeros(self.dim)) {
                return Err(Error::InvalidSpec {
                    field: format!("ellipsoids[{j}]"),
                    message: "origin infeasible: ‖A⁻¹ c‖ ≥ 1".into(),
                });
            }
        }

        // All-zero weights on the present parts leave the walk without a
        // positive-definite Hessian anywhere; reject at construction.
        let mut any_weighted = false;
        if self.linear.is_some() && self.weights.linear > 0.0 {
            any_weighted = true;
        }
        if (self.psd.is_some() || !self.ellipsoids.is_empty()) && self.weights.hyperbolic > 0.0 {
            any_weighted = true;
        }
        if !any_weighted {
            return Err(Error::InvalidSpec {
                field: "weights".into(),
                message: "every present part has weight zero; the barrier would be degenerate"
                    .into(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn linear(&self) -> Option<&LinearPart> {
        self.linear.as_ref()
    }

    pub fn psd(&self) -> Option<&PsdPart> {
        self.psd.as_ref()
    }

    pub fn ellipsoids(&self) -> &[Ellipsoid] {
        &self.ellipsoids
    }

    pub fn weights(&self) -> BarrierWeights {
        self.weights
    }

    /// Number of linear constraints `m`.
    pub fn num_linear(&self) -> usize {
        self.linear.as_ref().map_or(0, |l| l.rows())
    }

    /// Hyperbolic parameter of the body: PSD matrix size plus 2 per
    /// ellipsoid (each `−ln(1 − ‖u‖²)` term counts 2).
    pub fn nu_hyperbolic(&self) -> usize {
        self.psd.as_ref().map_or(0, |p| p.size()) + 2 * self.ellipsoids.len()
    }

    /// Generic-part parameter; no plug-in barriers exist, so zero.
    pub fn nu_generic(&self) -> usize {
        0
    }

    /// Strict membership: every part must hold with strict inequality,
    /// so boundary points return `false`.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        if let Some(lin) = &self.linear {
            if !lin.contains(x) {
                return false;
            }
        }
        if let Some(psd) = &self.psd {
            if !psd.contains(x) {
                return false;
            }
        }
        self.ellipsoids.iter().all(|e| e.contains(x))
    }

    /// `contains` with a dimension check, for external callers.
    pub fn membership(&self, x: &DVector<f64>) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "membership",
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.contains(x))
    }

    /// Image of the body under `y = M x + t` for nonsingular `M`.
    ///
    /// The image carries the transported constraint data, so its barrier
    /// is exactly `F(M⁻¹(y − t))`. Fails if the origin is not strictly
    /// interior to the image.
    pub fn affine_image(&self, m: &DMatrix<f64>, t: &DVector<f64>) -> Result<BodySpec> {
        if m.nrows() != self.dim || m.ncols() != self.dim || t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "affine_image",
                expected: self.dim,
                found: m.nrows(),
            });
        }
        let m_inv = m.clone().try_inverse().ok_or_else(|| {
            Error::Numeric("affine_image: the matrix is singular".into())
        })?;

        let linear = self.linear.as_ref().map(|lin| {
            let a = &lin.a * &m_inv;
            let b = &lin.b + &a * t;
            LinearPart { a, b }
        });

        let psd = self.psd.as_ref().map(|psd| {
            let shift = &m_inv * t;
            let mut bound = psd.bound.clone();
            let mut coeffs = vec![DMatrix::zeros(psd.size(), psd.size()); self.dim];
            for (i, ai) in psd.coeffs.iter().enumerate() {
                bound += ai * shift[i];
                for (j, cj) in coeffs.iter_mut().enumerate() {
                    *cj += ai * m_inv[(i, j)];
                }
            }
            PsdPart { coeffs, bound }
        });

        let ellipsoids = self
            .ellipsoids
            .iter()
            .map(|e| Ellipsoid::new(m * &e.shape, m * &e.center + t))
            .collect::<Result<Vec<_>>>()?;

        BodySpec::new(self.dim, linear, psd, ellipsoids, Some(self.weights))
    }

    /// `copies`-fold direct product of this body with itself, encoded as
    /// block constraints on the concatenated coordinates. The factor's
    /// weights carry over so the product barrier is the sum of factor
    /// barriers. Ellipsoid parts do not block-compose in this encoding.
    pub fn direct_product(&self, copies: usize) -> Result<BodySpec> {
        if copies == 0 {
            return Err(Error::InvalidConfig("product needs at least one copy".into()));
        }
        if !self.ellipsoids.is_empty() {
            return Err(Error::InvalidConfig(
                "direct products of ellipsoid parts are not supported".into(),
            ));
        }
        let n = self.dim;
        let big_n = n * copies;

        let linear = self.linear.as_ref().map(|lin| {
            let m = lin.rows();
            let mut a = DMatrix::zeros(m * copies, big_n);
            let mut b = DVector::zeros(m * copies);
            for k in 0..copies {
                a.view_mut((k * m, k * n), (m, n)).copy_from(&lin.a);
                b.rows_mut(k * m, m).copy_from(&lin.b);
            }
            LinearPart { a, b }
        });

        let psd = self.psd.as_ref().map(|psd| {
            let sz = psd.size();
            let big_sz = sz * copies;
            let mut bound = DMatrix::zeros(big_sz, big_sz);
            let mut coeffs = Vec::with_capacity(big_n);
            for k in 0..copies {
                bound
                    .view_mut((k * sz, k * sz), (sz, sz))
                    .copy_from(&psd.bound);
            }
            for k in 0..copies {
                for ai in &psd.coeffs {
                    let mut big = DMatrix::zeros(big_sz, big_sz);
                    big.view_mut((k * sz, k * sz), (sz, sz)).copy_from(ai);
                    coeffs.push(big);
                }
            }
            PsdPart { coeffs, bound }
        });

        BodySpec::new(big_n, linear, psd, Vec::new(), Some(self.weights))
    }
}

fn check_symmetric(m: &DMatrix<f64>, size: usize, field: &str) -> Result<()> {
    if m.nrows() != size || m.ncols() != size {
        return Err(Error::InvalidSpec {
            field: field.into(),
            message: format!(
                "must be {size}×{size}, found {}×{}",
                m.nrows(),
                m.ncols()
            ),
        });
    }
    if crate::linalg::symmetry_defect(m) > 1e-12 {
        return Err(Error::InvalidSpec {
            field: field.into(),
            message: "matrix is not symmetric".into(),
        });
    }
    Ok(())
}

// --- JSON document -------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyDoc {
    dimension: usize,
    #[serde(default)]
    linear: Option<LinearDoc>,
    #[serde(default)]
    psd: Option<PsdDoc>,
    #[serde(default)]
    ellipsoids: Option<Vec<EllipsoidDoc>>,
    #[serde(default)]
    weights: Option<WeightsDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PsdDoc {
    #[serde(rename = "Ai")]
    ai: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    center: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsDoc {
    #[serde(default)]
    l: Option<f64>,
    #[serde(default)]
    h: Option<f64>,
    #[serde(default)]
    s: Option<f64>,
}

fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::InvalidSpec {
            field: field.into(),
            message: "matrix has no rows".into(),
        });
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::InvalidSpec {
            field: field.into(),
            message: "matrix has empty rows".into(),
        });
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::InvalidSpec {
                field: format!("{field}[{i}]"),
                message: format!("row has {} entries, expected {ncols}", r.len()),
            });
        }
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().copied(),
    ))
}

/// Parses and validates a body document (JSON). Unknown fields are hard
/// errors; every validation failure names the offending field path.
pub fn parse_body_spec(document: &str) -> Result<BodySpec> {
    let doc: BodyDoc = serde_json::from_str(document)?;
    let n = doc.dimension;

    let linear = doc
        .linear
        .map(|lin| -> Result<LinearPart> {
            let a = matrix_from_rows(&lin.a, "linear.A")?;
            let b = DVector::from_vec(lin.b);
            Ok(LinearPart { a, b })
        })
        .transpose()?;

    let psd = doc
        .psd
        .map(|p| -> Result<PsdPart> {
            let bound = matrix_from_rows(&p.b, "psd.B")?;
            let coeffs = p
                .ai
                .iter()
                .enumerate()
                .map(|(i, m)| matrix_from_rows(m, &format!("psd.Ai[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(PsdPart { coeffs, bound })
        })
        .transpose()?;

    let ellipsoids = doc
        .ellipsoids
        .unwrap_or_default()
        .into_iter()
        .enumerate()
        .map(|(j, e)| {
            let shape = matrix_from_rows(&e.a, &format!("ellipsoids[{j}].A"))?;
            Ellipsoid::new(shape, DVector::from_vec(e.center))
        })
        .collect::<Result<Vec<_>>>()?;

    let weights = doc.weights.map(|w| {
        let d = BarrierWeights::defaults(n);
        BarrierWeights {
            linear: w.l.unwrap_or(d.linear),
            hyperbolic: w.h.unwrap_or(d.hyperbolic),
            generic: w.s.unwrap_or(d.generic),
        }
    });

    BodySpec::new(n, linear, psd, ellipsoids, weights)
}
