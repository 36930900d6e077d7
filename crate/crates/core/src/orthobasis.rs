//! Data-adapted orthonormal polynomial bases.
//!
//! The basis is orthonormal under the discrete inner product
//! `<h, g> = Σ_k h(x_k) g(x_k)` over the sample points. It is built with a
//! multivariate Stieltjes process: each new basis function is a previous one
//! multiplied by a coordinate, then Gram–Schmidt orthogonalized against all
//! earlier ones. The Gram–Schmidt coefficients form a recurrence that
//! evaluates the basis at arbitrary points without ever forming a monomial.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{self, alpha, MultiIndexOrder};

/// Relative threshold on the recurrence diagonal below which the sample set is
/// declared rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Orthonormal basis of `P_L^n` together with its recurrence coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    order: MultiIndexOrder,
    /// Dense `len × len` matrix, row-major; `r[l * len + i]` is `r_{l,i}` for `l <= i`.
    recurrence: Vec<f64>,
    norm0: f64,
}

/// Serialized form of an [`OrthonormalBasis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisData {
    pub n: usize,
    #[serde(rename = "L")]
    pub max_degree: usize,
    pub norm0: f64,
    #[serde(rename = "R")]
    pub recurrence: Vec<f64>,
}

impl OrthonormalBasis {
    /// Builds the basis of total degree `max_degree` for the given points and
    /// returns it together with the `K × α(L)` matrix of basis values at the points.
    ///
    /// Each column is orthogonalized twice.
    pub fn build(points: &[Vec<f64>], max_degree: usize) -> Result<(Self, DMatrix<f64>)> {
        let k_count = points.len();
        if k_count == 0 {
            return Err(Error::InvalidInput("no sample points".into()));
        }
        let n = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let order = MultiIndexOrder::generate(n, max_degree)?;
        let len = order.len();
        if k_count < len {
            return Err(Error::Underdetermined {
                needed: len,
                available: k_count,
            });
        }

        let norm0 = (k_count as f64).sqrt();
        let mut v = DMatrix::<f64>::zeros(k_count, len);
        v.column_mut(0).fill(1.0 / norm0);
        let mut r = vec![0.0; len * len];
        let mut largest_diag = 0.0f64;
        let mut failure = None;

        multiindex::sweep(n, max_degree, |i, k, var| {
            if failure.is_some() {
                return;
            }
            let mut col: Vec<f64> = (0..k_count).map(|row| points[row][var] * v[(row, k)]).collect();
            let initial_norm = norm(&col);
            for _pass in 0..2 {
                for l in 0..i {
                    let vl = v.column(l);
                    let coeff: f64 = vl.iter().zip(&col).map(|(a, b)| a * b).sum();
                    for (c, a) in col.iter_mut().zip(vl.iter()) {
                        *c -= coeff * a;
                    }
                    r[l * len + i] += coeff;
                }
            }
            let diag = norm(&col);
            let tolerance = RANK_TOLERANCE * largest_diag.max(initial_norm);
            if !(diag > tolerance) {
                failure = Some(Error::RankDeficient {
                    degree: max_degree,
                    column: i,
                    norm: diag,
                    tolerance,
                });
                return;
            }
            largest_diag = largest_diag.max(diag);
            r[i * len + i] = diag;
            for (row, c) in col.iter().enumerate() {
                v[(row, i)] = c / diag;
            }
        });

        if let Some(err) = failure {
            return Err(err);
        }
        Ok((
            Self {
                order,
                recurrence: r,
                norm0,
            },
            v,
        ))
    }

    pub fn from_data(data: BasisData) -> Result<Self> {
        let order = MultiIndexOrder::generate(data.n, data.max_degree)?;
        let len = order.len();
        if data.recurrence.len() != len * len {
            return Err(Error::DimensionMismatch {
                expected: len * len,
                got: data.recurrence.len(),
            });
        }
        if !(data.norm0 > 0.0) {
            return Err(Error::InvalidInput("norm0 must be positive".into()));
        }
        if (1..len).any(|i| !(data.recurrence[i * len + i] > 0.0)) {
            return Err(Error::InvalidInput("recurrence diagonal must be positive".into()));
        }
        Ok(Self {
            order,
            recurrence: data.recurrence,
            norm0: data.norm0,
        })
    }

    pub fn to_data(&self) -> BasisData {
        BasisData {
            n: self.n(),
            max_degree: self.max_degree(),
            norm0: self.norm0,
            recurrence: self.recurrence.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    pub fn max_degree(&self) -> usize {
        self.order.max_degree()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &MultiIndexOrder {
        &self.order
    }

    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    /// Recurrence coefficient `r_{l,i}`.
    pub fn coefficient(&self, l: usize, i: usize) -> f64 {
        self.recurrence[l * self.len() + i]
    }

    /// Writes `φ_0(x), …, φ_{len-1}(x)` into `out` via the recurrence.
    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        let len = self.len();
        out[0] = 1.0 / self.norm0;
        multiindex::sweep(self.n(), self.max_degree(), |i, k, var| {
            let column = &self.recurrence[..];
            let mut y = x[var] * out[k];
            for l in 0..i {
                y -= column[l * len + i] * out[l];
            }
            out[i] = y / column[i * len + i];
        });
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.evaluate_into(x, &mut out);
        out
    }

    /// `Σ c_j φ_j(x)`; the coefficients may cover any prefix of the basis.
    pub fn evaluate_series(&self, coeffs: &[f64], x: &[f64]) -> Result<f64> {
        if coeffs.len() > self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        let phi = self.evaluate(x);
        Ok(coeffs.iter().zip(&phi).map(|(c, p)| c * p).sum())
    }

    /// Basis values at many points as a `points × len` matrix.
    pub fn evaluate_matrix(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let len = self.len();
        let mut m = DMatrix::zeros(points.len(), len);
        let mut buf = vec![0.0; len];
        for (row, p) in points.iter().enumerate() {
            self.evaluate_into(p, &mut buf);
            for (j, b) in buf.iter().enumerate() {
                m[(row, j)] = *b;
            }
        }
        m
    }

    /// Number of basis functions of degree at most `d`.
    pub fn prefix_len(&self, d: usize) -> usize {
        alpha(self.n(), d.min(self.max_degree())).expect("valid prefix")
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::sampling::{lhs, DesignSpec};
    use crate::testfns::TestFunction;

    fn gram_error(v: &DMatrix<f64>) -> f64 {
        let g = v.transpose() * v;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    fn lhs_points(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
        lhs(&DesignSpec {
            domain: BoxDomain::cube(n, -1.0, 1.0).unwrap(),
            count: k,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn orthonormal_on_lhs_points() {
        let pts = lhs_points(2, 84, 3);
        let (basis, v) = OrthonormalBasis::build(&pts, 5).unwrap();
        assert_eq!(v.ncols(), 21);
        assert!(gram_error(&v) <= 1e-12, "gram error {}", gram_error(&v));
        for row in 0..84 {
            assert!((v[(row, 0)] - 1.0 / 84f64.sqrt()).abs() < 1e-15);
        }
        for i in 1..basis.len() {
            assert!(basis.coefficient(i, i) > 0.0);
        }
    }

    #[test]
    fn single_point_constant_basis() {
        let (basis, v) = OrthonormalBasis::build(&[vec![0.3, 0.4]], 0).unwrap();
        assert_eq!(v.shape(), (1, 1));
        assert_eq!(v[(0, 0)], 1.0);
        assert_eq!(basis.norm0(), 1.0);
        assert_eq!(basis.evaluate(&[5.0, -2.0]), vec![1.0]);
    }

    #[test]
    fn univariate_recurrence_has_three_terms() {
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|k| vec![((2 * k + 1) as f64 * std::f64::consts::PI / 40.0).cos()])
            .collect();
        let (basis, _) = OrthonormalBasis::build(&pts, 3).unwrap();
        for i in 1..basis.len() {
            for l in 0..i.saturating_sub(2) {
                assert!(basis.coefficient(l, i).abs() <= 1e-10, "r[{l},{i}]");
            }
        }
    }

    #[test]
    fn recurrence_reproduces_rows() {
        let pts = lhs_points(3, 120, 9);
        let (basis, v) = OrthonormalBasis::build(&pts, 4).unwrap();
        for (k, p) in pts.iter().enumerate() {
            let phi = basis.evaluate(p);
            for j in 0..basis.len() {
                assert!((phi[j] - v[(k, j)]).abs() <= 1e-10);
            }
        }
        assert_eq!(basis.evaluate(&[9.0, 9.0, 9.0])[0], 1.0 / basis.norm0());
    }

    #[test]
    fn projection_reconstructs_polynomial() {
        let pts = lhs_points(2, 84, 11);
        let (basis, v) = OrthonormalBasis::build(&pts, 5).unwrap();
        let poly = |x: &[f64]| 1.0 - 2.0 * x[0] + x[0] * x[1].powi(3) + 0.5 * x[1].powi(5);
        let f = nalgebra::DVector::from_iterator(84, pts.iter().map(|p| poly(p)));
        let c = v.transpose() * f;
        let fresh = lhs_points(2, 100, 12);
        for p in &fresh {
            let s = basis.evaluate_series(c.as_slice(), p).unwrap();
            assert!((s - poly(p)).abs() <= 1e-9 * poly(p).abs().max(1.0));
        }
    }

    #[test]
    fn series_examples() {
        let pts = lhs_points(2, 40, 5);
        let (basis, v) = OrthonormalBasis::build(&pts, 2).unwrap();
        let mut e0 = vec![0.0; basis.len()];
        e0[0] = 1.0;
        let zeros = vec![0.0; basis.len()];
        let f22 = TestFunction::by_id("f22").unwrap();
        let f = nalgebra::DVector::from_iterator(40, pts.iter().map(|p| f22.eval(p)));
        let c = v.transpose() * f;
        for p in lhs_points(2, 25, 6) {
            assert!((basis.evaluate_series(&e0, &p).unwrap() - 1.0 / basis.norm0()).abs() < 1e-15);
            assert_eq!(basis.evaluate_series(&zeros, &p).unwrap(), 0.0);
            let s = basis.evaluate_series(c.as_slice(), &p).unwrap();
            assert!((s - f22.eval(&p)).abs() <= 1e-9 * f22.eval(&p).abs().max(1.0));
        }
        assert!(basis.evaluate_series(&[0.0; 7], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn collinear_points_are_rank_deficient() {
        let pts: Vec<Vec<f64>> = (0..30).map(|k| vec![k as f64 / 29.0, 0.5]).collect();
        match OrthonormalBasis::build(&pts, 2) {
            Err(Error::RankDeficient { column, .. }) => assert_eq!(column, 2),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn too_few_points() {
        let pts = lhs_points(2, 5, 1);
        assert!(matches!(
            OrthonormalBasis::build(&pts, 2),
            Err(Error::Underdetermined { needed: 6, available: 5 })
        ));
    }

    #[test]
    fn data_round_trip() {
        let pts = lhs_points(2, 30, 2);
        let (basis, _) = OrthonormalBasis::build(&pts, 3).unwrap();
        let back = OrthonormalBasis::from_data(basis.to_data()).unwrap();
        assert_eq!(back, basis);
    }
}
