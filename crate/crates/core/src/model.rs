//! Fitted rational models `r(x) = p(x) / q(x)` and fit reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{AffineMap, BoxDomain};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::multiindex::{alpha, MultiIndexOrder};
use crate::orthobasis::OrthonormalBasis;

/// Basis in which the numerator and denominator coefficients are expressed.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelBasis {
    /// Data-adapted orthonormal polynomials, evaluated by recurrence on raw coordinates.
    Orthonormal(OrthonormalBasis),
    /// Monomials in the ordered sequence, evaluated on `map(x)`.
    Monomial { order: MultiIndexOrder, map: AffineMap },
}

impl ModelBasis {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelBasis::Orthonormal(_) => "orthonormal",
            ModelBasis::Monomial { .. } => "monomial",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ModelBasis::Orthonormal(b) => b.len(),
            ModelBasis::Monomial { order, .. } => order.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ModelBasis::Orthonormal(b) => b.evaluate_into(x, out),
            ModelBasis::Monomial { order, map } => {
                let t = map.apply(x);
                order.eval_monomials_into(&t, out);
            }
        }
    }
}

/// A rational function with numerator degree `m` and denominator degree `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalModel {
    basis: ModelBasis,
    numerator_degree: usize,
    denominator_degree: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    domain: BoxDomain,
}

impl RationalModel {
    pub fn new(
        basis: ModelBasis,
        numerator_degree: usize,
        denominator_degree: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        domain: BoxDomain,
    ) -> Result<Self> {
        let n = domain.dim();
        let (basis_n, basis_degree) = match &basis {
            ModelBasis::Orthonormal(ob) => (ob.n(), ob.max_degree()),
            ModelBasis::Monomial { order, map } => {
                if map.scale.len() != n || map.shift.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: map.scale.len(),
                    });
                }
                (order.n(), order.max_degree())
            }
        };
        if basis_n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: basis_n,
            });
        }
        if numerator_degree.max(denominator_degree) > basis_degree {
            return Err(Error::InvalidInput(format!(
                "basis degree {basis_degree} is below model degrees ({numerator_degree}, {denominator_degree})"
            )));
        }
        for (coeffs, degree) in [(&a, numerator_degree), (&b, denominator_degree)] {
            let expected = alpha(n, degree)?;
            if coeffs.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: coeffs.len(),
                });
            }
        }
        if b.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("denominator coefficients are all zero".into()));
        }
        Ok(Self {
            basis,
            numerator_degree,
            denominator_degree,
            a,
            b,
            domain,
        })
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    pub fn basis(&self) -> &ModelBasis {
        &self.basis
    }

    pub fn numerator_degree(&self) -> usize {
        self.numerator_degree
    }

    pub fn denominator_degree(&self) -> usize {
        self.denominator_degree
    }

    pub fn numerator_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn denominator_coeffs(&self) -> &[f64] {
        &self.b
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// `(p(x), q(x))`.
    pub fn eval_parts(&self, x: &[f64]) -> (f64, f64) {
        let mut phi = vec![0.0; self.basis.len()];
        self.eval_parts_with(x, &mut phi)
    }

    /// Like [`eval_parts`](Self::eval_parts) with a caller-provided scratch buffer
    /// of at least the basis length.
    pub fn eval_parts_with(&self, x: &[f64], phi: &mut [f64]) -> (f64, f64) {
        self.basis.evaluate_into(x, phi);
        (
            dot(&self.a, &phi[..self.a.len()]),
            dot(&self.b, &phi[..self.b.len()]),
        )
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (p, q) = self.eval_parts(x);
        p / q
    }

    pub fn denominator(&self, x: &[f64]) -> f64 {
        self.eval_parts(x).1
    }

    /// Checks the dimension of `x` before evaluating.
    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    pub fn eval_many(&self, points: &[Vec<f64>]) -> Vec<f64> {
        let mut phi = vec![0.0; self.basis.len()];
        points
            .iter()
            .map(|x| {
                let (p, q) = self.eval_parts_with(x, &mut phi);
                p / q
            })
            .collect()
    }
}

/// Diagnostics collected while fitting.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Singular values of the fit matrix, descending.
    pub singular_values: Vec<f64>,
    /// Degrees before degree reduction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_from: Option<(usize, usize)>,
    /// Set when the reciprocal-data phase of degree reduction was skipped
    /// because some sample value is numerically zero.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub numerator_phase_skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sip_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub added_points: Option<Vec<Vec<f64>>>,
    /// `false` when the pole-free loop hit its iteration cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    /// Relaxation objective per pole-free iteration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_history: Vec<f64>,
    /// Smallest denominator value found by the last global check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator_min: Option<f64>,
    pub wall_times: BTreeMap<String, f64>,
}

impl FitReport {
    pub(crate) fn time(&mut self, stage: &str, seconds: f64) {
        *self.wall_times.entry(stage.to_string()).or_insert(0.0) += seconds;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_model() -> RationalModel {
        let domain = BoxDomain::cube(2, 0.0, 2.0).unwrap();
        let order = MultiIndexOrder::generate(2, 1).unwrap();
        // p = 1 + t1, q = 2 + t2 on t = x - 1
        RationalModel::new(
            ModelBasis::Monomial {
                order,
                map: domain.unit_map(),
            },
            1,
            1,
            vec![1.0, 1.0, 0.0],
            vec![2.0, 0.0, 1.0],
            domain,
        )
        .unwrap()
    }

    #[test]
    fn monomial_evaluation_uses_map() {
        let m = monomial_model();
        let (p, q) = m.eval_parts(&[2.0, 0.0]);
        assert_eq!((p, q), (2.0, 1.0));
        assert_eq!(m.eval(&[1.0, 1.0]), 0.5);
        assert!(m.try_eval(&[1.0]).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        let m = monomial_model();
        let rebuild = |a: Vec<f64>, b: Vec<f64>| {
            RationalModel::new(m.basis().clone(), 1, 1, a, b, m.domain().clone())
        };
        assert!(rebuild(vec![1.0; 2], vec![1.0; 3]).is_err());
        assert!(rebuild(vec![1.0; 3], vec![0.0; 3]).is_err());
        assert!(RationalModel::new(m.basis().clone(), 2, 1, vec![1.0; 6], vec![1.0; 3], m.domain().clone()).is_err());
    }
}
