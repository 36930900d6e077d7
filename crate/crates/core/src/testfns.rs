//! Analytic benchmark functions with their pole-free domains.
//!
//! Identifiers follow the historical catalog numbering, which skips `f6` and `f11`.

use std::f64::consts::PI;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    /// Polynomial over polynomial.
    Rational,
    /// Transcendental numerator over a polynomial denominator.
    PolyDenominator,
    Transcendental,
    Polynomial,
}

/// A catalog entry.
#[derive(Clone, Copy, Debug)]
pub struct TestFunction {
    pub id: &'static str,
    pub description: &'static str,
    pub n: usize,
    /// `(M, N)` where known; `None` marks a non-polynomial part.
    pub numerator_degree: Option<usize>,
    pub denominator_degree: Option<usize>,
    pub kind: FunctionKind,
    bounds: &'static [(f64, f64)],
    f: fn(&[f64]) -> f64,
    denominator: Option<fn(&[f64]) -> f64>,
}

impl TestFunction {
    pub fn by_id(id: &str) -> Result<&'static TestFunction> {
        CATALOG
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownFunction(id.to_string()))
    }

    pub fn domain(&self) -> BoxDomain {
        BoxDomain::new(self.bounds.to_vec()).expect("catalog domains are valid")
    }

    /// `(M, N)` when both parts are polynomials.
    pub fn true_degrees(&self) -> Option<(usize, usize)> {
        Some((self.numerator_degree?, self.denominator_degree?))
    }

    /// Evaluates without a domain check.
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// Evaluates at a point of the domain.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if !self.domain().contains(x) {
            return Err(Error::OutOfDomain { index: 0 });
        }
        Ok(self.eval(x))
    }

    /// Polynomial denominator, when the function has one.
    pub fn denominator(&self, x: &[f64]) -> Option<f64> {
        self.denominator.map(|q| q(x))
    }
}

/// All catalog entries.
pub fn catalog() -> &'static [TestFunction] {
    CATALOG
}

const UNIT: &[(f64, f64)] = &[(-1.0, 1.0), (-1.0, 1.0)];
const UNIT4: &[(f64, f64)] = &[(-1.0, 1.0); 4];
const SINC_LO: f64 = 1e-6;
const SINC_HI: f64 = 4.0 * PI;

fn f1(x: &[f64]) -> f64 {
    (x[0] * x[1]).exp() / q1(x)
}
fn q1(x: &[f64]) -> f64 {
    (x[0] * x[0] - 1.44) * (x[1] * x[1] - 1.44)
}
fn f2(x: &[f64]) -> f64 {
    (2.25 - x[0] * x[0] - x[1] * x[1]).ln()
}
fn f3(x: &[f64]) -> f64 {
    (5.0 * (x[0] - x[1])).tanh()
}
fn f4(x: &[f64]) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1]) / 1000.0).exp()
}
fn f5(x: &[f64]) -> f64 {
    (x[0] - x[1]).abs().powi(3)
}
fn f7(x: &[f64]) -> f64 {
    (x[0] + x[1].powi(3)) / q7(x)
}
fn q7(x: &[f64]) -> f64 {
    x[0] * x[1] * x[1] + 1.0
}
fn f8(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[0] - x[1] - 1.0) / q8(x)
}
fn q8(x: &[f64]) -> f64 {
    (x[0] - 1.1) * (x[1] - 1.1)
}
fn quartic(x: &[f64]) -> f64 {
    x[0].powi(4) + x[1].powi(4) + x[0] * x[0] * x[1] * x[1] + x[0] * x[1]
}
fn f9(x: &[f64]) -> f64 {
    quartic(x) / q9(x)
}
fn q9(x: &[f64]) -> f64 {
    (x[0] * x[0] - 1.1) * (x[1] * x[1] - 1.1)
}
fn f10(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[0] - x[1] + 1.0) / q10(x)
}
fn q10(x: &[f64]) -> f64 {
    (x[2] - 1.5) * (x[3] - 1.5)
}
fn f12(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[0] - x[1] - 1.0) / q_cubic(x)
}
fn q_cubic(x: &[f64]) -> f64 {
    x[0].powi(3) + x[1].powi(3) + 4.0
}
fn f13(x: &[f64]) -> f64 {
    (x[0].powi(3) + x[1].powi(3)) / q13(x)
}
fn q13(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + 3.0
}
fn q_quartic(x: &[f64]) -> f64 {
    x[0] * x[0] * x[1] * x[1] - 2.0 * x[0] * x[0] - 2.0 * x[1] * x[1] + 4.0
}
fn f14(x: &[f64]) -> f64 {
    quartic(x) / q_quartic(x)
}
fn f15(x: &[f64]) -> f64 {
    (x[0].powi(3) + x[1].powi(3)) / q_quartic(x)
}
fn f16(x: &[f64]) -> f64 {
    quartic(x) / q_cubic(x)
}
/// Breit–Wigner resonance in `(E, Γ, M)`.
fn f17(x: &[f64]) -> f64 {
    let (e, width, mass) = (x[0], x[1], x[2]);
    let m2 = mass * mass;
    let gamma = (m2 * (m2 + width * width)).sqrt();
    let k = 2.0 * 2f64.sqrt() * mass * width * gamma / (PI * (m2 + gamma).sqrt());
    k / ((e * e - m2).powi(2) + m2 * width * width)
}
fn f18(x: &[f64]) -> f64 {
    x.iter().map(|v| v.atan()).sum::<f64>() / q18(x)
}
fn q18(x: &[f64]) -> f64 {
    x[0] * x[0] * x[1] * x[1] - x[0] * x[0] - x[1] * x[1] + 1.0
}
fn f19(x: &[f64]) -> f64 {
    (x[0] * x[1] * x[2] * x[3]).exp() / q19(x)
}
fn q19(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] - x[2] * x[3] + 3.0
}
fn sinc(v: f64) -> f64 {
    v.sin() / v
}
fn f20(x: &[f64]) -> f64 {
    10.0 * x.iter().map(|&v| sinc(v)).product::<f64>()
}
fn f21(x: &[f64]) -> f64 {
    10.0 * sinc(x[0]) * sinc(x[1])
}
fn f22(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[0] * x[1] - x[1] + 1.0
}

macro_rules! entry {
    ($id:literal, $desc:literal, $n:expr, $m:expr, $nd:expr, $kind:ident, $bounds:expr, $f:ident, $q:expr) => {
        TestFunction {
            id: $id,
            description: $desc,
            n: $n,
            numerator_degree: $m,
            denominator_degree: $nd,
            kind: FunctionKind::$kind,
            bounds: $bounds,
            f: $f,
            denominator: $q,
        }
    };
}

static CATALOG: &[TestFunction] = &[
    entry!("f1", "function whose denominator is a polynomial", 2, None, Some(4), PolyDenominator, UNIT, f1, Some(q1)),
    entry!("f2", "log function", 2, None, None, Transcendental, UNIT, f2, None),
    entry!("f3", "hyperbolic tangent function", 2, None, None, Transcendental, UNIT, f3, None),
    entry!("f4", "exponential function", 2, None, None, Transcendental, UNIT, f4, None),
    entry!("f5", "absolute value function", 2, None, None, Transcendental, UNIT, f5, None),
    entry!("f7", "rational function", 2, Some(3), Some(3), Rational, &[(0.0, 1.0), (0.0, 1.0)], f7, Some(q7)),
    entry!("f8", "rational function", 2, Some(2), Some(2), Rational, UNIT, f8, Some(q8)),
    entry!("f9", "rational function", 2, Some(4), Some(4), Rational, UNIT, f9, Some(q9)),
    entry!("f10", "rational function", 4, Some(2), Some(2), Rational, UNIT4, f10, Some(q10)),
    entry!("f12", "rational function", 2, Some(2), Some(3), Rational, UNIT, f12, Some(q_cubic)),
    entry!("f13", "rational function", 2, Some(3), Some(2), Rational, UNIT, f13, Some(q13)),
    entry!("f14", "rational function", 2, Some(4), Some(4), Rational, UNIT, f14, Some(q_quartic)),
    entry!("f15", "rational function", 2, Some(3), Some(4), Rational, UNIT, f15, Some(q_quartic)),
    entry!("f16", "rational function", 2, Some(4), Some(3), Rational, UNIT, f16, Some(q_cubic)),
    entry!("f17", "Breit-Wigner function", 3, None, None, Transcendental,
        &[(80.0, 100.0), (5.0, 10.0), (90.0, 93.0)], f17, None),
    entry!("f18", "function whose denominator is a polynomial", 4, None, Some(4), PolyDenominator,
        &[(-0.95, 0.95); 4], f18, Some(q18)),
    entry!("f19", "function whose denominator is a polynomial", 4, None, Some(2), PolyDenominator, UNIT4, f19, Some(q19)),
    entry!("f20", "sinc function", 4, None, None, Transcendental, &[(SINC_LO, SINC_HI); 4], f20, None),
    entry!("f21", "sinc function", 2, None, None, Transcendental, &[(SINC_LO, SINC_HI); 2], f21, None),
    entry!("f22", "polynomial function", 2, Some(2), None, Polynomial, UNIT, f22, None),
];
