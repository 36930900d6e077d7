//! Test error and pole-like point statistics.

use rayon::prelude::*;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::model::RationalModel;
use crate::sampling::{uniform_face_points, uniform_points};

pub const DEFAULT_FACE_POINTS: usize = 40_000;
pub const DEFAULT_INTERIOR_POINTS: usize = 100_000;

const CHUNK: usize = 4096;

fn evaluate(model: &RationalModel, points: &[Vec<f64>]) -> Vec<f64> {
    points
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| model.eval_many(chunk))
        .collect()
}

/// Discrete L2 test error.
#[derive(Clone, Debug, PartialEq)]
pub struct TestError {
    /// Root of the sum of squared residuals; infinite if any denominator is zero.
    pub delta_r: f64,
    /// Test points at which the denominator is exactly zero.
    pub zero_denominators: Vec<usize>,
}

pub fn test_error(model: &RationalModel, points: &[Vec<f64>], values: &[f64]) -> Result<TestError> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != model.n()) {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: p.len(),
        });
    }
    let denominators: Vec<f64> = points
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| chunk.iter().map(|x| model.denominator(x)).collect::<Vec<_>>())
        .collect();
    let zero_denominators: Vec<usize> = (0..points.len()).filter(|&i| denominators[i] == 0.0).collect();
    if !zero_denominators.is_empty() {
        return Ok(TestError {
            delta_r: f64::INFINITY,
            zero_denominators,
        });
    }
    let r = evaluate(model, points);
    let sum: f64 = r.iter().zip(values).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(TestError {
        delta_r: sum.sqrt(),
        zero_denominators,
    })
}

/// Face and interior test points with their true values.
#[derive(Clone, Debug, PartialEq)]
pub struct TestSet {
    pub face_points: Vec<Vec<f64>>,
    pub face_values: Vec<f64>,
    pub interior_points: Vec<Vec<f64>>,
    pub interior_values: Vec<f64>,
}

impl TestSet {
    /// Uniform random points on the facets and inside the box.
    pub fn generate(
        domain: &BoxDomain,
        f: impl Fn(&[f64]) -> f64 + Sync,
        face_count: usize,
        interior_count: usize,
        seed: u64,
    ) -> Self {
        let face_points = uniform_face_points(domain, face_count, seed);
        let interior_points = uniform_points(domain, interior_count, seed);
        let face_values = face_points.par_iter().map(|x| f(x)).collect();
        let interior_values = interior_points.par_iter().map(|x| f(x)).collect();
        Self {
            face_points,
            face_values,
            interior_points,
            interior_values,
        }
    }

    pub fn len(&self) -> usize {
        self.face_points.len() + self.interior_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn all_points(&self) -> Vec<Vec<f64>> {
        self.face_points.iter().chain(&self.interior_points).cloned().collect()
    }

    pub fn all_values(&self) -> Vec<f64> {
        self.face_values.iter().chain(&self.interior_values).copied().collect()
    }
}

/// Pole-like point statistics at one threshold `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleMetrics {
    pub t: f64,
    pub count_face: usize,
    pub count_in: usize,
    pub e_pole: f64,
    pub e_nonpole: f64,
    pub delta_r: f64,
    /// Indices of the pole-like face points.
    pub face_indices: Vec<usize>,
    /// Indices of the pole-like interior points.
    pub interior_indices: Vec<usize>,
}

impl PoleMetrics {
    pub fn count(&self) -> usize {
        self.count_face + self.count_in
    }
}

/// Model values on a test set, computed once for reuse at several thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated<'a> {
    tests: &'a TestSet,
    face: Vec<f64>,
    interior: Vec<f64>,
}

impl<'a> Evaluated<'a> {
    pub fn new(model: &RationalModel, tests: &'a TestSet) -> Self {
        Self {
            tests,
            face: evaluate(model, &tests.face_points),
            interior: evaluate(model, &tests.interior_points),
        }
    }

    pub fn face_values(&self) -> &[f64] {
        &self.face
    }

    pub fn interior_values(&self) -> &[f64] {
        &self.interior
    }

    /// A point is pole-like when `|r(x)| / max(1, f_max) > t`, with `f_max`
    /// the largest absolute true value of its group (faces or interior).
    pub fn pole_metrics(&self, t: f64) -> Result<PoleMetrics> {
        if !(t > 1.0) {
            return Err(Error::InvalidInput(format!("pole threshold t = {t} must exceed 1")));
        }
        let group = |r: &[f64], f: &[f64]| {
            let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            let mut idx = Vec::new();
            let (mut total, mut pole) = (0.0, 0.0);
            for (i, (ri, fi)) in r.iter().zip(f).enumerate() {
                let sq = (ri - fi) * (ri - fi);
                total += sq;
                if !(ri.abs() / fmax <= t) {
                    idx.push(i);
                    pole += sq;
                }
            }
            (idx, total, pole)
        };
        let (face_indices, face_total, face_pole) = group(&self.face, &self.tests.face_values);
        let (interior_indices, in_total, in_pole) = group(&self.interior, &self.tests.interior_values);
        let total = face_total + in_total;
        let pole = face_pole + in_pole;
        Ok(PoleMetrics {
            t,
            count_face: face_indices.len(),
            count_in: interior_indices.len(),
            e_pole: pole.sqrt(),
            e_nonpole: (total - pole).max(0.0).sqrt(),
            delta_r: total.sqrt(),
            face_indices,
            interior_indices,
        })
    }
}

/// [`Evaluated::pole_metrics`] for a single threshold.
pub fn pole_points(model: &RationalModel, tests: &TestSet, t: f64) -> Result<PoleMetrics> {
    Evaluated::new(model, tests).pole_metrics(t)
}

/// One line of the metrics CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub function: String,
    pub method: String,
    pub epsilon: f64,
    pub metrics: PoleMetrics,
}

impl MetricsRow {
    pub const HEADER: &'static str = "function,method,epsilon,t,count_face,count_in,e_pole,e_nonpole,delta_r";

    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.function, self.method, self.epsilon, m.t, m.count_face, m.count_in, m.e_pole, m.e_nonpole, m.delta_r
        )
    }
}
