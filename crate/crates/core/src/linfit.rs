//! Linearized rational least squares in the orthonormal basis, degree
//! reduction, and plain polynomial least squares.
//!
//! With orthonormal Vandermonde-like matrices `V_M`, `V_N` and `F = diag(f)`,
//! the linearized problem `min ‖V_M a − F V_N b‖` subject to `‖b‖ = 1` is
//! solved by taking `b` as the right singular vector of
//! `W = V_M V_Mᵀ F V_N − F V_N` for the smallest singular value and
//! `a = V_Mᵀ F V_N b`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::domain::SampleSet;
use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::model::{FitReport, ModelBasis, RationalModel};
use crate::multiindex::alpha;
use crate::orthobasis::OrthonormalBasis;

/// Degree-reduction threshold for noise-free data.
pub const DEFAULT_ETA: f64 = 1e-12;

/// Relative singular-value cutoff of the polynomial least-squares solve.
pub const POLY_RCOND: f64 = 1e-12;

/// Sample values with magnitude below this disable the reciprocal-data phase
/// of degree reduction.
pub const ZERO_VALUE: f64 = 1e-300;

/// A polynomial is a rational model with a constant denominator.
pub type PolynomialModel = RationalModel;

/// Degree-reduction threshold for data with the given relative noise level:
/// one order of magnitude above the noise, never below [`DEFAULT_ETA`].
pub fn eta_for_noise(epsilon: f64) -> f64 {
    (10.0 * epsilon).max(DEFAULT_ETA)
}

fn columns(v: &DMatrix<f64>, count: usize) -> DMatrix<f64> {
    v.columns(0, count).into_owned()
}

fn scale_rows(v: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let mut out = v.clone();
    for (mut row, &w) in out.row_iter_mut().zip(weights) {
        row *= w;
    }
    out
}

/// `(I − P) G`, where `P` projects onto the span of the orthonormal columns `q`.
fn project_out(q: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let coeffs = q.transpose() * g;
    g - q * coeffs
}

/// Fits `p/q` with `deg p <= m`, `deg q <= d` by the linearized SVD method.
pub fn fit_rational_onb(samples: &SampleSet, m: usize, d: usize) -> Result<(RationalModel, FitReport)> {
    let start = Instant::now();
    let n = samples.dim();
    let (am, ad) = (alpha(n, m)?, alpha(n, d)?);
    let needed = am + ad - 1;
    if samples.len() < needed {
        return Err(Error::Underdetermined {
            needed,
            available: samples.len(),
        });
    }
    let (basis, v) = OrthonormalBasis::build(samples.points(), m.max(d))?;
    let mut report = FitReport::default();
    report.time("basis", start.elapsed().as_secs_f64());

    let solve_start = Instant::now();
    let vm = columns(&v, am);
    let fvn = scale_rows(&columns(&v, ad), samples.values());
    let z = vm.transpose() * &fvn;
    let w = &vm * &z - &fvn;
    let svd = linalg::right_svd(&w)?;
    let mut b: Vec<f64> = svd.vectors.column(ad - 1).iter().copied().collect();
    let mut a: Vec<f64> = (&z * DVector::from_column_slice(&b)).iter().copied().collect();

    // Fix the sign so that q is non-negative at the centroid.
    let phi = basis.evaluate(&samples.domain().centroid());
    let q_center = dot(&b, &phi[..ad]);
    let flip = if q_center != 0.0 {
        q_center < 0.0
    } else {
        b.iter().find(|&&v| v != 0.0).is_some_and(|&v| v < 0.0)
    };
    if flip {
        b.iter_mut().for_each(|v| *v = -*v);
        a.iter_mut().for_each(|v| *v = -*v);
    }
    report.singular_values = svd.values;
    report.time("solve", solve_start.elapsed().as_secs_f64());

    let model = RationalModel::new(
        ModelBasis::Orthonormal(basis),
        m,
        d,
        a,
        b,
        samples.domain().clone(),
    )?;
    Ok((model, report))
}

/// Outcome of [`reduce_degrees`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedDegrees {
    pub numerator: usize,
    pub denominator: usize,
    /// The reciprocal-data phase was skipped because a value is numerically zero.
    pub numerator_phase_skipped: bool,
}

/// Checks whether the linearized fit matrix `W = (I − P_fit) G` has a
/// negligible singular value, where `P_fit` projects onto the first `fit_cols`
/// basis columns and `G` is the block of the first `target_cols` columns
/// weighted by `weights`. `W` counts as negligible as a whole when all its
/// singular values are below `eta` times the norm of `G`.
fn has_null_direction(v: &DMatrix<f64>, weights: &[f64], fit_cols: usize, target_cols: usize, eta: f64) -> Result<bool> {
    let g = scale_rows(&columns(v, target_cols), weights);
    let w = project_out(&columns(v, fit_cols), &g);
    let sv = linalg::singular_values(&w)?;
    let (smin, smax) = (*sv.last().unwrap_or(&0.0), sv.first().copied().unwrap_or(0.0));
    if eta >= 1.0 {
        return Ok(true);
    }
    Ok(smin < eta * smax || smax <= eta * g.norm())
}

/// Reduces `(m, d)` while the lower-degree fit still has a numerically null
/// direction.
///
/// `v` holds the `n`-variate orthonormal basis values at the samples up to
/// degree at least `max(m, d)` and `values` the sample values. The first phase lowers the
/// denominator degree while the fit matrix `W` of `(m, d − 1)` keeps
/// `σ_min < eta · σ_max`. The second phase does the same for the numerator
/// degree by fitting the reciprocal data `1/f` with the roles swapped.
/// A zero-degree polynomial part never goes lower.
pub fn reduce_degrees(v: &DMatrix<f64>, n: usize, values: &[f64], m: usize, d: usize, eta: f64) -> Result<ReducedDegrees> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidInput(format!("threshold eta = {eta} must lie in (0, 1]")));
    }
    if values.len() != v.nrows() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows(),
            got: values.len(),
        });
    }
    let needed = alpha(n, m.max(d))?;
    if v.ncols() < needed {
        return Err(Error::DimensionMismatch {
            expected: needed,
            got: v.ncols(),
        });
    }
    let cols = |deg: usize| alpha(n, deg);

    let mut d = d;
    while d > 0 && has_null_direction(v, values, cols(m)?, cols(d - 1)?, eta)? {
        d -= 1;
    }

    let mut m = m;
    let skipped = values.iter().any(|f| f.abs() < ZERO_VALUE);
    if !skipped {
        let reciprocal: Vec<f64> = values.iter().map(|f| 1.0 / f).collect();
        while m > 0 && has_null_direction(v, &reciprocal, cols(d)?, cols(m - 1)?, eta)? {
            m -= 1;
        }
    }
    Ok(ReducedDegrees {
        numerator: m,
        denominator: d,
        numerator_phase_skipped: skipped,
    })
}

/// Degree reduction followed by the linearized fit at the reduced degrees.
pub fn fit_rational_reduced(
    samples: &SampleSet,
    m: usize,
    d: usize,
    eta: f64,
) -> Result<(RationalModel, FitReport)> {
    let start = Instant::now();
    let (_, v) = OrthonormalBasis::build(samples.points(), m.max(d))?;
    let reduced = reduce_degrees(&v, samples.dim(), samples.values(), m, d, eta)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (model, mut report) = fit_rational_onb(samples, reduced.numerator, reduced.denominator)?;
    report.reduced_from = Some((m, d));
    report.numerator_phase_skipped = reduced.numerator_phase_skipped;
    report.time("reduction", elapsed);
    Ok((model, report))
}

/// Least-squares polynomial of total degree `degree`.
pub fn fit_polynomial(samples: &SampleSet, degree: usize) -> Result<(PolynomialModel, FitReport)> {
    let start = Instant::now();
    let needed = alpha(samples.dim(), degree)?;
    if samples.len() < needed {
        return Err(Error::Underdetermined {
            needed,
            available: samples.len(),
        });
    }
    let (basis, v) = OrthonormalBasis::build(samples.points(), degree)?;
    let rhs = DVector::from_column_slice(samples.values());
    let coeffs = linalg::lstsq(&v, &rhs, POLY_RCOND)?;
    let mut report = FitReport {
        singular_values: linalg::singular_values(&v)?,
        ..FitReport::default()
    };
    // q = φ_0 = 1/norm0, so scale p to keep r = Σ c_j φ_j.
    let scale = 1.0 / basis.norm0();
    let a: Vec<f64> = coeffs.iter().map(|c| c * scale).collect();
    let model = RationalModel::new(
        ModelBasis::Orthonormal(basis),
        degree,
        0,
        a,
        vec![1.0],
        samples.domain().clone(),
    )?;
    report.time("solve", start.elapsed().as_secs_f64());
    Ok((model, report))
}
