//! L-curve selection of the regularization weight of the pole-free fit.

use crate::domain::SampleSet;
use crate::error::{Error, Result};
use crate::sipfit::{fit_rational_polefree, solve_relaxation, SipConfig};

/// One point of the L-curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LCurvePoint {
    pub sigma: f64,
    /// `‖p − f q‖` over the samples.
    pub residual_norm: f64,
    /// `‖(a, b)‖` of the monomial coefficients.
    pub coefficient_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LCurve {
    /// Points sorted by increasing σ.
    pub points: Vec<LCurvePoint>,
    /// Index of the detected corner in `points`.
    pub corner: usize,
    /// Set when no interior point bends away from the chord; the corner is
    /// then an endpoint.
    pub no_corner: bool,
}

impl LCurve {
    pub fn corner_sigma(&self) -> f64 {
        self.points[self.corner].sigma
    }
}

/// Which problem is solved for each σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepMode {
    /// The relaxation constrained at the data points only.
    Relaxation { tau: f64 },
    /// The full pole-free iteration.
    PoleFree(SipConfig),
}

/// Runs the regularized fit for each σ and locates the corner of the
/// log-log curve of coefficient norm against residual norm.
pub fn lcurve(samples: &SampleSet, m: usize, d: usize, sigmas: &[f64], mode: SweepMode) -> Result<LCurve> {
    let mut sorted = sigmas.to_vec();
    if sorted.len() < 3 {
        return Err(Error::InvalidInput("the L-curve needs at least three sigma values".into()));
    }
    if sorted.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidInput("sigma values must be positive".into()));
    }
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("sigma values must be distinct".into()));
    }
    let mut points = Vec::with_capacity(sorted.len());
    for &sigma in &sorted {
        let point = match mode {
            SweepMode::Relaxation { tau } => {
                let relax = solve_relaxation(samples, samples.points(), m, d, tau, sigma)?;
                LCurvePoint {
                    sigma,
                    residual_norm: relax.residual_norm(samples, m, d)?,
                    coefficient_norm: relax.coefficient_norm(),
                }
            }
            SweepMode::PoleFree(config) => {
                let (model, _) = fit_rational_polefree(samples, m, d, &SipConfig { sigma, ..config })?;
                let residual: f64 = samples
                    .points()
                    .iter()
                    .zip(samples.values())
                    .map(|(x, f)| {
                        let (p, q) = model.eval_parts(x);
                        (p - f * q).powi(2)
                    })
                    .sum();
                let coeffs = model.numerator_coeffs().iter().chain(model.denominator_coeffs());
                LCurvePoint {
                    sigma,
                    residual_norm: residual.sqrt(),
                    coefficient_norm: coeffs.map(|c| c * c).sum::<f64>().sqrt(),
                }
            }
        };
        points.push(point);
    }
    let (corner, no_corner) = find_corner(&points);
    Ok(LCurve {
        points,
        corner,
        no_corner,
    })
}

/// Point of maximum perpendicular distance to the chord joining the end
/// points, in `(log10 residual, log10 coefficient norm)` coordinates.
pub fn find_corner(points: &[LCurvePoint]) -> (usize, bool) {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.residual_norm.max(1e-300).log10(), p.coefficient_norm.max(1e-300).log10()))
        .collect();
    let (first, last) = (xy[0], xy[xy.len() - 1]);
    let (dx, dy) = (last.0 - first.0, last.1 - first.1);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return (xy.len() - 1, true);
    }
    let mut best = (xy.len() - 1, 0.0);
    for (i, &(x, y)) in xy.iter().enumerate().skip(1).take(xy.len() - 2) {
        let dist = ((x - first.0) * dy - (y - first.1) * dx).abs() / len;
        if dist > best.1 {
            best = (i, dist);
        }
    }
    let no_corner = best.1 <= 1e-3 * len;
    if no_corner {
        (xy.len() - 1, true)
    } else {
        (best.0, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(sigma: f64, r: f64, c: f64) -> LCurvePoint {
        LCurvePoint {
            sigma,
            residual_norm: r,
            coefficient_norm: c,
        }
    }

    #[test]
    fn corner_of_an_l() {
        let pts = [
            pt(1e-3, 1e-6, 1e4),
            pt(1e-2, 2e-6, 1e2),
            pt(1e-1, 4e-6, 1.0),
            pt(1.0, 1e-3, 0.9),
            pt(10.0, 1e-1, 0.8),
        ];
        assert_eq!(find_corner(&pts), (2, false));
    }

    #[test]
    fn straight_line_has_no_corner() {
        let pts: Vec<LCurvePoint> = (0..5).map(|i| pt(10f64.powi(i), 10f64.powi(i), 10f64.powi(-i))).collect();
        assert_eq!(find_corner(&pts), (4, true));
    }
}
