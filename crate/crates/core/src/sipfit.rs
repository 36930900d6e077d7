//! Pole-free rational fits: the linearized least-squares problem with the
//! semi-infinite constraint `q(x) ≥ τ` on the whole box, handled by
//! alternating a finitely constrained relaxation with a global check.

use std::time::Instant;

use nalgebra::DMatrix;

use crate::domain::SampleSet;
use crate::error::{Error, Result};
use crate::globalmin::{minimize_denominator, multistart_budget, MultistartOptions};
use crate::linalg;
use crate::model::{FitReport, ModelBasis, RationalModel};
use crate::multiindex::{alpha, MultiIndexOrder};
use crate::qp::{kkt_residuals, solve_qp, stacked_factor};

/// Relative shift added to the Hessian when `σ = 0`, scaled by the largest
/// squared column norm of the design.
pub const HESSIAN_SHIFT: f64 = 1e-13;

/// Relative singular-value level below which a monomial design block is
/// treated as rank deficient.
pub const DESIGN_RANK_TOL: f64 = 1e-10;

/// Relative slack accepted by the global check.
pub const CHECK_SLACK: f64 = 1e-6;

/// Settings of [`fit_rational_polefree`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SipConfig {
    pub tau: f64,
    pub sigma: f64,
    pub max_iterations: usize,
    pub multistart_cap: usize,
    pub local_tol: f64,
    pub seed: u64,
}

impl Default for SipConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            sigma: 0.0,
            max_iterations: 200,
            multistart_cap: 5000,
            local_tol: 1e-8,
            seed: 0,
        }
    }
}

impl SipConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!("tau = {} must be positive", self.tau)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma = {} must be non-negative", self.sigma)));
        }
        if self.max_iterations == 0 || self.multistart_cap == 0 {
            return Err(Error::InvalidInput("iteration and multistart caps must be positive".into()));
        }
        if !(self.local_tol > 0.0) {
            return Err(Error::InvalidInput("local tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Solution of one relaxation.
#[derive(Clone, Debug, PartialEq)]
pub struct Relaxation {
    /// Numerator coefficients in the monomial order (mapped coordinates).
    pub a: Vec<f64>,
    /// Denominator coefficients in the monomial order (mapped coordinates).
    pub b: Vec<f64>,
    /// `Σ (p − f q)² + σ (‖a‖² + ‖b‖²)` at the solution.
    pub objective: f64,
    /// Multiplier of each constraint point, in input order.
    pub multipliers: Vec<f64>,
    /// Scaled KKT residuals `(stationarity, infeasibility, complementarity)`.
    pub kkt: (f64, f64, f64),
}

impl Relaxation {
    pub fn kkt_max(&self) -> f64 {
        self.kkt.0.max(self.kkt.1).max(self.kkt.2)
    }

    /// `‖A c‖`, the square root of the unregularized residual.
    pub fn residual_norm(&self, samples: &SampleSet, m: usize, d: usize) -> Result<f64> {
        let design = Design::new(samples, m, d)?;
        let c: Vec<f64> = self.a.iter().chain(&self.b).copied().collect();
        Ok((&design.a * nalgebra::DVector::from_vec(c)).norm())
    }

    pub fn coefficient_norm(&self) -> f64 {
        linalg::norm2(&self.a).hypot(linalg::norm2(&self.b))
    }
}

/// Monomial design of the linearized residual `[Φ_M, −F Φ_N]`.
struct Design {
    order: MultiIndexOrder,
    am: usize,
    ad: usize,
    a: DMatrix<f64>,
}

impl Design {
    fn new(samples: &SampleSet, m: usize, d: usize) -> Result<Self> {
        let n = samples.dim();
        let order = MultiIndexOrder::generate(n, m.max(d))?;
        let (am, ad) = (alpha(n, m)?, alpha(n, d)?);
        let map = samples.domain().unit_map();
        let k = samples.len();
        let mut a = DMatrix::zeros(k, am + ad);
        let mut mono = vec![0.0; order.len()];
        let mut t = vec![0.0; n];
        for (row, (x, &f)) in samples.points().iter().zip(samples.values()).enumerate() {
            map.apply_into(x, &mut t);
            order.eval_monomials_into(&t, &mut mono);
            for j in 0..am {
                a[(row, j)] = mono[j];
            }
            for j in 0..ad {
                a[(row, am + j)] = -f * mono[j];
            }
        }
        Ok(Self { order, am, ad, a })
    }

    /// Errors when a monomial block has numerically dependent columns.
    fn check_rank(&self, samples: &SampleSet, m: usize, d: usize) -> Result<()> {
        let k = samples.len();
        let numer = self.a.view((0, 0), (k, self.am)).into_owned();
        for (block, degree) in [(numer, m), (self.denominator_block(samples), d)] {
            let sv = linalg::singular_values(&block)?;
            if sv.len() < block.ncols() || sv.last().copied().unwrap_or(0.0) <= DESIGN_RANK_TOL * sv[0] {
                return Err(Error::SingularHessian { degree });
            }
        }
        Ok(())
    }

    fn denominator_block(&self, samples: &SampleSet) -> DMatrix<f64> {
        let map = samples.domain().unit_map();
        DMatrix::from_fn(samples.len(), self.ad, |row, j| {
            let t = map.apply(&samples.points()[row]);
            self.order.get(j).eval(&t)
        })
    }
}

/// Minimizes `Σ_k (p(x_k) − f_k q(x_k))² + σ(‖a‖² + ‖b‖²)` over monomial
/// coefficients on mapped coordinates, subject to `q(u) ≥ τ` at every
/// constraint point `u`.
///
/// With `σ = 0` the Hessian is shifted by a tiny multiple of the identity,
/// because exact-class data leave a null direction of the residual.
/// Rank-deficient monomial designs (collinear data) are rejected in that case.
pub fn solve_relaxation(
    samples: &SampleSet,
    constraint_points: &[Vec<f64>],
    m: usize,
    d: usize,
    tau: f64,
    sigma: f64,
) -> Result<Relaxation> {
    let design = Design::new(samples, m, d)?;
    solve_with_design(&design, samples, constraint_points, m, d, tau, sigma)
}

fn solve_with_design(
    design: &Design,
    samples: &SampleSet,
    constraint_points: &[Vec<f64>],
    m: usize,
    d: usize,
    tau: f64,
    sigma: f64,
) -> Result<Relaxation> {
    let n = samples.dim();
    let p = design.am + design.ad;
    if sigma == 0.0 {
        design.check_rank(samples, m, d)?;
    }
    let shift = if sigma > 0.0 {
        sigma
    } else {
        let col_max = design.a.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
        HESSIAN_SHIFT * col_max.max(1e-300)
    };
    let r = stacked_factor(&design.a, shift);

    let map = samples.domain().unit_map();
    let mut c = DMatrix::zeros(constraint_points.len(), p);
    let mut mono = vec![0.0; design.order.len()];
    let mut t = vec![0.0; n];
    for (row, u) in constraint_points.iter().enumerate() {
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        map.apply_into(u, &mut t);
        design.order.eval_monomials_into(&t, &mut mono);
        for j in 0..design.ad {
            c[(row, design.am + j)] = mono[j];
        }
    }
    let lb = vec![tau; constraint_points.len()];
    let zero = vec![0.0; p];
    let sol = solve_qp(&r, &zero, &c, &lb)?;

    let mut h = design.a.transpose() * &design.a;
    for i in 0..p {
        h[(i, i)] += sigma;
    }
    let kkt = kkt_residuals(&h, &zero, &c, &lb, &sol.x, &sol.multipliers);
    let cv = nalgebra::DVector::from_column_slice(&sol.x);
    let objective = (&design.a * &cv).norm_squared() + sigma * cv.norm_squared();
    Ok(Relaxation {
        a: sol.x[..design.am].to_vec(),
        b: sol.x[design.am..].to_vec(),
        objective,
        multipliers: sol.multipliers,
        kkt,
    })
}

/// Pole-free rational fit of degrees `(m, d)`.
///
/// Alternates between the relaxation over the data points plus all added
/// points and a multistart minimization of `q` over the box. The loop ends
/// when the global minimum found is at least `τ (1 − 1e-6)`; otherwise the
/// minimizer is added as a new constraint point. On hitting
/// `max_iterations` the last model is returned with `converged = false`.
pub fn fit_rational_polefree(
    samples: &SampleSet,
    m: usize,
    d: usize,
    config: &SipConfig,
) -> Result<(RationalModel, FitReport)> {
    config.validate()?;
    let n = samples.dim();
    let needed = alpha(n, m)? + alpha(n, d)?;
    if samples.len() < needed {
        return Err(Error::Underdetermined {
            needed,
            available: samples.len(),
        });
    }
    let start = Instant::now();
    let design = Design::new(samples, m, d)?;
    let denominator_order = MultiIndexOrder::generate(n, d)?;
    let budget = multistart_budget(n, d, config.multistart_cap)?;
    let threshold = config.tau * (1.0 - CHECK_SLACK);
    let mut report = FitReport::default();
    report.time("setup", start.elapsed().as_secs_f64());

    let mut constraints: Vec<Vec<f64>> = samples.points().to_vec();
    let mut added = Vec::new();
    let mut converged = false;
    let mut last = None;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let t0 = Instant::now();
        let relax = solve_with_design(&design, samples, &constraints, m, d, config.tau, config.sigma)?;
        report.time("relaxation", t0.elapsed().as_secs_f64());
        report.objective_history.push(relax.objective);

        let t1 = Instant::now();
        let check = minimize_denominator(
            &relax.b,
            &denominator_order,
            samples.domain(),
            &MultistartOptions {
                budget,
                local_tol: config.local_tol,
                seed: config.seed,
                stop_below: Some(threshold),
            },
        )?;
        report.time("global_check", t1.elapsed().as_secs_f64());
        report.denominator_min = Some(check.value);
        last = Some(relax);
        if check.value >= threshold {
            converged = true;
            break;
        }
        constraints.push(check.x.clone());
        added.push(check.x);
    }
    let relax = last.expect("at least one iteration");
    report.sip_iterations = Some(iterations);
    report.added_points = Some(added);
    report.converged = Some(converged);

    let model = RationalModel::new(
        ModelBasis::Monomial {
            order: design.order,
            map: samples.domain().unit_map(),
        },
        m,
        d,
        relax.a,
        relax.b,
        samples.domain().clone(),
    )?;
    Ok((model, report))
}
