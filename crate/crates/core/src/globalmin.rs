//! Multistart minimization of a polynomial over a box.
//!
//! Each local descent is a projected BFGS iteration with a backtracking line
//! search and the analytic gradient. Start points come from a seeded Latin
//! hypercube, so results are reproducible regardless of thread count.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::domain::{AffineMap, BoxDomain};
use crate::error::{Error, Result};
use crate::multiindex::{alpha, MultiIndexOrder};
use crate::sampling::{lhs, DesignSpec};

/// Iteration cap of a single local descent.
pub const MAX_LOCAL_ITERATIONS: usize = 500;

const CHUNK: usize = 64;

/// Number of local descents for a denominator of degree `d` in `n` variables:
/// `ceil(2042.023 · exp(0.029 · nnl))` with `nnl = α_n(d) − (n + 1)` the
/// number of nonlinear terms, capped at `cap`.
pub fn multistart_budget(n: usize, d: usize, cap: usize) -> Result<usize> {
    if cap == 0 {
        return Err(Error::InvalidInput("multistart cap must be positive".into()));
    }
    let nnl = nonlinear_terms(n, d)?;
    let phi = 2042.023 * (0.029 * nnl as f64).exp();
    Ok((phi.ceil() as usize).min(cap))
}

/// `α_n(d) − (n + 1)`, floored at zero for degrees below two.
pub fn nonlinear_terms(n: usize, d: usize) -> Result<usize> {
    Ok(alpha(n, d)?.saturating_sub(n + 1))
}

/// A polynomial in the monomial order, evaluated on `map(x)`.
#[derive(Clone, Debug)]
pub struct MonomialPolynomial {
    order: MultiIndexOrder,
    coeffs: Vec<f64>,
    map: AffineMap,
    /// For each coefficient, the `(variable, exponent, index of α − e_var)` triples.
    derivatives: Vec<Vec<(usize, f64, usize)>>,
}

impl MonomialPolynomial {
    /// `coeffs` is a prefix of `order` of length `α_n(d)` for some `d`.
    pub fn new(order: MultiIndexOrder, coeffs: Vec<f64>, map: AffineMap) -> Result<Self> {
        if coeffs.len() > order.len() {
            return Err(Error::DimensionMismatch {
                expected: order.len(),
                got: coeffs.len(),
            });
        }
        if map.scale.len() != order.n() {
            return Err(Error::DimensionMismatch {
                expected: order.n(),
                got: map.scale.len(),
            });
        }
        let lookup: HashMap<&[u8], usize> = order.indices()[..coeffs.len()]
            .iter()
            .enumerate()
            .map(|(j, m)| (m.exponents(), j))
            .collect();
        let derivatives = order.indices()[..coeffs.len()]
            .iter()
            .map(|m| {
                let e = m.exponents();
                (0..e.len())
                    .filter(|&i| e[i] > 0)
                    .map(|i| {
                        let mut lower = e.to_vec();
                        lower[i] -= 1;
                        (i, e[i] as f64, lookup[lower.as_slice()])
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            order,
            coeffs,
            map,
            derivatives,
        })
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    fn eval_mapped(&self, t: &[f64], mono: &mut [f64]) -> f64 {
        self.order.eval_monomials_into(t, mono);
        self.coeffs.iter().zip(mono.iter()).map(|(c, m)| c * m).sum()
    }

    /// Value and gradient with respect to the mapped coordinates.
    fn value_grad_mapped(&self, t: &[f64], mono: &mut [f64], grad: &mut [f64]) -> f64 {
        let value = self.eval_mapped(t, mono);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (c, terms) in self.coeffs.iter().zip(&self.derivatives) {
            if *c == 0.0 {
                continue;
            }
            for &(i, e, low) in terms {
                grad[i] += c * e * mono[low];
            }
        }
        value
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let t = self.map.apply(x);
        let mut mono = vec![0.0; self.coeffs.len()];
        self.eval_mapped(&t, &mut mono)
    }

    /// Gradient with respect to the original coordinates.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let t = self.map.apply(x);
        let mut mono = vec![0.0; self.coeffs.len()];
        let mut grad = vec![0.0; self.n()];
        self.value_grad_mapped(&t, &mut mono, &mut grad);
        grad.iter().zip(&self.map.scale).map(|(g, s)| g * s).collect()
    }
}

/// Options of [`minimize_denominator`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultistartOptions {
    pub budget: usize,
    /// Projected-gradient tolerance of each local descent (mapped coordinates).
    pub local_tol: f64,
    pub seed: u64,
    /// Stop as soon as a local result falls below this value.
    pub stop_below: Option<f64>,
}

/// Best point found by [`minimize_denominator`].
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Local descents actually run.
    pub starts: usize,
}

/// Minimizes the monomial polynomial `coeffs` over `domain`, where the
/// monomials are evaluated on the coordinates mapped to `[-1, 1]ⁿ` by
/// [`BoxDomain::unit_map`].
pub fn minimize_denominator(
    coeffs: &[f64],
    order: &MultiIndexOrder,
    domain: &BoxDomain,
    options: &MultistartOptions,
) -> Result<GlobalMinimum> {
    if options.budget == 0 {
        return Err(Error::InvalidInput("multistart budget must be at least 1".into()));
    }
    if order.n() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: order.n(),
        });
    }
    let map = domain.unit_map();
    let poly = MonomialPolynomial::new(order.clone(), coeffs.to_vec(), map.clone())?;
    let n = domain.dim();
    let starts = lhs(&DesignSpec {
        domain: BoxDomain::cube(n, -1.0, 1.0)?,
        count: options.budget,
        seed: options.seed,
    })?;

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut used = 0;
    for chunk in starts.chunks(CHUNK) {
        let results: Vec<(Vec<f64>, f64)> = chunk
            .par_iter()
            .map(|s| local_descent(&poly, s, options.local_tol))
            .collect();
        used += chunk.len();
        for (t, v) in results {
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((t, v));
            }
        }
        let value = best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY);
        if options.stop_below.is_some_and(|tau| value < tau) {
            break;
        }
    }
    let (t, value) = best.expect("at least one start");
    let mut x = map.invert(&t);
    domain.project(&mut x);
    Ok(GlobalMinimum {
        x,
        value,
        starts: used,
    })
}

fn project_unit(t: &mut [f64]) {
    t.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0));
}

/// Projected BFGS descent on `[-1, 1]ⁿ` in mapped coordinates.
fn local_descent(poly: &MonomialPolynomial, start: &[f64], tol: f64) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut mono = vec![0.0; poly.coeffs.len()];
    let mut x = start.to_vec();
    project_unit(&mut x);
    let mut g = vec![0.0; n];
    let mut f = poly.value_grad_mapped(&x, &mut mono, &mut g);
    let mut hinv = identity(n);
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];

    for _ in 0..MAX_LOCAL_ITERATIONS {
        // variables held at a bound by the gradient
        let fixed: Vec<bool> = (0..n)
            .map(|i| (x[i] <= -1.0 && g[i] > 0.0) || (x[i] >= 1.0 && g[i] < 0.0))
            .collect();
        let pg = (0..n)
            .map(|i| (x[i] - (x[i] - g[i]).clamp(-1.0, 1.0)).abs())
            .fold(0.0f64, f64::max);
        if pg <= tol {
            break;
        }
        let mut dir: Vec<f64> = (0..n)
            .map(|i| {
                if fixed[i] {
                    0.0
                } else {
                    -(0..n).filter(|&j| !fixed[j]).map(|j| hinv[i * n + j] * g[j]).sum::<f64>()
                }
            })
            .collect();
        let slope: f64 = dir.iter().zip(&g).map(|(d, g)| d * g).sum();
        if !(slope < 0.0) {
            hinv = identity(n);
            dir = (0..n).map(|i| if fixed[i] { 0.0 } else { -g[i] }).collect();
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = (x[i] + step * dir[i]).clamp(-1.0, 1.0);
            }
            let decrease: f64 = (0..n).map(|i| g[i] * (trial[i] - x[i])).sum();
            let f_trial = poly.value_grad_mapped(&trial, &mut mono, &mut g_trial);
            if f_trial <= f + 1e-4 * decrease && f_trial <= f {
                accepted = true;
                let s: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
                let y: Vec<f64> = (0..n).map(|i| g_trial[i] - g[i]).collect();
                bfgs_update(&mut hinv, &s, &y);
                x.copy_from_slice(&trial);
                g.copy_from_slice(&g_trial);
                let done = f - f_trial <= 1e-16 * f.abs().max(1.0) && s.iter().all(|v| v.abs() < 1e-15);
                f = f_trial;
                if done {
                    return (x, f);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, f)
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Inverse-Hessian BFGS update, skipped when the curvature condition fails.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64]) {
    let n = s.len();
    let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
    let (ns, ny) = (s.iter().map(|v| v * v).sum::<f64>().sqrt(), y.iter().map(|v| v * v).sum::<f64>().sqrt());
    if sy <= 1e-12 * ns * ny || sy == 0.0 {
        return;
    }
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;

    fn coeffs_for(order: &MultiIndexOrder, terms: &[(&[u8], f64)]) -> Vec<f64> {
        let mut c = vec![0.0; order.len()];
        for (e, v) in terms {
            let idx = order.indices().iter().position(|m| m == &MultiIndex::new(e.to_vec()).unwrap()).unwrap();
            c[idx] = *v;
        }
        c
    }

    fn options(budget: usize) -> MultistartOptions {
        MultistartOptions {
            budget,
            local_tol: 1e-10,
            seed: 3,
            stop_below: None,
        }
    }

    #[test]
    fn quadratic_bowl() {
        let order = MultiIndexOrder::generate(2, 2).unwrap();
        let c = coeffs_for(&order, &[(&[0, 0], 1.0), (&[2, 0], 1.0)]);
        let dom = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let r = minimize_denominator(&c, &order, &dom, &options(20)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.x[0].abs() < 1e-6);
        assert_eq!(r.starts, 20);
    }

    #[test]
    fn linear_minimum_at_corner() {
        let order = MultiIndexOrder::generate(2, 1).unwrap();
        let c = coeffs_for(&order, &[(&[0, 0], 3.0), (&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let dom = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let r = minimize_denominator(&c, &order, &dom, &options(5)).unwrap();
        assert_eq!(r.x, vec![-1.0, -1.0]);
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mapped_domain_and_early_stop() {
        // q = t1 on [10, 20] × [0, 1], minimum 0 ... −1 at x1 = 10
        let order = MultiIndexOrder::generate(2, 1).unwrap();
        let c = coeffs_for(&order, &[(&[1, 0], 1.0)]);
        let dom = BoxDomain::new(vec![(10.0, 20.0), (0.0, 1.0)]).unwrap();
        let mut opts = options(1000);
        opts.stop_below = Some(0.0);
        let r = minimize_denominator(&c, &order, &dom, &opts).unwrap();
        assert!((r.value + 1.0).abs() < 1e-14);
        assert_eq!(r.x[0], 10.0);
        assert!(r.starts < 1000);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let order = MultiIndexOrder::generate(3, 3).unwrap();
        let c: Vec<f64> = (0..order.len()).map(|j| ((j * 7) % 5) as f64 - 2.0).collect();
        let dom = BoxDomain::new(vec![(0.0, 2.0), (-1.0, 3.0), (5.0, 6.0)]).unwrap();
        let p = MonomialPolynomial::new(order, c, dom.unit_map()).unwrap();
        let x = [0.3, 1.1, 5.4];
        let g = p.gradient(&x);
        for i in 0..3 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn budget_formula() {
        assert_eq!(nonlinear_terms(2, 5).unwrap(), 18);
        assert_eq!(nonlinear_terms(3, 5).unwrap(), 52);
        assert_eq!(nonlinear_terms(4, 5).unwrap(), 121);
        let phi = 2042.023 * (0.029f64 * 18.0).exp();
        assert_eq!(multistart_budget(2, 5, usize::MAX).unwrap(), phi.ceil() as usize);
        assert_eq!(multistart_budget(2, 5, usize::MAX).unwrap(), 3442);
        assert_eq!(multistart_budget(4, 5, 5000).unwrap(), 5000);
        assert_eq!(multistart_budget(2, 1, 10).unwrap(), 10);
        assert!(multistart_budget(2, 5, 0).is_err());
    }
}
