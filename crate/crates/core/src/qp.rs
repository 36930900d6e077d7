//! Strictly convex quadratic programs with linear inequality constraints,
//! solved by the dual active-set method of Goldfarb and Idnani.
//!
//! Minimizes `½ xᵀ H x + gᵀ x` subject to `C x ≥ lb`, where the Hessian is
//! supplied as an upper triangular factor `R` with `H = RᵀR`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Result of [`solve_qp`].
#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution {
    pub x: Vec<f64>,
    /// Lagrange multipliers, one per constraint row; zero for inactive rows.
    pub multipliers: Vec<f64>,
    /// Indices of the constraints in the final active set.
    pub active: Vec<usize>,
    pub objective: f64,
    /// Number of constraint additions and deletions performed.
    pub iterations: usize,
}

/// Upper triangular `R` with `H = RᵀR` for a symmetric positive definite `H`.
pub fn cholesky_factor(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = nalgebra::Cholesky::new(h.clone())
        .ok_or_else(|| Error::Numerical("Hessian is not positive definite".into()))?;
    Ok(chol.l().transpose())
}

/// Upper triangular `R` with `RᵀR = AᵀA + μ I`, from a QR factorization of
/// the stacked matrix `[A; √μ I]`.
pub fn stacked_factor(a: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut stacked = DMatrix::zeros(rows + cols, cols);
    stacked.view_mut((0, 0), (rows, cols)).copy_from(a);
    let root = mu.max(0.0).sqrt();
    for i in 0..cols {
        stacked[(rows + i, i)] = root;
    }
    stacked.qr().r()
}

/// Inverse of an upper triangular matrix.
fn upper_inverse(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = r.nrows();
    let scale = r.diagonal().amax();
    if (0..n).any(|i| r[(i, i)].abs() <= 1e-15 * scale) || scale == 0.0 {
        return Err(Error::Numerical("Hessian factor is singular".into()));
    }
    let mut inv = DMatrix::identity(n, n);
    if !r.solve_upper_triangular_mut(&mut inv) {
        return Err(Error::Numerical("Hessian factor is singular".into()));
    }
    Ok(inv)
}

fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    let h = a.hypot(b);
    if h == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        (a / h, b / h, h)
    }
}

/// Rotates columns `i` and `k` of `m` by `(c, s)`.
fn rotate_columns(m: &mut DMatrix<f64>, i: usize, k: usize, c: f64, s: f64) {
    for row in 0..m.nrows() {
        let (a, b) = (m[(row, i)], m[(row, k)]);
        m[(row, i)] = c * a + s * b;
        m[(row, k)] = -s * a + c * b;
    }
}

/// Solves `min ½ xᵀ RᵀR x + gᵀ x` subject to `c x ≥ lb`.
///
/// Fails with [`Error::Infeasible`] when a violated constraint cannot be
/// satisfied together with the active ones.
pub fn solve_qp(r: &DMatrix<f64>, g: &[f64], c: &DMatrix<f64>, lb: &[f64]) -> Result<QpSolution> {
    let n = r.ncols();
    if r.nrows() != n || g.len() != n || c.ncols() != n || lb.len() != c.nrows() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if g.len() != n { g.len() } else { c.ncols() },
        });
    }
    let m = c.nrows();
    let mut j = upper_inverse(r)?;
    // unconstrained minimizer −H⁻¹g = −J Jᵀ g
    let gv = DVector::from_column_slice(g);
    let mut x = -(&j * (j.transpose() * &gv));
    let mut rt = DMatrix::<f64>::zeros(n, n);
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let row_norms: Vec<f64> = (0..m).map(|i| c.row(i).norm()).collect();
    let max_steps = 10 * (n + m) + 100;
    let mut steps = 0;

    loop {
        // most violated constraint, normalized by its row norm
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..m {
            if active.contains(&i) || row_norms[i] == 0.0 {
                continue;
            }
            let slack = c.row(i).dot(&x.transpose()) - lb[i];
            let tol = 1e-13 * (lb[i].abs() + row_norms[i] * x.amax()).max(1e-300);
            if slack < -tol {
                let scaled = slack / row_norms[i];
                if pick.is_none_or(|(_, best)| scaled < best) {
                    pick = Some((i, scaled));
                }
            }
        }
        // constraints with a zero row are satisfied or not regardless of x
        if let Some(i) = (0..m).find(|&i| row_norms[i] == 0.0 && lb[i] > 0.0) {
            return Err(Error::Infeasible(format!("constraint {i} has a zero row and positive bound")));
        }
        let Some((p, _)) = pick else { break };
        let np = c.row(p).transpose();
        let mut u_new = 0.0;

        loop {
            steps += 1;
            if steps > max_steps {
                return Err(Error::Numerical("active-set iteration limit reached".into()));
            }
            let q = active.len();
            let d = j.transpose() * &np;
            let mut z = DVector::zeros(n);
            for k in q..n {
                z.axpy(d[k], &j.column(k), 1.0);
            }
            let mut rv = d.rows(0, q).into_owned();
            if q > 0 && !rt.view((0, 0), (q, q)).solve_upper_triangular_mut(&mut rv) {
                return Err(Error::Numerical("active constraint factor is singular".into()));
            }
            // partial (dual) step length
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for k in 0..q {
                if rv[k] > 0.0 {
                    let ratio = u[k] / rv[k];
                    if ratio < t1 {
                        t1 = ratio;
                        drop = Some(k);
                    }
                }
            }
            // full (primal) step length
            let d2 = d.rows(q, n - q).norm();
            let t2 = if d2 <= 1e-12 * d.norm() {
                f64::INFINITY
            } else {
                let slack = np.dot(&x) - lb[p];
                -slack / z.dot(&np)
            };
            if t1.is_infinite() && t2.is_infinite() {
                return Err(Error::Infeasible(format!(
                    "constraint {p} cannot be satisfied together with the active set"
                )));
            }
            let t = t1.min(t2);
            if t2.is_finite() {
                x.axpy(t, &z, 1.0);
            }
            for k in 0..q {
                u[k] -= t * rv[k];
            }
            u_new += t;
            if t2 <= t1 {
                // add p: rotate the trailing part of d onto position q
                let mut dv = d;
                for k in (q + 1..n).rev() {
                    let (cs, sn, h) = givens(dv[k - 1], dv[k]);
                    if sn == 0.0 {
                        continue;
                    }
                    dv[k - 1] = h;
                    dv[k] = 0.0;
                    rotate_columns(&mut j, k - 1, k, cs, sn);
                }
                for k in 0..=q {
                    rt[(k, q)] = dv[k];
                }
                active.push(p);
                u.push(u_new);
                break;
            }
            // drop the blocking constraint and retry p
            let l = drop.expect("finite partial step has a blocking constraint");
            for col in l..q - 1 {
                for row in 0..=col + 1 {
                    rt[(row, col)] = rt[(row, col + 1)];
                }
            }
            for row in 0..n {
                rt[(row, q - 1)] = 0.0;
            }
            for k in l..q.saturating_sub(1) {
                let (cs, sn, h) = givens(rt[(k, k)], rt[(k + 1, k)]);
                if sn == 0.0 {
                    continue;
                }
                rt[(k, k)] = h;
                rt[(k + 1, k)] = 0.0;
                for col in k + 1..q - 1 {
                    let (a, b) = (rt[(k, col)], rt[(k + 1, col)]);
                    rt[(k, col)] = cs * a + sn * b;
                    rt[(k + 1, col)] = -sn * a + cs * b;
                }
                rotate_columns(&mut j, k, k + 1, cs, sn);
            }
            active.remove(l);
            u.remove(l);
        }
    }

    let mut multipliers = vec![0.0; m];
    for (&i, &ui) in active.iter().zip(&u) {
        multipliers[i] = ui.max(0.0);
    }
    let rx = r * &x;
    let objective = 0.5 * rx.norm_squared() + gv.dot(&x);
    Ok(QpSolution {
        x: x.iter().copied().collect(),
        multipliers,
        active,
        objective,
        iterations: steps,
    })
}

/// KKT residuals of a candidate solution for `min ½ xᵀ H x + gᵀ x`, `C x ≥ lb`:
/// `(stationarity, primal infeasibility, complementarity)`, each scaled by
/// the size of the data.
pub fn kkt_residuals(
    h: &DMatrix<f64>,
    g: &[f64],
    c: &DMatrix<f64>,
    lb: &[f64],
    x: &[f64],
    multipliers: &[f64],
) -> (f64, f64, f64) {
    let xv = DVector::from_column_slice(x);
    let lam = DVector::from_column_slice(multipliers);
    let grad = h * &xv + DVector::from_column_slice(g);
    let force = c.transpose() * &lam;
    let scale = (h.amax() * xv.amax()).max(DVector::from_column_slice(g).amax()).max(1e-300);
    let stationarity = (&grad - &force).amax() / scale;
    let cx = c * &xv;
    let bscale = lb.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut infeasibility = 0.0f64;
    let mut complementarity = 0.0f64;
    for i in 0..lb.len() {
        let slack = cx[i] - lb[i];
        infeasibility = infeasibility.max(-slack);
        complementarity = complementarity.max((multipliers[i] * slack).abs());
    }
    let lscale = lam.amax().max(1.0);
    (stationarity, infeasibility.max(0.0) / bscale, complementarity / (bscale * lscale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(values))
    }

    #[test]
    fn unconstrained_optimum_already_feasible() {
        // min ½‖x‖² − (1, 2)·x with x ≥ 0: optimum (1, 2) is interior
        let h = diag(&[1.0, 1.0]);
        let r = cholesky_factor(&h).unwrap();
        let c = DMatrix::identity(2, 2);
        let sol = solve_qp(&r, &[-1.0, -2.0], &c, &[0.0, 0.0]).unwrap();
        assert!(sol.active.is_empty());
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 2.0).abs() < 1e-14);
        assert_eq!(sol.multipliers, vec![0.0, 0.0]);
    }

    #[test]
    fn single_violated_constraint_is_tight() {
        // min ½‖x‖² with x1 + x2 ≥ 2: x = (1, 1), multiplier 1
        let r = DMatrix::identity(2, 2);
        let c = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let sol = solve_qp(&r, &[0.0, 0.0], &c, &[2.0]).unwrap();
        assert_eq!(sol.active, vec![0]);
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 1.0).abs() < 1e-14);
        assert!((sol.multipliers[0] - 1.0).abs() < 1e-14);
        let (st, pf, cp) = kkt_residuals(&DMatrix::identity(2, 2), &[0.0, 0.0], &c, &[2.0], &sol.x, &sol.multipliers);
        assert!(st < 1e-14 && pf < 1e-14 && cp < 1e-14);
    }

    #[test]
    fn drops_constraint_that_becomes_inactive() {
        // x1 ≥ 1 is picked first, then x1 + x2 ≥ 4 makes it slack for H = I
        let r = DMatrix::identity(2, 2);
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let sol = solve_qp(&r, &[0.0, 0.0], &c, &[1.0, 4.0]).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-13 && (sol.x[1] - 2.0).abs() < 1e-13);
        assert_eq!(sol.active, vec![1]);
        assert_eq!(sol.multipliers[0], 0.0);
    }

    #[test]
    fn detects_infeasibility() {
        let r = DMatrix::identity(1, 1);
        let c = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        assert!(matches!(solve_qp(&r, &[0.0], &c, &[1.0, 0.0]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn stacked_factor_matches_normal_matrix() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let r = stacked_factor(&a, 0.5);
        let h = a.transpose() * &a + DMatrix::identity(2, 2) * 0.5;
        assert!((r.transpose() * &r - h).amax() < 1e-12);
    }

    proptest! {
        #[test]
        fn random_problems_satisfy_kkt(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(1..7);
            let m = rng.random_range(1..12);
            let a = DMatrix::from_fn(n + 2, n, |_, _| rng.random_range(-1.0..1.0));
            let h = a.transpose() * &a + DMatrix::identity(n, n) * 0.1;
            let g: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let c = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            // feasible by construction: bounds below the value at a random point
            let x0 = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let cx0 = &c * &x0;
            let lb: Vec<f64> = (0..m).map(|i| cx0[i] - rng.random_range(0.0..0.5)).collect();
            let sol = solve_qp(&cholesky_factor(&h).unwrap(), &g, &c, &lb).unwrap();
            let (st, pf, cp) = kkt_residuals(&h, &g, &c, &lb, &sol.x, &sol.multipliers);
            prop_assert!(st < 1e-10 && pf < 1e-10 && cp < 1e-10, "{st} {pf} {cp}");
        }
    }
}
