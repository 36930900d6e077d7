//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values (descending) and right singular vectors (as columns).
pub(crate) struct RightSvd {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// SVD of a matrix with at least as many rows as columns.
pub(crate) fn right_svd(a: &DMatrix<f64>) -> Result<RightSvd> {
    debug_assert!(a.nrows() >= a.ncols());
    let svd = nalgebra::SVD::try_new(a.clone(), false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD returned no right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut vectors = DMatrix::zeros(a.ncols(), order.len());
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v_t.row(i).transpose());
    }
    Ok(RightSvd { values, vectors })
}

/// Singular values only, descending.
pub(crate) fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let sv = if a.nrows() >= a.ncols() {
        nalgebra::SVD::try_new(a.clone(), false, false, f64::EPSILON, 0)
    } else {
        nalgebra::SVD::try_new(a.transpose(), false, false, f64::EPSILON, 0)
    }
    .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?
    .singular_values;
    let mut values: Vec<f64> = sv.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Minimum-norm least-squares solution of `a x ≈ rhs`, discarding singular
/// values below `rcond * σ_max`.
pub(crate) fn lstsq(a: &DMatrix<f64>, rhs: &DVector<f64>, rcond: f64) -> Result<DVector<f64>> {
    let svd = nalgebra::SVD::try_new(a.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let smax = svd.singular_values.max();
    let eps = rcond * smax;
    svd.solve(rhs, eps).map_err(|e| Error::Numerical(e.to_string()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_sorted_with_vectors() {
        let a = DMatrix::from_row_slice(3, 2, &[3.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let s = right_svd(&a).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values[0] - 3.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
        assert!((s.vectors[(1, 1)].abs() - 1.0).abs() < 1e-14);
        let wide = DMatrix::from_row_slice(1, 3, &[0.0, 2.0, 0.0]);
        assert_eq!(singular_values(&wide).unwrap(), vec![2.0]);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let x = lstsq(&a, &DVector::from_vec(vec![3.0, 5.0, 7.0]), 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
