//! Monomial multi-indices and the degree-graded ordering shared by every basis.
//!
//! Monomials are ordered first by total degree. Within one degree,
//! `x^i < x^j` when `i_k > j_k` at the first position `k` where the exponents
//! differ, so for three variables the sequence starts
//! `1, x, y, z, x², xy, xz, y², yz, z², x³, …`.
//!
//! The ordering is produced by an inductive sweep: the monomials of degree
//! `d` are obtained by multiplying a contiguous tail of the degree `d - 1`
//! block by each variable in turn. The same sweep drives the orthonormal
//! basis construction, so every index `j > 0` records the earlier index it
//! was generated from and the variable it was multiplied by.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported total degree.
pub const MAX_DEGREE: usize = 255;

/// Dimension of the space of `n`-variate polynomials of total degree at most `d`,
/// i.e. `binomial(n + d, d)`.
pub fn alpha(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let overflow = || Error::DimensionOverflow { n, degree: d };
    // C(n+i, i) = C(n+i-1, i-1) * (n+i) / i, exact at every step.
    let mut count: u128 = 1;
    for i in 1..=d as u128 {
        count = count
            .checked_mul(n as u128 + i)
            .ok_or_else(overflow)?
            / i;
    }
    usize::try_from(count).map_err(|_| overflow())
}

/// Exponent vector of a monomial `x_1^{i_1} ⋯ x_n^{i_n}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(exponents: Vec<u8>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidInput("multi-index needs at least one variable".into()));
        }
        let index = Self(exponents);
        if index.degree() > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(index.degree()));
        }
        Ok(index)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    /// Total degree.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn times_variable(&self, var: usize) -> Self {
        let mut exps = self.0.clone();
        exps[var] += 1;
        Self(exps)
    }

    /// Value of the monomial at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Compares two multi-indices under the degree-graded ordering.
///
/// Panics if the indices have different dimensions.
pub fn compare_order(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    assert_eq!(a.dim(), b.dim(), "multi-indices of different dimension");
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        other => return other,
    }
    for (ai, bi) in a.0.iter().zip(&b.0) {
        if ai != bi {
            // Larger leading exponent comes first.
            return bi.cmp(ai);
        }
    }
    Ordering::Equal
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_order(self, other)
    }
}

/// The ordered monomial sequence of all indices with total degree `<= max_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexOrder {
    n: usize,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    /// `parent[j]` is the index multiplied by `variable[j]` to obtain index `j` (unused at 0).
    parent: Vec<usize>,
    variable: Vec<usize>,
}

impl MultiIndexOrder {
    /// Builds the sequence with the inductive multiply-by-variable sweep.
    pub fn generate(n: usize, max_degree: usize) -> Result<Self> {
        if max_degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(max_degree));
        }
        let len = alpha(n, max_degree)?;
        let mut indices = Vec::with_capacity(len);
        let mut parent = Vec::with_capacity(len);
        let mut variable = Vec::with_capacity(len);
        indices.push(MultiIndex::zero(n));
        parent.push(0);
        variable.push(0);

        sweep(n, max_degree, |_, k, var| {
            let next = indices[k].times_variable(var);
            indices.push(next);
            parent.push(k);
            variable.push(var);
        });
        debug_assert_eq!(indices.len(), len);

        Ok(Self {
            n,
            max_degree,
            indices,
            parent,
            variable,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, j: usize) -> &MultiIndex {
        &self.indices[j]
    }

    /// The `(parent, variable)` pair that generated index `j >= 1`.
    pub fn generator(&self, j: usize) -> (usize, usize) {
        (self.parent[j], self.variable[j])
    }

    /// Number of leading entries with degree `<= d`.
    pub fn prefix_len(&self, d: usize) -> usize {
        alpha(self.n, d.min(self.max_degree)).expect("prefix of a valid order")
    }

    /// Evaluates every monomial in the sequence at `x`, writing into `out`.
    ///
    /// Each entry is one multiplication away from its generator.
    pub fn eval_monomials_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        out[0] = 1.0;
        for j in 1..self.indices.len().min(out.len()) {
            out[j] = out[self.parent[j]] * x[self.variable[j]];
        }
    }

    pub fn eval_monomials(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_monomials_into(x, &mut out);
        out
    }
}

/// Runs the inductive sweep over degrees `1..=max_degree`.
///
/// For every new index `i` (in order) calls `visit(i, k, var)`, where the new
/// monomial is monomial `k` multiplied by variable `var`. The bookkeeping
/// `starts[j]` marks where the block last multiplied by variable `j` begins;
/// `starts[n]` is the last index of the previous degree.
pub(crate) fn sweep(n: usize, max_degree: usize, mut visit: impl FnMut(usize, usize, usize)) {
    let mut starts = vec![0usize; n + 1];
    let mut i = 1usize;
    for _degree in 1..=max_degree {
        for var in 0..n {
            let block_start = i;
            for k in starts[var]..=starts[n] {
                visit(i, k, var);
                i += 1;
            }
            starts[var] = block_start;
        }
        starts[n] = i - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(e: &[u8]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    fn binomial_by_factorials(n: u64, k: u64) -> u64 {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k as u128 {
            num *= n as u128 - i;
            den *= i + 1;
        }
        (num / den) as u64
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(3, 3).unwrap(), 20);
        assert_eq!(alpha(1, 7).unwrap(), 8);
        assert_eq!(alpha(4, 5).unwrap(), binomial_by_factorials(9, 5) as usize);
        assert_eq!(alpha(4, 5).unwrap(), 126);
        assert_eq!(alpha(5, 0).unwrap(), 1);
    }

    #[test]
    fn alpha_overflow_is_reported() {
        assert!(matches!(
            alpha(200, 200),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(alpha(0, 3).is_err());
    }

    #[test]
    fn comparator_examples() {
        // x² < xy in two variables
        assert_eq!(compare_order(&mi(&[2, 0]), &mi(&[1, 1])), Ordering::Less);
        // z² < x³ in three variables
        assert_eq!(compare_order(&mi(&[0, 0, 2]), &mi(&[3, 0, 0])), Ordering::Less);
        let a = mi(&[1, 2, 0]);
        assert_eq!(compare_order(&a, &a), Ordering::Equal);
    }

    #[test]
    #[should_panic]
    fn comparator_rejects_mixed_dimensions() {
        compare_order(&mi(&[1]), &mi(&[1, 0]));
    }

    #[test]
    fn three_variable_sequence() {
        let order = MultiIndexOrder::generate(3, 3).unwrap();
        let expected: [[u8; 3]; 20] = [
            [0, 0, 0],
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [2, 0, 0],
            [1, 1, 0],
            [1, 0, 1],
            [0, 2, 0],
            [0, 1, 1],
            [0, 0, 2],
            [3, 0, 0],
            [2, 1, 0],
            [2, 0, 1],
            [1, 2, 0],
            [1, 1, 1],
            [1, 0, 2],
            [0, 3, 0],
            [0, 2, 1],
            [0, 1, 2],
            [0, 0, 3],
        ];
        let got: Vec<&[u8]> = order.indices().iter().map(|m| m.exponents()).collect();
        let want: Vec<&[u8]> = expected.iter().map(|e| &e[..]).collect();
        assert_eq!(got, want);
        // x²z is generated from xz times x
        assert_eq!(order.generator(12), (6, 0));
    }

    #[test]
    fn small_sequences() {
        let order = MultiIndexOrder::generate(1, 2).unwrap();
        let got: Vec<Vec<u8>> = order.indices().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2]]);

        let order = MultiIndexOrder::generate(2, 2).unwrap();
        let mut oracle: Vec<MultiIndex> = (0..=2u8)
            .flat_map(|i| (0..=2u8).map(move |j| mi(&[i, j])))
            .filter(|m| m.degree() <= 2)
            .collect();
        oracle.sort_by(compare_order);
        assert_eq!(order.indices(), &oracle[..]);
        let got: Vec<Vec<u8>> = order.indices().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn rejects_large_degree() {
        assert!(matches!(
            MultiIndexOrder::generate(1, 256),
            Err(Error::DegreeTooLarge(256))
        ));
    }

    #[test]
    fn monomial_evaluation_follows_generators() {
        let order = MultiIndexOrder::generate(3, 4).unwrap();
        let x = [0.3, -1.7, 2.1];
        let vals = order.eval_monomials(&x);
        for (j, m) in order.indices().iter().enumerate() {
            approx::assert_relative_eq!(vals[j], m.eval(&x), max_relative = 1e-14);
        }
    }

    /// All indices of degree <= max_degree, sorted with the comparator.
    fn sorted_oracle(n: usize, max_degree: usize) -> Vec<MultiIndex> {
        let mut all = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for prefix in &all {
                let used: usize = prefix.iter().map(|&e: &u8| e as usize).sum();
                for e in 0..=(max_degree - used) {
                    let mut p = prefix.clone();
                    p.push(e as u8);
                    next.push(p);
                }
            }
            all = next;
        }
        let mut out: Vec<MultiIndex> = all.into_iter().map(MultiIndex).collect();
        out.sort_by(compare_order);
        out
    }

    proptest! {
        #[test]
        fn sweep_matches_sorted_oracle(n in 1usize..=7, max_degree in 0usize..=6) {
            let order = MultiIndexOrder::generate(n, max_degree).unwrap();
            prop_assert_eq!(order.len(), alpha(n, max_degree).unwrap());
            prop_assert_eq!(order.indices(), &sorted_oracle(n, max_degree)[..]);
            for w in order.indices().windows(2) {
                prop_assert_eq!(compare_order(&w[0], &w[1]), Ordering::Less);
            }
            for d in 0..=max_degree {
                let p = order.prefix_len(d);
                prop_assert!(order.indices()[..p].iter().all(|m| m.degree() <= d));
                prop_assert!(order.indices()[p..].iter().all(|m| m.degree() > d));
            }
        }

        #[test]
        fn alpha_recurrence(n in 2usize..=7, d in 1usize..=6) {
            prop_assert_eq!(alpha(n, d).unwrap(), alpha(n, d - 1).unwrap() + alpha(n - 1, d).unwrap());
        }
    }
}
