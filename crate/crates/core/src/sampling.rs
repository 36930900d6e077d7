//! Sampling designs and the multiplicative noise model.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{OpenClosed01, StandardNormal};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::multiindex::alpha;

/// Parameters of a Latin hypercube design.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignSpec {
    pub domain: BoxDomain,
    pub count: usize,
    pub seed: u64,
}

/// Sample count of the decoupled design, split by location.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DlhdCounts {
    pub total: usize,
    pub per_face: usize,
    pub interior: usize,
}

/// Number of samples used throughout for degrees `(M, N)`: twice the total
/// number of coefficients.
pub fn default_sample_count(n: usize, m: usize, d: usize) -> Result<usize> {
    Ok(2 * (alpha(n, m)? + alpha(n, d)?))
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Latin hypercube sample: in every coordinate the `count` values fall in
/// distinct equal-width strata, with a uniform offset inside each stratum.
/// Points never touch the boundary of the box.
pub fn lhs(spec: &DesignSpec) -> Result<Vec<Vec<f64>>> {
    if spec.count == 0 {
        return Err(Error::InvalidInput("Latin hypercube needs at least one point".into()));
    }
    let mut rng = rng_for(spec.seed, 0);
    Ok(lhs_with(&mut rng, spec.domain.bounds(), spec.count))
}

fn lhs_with(rng: &mut ChaCha8Rng, bounds: &[(f64, f64)], count: usize) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; bounds.len()]; count];
    let mut strata: Vec<usize> = (0..count).collect();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        strata.shuffle(rng);
        for (p, &s) in points.iter_mut().zip(&strata) {
            p[i] = loop {
                // offset in (0, 1): the closed end is flipped to stay off the lower bound
                let u = 1.0 - rng.sample::<f64, _>(OpenClosed01);
                let t = (s as f64 + u) / count as f64;
                let x = lo + (hi - lo) * t;
                if x > lo && x < hi {
                    break x;
                }
            };
        }
    }
    points
}

/// Sample counts of the decoupled design for dimension `n` and degrees `(m, d)`.
///
/// Each of the `2n` facets receives `floor((α_{n-1}(m) + α_{n-1}(d)) / n)`
/// points; the remainder of `2(α_n(m) + α_n(d))` goes to the interior.
pub fn dlhd_counts(n: usize, m: usize, d: usize) -> Result<DlhdCounts> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "decoupled design needs at least two dimensions".into(),
        ));
    }
    let total = default_sample_count(n, m, d)?;
    let per_face = (alpha(n - 1, m)? + alpha(n - 1, d)?) / n;
    let on_faces = 2 * n * per_face;
    if on_faces > total {
        return Err(Error::InvalidInput(format!(
            "degrees ({m}, {d}) leave a negative interior count for n = {n}"
        )));
    }
    Ok(DlhdCounts {
        total,
        per_face,
        interior: total - on_faces,
    })
}

/// Decoupled Latin hypercube design: an independent `(n-1)`-dimensional LHS
/// on every facet of the box plus an `n`-dimensional interior LHS.
///
/// Face points come first, ordered by coordinate and lower/upper facet.
pub fn dlhd(domain: &BoxDomain, m: usize, d: usize, seed: u64) -> Result<(Vec<Vec<f64>>, DlhdCounts)> {
    let n = domain.dim();
    let counts = dlhd_counts(n, m, d)?;
    let mut points = Vec::with_capacity(counts.total);
    let bounds = domain.bounds();
    for fixed in 0..n {
        let free: Vec<(f64, f64)> = (0..n).filter(|&i| i != fixed).map(|i| bounds[i]).collect();
        for (side, value) in [bounds[fixed].0, bounds[fixed].1].into_iter().enumerate() {
            if counts.per_face == 0 {
                continue;
            }
            let mut rng = rng_for(seed, 1 + (2 * fixed + side) as u64);
            for face_point in lhs_with(&mut rng, &free, counts.per_face) {
                let mut p = face_point;
                p.insert(fixed, value);
                points.push(p);
            }
        }
    }
    if counts.interior > 0 {
        let mut rng = rng_for(seed, 1 + 2 * n as u64);
        points.extend(lhs_with(&mut rng, bounds, counts.interior));
    }
    Ok((points, counts))
}

/// Multiplies each value by `1 + ε z_k` with independent standard normal `z_k`.
pub fn add_noise(values: &[f64], epsilon: f64, seed: u64) -> Vec<f64> {
    if epsilon == 0.0 {
        return values.to_vec();
    }
    let mut rng = rng_for(seed, u64::MAX);
    values
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v * (1.0 + epsilon * z)
        })
        .collect()
}

/// Uniform random points on the facets of the box, distributed evenly over
/// the `2n` facets.
pub fn uniform_face_points(domain: &BoxDomain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = domain.dim();
    let mut rng = rng_for(seed, 1 << 32);
    (0..count)
        .map(|k| {
            let facet = k % (2 * n);
            let (fixed, upper) = (facet / 2, facet % 2 == 1);
            let mut p: Vec<f64> = domain
                .bounds()
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect();
            p[fixed] = if upper { domain.upper(fixed) } else { domain.lower(fixed) };
            p
        })
        .collect()
}

/// Uniform random points in the box.
pub fn uniform_points(domain: &BoxDomain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, (1 << 32) + 1);
    (0..count)
        .map(|_| {
            domain
                .bounds()
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect()
        })
        .collect()
}
