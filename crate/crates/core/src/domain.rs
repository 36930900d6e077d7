//! Box domains and sample sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `∏ [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    bounds: Vec<(f64, f64)>,
}

impl BoxDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidDomain("domain needs at least one coordinate".into()));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDomain(format!(
                    "coordinate {i}: bounds {lo}:{hi} must be finite with lo < hi"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); n])
    }

    /// Parses `lo:hi[,lo:hi…]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bounds = spec
            .split(',')
            .map(|part| {
                let (lo, hi) = part
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidDomain(format!("`{part}` is not lo:hi")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidDomain(format!("`{s}` is not a number")))
                };
                Ok((parse(lo)?, parse(hi)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bounds)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.bounds[i].0
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.bounds[i].1
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(&self.bounds)
                .all(|(&xi, &(lo, hi))| xi >= lo && xi <= hi)
    }

    /// Clamps `x` onto the box in place.
    pub fn project(&self, x: &mut [f64]) {
        for (xi, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *xi = xi.clamp(lo, hi);
        }
    }

    /// Affine map sending this box onto `[-1, 1]^n`.
    pub fn unit_map(&self) -> AffineMap {
        let (scale, shift) = self
            .bounds
            .iter()
            .map(|&(lo, hi)| (2.0 / (hi - lo), -(hi + lo) / (hi - lo)))
            .unzip();
        AffineMap { scale, shift }
    }

    /// Formats as `lo:hi,lo:hi…`.
    pub fn to_spec(&self) -> String {
        self.bounds
            .iter()
            .map(|(lo, hi)| format!("{lo:?}:{hi:?}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Coordinate-wise affine map `t_i = scale_i * x_i + shift_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        Self {
            scale: vec![1.0; n],
            shift: vec![0.0; n],
        }
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &xi), (&s, &c)) in out.iter_mut().zip(x).zip(self.scale.iter().zip(&self.shift)) {
            *o = s * xi + c;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn invert(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.scale.iter().zip(&self.shift))
            .map(|(&ti, (&s, &c))| (ti - c) / s)
            .collect()
    }
}

/// Points with function values inside a box domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    domain: BoxDomain,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(domain: BoxDomain, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("sample set must contain at least one point".into()));
        }
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let n = domain.dim();
        for (k, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            if !domain.contains(p) {
                return Err(Error::OutOfDomain { index: k });
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("value {k} is not finite")));
        }
        Ok(Self {
            domain,
            points,
            values,
        })
    }

    /// Samples `f` at the given points.
    pub fn from_fn(domain: BoxDomain, points: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = points.iter().map(|p| f(p)).collect();
        Self::new(domain, points, values)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same points with replaced values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.domain.clone(), self.points.clone(), values)
    }
}
