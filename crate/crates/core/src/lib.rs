//! Multivariate rational approximation of scattered data.
//!
//! Two fitting paths share one model type: a linearized least-squares fit in
//! a data-adapted orthonormal polynomial basis (optionally with degree
//! reduction), and a pole-free fit that keeps the denominator above a
//! positive level on the whole box.

pub mod domain;
pub mod error;
pub mod globalmin;
pub mod lcurve;
mod linalg;
pub mod linfit;
pub mod metrics;
pub mod model;
pub mod multiindex;
pub mod orthobasis;
pub mod qp;
pub mod sampling;
pub mod sipfit;
pub mod testfns;

pub use domain::{AffineMap, BoxDomain, SampleSet};
pub use error::{Error, Result};
pub use linfit::{fit_polynomial, fit_rational_onb, fit_rational_reduced, reduce_degrees};
pub use model::{FitReport, ModelBasis, RationalModel};
pub use multiindex::{alpha, MultiIndex, MultiIndexOrder};
pub use orthobasis::OrthonormalBasis;
pub use sipfit::{fit_rational_polefree, SipConfig};
pub use testfns::TestFunction;
