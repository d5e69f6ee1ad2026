//! Hyperinterpolation on the unit sphere `S²`.
//!
//! Fits degree-`n` spherical-harmonic approximations from point samples using
//! a quadrature rule, measures how far a rule is from being exact on `P_{2n}`
//! through its Marcinkiewicz–Zygmund constant, and runs convergence sweeps.
//!
//! ```
//! use sphinterp::{fit, product_gauss_rule, TestFunction};
//!
//! let rule = product_gauss_rule(12).unwrap();
//! let f = TestFunction::F1;
//! let h = fit(&rule, |x| f.eval(x), 6).unwrap();
//! assert_eq!(h.coeffs().len(), 49);
//! ```

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod harmonics;
pub mod hyperinterp;
pub mod pointsets;
pub mod quadrature;
pub mod testfuncs;

pub use analysis::{fit_rate, l2_error, sobolev_norm, RateFit, SobolevWeights};
pub use error::{Error, Result};
pub use experiment::{run_sweep, PointSource, Schedule, SweepConfig, SweepResult};
pub use harmonics::{eval_basis, kernel_eval, BasisIndex, HarmonicBasis, SpherePoint, SPHERE_AREA};
pub use hyperinterp::{fit, fit_audited, fit_samples, Hyperinterpolant};
pub use pointsets::{
    equal_area, equal_weight_rule, load_pointset, product_gauss_rule, random_uniform, Provenance,
    QuadratureRule,
};
pub use quadrature::{exactness_degree, mz_constant, ExactnessReport, MzReport};
pub use testfuncs::TestFunction;
