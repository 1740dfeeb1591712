//! Multivariate Fox-H functions by Mellin-Barnes quadrature, sum-of-variates
//! descriptor algebra, and RIS-over-Rician link analysis with a Monte Carlo
//! cross-check.
//!
//! The numerical core ([`gamma`], [`kernel`], [`density`], [`plan`],
//! [`eval`]) is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, which the rest of the crate uses.

pub mod error;
pub mod scalar;

pub mod density;
pub mod eval;
pub mod gamma;
pub mod kernel;
mod lp;
pub mod plan;
pub mod qmc;
pub mod textfmt;

pub mod asymptotic;
pub mod expectation;
pub mod families;
pub mod sum;

pub mod config;
pub mod mc;
pub mod output;
pub mod ris;

pub use error::{Error, Result};
pub use eval::{
    evaluate, evaluate_complex, evaluate_raw, integrand, plan_for_args, plan_for_density,
    EvalResult,
};
pub use gamma::{gamma_complex, log_gamma_complex};
pub use plan::{
    plan_contours, validate_kernel, ContourPlan, PlanOptions, Strategy, ValidationReport,
    VariateRole,
};
pub use scalar::Real;

pub type Kernel = kernel::FoxHKernel<f64>;
pub type Density = density::WeightedDensity<f64>;
pub type Eval = eval::EvalResult<f64>;
pub type Complex64 = num_complex::Complex<f64>;

pub type KernelF32 = kernel::FoxHKernel<f32>;
pub type DensityF32 = density::WeightedDensity<f32>;
