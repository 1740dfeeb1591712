//! Closed-form densities written as single-variate Fox-H descriptors.

use num_complex::Complex;

use crate::density::WeightedDensity;
use crate::error::{Error, Result};
use crate::gamma::log_gamma_complex;
use crate::kernel::{FoxHKernel, VariateGroup};
use crate::scalar::Real;

/// Gamma(shape, scale): `x^{k-1} e^{-x/θ} / (Γ(k) θ^k)`, i.e.
/// `ψ = 1/(Γ(k) θ)`, `ζ = 1/θ` and the lone lower factor `(k - 1, 1)`.
pub fn gamma<T: Real>(shape: T, scale: T) -> Result<WeightedDensity<T>> {
    if !(shape > T::zero() && scale > T::zero()) {
        return Err(Error::Domain(format!(
            "gamma density needs shape, scale > 0 (got {shape}, {scale})"
        )));
    }
    let ln_g = log_gamma_complex(Complex::new(shape, T::zero()))?.re;
    let kernel = FoxHKernel::new(1).with_variate(
        0,
        VariateGroup::new().lower_numerator(shape - T::one(), T::one()),
    );
    WeightedDensity::new(
        (-ln_g).exp() / scale,
        T::one(),
        vec![Complex::new(T::one() / scale, T::zero())],
        vec![T::one()],
        kernel,
    )
}

/// Exponential with the given mean.
pub fn exponential<T: Real>(mean: T) -> Result<WeightedDensity<T>> {
    gamma(T::one(), mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{evaluate, plan_for_density};
    use crate::plan::PlanOptions;

    #[test]
    fn gamma_three_at_two() {
        let d = gamma(3.0, 1.0).unwrap();
        let plan = plan_for_density(&d, &PlanOptions::default()).unwrap();
        let r = evaluate(&d, 2.0, &plan).unwrap();
        let want = 4.0 * (-2.0f64).exp() / 2.0;
        assert!((r.value - want).abs() < 1e-10 * want, "{}", r.value);
    }

    #[test]
    fn scaled_exponential() {
        let d = exponential(10.0).unwrap();
        let plan = plan_for_density(&d, &PlanOptions::default()).unwrap();
        for x in [0.5, 5.0, 40.0] {
            let want = (-x / 10.0f64).exp() / 10.0;
            let r = evaluate(&d, x, &plan).unwrap();
            assert!(
                (r.value - want).abs() < 1e-10 * want,
                "x = {x}: {}",
                r.value
            );
        }
    }
}
