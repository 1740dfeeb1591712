use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::FoxHKernel;
use crate::scalar::Real;

/// A function of the form `ψ x^{a-1} H[{ζ_k x^{a_k}}]` on `x > 0`.
///
/// Densities, CDFs and assembled sum descriptors all share this shape; a CDF
/// `ψ x^{b} H[..]` is stored with `power_offset = b + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDensity<T> {
    pub prefactor: T,
    pub power_offset: T,
    pub scales: Vec<Complex<T>>,
    pub exponents: Vec<T>,
    pub kernel: FoxHKernel<T>,
}

/// `Re(Σ_k a_k s_k + a) > 0` on the contour.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityConstraint {
    pub exponents: Vec<f64>,
    pub offset: f64,
}

impl<T: Real> WeightedDensity<T> {
    pub fn new(
        prefactor: T,
        power_offset: T,
        scales: Vec<Complex<T>>,
        exponents: Vec<T>,
        kernel: FoxHKernel<T>,
    ) -> Result<Self> {
        let d = WeightedDensity {
            prefactor,
            power_offset,
            scales,
            exponents,
            kernel,
        };
        d.check()?;
        Ok(d)
    }

    pub fn variates(&self) -> usize {
        self.kernel.variates
    }

    pub fn check(&self) -> Result<()> {
        let m = self.kernel.variates;
        if self.scales.len() != m || self.exponents.len() != m {
            return Err(Error::InvalidDescriptor(format!(
                "{} scales and {} exponents for a {m}-variate kernel",
                self.scales.len(),
                self.exponents.len()
            )));
        }
        if !(self.prefactor > T::zero() && self.prefactor.is_finite()) {
            return Err(Error::InvalidDescriptor(format!(
                "prefactor must be positive and finite, got {}",
                self.prefactor
            )));
        }
        if !self.power_offset.is_finite() || self.exponents.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidDescriptor("non-finite exponent".into()));
        }
        if self
            .scales
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()) || z.norm() == T::zero())
        {
            return Err(Error::InvalidDescriptor(
                "scales must be finite and nonzero".into(),
            ));
        }
        let v = self.kernel.count_violations();
        if !v.is_empty() {
            return Err(Error::InvalidDescriptor(v.join("; ")));
        }
        Ok(())
    }

    pub fn constraint(&self) -> DensityConstraint {
        DensityConstraint {
            exponents: self.exponents.iter().map(|a| a.as_f64()).collect(),
            offset: self.power_offset.as_f64(),
        }
    }

    /// Principal logarithms of the arguments `ζ_k x^{a_k}`.
    pub fn log_args(&self, x: T) -> Vec<Complex<T>> {
        let lx = x.ln();
        self.scales
            .iter()
            .zip(&self.exponents)
            .map(|(z, &a)| z.ln() + Complex::new(a * lx, T::zero()))
            .collect()
    }

    /// Arguments `ζ_k x^{a_k}` themselves.
    pub fn args(&self, x: T) -> Vec<Complex<T>> {
        self.log_args(x).into_iter().map(|l| l.exp()).collect()
    }

    /// Phases of the arguments, independent of `x`.
    pub fn arg_phases(&self) -> Vec<f64> {
        self.scales.iter().map(|z| z.arg().as_f64()).collect()
    }

    /// Density of `Y = scale · X^power` for `scale, power > 0`.
    pub fn power_transform(&self, scale: T, power: T) -> Result<Self> {
        if !(scale > T::zero() && power > T::zero()) {
            return Err(Error::Domain(
                "power transform needs positive scale and power".into(),
            ));
        }
        let a = self.power_offset;
        let prefactor = self.prefactor * scale.powf(-a / power) / power;
        let scales = self
            .scales
            .iter()
            .zip(&self.exponents)
            .map(|(z, &ak)| *z * scale.powf(-ak / power))
            .collect();
        let exponents = self.exponents.iter().map(|&ak| ak / power).collect();
        WeightedDensity::new(prefactor, a / power, scales, exponents, self.kernel.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::VariateGroup;

    fn exp_density() -> WeightedDensity<f64> {
        let k = FoxHKernel::new(1).with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0));
        WeightedDensity::new(1.0, 1.0, vec![Complex::new(1.0, 0.0)], vec![1.0], k).unwrap()
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let mut d = exp_density();
        d.exponents.push(1.0);
        assert!(matches!(d.check(), Err(Error::InvalidDescriptor(_))));
    }

    #[test]
    fn power_transform_of_exponential() {
        // Y = 4 X^2 for X ~ Exp(1): f_Y(y) = e^{-sqrt(y)/2} / (4 sqrt(y))
        let t = exp_density().power_transform(4.0, 2.0).unwrap();
        assert!((t.prefactor - 0.25).abs() < 1e-15);
        assert!((t.power_offset - 0.5).abs() < 1e-15);
        assert!((t.exponents[0] - 0.5).abs() < 1e-15);
        assert!((t.scales[0].re - 0.5).abs() < 1e-15);
    }
}
