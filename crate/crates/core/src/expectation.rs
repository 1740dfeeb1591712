//! `E[g(X)]` for a Fox-H density as a Fox-H value at fixed arguments.
//!
//! The integrand `g(x) f(x)` is multiplied and divided by `e^{-x}`. Writing
//! `g(x) e^{x}` as a product of Fox-H factors (`e^{x}` is the single-gamma
//! kernel at argument `-x`, `ln(1+x)` the kernel
//! `Γ(s)² Γ(1-s) / Γ(1+s)` at argument `x`) leaves
//! `∫ x^{c-1} e^{-x} dx = Γ(c)` with `c = a + n + Σ a_k s_k + s_log + s_exp`,
//! added as one coupled numerator.

use std::f64::consts::LOG2_E;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::eval::{evaluate_raw, plan_for_args};
use crate::kernel::VariateGroup;
use crate::plan::{ContourPlan, PlanOptions};
use crate::{Complex64, Density, Eval, Kernel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `log2(1 + x)`.
    Log2OnePlus,
    /// `x^n`.
    Power(u32),
}

/// `scale · H[args]` equals the expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationDescriptor {
    pub kernel: Kernel,
    pub args: Vec<Complex64>,
    pub scale: f64,
}

impl ExpectationDescriptor {
    pub fn plan(&self, options: &PlanOptions) -> Result<ContourPlan> {
        plan_for_args(&self.kernel, &self.args, options)
    }

    pub fn evaluate(&self, options: &PlanOptions) -> Result<Eval> {
        let plan = self.plan(options)?;
        self.evaluate_on(&plan)
    }

    pub fn evaluate_on(&self, plan: &ContourPlan) -> Result<Eval> {
        let r = evaluate_raw(&self.kernel, &self.args, plan)?;
        Ok(Eval {
            value: r.value * self.scale,
            abs_error_estimate: r.abs_error_estimate * self.scale,
            imag_residual: r.imag_residual * self.scale,
            work: r.work,
        })
    }
}

/// Pads every outer weight vector of `pdf`'s kernel with `extra` zeros.
fn widen(pdf: &Density, extra: usize) -> Kernel {
    let m = pdf.variates() + extra;
    let mut k = pdf.kernel.clone();
    k.variates = m;
    for f in k.outer.upper.iter_mut().chain(k.outer.lower.iter_mut()) {
        f.weights.resize(m, 0.0);
    }
    k.per_variate.resize(m, VariateGroup::new());
    k
}

fn finish(kernel: Kernel, args: Vec<Complex64>, scale: f64) -> Result<ExpectationDescriptor> {
    let d = ExpectationDescriptor {
        kernel,
        args,
        scale,
    };
    match d.plan(&PlanOptions::default()) {
        Ok(_) => Ok(d),
        Err(Error::Planning(why)) => Err(Error::Assembly(format!(
            "expectation integral has no valid contour (the moment may not exist): {why}"
        ))),
        Err(e) => Err(e),
    }
}

/// `E[X^n]` for real `n`, with `n = 0` giving the total mass.
pub fn moment_descriptor(pdf: &Density, n: f64) -> Result<ExpectationDescriptor> {
    pdf.check()?;
    let m = pdf.variates();
    let conv = m;
    let mut kernel = widen(pdf, 1);
    kernel.per_variate[conv] = VariateGroup::new().lower_numerator(0.0, 1.0);
    let mut w = pdf.exponents.clone();
    w.push(1.0);
    kernel = kernel.outer_numerator(1.0 - pdf.power_offset - n, w);
    let mut args = pdf.scales.clone();
    args.push(Complex::new(-1.0, 0.0));
    finish(kernel, args, pdf.prefactor)
}

pub fn expectation_descriptor(pdf: &Density, g: Functional) -> Result<ExpectationDescriptor> {
    match g {
        Functional::Power(0) => Err(Error::Domain("moment order must be at least 1".into())),
        Functional::Power(n) => moment_descriptor(pdf, n as f64),
        Functional::Log2OnePlus => {
            pdf.check()?;
            let m = pdf.variates();
            let mut kernel = widen(pdf, 2);
            kernel.per_variate[m] = VariateGroup::new()
                .upper_numerator(1.0, 1.0)
                .upper_numerator(1.0, 1.0)
                .lower_numerator(1.0, 1.0)
                .lower_denominator(0.0, 1.0);
            kernel.per_variate[m + 1] = VariateGroup::new().lower_numerator(0.0, 1.0);
            let mut w = pdf.exponents.clone();
            w.extend([1.0, 1.0]);
            kernel = kernel.outer_numerator(1.0 - pdf.power_offset, w);
            let mut args = pdf.scales.clone();
            args.push(Complex::new(1.0, 0.0));
            args.push(Complex::new(-1.0, 0.0));
            finish(kernel, args, LOG2_E * pdf.prefactor)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn exponential_second_moment() {
        let d = families::exponential(10.0).unwrap();
        let e = expectation_descriptor(&d, Functional::Power(2)).unwrap();
        let r = e.evaluate(&PlanOptions::default()).unwrap();
        assert!((r.value - 200.0).abs() < 1e-9 * 200.0, "{}", r.value);
    }

    #[test]
    fn gamma_density_has_unit_mass() {
        let d = families::gamma(2.5, 0.7).unwrap();
        let r = moment_descriptor(&d, 0.0)
            .unwrap()
            .evaluate(&PlanOptions::default())
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn zero_order_power_is_rejected() {
        let d = families::exponential(1.0).unwrap();
        assert!(expectation_descriptor(&d, Functional::Power(0)).is_err());
    }
}
