//! Distribution of `X = Σ X_i` for independent Fox-H distributed summands.
//!
//! Each summand has the Laplace transform
//! `ψ_i Γ(a_i + Σ_k a_ik s_ik) t^{-(a_i + Σ_k a_ik s_ik)} Π_k ζ_ik^{s_ik}`,
//! so the product inverts term by term through `t^{-c} ↔ x^{c-1}/Γ(c)`. The
//! result is again a Fox-H density over all `Σ M_i` variates: one coupling
//! numerator per summand and one global `1/Γ(Σ a_i + Σ a_ik s_ik)`.

use num_complex::Complex;

use crate::density::WeightedDensity;
use crate::error::{Error, Result};
use crate::eval::{evaluate, plan_for_density};
use crate::expectation::moment_descriptor;
use crate::kernel::{Coupled, FoxHKernel};
use crate::plan::{validate_kernel, ContourPlan, PlanOptions};
use crate::{Density, Eval};

/// One summand.
#[derive(Debug, Clone, PartialEq)]
pub struct SumComponent {
    pub density: Density,
}

impl SumComponent {
    /// Wraps a density after checking its descriptor and pole separation.
    pub fn new(density: Density) -> Result<Self> {
        density.check()?;
        let report = validate_kernel(&density.kernel);
        if !report.is_feasible() {
            let mut why = report.count_violations;
            why.extend(report.pole_violations);
            return Err(Error::InvalidDescriptor(why.join("; ")));
        }
        Ok(SumComponent { density })
    }

    /// As [`SumComponent::new`], additionally requiring `∫ f = 1` within `1e-3`.
    pub fn verified(density: Density, options: &PlanOptions) -> Result<Self> {
        let c = Self::new(density)?;
        if c.density.variates() <= 3 {
            let total = c.total_mass(options)?;
            if (total.value - 1.0).abs() > 1e-3 {
                return Err(Error::InvalidDescriptor(format!(
                    "density integrates to {:.6} (± {:.1e}), not 1",
                    total.value, total.abs_error_estimate
                )));
            }
        }
        Ok(c)
    }

    /// `∫_0^∞ f(x) dx` through the Mellin route.
    pub fn total_mass(&self, options: &PlanOptions) -> Result<Eval> {
        moment_descriptor(&self.density, 0.0)?.evaluate(options)
    }
}

/// Assembled PDF and CDF of a sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDescriptor {
    pub components: Vec<SumComponent>,
    pub pdf: Density,
    pub cdf: Density,
}

impl SumDescriptor {
    pub fn new(components: Vec<SumComponent>) -> Result<Self> {
        let pdf = sum_pdf_descriptor(&components)?;
        let cdf = sum_cdf_descriptor(&components)?;
        Ok(SumDescriptor {
            components,
            pdf,
            cdf,
        })
    }

    pub fn variates(&self) -> usize {
        self.pdf.variates()
    }
}

fn pad(weights: &[f64], offset: usize, total: usize) -> Vec<f64> {
    let mut v = vec![0.0; total];
    v[offset..offset + weights.len()].copy_from_slice(weights);
    v
}

/// Shared PDF/CDF assembly; only the global lower factor and power differ.
fn assemble(components: &[SumComponent], cdf: bool) -> Result<Density> {
    if components.is_empty() {
        return Err(Error::Assembly("a sum needs at least one component".into()));
    }
    let total: usize = components.iter().map(|c| c.density.variates()).sum();
    let mut kernel = FoxHKernel::new(total);
    let mut prefactor = 1.0;
    let mut power = 0.0;
    let mut scales: Vec<Complex<f64>> = Vec::with_capacity(total);
    let mut exponents = Vec::with_capacity(total);
    let mut offset = 0;
    for c in components {
        let d = &c.density;
        let m = d.variates();
        // Γ(a_i + Σ_k a_ik s_ik) = Γ(1 - α + A·s) with α = 1 - a_i
        kernel = kernel.outer_numerator(1.0 - d.power_offset, pad(&d.exponents, offset, total));
        for (j, f) in d.kernel.outer.upper.iter().enumerate() {
            let w = pad(&f.weights, offset, total);
            kernel = if j < d.kernel.outer.n {
                kernel.outer_numerator(f.offset, w)
            } else {
                kernel.outer_upper_denominator(f.offset, w)
            };
        }
        for f in &d.kernel.outer.lower {
            kernel.outer.lower.push(Coupled {
                offset: f.offset,
                weights: pad(&f.weights, offset, total),
            });
        }
        for (k, g) in d.kernel.per_variate.iter().enumerate() {
            kernel.per_variate[offset + k] = g.clone();
        }
        prefactor *= d.prefactor;
        power += d.power_offset;
        scales.extend_from_slice(&d.scales);
        exponents.extend_from_slice(&d.exponents);
        offset += m;
    }
    let beta = if cdf { -power } else { 1.0 - power };
    kernel = kernel.outer_lower(beta, exponents.clone());
    let report = validate_kernel(&kernel);
    if !report.is_feasible() {
        let mut why = report.count_violations;
        why.extend(report.pole_violations);
        return Err(Error::Assembly(format!(
            "assembled sum kernel has no pole-separating contour: {}",
            why.join("; ")
        )));
    }
    let power_offset = if cdf { power + 1.0 } else { power };
    WeightedDensity::new(prefactor, power_offset, scales, exponents, kernel)
}

/// PDF of the sum, `Π ψ_i · x^{Σ a_i - 1} · H[...]`.
pub fn sum_pdf_descriptor(components: &[SumComponent]) -> Result<Density> {
    assemble(components, false)
}

/// CDF of the sum, `Π ψ_i · x^{Σ a_i} · H[...]`, stored with power offset `Σ a_i + 1`.
pub fn sum_cdf_descriptor(components: &[SumComponent]) -> Result<Density> {
    assemble(components, true)
}

/// Moment generating function `t ↦ E[e^{-tX}]` of one component, itself of
/// the weighted form `ψ t^{-a} H[{ζ_k t^{-a_k}}]`.
#[derive(Debug, Clone)]
pub struct MgfDescriptor {
    pub function: Density,
    pub plan: ContourPlan,
}

impl MgfDescriptor {
    pub fn at(&self, t: f64) -> Result<Eval> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "MGF argument must be positive, got {t}"
            )));
        }
        evaluate(&self.function, t, &self.plan)
    }
}

pub fn mgf_descriptor(component: &SumComponent, options: &PlanOptions) -> Result<MgfDescriptor> {
    let d = &component.density;
    let kernel = d
        .kernel
        .clone()
        .outer_numerator(1.0 - d.power_offset, d.exponents.clone());
    let function = WeightedDensity::new(
        d.prefactor,
        1.0 - d.power_offset,
        d.scales.clone(),
        d.exponents.iter().map(|a| -a).collect(),
        kernel,
    )?;
    let plan = plan_for_density(&function, options)?;
    Ok(MgfDescriptor { function, plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn comp(d: Density) -> SumComponent {
        SumComponent::new(d).unwrap()
    }

    #[test]
    fn assembled_counts_and_foreign_weights() {
        let c = comp(families::gamma(2.0, 1.0).unwrap());
        let pdf = sum_pdf_descriptor(&[c.clone(), c.clone(), c]).unwrap();
        assert_eq!(pdf.variates(), 3);
        assert_eq!(pdf.kernel.outer.upper.len(), 3);
        assert_eq!(pdf.kernel.outer.lower.len(), 1);
        for (i, f) in pdf.kernel.outer.upper.iter().enumerate() {
            for (k, w) in f.weights.iter().enumerate() {
                assert_eq!(*w == 0.0, k != i);
            }
        }
        let g = &pdf.kernel.outer.lower[0];
        assert_eq!(g.offset, 1.0 - 3.0);
        assert_eq!(g.weights, vec![1.0; 3]);
        assert_eq!(pdf.power_offset, 3.0);
    }

    #[test]
    fn cdf_global_factor_offset() {
        let c = comp(families::exponential(1.0).unwrap());
        let cdf = sum_cdf_descriptor(&[c.clone(), c]).unwrap();
        assert_eq!(cdf.kernel.outer.lower[0].offset, -2.0);
        assert_eq!(cdf.power_offset, 3.0);
    }

    #[test]
    fn exponential_mgf() {
        let c = comp(families::exponential(1.0).unwrap());
        let m = mgf_descriptor(&c, &PlanOptions::default()).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let r = m.at(t).unwrap();
            assert!(
                (r.value - 1.0 / (1.0 + t)).abs() < 1e-10,
                "t = {t}: {}",
                r.value
            );
        }
        assert!(matches!(m.at(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_sum_is_rejected() {
        assert!(matches!(sum_pdf_descriptor(&[]), Err(Error::Assembly(_))));
    }
}
