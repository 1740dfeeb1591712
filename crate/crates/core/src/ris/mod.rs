//! Cascaded Rician links through a reconfigurable surface.
//!
//! Element `i` contributes `Z_i = R_{i,1} R_{i,2} cos φ_i` with Rician hops
//! `R_{i,1}`, `R_{i,2}` and phase error `φ_i`, and the end-to-end SNR is
//! `γ = γ₀ Z²` for `Z = Σ Z_i`.

mod metrics;

pub use metrics::{
    capacity_composed, capacity_direct, capacity_pdf_quadrature, direct_capacity_descriptor,
    ergodic_capacity, outage_probability, pdf_expectation, snr_density, snr_moment, Capacity,
    CapacityMethod, OutageRow,
};

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::density::WeightedDensity;
use crate::error::{Error, Result};
use crate::eval::{evaluate, plan_for_density};
use crate::expectation::moment_descriptor;
use crate::kernel::{FoxHKernel, VariateGroup};
use crate::plan::PlanOptions;
use crate::sum::{SumComponent, SumDescriptor};

/// Speed of light in m/s.
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Rician hop with factor `K = S²/(2σ²)` and mean-square envelope `Ω = S² + 2σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianHop {
    pub k: f64,
    pub omega: f64,
}

impl RicianHop {
    pub fn new(k: f64, omega: f64) -> Result<Self> {
        let h = RicianHop { k, omega };
        h.check()?;
        Ok(h)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.k >= 0.0 && self.k.is_finite() && self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Domain(format!(
                "Rician hop needs K >= 0 and Omega > 0 (got K = {}, Omega = {})",
                self.k, self.omega
            )));
        }
        Ok(())
    }

    /// `S²`.
    pub fn los_power(&self) -> f64 {
        self.omega * self.k / (1.0 + self.k)
    }

    /// `2σ²`.
    pub fn diffuse_power(&self) -> f64 {
        self.omega / (1.0 + self.k)
    }

    pub fn los_amplitude(&self) -> f64 {
        self.los_power().sqrt()
    }

    /// Per-quadrature standard deviation `σ`.
    pub fn sigma(&self) -> f64 {
        (self.diffuse_power() / 2.0).sqrt()
    }
}

/// Residual phase error of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseModel {
    Ideal,
    /// Uniform on `(-qπ, qπ)` with `q = 2^{-bits}`.
    Quantized {
        bits: u32,
    },
}

impl PhaseModel {
    /// Zero bits means no phase error.
    pub fn from_bits(bits: u32) -> Self {
        if bits == 0 {
            PhaseModel::Ideal
        } else {
            PhaseModel::Quantized { bits }
        }
    }

    pub fn q(&self) -> Option<f64> {
        match *self {
            PhaseModel::Ideal => None,
            PhaseModel::Quantized { bits } => Some(2f64.powi(-(bits as i32))),
        }
    }

    /// Half width of the phase error support, zero when ideal.
    pub fn half_width(&self) -> f64 {
        self.q().map_or(0.0, |q| q * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub hop1: RicianHop,
    pub hop2: RicianHop,
    pub phase: PhaseModel,
}

impl Element {
    pub fn new(hop1: RicianHop, hop2: RicianHop, phase: PhaseModel) -> Self {
        Element { hop1, hop2, phase }
    }

    /// `ζ = Ω₁Ω₂ / ((1+K₁)(1+K₂))`, the product of the two diffuse powers.
    pub fn zeta(&self) -> f64 {
        self.hop1.diffuse_power() * self.hop2.diffuse_power()
    }
}

/// Free-space link budget of the two hops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkBudget {
    pub carrier_hz: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub d1_m: f64,
    pub d2_m: f64,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            carrier_hz: 6e9,
            tx_gain_dbi: 10.0,
            rx_gain_dbi: 10.0,
            d1_m: 20.0,
            d2_m: 100.0,
            tx_power_dbm: 30.0,
            noise_dbm: -74.0,
        }
    }
}

impl LinkBudget {
    pub fn check(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.d1_m > 0.0 && self.d2_m > 0.0) {
            return Err(Error::Domain(
                "carrier frequency and distances must be positive".into(),
            ));
        }
        let all = [
            self.carrier_hz,
            self.tx_gain_dbi,
            self.rx_gain_dbi,
            self.d1_m,
            self.d2_m,
            self.tx_power_dbm,
            self.noise_dbm,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("link budget entries must be finite".into()));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// `γ₀ = P_t G_T G_R (λ/4πd₁)² (λ/4πd₂)² / σ²`, linear.
pub fn compute_gamma0(budget: &LinkBudget) -> Result<f64> {
    budget.check()?;
    let lambda = LIGHT_SPEED / budget.carrier_hz;
    let hop = |d: f64| (lambda / (4.0 * PI * d)).powi(2);
    let gains_db = budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - budget.noise_dbm;
    Ok(db_to_linear(gains_db) * hop(budget.d1_m) * hop(budget.d2_m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisConfig {
    pub elements: Vec<Element>,
    pub budget: LinkBudget,
}

impl RisConfig {
    /// `n` identical elements.
    pub fn uniform(n: usize, element: Element, budget: LinkBudget) -> Self {
        RisConfig {
            elements: vec![element; n],
            budget,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::Domain("a surface needs at least one element".into()));
        }
        for e in &self.elements {
            e.hop1.check()?;
            e.hop2.check()?;
        }
        self.budget.check()
    }
}

/// Per-hop Bessel-series variate: `Γ(-s/2)/Γ(1+s/2)` at argument `√(-K)`.
fn series_group() -> VariateGroup<f64> {
    VariateGroup::new()
        .lower_numerator(0.0, 0.5)
        .lower_denominator(0.0, 0.5)
}

/// Density of `Z = R₁ R₂ cos φ` as a Fox-H component.
///
/// Variate 0 carries `x`; each hop with `K > 0` adds a variate summing its
/// Bessel series. A hop with `K = 0` has a single series term, so it adds no
/// variate and its outer coupling reduces to `Γ(1 + s₀/2)`. Ideal phase
/// drops the phase factors of variate 0.
pub fn product_descriptor(
    hop1: &RicianHop,
    hop2: &RicianHop,
    phase: PhaseModel,
) -> Result<SumComponent> {
    hop1.check()?;
    hop2.check()?;
    let e = Element::new(*hop1, *hop2, phase);
    let series: Vec<&RicianHop> = [hop1, hop2].into_iter().filter(|h| h.k > 0.0).collect();
    let m = 1 + series.len();
    let mut kernel = FoxHKernel::new(m);
    let mut scales = vec![Complex::new(e.zeta().sqrt(), 0.0)];
    let mut prefactor = (-(hop1.k + hop2.k)).exp();
    for hop in [hop1, hop2] {
        let mut w = vec![0.0; m];
        w[0] = 0.5;
        if hop.k > 0.0 {
            let v = scales.len();
            w[v] = 0.5;
            kernel = kernel.with_variate(v, series_group());
            scales.push(Complex::new(0.0, hop.k.sqrt()));
            prefactor *= 0.5;
        }
        kernel = kernel.outer_numerator(0.0, w);
    }
    if let Some(q) = phase.q() {
        kernel = kernel.with_variate(
            0,
            VariateGroup::new()
                .upper_denominator(1.0, q)
                .lower_denominator(0.0, q),
        );
    }
    let mut exponents = vec![0.0; m];
    exponents[0] = -1.0;
    let density = WeightedDensity::new(prefactor, 0.0, scales, exponents, kernel)?;
    SumComponent::new(density)
}

/// [`product_descriptor`] followed by the `∫f = 1` check.
pub fn verified_product_descriptor(
    hop1: &RicianHop,
    hop2: &RicianHop,
    phase: PhaseModel,
    options: &PlanOptions,
) -> Result<SumComponent> {
    let c = product_descriptor(hop1, hop2, phase)?;
    SumComponent::verified(c.density, options)
}

/// PDF and CDF of `Z = Σ Z_i`.
pub fn ris_sum_descriptors(config: &RisConfig) -> Result<SumDescriptor> {
    config.check()?;
    let components = config
        .elements
        .iter()
        .map(|e| product_descriptor(&e.hop1, &e.hop2, e.phase))
        .collect::<Result<Vec<_>>>()?;
    SumDescriptor::new(components)
}

/// Checks run before a sweep: for every distinct element, the ideal-phase
/// product density must integrate to one and have `E[Z²] = Ω₁Ω₂` (which pins
/// down `ζ`), and the one-element sum must reproduce the component density.
pub fn validate_descriptors(config: &RisConfig, options: &PlanOptions) -> Result<()> {
    config.check()?;
    let mut seen: Vec<Element> = Vec::new();
    for e in &config.elements {
        if seen.contains(e) {
            continue;
        }
        seen.push(*e);
        let c = verified_product_descriptor(&e.hop1, &e.hop2, PhaseModel::Ideal, options)?;
        let m2 = moment_descriptor(&c.density, 2.0)?.evaluate(options)?.value;
        let want = e.hop1.omega * e.hop2.omega;
        if (m2 - want).abs() > 1e-3 * want {
            return Err(Error::InvalidDescriptor(format!(
                "second moment {m2:.6} of the product density differs from Ω₁Ω₂ = {want:.6}"
            )));
        }
        let single = product_descriptor(&e.hop1, &e.hop2, e.phase)?;
        let sum = crate::sum::sum_pdf_descriptor(std::slice::from_ref(&single))?;
        let plan_c = plan_for_density(&single.density, options)?;
        let plan_s = plan_for_density(&sum, options)?;
        for x in [0.5, 1.0, 2.0] {
            let a = evaluate(&single.density, x, &plan_c)?.value;
            let b = evaluate(&sum, x, &plan_s)?.value;
            if (a - b).abs() > 1e-6 * a.abs() {
                return Err(Error::InvalidDescriptor(format!(
                    "one-element sum gives {b:.9e} at x = {x}, component gives {a:.9e}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hop_powers_add_up() {
        let h = RicianHop::new(3.0, 2.0).unwrap();
        assert!((h.los_power() + h.diffuse_power() - 2.0).abs() < 1e-15);
        assert!((h.los_power() / h.diffuse_power() - 3.0).abs() < 1e-12);
        assert!(RicianHop::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn one_bit_phase() {
        assert_eq!(PhaseModel::from_bits(1).q(), Some(0.5));
        assert_eq!(PhaseModel::from_bits(0), PhaseModel::Ideal);
    }

    #[test]
    fn default_budget_golden() {
        let g = compute_gamma0(&LinkBudget::default()).unwrap();
        assert!(
            (linear_to_db(g) - -38.042_216_372).abs() < 1e-8,
            "{}",
            linear_to_db(g)
        );
        let far = LinkBudget {
            d2_m: 200.0,
            ..LinkBudget::default()
        };
        let drop = linear_to_db(g) - linear_to_db(compute_gamma0(&far).unwrap());
        assert!((drop - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn sum_lower_factor_layout() {
        let h = RicianHop::new(1.0, 1.0).unwrap();
        let cfg = RisConfig::uniform(
            2,
            Element::new(h, h, PhaseModel::Ideal),
            LinkBudget::default(),
        );
        let s = ris_sum_descriptors(&cfg).unwrap();
        assert_eq!(s.variates(), 6);
        let g = &s.pdf.kernel.outer.lower[0];
        assert_eq!(g.offset, 1.0);
        assert_eq!(g.weights, vec![-1.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
    }
}
