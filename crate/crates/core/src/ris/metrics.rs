use std::f64::consts::LOG2_E;

use num_complex::Complex;
use rayon::prelude::*;

use super::{db_to_linear, ris_sum_descriptors, series_group, RicianHop, RisConfig};
use crate::asymptotic::AsymptoticCdf;
use crate::error::{Error, Result};
use crate::eval::{evaluate, plan_for_density};
use crate::expectation::{
    expectation_descriptor, moment_descriptor, ExpectationDescriptor, Functional,
};
use crate::kernel::{FoxHKernel, VariateGroup};
use crate::plan::PlanOptions;
use crate::{Density, Eval};

/// Density of `γ = γ₀ Z²` from that of `Z`.
pub fn snr_density(z_pdf: &Density, gamma0: f64) -> Result<Density> {
    z_pdf.power_transform(gamma0, 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageRow {
    pub gamma0_db: f64,
    pub exact: Option<f64>,
    pub err_estimate: Option<f64>,
    pub asymptotic: Option<f64>,
    /// Set when the exact evaluation failed at this grid point.
    pub error: Option<String>,
}

/// `P(γ₀ Z² ≤ γ_th) = F_Z(√(γ_th/γ₀))` over a grid of `γ₀` values in dB.
///
/// A failing grid point is reported in its row and the sweep continues. The
/// asymptotic column is absent when no leading pole could be isolated.
pub fn outage_probability(
    config: &RisConfig,
    gamma_th_db: f64,
    gamma0_db: &[f64],
    options: &PlanOptions,
) -> Result<Vec<OutageRow>> {
    let gamma_th = db_to_linear(gamma_th_db);
    if !(gamma_th > 0.0 && gamma_th.is_finite()) {
        return Err(Error::Domain(format!(
            "outage threshold must be finite, got {gamma_th_db} dB"
        )));
    }
    let sum = ris_sum_descriptors(config)?;
    let plan = plan_for_density(&sum.cdf, options)?;
    let asymptote = AsymptoticCdf::new(sum.cdf.clone(), options).ok();
    Ok(gamma0_db
        .par_iter()
        .map(|&db| {
            let x = (gamma_th / db_to_linear(db)).sqrt();
            let asymptotic = asymptote.as_ref().and_then(|a| a.at(x).ok());
            match evaluate(&sum.cdf, x, &plan) {
                Ok(r) => OutageRow {
                    gamma0_db: db,
                    exact: Some(r.value.clamp(0.0, 1.0)),
                    err_estimate: Some(r.abs_error_estimate),
                    asymptotic,
                    error: None,
                },
                Err(e) => OutageRow {
                    gamma0_db: db,
                    exact: None,
                    err_estimate: None,
                    asymptotic,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMethod {
    /// One Fox-H value built from the hop parameters.
    Direct,
    /// Expectation of the SNR density obtained from the sum descriptor.
    Composed,
    /// Simpson rule over `x` applied to the evaluated PDF of `Z`.
    PdfQuadrature,
}

impl CapacityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CapacityMethod::Direct => "direct",
            CapacityMethod::Composed => "composed",
            CapacityMethod::PdfQuadrature => "pdf-quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capacity {
    pub value: f64,
    pub err_estimate: f64,
    pub method: CapacityMethod,
    /// Error estimate exceeded the requested relative tolerance.
    pub warning: bool,
}

impl Capacity {
    fn from_eval(r: Eval, method: CapacityMethod, tolerance: f64) -> Self {
        Capacity {
            value: r.value,
            err_estimate: r.abs_error_estimate,
            method,
            warning: r.abs_error_estimate > tolerance * r.value.abs(),
        }
    }
}

/// Per-element outer couplings `Γ(1 + s₀/2 + s_h/2)` and series groups,
/// written into `kernel` starting at variate `first`.
fn element_factors(
    mut kernel: FoxHKernel<f64>,
    first: usize,
    hops: [&RicianHop; 2],
    q: Option<f64>,
) -> (FoxHKernel<f64>, Vec<Complex<f64>>, f64) {
    let m = kernel.variates;
    let mut args = Vec::new();
    let mut scale = (-(hops[0].k + hops[1].k)).exp();
    let mut next = first + 1;
    for hop in hops {
        let mut w = vec![0.0; m];
        w[first] = 0.5;
        if hop.k > 0.0 {
            w[next] = 0.5;
            kernel = kernel.with_variate(next, series_group());
            args.push(Complex::new(0.0, hop.k.sqrt()));
            scale *= 0.5;
            next += 1;
        }
        kernel = kernel.outer_numerator(0.0, w);
    }
    if let Some(q) = q {
        kernel = kernel.with_variate(
            first,
            VariateGroup::new()
                .upper_denominator(1.0, q)
                .lower_denominator(0.0, q),
        );
    }
    (kernel, args, scale)
}

/// `E[log₂(1 + γ₀ Z²)]` as a single Fox-H value with two extra variates:
/// the `ln(1+γ)` variate at argument 1 and the converging variate at -1.
pub fn direct_capacity_descriptor(
    config: &RisConfig,
    gamma0: f64,
) -> Result<ExpectationDescriptor> {
    config.check()?;
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::Domain(format!("γ₀ must be positive, got {gamma0}")));
    }
    let sizes: Vec<usize> = config
        .elements
        .iter()
        .map(|e| 1 + usize::from(e.hop1.k > 0.0) + usize::from(e.hop2.k > 0.0))
        .collect();
    let total: usize = sizes.iter().sum();
    let m = total + 2;
    let mut kernel = FoxHKernel::new(m);
    let mut args = Vec::with_capacity(m);
    let mut scale = LOG2_E / 2.0;
    let mut snr_weights = vec![0.0; m];
    let mut first = 0;
    for (e, size) in config.elements.iter().zip(&sizes) {
        let (k, a, s) = element_factors(kernel, first, [&e.hop1, &e.hop2], e.phase.q());
        kernel = k;
        args.push(Complex::new((gamma0 * e.zeta()).sqrt(), 0.0));
        args.extend(a);
        scale *= s;
        snr_weights[first] = -0.5;
        if config.elements.len() > 1 {
            // Laplace-domain factor Γ(-s₀) of each summand
            let mut w = vec![0.0; m];
            w[first] = -1.0;
            kernel = kernel.outer_numerator(1.0, w);
        }
        first += size;
    }
    if config.elements.len() > 1 {
        let mut w = vec![0.0; m];
        for (i, x) in snr_weights.iter().enumerate() {
            w[i] = 2.0 * x;
        }
        kernel = kernel.outer_lower(1.0, w);
    }
    let log_v = total;
    let conv_v = total + 1;
    kernel.per_variate[log_v] = VariateGroup::new()
        .upper_numerator(1.0, 1.0)
        .upper_numerator(1.0, 1.0)
        .lower_numerator(1.0, 1.0)
        .lower_denominator(0.0, 1.0);
    kernel.per_variate[conv_v] = VariateGroup::new().lower_numerator(0.0, 1.0);
    snr_weights[log_v] = 1.0;
    snr_weights[conv_v] = 1.0;
    kernel = kernel.outer_numerator(1.0, snr_weights);
    args.push(Complex::new(1.0, 0.0));
    args.push(Complex::new(-1.0, 0.0));
    Ok(ExpectationDescriptor {
        kernel,
        args,
        scale,
    })
}

pub fn capacity_direct(
    config: &RisConfig,
    gamma0: f64,
    options: &PlanOptions,
    tolerance: f64,
) -> Result<Capacity> {
    let r = direct_capacity_descriptor(config, gamma0)?.evaluate(options)?;
    Ok(Capacity::from_eval(r, CapacityMethod::Direct, tolerance))
}

pub fn capacity_composed(
    config: &RisConfig,
    gamma0: f64,
    options: &PlanOptions,
    tolerance: f64,
) -> Result<Capacity> {
    let sum = ris_sum_descriptors(config)?;
    let snr = snr_density(&sum.pdf, gamma0)?;
    let r = expectation_descriptor(&snr, Functional::Log2OnePlus)?.evaluate(options)?;
    Ok(Capacity::from_eval(r, CapacityMethod::Composed, tolerance))
}

const PDF_PANELS: usize = 96;

/// Simpson rule for `∫ g(x) f_Z(x) dx` on `[0, x_max]` with `g(0) = 0`, where
/// `x_max` lies far into the exponential tail of the slowest-decaying element.
/// The error estimate is the usual `|S_h - S_{2h}|/15` plus the propagated
/// evaluation errors.
pub fn pdf_expectation<G>(config: &RisConfig, g: G, options: &PlanOptions) -> Result<Eval>
where
    G: Fn(f64) -> f64 + Sync,
{
    let sum = ris_sum_descriptors(config)?;
    let plan = plan_for_density(&sum.pdf, options)?;
    let mean_bound: f64 = config
        .elements
        .iter()
        .map(|e| (e.hop1.omega * e.hop2.omega).sqrt())
        .sum();
    let rate = config
        .elements
        .iter()
        .map(|e| 2.0 / e.zeta().sqrt())
        .fold(f64::INFINITY, f64::min);
    let x_max = mean_bound + (30.0 + 3.0 * config.elements.len() as f64) / rate;
    let h = x_max / PDF_PANELS as f64;
    let evals = (1..=PDF_PANELS)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * h;
            let r = evaluate(&sum.pdf, x, &plan)?;
            let gx = g(x);
            Ok((gx * r.value, gx.abs() * r.abs_error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let simpson = |step: usize| {
        let n = PDF_PANELS / step;
        let mut acc = 0.0;
        for i in 1..=n {
            let w = if i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * evals[i * step - 1].0;
        }
        acc * (step as f64) * h / 3.0
    };
    let fine = simpson(1);
    let coarse = simpson(2);
    let eval_err: f64 = evals.iter().map(|(_, e)| e).sum::<f64>() * h;
    Ok(Eval {
        value: fine,
        abs_error_estimate: (fine - coarse).abs() / 15.0 + eval_err,
        imag_residual: 0.0,
        work: PDF_PANELS,
    })
}

pub fn capacity_pdf_quadrature(
    config: &RisConfig,
    gamma0: f64,
    options: &PlanOptions,
    tolerance: f64,
) -> Result<Capacity> {
    let r = pdf_expectation(config, |x| (gamma0 * x * x).ln_1p() * LOG2_E, options)?;
    Ok(Capacity::from_eval(
        r,
        CapacityMethod::PdfQuadrature,
        tolerance,
    ))
}

/// Ergodic capacity in bits/s/Hz at `γ₀` given in dB.
///
/// A single element uses the direct Fox-H value. Larger surfaces integrate
/// the evaluated PDF of `Z`: with two or more summands the converging
/// variate pins `Σ s₀` onto a pole of the summands' Laplace factors, so the
/// direct kernel has no admissible contour.
pub fn ergodic_capacity(
    config: &RisConfig,
    gamma0_db: f64,
    options: &PlanOptions,
    tolerance: f64,
) -> Result<Capacity> {
    let gamma0 = db_to_linear(gamma0_db);
    if config.elements.len() == 1 {
        capacity_direct(config, gamma0, options, tolerance)
    } else {
        capacity_pdf_quadrature(config, gamma0, options, tolerance)
    }
}

/// `E[γⁿ]` for `n ∈ {1, 2}` at linear `γ₀`.
///
/// For more than one element the Mellin route degenerates (the sum's
/// coupling factors meet on a pole line) and the PDF is integrated instead.
pub fn snr_moment(config: &RisConfig, n: u32, gamma0: f64, options: &PlanOptions) -> Result<Eval> {
    if !(1..=2).contains(&n) {
        return Err(Error::Domain(format!(
            "SNR moment order must be 1 or 2, got {n}"
        )));
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::Domain(format!("γ₀ must be positive, got {gamma0}")));
    }
    if config.elements.len() > 1 {
        return pdf_expectation(config, |x| (gamma0 * x * x).powi(n as i32), options);
    }
    let sum = ris_sum_descriptors(config)?;
    let snr = snr_density(&sum.pdf, gamma0)?;
    moment_descriptor(&snr, n as f64)?.evaluate(options)
}
