//! Small-argument behaviour of sum CDFs from the leading residue.
//!
//! As `x → 0` the factor `x^{a_k s_k}` of every variate with `a_k ≠ 0`
//! decays when the contour is pushed toward `sign(a_k)·∞`. The first pole met
//! on the way dominates. Its residue is taken numerically on a small circle,
//! which covers poles of any order (the Rician product has a double pole, so
//! the CDF behaves like `x² ln x`). Residue-series variates keep all their
//! terms, since several of them can share the leading pole.

use crate::error::{Error, Result};
use crate::eval::{evaluate, plan_for_density};
use crate::kernel::LinearGamma;
use crate::plan::{ContourPlan, PlanOptions, Strategy, VariateRole};
use crate::sum::{sum_cdf_descriptor, SumComponent};
use crate::Density;

const TIE: f64 = 1e-9;
const POLES_PER_FACTOR: usize = 8;
const CIRCLE_NODES: usize = 64;

/// Leading pole of one driving variate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantPole {
    pub variate: usize,
    pub location: f64,
    /// Number of gamma factors with a pole at `location`.
    pub order: usize,
    /// `+1` when the contour moves right, `-1` when it moves left.
    pub direction: f64,
    pub radius: f64,
}

/// Real position of variate `i` used while locating the poles of variate `k`.
fn reference(plan: &ContourPlan, factors: &[LinearGamma<f64>], i: usize) -> f64 {
    if plan.roles[i] == VariateRole::Series {
        // first pole of the generator Γ(b - w s)
        factors
            .iter()
            .find(|f| {
                f.numerator
                    && f.coeffs[i] < 0.0
                    && f.coeffs
                        .iter()
                        .enumerate()
                        .all(|(j, c)| j == i || *c == 0.0)
            })
            .map(|f| f.shift / -f.coeffs[i])
            .unwrap_or(plan.anchors[i])
    } else {
        plan.anchors[i]
    }
}

pub fn dominant_poles(cdf: &Density, plan: &ContourPlan) -> Result<Vec<DominantPole>> {
    let factors = cdf.kernel.linear_factors();
    let driving: Vec<usize> = (0..cdf.variates())
        .filter(|&k| cdf.exponents[k] != 0.0)
        .collect();
    let mut out = Vec::with_capacity(driving.len());
    for &k in &driving {
        if plan.roles[k] != VariateRole::Contour {
            return Err(Error::Unsupported(format!(
                "variate {k} drives the small-x limit but is not a contour variate"
            )));
        }
        let dir = cdf.exponents[k].signum();
        let anchor = plan.anchors[k];
        let mut ahead = Vec::new();
        let mut all = Vec::new();
        for f in factors.iter().filter(|f| f.numerator && f.coeffs[k] != 0.0) {
            if let Some(&other) = driving.iter().find(|&&i| i != k && f.coeffs[i] != 0.0) {
                return Err(Error::Unsupported(format!(
                    "numerator couples driving variates {k} and {other}"
                )));
            }
            let w = f.coeffs[k];
            let rest = f.shift
                + (0..cdf.variates())
                    .filter(|&i| i != k)
                    .map(|i| f.coeffs[i] * reference(plan, &factors, i))
                    .sum::<f64>();
            for j in 0..POLES_PER_FACTOR {
                let p = (-(j as f64) - rest) / w;
                all.push(p);
                if (p - anchor) * dir > 0.0 {
                    ahead.push(p);
                }
            }
        }
        let location = ahead
            .iter()
            .copied()
            .min_by(|a, b| ((a - anchor) * dir).total_cmp(&((b - anchor) * dir)))
            .ok_or_else(|| {
                Error::Unsupported(format!("variate {k} has no pole in its shift direction"))
            })?;
        let order = all.iter().filter(|p| (*p - location).abs() <= TIE).count();
        let gap = all
            .iter()
            .map(|p| (p - location).abs())
            .filter(|d| *d > TIE)
            .fold(f64::INFINITY, f64::min)
            .min((location - anchor).abs() * 2.0);
        out.push(DominantPole {
            variate: k,
            location,
            order,
            direction: dir,
            radius: 0.4 * gap,
        });
    }
    if out.is_empty() {
        return Err(Error::Unsupported("CDF does not depend on x".into()));
    }
    Ok(out)
}

/// Leading-order CDF near zero, reusable across abscissae.
#[derive(Debug, Clone)]
pub struct AsymptoticCdf {
    pub cdf: Density,
    pub poles: Vec<DominantPole>,
    pub plan: ContourPlan,
}

impl AsymptoticCdf {
    pub fn new(cdf: Density, options: &PlanOptions) -> Result<Self> {
        let base = plan_for_density(&cdf, options)?;
        let poles = dominant_poles(&cdf, &base)?;
        let mut plan = base.with_strategy(Strategy::NestedDeterministic);
        for p in &poles {
            // leftward shift picks +Res (counterclockwise), rightward -Res
            plan = plan.with_circle(
                p.variate,
                p.location,
                p.radius,
                CIRCLE_NODES,
                p.direction > 0.0,
            );
        }
        Ok(AsymptoticCdf { cdf, poles, plan })
    }

    pub fn at(&self, x: f64) -> Result<f64> {
        Ok(evaluate(&self.cdf, x, &self.plan)?.value)
    }

    /// Exponent of `x` in the leading term, ignoring logarithms.
    pub fn exponent(&self) -> f64 {
        self.cdf.power_offset - 1.0
            + self
                .poles
                .iter()
                .map(|p| self.cdf.exponents[p.variate] * p.location)
                .sum::<f64>()
    }
}

pub fn asymptotic_cdf(components: &[SumComponent], x: f64, options: &PlanOptions) -> Result<f64> {
    AsymptoticCdf::new(sum_cdf_descriptor(components)?, options)?.at(x)
}

/// High-SNR outage slope when the SNR is `γ₀ X²` for `X = Σ X_i`.
pub fn diversity_order(components: &[SumComponent], options: &PlanOptions) -> Result<f64> {
    Ok(AsymptoticCdf::new(sum_cdf_descriptor(components)?, options)?.exponent() / 2.0)
}
