//! Contour planning: pole separation, anchor placement, truncation and node
//! allocation for the Mellin-Barnes quadrature.
//!
//! Each variate gets one of four roles:
//!
//! * `Contour`: integrated along the vertical line `Re s_k = anchor`.
//! * `Series`: the line integral does not converge absolutely (the argument
//!   phase outgrows the gamma decay, as for the `√(-K)` arguments of Rician
//!   kernels), so the variate is closed to the right and summed over the
//!   residues of its `Γ(d - D s)` factors.
//! * `Converging` / `Eliminated`: a variate with argument `-1` whose only
//!   coupling is `Γ(b + w·s + t)` represents the factor `e^{x}` paired with
//!   a converging `e^{-x}`. Its line integral sits on the boundary of
//!   convergence; the limit is the residue at the coupling pole, which
//!   removes `t` and one coupled variate `s_j = -(b + Σ_{k≠j} w_k s_k)/w_j`.
//! * `Circle`: a small closed circle around a pole, used by the asymptotic
//!   expansion to extract a residue of any order.

use std::f64::consts::PI;

use num_complex::Complex;

use crate::density::DensityConstraint;
use crate::error::{Error, Result};
use crate::gamma::ln_gamma_unchecked;
use crate::kernel::{cancel_pairs, FoxHKernel, LinearGamma};
use crate::lp::{maximize, LpOutcome};
use crate::scalar::Real;

/// Anchors are searched inside `[-ANCHOR_BOX, ANCHOR_BOX]^M`.
pub const ANCHOR_BOX: f64 = 16.0;
/// Clearance beyond which anchors are pulled toward the imaginary axis.
pub const CLEARANCE_CAP: f64 = 0.5;
/// Truncation target for the integrand relative to its anchor value.
pub const TRUNCATION_RATIO: f64 = 1e-18;
/// Exponential decay rate below which a variate is closed as a residue series.
const SERIES_RATE: f64 = 0.25;
const MAX_HALF_WIDTH: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    NestedDeterministic,
    Qmc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariateRole {
    Contour,
    Series,
    Converging,
    Eliminated,
    Circle {
        center: f64,
        radius: f64,
        nodes: usize,
        clockwise: bool,
    },
}

/// Residue reduction of a converging variate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reduction {
    pub converging: usize,
    pub eliminated: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPlan {
    pub variates: usize,
    pub anchors: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub nodes: Vec<usize>,
    pub strategy: Strategy,
    pub qmc_samples: usize,
    pub qmc_shifts: usize,
    pub qmc_seed: u64,
    pub roles: Vec<VariateRole>,
    pub reductions: Vec<Reduction>,
    /// Chebyshev radius of the anchor point.
    pub margin: f64,
    pub arg_phases: Vec<f64>,
    /// Keep only this many leading residues of each series variate.
    pub series_terms: Option<usize>,
}

impl ContourPlan {
    /// Variates integrated by quadrature (contour lines and circles).
    pub fn quadrature_variates(&self) -> Vec<usize> {
        (0..self.variates)
            .filter(|&k| {
                matches!(
                    self.roles[k],
                    VariateRole::Contour | VariateRole::Circle { .. }
                )
            })
            .collect()
    }

    pub fn contour_dimension(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| **r == VariateRole::Contour)
            .count()
    }

    /// Same plan with every contour node count doubled (step halved).
    pub fn refined(&self) -> Self {
        let mut p = self.clone();
        for k in 0..p.variates {
            if p.roles[k] == VariateRole::Contour {
                p.nodes[k] = 2 * (p.nodes[k] - 1) + 1;
            }
        }
        p.qmc_samples *= 2;
        p
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_series_terms(mut self, terms: usize) -> Self {
        self.series_terms = Some(terms);
        self
    }

    pub fn with_qmc_samples(mut self, samples: usize) -> Self {
        self.qmc_samples = samples;
        self
    }

    /// Replaces the role of variate `k` by a residue circle.
    pub fn with_circle(
        mut self,
        k: usize,
        center: f64,
        radius: f64,
        nodes: usize,
        clockwise: bool,
    ) -> Self {
        self.roles[k] = VariateRole::Circle {
            center,
            radius,
            nodes,
            clockwise,
        };
        self.anchors[k] = center;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOptions {
    pub density_constraint: Option<DensityConstraint>,
    /// Phases `arg z_k` of the arguments; zero when unknown.
    pub arg_phases: Option<Vec<f64>>,
    /// Total integrand evaluations allowed.
    pub budget: usize,
    pub strategy: Option<Strategy>,
    pub qmc_shifts: usize,
    pub qmc_seed: u64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            density_constraint: None,
            arg_phases: None,
            budget: 1 << 20,
            strategy: None,
            qmc_shifts: 8,
            qmc_seed: 0x5eed_f0c5,
        }
    }
}

/// Admissible region of anchor vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub count_violations: Vec<String>,
    pub pole_violations: Vec<String>,
    pub region: Option<AnchorRegion>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.count_violations.is_empty() && self.pole_violations.is_empty() && self.region.is_some()
    }
}

/// Checks counts and the existence of a pole-separating anchor vector.
pub fn validate_kernel<T: Real>(kernel: &FoxHKernel<T>) -> ValidationReport {
    let count_violations = kernel.count_violations();
    if !count_violations.is_empty() {
        return ValidationReport {
            count_violations,
            pole_violations: Vec::new(),
            region: None,
        };
    }
    let factors = to_f64(&kernel.linear_factors());
    let active: Vec<usize> = (0..kernel.variates).collect();
    let mut pole_violations = constant_pole_violations(&factors);
    let region = if pole_violations.is_empty() {
        match chebyshev_center(&factors, None, &active, kernel.variates) {
            Ok((center, radius)) => Some(AnchorRegion {
                lower: (0..kernel.variates)
                    .map(|k| extent(&factors, &active, k, -1.0))
                    .collect(),
                upper: (0..kernel.variates)
                    .map(|k| extent(&factors, &active, k, 1.0))
                    .collect(),
                center,
                radius,
            }),
            Err(e) => {
                pole_violations.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    ValidationReport {
        count_violations,
        pole_violations,
        region,
    }
}

pub(crate) fn to_f64<T: Real>(f: &[LinearGamma<T>]) -> Vec<LinearGamma<f64>> {
    f.iter()
        .map(|g| LinearGamma {
            shift: g.shift.as_f64(),
            coeffs: g.coeffs.iter().map(|c| c.as_f64()).collect(),
            numerator: g.numerator,
        })
        .collect()
}

fn constant_pole_violations(factors: &[LinearGamma<f64>]) -> Vec<String> {
    factors
        .iter()
        .filter(|f| f.numerator && f.is_constant() && f.shift <= 0.0 && f.shift == f.shift.round())
        .map(|f| format!("constant numerator Γ({}) is a pole", f.shift))
        .collect()
}

/// Strict-inequality rows `shift + w·c > 0` for all non-constant numerators.
fn pole_rows(factors: &[LinearGamma<f64>], active: &[usize]) -> Vec<(Vec<f64>, f64)> {
    factors
        .iter()
        .filter(|f| f.numerator && active.iter().any(|&k| f.coeffs[k] != 0.0))
        .map(|f| (active.iter().map(|&k| f.coeffs[k]).collect(), f.shift))
        .collect()
}

/// Chebyshev center of `{c : rows > 0} ∩ box`, then pulled toward the origin
/// among points keeping clearance `min(r*, CLEARANCE_CAP)`.
fn chebyshev_center(
    factors: &[LinearGamma<f64>],
    density: Option<(Vec<f64>, f64)>,
    active: &[usize],
    m: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut rows = pole_rows(factors, active);
    if let Some((w, b)) = density {
        if w.iter().all(|x| *x == 0.0) {
            if b <= 0.0 {
                return Err(Error::Planning(format!(
                    "density constraint {b} > 0 cannot hold"
                )));
            }
        } else {
            rows.push((w, b));
        }
    }
    let d = active.len();
    let mut full = vec![0.0; m];
    if d == 0 {
        return Ok((full, f64::INFINITY));
    }
    // variables: v_k = c_k + B (>= 0), r >= 0
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (w, shift) in &rows {
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut row: Vec<f64> = w.iter().map(|x| -x).collect();
        row.push(norm);
        a.push(row);
        b.push(shift - ANCHOR_BOX * w.iter().sum::<f64>());
    }
    for k in 0..d {
        let mut row = vec![0.0; d + 1];
        row[k] = 1.0;
        row[d] = 1.0;
        a.push(row);
        b.push(2.0 * ANCHOR_BOX);
        let mut row = vec![0.0; d + 1];
        row[k] = -1.0;
        row[d] = 1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    let radius = match maximize(&obj, &a, &b) {
        LpOutcome::Optimal { value, .. } => value,
        _ => 0.0,
    };
    if radius <= 1e-9 {
        return Err(Error::Planning(
            "no anchor vector separates the pole families (empty admissible region)".into(),
        ));
    }
    // second stage: clearance >= target, minimize Σ e_k with e_k >= |c_k|
    let target = radius.min(CLEARANCE_CAP);
    let nv = 2 * d + 1;
    let mut a2 = Vec::new();
    let mut b2 = Vec::new();
    for (row, rhs) in a.iter().zip(&b) {
        let mut r2 = vec![0.0; nv];
        r2[..d].copy_from_slice(&row[..d]);
        r2[d] = row[d];
        a2.push(r2);
        b2.push(*rhs);
    }
    let mut r2 = vec![0.0; nv];
    r2[d] = -1.0;
    a2.push(r2);
    b2.push(-target * (1.0 - 1e-9));
    for k in 0..d {
        // c_k - e_k <= 0  ->  v_k - e_k <= B ; -c_k - e_k <= 0 -> -v_k - e_k <= -B
        let mut r2 = vec![0.0; nv];
        r2[k] = 1.0;
        r2[d + 1 + k] = -1.0;
        a2.push(r2);
        b2.push(ANCHOR_BOX);
        let mut r2 = vec![0.0; nv];
        r2[k] = -1.0;
        r2[d + 1 + k] = -1.0;
        a2.push(r2);
        b2.push(-ANCHOR_BOX);
    }
    let mut obj2 = vec![0.0; nv];
    for k in 0..d {
        obj2[d + 1 + k] = -1.0;
    }
    obj2[d] = 1e-6;
    let x = match maximize(&obj2, &a2, &b2) {
        LpOutcome::Optimal { x, .. } => x,
        other => {
            return Err(Error::Planning(format!(
                "anchor refinement failed: {other:?}"
            )));
        }
    };
    for (i, &k) in active.iter().enumerate() {
        full[k] = x[i] - ANCHOR_BOX;
    }
    let clearance = rows
        .iter()
        .map(|(w, s)| {
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            (s + w
                .iter()
                .zip(active)
                .map(|(wi, &k)| wi * full[k])
                .sum::<f64>())
                / norm
        })
        .fold(f64::INFINITY, f64::min);
    Ok((full, clearance))
}

/// Extreme value of coordinate `k` over the admissible region (in the box).
fn extent(factors: &[LinearGamma<f64>], active: &[usize], k: usize, dir: f64) -> f64 {
    let rows = pole_rows(factors, active);
    let d = active.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (w, shift) in &rows {
        a.push(w.iter().map(|x| -x).collect::<Vec<_>>());
        b.push(shift - ANCHOR_BOX * w.iter().sum::<f64>());
    }
    for i in 0..d {
        let mut row = vec![0.0; d];
        row[i] = 1.0;
        a.push(row);
        b.push(2.0 * ANCHOR_BOX);
    }
    let idx = active.iter().position(|&x| x == k).expect("active variate");
    let mut obj = vec![0.0; d];
    obj[idx] = dir;
    match maximize(&obj, &a, &b) {
        LpOutcome::Optimal { x, .. } => x[idx] - ANCHOR_BOX,
        _ => f64::NAN,
    }
}

/// Kernel factors after pair cancellation and converging-variate reductions.
#[derive(Debug, Clone)]
pub(crate) struct Reduced<T> {
    pub factors: Vec<LinearGamma<T>>,
    pub logs: Vec<Complex<T>>,
    pub const_log: Complex<T>,
    pub jacobian: T,
    pub reductions: Vec<Reduction>,
}

fn is_minus_one_phase(theta: f64) -> bool {
    (theta.abs() - PI).abs() < 1e-12
}

/// Finds a converging variate: argument `-1`, own factor `Γ(-t)` only, and a
/// single coupling numerator `Γ(b + w·s + t)`.
fn find_converging<T: Real>(
    kernel: &FoxHKernel<T>,
    factors: &[LinearGamma<T>],
    phases: &[f64],
    done: &[Reduction],
) -> Option<(usize, usize, usize)> {
    for t in 0..kernel.variates {
        if done.iter().any(|r| r.converging == t || r.eliminated == t)
            || !is_minus_one_phase(phases[t])
        {
            continue;
        }
        let g = &kernel.per_variate[t];
        let exp_group = g.upper.is_empty()
            && g.lower.len() == 1
            && g.m == 1
            && g.lower[0].offset == T::zero()
            && g.lower[0].weight == T::one();
        if !exp_group {
            continue;
        }
        let own = factors.iter().position(|f| {
            f.numerator
                && f.shift == T::zero()
                && f.coeffs[t] == -T::one()
                && f.coeffs
                    .iter()
                    .enumerate()
                    .all(|(k, c)| k == t || *c == T::zero())
        });
        let Some(own) = own else { continue };
        let others: Vec<usize> = (0..factors.len())
            .filter(|&i| i != own && factors[i].involves(t))
            .collect();
        if others.len() != 1 {
            continue;
        }
        let c = &factors[others[0]];
        if !c.numerator || c.coeffs[t] != T::one() {
            continue;
        }
        let elim = (0..kernel.variates)
            .rev()
            .find(|&k| k != t && c.coeffs[k] != T::zero());
        if let Some(j) = elim {
            return Some((t, own, j));
        }
    }
    None
}

pub(crate) fn reduce<T: Real>(
    kernel: &FoxHKernel<T>,
    mut logs: Vec<Complex<T>>,
    phases: &[f64],
) -> Result<Reduced<T>> {
    let mut factors = kernel.linear_factors();
    let mut const_log = Complex::new(T::zero(), T::zero());
    let mut jacobian = T::one();
    let mut reductions = Vec::new();
    while let Some((t, own, j)) = find_converging(kernel, &factors, phases, &reductions) {
        let coupling_idx = (0..factors.len())
            .find(|&i| i != own && factors[i].involves(t))
            .expect("coupling factor");
        let coupling = factors[coupling_idx].clone();
        let wj = coupling.coeffs[j];
        let b = coupling.shift;
        let mut next = Vec::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            if i == own || i == coupling_idx {
                continue;
            }
            let fj = f.coeffs[j];
            let mut g = f.clone();
            if fj != T::zero() {
                g.shift = f.shift - fj * b / wj;
                for k in 0..kernel.variates {
                    if k != j && k != t {
                        g.coeffs[k] = f.coeffs[k] - fj * coupling.coeffs[k] / wj;
                    }
                }
                g.coeffs[j] = T::zero();
            }
            next.push(g);
        }
        let lj = logs[j];
        const_log = const_log - lj * (b / wj);
        for k in 0..kernel.variates {
            if k != j && k != t && coupling.coeffs[k] != T::zero() {
                logs[k] = logs[k] - lj * (coupling.coeffs[k] / wj);
            }
        }
        logs[j] = Complex::new(T::zero(), T::zero());
        logs[t] = Complex::new(T::zero(), T::zero());
        jacobian = jacobian / wj.abs();
        factors = cancel_pairs(next);
        reductions.push(Reduction {
            converging: t,
            eliminated: j,
        });
    }
    Ok(Reduced {
        factors,
        logs,
        const_log,
        jacobian,
        reductions,
    })
}

/// Exponential decay rate of the integrand along `Im s_k`.
fn axis_rate(factors: &[LinearGamma<f64>], k: usize, phase: f64) -> f64 {
    let mut rate = 0.0;
    for f in factors {
        let w = f.coeffs[k].abs();
        if f.numerator {
            rate += w;
        } else {
            rate -= w;
        }
    }
    0.5 * PI * rate - phase.abs()
}

fn series_eligible(factors: &[LinearGamma<f64>], k: usize) -> bool {
    let only_k = |f: &LinearGamma<f64>| {
        f.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i == k || *c == 0.0)
    };
    let generators = factors
        .iter()
        .filter(|f| f.numerator && f.coeffs[k] < 0.0 && only_k(f))
        .count();
    let blocking = factors
        .iter()
        .any(|f| f.numerator && f.coeffs[k] < 0.0 && !only_k(f));
    generators > 0 && !blocking
}

fn ln_abs_integrand(factors: &[LinearGamma<f64>], c: &[f64], k: usize, y: f64, phase: f64) -> f64 {
    let mut acc = -y * phase;
    for f in factors {
        let arg = Complex::new(f.real_arg(c), f.coeffs[k] * y);
        let v = ln_gamma_unchecked(arg).re;
        if f.numerator {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

fn half_width(factors: &[LinearGamma<f64>], c: &[f64], k: usize, phase: f64) -> Result<f64> {
    let base = ln_abs_integrand(factors, c, k, 0.0, phase);
    let target = TRUNCATION_RATIO.ln();
    let mut worst: f64 = 0.0;
    for dir in [1.0, -1.0] {
        let mut y = 0.0;
        let mut found = false;
        while y < MAX_HALF_WIDTH {
            y += 0.25;
            let v = ln_abs_integrand(factors, c, k, dir * y, phase) - base;
            if v.is_nan() {
                continue;
            }
            if v < target {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Planning(format!(
                "integrand in variate {k} does not decay below {TRUNCATION_RATIO:e} within |Im s| <= {MAX_HALF_WIDTH}"
            )));
        }
        worst = worst.max(y);
    }
    Ok(worst * 1.1)
}

/// Distance along `Re s_k` from the anchor to the nearest numerator pole.
fn strip_distance(factors: &[LinearGamma<f64>], c: &[f64], k: usize) -> f64 {
    factors
        .iter()
        .filter(|f| f.numerator && f.coeffs[k] != 0.0)
        .map(|f| f.real_arg(c) / f.coeffs[k].abs())
        .fold(2.0, f64::min)
}

/// Plans the quadrature of `kernel` under `options`.
pub fn plan_contours<T: Real>(
    kernel: &FoxHKernel<T>,
    options: &PlanOptions,
) -> Result<ContourPlan> {
    let m = kernel.variates;
    let violations = kernel.count_violations();
    if !violations.is_empty() {
        return Err(Error::InvalidDescriptor(violations.join("; ")));
    }
    let phases = match &options.arg_phases {
        Some(p) if p.len() == m => p.clone(),
        Some(p) => {
            return Err(Error::Planning(format!(
                "{} argument phases for {m} variates",
                p.len()
            )));
        }
        None => vec![0.0; m],
    };
    let logs: Vec<Complex<f64>> = phases.iter().map(|&p| Complex::new(0.0, p)).collect();
    let kernel64 = cast_kernel(kernel);
    let reduced = reduce(&kernel64, logs, &phases)?;
    let factors = reduced.factors;
    let red_phases: Vec<f64> = reduced.logs.iter().map(|l| l.im).collect();

    let mut roles = vec![VariateRole::Contour; m];
    for r in &reduced.reductions {
        roles[r.converging] = VariateRole::Converging;
        roles[r.eliminated] = VariateRole::Eliminated;
    }
    let active: Vec<usize> = (0..m)
        .filter(|&k| roles[k] == VariateRole::Contour)
        .collect();
    for &k in &active {
        let rate = axis_rate(&factors, k, red_phases[k]);
        if rate < SERIES_RATE && series_eligible(&factors, k) {
            roles[k] = VariateRole::Series;
        } else if rate <= 0.0 {
            return Err(Error::Planning(format!(
                "contour integral in variate {k} diverges (exponential rate {rate:.3}) and no residue series applies"
            )));
        }
    }
    for f in &factors {
        let series: Vec<usize> = (0..m)
            .filter(|&k| roles[k] == VariateRole::Series && f.coeffs[k] != 0.0)
            .collect();
        if series.len() > 1 {
            return Err(Error::Unsupported(format!(
                "gamma factor couples residue-series variates {series:?}"
            )));
        }
    }
    let pv = constant_pole_violations(&factors);
    if !pv.is_empty() {
        return Err(Error::Planning(pv.join("; ")));
    }

    let lp_vars: Vec<usize> = (0..m)
        .filter(|&k| matches!(roles[k], VariateRole::Contour | VariateRole::Series))
        .collect();
    let density = match &options.density_constraint {
        Some(d) if reduced.reductions.is_empty() => {
            Some((lp_vars.iter().map(|&k| d.exponents[k]).collect(), d.offset))
        }
        _ => None,
    };
    let (anchors, margin) = chebyshev_center(&factors, density, &lp_vars, m)?;

    let contour: Vec<usize> = (0..m)
        .filter(|&k| roles[k] == VariateRole::Contour)
        .collect();
    let mut half_widths = vec![0.0; m];
    let mut steps = vec![0.0; m];
    for &k in &contour {
        half_widths[k] = half_width(&factors, &anchors, k, red_phases[k])?;
        steps[k] = 2.0 * PI * strip_distance(&factors, &anchors, k) * 0.9 / 40.0;
    }
    let d = contour.len();
    let strategy = options.strategy.unwrap_or(if d <= 4 {
        Strategy::NestedDeterministic
    } else {
        Strategy::Qmc
    });
    let mut nodes = vec![1usize; m];
    if d > 0 {
        let h = contour
            .iter()
            .map(|&k| steps[k])
            .fold(f64::INFINITY, f64::min);
        let count = |h: f64| -> Vec<usize> {
            contour
                .iter()
                .map(|&k| 4 * (half_widths[k] / (2.0 * h)).ceil().max(1.0) as usize + 1)
                .collect()
        };
        let mut n = count(h);
        let total: f64 = n.iter().map(|&x| x as f64).product();
        if strategy == Strategy::NestedDeterministic && total > options.budget as f64 {
            let scale = (total / options.budget as f64).powf(1.0 / d as f64);
            n = count(h * scale);
        }
        for (i, &k) in contour.iter().enumerate() {
            nodes[k] = n[i];
        }
    }
    let qmc_shifts = options.qmc_shifts.max(8);
    let qmc_samples = (options.budget / qmc_shifts).max(1024);
    Ok(ContourPlan {
        variates: m,
        anchors,
        half_widths,
        nodes,
        strategy,
        qmc_samples,
        qmc_shifts,
        qmc_seed: options.qmc_seed,
        roles,
        reductions: reduced.reductions,
        margin,
        arg_phases: phases,
        series_terms: None,
    })
}

pub(crate) fn cast_kernel<T: Real>(k: &FoxHKernel<T>) -> FoxHKernel<f64> {
    use crate::kernel::{Coupled, OuterGroups, Pair, VariateGroup};
    let coupled = |c: &Coupled<T>| Coupled {
        offset: c.offset.as_f64(),
        weights: c.weights.iter().map(|w| w.as_f64()).collect(),
    };
    let pair = |p: &Pair<T>| Pair::new(p.offset.as_f64(), p.weight.as_f64());
    FoxHKernel {
        variates: k.variates,
        outer: OuterGroups {
            upper: k.outer.upper.iter().map(coupled).collect(),
            n: k.outer.n,
            lower: k.outer.lower.iter().map(coupled).collect(),
        },
        per_variate: k
            .per_variate
            .iter()
            .map(|g| VariateGroup {
                upper: g.upper.iter().map(pair).collect(),
                n: g.n,
                lower: g.lower.iter().map(pair).collect(),
                m: g.m,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::VariateGroup;

    fn exp_kernel() -> FoxHKernel<f64> {
        FoxHKernel::new(1).with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0))
    }

    #[test]
    fn exponential_region_is_left_half_line() {
        let r = validate_kernel(&exp_kernel());
        assert!(r.is_feasible());
        let region = r.region.unwrap();
        assert!(region.upper[0].abs() < 1e-9);
        assert!(region.center[0] < 0.0);
    }

    #[test]
    fn exponential_plan_is_one_dimensional_nested() {
        let opts = PlanOptions {
            budget: 10_000,
            ..Default::default()
        };
        let p = plan_contours(&exp_kernel(), &opts).unwrap();
        assert_eq!(p.strategy, Strategy::NestedDeterministic);
        assert_eq!(p.quadrature_variates(), vec![0]);
        assert!(p.anchors[0] < 0.0);
        assert!(p.nodes[0] > 1 && p.nodes[0] <= 10_001);
    }

    #[test]
    fn density_constraint_bounds_anchor_from_below() {
        let opts = PlanOptions {
            density_constraint: Some(DensityConstraint {
                exponents: vec![1.0],
                offset: 1.0,
            }),
            ..Default::default()
        };
        let p = plan_contours(&exp_kernel(), &opts).unwrap();
        assert!((p.anchors[0] + 0.5).abs() < 1e-9, "{:?}", p.anchors);
    }

    #[test]
    fn infeasible_region_is_a_planning_error() {
        // Γ(-s) needs Re s < 0, Γ(-1 + s) needs Re s > 1
        let k = FoxHKernel::<f64>::new(1)
            .outer_numerator(2.0, vec![1.0])
            .with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0));
        assert!(!validate_kernel(&k).is_feasible());
        assert!(matches!(
            plan_contours(&k, &PlanOptions::default()),
            Err(Error::Planning(_))
        ));
    }
}
