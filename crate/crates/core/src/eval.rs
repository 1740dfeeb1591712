//! Numerical evaluation of Fox-H kernels on a planned contour.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;

use crate::density::WeightedDensity;
use crate::error::{Error, Result};
use crate::gamma::{is_gamma_pole, ln_gamma_unchecked, log_gamma_complex};
use crate::kernel::{FoxHKernel, LinearGamma};
use crate::plan::{plan_contours, reduce, ContourPlan, PlanOptions, Strategy, VariateRole};
use crate::qmc;
use crate::scalar::Real;

const CHUNK: usize = 2048;
const MAX_SERIES_TERMS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    pub imag_residual: T,
    /// Integrand evaluations.
    pub work: usize,
}

/// The gamma-ratio product `Φ(s)` of the kernel at a complex point.
///
/// Denominator poles make the product vanish; numerator poles are errors.
pub fn integrand<T: Real>(kernel: &FoxHKernel<T>, s: &[Complex<T>]) -> Result<Complex<T>> {
    if s.len() != kernel.variates {
        return Err(Error::InvalidDescriptor(format!(
            "{} coordinates for a {}-variate kernel",
            s.len(),
            kernel.variates
        )));
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for f in kernel.factors().iter().map(|f| f.linear()) {
        let z = linear_arg(&f, s);
        if f.numerator {
            acc = acc + log_gamma_complex(z)?;
        } else if is_gamma_pole(z) {
            return Ok(Complex::new(T::zero(), T::zero()));
        } else {
            acc = acc - log_gamma_complex(z)?;
        }
    }
    let v = acc.exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(v)
}

fn linear_arg<T: Real>(f: &LinearGamma<T>, s: &[Complex<T>]) -> Complex<T> {
    let mut z = Complex::new(f.shift, T::zero());
    for (c, sk) in f.coeffs.iter().zip(s) {
        if *c != T::zero() {
            z = z + *sk * *c;
        }
    }
    z
}

/// Plans a kernel for specific arguments (the argument phases matter).
pub fn plan_for_args<T: Real>(
    kernel: &FoxHKernel<T>,
    args: &[Complex<T>],
    options: &PlanOptions,
) -> Result<ContourPlan> {
    let mut o = options.clone();
    o.arg_phases = Some(args.iter().map(|z| z.arg().as_f64()).collect());
    plan_contours(kernel, &o)
}

/// Plans a weighted density for evaluation at any `x > 0`.
pub fn plan_for_density<T: Real>(
    density: &WeightedDensity<T>,
    options: &PlanOptions,
) -> Result<ContourPlan> {
    let mut o = options.clone();
    o.arg_phases = Some(density.arg_phases());
    plan_contours(&density.kernel, &o)
}

/// `H[args]` on the given plan.
pub fn evaluate_raw<T: Real>(
    kernel: &FoxHKernel<T>,
    args: &[Complex<T>],
    plan: &ContourPlan,
) -> Result<EvalResult<T>> {
    check_args(kernel, args)?;
    evaluate_logs(kernel, args.iter().map(|z| z.ln()).collect(), plan)
}

/// Complex-valued `H[args]` with its absolute error estimate, for arguments
/// off the positive real axis where the value need not be real.
pub fn evaluate_complex<T: Real>(
    kernel: &FoxHKernel<T>,
    args: &[Complex<T>],
    plan: &ContourPlan,
) -> Result<(Complex<T>, T)> {
    check_args(kernel, args)?;
    integrate_logs(kernel, args.iter().map(|z| z.ln()).collect(), plan).map(|(v, e, _)| (v, e))
}

fn check_args<T: Real>(kernel: &FoxHKernel<T>, args: &[Complex<T>]) -> Result<()> {
    if args.len() != kernel.variates {
        return Err(Error::InvalidDescriptor(format!(
            "{} arguments for a {}-variate kernel",
            args.len(),
            kernel.variates
        )));
    }
    if args.iter().any(|z| z.norm() == T::zero()) {
        return Err(Error::Domain("Fox-H argument is zero".into()));
    }
    if args.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Domain("Fox-H argument is not finite".into()));
    }
    Ok(())
}

/// `ψ x^{a-1} H[{ζ_k x^{a_k}}]` on the given plan.
pub fn evaluate<T: Real>(
    density: &WeightedDensity<T>,
    x: T,
    plan: &ContourPlan,
) -> Result<EvalResult<T>> {
    if !(x > T::zero() && x.is_finite()) {
        return Err(Error::Domain(format!(
            "evaluation point must be positive, got {x}"
        )));
    }
    let r = evaluate_logs(&density.kernel, density.log_args(x), plan)?;
    let scale = density.prefactor * x.powf(density.power_offset - T::one());
    Ok(EvalResult {
        value: r.value * scale,
        abs_error_estimate: r.abs_error_estimate * scale.abs(),
        imag_residual: r.imag_residual * scale.abs(),
        work: r.work,
    })
}

struct Cluster<T> {
    variate: usize,
    gen_shift: T,
    gen_weight: T,
    rest: Vec<LinearGamma<T>>,
    log: Complex<T>,
}

struct Dim<T> {
    variate: usize,
    points: Vec<Complex<T>>,
    fine: Vec<Complex<T>>,
    coarse: Vec<Complex<T>>,
    /// `(offset, span)` of the affine map from `[0,1)` (QMC only).
    span: (T, T),
    circle: Option<(T, T)>,
}

struct Prepared<T> {
    m: usize,
    factors: Vec<LinearGamma<T>>,
    clusters: Vec<Cluster<T>>,
    logs: Vec<Complex<T>>,
    const_log: Complex<T>,
    jacobian: T,
    dims: Vec<Dim<T>>,
    vanishes: bool,
    series_terms: usize,
}

fn prepare<T: Real>(
    kernel: &FoxHKernel<T>,
    logs: Vec<Complex<T>>,
    plan: &ContourPlan,
) -> Result<Prepared<T>> {
    let m = kernel.variates;
    if plan.variates != m {
        return Err(Error::Planning(format!(
            "plan for {} variates used with a {m}-variate kernel",
            plan.variates
        )));
    }
    let phases: Vec<f64> = logs.iter().map(|l| l.im.as_f64()).collect();
    for k in 0..m {
        if (phases[k] - plan.arg_phases[k]).abs() > 1e-9 {
            return Err(Error::Planning(format!(
                "argument phase {:.6} of variate {k} differs from the planned {:.6}",
                phases[k], plan.arg_phases[k]
            )));
        }
    }
    let red = reduce(kernel, logs, &phases)?;
    if red.reductions != plan.reductions {
        return Err(Error::Planning(
            "plan reductions do not match the kernel".into(),
        ));
    }
    let series: Vec<usize> = (0..m)
        .filter(|&k| plan.roles[k] == VariateRole::Series)
        .collect();
    let mut const_log = red.const_log;
    let mut vanishes = false;
    let mut factors = Vec::new();
    let mut clusters: Vec<Cluster<T>> = series
        .iter()
        .map(|&k| Cluster {
            variate: k,
            gen_shift: T::zero(),
            gen_weight: T::zero(),
            rest: Vec::new(),
            log: red.logs[k],
        })
        .collect();
    for f in red.factors {
        if f.is_constant() {
            let z = Complex::new(f.shift, T::zero());
            if f.numerator {
                const_log = const_log + log_gamma_complex(z)?;
            } else if is_gamma_pole(z) {
                vanishes = true;
            } else {
                const_log = const_log - log_gamma_complex(z)?;
            }
            continue;
        }
        match series.iter().position(|&k| f.involves(k)) {
            None => factors.push(f),
            Some(ci) => {
                let k = series[ci];
                let lone = f
                    .coeffs
                    .iter()
                    .enumerate()
                    .all(|(i, c)| i == k || *c == T::zero());
                let c = &mut clusters[ci];
                if f.numerator && lone && f.coeffs[k] < T::zero() {
                    if c.gen_weight != T::zero() {
                        return Err(Error::Unsupported(format!(
                            "variate {k} has several residue generators"
                        )));
                    }
                    c.gen_shift = f.shift;
                    c.gen_weight = -f.coeffs[k];
                } else {
                    c.rest.push(f);
                }
            }
        }
    }
    if clusters.iter().any(|c| c.gen_weight == T::zero()) {
        return Err(Error::Planning(
            "series variate without a residue generator".into(),
        ));
    }

    let mut dims = Vec::new();
    for k in 0..m {
        match plan.roles[k] {
            VariateRole::Contour => {
                let n = plan.nodes[k];
                let t = plan.half_widths[k];
                let h = 2.0 * t / (n - 1) as f64;
                let c = plan.anchors[k];
                let mut d = Dim {
                    variate: k,
                    points: Vec::with_capacity(n),
                    fine: Vec::with_capacity(n),
                    coarse: Vec::with_capacity(n),
                    span: (T::lit(-t), T::lit(2.0 * t)),
                    circle: None,
                };
                for j in 0..n {
                    let y = -t + j as f64 * h;
                    let end = j == 0 || j == n - 1;
                    let w = h / (2.0 * PI) * if end { 0.5 } else { 1.0 };
                    let wc = if j % 2 == 0 { 2.0 * w } else { 0.0 };
                    d.points.push(Complex::new(T::lit(c), T::lit(y)));
                    d.fine.push(Complex::new(T::lit(w), T::zero()));
                    d.coarse.push(Complex::new(T::lit(wc), T::zero()));
                }
                dims.push(d);
            }
            VariateRole::Circle {
                center,
                radius,
                nodes,
                clockwise,
            } => {
                let sign = if clockwise { -1.0 } else { 1.0 };
                let mut d = Dim {
                    variate: k,
                    points: Vec::with_capacity(nodes),
                    fine: Vec::with_capacity(nodes),
                    coarse: Vec::with_capacity(nodes),
                    span: (T::zero(), T::one()),
                    circle: Some((T::lit(center), T::lit(radius))),
                };
                for j in 0..nodes {
                    let th = 2.0 * PI * j as f64 / nodes as f64;
                    let e = Complex::new(th.cos(), th.sin());
                    let s = Complex::new(center, 0.0) + e * radius;
                    let w = e * (sign * radius / nodes as f64);
                    let wc = if j % 2 == 0 {
                        w * 2.0
                    } else {
                        Complex::new(0.0, 0.0)
                    };
                    d.points.push(Complex::new(T::lit(s.re), T::lit(s.im)));
                    d.fine.push(Complex::new(T::lit(w.re), T::lit(w.im)));
                    d.coarse.push(Complex::new(T::lit(wc.re), T::lit(wc.im)));
                }
                dims.push(d);
            }
            _ => {}
        }
    }
    Ok(Prepared {
        m,
        factors,
        clusters,
        logs: red.logs,
        const_log,
        jacobian: red.jacobian,
        dims,
        vanishes,
        series_terms: plan.series_terms.unwrap_or(MAX_SERIES_TERMS),
    })
}

impl<T: Real> Prepared<T> {
    /// Reduced integrand (series clusters summed) at the quadrature point `s`.
    fn value(&self, s: &[Complex<T>]) -> Result<Complex<T>> {
        let mut acc = self.const_log;
        for d in &self.dims {
            acc = acc + self.logs[d.variate] * s[d.variate];
        }
        for f in &self.factors {
            let z = linear_arg(f, s);
            if f.numerator {
                if is_gamma_pole(z) {
                    return Err(Error::Pole {
                        re: z.re.as_f64(),
                        im: z.im.as_f64(),
                    });
                }
                acc = acc + ln_gamma_unchecked(z);
            } else if is_gamma_pole(z) {
                return Ok(Complex::new(T::zero(), T::zero()));
            } else {
                acc = acc - ln_gamma_unchecked(z);
            }
        }
        if self.clusters.is_empty() {
            return Ok(acc.exp());
        }
        let mut point = s.to_vec();
        let mut rel = Complex::new(T::one(), T::zero());
        for c in &self.clusters {
            let (lead, sum) = match self.recurrent_series(c, &mut point)? {
                Some(r) => r,
                None => (
                    Complex::new(T::zero(), T::zero()),
                    self.series(c, &mut point)?,
                ),
            };
            acc = acc + lead;
            rel = rel * sum;
        }
        Ok(acc.exp() * rel)
    }

    /// Fast form of [`Prepared::series`] when every remaining factor's
    /// argument advances by a small positive integer per term from a start
    /// with positive real part: each term then follows from the previous one
    /// through `Γ(z+1) = zΓ(z)`. Returns the log of the first term and the
    /// sum relative to it, or `None` when the recurrence does not apply.
    fn recurrent_series(
        &self,
        c: &Cluster<T>,
        s: &mut [Complex<T>],
    ) -> Result<Option<(Complex<T>, Complex<T>)>> {
        let k = c.variate;
        let inv_w = T::one() / c.gen_weight;
        let p0 = c.gen_shift * inv_w;
        s[k] = Complex::new(p0, T::zero());
        let mut args = Vec::with_capacity(c.rest.len());
        let mut lead = c.log * p0 - Complex::new(c.gen_weight.ln(), T::zero());
        for f in &c.rest {
            let step = f.coeffs[k] * inv_w;
            let whole = step.round();
            if (step - whole).abs() > T::lit(1e-12) || whole < T::one() || whole > T::lit(8.0) {
                return Ok(None);
            }
            let z = linear_arg(f, s);
            if z.re <= T::zero() {
                return Ok(None);
            }
            let lg = ln_gamma_unchecked(z);
            lead = if f.numerator { lead + lg } else { lead - lg };
            args.push((z, whole.as_f64() as usize, f.numerator));
        }
        let advance = (c.log * inv_w).exp();
        let one = Complex::new(T::one(), T::zero());
        let mut term = one;
        let mut sum = one;
        let mut prev = T::one();
        let mut small = 0;
        for n in 1..MAX_SERIES_TERMS.min(self.series_terms) {
            let mut r = -advance / T::lit(n as f64);
            for (z, step, numerator) in args.iter_mut() {
                let mut p = one;
                for j in 0..*step {
                    p = p * (*z + T::lit(j as f64));
                }
                r = if *numerator { r * p } else { r / p };
                *z = *z + T::lit(*step as f64);
            }
            term = term * r;
            if !(term.re.is_finite() && term.im.is_finite()) {
                return Ok(None);
            }
            sum = sum + term;
            let mag = term.norm();
            if mag <= prev && mag <= T::epsilon() * T::lit(0.01) * sum.norm() {
                small += 1;
                if small >= 2 {
                    return Ok(Some((lead, sum)));
                }
            } else {
                small = 0;
            }
            prev = mag;
        }
        if self.series_terms < MAX_SERIES_TERMS {
            return Ok(Some((lead, sum)));
        }
        Err(Error::SeriesDivergence {
            variate: k,
            terms: MAX_SERIES_TERMS,
        })
    }

    /// Sum over the right poles of the generator `Γ(b - w s_k)`:
    /// `Σ_n (-1)^n / (n! w) · rest(p_n) · z_k^{p_n}` with `p_n = (b + n)/w`.
    fn series(&self, c: &Cluster<T>, s: &mut [Complex<T>]) -> Result<Complex<T>> {
        let k = c.variate;
        let mut sum = Complex::new(T::zero(), T::zero());
        let mut ln_fact = T::zero();
        let mut prev = T::infinity();
        let mut small = 0;
        let ln_w = c.gen_weight.ln();
        for n in 0..MAX_SERIES_TERMS {
            if n == self.series_terms {
                return Ok(sum);
            }
            if n > 0 {
                ln_fact = ln_fact + T::lit(n as f64).ln();
            }
            let p = (c.gen_shift + T::lit(n as f64)) / c.gen_weight;
            s[k] = Complex::new(p, T::zero());
            let mut acc = c.log * p - Complex::new(ln_fact + ln_w, T::zero());
            let mut zero = false;
            for f in &c.rest {
                let z = linear_arg(f, s);
                if f.numerator {
                    if is_gamma_pole(z) {
                        return Err(Error::Pole {
                            re: z.re.as_f64(),
                            im: z.im.as_f64(),
                        });
                    }
                    acc = acc + ln_gamma_unchecked(z);
                } else if is_gamma_pole(z) {
                    zero = true;
                    break;
                } else {
                    acc = acc - ln_gamma_unchecked(z);
                }
            }
            let term = if zero {
                Complex::new(T::zero(), T::zero())
            } else if n % 2 == 0 {
                acc.exp()
            } else {
                -acc.exp()
            };
            if !(term.re.is_finite() && term.im.is_finite()) {
                return Err(Error::Overflow);
            }
            sum = sum + term;
            let mag = term.norm();
            if n > 0 && mag <= prev && mag <= T::epsilon() * T::lit(0.01) * sum.norm() {
                small += 1;
                if small >= 2 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            prev = mag;
        }
        Err(Error::SeriesDivergence {
            variate: k,
            terms: MAX_SERIES_TERMS,
        })
    }
}

#[derive(Clone, Copy)]
struct Partial<T> {
    fine: Complex<T>,
    coarse: Complex<T>,
    abs: T,
}

impl<T: Real> Partial<T> {
    fn zero() -> Self {
        Partial {
            fine: Complex::new(T::zero(), T::zero()),
            coarse: Complex::new(T::zero(), T::zero()),
            abs: T::zero(),
        }
    }

    fn add(self, o: Self) -> Self {
        Partial {
            fine: self.fine + o.fine,
            coarse: self.coarse + o.coarse,
            abs: self.abs + o.abs,
        }
    }
}

fn integrate_logs<T: Real>(
    kernel: &FoxHKernel<T>,
    logs: Vec<Complex<T>>,
    plan: &ContourPlan,
) -> Result<(Complex<T>, T, usize)> {
    let prep = prepare(kernel, logs, plan)?;
    if prep.vanishes {
        return Ok((Complex::new(T::zero(), T::zero()), T::zero(), 0));
    }
    let (total, err, work) = match plan.strategy {
        Strategy::NestedDeterministic => nested(&prep)?,
        Strategy::Qmc => quasi_monte_carlo(&prep, plan)?,
    };
    let total = total * prep.jacobian;
    let err = err * prep.jacobian;
    if !(total.re.is_finite() && total.im.is_finite() && err.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok((total, err, work))
}

pub(crate) fn evaluate_logs<T: Real>(
    kernel: &FoxHKernel<T>,
    logs: Vec<Complex<T>>,
    plan: &ContourPlan,
) -> Result<EvalResult<T>> {
    let (total, err, work) = integrate_logs(kernel, logs, plan)?;
    let imag = total.im.abs();
    let hundred = T::lit(100.0);
    if imag > hundred * err && imag > T::lit(1e-6) * total.re.abs() {
        return Err(Error::Consistency {
            imag: imag.as_f64(),
            err: err.as_f64(),
        });
    }
    Ok(EvalResult {
        value: total.re,
        abs_error_estimate: err,
        imag_residual: imag,
        work,
    })
}

fn nested<T: Real>(prep: &Prepared<T>) -> Result<(Complex<T>, T, usize)> {
    let sizes: Vec<usize> = prep.dims.iter().map(|d| d.points.len()).collect();
    let total: usize = sizes.iter().product();
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<Result<Partial<T>>> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut s = vec![Complex::new(T::zero(), T::zero()); prep.m];
            let mut acc = Partial::zero();
            for idx in ci * CHUNK..((ci + 1) * CHUNK).min(total) {
                let mut rem = idx;
                let mut wf = Complex::new(T::one(), T::zero());
                let mut wc = Complex::new(T::one(), T::zero());
                for (d, &n) in prep.dims.iter().zip(&sizes) {
                    let j = rem % n;
                    rem /= n;
                    s[d.variate] = d.points[j];
                    wf = wf * d.fine[j];
                    wc = wc * d.coarse[j];
                }
                let v = prep.value(&s)?;
                let t = v * wf;
                acc = acc.add(Partial {
                    fine: t,
                    coarse: v * wc,
                    abs: t.norm(),
                });
            }
            Ok(acc)
        })
        .collect();
    let mut sum = Partial::zero();
    for p in partials {
        sum = sum.add(p?);
    }
    let floor = T::lit(64.0) * T::epsilon() * sum.abs;
    let err = if prep.dims.is_empty() {
        floor
    } else {
        (sum.fine - sum.coarse).norm() + floor
    };
    Ok((sum.fine, err, total))
}

fn quasi_monte_carlo<T: Real>(
    prep: &Prepared<T>,
    plan: &ContourPlan,
) -> Result<(Complex<T>, T, usize)> {
    let dim = prep.dims.len();
    if dim > qmc::MAX_DIMENSION {
        return Err(Error::Unsupported(format!("QMC in {dim} dimensions")));
    }
    let reps = plan.qmc_shifts.max(2);
    let n = plan.qmc_samples.max(1);
    let shifts = qmc::shifts(plan.qmc_seed, reps, dim);
    let mut estimates = Vec::with_capacity(reps);
    let mut abs_total = T::zero();
    for shift in &shifts {
        let chunks = n.div_ceil(CHUNK);
        let partials: Vec<Result<(Complex<T>, T)>> = (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let mut s = vec![Complex::new(T::zero(), T::zero()); prep.m];
                let mut u = vec![0.0; dim];
                let mut acc = Complex::new(T::zero(), T::zero());
                let mut abs = T::zero();
                for i in ci * CHUNK..((ci + 1) * CHUNK).min(n) {
                    qmc::point(i as u64, shift, &mut u);
                    let mut w = Complex::new(T::one(), T::zero());
                    for (d, &ud) in prep.dims.iter().zip(&u) {
                        let ud = T::lit(ud);
                        match d.circle {
                            None => {
                                let y = d.span.0 + d.span.1 * ud;
                                s[d.variate] = Complex::new(d.points[0].re, y);
                                w = w * (d.span.1 / T::TAU());
                            }
                            Some((center, radius)) => {
                                let th = T::TAU() * ud;
                                let e = Complex::new(th.cos(), th.sin());
                                s[d.variate] = Complex::new(center, T::zero()) + e * radius;
                                let sign = d.fine[0].re.signum();
                                w = w * e * (radius * sign);
                            }
                        }
                    }
                    let t = prep.value(&s)? * w;
                    acc = acc + t;
                    abs = abs + t.norm();
                }
                Ok((acc, abs))
            })
            .collect();
        let mut sum = Complex::new(T::zero(), T::zero());
        for p in partials {
            let (a, b) = p?;
            sum = sum + a;
            abs_total = abs_total + b;
        }
        estimates.push(sum / T::lit(n as f64));
    }
    let r = T::lit(reps as f64);
    let mean = estimates
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b)
        / r;
    let var = estimates
        .iter()
        .map(|e| (*e - mean).norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        / (r - T::one());
    let floor = T::lit(64.0) * T::epsilon() * abs_total / T::lit((n * reps) as f64);
    Ok((mean, (var / r).sqrt() + floor, n * reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::VariateGroup;

    fn exp_kernel() -> FoxHKernel<f64> {
        FoxHKernel::new(1).with_variate(0, VariateGroup::new().lower_numerator(0.0, 1.0))
    }

    #[test]
    fn integrand_of_exponential_is_gamma() {
        let v = integrand(&exp_kernel(), &[Complex::new(-0.5, 0.0)]).unwrap();
        assert!((v.re - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn exponential_kernel_reproduces_exp() {
        let k = exp_kernel();
        for x in [0.1, 1.0, 3.5] {
            let args = [Complex::new(x, 0.0)];
            let plan = plan_for_args(&k, &args, &PlanOptions::default()).unwrap();
            let r = evaluate_raw(&k, &args, &plan).unwrap();
            assert!((r.value - (-x).exp()).abs() < 1e-12, "x = {x}: {}", r.value);
            assert!(r.abs_error_estimate < 1e-9);
        }
    }

    #[test]
    fn zero_argument_is_a_domain_error() {
        let k = exp_kernel();
        let plan = plan_contours(&k, &PlanOptions::default()).unwrap();
        assert!(matches!(
            evaluate_raw(&k, &[Complex::new(0.0, 0.0)], &plan),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mismatched_phase_is_rejected() {
        let k = exp_kernel();
        let plan = plan_contours(&k, &PlanOptions::default()).unwrap();
        assert!(matches!(
            evaluate_raw(&k, &[Complex::new(0.0, 1.0)], &plan),
            Err(Error::Planning(_))
        ));
    }

    #[test]
    fn imaginary_argument_uses_residue_series() {
        // e^{-z} at z = 2i, where the contour integral alone would not converge
        let k = exp_kernel();
        let z = Complex::new(0.0, 2.0);
        let plan = plan_for_args(&k, &[z], &PlanOptions::default()).unwrap();
        assert_eq!(plan.roles[0], VariateRole::Series);
        let (v, err) = evaluate_complex(&k, &[z], &plan).unwrap();
        let want = (-z).exp();
        assert!((v - want).norm() < 1e-12, "{v} vs {want}");
        assert!(err < 1e-10);
    }
}
