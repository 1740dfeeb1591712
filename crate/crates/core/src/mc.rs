//! Monte Carlo reference for the surface channel.
//!
//! Trial `t` draws from its own ChaCha8 stream `(seed, t)`, so estimates do
//! not depend on how trials are scheduled. Trials are grouped into fixed
//! batches whose partial sums are combined pairwise in batch order.

use std::f64::consts::LOG2_E;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ris::{PhaseModel, RicianHop, RisConfig};

pub const MIN_TRIALS: u64 = 10_000;
pub const MIN_BINS: usize = 50;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
const PILOT_TRIALS: u64 = 10_000;

/// How the per-element contributions combine into `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// `Z = Σ |h_i||g_i| cos φ_i`.
    #[default]
    Cosine,
    /// `Z = |Σ |h_i||g_i| e^{jφ_i}|`.
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimPlan {
    pub trials: u64,
    pub seed: u64,
    /// Trials per batch.
    pub batch: u64,
    /// Histogram bins over `[0, mean + 8 sd]`.
    pub bins: usize,
    pub projection: Projection,
}

impl SimPlan {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        let p = SimPlan {
            trials,
            seed,
            batch: 1 << 14,
            bins: 200,
            projection: Projection::Cosine,
        };
        p.check()?;
        Ok(p)
    }

    pub fn with_projection(mut self, projection: Projection) -> Self {
        self.projection = projection;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Result<Self> {
        self.bins = bins;
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::Config(format!(
                "at least {MIN_TRIALS} trials required, got {}",
                self.trials
            )));
        }
        if self.bins < MIN_BINS {
            return Err(Error::Config(format!(
                "at least {MIN_BINS} histogram bins required"
            )));
        }
        if self.batch == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        Ok(())
    }
}

/// Sample mean with its standard error and 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let n = n as f64;
        let mean = sum / n;
        let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        Estimate {
            value: mean,
            std_error: se,
            lo: mean - Z95 * se,
            hi: mean + Z95 * se,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Samples below `lo`.
    pub underflow: u64,
    /// Samples at or above `hi`.
    pub overflow: u64,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Bin centres and normalized densities.
    pub fn density(&self) -> Vec<(f64, f64)> {
        let w = self.width();
        let n = self.total() as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.lo + (i as f64 + 0.5) * w, c as f64 / (n * w)))
            .collect()
    }
}

/// Quantities accumulated per trial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Queries {
    /// Points `x` at which `P(Z ≤ x)` is estimated.
    pub cdf_at: Vec<f64>,
    /// Linear `γ₀` values for `E[log₂(1 + γ₀ Z²)]`.
    pub capacity_gamma0: Vec<f64>,
    /// Highest raw moment `E[Zⁿ]` estimated.
    pub max_moment: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub trials: u64,
    pub seed: u64,
    /// `E[Zⁿ]` for `n = 1..=max_moment`.
    pub moments: Vec<Estimate>,
    pub cdf: Vec<Estimate>,
    pub capacity: Vec<Estimate>,
    pub histogram: Histogram,
}

/// Envelope `|S + σ(g₁ + j g₂)|` of one hop.
fn envelope<R: Rng>(hop: &RicianHop, rng: &mut R) -> f64 {
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    let sigma = hop.sigma();
    Complex::new(hop.los_amplitude() + sigma * g1, sigma * g2).norm()
}

fn phase<R: Rng>(model: PhaseModel, rng: &mut R) -> f64 {
    match model {
        PhaseModel::Ideal => 0.0,
        _ => model.half_width() * (2.0 * rng.random::<f64>() - 1.0),
    }
}

fn stream(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng.set_word_pos(0);
    rng
}

/// `n` envelopes of `hop`, the `i`-th drawn from stream `(seed, i)`.
pub fn sample_rician(hop: RicianHop, n: u64, seed: u64) -> impl Iterator<Item = f64> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(move |i| envelope(&hop, &mut stream(&base, i)))
}

fn trial(config: &RisConfig, projection: Projection, rng: &mut ChaCha8Rng) -> f64 {
    let mut acc = Complex::new(0.0, 0.0);
    for e in &config.elements {
        let r = envelope(&e.hop1, rng) * envelope(&e.hop2, rng);
        let phi = phase(e.phase, rng);
        acc += Complex::from_polar(r, phi);
    }
    match projection {
        Projection::Cosine => acc.re,
        Projection::Magnitude => acc.norm(),
    }
}

#[derive(Debug, Clone)]
struct Acc {
    moment: Vec<(f64, f64)>,
    below: Vec<u64>,
    capacity: Vec<(f64, f64)>,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
}

impl Acc {
    fn new(q: &Queries, bins: usize) -> Self {
        Acc {
            moment: vec![(0.0, 0.0); q.max_moment as usize],
            below: vec![0; q.cdf_at.len()],
            capacity: vec![(0.0, 0.0); q.capacity_gamma0.len()],
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        for (a, b) in self.moment.iter_mut().zip(o.moment) {
            a.0 += b.0;
            a.1 += b.1;
        }
        for (a, b) in self.capacity.iter_mut().zip(o.capacity) {
            a.0 += b.0;
            a.1 += b.1;
        }
        for (a, b) in self.below.iter_mut().zip(o.below) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(o.counts) {
            *a += b;
        }
        self.underflow += o.underflow;
        self.overflow += o.overflow;
        self
    }
}

fn pairwise(mut parts: Vec<Acc>) -> Acc {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("at least one batch")
}

/// Histogram range `[0, mean + 8 sd]` from a fixed pilot prefix of the
/// trial streams.
fn pilot_range(config: &RisConfig, plan: &SimPlan, base: &ChaCha8Rng) -> f64 {
    let n = PILOT_TRIALS.min(plan.trials);
    let (mut s, mut s2) = (0.0, 0.0);
    for t in 0..n {
        let z = trial(config, plan.projection, &mut stream(base, t));
        s += z;
        s2 += z * z;
    }
    let mean = s / n as f64;
    let sd = (s2 / n as f64 - mean * mean).max(0.0).sqrt();
    (mean + 8.0 * sd).max(f64::MIN_POSITIVE)
}

pub fn simulate_z(config: &RisConfig, plan: &SimPlan, queries: &Queries) -> Result<Simulation> {
    config.check()?;
    plan.check()?;
    let base = ChaCha8Rng::seed_from_u64(plan.seed);
    let hi = pilot_range(config, plan, &base);
    let bin_width = hi / plan.bins as f64;
    let batches = plan.trials.div_ceil(plan.batch);
    let parts: Vec<Acc> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut acc = Acc::new(queries, plan.bins);
            for t in b * plan.batch..((b + 1) * plan.batch).min(plan.trials) {
                let z = trial(config, plan.projection, &mut stream(&base, t));
                let mut p = 1.0;
                for m in acc.moment.iter_mut() {
                    p *= z;
                    m.0 += p;
                    m.1 += p * p;
                }
                for (c, &x) in acc.below.iter_mut().zip(&queries.cdf_at) {
                    *c += u64::from(z <= x);
                }
                for (c, &g0) in acc.capacity.iter_mut().zip(&queries.capacity_gamma0) {
                    let v = (g0 * z * z).ln_1p() * LOG2_E;
                    c.0 += v;
                    c.1 += v * v;
                }
                if z < 0.0 {
                    acc.underflow += 1;
                } else {
                    let i = (z / bin_width) as usize;
                    match acc.counts.get_mut(i) {
                        Some(c) => *c += 1,
                        None => acc.overflow += 1,
                    }
                }
            }
            acc
        })
        .collect();
    let acc = pairwise(parts);
    let n = plan.trials;
    let indicator = |k: u64| Estimate::from_sums(k as f64, k as f64, n);
    Ok(Simulation {
        trials: n,
        seed: plan.seed,
        moments: acc
            .moment
            .iter()
            .map(|&(s, s2)| Estimate::from_sums(s, s2, n))
            .collect(),
        cdf: acc.below.iter().map(|&k| indicator(k)).collect(),
        capacity: acc
            .capacity
            .iter()
            .map(|&(s, s2)| Estimate::from_sums(s, s2, n))
            .collect(),
        histogram: Histogram {
            lo: 0.0,
            hi,
            counts: acc.counts,
            underflow: acc.underflow,
            overflow: acc.overflow,
        },
    })
}

/// `P(Z ≤ x)` at each `x`.
pub fn empirical_cdf(config: &RisConfig, plan: &SimPlan, xs: &[f64]) -> Result<Vec<Estimate>> {
    let q = Queries {
        cdf_at: xs.to_vec(),
        ..Queries::default()
    };
    Ok(simulate_z(config, plan, &q)?.cdf)
}

/// `P(γ₀ Z² ≤ γ_th)` for each `γ₀` (all in dB). A negative `Z` counts as
/// an outage only when `Z² ≤ γ_th/γ₀`, so the indicator is `|Z| ≤ x`.
pub fn empirical_outage(
    config: &RisConfig,
    plan: &SimPlan,
    gamma_th_db: f64,
    gamma0_db: &[f64],
) -> Result<Vec<Estimate>> {
    let th = crate::ris::db_to_linear(gamma_th_db);
    let xs: Vec<f64> = gamma0_db
        .iter()
        .map(|&g| (th / crate::ris::db_to_linear(g)).sqrt())
        .collect();
    // P(|Z| ≤ x) = P(Z ≤ x) - P(Z ≤ -x) up to a null set
    let mut pts = xs.clone();
    pts.extend(xs.iter().map(|x| -x));
    let q = Queries {
        cdf_at: pts,
        ..Queries::default()
    };
    let sim = simulate_z(config, plan, &q)?;
    let n = xs.len();
    let trials = sim.trials;
    Ok((0..n)
        .map(|i| {
            let k = ((sim.cdf[i].value - sim.cdf[n + i].value) * trials as f64).round();
            Estimate::from_sums(k, k, trials)
        })
        .collect())
}

/// `E[log₂(1 + γ₀ Z²)]` for each linear `γ₀`.
pub fn empirical_capacity(
    config: &RisConfig,
    plan: &SimPlan,
    gamma0: &[f64],
) -> Result<Vec<Estimate>> {
    let q = Queries {
        capacity_gamma0: gamma0.to_vec(),
        ..Queries::default()
    };
    Ok(simulate_z(config, plan, &q)?.capacity)
}

/// `E[Zⁿ]`.
pub fn empirical_moment(config: &RisConfig, plan: &SimPlan, n: u32) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    let q = Queries {
        max_moment: n,
        ..Queries::default()
    };
    Ok(simulate_z(config, plan, &q)?.moments[n as usize - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ris::{Element, LinkBudget};

    fn one(k: f64, phase: PhaseModel) -> RisConfig {
        let h = RicianHop::new(k, 1.0).unwrap();
        RisConfig::uniform(1, Element::new(h, h, phase), LinkBudget::default())
    }

    #[test]
    fn rejects_small_plans() {
        assert!(SimPlan::new(100, 1).is_err());
        assert!(SimPlan::new(MIN_TRIALS, 1).unwrap().with_bins(10).is_err());
    }

    #[test]
    fn fixed_seed_replays_exactly() {
        let cfg = one(1.0, PhaseModel::Ideal);
        let plan = SimPlan::new(20_000, 7).unwrap();
        let q = Queries {
            cdf_at: vec![0.5, 1.0],
            capacity_gamma0: vec![10.0],
            max_moment: 2,
        };
        let a = simulate_z(&cfg, &plan, &q).unwrap();
        let b = simulate_z(&cfg, &SimPlan { batch: 999, ..plan }, &q).unwrap();
        assert_eq!(a.cdf, b.cdf);
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(simulate_z(&cfg, &plan, &q).unwrap(), a);
        // sums regrouped across batches agree to rounding
        assert!((a.moments[1].value - b.moments[1].value).abs() < 1e-12);
    }

    #[test]
    fn envelope_power_is_omega() {
        let n = 100_000;
        let hop = RicianHop::new(1.0, 2.0).unwrap();
        let (s, s2) =
            sample_rician(hop, n, 3).fold((0.0, 0.0), |(a, b), r| (a + r * r, b + r.powi(4)));
        let e = Estimate::from_sums(s, s2, n);
        assert!((e.value - 2.0).abs() < 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn one_bit_phase_mean_cosine() {
        // E[cos φ] for φ uniform on (-π/2, π/2) is 2/π; with a unit LOS-only
        // product the mean of Z is that constant
        let h = RicianHop::new(1e9, 1.0).unwrap();
        let cfg = RisConfig::uniform(
            1,
            Element::new(h, h, PhaseModel::from_bits(1)),
            LinkBudget::default(),
        );
        let e = empirical_moment(&cfg, &SimPlan::new(100_000, 5).unwrap(), 1).unwrap();
        assert!(
            (e.value - 2.0 / std::f64::consts::PI).abs() < 3.0 * e.std_error + 1e-6,
            "{e:?}"
        );
    }

    #[test]
    fn histogram_holds_every_trial() {
        let sim = simulate_z(
            &one(0.0, PhaseModel::Ideal),
            &SimPlan::new(MIN_TRIALS, 1).unwrap(),
            &Queries::default(),
        )
        .unwrap();
        assert_eq!(sim.histogram.total(), MIN_TRIALS);
        assert_eq!(sim.histogram.counts.len(), 200);
    }
}
