//! Run configuration files.
//!
//! TOML with fixed sections; unknown keys are errors.
//!
//! ```toml
//! [[element]]            # repeat per distinct element
//! k1 = 1.0
//! omega1 = 1.0
//! k2 = 1.0
//! omega2 = 1.0
//! phase_bits = 0         # 0 = no phase error
//! count = 1              # identical copies of this element
//!
//! [budget]               # link budget, all keys optional
//! carrier_hz = 6e9
//! tx_power_dbm = 30.0
//!
//! [sweep]
//! gamma0_db = "0:40:2"   # start:stop:step, inclusive
//! gamma_th_db = 6.0
//!
//! [numerics]
//! tolerance = 1e-3
//! budget = 1048576       # quadrature nodes per evaluation
//! qmc_samples = 131072
//!
//! [simulation]
//! trials = 1000000
//! seed = 1
//! bins = 200
//! projection = "cosine"  # or "magnitude"
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{Projection, SimPlan};
use crate::plan::PlanOptions;
use crate::ris::{Element, LinkBudget, PhaseModel, RicianHop, RisConfig};

/// Inclusive `start:stop:step` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Config(format!("grid `{text}` is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let g = Grid {
            start: v[0],
            stop: v[1],
            step: v[2],
        };
        if !(g.step > 0.0 && g.start <= g.stop && v.iter().all(|x| x.is_finite())) {
            return Err(Error::Config(format!(
                "grid `{text}` needs start <= stop and step > 0"
            )));
        }
        Ok(g)
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Grid::parse(&text).map_err(serde::de::Error::custom)
    }
}

fn one() -> f64 {
    1.0
}

fn single() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub k1: f64,
    #[serde(default = "one")]
    pub omega1: f64,
    pub k2: f64,
    #[serde(default = "one")]
    pub omega2: f64,
    #[serde(default)]
    pub phase_bits: u32,
    #[serde(default = "single")]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub gamma0_db: Grid,
    pub gamma_th_db: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            gamma0_db: Grid {
                start: 0.0,
                stop: 40.0,
                step: 2.0,
            },
            gamma_th_db: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub tolerance: f64,
    pub budget: usize,
    pub qmc_samples: Option<usize>,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            tolerance: 1e-3,
            budget: PlanOptions::default().budget,
            qmc_samples: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionChoice {
    Cosine,
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub trials: u64,
    pub seed: u64,
    pub bins: usize,
    pub projection: ProjectionChoice,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            trials: 1_000_000,
            seed: 1,
            bins: 200,
            projection: ProjectionChoice::Cosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub element: Vec<ElementEntry>,
    #[serde(default)]
    pub budget: LinkBudget,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

impl Default for RunConfig {
    /// One element with `K = 1`, `Ω = 1` on both hops and ideal phase.
    fn default() -> Self {
        RunConfig {
            element: vec![ElementEntry {
                k1: 1.0,
                omega1: 1.0,
                k2: 1.0,
                omega2: 1.0,
                phase_bits: 0,
                count: 1,
            }],
            budget: LinkBudget::default(),
            sweep: SweepSection::default(),
            numerics: NumericsSection::default(),
            simulation: SimulationSection::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn check(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.ris_config().map_err(cfg)?.check().map_err(cfg)?;
        if !(self.numerics.tolerance > 0.0) {
            return Err(Error::Config("numerics.tolerance must be positive".into()));
        }
        if self.numerics.budget == 0 {
            return Err(Error::Config("numerics.budget must be positive".into()));
        }
        self.sim_plan().map(|_| ())
    }

    pub fn elements(&self) -> usize {
        self.element.iter().map(|e| e.count).sum()
    }

    pub fn ris_config(&self) -> Result<RisConfig> {
        let mut elements = Vec::new();
        for e in &self.element {
            let el = Element::new(
                RicianHop::new(e.k1, e.omega1)?,
                RicianHop::new(e.k2, e.omega2)?,
                PhaseModel::from_bits(e.phase_bits),
            );
            elements.extend(std::iter::repeat_n(el, e.count));
        }
        Ok(RisConfig {
            elements,
            budget: self.budget,
        })
    }

    pub fn plan_options(&self) -> PlanOptions {
        let mut o = PlanOptions {
            budget: self.numerics.budget,
            qmc_seed: self.simulation.seed,
            ..PlanOptions::default()
        };
        if let Some(n) = self.numerics.qmc_samples {
            o.budget = n.saturating_mul(o.qmc_shifts);
        }
        o
    }

    pub fn sim_plan(&self) -> Result<SimPlan> {
        let s = &self.simulation;
        let p = SimPlan::new(s.trials, s.seed)?.with_bins(s.bins)?;
        Ok(p.with_projection(match s.projection {
            ProjectionChoice::Cosine => Projection::Cosine,
            ProjectionChoice::Magnitude => Projection::Magnitude,
        }))
    }

    /// Replaces the element list by `n` copies of the first element.
    pub fn with_elements(mut self, n: usize) -> Result<Self> {
        let first = *self
            .element
            .first()
            .ok_or_else(|| Error::Config("no element to replicate".into()))?;
        self.element = vec![ElementEntry { count: n, ..first }];
        self.check()?;
        Ok(self)
    }

    /// Sets the phase model of every element.
    pub fn with_phase_bits(mut self, bits: u32) -> Self {
        for e in &mut self.element {
            e.phase_bits = bits;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_inclusive() {
        let g = Grid::parse("0:10:2.5").unwrap();
        assert_eq!(g.points(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert!(Grid::parse("5:0:1").is_err());
        assert!(Grid::parse("0:1").is_err());
    }

    #[test]
    fn parses_and_expands_elements() {
        let text = "[[element]]\nk1 = 2.0\nk2 = 1.0\nphase_bits = 2\ncount = 3\n\n[sweep]\ngamma0_db = \"0:20:5\"\n";
        let c = RunConfig::parse(text).unwrap();
        let r = c.ris_config().unwrap();
        assert_eq!(r.elements.len(), 3);
        assert_eq!(r.elements[2].phase, PhaseModel::Quantized { bits: 2 });
        assert_eq!(c.sweep.gamma0_db.points().len(), 5);
        assert_eq!(c.sweep.gamma_th_db, 6.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::parse("[sweep]\ngamma_th = 6\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("[budget]\nnoise = -74\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::parse("[[element]]\nk1 = -1\nk2 = 0\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
