use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use foxh::config::{Grid, RunConfig};
use foxh::mc::{simulate_z, Queries};
use foxh::output::{cell, write_table, Manifest, Table};
use foxh::ris::{
    db_to_linear, ergodic_capacity, outage_probability, product_descriptor, ris_sum_descriptors,
    snr_moment, validate_descriptors, RisConfig,
};
use foxh::sum::{mgf_descriptor, sum_cdf_descriptor, sum_pdf_descriptor, SumComponent};
use foxh::textfmt::{density_to_text, parse_density};
use foxh::{evaluate, families, plan_for_density, Density, Error, PlanOptions};

use crate::{Cli, Command, Common};

#[derive(Debug)]
pub struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    fn numeric(msg: impl Into<String>) -> Self {
        Failure {
            code: 3,
            msg: msg.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse { .. } => Failure::config(e.to_string()),
            _ => Failure::numeric(e.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

/// Loads the config file (or the built-in default) and applies flag overrides.
fn resolve(c: &Common) -> Outcome<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = c.elements {
        cfg = cfg.with_elements(n)?;
    }
    if c.ideal_phase {
        cfg = cfg.with_phase_bits(0);
    }
    if let Some(b) = c.phase_bits {
        cfg = cfg.with_phase_bits(b);
    }
    if let Some(s) = c.seed {
        cfg.simulation.seed = s;
    }
    if let Some(t) = c.trials {
        cfg.simulation.trials = t;
    }
    if let Some(t) = c.tolerance {
        cfg.numerics.tolerance = t;
    }
    if let Some(q) = c.qmc_samples {
        cfg.numerics.qmc_samples = Some(q);
    }
    if let Some(g) = c.gamma_th_db {
        cfg.sweep.gamma_th_db = g;
    }
    if let Some(r) = &c.gamma0_db_range {
        cfg.sweep.gamma0_db = Grid::parse(r)?;
    }
    cfg.check()?;
    Ok(cfg)
}

struct Context<'a> {
    cli: &'a Cli,
    cfg: RunConfig,
    options: PlanOptions,
}

impl Context<'_> {
    fn ris(&self) -> Outcome<RisConfig> {
        Ok(self.cfg.ris_config()?)
    }

    fn manifest(&self, stochastic: bool) -> Manifest {
        Manifest {
            command: std::env::args().collect::<Vec<_>>().join(" "),
            config_path: self
                .cli
                .common
                .config
                .as_ref()
                .map(|p| p.display().to_string()),
            parameters: self.cfg.to_toml(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed: stochastic.then_some(self.cfg.simulation.seed),
            trials: stochastic.then_some(self.cfg.simulation.trials),
        }
    }

    fn emit(&self, table: &Table, stochastic: bool) -> Outcome {
        let m = self.manifest(stochastic);
        let res = match &self.cli.common.out {
            Some(p) => {
                let f = File::create(p)
                    .map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                write_table(BufWriter::new(f), &m, table)
            }
            None => write_table(io::stdout().lock(), &m, table),
        };
        res.map_err(|e| Failure::numeric(format!("writing output: {e}")))
    }

    fn grid(&self) -> Vec<f64> {
        self.cfg.sweep.gamma0_db.points()
    }
}

fn demo_components(name: &str) -> Outcome<Vec<SumComponent>> {
    match name {
        "gamma2x2" => {
            let c = SumComponent::new(families::gamma(2.0, 1.0)?)?;
            Ok(vec![c.clone(), c])
        }
        "exp" => Ok(vec![SumComponent::new(families::exponential(1.0)?)?]),
        other => Err(Failure::config(format!(
            "unknown demo `{other}` (known: gamma2x2, exp)"
        ))),
    }
}

fn surface_components(ctx: &Context) -> Outcome<Vec<SumComponent>> {
    Ok(ris_sum_descriptors(&ctx.ris()?)?.components)
}

fn components(ctx: &Context, demo: &Option<String>) -> Outcome<Vec<SumComponent>> {
    match demo {
        Some(d) => demo_components(d),
        None => surface_components(ctx),
    }
}

fn x_table(ctx: &Context, density: &Density, xs: &[f64], method: &str) -> Outcome<Table> {
    let plan = plan_for_density(density, &ctx.options)?;
    let mut t = Table::new(["x", "value", "err_estimate", "method"]);
    for &x in xs {
        let r = evaluate(density, x, &plan)
            .map_err(|e| Failure::numeric(format!("at x = {x}: {e}")))?;
        t.push(vec![
            x.to_string(),
            cell(Some(r.value)),
            cell(Some(r.abs_error_estimate)),
            method.into(),
        ]);
    }
    Ok(t)
}

/// Writes the table, then reports the first failed grid point if any.
fn finish(ctx: &Context, table: &Table, stochastic: bool, failures: Vec<String>) -> Outcome {
    ctx.emit(table, stochastic)?;
    match failures.first() {
        None => Ok(()),
        Some(_) => Err(Failure::numeric(failures.join("; "))),
    }
}

fn outage(ctx: &Context, with_mc: bool) -> Outcome {
    let ris = ctx.ris()?;
    let grid = ctx.grid();
    let th = ctx.cfg.sweep.gamma_th_db;
    let rows = outage_probability(&ris, th, &grid, &ctx.options)?;
    let mc = if with_mc {
        let plan = ctx.cfg.sim_plan()?;
        Some(foxh::mc::empirical_outage(&ris, &plan, th, &grid)?)
    } else {
        None
    };
    let mut t = Table::new([
        "gamma0_dB",
        "value",
        "err_estimate",
        "method",
        "asymptotic",
        "mc_value",
        "mc_lo",
        "mc_hi",
    ]);
    let mut failures = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some(e) = &r.error {
            failures.push(format!("outage at γ₀ = {} dB: {e}", r.gamma0_db));
        }
        let m = mc.as_ref().map(|m| m[i]);
        t.push(vec![
            r.gamma0_db.to_string(),
            cell(r.exact),
            cell(r.err_estimate),
            if r.error.is_some() { "failed" } else { "exact" }.into(),
            cell(r.asymptotic),
            cell(m.map(|m| m.value)),
            cell(m.map(|m| m.lo)),
            cell(m.map(|m| m.hi)),
        ]);
    }
    finish(ctx, &t, with_mc, failures)
}

fn capacity_rows(ctx: &Context, t: &mut Table, failures: &mut Vec<String>) -> Outcome {
    let ris = ctx.ris()?;
    for g in ctx.grid() {
        match ergodic_capacity(&ris, g, &ctx.options, ctx.cfg.numerics.tolerance) {
            Ok(c) => {
                if c.warning {
                    eprintln!(
                        "foxh: warning: capacity at γ₀ = {g} dB has error estimate {:.2e}",
                        c.err_estimate
                    );
                }
                t.push(vec![
                    g.to_string(),
                    cell(Some(c.value)),
                    cell(Some(c.err_estimate)),
                    format!("capacity-{}", c.method.as_str()),
                ]);
            }
            Err(e) => {
                failures.push(format!("capacity at γ₀ = {g} dB: {e}"));
                t.push(vec![
                    g.to_string(),
                    String::new(),
                    String::new(),
                    "capacity-failed".into(),
                ]);
            }
        }
    }
    Ok(())
}

fn capacity(ctx: &Context) -> Outcome {
    let mut t = Table::new(["gamma0_dB", "value", "err_estimate", "method"]);
    let mut failures = Vec::new();
    capacity_rows(ctx, &mut t, &mut failures)?;
    finish(ctx, &t, false, failures)
}

fn moment(ctx: &Context, n: u32) -> Outcome {
    let ris = ctx.ris()?;
    let mut t = Table::new(["gamma0_dB", "value", "err_estimate", "method"]);
    let mut failures = Vec::new();
    for g in ctx.grid() {
        match snr_moment(&ris, n, db_to_linear(g), &ctx.options) {
            Ok(r) => t.push(vec![
                g.to_string(),
                cell(Some(r.value)),
                cell(Some(r.abs_error_estimate)),
                format!("moment-{n}"),
            ]),
            Err(Error::Domain(m)) => return Err(Failure::config(m)),
            Err(e) => {
                failures.push(format!("moment at γ₀ = {g} dB: {e}"));
                t.push(vec![
                    g.to_string(),
                    String::new(),
                    String::new(),
                    "moment-failed".into(),
                ]);
            }
        }
    }
    finish(ctx, &t, false, failures)
}

fn simulate(ctx: &Context) -> Outcome {
    let ris = ctx.ris()?;
    let grid = ctx.grid();
    let th = db_to_linear(ctx.cfg.sweep.gamma_th_db);
    let xs: Vec<f64> = grid
        .iter()
        .map(|&g| (th / db_to_linear(g)).sqrt())
        .collect();
    let mut cdf_at = xs.clone();
    cdf_at.extend(xs.iter().map(|x| -x));
    let q = Queries {
        cdf_at,
        capacity_gamma0: grid.iter().map(|&g| db_to_linear(g)).collect(),
        max_moment: 0,
    };
    let sim = simulate_z(&ris, &ctx.cfg.sim_plan()?, &q)?;
    let n = grid.len();
    let mut t = Table::new(["gamma0_dB", "value", "err_estimate", "method", "lo", "hi"]);
    for (i, g) in grid.iter().enumerate() {
        // P(|Z| ≤ x) from the two one-sided counts
        let p = sim.cdf[i].value - sim.cdf[n + i].value;
        let se = (p * (1.0 - p) / sim.trials as f64).sqrt();
        let z = foxh::mc::Z95;
        t.push(vec![
            g.to_string(),
            cell(Some(p)),
            cell(Some(se)),
            "mc-outage".into(),
            cell(Some(p - z * se)),
            cell(Some(p + z * se)),
        ]);
        let c = sim.capacity[i];
        t.push(vec![
            g.to_string(),
            cell(Some(c.value)),
            cell(Some(c.std_error)),
            "mc-capacity".into(),
            cell(Some(c.lo)),
            cell(Some(c.hi)),
        ]);
    }
    finish(ctx, &t, true, Vec::new())
}

fn sweep(ctx: &Context) -> Outcome {
    let ris = ctx.ris()?;
    let rows = outage_probability(&ris, ctx.cfg.sweep.gamma_th_db, &ctx.grid(), &ctx.options)?;
    let mut t = Table::new(["gamma0_dB", "value", "err_estimate", "method"]);
    let mut failures = Vec::new();
    for r in &rows {
        match &r.error {
            Some(e) => failures.push(format!("outage at γ₀ = {} dB: {e}", r.gamma0_db)),
            None => t.push(vec![
                r.gamma0_db.to_string(),
                cell(r.exact),
                cell(r.err_estimate),
                "outage-exact".into(),
            ]),
        }
        if r.asymptotic.is_some() {
            t.push(vec![
                r.gamma0_db.to_string(),
                cell(r.asymptotic),
                String::new(),
                "outage-asymptotic".into(),
            ]);
        }
    }
    capacity_rows(ctx, &mut t, &mut failures)?;
    finish(ctx, &t, false, failures)
}

fn dump(ctx: &Context, cdf: bool, check: bool) -> Outcome {
    let ris = ctx.ris()?;
    let text = if ris.elements.len() == 1 && !cdf {
        let e = ris.elements[0];
        density_to_text(&product_descriptor(&e.hop1, &e.hop2, e.phase)?.density)
    } else {
        let s = ris_sum_descriptors(&ris)?;
        density_to_text(if cdf { &s.cdf } else { &s.pdf })
    };
    if check {
        let back: Density = parse_density(&text)?;
        if density_to_text(&back) != text {
            return Err(Failure::numeric(
                "descriptor text does not round-trip byte-identically",
            ));
        }
    }
    let mut body = String::new();
    for l in ctx.manifest(false).lines() {
        body.push_str(&l);
        body.push('\n');
    }
    body.push_str(&text);
    match &ctx.cli.common.out {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| Failure::config(format!("{}: {e}", p.display())))
        }
        None => io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::numeric(e.to_string())),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let cfg = resolve(&cli.common)?;
    let options = cfg.plan_options();
    let ctx = Context { cli, cfg, options };
    if cli.common.validate {
        validate_descriptors(&ctx.ris()?, &ctx.options)
            .map_err(|e| Failure::numeric(format!("validation failed: {e}")))?;
    }
    match &cli.command {
        Command::EvalFoxh {
            descriptor,
            demo,
            x,
        } => {
            let d = match (descriptor, demo) {
                (Some(p), _) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                    parse_density(&text)?
                }
                (None, Some(name)) => sum_pdf_descriptor(&demo_components(name)?)?,
                (None, None) => product_descriptor_of_first(&ctx)?,
            };
            let t = x_table(&ctx, &d, x, "foxh")?;
            ctx.emit(&t, false)
        }
        Command::SumPdf { demo, x } => {
            let d = sum_pdf_descriptor(&components(&ctx, demo)?)?;
            let t = x_table(&ctx, &d, x, "sum-pdf")?;
            ctx.emit(&t, false)
        }
        Command::SumCdf { demo, x } => {
            let d = sum_cdf_descriptor(&components(&ctx, demo)?)?;
            let t = x_table(&ctx, &d, x, "sum-cdf")?;
            ctx.emit(&t, false)
        }
        Command::Mgf { demo, t: ts } => {
            let c = components(&ctx, demo)?.remove(0);
            let m = mgf_descriptor(&c, &ctx.options)?;
            let mut t = Table::new(["t", "value", "err_estimate", "method"]);
            for &s in ts {
                let r = m
                    .at(s)
                    .map_err(|e| Failure::numeric(format!("at t = {s}: {e}")))?;
                t.push(vec![
                    s.to_string(),
                    cell(Some(r.value)),
                    cell(Some(r.abs_error_estimate)),
                    "mgf".into(),
                ]);
            }
            ctx.emit(&t, false)
        }
        Command::Outage { with_mc } => outage(&ctx, *with_mc),
        Command::Capacity => capacity(&ctx),
        Command::Moment { n } => moment(&ctx, *n),
        Command::Simulate => simulate(&ctx),
        Command::Sweep => sweep(&ctx),
        Command::DumpDescriptor { cdf, check } => dump(&ctx, *cdf, *check),
    }
}

fn product_descriptor_of_first(ctx: &Context) -> Outcome<Density> {
    let e = ctx.ris()?.elements[0];
    Ok(product_descriptor(&e.hop1, &e.hop2, e.phase)?.density)
}
