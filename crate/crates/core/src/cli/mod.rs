//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 validation failure (bad flags, unreadable or
//! invalid configuration, misaligned grids).

pub mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::admissibility::{self, AdmissibilityReport, DeschSchappacherCheck, MiyaderaVoigtCheck};
use crate::asymptotics::{self, RobustnessReport};
use crate::error::{Error, Result};
use crate::maps::Realization;
use crate::neutral::{self, NeutralSystem};
use config::{MethodKind, RunConfig, System};
pub use output::cesaro_residuals;
use output::{csv, orbit_csv, write_json, write_text};

#[derive(Debug, Parser)]
#[command(name = "sw-semigroup", version, about = "Perturbed semigroup simulations and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perturbed orbit from the configured initial data
    Simulate(CommonArgs),
    /// Admissibility constants and condition verdicts
    Admissibility(CommonArgs),
    /// Asymptotic properties of base and perturbed orbits over the probe set
    Asymptotics(CommonArgs),
    /// Neutral system: perturbed orbit against the method-of-steps solution
    NeutralCompare(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodKind>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(h) = self.step {
            cfg.step = h;
        }
        if let Some(m) = self.method {
            cfg.method.kind = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    let (args, name) = match command {
        Command::Simulate(a) => (a, "simulate"),
        Command::Admissibility(a) => (a, "admissibility"),
        Command::Asymptotics(a) => (a, "asymptotics"),
        Command::NeutralCompare(a) => (a, "neutral-compare"),
    };
    let cfg = args.load()?;
    let system = cfg.system()?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let started = Instant::now();
    let result = match (command, &system) {
        (Command::Simulate(_), System::Neutral(sys)) | (Command::NeutralCompare(_), System::Neutral(sys)) => {
            neutral_compare(&cfg, sys, &args.out, name)
        }
        (Command::NeutralCompare(_), System::Plain(_)) => {
            Err(Error::Config("neutral-compare needs a neutral system".into()))
        }
        (Command::Simulate(_), System::Plain(_)) => simulate(&cfg, &system, &args.out),
        (Command::Admissibility(_), _) => admissibility(&cfg, &system, &args.out),
        (Command::Asymptotics(_), _) => asymptotics(&cfg, &system, &args.out),
    };
    let timing = json!({
        "command": name,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&args.out.join("timing.json"), &timing)?;
    result
}

#[derive(Serialize)]
struct Manifest<'a, S: Serialize> {
    command: &'a str,
    status: &'a str,
    error: Option<String>,
    seed: u64,
    horizon: f64,
    step: f64,
    output_step: f64,
    method: MethodKind,
    files: Vec<&'a str>,
    summary: Option<S>,
    config: &'a RunConfig,
}

fn manifest<'a, S: Serialize>(cfg: &'a RunConfig, command: &'a str) -> Manifest<'a, S> {
    Manifest {
        command,
        status: "ok",
        error: None,
        seed: cfg.seed,
        horizon: cfg.horizon,
        step: cfg.step,
        output_step: cfg.output_step(),
        method: cfg.method.kind,
        files: Vec::new(),
        summary: None,
        config: cfg,
    }
}

/// Writes a manifest flagged as failed before passing the error on.
fn fail<S: Serialize>(out: &Path, mut m: Manifest<'_, S>, e: Error) -> Result<()> {
    m.status = "failed";
    m.error = Some(e.to_string());
    write_json(&out.join("manifest.json"), &m)?;
    Err(e)
}

#[derive(Serialize)]
struct SimulateSummary {
    truncated_mass: f64,
    final_norm: f64,
    max_norm: f64,
}

fn simulate(cfg: &RunConfig, system: &System, out: &Path) -> Result<()> {
    let triple = system.triple()?;
    let r = Realization::new(&triple, cfg.step)?;
    let x0 = cfg.initial_state(&triple)?;
    let grid = cfg.output_grid()?;
    let mut m = manifest::<SimulateSummary>(cfg, "simulate");
    let orbit = match r.perturbed_orbit_formula(&x0, &grid, cfg.method.inversion()) {
        Ok(o) => o,
        Err(e) => return fail(out, m, e),
    };
    write_text(&out.join("orbit.csv"), &orbit_csv(&orbit))?;
    m.files = vec!["orbit.csv"];
    m.summary = Some(SimulateSummary {
        truncated_mass: orbit.truncated_mass,
        final_norm: orbit.norms.last().copied().unwrap_or(0.0),
        max_norm: orbit.sup_norm(),
    });
    write_json(&out.join("manifest.json"), &m)
}

#[derive(Serialize)]
struct NeutralSummary {
    max_deviation: f64,
    final_deviation: f64,
    compatibility_residual: f64,
    compatible: bool,
    initial_domain_residual: f64,
    max_domain_residual: f64,
    history_cells: usize,
}

fn neutral_compare(cfg: &RunConfig, sys: &NeutralSystem<f64>, out: &Path, command: &str) -> Result<()> {
    let (y, f) = cfg.neutral_initial(sys)?;
    let grid = cfg.output_grid()?;
    let mut m = manifest::<NeutralSummary>(cfg, command);
    let run = || -> Result<_> {
        let formula = neutral::neutral_orbit_formula(sys, &y, &f, &grid, cfg.method.inversion())?;
        let stepwise = neutral::neutral_orbit(sys, &y, &f, &grid)?;
        let oracle = neutral::method_of_steps(sys, &y, &f, &grid)?;
        Ok((formula, stepwise, oracle))
    };
    let (formula, stepwise, oracle) = match run() {
        Ok(v) => v,
        Err(e) => return fail(out, m, e),
    };
    let deviations: Vec<f64> = formula
        .states
        .iter()
        .zip(&oracle.orbit.states)
        .map(|(a, b)| a.max_abs_diff(b))
        .collect::<Result<_>>()?;
    write_text(&out.join("orbit_formula.csv"), &orbit_csv(&formula))?;
    write_text(&out.join("orbit_oracle.csv"), &orbit_csv(&oracle.orbit))?;
    let header = ["t", "deviation", "domain_residual"].map(String::from);
    let rows = deviations
        .iter()
        .zip(&stepwise.domain_residuals)
        .enumerate()
        .map(|(k, (d, r))| vec![grid.point(k), *d, *r]);
    write_text(&out.join("deviation.csv"), &csv(&header, rows))?;
    m.files = vec!["orbit_formula.csv", "orbit_oracle.csv", "deviation.csv"];
    let res = &stepwise.domain_residuals;
    m.summary = Some(NeutralSummary {
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        final_deviation: deviations.last().copied().unwrap_or(0.0),
        compatibility_residual: stepwise.compatibility_residual,
        compatible: stepwise.compatible,
        initial_domain_residual: res.first().copied().unwrap_or(0.0),
        max_domain_residual: res.iter().copied().fold(0.0, f64::max),
        history_cells: sys.cells,
    });
    write_json(&out.join("manifest.json"), &m)
}

#[derive(Serialize)]
struct AdmissibilityOutput<'a> {
    seed: u64,
    constants: AdmissibilityReport<f64>,
    miyadera_voigt: Option<MiyaderaVoigtCheck<f64>>,
    desch_schappacher: Option<DeschSchappacherCheck<f64>>,
    config: &'a RunConfig,
}

fn admissibility(cfg: &RunConfig, system: &System, out: &Path) -> Result<()> {
    let triple = system.triple()?;
    let probes = cfg.probes(&triple.base)?;
    let r = Realization::new(&triple, cfg.step)?;
    let k = r.steps(cfg.horizon)?;
    let signals = admissibility::random_signals(&r, k, cfg.admissibility.signals, cfg.seed)?;
    let constants = admissibility::estimate_constants(&triple, cfg.step, &probes, &signals, cfg.horizon)?;
    let miyadera_voigt = cfg
        .admissibility
        .miyadera_voigt_q
        .map(|q| admissibility::check_miyadera_voigt(&triple, cfg.step, &probes, cfg.horizon, q))
        .transpose()?;
    let desch_schappacher = cfg
        .admissibility
        .desch_schappacher
        .as_ref()
        .map(|d| admissibility::check_desch_schappacher(&triple, cfg.step, &probes, d.omega, d.m, cfg.horizon, d.terms))
        .transpose()?;
    let report = AdmissibilityOutput {
        seed: cfg.seed,
        constants,
        miyadera_voigt,
        desch_schappacher,
        config: cfg,
    };
    write_json(&out.join("admissibility_report.json"), &report)
}

#[derive(Serialize)]
struct AsymptoticsOutput<'a> {
    schema_version: u32,
    seed: u64,
    horizon: f64,
    output_step: f64,
    probes: usize,
    /// every property is robust on every probe
    robust: bool,
    properties: Vec<RobustnessReport<f64>>,
    config: &'a RunConfig,
}

fn asymptotics(cfg: &RunConfig, system: &System, out: &Path) -> Result<()> {
    let triple = system.triple()?;
    let probes = cfg.probes(&triple.base)?;
    let properties = cfg.asymptotics.properties()?;
    let checker = cfg.asymptotics.checker();
    let grid = cfg.output_grid()?;
    let functionals = asymptotics::default_functionals(triple.base.state_dim(), cfg.asymptotics.functionals, cfg.seed);
    let reports = properties
        .iter()
        .map(|p| {
            asymptotics::robustness_experiment(
                &triple,
                cfg.step,
                *p,
                &probes,
                &grid,
                &functionals,
                &checker,
                cfg.asymptotics.policy(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let r = Realization::new(&triple, cfg.step)?;
    let mut rows = Vec::new();
    for (i, x) in probes.iter().enumerate() {
        let base = triple.base.orbit(x, &grid)?;
        let pert = r.perturbed_orbit(x, &grid)?;
        let ces = cesaro_residuals(&pert)?;
        for (k, ((b, p), c)) in base.norms.iter().zip(&pert.norms).zip(&ces).enumerate() {
            rows.push(vec![i as f64, grid.point(k), *b, *p, *c]);
        }
    }
    let header = ["probe", "t", "base_norm", "perturbed_norm", "cesaro_residual"].map(String::from);
    write_text(&out.join("plot_data.csv"), &csv(&header, rows))?;

    let report = AsymptoticsOutput {
        schema_version: admissibility::REPORT_SCHEMA_VERSION,
        seed: cfg.seed,
        horizon: cfg.horizon,
        output_step: cfg.output_step(),
        probes: probes.len(),
        robust: reports.iter().all(|r| r.robust),
        properties: reports,
        config: cfg,
    };
    write_json(&out.join("asymptotics_report.json"), &report)
}
