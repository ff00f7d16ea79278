//! `sks` — command-line surface for the stochastic chemotaxis solver.
//!
//! Subcommands either run a single trajectory (`simulate`), print the noise
//! spectrum (`noise-info`), or execute one of the Monte Carlo verification
//! experiments. Every run writes its artifacts plus a `manifest.json`
//! (config echo, seed, SHA-256 artifact hashes, wall time) into the output
//! directory and nothing anywhere else.
//!
//! Exit status: 0 when every check passes, 2 when a verification check
//! fails, 1 on configuration or runtime errors.
//!
//! Parallelism: experiments fan paths out across a thread pool sized by the
//! `SKS_THREADS` environment variable (default: available cores); scientific
//! outputs are byte-identical regardless of the thread count.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use sks_core::{simulate, Grid, HandlePair, SimError};
use sks_harness::{
    chi_independence, frozen, heat_control_check, mc_energy_bound, mc_l1_moment_bound,
    mc_mass_identity, stopping_time_survey, strong_convergence_study, twin_ladder,
    twin_run_uniqueness, ConvergeOptions, EnergyOptions, MassOptions, MomentOptions,
    StoppingOptions, TwinOptions, VerificationReport,
};

use config::{ExperimentKind, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "sks",
    version,
    about = "Pseudo-spectral solver and Monte Carlo verification harness \
             for a 1D stochastic chemotaxis system"
)]
struct Cli {
    /// TOML configuration file (omit to run the documented defaults).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Output directory override (default: sks-out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Monte Carlo path-count override (per half for `stopping`).
    #[arg(long, global = true, value_name = "N")]
    paths: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Run a single trajectory and write its diagnostics as CSV.
    Simulate,
    /// Check the per-step mass identity and the χ-independence of mass.
    VerifyMass,
    /// Check the frozen moment-envelope bound on E[sup I(u)²].
    VerifyMoments,
    /// Check finiteness/monotonicity of the energy quantities and the
    /// noise-free heat-decay control.
    VerifyEnergy,
    /// Twin runs under common noise: bitwise uniqueness, and (at
    /// perturbation 0) the perturbation-decay ladder.
    Twin,
    /// Survey threshold-crossing probabilities against the fitted 1/N tail.
    Stopping,
    /// Strong self-convergence study over a nested-noise dt ladder.
    Converge,
    /// Print the noise spectrum (λ_k table, growth constants, HS norms).
    NoiseInfo,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Simulate => ExperimentKind::Simulate,
            Command::VerifyMass => ExperimentKind::VerifyMass,
            Command::VerifyMoments => ExperimentKind::VerifyMoments,
            Command::VerifyEnergy => ExperimentKind::VerifyEnergy,
            Command::Twin => ExperimentKind::Twin,
            Command::Stopping => ExperimentKind::Stopping,
            Command::Converge => ExperimentKind::Converge,
            Command::NoiseInfo => ExperimentKind::NoiseInfo,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version exit 0; usage errors are runtime errors (1),
            // keeping exit code 2 exclusively for verification failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_thread_pool()?;
    if cli.paths == Some(0) {
        bail!("--paths 0: at least one path is required");
    }
    let cfg = config::load(
        cli.config.as_deref(),
        cli.command.kind(),
        &Overrides {
            seed: cli.seed,
            out: cli.out,
            paths: cli.paths,
        },
    )?;

    let started = Instant::now();
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut files: Vec<(String, String)> = Vec::new();
    let run_err = dispatch(&cfg, &mut reports, &mut files).err();

    for r in &reports {
        println!("{}", r.summary_line());
    }
    output::write_run(
        &cfg.output_dir,
        cfg.kind.name(),
        cfg.seed,
        cfg.echo(),
        &reports,
        &files,
        started.elapsed().as_secs_f64(),
    )?;

    if let Some(err) = run_err {
        return Err(err);
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!(
            "verification failed: {failed} of {} check(s); see {}",
            reports.len(),
            cfg.output_dir.join("reports.ndjson").display()
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

/// Sizes the global thread pool from `SKS_THREADS` (default: all cores).
fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("SKS_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| anyhow!("SKS_THREADS = {raw:?}: must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("building the global thread pool")?;
    }
    Ok(())
}

fn dispatch(
    cfg: &RunConfig,
    reports: &mut Vec<VerificationReport>,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    match cfg.kind {
        ExperimentKind::Simulate => run_simulate(cfg, files),
        ExperimentKind::VerifyMass => {
            let opts = MassOptions {
                n_paths: cfg.n_paths,
                dt: cfg.solver.dt,
                t_end: cfg.solver.t_end,
                master_seed: cfg.seed,
                path_base: cfg.path_base,
                chi: cfg.mass_chi,
            };
            reports.push(mc_mass_identity(&opts)?);
            reports.push(chi_independence(&opts)?);
            Ok(())
        }
        ExperimentKind::VerifyMoments => {
            let opts = MomentOptions {
                n_paths: cfg.n_paths,
                dt: cfg.solver.dt,
                t_end: cfg.solver.t_end,
                p_moment: 2.0,
                master_seed: cfg.seed,
                path_base: cfg.path_base,
            };
            reports.push(mc_l1_moment_bound(&opts, frozen::MOMENT_C2)?);
            Ok(())
        }
        ExperimentKind::VerifyEnergy => {
            let opts = EnergyOptions {
                n_paths: cfg.n_paths,
                dt: cfg.solver.dt,
                t_end: cfg.solver.t_end,
                master_seed: cfg.seed,
            };
            reports.push(mc_energy_bound(&opts)?);
            reports.push(heat_control_check(&opts)?);
            Ok(())
        }
        ExperimentKind::Twin => {
            let opts = TwinOptions {
                n_paths: cfg.n_paths,
                dt: cfg.solver.dt,
                t_end: cfg.solver.t_end,
                master_seed: cfg.seed,
                path_base: cfg.path_base,
                perturbation: cfg.perturbation,
            };
            reports.push(twin_run_uniqueness(&opts)?);
            if cfg.perturbation == 0.0 {
                reports.push(twin_ladder(&opts)?);
            }
            Ok(())
        }
        ExperimentKind::Stopping => {
            let opts = StoppingOptions {
                n_paths: cfg.n_paths,
                dt: cfg.solver.dt,
                t_end: cfg.solver.t_end,
                master_seed: cfg.seed,
                threshold_multipliers: cfg.threshold_multipliers.clone(),
            };
            reports.push(stopping_time_survey(&opts)?);
            Ok(())
        }
        ExperimentKind::Converge => {
            let opts = ConvergeOptions {
                n_paths: cfg.n_paths,
                t_end: cfg.solver.t_end,
                finest_level: cfg.finest_level,
                coarsest_level: cfg.coarsest_level,
                master_seed: cfg.seed,
                path_base: cfg.path_base,
            };
            reports.push(strong_convergence_study(&opts)?);
            Ok(())
        }
        ExperimentKind::NoiseInfo => {
            let text = cfg.noise_info_text();
            print!("{text}");
            files.push(("noise_info.txt".to_string(), text));
            Ok(())
        }
    }
}

fn run_simulate(cfg: &RunConfig, files: &mut Vec<(String, String)>) -> Result<()> {
    let grid = Grid::new(cfg.grid_spec).context("config section [grid]")?;
    let u0 = cfg.init_u.build(&grid).context("config key init.u")?;
    let v0 = cfg.init_v.build(&grid).context("config key init.v")?;
    let mut noise =
        HandlePair::make(cfg.w1, cfg.w2, &grid, cfg.path_index).context("noise setup")?;
    match simulate(&u0, &v0, &cfg.params, &cfg.solver, &mut noise) {
        Ok(traj) => {
            files.push(("trajectory.csv".to_string(), output::render_csv(&traj.records)));
            let last = traj
                .records
                .last()
                .expect("a completed trajectory records its final state");
            println!(
                "simulate: path {} for {} steps to t = {}",
                cfg.path_index, traj.n_steps, last.t
            );
            println!(
                "final: mass = {}, |u|_L2 = {}, cumulative clipped mass = {}",
                last.mass, last.l2_u, last.clipped_mass
            );
            println!(
                "sup_t |u|_L2 = {}, max mass-identity residual = {:e}",
                traj.sup_l2_u, traj.max_mass_residual
            );
            Ok(())
        }
        Err(SimError::BlowUp { t, step, partial }) => {
            files.push((
                "trajectory.csv".to_string(),
                output::render_csv(&partial.records),
            ));
            Err(anyhow!(
                "solution blew up at t = {t} (step {step}); \
                 partial trajectory written up to the last finite state"
            ))
        }
        Err(e) => Err(e.into()),
    }
}
