//! Twin-run pathwise-uniqueness experiments.
//!
//! Two copies of the system are driven by the *same* noise path. Started
//! from identical data they must remain bitwise identical (the scheme is
//! deterministic given the increments). Started from slightly different
//! data, the entropy-type gap Φ(u₁,u₂) must dominate ¼|√u₁−√u₂|²_{L²} at
//! every step, and the terminal √-distance must vanish linearly with the
//! perturbation size — measured over a three-rung perturbation ladder.

use std::f64::consts::PI;
use std::time::Instant;

use sks_core::functionals::{gajewski_gap, sqrt_l2_distance};
use sks_core::{HandlePair, SimError, SpectralField, Stepper, SystemState};

use crate::defaults;
use crate::experiments::run_paths;
use crate::report::VerificationReport;
use crate::stats;

#[derive(Clone, Copy, Debug)]
pub struct TwinOptions {
    pub n_paths: usize,
    pub dt: f64,
    pub t_end: f64,
    pub master_seed: u64,
    pub path_base: u64,
    /// Relative size of the initial perturbation; 0 runs the bitwise check.
    pub perturbation: f64,
}

impl Default for TwinOptions {
    fn default() -> Self {
        TwinOptions {
            n_paths: 100,
            dt: defaults::DT,
            t_end: defaults::T_END,
            master_seed: defaults::MASTER_SEED,
            path_base: defaults::VERIFICATION_PATH_BASE,
            perturbation: 0.0,
        }
    }
}

struct TwinPathOutcome {
    max_coeff_diff: f64,
    terminal_sqrt_norm: f64,
    gaj_violations: usize,
    clip_confound_steps: usize,
}

/// `u₂₀ = u₁₀ (1 + p cos(2πx))` — a smooth multiplicative perturbation that
/// keeps the field nonnegative for p < 1.
fn perturbed(u0: &SpectralField, p: f64) -> SpectralField {
    let grid = u0.grid();
    let mut nodal = u0.to_nodal();
    for (x, val) in grid.nodes().iter().zip(nodal.iter_mut()) {
        *val *= 1.0 + p * (2.0 * PI * x).cos();
    }
    grid.to_coeffs(&nodal).expect("nodal buffer from this grid")
}

fn run_twin_path(opts: &TwinOptions, path: u64) -> Result<TwinPathOutcome, SimError> {
    let grid = defaults::grid();
    let params = defaults::full_params(opts.master_seed);
    let cfg = defaults::solver_config(opts.dt, opts.t_end);
    let (u0, v0) = defaults::twin_init(&grid);
    let u0_twin = if opts.perturbation == 0.0 {
        u0.clone()
    } else {
        perturbed(&u0, opts.perturbation)
    };

    let mut a = SystemState::new(u0, v0.clone())?;
    let mut b = SystemState::new(u0_twin, v0)?;
    let mut stepper = Stepper::new(&grid, &params, &cfg)?;
    let mut pair = HandlePair::make(
        defaults::w1_spec(opts.master_seed),
        defaults::w2_spec(opts.master_seed),
        &grid,
        path,
    )?;
    let m = grid.n_modes();
    let mut dw1 = vec![0.0; m];
    let mut dw2 = vec![0.0; m];

    let mut out = TwinPathOutcome {
        max_coeff_diff: 0.0,
        terminal_sqrt_norm: 0.0,
        gaj_violations: 0,
        clip_confound_steps: 0,
    };
    for _ in 0..cfg.n_steps() {
        pair.w1.sample_increment_into(cfg.dt, &mut dw1)?;
        pair.w2.sample_increment_into(cfg.dt, &mut dw2)?;
        let info_a = stepper.step(&mut a, &dw1, &dw2)?;
        let info_b = stepper.step(&mut b, &dw1, &dw2)?;
        if info_a.clipped_step != info_b.clipped_step {
            out.clip_confound_steps += 1;
        }
        for (x, y) in a.u.coeffs().iter().zip(b.u.coeffs()) {
            out.max_coeff_diff = out.max_coeff_diff.max((x - y).abs());
        }
        for (x, y) in a.v.coeffs().iter().zip(b.v.coeffs()) {
            out.max_coeff_diff = out.max_coeff_diff.max((x - y).abs());
        }
        if opts.perturbation != 0.0 {
            let gap = gajewski_gap(&a.u, &b.u)?;
            let dist = sqrt_l2_distance(&a.u, &b.u)?;
            if gap < 0.25 * dist - 1e-12 {
                out.gaj_violations += 1;
            }
        }
    }
    if opts.perturbation != 0.0 {
        out.terminal_sqrt_norm = sqrt_l2_distance(&a.u, &b.u)?.max(0.0).sqrt();
    }
    Ok(out)
}

/// Bitwise uniqueness under common noise: identical initial data must stay
/// identical to the last bit over the whole horizon.
pub fn twin_run_uniqueness(opts: &TwinOptions) -> Result<VerificationReport, SimError> {
    let start = Instant::now();
    let outcomes = run_paths(opts.n_paths, opts.path_base, |p| run_twin_path(opts, p))?;
    let max_diff = outcomes
        .iter()
        .map(|o| o.max_coeff_diff)
        .fold(0.0, f64::max);

    let mut report = VerificationReport::new("twin-bitwise-uniqueness");
    report.observed = max_diff;
    report.predicted = 0.0;
    report
        .detail("n_paths", opts.n_paths as f64)
        .detail("perturbation", opts.perturbation);
    report.pass = if opts.perturbation == 0.0 {
        max_diff == 0.0
    } else {
        max_diff > 0.0 // perturbed twins must actually separate
    };
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Perturbation ladder 10⁻³/10⁻⁴/10⁻⁵: terminal √-distance norms must
/// shrink roughly linearly (adjacent-rung ratios in [5, 20]), with the gap
/// inequality holding at every recorded step of every path.
pub fn twin_ladder(opts: &TwinOptions) -> Result<VerificationReport, SimError> {
    let start = Instant::now();
    let rungs = [1e-3, 1e-4, 1e-5];
    let mut mean_norms = Vec::with_capacity(rungs.len());
    let mut total_violations = 0usize;
    let mut total_confounds = 0usize;
    for &p in &rungs {
        let rung_opts = TwinOptions {
            perturbation: p,
            ..*opts
        };
        let outcomes = run_paths(opts.n_paths, opts.path_base, |path| {
            run_twin_path(&rung_opts, path)
        })?;
        let norms: Vec<f64> = outcomes.iter().map(|o| o.terminal_sqrt_norm).collect();
        total_violations += outcomes.iter().map(|o| o.gaj_violations).sum::<usize>();
        total_confounds += outcomes.iter().map(|o| o.clip_confound_steps).sum::<usize>();
        mean_norms.push(stats::mean(&norms));
    }
    let ratio_01 = mean_norms[0] / mean_norms[1];
    let ratio_12 = mean_norms[1] / mean_norms[2];

    let mut report = VerificationReport::new("twin-perturbation-ladder");
    report.observed = ratio_01;
    report.predicted = 10.0;
    report
        .detail("n_paths", opts.n_paths as f64)
        .detail("norm_at_1e-3", mean_norms[0])
        .detail("norm_at_1e-4", mean_norms[1])
        .detail("norm_at_1e-5", mean_norms[2])
        .detail("ratio_1e-3_to_1e-4", ratio_01)
        .detail("ratio_1e-4_to_1e-5", ratio_12)
        .detail("gap_inequality_violations", total_violations as f64)
        .detail("clip_confound_steps", total_confounds as f64);
    report.pass = (5.0..=20.0).contains(&ratio_01)
        && (5.0..=20.0).contains(&ratio_12)
        && total_violations == 0;
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
