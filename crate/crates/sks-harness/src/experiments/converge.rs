//! Strong self-convergence study on nested Brownian increments.
//!
//! Each path draws its increments once at the finest step; coarser runs use
//! the pairwise-summed increments of the *same* Brownian path, so the
//! errors `e(dt) = E|u_dt(T) − u_ref(T)|_{L²}` measure pure time-stepping
//! error. The scheme's strong order for multiplicative noise is between ½
//! and 1; the check asserts monotone error decay and a log-log slope in
//! [0.3, 1.1].

use std::time::Instant;

use sks_core::{simulate, make_common_path, PrecomputedIncrements, SimError};

use crate::defaults;
use crate::experiments::run_paths;
use crate::report::VerificationReport;
use crate::stats;

#[derive(Clone, Copy, Debug)]
pub struct ConvergeOptions {
    pub n_paths: usize,
    pub t_end: f64,
    /// log2 of the number of reference steps (finest rung), e.g. 10 → dt_ref
    /// = T/1024.
    pub finest_level: u32,
    /// Coarse rungs measured against the reference: levels
    /// `coarsest_level..finest_level`, e.g. 6 → first rung dt = T/64.
    pub coarsest_level: u32,
    pub master_seed: u64,
    pub path_base: u64,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        ConvergeOptions {
            n_paths: 200,
            t_end: defaults::T_END,
            finest_level: 10,
            coarsest_level: 6,
            master_seed: defaults::MASTER_SEED,
            path_base: defaults::VERIFICATION_PATH_BASE,
        }
    }
}

/// Per-path terminal L² differences at each coarse rung (coarsest first).
///
/// Runs the guard-silent coupled configuration (see
/// [`defaults::twin_init`]): positivity clips are O(1) discontinuous
/// responses to the step size, so a configuration that clips at some rungs
/// and not others has no strong order to measure.
fn path_errors(opts: &ConvergeOptions, path: u64) -> Result<Vec<f64>, SimError> {
    let grid = defaults::grid();
    let params = defaults::full_params(opts.master_seed);
    let (u0, v0) = defaults::twin_init(&grid);

    let n_ref = 1usize << opts.finest_level;
    let dt_ref = opts.t_end / n_ref as f64;
    let mut w1 = make_common_path(defaults::w1_spec(opts.master_seed), &grid, path)?;
    let mut w2 = make_common_path(defaults::w2_spec(opts.master_seed), &grid, path)?;
    let mut increments = PrecomputedIncrements::sample(&mut w1, &mut w2, dt_ref, n_ref)?;

    let run = |inc: &mut PrecomputedIncrements| -> Result<Vec<f64>, SimError> {
        let cfg = sks_core::SolverConfig {
            dt: inc.dt(),
            t_end: opts.t_end,
            positivity: sks_core::Positivity::Clip,
            // only the terminal state matters here
            record_every: inc.n_steps(),
        };
        inc.rewind();
        let traj = simulate(&u0, &v0, &params, &cfg, inc)?;
        Ok(traj.final_state.u.coeffs().to_vec())
    };

    let reference = run(&mut increments)?;

    // coarsen from the finest level down to the coarsest, collecting rungs
    let mut rungs = Vec::new(); // (dt, terminal u)
    let mut current = increments;
    for _level in (opts.coarsest_level..opts.finest_level).rev() {
        current = current.coarsen()?;
        rungs.push(run(&mut current)?);
    }
    rungs.reverse(); // coarsest first

    Ok(rungs
        .iter()
        .map(|u| {
            u.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

pub fn strong_convergence_study(opts: &ConvergeOptions) -> Result<VerificationReport, SimError> {
    let start = Instant::now();
    assert!(
        opts.coarsest_level < opts.finest_level,
        "dt ladder needs at least one coarse rung below the reference"
    );
    let per_path = run_paths(opts.n_paths, opts.path_base, |p| path_errors(opts, p))?;

    let n_rungs = (opts.finest_level - opts.coarsest_level) as usize;
    let mut errors = vec![0.0; n_rungs];
    for path in &per_path {
        for (e, &x) in errors.iter_mut().zip(path) {
            *e += x / opts.n_paths as f64;
        }
    }
    let dts: Vec<f64> = (0..n_rungs)
        .map(|i| opts.t_end / (1u64 << (opts.coarsest_level + i as u32)) as f64)
        .collect();

    let monotone = errors.windows(2).all(|w| w[0] > w[1]);
    let log_dt: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let log_err: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (slope, _) = stats::linear_fit(&log_dt, &log_err);

    let mut report = VerificationReport::new("strong-convergence");
    report.observed = slope;
    report.predicted = 0.5;
    report.detail("n_paths", opts.n_paths as f64);
    for (dt, e) in dts.iter().zip(&errors) {
        report.detail(&format!("error_at_dt_{dt:.6e}"), *e);
    }
    report.pass = monotone && (0.3..=1.1).contains(&slope);
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
