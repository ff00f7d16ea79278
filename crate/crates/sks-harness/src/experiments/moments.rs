//! Second-moment bound on the running supremum of the mass.
//!
//! The continuous estimate bounds `E[sup_{s≤T} I(u(s))^p]` by
//! `E[I(u₀)^p] · exp((γp + C_p γ^{p/2}/2) T^p)` with an unspecified
//! constant `C_p`. The harness turns it into a regression check with the
//! calibrate–freeze–verify protocol: `C₂` was fitted once on the
//! calibration path block ([`fit_moment_constant`]) and frozen
//! ([`crate::frozen::MOMENT_C2`]); this experiment evaluates the frozen
//! envelope on disjoint verification paths at two horizons and additionally
//! requires the sup-moment to be finite and nondecreasing in `T`.

use std::time::Instant;

use sks_core::{simulate, HandlePair, SimError};

use crate::defaults;
use crate::experiments::{horizon_index, run_paths};
use crate::report::VerificationReport;
use crate::stats;

#[derive(Clone, Copy, Debug)]
pub struct MomentOptions {
    pub n_paths: usize,
    pub dt: f64,
    /// Long horizon; the short horizon is half of it.
    pub t_end: f64,
    pub p_moment: f64,
    pub master_seed: u64,
    pub path_base: u64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            n_paths: 1000,
            dt: defaults::DT,
            t_end: defaults::T_END,
            p_moment: 2.0,
            master_seed: defaults::MASTER_SEED,
            path_base: defaults::VERIFICATION_PATH_BASE,
        }
    }
}

/// Per-path running sup of the mass at the half horizon and the full
/// horizon (mass is nonnegative under the guard, so `sup(I^p) = (sup I)^p`).
fn sup_mass_at_horizons(opts: &MomentOptions, path: u64) -> Result<(f64, f64), SimError> {
    let grid = defaults::grid();
    let params = defaults::quiet_params(0.0, opts.master_seed);
    let cfg = defaults::solver_config(opts.dt, opts.t_end);
    let (u0, v0) = defaults::quiet_init(&grid);
    let mut noise = HandlePair::make(
        defaults::w1_spec(opts.master_seed),
        defaults::w2_spec(opts.master_seed),
        &grid,
        path,
    )?;
    let traj = simulate(&u0, &v0, &params, &cfg, &mut noise)?;
    let masses: Vec<f64> = traj.records.iter().map(|r| r.mass).collect();
    let half = horizon_index(masses.len(), opts.dt, opts.t_end / 2.0);
    let sup_half = masses[..=half].iter().cloned().fold(0.0, f64::max);
    let sup_full = masses.iter().cloned().fold(0.0, f64::max);
    Ok((sup_half, sup_full))
}

fn envelope(gamma: f64, p: f64, c_p: f64, t: f64) -> f64 {
    // I(u₀) = 1 for the experiment's initial data
    ((gamma * p + c_p * gamma.powf(p / 2.0) / 2.0) * t.powf(p)).exp()
}

/// Monte Carlo sup-moments at the two horizons: `(E[sup^p](T/2), E[sup^p](T),
/// stderr at T)`.
fn observed_moments(opts: &MomentOptions) -> Result<(f64, f64, f64), SimError> {
    let sups = run_paths(opts.n_paths, opts.path_base, |p| {
        sup_mass_at_horizons(opts, p)
    })?;
    let p = opts.p_moment;
    let half: Vec<f64> = sups.iter().map(|(h, _)| h.powf(p)).collect();
    let full: Vec<f64> = sups.iter().map(|(_, f)| f.powf(p)).collect();
    Ok((
        stats::mean(&half),
        stats::mean(&full),
        stats::stderr(&full),
    ))
}

/// Verification against the frozen envelope constant.
pub fn mc_l1_moment_bound(opts: &MomentOptions, c_p: f64) -> Result<VerificationReport, SimError> {
    let start = Instant::now();
    let (m_half, m_full, se_full) = observed_moments(opts)?;
    let gamma = defaults::quiet_params(0.0, opts.master_seed).gamma();
    let p = opts.p_moment;
    let env_half = envelope(gamma, p, c_p, opts.t_end / 2.0);
    let env_full = envelope(gamma, p, c_p, opts.t_end);

    let mut report = VerificationReport::new("moment-bound");
    report.observed = m_full;
    report.predicted = env_full;
    report.ci_halfwidth = 3.0 * se_full;
    report
        .detail("p", p)
        .detail("c_p", c_p)
        .detail("n_paths", opts.n_paths as f64)
        .detail("observed_half_horizon", m_half)
        .detail("envelope_half_horizon", env_half)
        .detail("margin_full", env_full / m_full)
        .detail("margin_half", env_half / m_half);
    report.pass = m_half.is_finite()
        && m_full.is_finite()
        && m_half <= env_half
        && m_full <= env_full
        && m_half <= m_full;
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Calibration: the smallest `C_p` that makes the envelope hold at both
/// horizons for the *calibration* ensemble (freeze this times a headroom
/// factor; see [`crate::frozen`]).
pub fn fit_moment_constant(opts: &MomentOptions) -> Result<f64, SimError> {
    let (m_half, m_full, _) = observed_moments(opts)?;
    let gamma = defaults::quiet_params(0.0, opts.master_seed).gamma();
    let p = opts.p_moment;
    let required = |observed: f64, t: f64| -> f64 {
        // invert observed = exp((γp + C γ^{p/2}/2) t^p)
        (observed.ln() / t.powf(p) - gamma * p) * 2.0 / gamma.powf(p / 2.0)
    };
    Ok(required(m_half, opts.t_end / 2.0).max(required(m_full, opts.t_end)))
}
