//! Acceptance gate: one test per release criterion, at full scale, each
//! printing a single `[A#] ... PASS/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use sks_core::functionals::{f_claim, gajewski_gap, sqrt_l2_distance};
use sks_core::{
    BasisKind, Grid, GridSpec, ModelParams, Positivity, SolverConfig, SpectralField, Stepper,
    SystemState,
};
use sks_harness::experiments::converge::{strong_convergence_study, ConvergeOptions};
use sks_harness::experiments::energy::{heat_control_check, mc_energy_bound, EnergyOptions};
use sks_harness::experiments::mass::{chi_independence, mc_mass_identity, MassOptions};
use sks_harness::experiments::moments::{mc_l1_moment_bound, MomentOptions};
use sks_harness::experiments::stopping::{stopping_time_survey, StoppingOptions};
use sks_harness::experiments::twin::{twin_ladder, twin_run_uniqueness, TwinOptions};
use sks_harness::{defaults, frozen, VerificationReport};

fn gate(tag: &str, report: &VerificationReport) {
    println!("[{tag}] {}", report.summary_line());
    assert!(report.pass, "[{tag}] FAILED: {}", report.summary_line());
}

fn line(tag: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {detail}: {verdict}");
    assert!(pass, "[{tag}] FAILED: {detail}");
}

/// Mass identity: 1000 paths, default grid/step, per-step residual ≤ 1e-12
/// on every path and ensemble-mean terminal mass within 3·stderr + 5·dt of
/// the exponential growth law.
#[test]
fn a1_mass_identity() {
    let report = mc_mass_identity(&MassOptions::default()).unwrap();
    assert_eq!(report.details["n_paths"], 1000.0);
    gate("A1", &report);
}

/// χ-independence: per-path mass sequences bitwise identical between χ = 0
/// and χ = 5 runs on common noise (plus a transport-active residual check).
#[test]
fn a2_chi_independence_of_mass() {
    let opts = MassOptions {
        n_paths: 200,
        ..MassOptions::default()
    };
    let report = chi_independence(&opts).unwrap();
    gate("A2", &report);
}

/// Convexity-gap inequality: scalar form on 10⁵ random pairs and field form
/// on 10⁴ random nonnegative field pairs, zero violations beyond 1e-12.
#[test]
fn a3_gap_inequality_scalar_and_field() {
    // scalar: Φ(x, y) ≥ ¼ (√x − √y)² over log-uniform magnitudes and
    // degenerate pairs
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3_001);
    let mut scalar_violations = 0usize;
    for i in 0..100_000 {
        let (x, y) = match i % 10 {
            0 => (0.0, 10f64.powf(rng.random_range(-8.0..8.0))),
            1 => (10f64.powf(rng.random_range(-8.0..8.0)), 0.0),
            2 => {
                let x = 10f64.powf(rng.random_range(-8.0..8.0));
                (x, x)
            }
            _ => (
                10f64.powf(rng.random_range(-8.0..8.0)),
                10f64.powf(rng.random_range(-8.0..8.0)),
            ),
        };
        let gap = scalar_gap(x, y);
        let dist = (x.sqrt() - y.sqrt()).powi(2);
        // slack scales with the pair's magnitude: both sides are
        // 1-homogeneous, so at x + y ~ 1e8 machine evaluation is only good
        // to ~1e-8 absolute and a fixed absolute slack would be vacuous
        if gap < 0.25 * dist - 1e-12 * (1.0 + x + y) {
            scalar_violations += 1;
        }
    }

    // field: Φ(u₁, u₂) ≥ ¼ |√u₁ − √u₂|²_{L²} on random nonnegative pairs
    let grid = defaults::grid();
    let mut field_violations = 0usize;
    for _ in 0..10_000 {
        let u1 = nonneg_field(&grid, &mut rng);
        let u2 = nonneg_field(&grid, &mut rng);
        let gap = gajewski_gap(&u1, &u2).unwrap();
        let dist = sqrt_l2_distance(&u1, &u2).unwrap();
        if gap < 0.25 * dist - 1e-12 {
            field_violations += 1;
        }
    }
    line(
        "A3",
        scalar_violations == 0 && field_violations == 0,
        &format!(
            "gap inequality: {scalar_violations} scalar violations in 1e5, \
             {field_violations} field violations in 1e4"
        ),
    );
}

/// Scalar comparison function: f(u) ≤ 1e-14 on a 10⁴-point log grid over
/// [1, 10⁶], f(1) = 0 exactly.
#[test]
fn a4_claim_function_nonpositive() {
    let exact_at_one = f_claim(1.0).unwrap() == 0.0;
    let n = 10_000;
    let mut max_f = f64::NEG_INFINITY;
    for i in 0..n {
        let u = 10f64.powf(6.0 * i as f64 / (n - 1) as f64);
        max_f = max_f.max(f_claim(u).unwrap());
    }
    line(
        "A4",
        exact_at_one && max_f <= 1e-14,
        &format!("f(1) = 0 exactly: {exact_at_one}, max f on log grid = {max_f:e}"),
    );
}

/// Pathwise uniqueness: 100 twin paths with common noise stay bitwise
/// identical over T = 0.5; perturbation ladder 1e-3/1e-4/1e-5 shows linear
/// terminal √-distance scaling (adjacent ratios in [5, 20]).
#[test]
fn a5_twin_uniqueness_and_ladder() {
    let report = twin_run_uniqueness(&TwinOptions::default()).unwrap();
    assert_eq!(report.details["n_paths"], 100.0);
    gate("A5a", &report);
    let report = twin_ladder(&TwinOptions::default()).unwrap();
    gate("A5b", &report);
}

/// Second-moment bound: E[sup I(u)²] under the frozen-C₂ envelope on 1000
/// disjoint verification paths, finite and nondecreasing over {T/2, T}.
#[test]
fn a6_moment_bound() {
    let report = mc_l1_moment_bound(&MomentOptions::default(), frozen::MOMENT_C2).unwrap();
    assert_eq!(report.details["n_paths"], 1000.0);
    gate("A6", &report);
}

/// Energy quantities: all five finite (and monotone in the horizon) at
/// default parameters; noise-free χ = 0 control matches the closed-form
/// linear evolution to 1e-8.
#[test]
fn a7_energy_quantities_and_control() {
    let report = mc_energy_bound(&EnergyOptions::default()).unwrap();
    gate("A7a", &report);
    let report = heat_control_check(&EnergyOptions::default()).unwrap();
    gate("A7b", &report);
}

/// Stopping-time survey: P(τ_N < T) nonincreasing over the threshold ladder
/// and below the fitted Ĉ/N envelope at every verification rung, 500 paths.
#[test]
fn a8_stopping_time_survey() {
    let report = stopping_time_survey(&StoppingOptions::default()).unwrap();
    assert_eq!(report.details["n_paths_per_half"], 250.0);
    gate("A8", &report);
}

/// Strong self-convergence on nested increments: dt ladder {2⁻⁶..2⁻¹⁰}·T,
/// 200 paths, monotone mean-error decrease, log-log slope in [0.3, 1.1].
#[test]
fn a9_strong_convergence() {
    let report = strong_convergence_study(&ConvergeOptions::default()).unwrap();
    assert_eq!(report.details["n_paths"], 200.0);
    gate("A9", &report);
}

/// Spectral substrate: round-trip ≤ 1e-12, Parseval ≤ 1e-10, Gram identity
/// ≤ 1e-10, and exact semigroup action on the linear part.
#[test]
fn a10_spectral_substrate() {
    let mut worst_roundtrip = 0.0f64;
    let mut worst_parseval = 0.0f64;
    let mut worst_gram = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xA10_001);

    for basis in [BasisKind::PeriodicTrig, BasisKind::NeumannCosine] {
        let grid = Grid::new(GridSpec {
            n_nodes: 128,
            k_max: 32,
            basis,
        })
        .unwrap();
        let m = grid.n_modes();

        // round-trip + Parseval on random fields (cosine-family slots only
        // in Neumann mode, where nodal analysis is one-sided by design)
        for _ in 0..50 {
            let coeffs: Vec<f64> = (0..m)
                .map(|i| {
                    if basis == BasisKind::NeumannCosine && i < grid.k_max() {
                        0.0
                    } else {
                        rng.sample::<f64, _>(StandardNormal)
                    }
                })
                .collect();
            let f = SpectralField::from_coeffs(&grid, coeffs.clone()).unwrap();
            let back = grid.to_coeffs(&f.to_nodal()).unwrap();
            for (a, b) in coeffs.iter().zip(back.coeffs()) {
                worst_roundtrip = worst_roundtrip.max((a - b).abs());
            }
            let nodal = f.to_nodal();
            let quad_sq = nodal.iter().map(|x| x * x).sum::<f64>() / nodal.len() as f64;
            let coeff_sq: f64 = coeffs.iter().map(|a| a * a).sum();
            worst_parseval = worst_parseval.max((quad_sq - coeff_sq).abs());
        }

        // Gram matrix of the basis under the grid's quadrature. In Neumann
        // mode the two parity families are checked separately: cross-parity
        // products are odd functions, which the midpoint rule does not
        // integrate exactly — and the analysis path never forms them (it is
        // parity-filtered by construction).
        let nodes = grid.nodes();
        for i in 0..m {
            let ki = i as i64 - grid.k_max() as i64;
            let fi: Vec<f64> = nodes.iter().map(|&x| grid.basis_eval(ki, x).unwrap()).collect();
            for j in i..m {
                let kj = j as i64 - grid.k_max() as i64;
                if basis == BasisKind::NeumannCosine && (ki < 0) != (kj < 0) {
                    continue;
                }
                let fj: Vec<f64> =
                    nodes.iter().map(|&x| grid.basis_eval(kj, x).unwrap()).collect();
                let dot = fi.iter().zip(&fj).map(|(a, b)| a * b).sum::<f64>() / nodes.len() as f64;
                let expected = if i == j { 1.0 } else { 0.0 };
                worst_gram = worst_gram.max((dot - expected).abs());
            }
        }
    }

    // semigroup exactness: one χ = 0, γ = 0, noise-free step must act as
    // multiplication by exp(−r μ dt) on every u mode and exp(−(r μ + α) dt)
    // on every v mode, to relative roundoff
    let grid = defaults::grid();
    let params = ModelParams::new(0.37, 0.21, 0.0, 0.9, 0.0, &defaults::w1_spec(7))
        .and_then(|p| p.with_gamma_override(0.0))
        .unwrap();
    let cfg = SolverConfig {
        dt: 1e-3,
        t_end: 1e-3,
        positivity: Positivity::Off,
        record_every: 1,
    };
    let m = grid.n_modes();
    let mut rng2 = ChaCha8Rng::seed_from_u64(0xA10_002);
    let coeffs_u: Vec<f64> = (0..m).map(|_| rng2.sample(StandardNormal)).collect();
    let coeffs_v: Vec<f64> = (0..m).map(|_| rng2.sample(StandardNormal)).collect();
    let u0 = SpectralField::from_coeffs(&grid, coeffs_u.clone()).unwrap();
    let v0 = SpectralField::from_coeffs(&grid, coeffs_v.clone()).unwrap();
    let mut state = SystemState::new(u0, v0).unwrap();
    let mut stepper = Stepper::new(&grid, &params, &cfg).unwrap();
    let zeros = vec![0.0; m];
    stepper.step(&mut state, &zeros, &zeros).unwrap();
    let mut worst_semigroup = 0.0f64;
    for i in 0..m {
        let eu = (-params.r_u * grid.mu()[i] * cfg.dt).exp();
        let ev = (-(params.r_v * grid.mu()[i] + params.alpha) * cfg.dt).exp();
        let du = (state.u.coeffs()[i] - eu * coeffs_u[i]).abs() / coeffs_u[i].abs();
        let dv = (state.v.coeffs()[i] - ev * coeffs_v[i]).abs() / coeffs_v[i].abs();
        worst_semigroup = worst_semigroup.max(du).max(dv);
    }

    line(
        "A10",
        worst_roundtrip <= 1e-12
            && worst_parseval <= 1e-10
            && worst_gram <= 1e-10
            && worst_semigroup <= 1e-14,
        &format!(
            "round-trip {worst_roundtrip:.2e}, parseval {worst_parseval:.2e}, \
             gram {worst_gram:.2e}, semigroup {worst_semigroup:.2e}"
        ),
    );
}

/// Stable convexity-gap evaluation for scalars (mirrors the field
/// functional's kernel).
fn scalar_gap(x: f64, y: f64) -> f64 {
    let s = x + y;
    if s <= 0.0 {
        return 0.0;
    }
    let mut g = 0.0;
    if x > 0.0 {
        g += x * (2.0 * x / s).ln();
    }
    if y > 0.0 {
        g += y * (2.0 * y / s).ln();
    }
    g.max(0.0)
}

/// Random field that is nonnegative at the quadrature nodes (where the
/// functionals are evaluated): the exact square of a half-band field, which
/// stays inside the band, so its nodal values are squares to rounding.
/// (Clipping a signed field instead would leave the band and its projection
/// would ring negative.)
fn nonneg_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> SpectralField {
    let k_max = grid.k_max();
    let mu = grid.mu();
    let coeffs: Vec<f64> = (0..grid.n_modes())
        .map(|i| {
            let k = i as i64 - k_max as i64;
            if k.unsigned_abs() as usize > k_max / 2 {
                return 0.0;
            }
            let g: f64 = rng.sample(StandardNormal);
            g * (1.0 + mu[i]).powf(-0.5)
        })
        .collect();
    let w = SpectralField::from_coeffs(grid, coeffs).unwrap();
    w.multiply_dealiased(&w).unwrap()
}
