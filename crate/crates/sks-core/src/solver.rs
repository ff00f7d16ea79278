//! Exponential Euler–Maruyama time stepping of the coupled Itô system
//!
//! ```text
//! du = (r_u Δu − χ ∂x(u ∂x v) + γ u) dt + u dW₁
//! dv = (r_v Δv − α v + β u) dt + v dW₂
//! ```
//!
//! in mild form: the stiff linear part is applied as the exact diagonal
//! semigroup `a_k ↦ e^{−dt·r·μ_k} a_k` (plus `e^{−dt·α}` damping for `v`),
//! the transport and reaction terms are explicit, and the multiplicative
//! noise products are evaluated nodally at the start-of-step value
//! (Itô/left-point). The `γ u dt` term is the Itô correction inherited from
//! the Stratonovich form; it is part of the drift, never re-derived here.
//!
//! ## Discrete mass identity
//!
//! The mean mode is untouched by the divergence term (a derivative has zero
//! mean, enforced structurally) and by the `u`-semigroup (`e^{−dt·r_u·0} =
//! 1` exactly). Writing `I(u) = a_0` and `⟨u, dW₁⟩` for the mean of the
//! nodal product `u ⊙ dW₁`, each step satisfies
//!
//! ```text
//! I(u_{n+1}) = I(u_n) + dt·γ·I(u_n) + ⟨u_n, dW₁⟩
//! ```
//!
//! bitwise — the solver computes the mean slot with exactly this expression
//! and the step report hands back both `I(u_{n+1})` (pre-guard) and the
//! pairing term so harnesses can verify the identity to the last bit.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::DiagnosticsRecord;
use crate::noise::{NoisePathHandle, NoiseSpec};
use crate::spectral::{derivative_into, BasisKind, Grid, SlotFilter, SpectralField};
use crate::EPS_CLIP;

/// Model coefficients. `gamma` is derived from the `W1` noise spec at
/// construction (it is the Itô correction constant, not a free dial); an
/// explicit override exists for controlled experiments and is the only way
/// to change it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModelParams {
    /// Cell diffusivity, `> 0`.
    pub r_u: f64,
    /// Chemoattractant diffusivity, `> 0`.
    pub r_v: f64,
    /// Chemotactic sensitivity `χ ≥ 0`.
    pub chi: f64,
    /// Chemoattractant damping `α ≥ 0`.
    pub alpha: f64,
    /// Chemoattractant production `β ≥ 0`.
    pub beta: f64,
    gamma: f64,
}

impl ModelParams {
    /// Builds parameters with `gamma` computed from the `W1` channel spec.
    pub fn new(r_u: f64, r_v: f64, chi: f64, alpha: f64, beta: f64, w1: &NoiseSpec) -> Result<Self> {
        let params = ModelParams {
            r_u,
            r_v,
            chi,
            alpha,
            beta,
            gamma: w1.gamma_constant(),
        };
        params.validate()?;
        Ok(params)
    }

    /// Replaces the derived Itô-correction constant (controlled experiments
    /// only, e.g. switching the correction off to isolate heat decay).
    pub fn with_gamma_override(mut self, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                constraint: "finite and >= 0",
            });
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// The Itô-correction constant in force.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 2] = [("r_u", self.r_u), ("r_v", self.r_v)];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "finite and > 0",
                });
            }
        }
        let nonneg: [(&'static str, f64); 4] = [
            ("chi", self.chi),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ];
        for (name, value) in nonneg {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "finite and >= 0",
                });
            }
        }
        Ok(())
    }
}

/// What to do about negative nodal values after a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    /// Clip nodal values at zero and re-project, keeping account of the
    /// removed mass (the default; the entropy-based functionals need `u ≥ 0`).
    Clip,
    /// Leave fields untouched (for scheme studies only).
    Off,
}

/// Time-stepping configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub positivity: Positivity,
    /// Record diagnostics every this many steps (the initial state is
    /// always recorded, and so is the final one).
    pub record_every: usize,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                constraint: "finite and > 0",
            });
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
                constraint: "finite and > 0",
            });
        }
        if self.dt > self.t_end {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
                constraint: "dt <= t_end",
            });
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                value: 0.0,
                constraint: ">= 1",
            });
        }
        Ok(())
    }

    /// Number of steps: `round(t_end / dt)`, at least 1. The realized final
    /// time is `n_steps · dt`; times along the trajectory are always exact
    /// multiples `t = n · dt`, never accumulated sums.
    pub fn n_steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }
}

/// The pair of evolving fields plus bookkeeping.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub u: SpectralField,
    pub v: SpectralField,
    pub t: f64,
    /// Cumulative mass removed by the positivity guard (both fields).
    pub clipped_mass: f64,
}

impl SystemState {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        if u.grid().spec() != v.grid().spec() {
            return Err(Error::GridMismatch {
                left: format!("{:?}", u.grid().spec()),
                right: format!("{:?}", v.grid().spec()),
            });
        }
        Ok(SystemState {
            u,
            v,
            t: 0.0,
            clipped_mass: 0.0,
        })
    }
}

/// Itô drift pair `(r_u Δu − χ ∂x(u ∂x v) + γ u, r_v Δv − α v + β u)`,
/// with the transport product formed nodally and dealiased.
pub fn ito_drift(state: &SystemState, params: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    params.validate()?;
    let mut du = state.u.laplacian(params.r_u)?;
    if params.chi != 0.0 && !state.v.is_zero() {
        let flux = state.u.multiply_dealiased(&state.v.derivative())?;
        du.axpy(-params.chi, &flux.derivative())?;
    }
    du.axpy(params.gamma, &state.u)?;

    let mut dv = state.v.laplacian(params.r_v)?;
    dv.axpy(-params.alpha, &state.v)?;
    dv.axpy(params.beta, &state.u)?;
    Ok((du, dv))
}

/// Nodal clip at zero with mass bookkeeping: returns the guarded field and
/// the quadrature of the removed negative part. A field with no negative
/// nodes is returned unchanged (bitwise), not round-tripped.
pub fn positivity_guard(field: &SpectralField) -> (SpectralField, f64) {
    let mut nodal = field.to_nodal();
    let mut removed = 0.0;
    for x in nodal.iter_mut() {
        if *x < 0.0 {
            removed -= *x;
            *x = 0.0;
        }
    }
    if removed == 0.0 {
        return (field.clone(), 0.0);
    }
    let clipped = removed / nodal.len() as f64;
    let guarded = field
        .grid()
        .to_coeffs(&nodal)
        .expect("nodal buffer came from this grid");
    (guarded, clipped)
}

/// Per-step report from [`Stepper::step`].
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    /// Mean of the nodal product `u_n ⊙ dW₁` — the noise term of the
    /// discrete mass identity.
    pub pairing_u: f64,
    /// `I(u_{n+1})` before the positivity guard ran.
    pub pre_guard_mass_u: f64,
    /// Mass removed by the guard in this step (both fields).
    pub clipped_step: f64,
    /// Nodal L¹ norm of `u_{n+1}` (post-guard).
    pub l1_u: f64,
    /// L² norm of `u_{n+1}` (post-guard).
    pub l2_u: f64,
    /// L² norm of `v_{n+1}` (post-guard).
    pub l2_v: f64,
}

/// Reusable stepping engine: precomputed semigroup factors plus scratch
/// buffers, driving one step of the scheme per call. One `Stepper` may be
/// shared across several states on the same grid (twin runs), but not
/// across threads.
pub struct Stepper {
    grid: Arc<Grid>,
    params: ModelParams,
    dt: f64,
    positivity: Positivity,
    e_u: Vec<f64>,
    e_v: Vec<f64>,
    transport_filter: SlotFilter,
    noise_filter: SlotFilter,
    analysis_filter: SlotFilter,
    // work-grid nodal scratch (padded size when the grid pads products)
    w_a: Vec<f64>,
    w_b: Vec<f64>,
    w_p: Vec<f64>,
    // coefficient scratch
    c_dv: Vec<f64>,
    c_flux: Vec<f64>,
    c_div: Vec<f64>,
    c_uw: Vec<f64>,
    c_vw: Vec<f64>,
    // guard/nodal scratch on the grid's own nodes
    g_nod: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Arc<Grid>, params: &ModelParams, cfg: &SolverConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let m = grid.n_modes();
        let mut e_u = vec![0.0; m];
        let mut e_v = vec![0.0; m];
        for (i, &mu) in grid.mu().iter().enumerate() {
            e_u[i] = (-cfg.dt * params.r_u * mu).exp();
            e_v[i] = (-cfg.dt * (params.r_v * mu + params.alpha)).exp();
        }
        let (transport_filter, noise_filter, analysis_filter) = match grid.basis() {
            BasisKind::PeriodicTrig => (SlotFilter::All, SlotFilter::All, SlotFilter::All),
            // u ⊙ ∂x v is (even × odd) = odd; noise and guard analysis stay
            // in the cosine family
            BasisKind::NeumannCosine => {
                (SlotFilter::SinOnly, SlotFilter::CosOnly, SlotFilter::CosOnly)
            }
        };
        let n_work = grid.pad_nodes();
        Ok(Stepper {
            grid: Arc::clone(grid),
            params: *params,
            dt: cfg.dt,
            positivity: cfg.positivity,
            e_u,
            e_v,
            transport_filter,
            noise_filter,
            analysis_filter,
            w_a: vec![0.0; n_work],
            w_b: vec![0.0; n_work],
            w_p: vec![0.0; n_work],
            c_dv: vec![0.0; m],
            c_flux: vec![0.0; m],
            c_div: vec![0.0; m],
            c_uw: vec![0.0; m],
            c_vw: vec![0.0; m],
            g_nod: vec![0.0; grid.n_nodes()],
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Semigroup factor `e^{−dt·r_u·μ_k}` per slot.
    pub fn semigroup_u(&self) -> &[f64] {
        &self.e_u
    }

    /// Semigroup factor `e^{−dt·(r_v·μ_k + α)}` per slot.
    pub fn semigroup_v(&self) -> &[f64] {
        &self.e_v
    }

    /// Advances `state` by one step of the scheme with the given channel
    /// increments (coefficient vectors over exactly `dt`).
    ///
    /// Fails with a blow-up error carrying the failure time if the updated
    /// fields contain any non-finite value; `state` is left as it was after
    /// the failing update (inspect, don't reuse).
    pub fn step(&mut self, state: &mut SystemState, dw1: &[f64], dw2: &[f64]) -> Result<StepInfo> {
        let grid = &self.grid;
        let m = grid.n_modes();
        if state.u.grid().spec() != grid.spec() {
            return Err(Error::GridMismatch {
                left: format!("{:?}", state.u.grid().spec()),
                right: format!("{:?}", grid.spec()),
            });
        }
        if dw1.len() != m || dw2.len() != m {
            return Err(Error::ShapeMismatch {
                got: if dw1.len() != m { dw1.len() } else { dw2.len() },
                expected: m,
            });
        }

        let k_max = grid.k_max();
        let basis = grid.basis();
        let v_zero = state.v.is_zero();
        let do_transport = self.params.chi != 0.0 && !v_zero;

        // nodal u on the product grid — shared by transport and noise terms
        grid.work_eval_into(state.u.coeffs(), &mut self.w_a);

        if do_transport {
            // χ ∂x(u ∂x v): differentiate v, multiply nodally, project,
            // differentiate the projected flux
            derivative_into(basis, k_max, state.v.coeffs(), &mut self.c_dv);
            grid.work_eval_into(&self.c_dv, &mut self.w_b);
            for ((p, &a), &b) in self.w_p.iter_mut().zip(&self.w_a).zip(&self.w_b) {
                *p = a * b;
            }
            grid.work_forward_into(&self.w_p, self.transport_filter, &mut self.c_flux);
            derivative_into(basis, k_max, &self.c_flux, &mut self.c_div);
        }

        // Itô noise product u_n ⊙ dW₁ at the start-of-step value
        grid.work_eval_into(dw1, &mut self.w_b);
        for ((p, &a), &b) in self.w_p.iter_mut().zip(&self.w_a).zip(&self.w_b) {
            *p = a * b;
        }
        grid.work_forward_into(&self.w_p, self.noise_filter, &mut self.c_uw);

        if !v_zero {
            grid.work_eval_into(state.v.coeffs(), &mut self.w_a);
            grid.work_eval_into(dw2, &mut self.w_b);
            for ((p, &a), &b) in self.w_p.iter_mut().zip(&self.w_a).zip(&self.w_b) {
                *p = a * b;
            }
            grid.work_forward_into(&self.w_p, self.noise_filter, &mut self.c_vw);
        }

        let dt = self.dt;
        let gamma = self.params.gamma;
        let chi = self.params.chi;
        let beta_dt = dt * self.params.beta;

        // v first: its production term reads the start-of-step u
        {
            let u_old = state.u.coeffs();
            let v_c = state.v.coeffs_mut();
            match (self.params.beta != 0.0, v_zero) {
                (false, true) => {
                    for (i, vc) in v_c.iter_mut().enumerate() {
                        *vc *= self.e_v[i];
                    }
                }
                (true, true) => {
                    for (i, vc) in v_c.iter_mut().enumerate() {
                        *vc = self.e_v[i] * (*vc + beta_dt * u_old[i]);
                    }
                }
                (false, false) => {
                    for (i, vc) in v_c.iter_mut().enumerate() {
                        *vc = self.e_v[i] * (*vc + self.c_vw[i]);
                    }
                }
                (true, false) => {
                    for (i, vc) in v_c.iter_mut().enumerate() {
                        *vc = self.e_v[i] * (*vc + beta_dt * u_old[i] + self.c_vw[i]);
                    }
                }
            }
        }

        // u update; when the transport term is off (χ = 0 or v ≡ 0) the
        // mean-slot arithmetic is bitwise identical to the transport branch,
        // because there `c_div[mean] = +0.0` and `x − χ·0.0 ≡ x`
        {
            let u_c = state.u.coeffs_mut();
            if do_transport {
                for (i, uc) in u_c.iter_mut().enumerate() {
                    *uc = self.e_u[i]
                        * (*uc + dt * (gamma * *uc - chi * self.c_div[i]) + self.c_uw[i]);
                }
            } else {
                for (i, uc) in u_c.iter_mut().enumerate() {
                    *uc = self.e_u[i] * (*uc + dt * (gamma * *uc) + self.c_uw[i]);
                }
            }
        }

        let i0 = k_max;
        let pairing_u = self.c_uw[i0];
        let pre_guard_mass_u = state.u.coeffs()[i0];

        // blow-up detection before the guard touches anything (checked on
        // the raw coefficients — norms of huge-but-finite fields overflow)
        let finite = state.u.coeffs().iter().all(|a| a.is_finite())
            && state.v.coeffs().iter().all(|a| a.is_finite());
        if !finite {
            return Err(Error::BlowUp { t: state.t + dt });
        }

        // positivity guard + cheap norms from the nodal buffer
        let mut clipped_step = 0.0;
        grid.eval_into(state.u.coeffs(), &mut self.g_nod);
        if self.positivity == Positivity::Clip {
            clipped_step += clip_in_place(&mut self.g_nod);
            if clipped_step > 0.0 {
                grid.forward_into(&self.g_nod, self.analysis_filter, state.u.coeffs_mut());
            }
        }
        let n = grid.n_nodes() as f64;
        let l1_u = self.g_nod.iter().map(|x| x.abs()).sum::<f64>() / n;

        if self.positivity == Positivity::Clip && !state.v.is_zero() {
            grid.eval_into(state.v.coeffs(), &mut self.g_nod);
            let removed_v = clip_in_place(&mut self.g_nod);
            if removed_v > 0.0 {
                grid.forward_into(&self.g_nod, self.analysis_filter, state.v.coeffs_mut());
                clipped_step += removed_v;
            }
        }

        state.clipped_mass += clipped_step;
        state.t += dt;

        let l2_u = state.u.coeffs().iter().map(|a| a * a).sum::<f64>().sqrt();
        let l2_v = state.v.coeffs().iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(StepInfo {
            pairing_u,
            pre_guard_mass_u,
            clipped_step,
            l1_u,
            l2_u,
            l2_v,
        })
    }
}

/// Clips negatives to zero in place, returning the quadrature of the
/// removed negative part.
fn clip_in_place(nodal: &mut [f64]) -> f64 {
    let mut removed = 0.0;
    for x in nodal.iter_mut() {
        if *x < 0.0 {
            removed -= *x;
            *x = 0.0;
        }
    }
    removed / nodal.len() as f64
}

/// Source of per-step channel increments for [`simulate`].
pub trait IncrementSource {
    /// Fills the two coefficient-space increments for the next step of
    /// length `dt`.
    fn next_increments(&mut self, dt: f64, dw1: &mut [f64], dw2: &mut [f64]) -> Result<()>;
}

/// Live sampling from a pair of channel handles.
pub struct HandlePair {
    pub w1: NoisePathHandle,
    pub w2: NoisePathHandle,
}

impl HandlePair {
    /// Builds both channel handles for one Monte Carlo path.
    pub fn make(
        w1_spec: NoiseSpec,
        w2_spec: NoiseSpec,
        grid: &Arc<Grid>,
        path_index: u64,
    ) -> Result<Self> {
        Ok(HandlePair {
            w1: crate::noise::make_common_path(w1_spec, grid, path_index)?,
            w2: crate::noise::make_common_path(w2_spec, grid, path_index)?,
        })
    }
}

impl IncrementSource for HandlePair {
    fn next_increments(&mut self, dt: f64, dw1: &mut [f64], dw2: &mut [f64]) -> Result<()> {
        self.w1.sample_increment_into(dt, dw1)?;
        self.w2.sample_increment_into(dt, dw2)?;
        Ok(())
    }
}

/// Deterministic zero increments (noise-free control runs).
pub struct ZeroNoise;

impl IncrementSource for ZeroNoise {
    fn next_increments(&mut self, _dt: f64, dw1: &mut [f64], dw2: &mut [f64]) -> Result<()> {
        dw1.fill(0.0);
        dw2.fill(0.0);
        Ok(())
    }
}

/// A pre-drawn table of increments, replayable and coarsenable: summing
/// consecutive pairs yields the same Brownian path seen at twice the step —
/// the coupling needed by strong-convergence studies.
pub struct PrecomputedIncrements {
    dt: f64,
    dw1: Vec<Vec<f64>>,
    dw2: Vec<Vec<f64>>,
    cursor: usize,
}

impl PrecomputedIncrements {
    /// Draws `n_steps` increments of length `dt` from both handles.
    pub fn sample(
        w1: &mut NoisePathHandle,
        w2: &mut NoisePathHandle,
        dt: f64,
        n_steps: usize,
    ) -> Result<Self> {
        let m = w1.grid().n_modes();
        let mut dw1 = Vec::with_capacity(n_steps);
        let mut dw2 = Vec::with_capacity(n_steps);
        for _ in 0..n_steps {
            let mut a = vec![0.0; m];
            let mut b = vec![0.0; m];
            w1.sample_increment_into(dt, &mut a)?;
            w2.sample_increment_into(dt, &mut b)?;
            dw1.push(a);
            dw2.push(b);
        }
        Ok(PrecomputedIncrements {
            dt,
            dw1,
            dw2,
            cursor: 0,
        })
    }

    /// The same Brownian paths at twice the step: consecutive increments
    /// summed pairwise. The step count must be even.
    pub fn coarsen(&self) -> Result<Self> {
        let n = self.dw1.len();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                value: n as f64,
                constraint: "even step count required to coarsen",
            });
        }
        let sum_pairs = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
            rows.chunks_exact(2)
                .map(|pair| {
                    pair[0]
                        .iter()
                        .zip(&pair[1])
                        .map(|(&a, &b)| a + b)
                        .collect()
                })
                .collect()
        };
        Ok(PrecomputedIncrements {
            dt: 2.0 * self.dt,
            dw1: sum_pairs(&self.dw1),
            dw2: sum_pairs(&self.dw2),
            cursor: 0,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.dw1.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Rewinds to the first increment (for reuse across twin states).
    pub fn rewind(&mut self) {
        self.cursor = 0;
    }
}

impl IncrementSource for PrecomputedIncrements {
    fn next_increments(&mut self, dt: f64, dw1: &mut [f64], dw2: &mut [f64]) -> Result<()> {
        if (dt - self.dt).abs() > 1e-9 * self.dt {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                constraint: "dt must match the precomputed increment step",
            });
        }
        let row = self.cursor;
        if row >= self.dw1.len() {
            return Err(Error::Domain {
                op: "next_increments",
                detail: format!("precomputed increments exhausted after {row} steps"),
            });
        }
        dw1.copy_from_slice(&self.dw1[row]);
        dw2.copy_from_slice(&self.dw2[row]);
        self.cursor += 1;
        Ok(())
    }
}

/// A completed (or truncated-at-blow-up) run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Diagnostics at `t = 0`, every `record_every`-th step, and the final
    /// step.
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: SystemState,
    pub n_steps: usize,
    /// Largest per-step violation of the discrete mass identity (expected
    /// to be exactly zero; any nonzero value is a scheme defect).
    pub max_mass_residual: f64,
    /// Running supremum of the post-step L² norm of `u` (includes `t = 0`).
    pub sup_l2_u: f64,
    /// Running supremum of the nodal L¹ norm of `u` (includes `t = 0`).
    pub sup_l1_u: f64,
}

/// Simulation failure modes: invalid setup, or finite-time blow-up with the
/// partial trajectory attached.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Setup(#[from] Error),
    #[error("solution blew up at t = {t} (step {step})")]
    BlowUp {
        t: f64,
        step: usize,
        partial: Box<Trajectory>,
    },
}

fn nonneg_nodal_check(field: &SpectralField, name: &'static str) -> Result<()> {
    let min = field
        .to_nodal()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min < -EPS_CLIP {
        return Err(Error::InvalidParameter {
            name,
            value: min,
            constraint: "initial data must be nonnegative at the nodes",
        });
    }
    Ok(())
}

/// Runs the scheme from `(u0, v0)` to `t_end`, recording diagnostics and
/// verifying the discrete mass identity at every step.
///
/// Deterministic: the trajectory is a pure function of the inputs and the
/// increment source. Blow-up aborts with the partial trajectory and the
/// last finite state.
pub fn simulate(
    u0: &SpectralField,
    v0: &SpectralField,
    params: &ModelParams,
    cfg: &SolverConfig,
    noise: &mut dyn IncrementSource,
) -> std::result::Result<Trajectory, SimError> {
    cfg.validate()?;
    params.validate()?;
    nonneg_nodal_check(u0, "u0")?;
    nonneg_nodal_check(v0, "v0")?;

    let grid = u0.grid();
    let mut state = SystemState::new(u0.clone(), v0.clone())?;
    let mut stepper = Stepper::new(grid, params, cfg)?;
    let n_steps = cfg.n_steps();
    let m = grid.n_modes();
    let i0 = grid.k_max();

    let first = DiagnosticsRecord::measure(&state.u, &state.v, 0.0, 0.0);
    let mut sup_l1 = first.l1_u;
    let mut sup_l2 = first.l2_u;
    let mut records = vec![first];
    let mut max_resid = 0.0f64;

    let mut dw1 = vec![0.0; m];
    let mut dw2 = vec![0.0; m];
    let mut prev_u = state.u.coeffs().to_vec();
    let mut prev_v = state.v.coeffs().to_vec();

    for step in 0..n_steps {
        prev_u.copy_from_slice(state.u.coeffs());
        prev_v.copy_from_slice(state.v.coeffs());
        noise.next_increments(cfg.dt, &mut dw1, &mut dw2)?;
        let mass_before = state.u.coeffs()[i0];

        match stepper.step(&mut state, &dw1, &dw2) {
            Ok(info) => {
                // same floating-point expression as the scheme's mean slot
                let predicted = mass_before + cfg.dt * (params.gamma * mass_before) + info.pairing_u;
                let resid = (info.pre_guard_mass_u - predicted).abs();
                if resid > max_resid {
                    max_resid = resid;
                }
                state.t = cfg.dt * (step + 1) as f64;
                if info.l1_u > sup_l1 {
                    sup_l1 = info.l1_u;
                }
                if info.l2_u > sup_l2 {
                    sup_l2 = info.l2_u;
                }
                if (step + 1) % cfg.record_every == 0 {
                    records.push(DiagnosticsRecord::measure(
                        &state.u,
                        &state.v,
                        state.t,
                        state.clipped_mass,
                    ));
                }
            }
            Err(Error::BlowUp { t }) => {
                let final_state = SystemState {
                    u: SpectralField::from_coeffs(grid, prev_u).expect("shape preserved"),
                    v: SpectralField::from_coeffs(grid, prev_v).expect("shape preserved"),
                    t: cfg.dt * step as f64,
                    clipped_mass: state.clipped_mass,
                };
                return Err(SimError::BlowUp {
                    t,
                    step: step + 1,
                    partial: Box::new(Trajectory {
                        records,
                        final_state,
                        n_steps: step,
                        max_mass_residual: max_resid,
                        sup_l2_u: sup_l2,
                        sup_l1_u: sup_l1,
                    }),
                });
            }
            Err(e) => return Err(SimError::Setup(e)),
        }
    }

    if !n_steps.is_multiple_of(cfg.record_every) {
        records.push(DiagnosticsRecord::measure(
            &state.u,
            &state.v,
            state.t,
            state.clipped_mass,
        ));
    }

    Ok(Trajectory {
        records,
        final_state: state,
        n_steps,
        max_mass_residual: max_resid,
        sup_l2_u: sup_l2,
        sup_l1_u: sup_l1,
    })
}
