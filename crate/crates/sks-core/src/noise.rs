//! Truncated Q-Wiener noise: spectral coefficients, Itô-correction
//! constants, and counter-keyed replayable increment streams.
//!
//! Each channel is the truncated expansion
//! `W(t, x) = Σ_{|k| ≤ K} λ_k ψ_k(x) β_k(t)` with independent scalar
//! Brownian motions `β_k` and weights `λ_k = (1 + (2πk)²)^{−δ/2}`. The
//! smoothing exponent must satisfy `δ > 1` for the `W1` channel (L²-valued,
//! Hilbert–Schmidt into L²) and `δ > 2` for `W2` (Hilbert–Schmidt into H¹);
//! violating that is a construction error, not a warning.
//!
//! ## Stream derivation
//!
//! Increments are *counter-keyed*: the Gaussian draws for one time step are
//! produced by a ChaCha8 stream whose key is derived (splitmix64 mixing)
//! from `(master_seed, channel, path_index, step_counter)`. Consequences:
//!
//! * identical `(master_seed, path_index)` ⇒ bitwise-identical sequences,
//!   independent of thread scheduling or how many other paths were drawn;
//! * a path can be replayed from any step by rebuilding the handle and
//!   advancing the counter — no state needs to be stored;
//! * distinct path indices and channels get well-separated keys.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{BasisKind, Grid, SpectralField, TWO_PI};

/// Which of the two driving Wiener processes a spec describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChannel {
    /// Drives the cell-density equation; requires `δ > 1`.
    W1,
    /// Drives the chemoattractant equation; requires `δ > 2`.
    W2,
}

impl NoiseChannel {
    fn id(self) -> u64 {
        match self {
            NoiseChannel::W1 => 1,
            NoiseChannel::W2 => 2,
        }
    }

    fn min_delta(self) -> f64 {
        match self {
            NoiseChannel::W1 => 1.0,
            NoiseChannel::W2 => 2.0,
        }
    }
}

/// Description of one truncated Q-Wiener channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Bessel smoothing exponent `δ` in `λ_k = (1 + (2πk)²)^{−δ/2}`.
    pub delta: f64,
    /// Spectral truncation: modes `|k| ≤ k_max` carry noise. `k_max = 0`
    /// gives purely scalar (mean-mode) noise.
    pub k_max: usize,
    /// Master seed; combined with path and step counters to key streams.
    pub master_seed: u64,
    pub channel: NoiseChannel,
}

/// Squared weight `λ_k² = (1 + (2πk)²)^{−δ}`.
fn lambda_sq(delta: f64, k: f64) -> f64 {
    let w = TWO_PI * k;
    (1.0 + w * w).powf(-delta)
}

impl NoiseSpec {
    /// Enforces the channel's smoothing requirement (`δ > 1` for W1,
    /// `δ > 2` for W2). Violation means the embedding is not
    /// Hilbert–Schmidt in the limit, so construction must fail.
    pub fn validate(&self) -> Result<()> {
        let min = self.channel.min_delta();
        if !self.delta.is_finite() || self.delta <= min {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: self.delta,
                constraint: match self.channel {
                    NoiseChannel::W1 => "delta > 1 for channel W1",
                    NoiseChannel::W2 => "delta > 2 for channel W2",
                },
            });
        }
        Ok(())
    }

    /// Spectral weight `λ_k = (1 + (2πk)²)^{−δ/2}`; even in `k`.
    pub fn lambda(&self, k: i64) -> Result<f64> {
        if k.unsigned_abs() > self.k_max as u64 {
            return Err(Error::ModeOutOfRange {
                k,
                k_max: self.k_max,
            });
        }
        Ok(lambda_sq(self.delta, k.unsigned_abs() as f64).sqrt())
    }

    /// Itô-correction constant `γ = Σ_{|k| ≤ k_max} λ_k² |ψ_k|²_∞`
    /// with `|ψ_0|²_∞ = 1` and `|ψ_k|²_∞ = 2` otherwise, i.e.
    /// `γ = 1 + 4 Σ_{k=1}^{K} (1 + (2πk)²)^{−δ}`.
    ///
    /// Nonincreasing in `δ`, nondecreasing in `k_max`.
    pub fn gamma_constant(&self) -> f64 {
        // ascending term size for accurate summation
        let mut tail = 0.0;
        for k in (1..=self.k_max).rev() {
            tail += lambda_sq(self.delta, k as f64);
        }
        1.0 + 4.0 * tail
    }

    /// Hilbert–Schmidt norm of the covariance-square-root embedding:
    /// `(Σ_{|k| ≤ K} λ_k²)^{1/2}` for W1 (target L²) and
    /// `(Σ_{|k| ≤ K} λ_k² (1 + (2πk)²))^{1/2}` for W2 (target H¹).
    pub fn hs_embedding_norm(&self) -> f64 {
        let mut tail = 0.0;
        for k in (1..=self.k_max).rev() {
            let kf = k as f64;
            let term = match self.channel {
                NoiseChannel::W1 => lambda_sq(self.delta, kf),
                NoiseChannel::W2 => {
                    let w = TWO_PI * kf;
                    lambda_sq(self.delta, kf) * (1.0 + w * w)
                }
            };
            tail += term;
        }
        (1.0 + 2.0 * tail).sqrt()
    }
}

/// splitmix64 finalizer: the avalanche mix used for key derivation.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// 32-byte ChaCha key for one (seed, channel, path, step) cell.
fn stream_key(master_seed: u64, channel: u64, path_index: u64, step: u64) -> [u8; 32] {
    let mut state = mix(master_seed ^ 0x243F_6A88_85A3_08D3);
    for word in [channel, path_index, step] {
        state = mix(state ^ word.wrapping_mul(GOLDEN));
    }
    let mut key = [0u8; 32];
    let mut s = state;
    for chunk in key.chunks_exact_mut(8) {
        s = s.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix(s).to_le_bytes());
    }
    key
}

/// A replayable per-path increment stream for one noise channel on one grid.
///
/// Single-owner mutable state (the step counter); cheap to create, so spawn
/// one per worker rather than sharing.
pub struct NoisePathHandle {
    spec: NoiseSpec,
    grid: Arc<Grid>,
    path_index: u64,
    step_counter: u64,
    /// Per-live-slot weight, aligned with `live_slots`.
    lambdas: Vec<f64>,
    /// Slot range that carries noise: all slots `|k| ≤ spec.k_max` in the
    /// periodic basis; cosine slots `0 ≤ k ≤ spec.k_max` in the cosine basis
    /// (the sine partners are not basis functions there).
    live_slots: std::ops::Range<usize>,
}

/// Builds a replayable handle for `path_index` at step 0.
///
/// Fails if the spec violates its channel's `δ` constraint or if the noise
/// band does not fit inside the grid band (`spec.k_max ≤ grid.k_max`).
pub fn make_common_path(
    spec: NoiseSpec,
    grid: &Arc<Grid>,
    path_index: u64,
) -> Result<NoisePathHandle> {
    spec.validate()?;
    if spec.k_max > grid.k_max() {
        return Err(Error::InvalidParameter {
            name: "noise.k_max",
            value: spec.k_max as f64,
            constraint: "noise band must fit the grid band (noise.k_max <= grid k_max)",
        });
    }
    let g_k = grid.k_max() as i64;
    let n_k = spec.k_max as i64;
    let live_slots = match grid.basis() {
        BasisKind::PeriodicTrig => ((g_k - n_k) as usize)..((g_k + n_k) as usize + 1),
        BasisKind::NeumannCosine => (g_k as usize)..((g_k + n_k) as usize + 1),
    };
    let lambdas = live_slots
        .clone()
        .map(|i| {
            let k = (i as i64 - g_k).unsigned_abs() as f64;
            lambda_sq(spec.delta, k).sqrt()
        })
        .collect();
    Ok(NoisePathHandle {
        spec,
        grid: Arc::clone(grid),
        path_index,
        step_counter: 0,
        lambdas,
        live_slots,
    })
}

impl NoisePathHandle {
    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    pub fn step_counter(&self) -> u64 {
        self.step_counter
    }

    /// Skips `n_steps` increments without generating them (the streams are
    /// counter-keyed, so skipping and discarding are the same thing).
    pub fn advance(&mut self, n_steps: u64) {
        self.step_counter += n_steps;
    }

    /// Writes the next increment's coefficients (`λ_k √dt ξ_k` on live
    /// slots, zero elsewhere) into `out` and advances the counter.
    pub fn sample_increment_into(&mut self, dt: f64, out: &mut [f64]) -> Result<()> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                constraint: "dt > 0 and finite",
            });
        }
        if out.len() != self.grid.n_modes() {
            return Err(Error::ShapeMismatch {
                got: out.len(),
                expected: self.grid.n_modes(),
            });
        }
        let key = stream_key(
            self.spec.master_seed,
            self.spec.channel.id(),
            self.path_index,
            self.step_counter,
        );
        let mut rng = ChaCha8Rng::from_seed(key);
        let sqrt_dt = dt.sqrt();
        out.fill(0.0);
        for (slot, &lam) in self.live_slots.clone().zip(&self.lambdas) {
            let xi: f64 = rng.sample(StandardNormal);
            out[slot] = lam * sqrt_dt * xi;
        }
        self.step_counter += 1;
        Ok(())
    }

    /// Next increment `ΔW` as a field; see [`Self::sample_increment_into`].
    pub fn sample_increment(&mut self, dt: f64) -> Result<SpectralField> {
        let mut field = SpectralField::zeros(&self.grid);
        self.sample_increment_into(dt, field.coeffs_mut())?;
        Ok(field)
    }
}
