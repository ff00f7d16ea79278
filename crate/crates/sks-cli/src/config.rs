//! Configuration loading, validation, and resolution.
//!
//! A run is configured by an optional TOML file plus command-line overrides
//! (`--seed`, `--out`, `--paths`). Parsing is strict: unknown keys are
//! errors, every provided value is validated before any computation starts,
//! and keys that the selected experiment cannot honor are rejected rather
//! than silently ignored. Defaults are documented per key on the raw
//! section structs below and mirror the canonical configuration the
//! verification experiments run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use serde_json::json;
use sks_core::{
    BasisKind, GridSpec, InitKind, ModelParams, NoiseChannel, NoiseSpec, Positivity, SolverConfig,
};
use sks_harness::defaults;

/// Which experiment a run executes; fixed by the CLI subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    VerifyMass,
    VerifyMoments,
    VerifyEnergy,
    Twin,
    Stopping,
    Converge,
    NoiseInfo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::VerifyMass => "verify-mass",
            ExperimentKind::VerifyMoments => "verify-moments",
            ExperimentKind::VerifyEnergy => "verify-energy",
            ExperimentKind::Twin => "twin",
            ExperimentKind::Stopping => "stopping",
            ExperimentKind::Converge => "converge",
            ExperimentKind::NoiseInfo => "noise-info",
        }
    }

    /// Default ensemble size when `experiment.n_paths` / `--paths` is not
    /// given (matches each experiment's canonical verification run).
    fn default_n_paths(self) -> usize {
        match self {
            ExperimentKind::Simulate | ExperimentKind::NoiseInfo => 1,
            ExperimentKind::VerifyMass | ExperimentKind::VerifyMoments => 1000,
            ExperimentKind::VerifyEnergy => 100,
            ExperimentKind::Twin => 100,
            ExperimentKind::Stopping => 250,
            ExperimentKind::Converge => 200,
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub paths: Option<usize>,
}

// ---------------------------------------------------------------------------
// Raw (as-parsed) configuration. Every field is optional so that provided
// keys can be distinguished from defaulted ones; `deny_unknown_fields`
// rejects typos everywhere.
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    /// Master seed for all noise streams. Default: 42.
    seed: Option<u64>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    init: RawInit,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    experiment: RawExperiment,
}

/// `[model]` — coefficients of the coupled system. Defaults: the canonical
/// diffusion-dominated set `r_u = r_v = 0.2`, `chi = 0.5`, `alpha = 1.0`,
/// `beta = 0.5`; the growth constant is derived from the W1 noise spectrum
/// unless `gamma_override` is set.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    r_u: Option<f64>,
    r_v: Option<f64>,
    chi: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma_override: Option<f64>,
}

/// `[noise]` — the two Q-Wiener channels. Defaults: `delta1 = 2.0`,
/// `delta2 = 3.0`, 32 modes each. Channel requirements: `delta1 > 1`,
/// `delta2 > 2`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    delta1: Option<f64>,
    delta2: Option<f64>,
    k_max1: Option<usize>,
    k_max2: Option<usize>,
}

/// `[grid]` — spectral discretization. Defaults: `n_nodes = 128`,
/// `k_max = 32`, `basis = "periodic-trig"` (the periodic sine/cosine system;
/// the alternative is `"neumann-cosine"`).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_nodes: Option<usize>,
    k_max: Option<usize>,
    basis: Option<String>,
}

/// `[solver]` — time discretization. Defaults: `dt = 1e-3`, `t_end = 0.5`,
/// `positivity = "clip"` (alternative `"off"`), `record_every = 1`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    dt: Option<f64>,
    t_end: Option<f64>,
    positivity: Option<String>,
    record_every: Option<usize>,
}

/// `[init]` — initial data for the two fields (`simulate` only; the
/// verification experiments pin their own canonical initial data).
/// Defaults: `u` = Gaussian bump (center 0.5, width 0.15, mass 1),
/// `v` = Gaussian bump (center 0.5, width 0.2, mass 0.5).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    u: Option<RawInitField>,
    v: Option<RawInitField>,
}

/// One initial field: `kind = "constant" | "gaussian-bump" | "single-mode"`
/// plus exactly the keys that kind requires (`value`; `center`/`width`/
/// `mass`; `k`/`amplitude`/`offset`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitField {
    kind: String,
    value: Option<f64>,
    center: Option<f64>,
    width: Option<f64>,
    mass: Option<f64>,
    k: Option<i64>,
    amplitude: Option<f64>,
    offset: Option<f64>,
}

/// `[output]` — artifact destination. Default: `dir = "sks-out"`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

/// `[experiment]` — experiment selection and knobs. `kind` is optional and
/// must match the subcommand when present. Defaults: `n_paths` per
/// experiment (see `ExperimentKind::default_n_paths`), `path_index = 0`,
/// `path_base = 1_000_000` (the verification block), `perturbation = 0`,
/// `threshold_multipliers = [2, 4, 8, 16, 32]`, `finest_level = 10`,
/// `coarsest_level = 6`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    kind: Option<String>,
    n_paths: Option<usize>,
    path_index: Option<u64>,
    path_base: Option<u64>,
    perturbation: Option<f64>,
    threshold_multipliers: Option<Vec<f64>>,
    finest_level: Option<u32>,
    coarsest_level: Option<u32>,
}

// ---------------------------------------------------------------------------
// Key accounting: every config key has a stable dotted path, and each
// experiment declares which paths it honors.
// ---------------------------------------------------------------------------

impl RawConfig {
    fn provided_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! track {
            ($field:expr, $name:literal) => {
                if $field.is_some() {
                    keys.push($name);
                }
            };
        }
        track!(self.seed, "seed");
        track!(self.model.r_u, "model.r_u");
        track!(self.model.r_v, "model.r_v");
        track!(self.model.chi, "model.chi");
        track!(self.model.alpha, "model.alpha");
        track!(self.model.beta, "model.beta");
        track!(self.model.gamma_override, "model.gamma_override");
        track!(self.noise.delta1, "noise.delta1");
        track!(self.noise.delta2, "noise.delta2");
        track!(self.noise.k_max1, "noise.k_max1");
        track!(self.noise.k_max2, "noise.k_max2");
        track!(self.grid.n_nodes, "grid.n_nodes");
        track!(self.grid.k_max, "grid.k_max");
        track!(self.grid.basis, "grid.basis");
        track!(self.solver.dt, "solver.dt");
        track!(self.solver.t_end, "solver.t_end");
        track!(self.solver.positivity, "solver.positivity");
        track!(self.solver.record_every, "solver.record_every");
        track!(self.init.u, "init.u");
        track!(self.init.v, "init.v");
        track!(self.output.dir, "output.dir");
        track!(self.experiment.kind, "experiment.kind");
        track!(self.experiment.n_paths, "experiment.n_paths");
        track!(self.experiment.path_index, "experiment.path_index");
        track!(self.experiment.path_base, "experiment.path_base");
        track!(self.experiment.perturbation, "experiment.perturbation");
        track!(
            self.experiment.threshold_multipliers,
            "experiment.threshold_multipliers"
        );
        track!(self.experiment.finest_level, "experiment.finest_level");
        track!(self.experiment.coarsest_level, "experiment.coarsest_level");
        keys
    }
}

/// Dotted key paths each experiment honors. The verification experiments
/// deliberately pin the model, grid, noise, and initial data to the
/// canonical configuration their frozen constants were calibrated on, so
/// only the knobs listed here may be set for them.
fn honored_keys(kind: ExperimentKind) -> &'static [&'static str] {
    const ALWAYS: [&str; 3] = ["seed", "output.dir", "experiment.kind"];
    macro_rules! keys {
        ($($extra:literal),* $(,)?) => {
            &[ALWAYS[0], ALWAYS[1], ALWAYS[2], $($extra),*]
        };
    }
    match kind {
        ExperimentKind::Simulate => keys![
            "model.r_u",
            "model.r_v",
            "model.chi",
            "model.alpha",
            "model.beta",
            "model.gamma_override",
            "noise.delta1",
            "noise.delta2",
            "noise.k_max1",
            "noise.k_max2",
            "grid.n_nodes",
            "grid.k_max",
            "grid.basis",
            "solver.dt",
            "solver.t_end",
            "solver.positivity",
            "solver.record_every",
            "init.u",
            "init.v",
            "experiment.path_index",
        ],
        ExperimentKind::VerifyMass => keys![
            "model.chi",
            "solver.dt",
            "solver.t_end",
            "experiment.n_paths",
            "experiment.path_base",
        ],
        ExperimentKind::VerifyMoments => keys![
            "solver.dt",
            "solver.t_end",
            "experiment.n_paths",
            "experiment.path_base",
        ],
        ExperimentKind::VerifyEnergy => {
            keys!["solver.dt", "solver.t_end", "experiment.n_paths"]
        }
        ExperimentKind::Twin => keys![
            "solver.dt",
            "solver.t_end",
            "experiment.n_paths",
            "experiment.path_base",
            "experiment.perturbation",
        ],
        ExperimentKind::Stopping => keys![
            "solver.dt",
            "solver.t_end",
            "experiment.n_paths",
            "experiment.threshold_multipliers",
        ],
        ExperimentKind::Converge => keys![
            "solver.t_end",
            "experiment.n_paths",
            "experiment.path_base",
            "experiment.finest_level",
            "experiment.coarsest_level",
        ],
        ExperimentKind::NoiseInfo => keys![
            "noise.delta1",
            "noise.delta2",
            "noise.k_max1",
            "noise.k_max2",
        ],
    }
}

// ---------------------------------------------------------------------------
// Resolved configuration.
// ---------------------------------------------------------------------------

/// Fully validated run configuration: core objects are already constructed
/// and checked, defaults and command-line overrides are applied.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Validated model coefficients (`simulate` only; growth constant
    /// derived from `w1` or overridden).
    pub params: ModelParams,
    pub w1: NoiseSpec,
    pub w2: NoiseSpec,
    pub grid_spec: GridSpec,
    pub solver: SolverConfig,
    pub init_u: InitKind,
    pub init_v: InitKind,
    /// Resolved ensemble size (per half for `stopping`).
    pub n_paths: usize,
    pub path_index: u64,
    pub path_base: u64,
    pub perturbation: f64,
    pub threshold_multipliers: Vec<f64>,
    pub finest_level: u32,
    pub coarsest_level: u32,
    /// χ used by `verify-mass` (0 — the quiet canonical value — unless
    /// `model.chi` is set explicitly).
    pub mass_chi: f64,
}

/// Loads, validates, and resolves the configuration for `kind`.
///
/// `path = None` means "no config file": all documented defaults, still
/// subject to the command-line overrides.
pub fn load(path: Option<&Path>, kind: ExperimentKind, over: &Overrides) -> Result<RunConfig> {
    let raw: RawConfig = match path {
        None => RawConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config file {}", p.display()))?
        }
    };

    if let Some(stated) = raw.experiment.kind.as_deref() {
        if stated != kind.name() {
            bail!(
                "experiment.kind = \"{stated}\" does not match the `{}` subcommand; \
                 drop the key or run the matching subcommand",
                kind.name()
            );
        }
    }

    validate_values(&raw)?;

    let honored = honored_keys(kind);
    for key in raw.provided_keys() {
        if !honored.contains(&key) {
            bail!(
                "config key `{key}` is not used by the `{}` experiment \
                 (verification experiments run the canonical calibrated configuration; \
                 model/noise/grid/init overrides apply to `simulate` only). \
                 Keys honored here: {}",
                kind.name(),
                honored.join(", ")
            );
        }
    }
    if over.paths.is_some() && !honored.contains(&"experiment.n_paths") {
        bail!(
            "--paths does not apply to the `{}` experiment{}",
            kind.name(),
            if kind == ExperimentKind::Simulate {
                " (it runs a single trajectory; set experiment.path_index to choose the path)"
            } else {
                ""
            }
        );
    }

    resolve(raw, kind, over)
}

/// Range/constraint checks for every provided value, regardless of which
/// experiment runs; error messages carry the dotted key path.
fn validate_values(raw: &RawConfig) -> Result<()> {
    if let Some(p) = raw.experiment.n_paths {
        if p == 0 {
            bail!("experiment.n_paths = 0: at least one path is required");
        }
    }
    if let Some(p) = raw.experiment.perturbation {
        if !p.is_finite() || !(0.0..1.0).contains(&p) {
            bail!(
                "experiment.perturbation = {p}: must be finite and in [0, 1) \
                 (the multiplicative perturbation must keep the field nonnegative)"
            );
        }
    }
    if let Some(ms) = &raw.experiment.threshold_multipliers {
        if ms.is_empty() {
            bail!("experiment.threshold_multipliers: at least one multiplier is required");
        }
        for &m in ms {
            if !m.is_finite() || m <= 1.0 {
                bail!(
                    "experiment.threshold_multipliers contains {m}: \
                     every multiplier must be finite and > 1"
                );
            }
        }
        if ms.windows(2).any(|w| w[1] <= w[0]) {
            bail!("experiment.threshold_multipliers must be strictly increasing");
        }
    }
    let finest = raw.experiment.finest_level.unwrap_or(10);
    let coarsest = raw.experiment.coarsest_level.unwrap_or(6);
    if !(1..=16).contains(&finest) || coarsest < 1 || coarsest + 2 > finest {
        bail!(
            "experiment.finest_level = {finest}, experiment.coarsest_level = {coarsest}: \
             need 1 <= coarsest_level <= finest_level - 2 <= 14 \
             (at least two ladder rungs are required to fit a convergence slope)"
        );
    }
    if let Some(b) = &raw.grid.basis {
        parse_basis(b)?;
    }
    if let Some(p) = &raw.solver.positivity {
        parse_positivity(p)?;
    }
    if let Some(r) = raw.solver.record_every {
        if r == 0 {
            bail!("solver.record_every = 0: must be at least 1");
        }
    }
    let n_nodes = raw.grid.n_nodes.unwrap_or(defaults::GRID_SPEC.n_nodes);
    let k_max = raw.grid.k_max.unwrap_or(defaults::GRID_SPEC.k_max);
    if n_nodes < 2 * k_max + 1 {
        bail!(
            "grid.n_nodes = {n_nodes}: must satisfy n_nodes >= 2*k_max + 1 = {}",
            2 * k_max + 1
        );
    }
    for (key, field) in [("init.u", &raw.init.u), ("init.v", &raw.init.v)] {
        if let Some(f) = field {
            resolve_init(f, key)?;
        }
    }
    Ok(())
}

fn parse_basis(s: &str) -> Result<BasisKind> {
    match s {
        "periodic-trig" => Ok(BasisKind::PeriodicTrig),
        "neumann-cosine" => Ok(BasisKind::NeumannCosine),
        other => bail!(
            "grid.basis = \"{other}\": expected \"periodic-trig\" or \"neumann-cosine\""
        ),
    }
}

fn parse_positivity(s: &str) -> Result<Positivity> {
    match s {
        "clip" => Ok(Positivity::Clip),
        "off" => Ok(Positivity::Off),
        other => bail!("solver.positivity = \"{other}\": expected \"clip\" or \"off\""),
    }
}

fn resolve_init(f: &RawInitField, key: &str) -> Result<InitKind> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| anyhow!("{key}.{name} is required for kind \"{}\"", f.kind))
    };
    let forbid = |absent: &[(&str, bool)]| -> Result<()> {
        for (name, present) in absent {
            if *present {
                bail!("{key}.{name} does not apply to kind \"{}\"", f.kind);
            }
        }
        Ok(())
    };
    match f.kind.as_str() {
        "constant" => {
            forbid(&[
                ("center", f.center.is_some()),
                ("width", f.width.is_some()),
                ("mass", f.mass.is_some()),
                ("k", f.k.is_some()),
                ("amplitude", f.amplitude.is_some()),
                ("offset", f.offset.is_some()),
            ])?;
            Ok(InitKind::Constant {
                value: need(f.value, "value")?,
            })
        }
        "gaussian-bump" => {
            forbid(&[
                ("value", f.value.is_some()),
                ("k", f.k.is_some()),
                ("amplitude", f.amplitude.is_some()),
                ("offset", f.offset.is_some()),
            ])?;
            Ok(InitKind::GaussianBump {
                center: need(f.center, "center")?,
                width: need(f.width, "width")?,
                mass: need(f.mass, "mass")?,
            })
        }
        "single-mode" => {
            forbid(&[
                ("value", f.value.is_some()),
                ("center", f.center.is_some()),
                ("width", f.width.is_some()),
                ("mass", f.mass.is_some()),
            ])?;
            Ok(InitKind::SingleMode {
                k: f.k.ok_or_else(|| {
                    anyhow!("{key}.k is required for kind \"single-mode\"")
                })?,
                amplitude: need(f.amplitude, "amplitude")?,
                offset: need(f.offset, "offset")?,
            })
        }
        other => bail!(
            "{key}.kind = \"{other}\": expected \"constant\", \"gaussian-bump\", \
             or \"single-mode\""
        ),
    }
}

fn resolve(raw: RawConfig, kind: ExperimentKind, over: &Overrides) -> Result<RunConfig> {
    let seed = over.seed.or(raw.seed).unwrap_or(defaults::MASTER_SEED);
    let output_dir = over
        .out
        .clone()
        .or(raw.output.dir)
        .unwrap_or_else(|| PathBuf::from("sks-out"));

    let w1 = NoiseSpec {
        delta: raw.noise.delta1.unwrap_or(2.0),
        k_max: raw.noise.k_max1.unwrap_or(32),
        master_seed: seed,
        channel: NoiseChannel::W1,
    };
    w1.validate().context("config key noise.delta1")?;
    let w2 = NoiseSpec {
        delta: raw.noise.delta2.unwrap_or(3.0),
        k_max: raw.noise.k_max2.unwrap_or(32),
        master_seed: seed,
        channel: NoiseChannel::W2,
    };
    w2.validate().context("config key noise.delta2")?;

    let grid_spec = GridSpec {
        n_nodes: raw.grid.n_nodes.unwrap_or(defaults::GRID_SPEC.n_nodes),
        k_max: raw.grid.k_max.unwrap_or(defaults::GRID_SPEC.k_max),
        basis: match &raw.grid.basis {
            Some(s) => parse_basis(s)?,
            None => defaults::GRID_SPEC.basis,
        },
    };
    for (key, k_noise) in [("noise.k_max1", w1.k_max), ("noise.k_max2", w2.k_max)] {
        if k_noise > grid_spec.k_max {
            bail!(
                "config key {key} = {k_noise}: noise modes must fit the grid band \
                 (grid.k_max = {})",
                grid_spec.k_max
            );
        }
    }

    let solver = SolverConfig {
        dt: raw.solver.dt.unwrap_or(defaults::DT),
        t_end: raw.solver.t_end.unwrap_or(defaults::T_END),
        positivity: match &raw.solver.positivity {
            Some(s) => parse_positivity(s)?,
            None => Positivity::Clip,
        },
        record_every: raw.solver.record_every.unwrap_or(1),
    };
    solver.validate().context("config section [solver]")?;

    let mut params = ModelParams::new(
        raw.model.r_u.unwrap_or(0.2),
        raw.model.r_v.unwrap_or(0.2),
        raw.model.chi.unwrap_or(0.5),
        raw.model.alpha.unwrap_or(1.0),
        raw.model.beta.unwrap_or(0.5),
        &w1,
    )
    .context("config section [model]")?;
    if let Some(g) = raw.model.gamma_override {
        params = params
            .with_gamma_override(g)
            .context("config key model.gamma_override")?;
    }

    let init_u = match &raw.init.u {
        Some(f) => resolve_init(f, "init.u")?,
        None => InitKind::GaussianBump {
            center: 0.5,
            width: 0.15,
            mass: 1.0,
        },
    };
    let init_v = match &raw.init.v {
        Some(f) => resolve_init(f, "init.v")?,
        None => InitKind::GaussianBump {
            center: 0.5,
            width: 0.2,
            mass: 0.5,
        },
    };

    Ok(RunConfig {
        kind,
        seed,
        output_dir,
        params,
        w1,
        w2,
        grid_spec,
        solver,
        init_u,
        init_v,
        n_paths: over
            .paths
            .or(raw.experiment.n_paths)
            .unwrap_or_else(|| kind.default_n_paths()),
        path_index: raw.experiment.path_index.unwrap_or(0),
        path_base: raw
            .experiment
            .path_base
            .unwrap_or(defaults::VERIFICATION_PATH_BASE),
        perturbation: raw.experiment.perturbation.unwrap_or(0.0),
        threshold_multipliers: raw
            .experiment
            .threshold_multipliers
            .unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0, 32.0]),
        finest_level: raw.experiment.finest_level.unwrap_or(10),
        coarsest_level: raw.experiment.coarsest_level.unwrap_or(6),
        mass_chi: raw.model.chi.unwrap_or(0.0),
    })
}

impl RunConfig {
    /// Deterministic JSON echo of exactly the settings the selected
    /// experiment will use (embedded in the run manifest).
    pub fn echo(&self) -> serde_json::Value {
        let base = json!({
            "experiment": self.kind.name(),
            "seed": self.seed,
            "output_dir": self.output_dir.display().to_string(),
        });
        let mut obj = base;
        let extra = match self.kind {
            ExperimentKind::Simulate => json!({
                "model": self.params,
                "noise": { "w1": self.w1, "w2": self.w2 },
                "grid": self.grid_spec,
                "solver": self.solver,
                "init": { "u": self.init_u, "v": self.init_v },
                "path_index": self.path_index,
            }),
            ExperimentKind::VerifyMass => json!({
                "n_paths": self.n_paths,
                "dt": self.solver.dt,
                "t_end": self.solver.t_end,
                "path_base": self.path_base,
                "chi": self.mass_chi,
            }),
            ExperimentKind::VerifyMoments => json!({
                "n_paths": self.n_paths,
                "dt": self.solver.dt,
                "t_end": self.solver.t_end,
                "path_base": self.path_base,
                "p_moment": 2.0,
            }),
            ExperimentKind::VerifyEnergy => json!({
                "n_paths": self.n_paths,
                "dt": self.solver.dt,
                "t_end": self.solver.t_end,
            }),
            ExperimentKind::Twin => json!({
                "n_paths": self.n_paths,
                "dt": self.solver.dt,
                "t_end": self.solver.t_end,
                "path_base": self.path_base,
                "perturbation": self.perturbation,
            }),
            ExperimentKind::Stopping => json!({
                "n_paths_per_half": self.n_paths,
                "dt": self.solver.dt,
                "t_end": self.solver.t_end,
                "threshold_multipliers": &self.threshold_multipliers,
            }),
            ExperimentKind::Converge => json!({
                "n_paths": self.n_paths,
                "t_end": self.solver.t_end,
                "finest_level": self.finest_level,
                "coarsest_level": self.coarsest_level,
                "path_base": self.path_base,
            }),
            ExperimentKind::NoiseInfo => json!({
                "noise": { "w1": self.w1, "w2": self.w2 },
            }),
        };
        let (obj_map, extra_map) = (
            obj.as_object_mut().expect("echo base is an object"),
            extra.as_object().expect("echo extra is an object"),
        );
        for (k, v) in extra_map {
            obj_map.insert(k.clone(), v.clone());
        }
        obj
    }

    /// Text block for `noise-info`: per-channel spectral weights, growth
    /// constants, and Hilbert–Schmidt embedding norms.
    pub fn noise_info_text(&self) -> String {
        let mut s = String::new();
        for (label, gamma_name, spec) in
            [("W1", "gamma1", &self.w1), ("W2", "gamma2", &self.w2)]
        {
            let _ = writeln!(
                s,
                "channel {label}: delta = {}, k_max = {}",
                spec.delta, spec.k_max
            );
            let _ = writeln!(
                s,
                "  {gamma_name} = {}  (growth constant 1 + 4*sum_k lambda_k^2)",
                spec.gamma_constant()
            );
            let _ = writeln!(s, "  hs_embedding_norm = {}", spec.hs_embedding_norm());
            let _ = writeln!(s, "  k  lambda_k");
            for k in 0..=spec.k_max {
                let lambda = spec
                    .lambda(k as i64)
                    .expect("modes up to k_max are in range");
                let _ = writeln!(s, "  {k}  {lambda}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every whitelist entry must be a real key path (typo guard).
    #[test]
    fn honored_keys_are_known_keys() {
        let all = [
            "seed",
            "model.r_u",
            "model.r_v",
            "model.chi",
            "model.alpha",
            "model.beta",
            "model.gamma_override",
            "noise.delta1",
            "noise.delta2",
            "noise.k_max1",
            "noise.k_max2",
            "grid.n_nodes",
            "grid.k_max",
            "grid.basis",
            "solver.dt",
            "solver.t_end",
            "solver.positivity",
            "solver.record_every",
            "init.u",
            "init.v",
            "output.dir",
            "experiment.kind",
            "experiment.n_paths",
            "experiment.path_index",
            "experiment.path_base",
            "experiment.perturbation",
            "experiment.threshold_multipliers",
            "experiment.finest_level",
            "experiment.coarsest_level",
        ];
        for kind in [
            ExperimentKind::Simulate,
            ExperimentKind::VerifyMass,
            ExperimentKind::VerifyMoments,
            ExperimentKind::VerifyEnergy,
            ExperimentKind::Twin,
            ExperimentKind::Stopping,
            ExperimentKind::Converge,
            ExperimentKind::NoiseInfo,
        ] {
            for key in honored_keys(kind) {
                assert!(all.contains(key), "{key} is not a known config key");
            }
        }
    }

    #[test]
    fn defaults_resolve_without_a_file() {
        let cfg = load(None, ExperimentKind::VerifyMass, &Overrides::default()).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.n_paths, 1000);
        assert_eq!(cfg.solver.dt, 1e-3);
        assert_eq!(cfg.solver.t_end, 0.5);
        assert_eq!(cfg.mass_chi, 0.0);
        assert_eq!(cfg.path_base, defaults::VERIFICATION_PATH_BASE);
    }

    #[test]
    fn init_field_rules_are_enforced() {
        let raw = RawInitField {
            kind: "constant".into(),
            value: Some(1.0),
            center: None,
            width: None,
            mass: None,
            k: None,
            amplitude: None,
            offset: None,
        };
        assert_eq!(
            resolve_init(&raw, "init.u").unwrap(),
            InitKind::Constant { value: 1.0 }
        );

        let mixed = RawInitField {
            center: Some(0.5),
            ..raw
        };
        let err = resolve_init(&mixed, "init.u").unwrap_err().to_string();
        assert!(err.contains("init.u.center"), "got: {err}");

        let missing = RawInitField {
            kind: "gaussian-bump".into(),
            value: None,
            center: Some(0.5),
            width: Some(0.1),
            mass: None,
            k: None,
            amplitude: None,
            offset: None,
        };
        let err = resolve_init(&missing, "init.v").unwrap_err().to_string();
        assert!(err.contains("init.v.mass"), "got: {err}");
    }

    #[test]
    fn echo_is_deterministic_and_names_the_experiment() {
        let cfg = load(None, ExperimentKind::Twin, &Overrides::default()).unwrap();
        let a = serde_json::to_string(&cfg.echo()).unwrap();
        let b = serde_json::to_string(&cfg.echo()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"experiment\":\"twin\""));
    }
}
