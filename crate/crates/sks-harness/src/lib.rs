//! Monte Carlo verification harness for the stochastic chemotaxis solver.
//!
//! Each experiment turns one proved property of the continuous system —
//! mass law, moment bounds, energy estimates, twin-path uniqueness,
//! stopping-time tail decay, strong self-convergence — into a falsifiable
//! numerical check with an explicit pass criterion, returned as a
//! [`VerificationReport`].
//!
//! Conventions shared by every experiment:
//!
//! * paths are indexed; path `i` of an ensemble draws its noise from
//!   counter-keyed streams determined by `(master_seed, path_base + i)`
//!   alone, so ensembles are reproducible and disjoint blocks never share
//!   randomness;
//! * constants the theory leaves unspecified are fitted on the calibration
//!   block and frozen (see [`frozen`]), then asserted on the disjoint
//!   verification block;
//! * ensembles run in parallel with a fixed reduction order, so reports are
//!   bitwise independent of the thread count.

pub mod defaults;
pub mod experiments;
pub mod frozen;
pub mod oracle;
pub mod report;
pub mod stats;

pub use experiments::converge::{strong_convergence_study, ConvergeOptions};
pub use experiments::energy::{heat_control_check, mc_energy_bound, EnergyOptions};
pub use experiments::mass::{chi_independence, mc_mass_identity, MassOptions};
pub use experiments::moments::{fit_moment_constant, mc_l1_moment_bound, MomentOptions};
pub use experiments::stopping::{stopping_time_survey, StoppingOptions};
pub use experiments::twin::{twin_ladder, twin_run_uniqueness, TwinOptions};
pub use report::VerificationReport;
