//! Built-in initial conditions: constants, localized bumps, and single
//! spectral modes, all validated for the nonnegativity the model assumes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{BasisKind, Grid, SpectralField};
use crate::EPS_CLIP;

/// Built-in initial-condition families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitKind {
    /// `u₀ ≡ value` with `value ≥ 0`.
    Constant { value: f64 },
    /// A Gaussian bump centered at `center` with standard deviation `width`,
    /// projected onto the band and rescaled so the total mass `∫ u₀ dx`
    /// equals `mass`. Periodic (wrapped) distance in the periodic basis,
    /// plain distance in the cosine basis.
    GaussianBump { center: f64, width: f64, mass: f64 },
    /// `u₀ = offset + amplitude · ψ_k`; requires the nodal minimum to be
    /// nonnegative (i.e. `offset ≳ √2·|amplitude|`).
    SingleMode { k: i64, amplitude: f64, offset: f64 },
}

impl InitKind {
    /// Builds the field on `grid`, guaranteeing nodal nonnegativity.
    pub fn build(&self, grid: &Arc<Grid>) -> Result<SpectralField> {
        match *self {
            InitKind::Constant { value } => {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "init.value",
                        value,
                        constraint: "finite and >= 0",
                    });
                }
                Ok(SpectralField::constant(grid, value))
            }
            InitKind::GaussianBump { center, width, mass } => {
                build_bump(grid, center, width, mass)
            }
            InitKind::SingleMode { k, amplitude, offset } => {
                build_single_mode(grid, k, amplitude, offset)
            }
        }
    }
}

fn build_bump(grid: &Arc<Grid>, center: f64, width: f64, mass: f64) -> Result<SpectralField> {
    if !(0.0..=1.0).contains(&center) {
        return Err(Error::InvalidParameter {
            name: "init.center",
            value: center,
            constraint: "within [0, 1]",
        });
    }
    if !width.is_finite() || width <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "init.width",
            value: width,
            constraint: "finite and > 0",
        });
    }
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::InvalidParameter {
            name: "init.mass",
            value: mass,
            constraint: "finite and >= 0",
        });
    }
    let periodic = grid.basis() == BasisKind::PeriodicTrig;
    let nodal: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| {
            let mut d = (x - center).abs();
            if periodic {
                d = d.min(1.0 - d);
            }
            (-d * d / (2.0 * width * width)).exp()
        })
        .collect();
    let projected = grid.to_coeffs(&nodal)?;

    // Band-limiting a narrow bump can ring slightly negative. Tiny dips are
    // clipped away; anything visible means the bump is unresolvable here.
    let nodal_back = projected.to_nodal();
    let min = nodal_back.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-6 {
        return Err(Error::InvalidParameter {
            name: "init.width",
            value: width,
            constraint: "bump too narrow for the grid band (projection rings negative)",
        });
    }
    let field = if min < 0.0 {
        let clipped: Vec<f64> = nodal_back.iter().map(|&x| x.max(0.0)).collect();
        grid.to_coeffs(&clipped)?
    } else {
        projected
    };

    let current_mass = field.mean();
    if current_mass <= 0.0 {
        return Err(Error::Domain {
            op: "init.gaussian_bump",
            detail: format!("projected bump has nonpositive mass {current_mass}"),
        });
    }
    Ok(field.scaled(mass / current_mass))
}

fn build_single_mode(grid: &Arc<Grid>, k: i64, amplitude: f64, offset: f64) -> Result<SpectralField> {
    if grid.basis() == BasisKind::NeumannCosine && k < 0 {
        return Err(Error::InvalidParameter {
            name: "init.k",
            value: k as f64,
            constraint: "cosine-basis initial data must use modes k >= 0",
        });
    }
    if !amplitude.is_finite() || !offset.is_finite() {
        return Err(Error::InvalidParameter {
            name: "init.amplitude",
            value: amplitude,
            constraint: "finite amplitude and offset",
        });
    }
    let mut field = SpectralField::constant(grid, offset);
    if k != 0 {
        field.set_coeff(k, amplitude)?;
    } else {
        field.set_coeff(0, offset + amplitude)?;
    }
    let min = field
        .to_nodal()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min < -EPS_CLIP {
        return Err(Error::InvalidParameter {
            name: "init.offset",
            value: offset,
            constraint: "offset must dominate sqrt(2)*|amplitude| so the field stays nonnegative",
        });
    }
    Ok(field)
}
