//! Orthonormal trigonometric bases on [0, 1], nodal grids, and the
//! coefficient-space operators used by the solver and the harness.
//!
//! ## Bases
//!
//! * [`BasisKind::PeriodicTrig`] — the periodic system
//!   `ψ_0 = 1`, `ψ_k = √2 sin(2πkx)` for `k ≥ 1`, `ψ_{−k} = √2 cos(2πkx)`
//!   for `k ≥ 1`, with Laplacian eigenvalues `μ_k = (2πk)²` and equispaced
//!   nodes `x_j = j/n`.
//! * [`BasisKind::NeumannCosine`] — the half-range system `ψ_0 = 1`,
//!   `ψ_k = √2 cos(kπx)` for `k ≥ 1`, with `μ_k = (kπ)²` and midpoint nodes
//!   `x_j = (j + ½)/n`. Negative slots hold the derivative partners
//!   `√2 sin(|k|πx)`: differentiation maps cosine slots onto them exactly and
//!   back. They are populated only by differentiation — nodal analysis
//!   projects onto the cosine slots.
//!
//! ## Quadrature and transforms
//!
//! All integrals use the uniform rule with weight `1/n`. Over a full period
//! (rectangle rule, periodic basis) this is exact for trigonometric
//! polynomials of bandwidth `< n`; with midpoint nodes (cosine basis) it is
//! exact for cosine polynomials of bandwidth `< 2n`. Since grids require
//! `n ≥ 2 k_max + 1`, analysis of band-limited fields is exact, and products
//! of two band-limited fields can be analyzed exactly as well (the periodic
//! basis pads to an internal grid of `3 k_max + 2` nodes when `n ≤ 3 k_max`;
//! the cosine basis never needs padding).
//!
//! Transforms are dense matrix–vector products against precomputed basis
//! tables. At the mode counts this project targets (`k_max` up to a few
//! hundred) that is exact by construction, places no power-of-two constraint
//! on `n_nodes`, and is cheap enough that the Monte Carlo harness is
//! bound by path counts, not transform setup.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Which orthonormal system the grid carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// Periodic sine/cosine system, eigenvalues `(2πk)²`. The default.
    PeriodicTrig,
    /// Half-range cosine system (homogeneous Neumann), eigenvalues `(kπ)²`.
    NeumannCosine,
}

/// Plain-data description of a spectral grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of quadrature nodes; must satisfy `n_nodes ≥ 2 k_max + 1`.
    pub n_nodes: usize,
    /// Spectral band: coefficients live on `k ∈ {−k_max, …, k_max}`.
    pub k_max: usize,
    pub basis: BasisKind,
}

/// Slot subsets used by forward transforms in the cosine basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SlotFilter {
    /// Every slot (periodic basis: the full orthonormal system).
    All,
    /// Cosine slots `k ≥ 0` only.
    CosOnly,
    /// Sine-partner slots `k < 0` only.
    SinOnly,
}

/// Parity type of a field in the cosine basis (which slot family is live).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CosineParity {
    Even,
    Odd,
}

fn eval_basis(basis: BasisKind, k: i64, x: f64) -> f64 {
    match basis {
        BasisKind::PeriodicTrig => {
            if k == 0 {
                1.0
            } else if k > 0 {
                SQRT_2 * (TWO_PI * k as f64 * x).sin()
            } else {
                SQRT_2 * (TWO_PI * (-k) as f64 * x).cos()
            }
        }
        BasisKind::NeumannCosine => {
            if k == 0 {
                1.0
            } else if k > 0 {
                SQRT_2 * (PI * k as f64 * x).cos()
            } else {
                SQRT_2 * (PI * (-k) as f64 * x).sin()
            }
        }
    }
}

struct PadTables {
    n: usize,
    /// `n × m` nodal evaluation table.
    eval: Vec<f64>,
    /// `m × n` forward rows, prescaled by `1/n`.
    fwd: Vec<f64>,
}

/// A spectral grid: nodes, eigenvalues, and dense transform tables.
///
/// Grids are immutable and shared (`Arc`) between the fields built on them.
pub struct Grid {
    spec: GridSpec,
    nodes: Vec<f64>,
    /// Laplacian eigenvalue per slot (`μ_{|k|}`), length `2 k_max + 1`.
    mu: Vec<f64>,
    /// `n_nodes × m` evaluation table, row-major by node.
    eval: Vec<f64>,
    /// `m × n_nodes` forward rows, prescaled by `1/n_nodes`.
    fwd: Vec<f64>,
    /// Padded tables for dealiased products (periodic basis, small grids).
    pad: Option<PadTables>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Grid({:?})", self.spec)
    }
}

fn build_tables(basis: BasisKind, k_max: usize, nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let m = 2 * k_max + 1;
    let mut eval = vec![0.0; n * m];
    for (j, &x) in nodes.iter().enumerate() {
        for i in 0..m {
            let k = i as i64 - k_max as i64;
            eval[j * m + i] = eval_basis(basis, k, x);
        }
    }
    let inv_n = 1.0 / n as f64;
    let mut fwd = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            fwd[i * n + j] = eval[j * m + i] * inv_n;
        }
    }
    (eval, fwd)
}

fn make_nodes(basis: BasisKind, n: usize) -> Vec<f64> {
    match basis {
        BasisKind::PeriodicTrig => (0..n).map(|j| j as f64 / n as f64).collect(),
        BasisKind::NeumannCosine => (0..n).map(|j| (j as f64 + 0.5) / n as f64).collect(),
    }
}

impl Grid {
    /// Builds the grid, validating `k_max ≥ 1` and `n_nodes ≥ 2 k_max + 1`.
    pub fn new(spec: GridSpec) -> Result<Arc<Grid>> {
        if spec.k_max < 1 {
            return Err(Error::InvalidParameter {
                name: "k_max",
                value: spec.k_max as f64,
                constraint: "k_max >= 1",
            });
        }
        if spec.n_nodes < 2 * spec.k_max + 1 {
            return Err(Error::InvalidParameter {
                name: "n_nodes",
                value: spec.n_nodes as f64,
                constraint: "n_nodes >= 2*k_max + 1 (exact analysis of band-limited fields)",
            });
        }
        let nodes = make_nodes(spec.basis, spec.n_nodes);
        let m = 2 * spec.k_max + 1;
        let mut mu = vec![0.0; m];
        for (i, mu_i) in mu.iter_mut().enumerate() {
            let k = (i as i64 - spec.k_max as i64).unsigned_abs() as f64;
            let w = match spec.basis {
                BasisKind::PeriodicTrig => TWO_PI * k,
                BasisKind::NeumannCosine => PI * k,
            };
            *mu_i = w * w;
        }
        let (eval, fwd) = build_tables(spec.basis, spec.k_max, &nodes);
        // Quadrature of a triple product (two fields plus a test function) has
        // bandwidth 3 k_max; the rectangle rule needs n > 3 k_max for that to
        // be exact, so small periodic grids get a padded product table. The
        // midpoint rule of the cosine basis is exact up to bandwidth 2n − 1,
        // which always covers 3 k_max once n ≥ 2 k_max + 1.
        let pad = if spec.basis == BasisKind::PeriodicTrig && spec.n_nodes < 3 * spec.k_max + 1 {
            let n_pad = 3 * spec.k_max + 2;
            let pad_nodes = make_nodes(spec.basis, n_pad);
            let (p_eval, p_fwd) = build_tables(spec.basis, spec.k_max, &pad_nodes);
            Some(PadTables {
                n: n_pad,
                eval: p_eval,
                fwd: p_fwd,
            })
        } else {
            None
        };
        Ok(Arc::new(Grid {
            spec,
            nodes,
            mu,
            eval,
            fwd,
            pad,
        }))
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn n_nodes(&self) -> usize {
        self.spec.n_nodes
    }

    pub fn k_max(&self) -> usize {
        self.spec.k_max
    }

    pub fn basis(&self) -> BasisKind {
        self.spec.basis
    }

    /// Number of coefficient slots, `2 k_max + 1`.
    pub fn n_modes(&self) -> usize {
        2 * self.spec.k_max + 1
    }

    /// Quadrature nodes in [0, 1).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Laplacian eigenvalues per slot (index `k + k_max`).
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Slot index of mode `k`, validating `|k| ≤ k_max`.
    pub fn idx(&self, k: i64) -> Result<usize> {
        let k_max = self.spec.k_max as i64;
        if k.abs() > k_max {
            return Err(Error::ModeOutOfRange {
                k,
                k_max: self.spec.k_max,
            });
        }
        Ok((k + k_max) as usize)
    }

    /// Evaluates basis function `ψ_k` at `x` (any point, not just nodes).
    ///
    /// In the cosine basis, `k < 0` addresses the derivative partners
    /// `√2 sin(|k|πx)`.
    pub fn basis_eval(&self, k: i64, x: f64) -> Result<f64> {
        self.idx(k)?;
        Ok(eval_basis(self.spec.basis, k, x))
    }

    /// Quadrature average `(1/n) Σ_j f_j` of nodal values.
    pub fn quadrature(&self, nodal: &[f64]) -> Result<f64> {
        if nodal.len() != self.spec.n_nodes {
            return Err(Error::ShapeMismatch {
                got: nodal.len(),
                expected: self.spec.n_nodes,
            });
        }
        Ok(nodal.iter().sum::<f64>() / self.spec.n_nodes as f64)
    }

    /// Exact-quadrature analysis of nodal data into a coefficient field.
    ///
    /// Periodic basis: projects onto every slot. Cosine basis: projects onto
    /// the cosine slots (`k ≥ 0`); the sine partners stay zero.
    pub fn to_coeffs(self: &Arc<Self>, nodal: &[f64]) -> Result<SpectralField> {
        if nodal.len() != self.spec.n_nodes {
            return Err(Error::ShapeMismatch {
                got: nodal.len(),
                expected: self.spec.n_nodes,
            });
        }
        let filter = match self.spec.basis {
            BasisKind::PeriodicTrig => SlotFilter::All,
            BasisKind::NeumannCosine => SlotFilter::CosOnly,
        };
        let mut coeffs = vec![0.0; self.n_modes()];
        self.forward_into(nodal, filter, &mut coeffs);
        Ok(SpectralField {
            grid: Arc::clone(self),
            coeffs,
        })
    }

    /// Slot range selected by a filter.
    fn filter_range(&self, filter: SlotFilter) -> std::ops::Range<usize> {
        let k_max = self.spec.k_max;
        match filter {
            SlotFilter::All => 0..self.n_modes(),
            SlotFilter::CosOnly => k_max..self.n_modes(),
            SlotFilter::SinOnly => 0..k_max,
        }
    }

    /// `out[i] = (1/n) Σ_j nodal_j ψ_i(x_j)` over the filtered slots; other
    /// slots are zeroed. `nodal.len()` must equal `n_nodes`.
    pub(crate) fn forward_into(&self, nodal: &[f64], filter: SlotFilter, out: &mut [f64]) {
        let n = self.spec.n_nodes;
        debug_assert_eq!(nodal.len(), n);
        debug_assert_eq!(out.len(), self.n_modes());
        out.fill(0.0);
        for i in self.filter_range(filter) {
            let row = &self.fwd[i * n..(i + 1) * n];
            out[i] = dot(row, nodal);
        }
    }

    /// Nodal synthesis `out_j = Σ_i coeffs_i ψ_i(x_j)` on the grid's nodes.
    pub(crate) fn eval_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let m = self.n_modes();
        debug_assert_eq!(coeffs.len(), m);
        debug_assert_eq!(out.len(), self.spec.n_nodes);
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.eval[j * m..(j + 1) * m];
            *o = dot(row, coeffs);
        }
    }

    /// Node count of the product-quadrature grid (the padded table when one
    /// exists, the grid's own nodes otherwise).
    pub(crate) fn pad_nodes(&self) -> usize {
        self.pad.as_ref().map(|p| p.n).unwrap_or(self.spec.n_nodes)
    }

    /// Synthesis on the product-quadrature grid: pad tables when present,
    /// own tables otherwise. `out.len()` must equal [`Self::pad_nodes`].
    pub(crate) fn work_eval_into(&self, coeffs: &[f64], out: &mut [f64]) {
        if self.pad.is_some() {
            self.pad_eval_into(coeffs, out);
        } else {
            self.eval_into(coeffs, out);
        }
    }

    /// Analysis from the product-quadrature grid; counterpart of
    /// [`Self::work_eval_into`].
    pub(crate) fn work_forward_into(&self, nodal: &[f64], filter: SlotFilter, out: &mut [f64]) {
        if self.pad.is_some() {
            self.pad_forward_into(nodal, filter, out);
        } else {
            self.forward_into(nodal, filter, out);
        }
    }

    fn pad_eval_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let pad = self.pad.as_ref().expect("pad tables present");
        let m = self.n_modes();
        debug_assert_eq!(out.len(), pad.n);
        for (j, o) in out.iter_mut().enumerate() {
            let row = &pad.eval[j * m..(j + 1) * m];
            *o = dot(row, coeffs);
        }
    }

    fn pad_forward_into(&self, nodal: &[f64], filter: SlotFilter, out: &mut [f64]) {
        let pad = self.pad.as_ref().expect("pad tables present");
        let n = pad.n;
        debug_assert_eq!(nodal.len(), n);
        out.fill(0.0);
        for i in self.filter_range(filter) {
            let row = &pad.fwd[i * n..(i + 1) * n];
            out[i] = dot(row, nodal);
        }
    }

    /// Forward-analysis filter appropriate for the product of two fields with
    /// the given cosine parities.
    fn product_filter(a: CosineParity, b: CosineParity) -> SlotFilter {
        match (a, b) {
            (CosineParity::Even, CosineParity::Even) | (CosineParity::Odd, CosineParity::Odd) => {
                SlotFilter::CosOnly
            }
            _ => SlotFilter::SinOnly,
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// The in-place derivative coefficient map `d/dx` for a basis.
///
/// Periodic: `sin_k ↦ +2πk cos_k`-slot, `cos_k ↦ −2πk sin_k`-slot.
/// Cosine: `cos_k ↦ −kπ sin_k`-partner, `sin_k ↦ +kπ cos_k`. Slot 0 maps to
/// zero in both bases, so derivatives never carry mean mass.
pub(crate) fn derivative_into(basis: BasisKind, k_max: usize, a: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.len(), 2 * k_max + 1);
    debug_assert_eq!(out.len(), a.len());
    let idx = |k: i64| (k + k_max as i64) as usize;
    out[idx(0)] = 0.0;
    match basis {
        BasisKind::PeriodicTrig => {
            for k in 1..=k_max as i64 {
                let w = TWO_PI * k as f64;
                out[idx(-k)] = w * a[idx(k)];
                out[idx(k)] = -w * a[idx(-k)];
            }
        }
        BasisKind::NeumannCosine => {
            for k in 1..=k_max as i64 {
                let w = PI * k as f64;
                out[idx(-k)] = -w * a[idx(k)];
                out[idx(k)] = w * a[idx(-k)];
            }
        }
    }
}

/// A field stored as coefficients against the grid's basis,
/// `u = Σ_{|k| ≤ k_max} a_k ψ_k`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<f64>,
}

fn check_same_grid(a: &SpectralField, b: &SpectralField) -> Result<()> {
    if a.grid.spec != b.grid.spec {
        return Err(Error::GridMismatch {
            left: format!("{:?}", a.grid.spec),
            right: format!("{:?}", b.grid.spec),
        });
    }
    Ok(())
}

impl SpectralField {
    /// The zero field.
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralField {
            grid: Arc::clone(grid),
            coeffs: vec![0.0; grid.n_modes()],
        }
    }

    /// The constant field `u ≡ c` (only the mean slot is set).
    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        let i0 = grid.k_max();
        f.coeffs[i0] = c;
        f
    }

    /// Builds a field from a full coefficient vector (length `2 k_max + 1`,
    /// slot order `k = −k_max … k_max`).
    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.n_modes() {
            return Err(Error::ShapeMismatch {
                got: coeffs.len(),
                expected: grid.n_modes(),
            });
        }
        Ok(SpectralField {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient of mode `k`.
    pub fn coeff(&self, k: i64) -> Result<f64> {
        Ok(self.coeffs[self.grid.idx(k)?])
    }

    pub fn set_coeff(&mut self, k: i64, value: f64) -> Result<()> {
        let i = self.grid.idx(k)?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Mean-mode coefficient `a_0 = ∫ u dx` (the basis is orthonormal and
    /// `ψ_0 ≡ 1`).
    pub fn mean(&self) -> f64 {
        self.coeffs[self.grid.k_max()]
    }

    /// Nodal synthesis on the grid's quadrature nodes.
    pub fn to_nodal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n_nodes()];
        self.grid.eval_into(&self.coeffs, &mut out);
        out
    }

    /// Pointwise evaluation `Σ_k a_k ψ_k(x)` at an arbitrary point.
    pub fn eval_at(&self, x: f64) -> f64 {
        let k_max = self.grid.k_max() as i64;
        let mut acc = 0.0;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a != 0.0 {
                let k = i as i64 - k_max;
                acc += a * eval_basis(self.grid.basis(), k, x);
            }
        }
        acc
    }

    /// True when every coefficient is (signed) zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0.0)
    }

    /// The spectral derivative `d/dx u` (exact for band-limited fields).
    pub fn derivative(&self) -> Self {
        let mut out = Self::zeros(&self.grid);
        derivative_into(
            self.grid.basis(),
            self.grid.k_max(),
            &self.coeffs,
            &mut out.coeffs,
        );
        out
    }

    /// The diffusion operator `ν Δu`, i.e. `a_k ↦ −ν μ_k a_k`.
    ///
    /// `ν` must be finite and nonnegative.
    pub fn laplacian(&self, diffusivity: f64) -> Result<Self> {
        if !diffusivity.is_finite() || diffusivity < 0.0 {
            return Err(Error::InvalidParameter {
                name: "diffusivity",
                value: diffusivity,
                constraint: "finite and >= 0",
            });
        }
        let mut out = self.clone();
        for (o, &m) in out.coeffs.iter_mut().zip(self.grid.mu()) {
            *o *= -diffusivity * m;
        }
        Ok(out)
    }

    /// Bessel-weighted Sobolev norm `(Σ_k (1 + μ_k)^κ a_k²)^{1/2}`.
    ///
    /// `κ = 0` is the L² (Parseval) norm, `κ = 1` the H¹ norm, `κ = 2` the
    /// H² norm. Valid for fields supported on a single slot family; in the
    /// cosine basis a field mixing cosine and sine partners has no meaning
    /// as a single norm (the two families are not mutually orthogonal).
    pub fn sobolev_norm(&self, kappa: f64) -> f64 {
        let mu = self.grid.mu();
        let mut acc = 0.0;
        if kappa == 0.0 {
            for &a in &self.coeffs {
                acc += a * a;
            }
        } else if kappa == 1.0 {
            for (&a, &m) in self.coeffs.iter().zip(mu) {
                acc += (1.0 + m) * a * a;
            }
        } else if kappa == 2.0 {
            for (&a, &m) in self.coeffs.iter().zip(mu) {
                let w = 1.0 + m;
                acc += w * w * a * a;
            }
        } else {
            for (&a, &m) in self.coeffs.iter().zip(mu) {
                acc += (1.0 + m).powf(kappa) * a * a;
            }
        }
        acc.sqrt()
    }

    /// L² norm `(Σ_k a_k²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `self + c · other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        check_same_grid(self, other)?;
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_grid(self, other)?;
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(self, other)?;
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Parity of a cosine-basis field: `Even` when only cosine slots are
    /// live, `Odd` when only sine partners are. The zero field counts as
    /// even. Mixed fields are rejected — the cosine family is not closed
    /// under products with mixed parity.
    fn cosine_parity(&self) -> Result<CosineParity> {
        let k_max = self.grid.k_max();
        let sin_live = self.coeffs[..k_max].iter().any(|&a| a != 0.0);
        let cos_live = self.coeffs[k_max..].iter().any(|&a| a != 0.0);
        match (sin_live, cos_live) {
            (false, _) => Ok(CosineParity::Even),
            (true, false) => Ok(CosineParity::Odd),
            (true, true) => Err(Error::Domain {
                op: "multiply_dealiased",
                detail: "cosine-basis field mixes cosine and sine-partner slots; \
                         products of mixed-parity fields are not representable"
                    .to_string(),
            }),
        }
    }

    /// Pointwise (nodal) product of two band-limited fields, analyzed back
    /// onto the band `|k| ≤ k_max` without aliasing.
    ///
    /// The product has bandwidth `2 k_max`; its retained coefficients are
    /// computed by quadrature that is exact for the triple-product bandwidth
    /// `3 k_max` (padded table on small periodic grids, midpoint rule in the
    /// cosine basis). Truncation to the band is the usual Galerkin
    /// projection.
    pub fn multiply_dealiased(&self, other: &Self) -> Result<Self> {
        check_same_grid(self, other)?;
        let grid = &self.grid;
        let mut out = Self::zeros(grid);
        match grid.basis() {
            BasisKind::PeriodicTrig => {
                if grid.pad.is_some() {
                    let n = grid.pad_nodes();
                    let mut fa = vec![0.0; n];
                    let mut fb = vec![0.0; n];
                    grid.pad_eval_into(&self.coeffs, &mut fa);
                    grid.pad_eval_into(&other.coeffs, &mut fb);
                    for (a, &b) in fa.iter_mut().zip(&fb) {
                        *a *= b;
                    }
                    grid.pad_forward_into(&fa, SlotFilter::All, &mut out.coeffs);
                } else {
                    let n = grid.n_nodes();
                    let mut fa = vec![0.0; n];
                    let mut fb = vec![0.0; n];
                    grid.eval_into(&self.coeffs, &mut fa);
                    grid.eval_into(&other.coeffs, &mut fb);
                    for (a, &b) in fa.iter_mut().zip(&fb) {
                        *a *= b;
                    }
                    grid.forward_into(&fa, SlotFilter::All, &mut out.coeffs);
                }
            }
            BasisKind::NeumannCosine => {
                let filter = Grid::product_filter(self.cosine_parity()?, other.cosine_parity()?);
                let n = grid.n_nodes();
                let mut fa = vec![0.0; n];
                let mut fb = vec![0.0; n];
                grid.eval_into(&self.coeffs, &mut fa);
                grid.eval_into(&other.coeffs, &mut fb);
                for (a, &b) in fa.iter_mut().zip(&fb) {
                    *a *= b;
                }
                grid.forward_into(&fa, filter, &mut out.coeffs);
            }
        }
        Ok(out)
    }
}
