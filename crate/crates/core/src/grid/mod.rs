//! Lattice realization of the six-component Sakata-Taketani operators on a
//! square 2D grid, used to check operator identities that the closed-form
//! modules take for granted.
//!
//! Sites are x_i = −L/2 + i·h with h = L/(N−1) on both axes, indexed as
//! i + N·j, with zero (Dirichlet) values outside the square. A state on the
//! full internal space is laid out as `[ρ][spin][site]`, so its length is
//! 6·N².
//!
//! Operator norms are measured on an interior subspace: the lowest
//! eigenvectors of the compact π² plus a weak harmonic confinement. Those
//! states decay long before they reach the walls, so boundary layers do not
//! pollute the convergence studies.

mod checks;
mod eigen;
mod ops;
mod sparse;

pub use checks::{
    commutator_mo_residual, conserved_projection_residuals, convergence_order,
    exact_fw_identity_residual, landau_levels_ldos, landau_spectrum_grid,
    lowest_landau_eigenvalues, CommutatorResidual, FwIdentityResidual, ProjectionKind,
    ProjectionResidual, RefinementStudy, DEFAULT_GRIDS,
};
pub use eigen::{krylov_function_apply, lanczos_spectral_weights, lowest_eigenpairs, EigenPairs};
pub use ops::{build_operators, FullOp, GridOperatorSet, SpinOrbitalOp};
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::landau::ParticleParams;

/// Magnetic length must cover this many lattice spacings.
pub const MIN_SPACINGS_PER_MAGNETIC_LENGTH: f64 = 2.5;
/// The domain must span this many magnetic lengths.
pub const MIN_MAGNETIC_LENGTHS_PER_DOMAIN: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Sites per axis, at least 16.
    pub n_points: usize,
    /// L/2.
    pub half_width: f64,
    /// ℓ_c of the confinement w·r² with w = 1/ℓ_c⁴ that selects the
    /// interior subspace.
    pub confinement_length: f64,
    /// Number of orbital states spanning the interior subspace.
    pub subspace_dim: usize,
}

impl GridSpec {
    pub fn new(n_points: usize, half_width: f64) -> Self {
        Self {
            n_points,
            half_width,
            ..Self::default()
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    pub fn sites(&self) -> usize {
        self.n_points * self.n_points
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// (x, y) of site k.
    pub fn position(&self, k: usize) -> (f64, f64) {
        (
            self.coordinate(k % self.n_points),
            self.coordinate(k / self.n_points),
        )
    }

    /// Checks resolution against the magnetic length 1/√(|e|·|B(0)|); the
    /// rule is skipped when the field vanishes at the origin.
    pub fn validate(&self, field: &FieldSpec, params: &ParticleParams) -> Result<()> {
        if self.n_points < 16 {
            return Err(Error::InvalidGrid(format!(
                "need at least 16 points per axis, got {}",
                self.n_points
            )));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidGrid("half width must be positive".into()));
        }
        if !(self.confinement_length.is_finite() && self.confinement_length > 0.0) {
            return Err(Error::InvalidGrid(
                "confinement length must be positive".into(),
            ));
        }
        if self.subspace_dim == 0 || self.subspace_dim * 4 > self.sites() {
            return Err(Error::InvalidGrid(format!(
                "subspace dimension {} does not fit the grid",
                self.subspace_dim
            )));
        }
        let b = field.field(0.0, 0.0);
        let strength = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt() * params.charge.abs();
        if strength > 0.0 {
            let lb = 1.0 / strength.sqrt();
            let h = self.spacing();
            if lb < MIN_SPACINGS_PER_MAGNETIC_LENGTH * h {
                return Err(Error::InvalidGrid(format!(
                    "magnetic length {lb:.4} is below {MIN_SPACINGS_PER_MAGNETIC_LENGTH} \
                     lattice spacings (h = {h:.4})"
                )));
            }
            if 2.0 * self.half_width < MIN_MAGNETIC_LENGTHS_PER_DOMAIN * lb {
                return Err(Error::InvalidGrid(format!(
                    "domain {:.4} is shorter than {MIN_MAGNETIC_LENGTHS_PER_DOMAIN} magnetic \
                     lengths ({lb:.4})",
                    2.0 * self.half_width
                )));
            }
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 32,
            half_width: 6.0,
            confinement_length: 1.5,
            subspace_dim: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    /// B = (0, 0, B0), A = (−B0·y/2, B0·x/2, 0).
    UniformZ { b0: f64 },
    /// B = (G·y, G·x, 0), A = (0, 0, G(y² − x²)/2); curl-free.
    Quadrupole { gradient: f64 },
    /// B = (0, 0, B0 + G·x), A = (−B0·y/2, B0·x/2 + G·x²/2, 0);
    /// ∇×B = (0, −G, 0).
    ShearedZ { b0: f64, gradient: f64 },
}

/// A static field with its fixed gauge; `az_shift` adds a constant to A_z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub az_shift: f64,
}

impl FieldSpec {
    pub fn uniform(b0: f64) -> Self {
        FieldKind::UniformZ { b0 }.into()
    }

    pub fn quadrupole(gradient: f64) -> Self {
        FieldKind::Quadrupole { gradient }.into()
    }

    pub fn sheared(b0: f64, gradient: f64) -> Self {
        FieldKind::ShearedZ { b0, gradient }.into()
    }

    pub fn with_az_shift(self, az_shift: f64) -> Self {
        Self { az_shift, ..self }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FieldKind::UniformZ { .. } => "uniform_z",
            FieldKind::Quadrupole { .. } => "quadrupole",
            FieldKind::ShearedZ { .. } => "sheared_z",
        }
    }

    pub fn vector_potential(&self, x: f64, y: f64) -> [f64; 3] {
        match self.kind {
            FieldKind::UniformZ { b0 } => [-b0 * y / 2.0, b0 * x / 2.0, self.az_shift],
            FieldKind::Quadrupole { gradient } => {
                [0.0, 0.0, gradient * (y * y - x * x) / 2.0 + self.az_shift]
            }
            FieldKind::ShearedZ { b0, gradient } => [
                -b0 * y / 2.0,
                b0 * x / 2.0 + gradient * x * x / 2.0,
                self.az_shift,
            ],
        }
    }

    pub fn field(&self, x: f64, y: f64) -> [f64; 3] {
        match self.kind {
            FieldKind::UniformZ { b0 } => [0.0, 0.0, b0],
            FieldKind::Quadrupole { gradient } => [gradient * y, gradient * x, 0.0],
            FieldKind::ShearedZ { b0, gradient } => [0.0, 0.0, b0 + gradient * x],
        }
    }

    /// ∇×B, constant for every supported kind.
    pub fn curl(&self) -> [f64; 3] {
        match self.kind {
            FieldKind::ShearedZ { gradient, .. } => [0.0, -gradient, 0.0],
            _ => [0.0; 3],
        }
    }

    pub fn is_current_free(&self) -> bool {
        self.curl() == [0.0; 3]
    }
}

impl From<FieldKind> for FieldSpec {
    fn from(kind: FieldKind) -> Self {
        Self {
            kind,
            az_shift: 0.0,
        }
    }
}
