//! Sector-level Foldy-Wouthuysen Hamiltonian for a particle with an
//! anomalous magnetic moment (g ≠ 2) in a uniform field with pz = 0.
//!
//! After dropping the lower components and the orbital-rotation term, the
//! Hamiltonian inside one Landau level is the 3×3 matrix
//!
//! ```text
//! H = h0 + ω₀ S_z + ζ S_z² + κ (S_x² − S_y²)
//! ```
//!
//! where S_x and S_y stand for the spin projections on π×B and π.

use num_complex::Complex64;

use crate::algebra::{
    anticommutator, build_spin_matrices, eig_hermitian, hermitian_function, sqrt_psd,
    ComplexMatrix, SpinOperatorSet,
};
use crate::error::{Error, Result};
use crate::landau::{LandauSector, ParticleParams};

/// Tolerance on |ψ|² − 1 accepted by [`polarization_expectations`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequencies {
    pub omega0: f64,
    pub zeta: f64,
    pub kappa: f64,
}

/// ω₀ = −e(g−2)B/2m, ζ = −e²g(g−2)B²/(8m²ε′),
/// κ = −e²(g−1)(g−2)(ε′−m)B²/(8m³ε′).
pub fn frequencies(params: &ParticleParams, sector: &LandauSector) -> Result<Frequencies> {
    params.validate()?;
    params.require_zero_pz()?;
    let ParticleParams {
        mass: m,
        charge: e,
        g_factor: g,
        field: b,
        ..
    } = *params;
    let eps = sector.eps_prime;
    let omega0 = -e * (g - 2.0) * b / (2.0 * m);
    let zeta = -e * e * g * (g - 2.0) * b * b / (8.0 * m * m * eps);
    let kappa =
        -e * e * (g - 1.0) * (g - 2.0) * sector.kinetic(m) * b * b / (8.0 * m * m * m * eps);
    Ok(Frequencies {
        omega0,
        zeta,
        kappa,
    })
}

/// β = κ/ω₀ with Y = 1/√(1+β²) and Z = √(2√(1+β²)(1+√(1+β²))).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParameters {
    pub beta: f64,
    pub big_y: f64,
    pub big_z: f64,
}

impl BetaParameters {
    pub fn from_beta(beta: f64) -> Self {
        let s = beta.hypot(1.0);
        Self {
            beta,
            big_y: 1.0 / s,
            big_z: (2.0 * s * (1.0 + s)).sqrt(),
        }
    }
}

/// β = e(g−1)(ε′−m)B/(4m²ε′), the closed form of κ/ω₀.
///
/// The ratio stays finite as g → 2, but at g = 2 both frequencies vanish and
/// the mixing angle is meaningless, so β = 0 is returned there.
pub fn beta_parameters(params: &ParticleParams, sector: &LandauSector) -> Result<BetaParameters> {
    params.validate()?;
    params.require_zero_pz()?;
    let ParticleParams {
        mass: m,
        charge: e,
        g_factor: g,
        field: b,
        ..
    } = *params;
    if params.is_normal_moment() {
        return Ok(BetaParameters::from_beta(0.0));
    }
    let beta = e * (g - 1.0) * sector.kinetic(m) * b / (4.0 * m * m * sector.eps_prime);
    Ok(BetaParameters::from_beta(beta))
}

/// Choice of the spin-independent offset h0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H0Policy {
    Zero,
    /// h0 = ε′, which makes the diagonal an absolute energy.
    #[default]
    EpsilonPrime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHamiltonian {
    pub h0: f64,
    pub omega0: f64,
    pub zeta: f64,
    pub kappa: f64,
    pub matrix: ComplexMatrix,
}

impl ReducedHamiltonian {
    /// Assembles the matrix from explicit coefficients. A pure tensor
    /// coupling (ω₀ = 0 with κ ≠ 0) is rejected because β = κ/ω₀ and the
    /// stationary-state parametrization are undefined there.
    pub fn from_coefficients(h0: f64, omega0: f64, zeta: f64, kappa: f64) -> Result<Self> {
        if [h0, omega0, zeta, kappa].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "Hamiltonian coefficients must be finite".into(),
            ));
        }
        if omega0 == 0.0 && kappa != 0.0 {
            return Err(Error::InvalidParameter(
                "kappa must vanish when omega0 = 0".into(),
            ));
        }
        let s = build_spin_matrices();
        let matrix = &(&(&s.identity3.scale_real(h0) + &s.sz.scale_real(omega0))
            + &s.sz2.scale_real(zeta))
            + &s.sxx_minus_syy.scale_real(kappa);
        Ok(Self {
            h0,
            omega0,
            zeta,
            kappa,
            matrix,
        })
    }

    /// The same Hamiltonian with the tensor mixing switched off.
    pub fn without_kappa(&self) -> Self {
        Self::from_coefficients(self.h0, self.omega0, self.zeta, 0.0)
            .expect("coefficients were already validated")
    }

    pub fn with_h0(&self, h0: f64) -> Result<Self> {
        Self::from_coefficients(h0, self.omega0, self.zeta, self.kappa)
    }

    pub fn beta(&self) -> BetaParameters {
        if self.omega0 == 0.0 {
            BetaParameters::from_beta(0.0)
        } else {
            BetaParameters::from_beta(self.kappa / self.omega0)
        }
    }
}

pub fn reduced_hamiltonian(
    params: &ParticleParams,
    sector: &LandauSector,
    policy: H0Policy,
) -> Result<ReducedHamiltonian> {
    let f = frequencies(params, sector)?;
    let h0 = match policy {
        H0Policy::Zero => 0.0,
        H0Policy::EpsilonPrime => sector.eps_prime,
    };
    ReducedHamiltonian::from_coefficients(h0, f.omega0, f.zeta, f.kappa)
}

/// First-order and anticommutator expectations that vanish in every
/// stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrossMeans {
    pub sx: f64,
    pub sy: f64,
    /// ⟨{S_x, S_y}⟩.
    pub sxy: f64,
    /// ⟨{S_x, S_z}⟩.
    pub sxz: f64,
    /// ⟨{S_y, S_z}⟩.
    pub syz: f64,
}

impl CrossMeans {
    pub fn max_abs(&self) -> f64 {
        [self.sx, self.sy, self.sxy, self.sxz, self.syz]
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationObservables {
    pub sz_mean: f64,
    pub sz2_mean: f64,
    /// ⟨S_x²⟩, the squared projection on π×B.
    pub s_pib2_mean: f64,
    /// ⟨S_y²⟩, the squared projection on π.
    pub s_pi2_mean: f64,
    pub cross_means: CrossMeans,
}

impl PolarizationObservables {
    /// ⟨S_x²⟩ + ⟨S_y²⟩ + ⟨S_z²⟩, equal to 2 for any state.
    pub fn sum_rule(&self) -> f64 {
        self.s_pib2_mean + self.s_pi2_mean + self.sz2_mean
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = [
            self.sz_mean,
            self.sz2_mean,
            self.s_pib2_mean,
            self.s_pi2_mean,
            self.cross_means.sx,
            self.cross_means.sy,
            self.cross_means.sxy,
            self.cross_means.sxz,
            self.cross_means.syz,
        ];
        let b = [
            other.sz_mean,
            other.sz2_mean,
            other.s_pib2_mean,
            other.s_pi2_mean,
            other.cross_means.sx,
            other.cross_means.sy,
            other.cross_means.sxy,
            other.cross_means.sxz,
            other.cross_means.syz,
        ];
        a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// The nine spin expectations of a normalized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments {
    pub vector: [f64; 3],
    /// ⟨S_x²⟩, ⟨S_y²⟩, ⟨S_z²⟩, ⟨{S_x,S_y}⟩, ⟨{S_y,S_z}⟩, ⟨{S_z,S_x}⟩.
    pub tensor: [f64; 6],
}

/// Expectations of S_i and of all quadratic spin combinations.
pub fn spin_moments(spin: &SpinOperatorSet, state: &[Complex64]) -> Result<SpinMoments> {
    if state.len() != 3 {
        return Err(Error::DimensionMismatch {
            left: 3,
            right: state.len(),
        });
    }
    let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm2.is_nan() || (norm2 - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized(norm2));
    }
    let mean = |op: &ComplexMatrix| -> Result<f64> { Ok(op.expectation(state)?.re) };
    let [sx, sy, sz] = spin.components();
    let vector = [mean(sx)?, mean(sy)?, mean(sz)?];
    let tensor = [
        mean(&(sx * sx))?,
        mean(&(sy * sy))?,
        mean(&spin.sz2)?,
        mean(&anticommutator(sx, sy)?)?,
        mean(&anticommutator(sy, sz)?)?,
        mean(&anticommutator(sz, sx)?)?,
    ];
    Ok(SpinMoments { vector, tensor })
}

pub fn polarization_expectations(state: &[Complex64]) -> Result<PolarizationObservables> {
    let moments = spin_moments(&build_spin_matrices(), state)?;
    let [sx, sy, sz] = moments.vector;
    let [sxx, syy, szz, axy, ayz, azx] = moments.tensor;
    Ok(PolarizationObservables {
        sz_mean: sz,
        sz2_mean: szz,
        s_pib2_mean: sxx,
        s_pi2_mean: syy,
        cross_means: CrossMeans {
            sx,
            sy,
            sxy: axy,
            sxz: azx,
            syz: ayz,
        },
    })
}

/// Closed-form eigensystem of a [`ReducedHamiltonian`], with all free
/// phases set to zero. Index 0 is Ψ₊₁, 1 is Ψ₀, 2 is Ψ₋₁.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryTriplet {
    pub energies: [f64; 3],
    pub vectors: [[Complex64; 3]; 3],
    pub beta: f64,
    pub big_y: f64,
    pub big_z: f64,
}

pub fn stationary_states(rh: &ReducedHamiltonian) -> StationaryTriplet {
    let BetaParameters { beta, big_y, big_z } = rh.beta();
    let s = beta.hypot(1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let zero = re(0.0);
    let plus = [re((1.0 + s) / big_z), zero, re(beta / big_z)];
    let mid = [zero, re(1.0), zero];
    let minus = [re(-beta / big_z), zero, re((1.0 + s) / big_z)];
    let energies = [
        rh.h0 + rh.omega0 * s + rh.zeta,
        rh.h0,
        rh.h0 - rh.omega0 * s + rh.zeta,
    ];
    StationaryTriplet {
        energies,
        vectors: [plus, mid, minus],
        beta,
        big_y,
        big_z,
    }
}

impl StationaryTriplet {
    /// Polarization observables of each state from the closed forms:
    /// ⟨S_z⟩ = ±Y, ⟨S_x²⟩ = (1 ± βY)/2, ⟨S_y²⟩ = (1 ∓ βY)/2 for Ψ±₁, and
    /// ⟨S_x²⟩ = ⟨S_y²⟩ = 1 for Ψ₀.
    pub fn closed_form_observables(&self) -> [PolarizationObservables; 3] {
        let by = self.beta * self.big_y;
        let pm = |sign: f64| PolarizationObservables {
            sz_mean: sign * self.big_y,
            sz2_mean: 1.0,
            s_pib2_mean: (1.0 + sign * by) / 2.0,
            s_pi2_mean: (1.0 - sign * by) / 2.0,
            cross_means: CrossMeans::default(),
        };
        let zero = PolarizationObservables {
            sz_mean: 0.0,
            sz2_mean: 0.0,
            s_pib2_mean: 1.0,
            s_pi2_mean: 1.0,
            cross_means: CrossMeans::default(),
        };
        [pm(1.0), zero, pm(-1.0)]
    }

    pub fn observables(&self) -> Result<[PolarizationObservables; 3]> {
        Ok([
            polarization_expectations(&self.vectors[0])?,
            polarization_expectations(&self.vectors[1])?,
            polarization_expectations(&self.vectors[2])?,
        ])
    }
}

/// Agreement between the closed-form triplet and a numerical
/// eigendecomposition of the same matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenAgreement {
    /// max |E_closed − E_numeric| / max|E|.
    pub energy_error: f64,
    /// min over states of |⟨Ψ_closed|v_numeric⟩|.
    pub min_overlap: f64,
}

pub fn compare_with_eigendecomposition(rh: &ReducedHamiltonian) -> Result<EigenAgreement> {
    let triplet = stationary_states(rh);
    let eig = eig_hermitian(&rh.matrix)?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| triplet.energies[a].total_cmp(&triplet.energies[b]));
    let scale = triplet
        .energies
        .iter()
        .fold(0.0f64, |a, e| a.max(e.abs()))
        .max(f64::MIN_POSITIVE);
    let mut energy_error = 0.0f64;
    let mut min_overlap = f64::INFINITY;
    for (k, &state) in order.iter().enumerate() {
        energy_error = energy_error.max((triplet.energies[state] - eig.values[k]).abs() / scale);
        // Degenerate levels admit any rotation, so compare against the
        // projector onto the numerical eigenspace.
        let close: Vec<usize> = (0..3)
            .filter(|&j| (eig.values[j] - eig.values[k]).abs() <= 1e-12 * scale)
            .collect();
        let weight: f64 = close
            .iter()
            .map(|&j| {
                eig.vector(j)
                    .iter()
                    .zip(&triplet.vectors[state])
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum();
        min_overlap = min_overlap.min(weight.sqrt());
    }
    Ok(EigenAgreement {
        energy_error,
        min_overlap,
    })
}

/// The sector Hamiltonian before the B³ truncation:
///
/// ```text
/// ε + ω₀S_z + c {1/(ε(ε+m)), π²B²(S_y² − S_x²) − e(g−1)B³S_z}
/// ε = sqrt(m² + π² − 2eB·S_z − e²g(g−2)B²/(4m²)·S_z²)
/// c = e²(g−1)(g−2)/(16m³)
/// ```
///
/// with S·π → S_y|π| and S·(π×B) → S_x|π|B.
pub fn hamiltonian_full_sector(
    params: &ParticleParams,
    sector: &LandauSector,
) -> Result<ComplexMatrix> {
    params.validate()?;
    params.require_zero_pz()?;
    let ParticleParams {
        mass: m,
        charge: e,
        g_factor: g,
        field: b,
        ..
    } = *params;
    let s = build_spin_matrices();
    let eps2 = &(&s.identity3.scale_real(m * m + sector.pi2) - &s.sz.scale_real(2.0 * e * b))
        - &s.sz2
            .scale_real(e * e * g * (g - 2.0) * b * b / (4.0 * m * m));
    let eps = sqrt_psd(&eps2).map_err(|err| match err {
        Error::NotPositiveDefinite { min_eigenvalue } => Error::Supercritical {
            n: sector.n,
            s_z: if e * b > 0.0 { 1 } else { -1 },
            radicand: min_eigenvalue,
        },
        other => other,
    })?;
    let omega0 = -e * (g - 2.0) * b / (2.0 * m);
    let mut h = &eps + &s.sz.scale_real(omega0);
    if g != 2.0 {
        let weight = hermitian_function(&eps2, |l| {
            let r = l.sqrt();
            1.0 / (r * (r + m))
        })?;
        let syy = &s.sy * &s.sy;
        let sxx = &s.sx * &s.sx;
        let inner = &(&syy - &sxx).scale_real(sector.pi2 * b * b)
            - &s.sz.scale_real(e * (g - 1.0) * b * b * b);
        let c = e * e * (g - 1.0) * (g - 2.0) / (16.0 * m * m * m);
        h = &h + &anticommutator(&weight, &inner)?.scale_real(c);
    }
    Ok(h)
}

/// The truncated counterpart of [`hamiltonian_full_sector`]:
/// sqrt(ε′² − 2eB·S_z) + ω₀S_z + ζS_z² + κ(S_x² − S_y²).
pub fn hamiltonian_truncated_sector(
    params: &ParticleParams,
    sector: &LandauSector,
) -> Result<ComplexMatrix> {
    let s = build_spin_matrices();
    let radicand = &s.identity3.scale_real(sector.eps_prime * sector.eps_prime)
        - &s.sz.scale_real(2.0 * params.coupling());
    let root = sqrt_psd(&radicand)?;
    let rh = reduced_hamiltonian(params, sector, H0Policy::Zero)?;
    Ok(&root + &rh.matrix)
}

/// Largest eigenvalue difference between the full and truncated sector
/// Hamiltonians.
pub fn truncation_gap(params: &ParticleParams, sector: &LandauSector) -> Result<f64> {
    let full = eig_hermitian(&hamiltonian_full_sector(params, sector)?)?;
    let cut = eig_hermitian(&hamiltonian_truncated_sector(params, sector)?)?;
    Ok(full
        .values
        .iter()
        .zip(&cut.values)
        .fold(0.0, |a, (x, y)| a.max((x - y).abs())))
}

/// Residual of B²(S·π)² + [S·(π×B)]² + π²(S·B)² = 2(π×B)² with the
/// projections replaced by S_y|π|, S_x|π|B and S_z B.
pub fn polarizability_identity_residual_scalar(sector: &LandauSector, field: f64) -> f64 {
    let s = build_spin_matrices();
    let scale = sector.pi2 * field * field;
    let lhs = &(&(&s.sy * &s.sy) + &(&s.sx * &s.sx)) + &s.sz2;
    let residual = &lhs.scale_real(scale) - &s.identity3.scale_real(2.0 * scale);
    residual.max_abs()
}
