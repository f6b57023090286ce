//! Closed-form Foldy-Wouthuysen energies for the normal moment g = 2.
//!
//! In a uniform field the exact FW Hamiltonian restricted to a Landau sector
//! is √(ε′² − 2eB·S_z). Because S_z³ = S_z, this square root is a quadratic
//! polynomial ε′(1 + a₁S_z + a₂S_z²) in S_z.

use crate::algebra::{build_spin_matrices, sqrt_psd, ComplexMatrix};
use crate::error::{Error, Result};
use crate::landau::{LandauSector, ParticleParams};

/// Largest admissible |b|; closer to 1 the root √(1 − |b|) loses all digits.
pub const B_LIMIT: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoeffs {
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
}

/// a₁ = −(√(1+b) − √(1−b))/2 and a₂ = −(1 − (√(1+b) + √(1−b))/2).
///
/// Both are evaluated in rationalized form so that small b keeps full
/// relative precision.
pub fn a_coefficients(b: f64) -> Result<ClosedFormCoeffs> {
    if b.is_nan() || b.abs() > B_LIMIT {
        return Err(Error::SupercriticalB { b });
    }
    let u = (1.0 + b).sqrt();
    let v = (1.0 - b).sqrt();
    let a1 = -b / (u + v);
    // 1 − (u+v)/2 = (4 − (u+v)²)/(2(2+u+v)) and 4 − (u+v)² = 2(1 − uv),
    // with 1 − uv = b²/(1 + uv).
    let a2 = -b * b / ((1.0 + u * v) * (2.0 + (u + v)));
    Ok(ClosedFormCoeffs { b, a1, a2 })
}

fn check_sector(params: &ParticleParams, sector: &LandauSector) -> Result<ClosedFormCoeffs> {
    params.validate()?;
    params.require_normal_moment()?;
    a_coefficients(sector.b)
}

/// ε′(1 + a₁s_z + a₂s_z²) for one spin projection.
pub fn energy_g2(params: &ParticleParams, sector: &LandauSector, s_z: i32) -> Result<f64> {
    if !(-1..=1).contains(&s_z) {
        return Err(Error::InvalidParameter(format!(
            "spin projection must be -1, 0 or +1, got {s_z}"
        )));
    }
    let c = check_sector(params, sector)?;
    let s = f64::from(s_z);
    // a₁ is exactly odd and a₂ exactly even in b, so (e, s_z) → (−e, −s_z)
    // leaves every floating-point operation below unchanged.
    Ok(sector.eps_prime * (1.0 + c.a1 * s + c.a2 * s * s))
}

/// The 3×3 polynomial form ε′(I + a₁S_z + a₂S_z²).
pub fn closed_form_matrix(params: &ParticleParams, sector: &LandauSector) -> Result<ComplexMatrix> {
    let c = check_sector(params, sector)?;
    let spin = build_spin_matrices();
    let poly = &(&spin.identity3 + &spin.sz.scale_real(c.a1)) + &spin.sz2.scale_real(c.a2);
    Ok(poly.scale_real(sector.eps_prime))
}

/// Max-norm distance between the polynomial form and the matrix square root
/// sqrt(ε′²I − 2eB·S_z).
pub fn closed_form_residual(params: &ParticleParams, sector: &LandauSector) -> Result<f64> {
    let poly = closed_form_matrix(params, sector)?;
    let spin = build_spin_matrices();
    let eps2 = sector.eps_prime * sector.eps_prime;
    let radicand = &spin.identity3.scale_real(eps2) - &spin.sz.scale_real(2.0 * params.coupling());
    let root = sqrt_psd(&radicand)?;
    poly.max_abs_diff(&root)
}
