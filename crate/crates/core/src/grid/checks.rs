//! Operator identities measured on the lattice, with refinement studies.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{build_spin_matrices, eig_hermitian, ComplexMatrix};
use crate::error::{Error, Result};
use crate::landau::ParticleParams;

use super::eigen::{krylov_function_apply, lanczos_spectral_weights, lowest_eigenpairs};
use super::ops::{build_operators, GridOperatorSet, SpinOrbitalOp};
use super::{FieldKind, FieldSpec, GridSpec};

type Vector = Vec<Complex64>;

pub const DEFAULT_GRIDS: [usize; 3] = [24, 32, 48];

const BASIS_SEED: u64 = 0x5eed;
const BASIS_TOL: f64 = 1e-9;
const KRYLOV_TOL: f64 = 1e-12;
const KRYLOV_MAX_STEPS: usize = 600;
const LDOS_STEPS: usize = 120;
const LDOS_MIN_WEIGHT: f64 = 1e-4;

/// Least-squares slope of ln(value) against ln(h).
pub fn convergence_order(spacings: &[f64], values: &[f64]) -> f64 {
    let n = spacings.len() as f64;
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// A quantity evaluated on a sequence of grids of fixed extent.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub grids: Vec<usize>,
    pub spacings: Vec<f64>,
    pub values: Vec<f64>,
    pub order: f64,
}

impl RefinementStudy {
    /// Evaluates `eval` on `template` with each point count in `grids`.
    pub fn run(
        grids: &[usize],
        template: &GridSpec,
        mut eval: impl FnMut(&GridSpec) -> Result<f64>,
    ) -> Result<Self> {
        if grids.len() < 2 {
            return Err(Error::InvalidGrid(
                "a refinement study needs at least two grids".into(),
            ));
        }
        let mut spacings = Vec::with_capacity(grids.len());
        let mut values = Vec::with_capacity(grids.len());
        for &n in grids {
            let grid = GridSpec {
                n_points: n,
                ..*template
            };
            spacings.push(grid.spacing());
            values.push(eval(&grid)?);
        }
        let order = convergence_order(&spacings, &values);
        Ok(Self {
            grids: grids.to_vec(),
            spacings,
            values,
            order,
        })
    }

    /// True when every refinement step strictly lowers the value.
    pub fn is_monotone_decreasing(&self) -> bool {
        let mut pairs: Vec<(f64, f64)> = self
            .spacings
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// a_i† b_j.
fn gram(a: &[Vector], b: &[Vector]) -> ComplexMatrix {
    let dot = |x: &Vector, y: &Vector| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum();
    ComplexMatrix::from_fn(a.len(), |i, j| dot(&a[i], &b[j]))
}

fn spectral_norm(g: &ComplexMatrix) -> Result<f64> {
    let gg = &g.adjoint() * g;
    let sym = (&gg + &gg.adjoint()).scale_real(0.5);
    let top = eig_hermitian(&sym)?.values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// ‖V† C V‖₂ given the orthonormal columns V and their images C V.
fn projected_norm(basis: &[Vector], images: &[Vector]) -> Result<f64> {
    spectral_norm(&gram(basis, images))
}

/// ‖A V‖₂ for orthonormal V.
fn image_norm(images: &[Vector]) -> Result<f64> {
    let g = gram(images, images);
    let sym = (&g + &g.adjoint()).scale_real(0.5);
    let top = eig_hermitian(&sym)?.values.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Orbital states spanning the interior subspace.
fn interior_orbitals(ops: &GridOperatorSet) -> Result<Vec<Vector>> {
    let h = ops.confined_pi2();
    let upper = h.gershgorin_bound();
    Ok(lowest_eigenpairs(
        |x| h.apply(x),
        h.dim(),
        ops.grid.subspace_dim,
        upper,
        BASIS_SEED,
        BASIS_TOL,
    )?
    .vectors)
}

/// I₃ ⊗ orbitals, ordered spin-major.
fn spin_columns(orbitals: &[Vector]) -> Vec<Vector> {
    let n = orbitals[0].len();
    let mut cols = Vec::with_capacity(3 * orbitals.len());
    for s in 0..3 {
        for v in orbitals {
            let mut c = vec![Complex64::new(0.0, 0.0); 3 * n];
            c[s * n..(s + 1) * n].copy_from_slice(v);
            cols.push(c);
        }
    }
    cols
}

fn sub(a: &[Complex64], b: &[Complex64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Interior-projected norms of [ℳ, 𝒪].
///
/// Because [ℳ, 𝒪] = iρ₂[ℳ, X] with iρ₂ unitary, all three numbers are
/// measured on the X level. The formula side is i·e/(2m²) S·(π × (∇×B)),
/// the exact continuum value for a field with constant curl.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorResidual {
    pub direct_norm: f64,
    pub formula_norm: f64,
    /// ‖direct − formula‖ / max(‖direct‖, tiny).
    pub relative_gap: f64,
}

pub fn commutator_mo_residual(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
) -> Result<CommutatorResidual> {
    params.require_normal_moment()?;
    let ops = build_operators(field, grid, params)?;
    let cols = spin_columns(&interior_orbitals(&ops)?);

    let (m, e) = (params.mass, params.charge);
    let j = field.curl();
    let spin = build_spin_matrices();
    let s = [&spin.sx, &spin.sy, &spin.sz];
    let coeff = Complex64::new(0.0, e / (2.0 * m * m));
    let mut formula = SpinOrbitalOp::new(ops.sites());
    // (π × J)_i = ε_ijk π_j J_k.
    for (i, jj, k, sign) in [
        (0, 1, 2, 1.0),
        (0, 2, 1, -1.0),
        (1, 2, 0, 1.0),
        (1, 0, 2, -1.0),
        (2, 0, 1, 1.0),
        (2, 1, 0, -1.0),
    ] {
        if j[k] != 0.0 {
            formula.push(s[i].scale(coeff * sign * j[k]), vec![ops.pi[jj].clone()]);
        }
    }

    let direct: Vec<Vector> = cols
        .iter()
        .map(|v| {
            sub(
                &ops.m_op.apply(&ops.x_op.apply(v)),
                &ops.x_op.apply(&ops.m_op.apply(v)),
            )
        })
        .collect();
    let predicted: Vec<Vector> = cols.iter().map(|v| formula.apply(v)).collect();
    let gap: Vec<Vector> = direct
        .iter()
        .zip(&predicted)
        .map(|(a, b)| sub(a, b))
        .collect();

    let direct_norm = projected_norm(&cols, &direct)?;
    let formula_norm = projected_norm(&cols, &predicted)?;
    let relative_gap = projected_norm(&cols, &gap)? / direct_norm.max(f64::MIN_POSITIVE);
    Ok(CommutatorResidual {
        direct_norm,
        formula_norm,
        relative_gap,
    })
}

/// Interior-projected ‖ℳ² − X² − (m² + π² − 2e S·B)‖ on the even block,
/// with the scale ‖m² + π²‖ on the same subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwIdentityResidual {
    pub residual: f64,
    pub scale: f64,
}

pub fn exact_fw_identity_residual(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
) -> Result<FwIdentityResidual> {
    params.require_normal_moment()?;
    if !field.is_current_free() {
        return Err(Error::UnsupportedField(format!(
            "{} carries a current; the identity holds only for curl-free fields",
            field.name()
        )));
    }
    let ops = build_operators(field, grid, params)?;
    let cols = spin_columns(&interior_orbitals(&ops)?);
    let (m, e) = (params.mass, params.charge);
    let mut residual = Vec::with_capacity(cols.len());
    let mut reference = Vec::with_capacity(cols.len());
    for v in &cols {
        let m2 = ops.m_op.apply(&ops.m_op.apply(v));
        let x2 = ops.x_op.apply(&ops.x_op.apply(v));
        let p2 = ops.pi2.apply(v);
        let sb = ops.s_dot_b.apply(v);
        let base: Vector = v.iter().zip(&p2).map(|(a, b)| a * (m * m) + b).collect();
        residual.push(
            m2.iter()
                .zip(&x2)
                .zip(&base)
                .zip(&sb)
                .map(|(((a, b), c), d)| a - b - c + d * (2.0 * e))
                .collect(),
        );
        reference.push(base);
    }
    Ok(FwIdentityResidual {
        residual: projected_norm(&cols, &residual)?,
        scale: projected_norm(&cols, &reference)?,
    })
}

/// Polarization projections and bilinears tested against H_FW in a uniform
/// field B = B0·ẑ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjectionKind {
    /// Π_z.
    Longitudinal,
    /// Π·(π×B).
    AlongPiCrossB,
    /// Π·(B×(π×B)).
    AlongBCrossPiCrossB,
    /// Π·π.
    Helicity,
    /// Π·𝔅 = (π·B)(Π·π) − B π² Π_z.
    Binormal,
    /// (Π·π)².
    HelicitySquared,
    /// {Π_z, Π·(π×B)}.
    LongitudinalTimesPiCrossB,
}

impl ProjectionKind {
    pub const ALL: [ProjectionKind; 7] = [
        Self::Longitudinal,
        Self::AlongPiCrossB,
        Self::AlongBCrossPiCrossB,
        Self::Helicity,
        Self::Binormal,
        Self::HelicitySquared,
        Self::LongitudinalTimesPiCrossB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Longitudinal => "Pi_z",
            Self::AlongPiCrossB => "Pi.(pi x B)",
            Self::AlongBCrossPiCrossB => "Pi.(B x (pi x B))",
            Self::Helicity => "Pi.pi",
            Self::Binormal => "Pi.binormal",
            Self::HelicitySquared => "(Pi.pi)^2",
            Self::LongitudinalTimesPiCrossB => "{Pi_z, Pi.(pi x B)}",
        }
    }
}

/// ‖V†[A, W]V‖ and the scale ‖AV‖·‖WV‖ it should be read against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResidual {
    pub residual: f64,
    pub scale: f64,
}

/// Commutators of the conserved projections with the FW energy operator.
///
/// H_FW = ρ₃W and Π = ρ₃S give [Π·a, H_FW] = [S·a, W] on each ρ block, so
/// the upper block is used. W = √(m² + π² − 2eB0 S_z) is applied to each
/// spin block by a Lanczos matrix function.
pub fn conserved_projection_residuals(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
) -> Result<Vec<(ProjectionKind, ProjectionResidual)>> {
    params.require_normal_moment()?;
    let b0 = match field.kind {
        FieldKind::UniformZ { b0 } => b0,
        _ => {
            return Err(Error::UnsupportedField(format!(
                "conserved projections need a uniform field, got {}",
                field.name()
            )))
        }
    };
    let ops = build_operators(field, grid, params)?;
    let orbitals = interior_orbitals(&ops)?;
    let cols = spin_columns(&orbitals);
    let (m, e) = (params.mass, params.charge);
    let n = ops.sites();
    let pi = &ops.pi;
    let orbital_pi2 = |x: &[Complex64]| -> Vector {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        for p in pi.iter() {
            for (yk, zk) in y.iter_mut().zip(p.apply(&p.apply(x))) {
                *yk += zk;
            }
        }
        y
    };

    // Spin block 0, 1, 2 carries S_z = +1, 0, −1.
    let mut w_cols = Vec::with_capacity(cols.len());
    for (block, sz) in [1.0, 0.0, -1.0].into_iter().enumerate() {
        let shift = m * m - 2.0 * e * b0 * sz;
        let apply = |x: &[Complex64]| -> Vector {
            orbital_pi2(x)
                .into_iter()
                .zip(x)
                .map(|(a, b)| a + b * shift)
                .collect()
        };
        for v in &orbitals {
            let wv = krylov_function_apply(apply, v, f64::sqrt, KRYLOV_TOL, KRYLOV_MAX_STEPS)?;
            let mut c = vec![Complex64::new(0.0, 0.0); 3 * n];
            c[block * n..(block + 1) * n].copy_from_slice(&wv);
            w_cols.push(c);
        }
    }
    let w_norm = image_norm(&w_cols)?;

    let spin = build_spin_matrices();
    let op = |terms: &[(&ComplexMatrix, f64, Vec<usize>)]| {
        let mut o = SpinOrbitalOp::new(n);
        for (s, c, chain) in terms {
            o.push(
                s.scale_real(*c),
                chain.iter().map(|&k| pi[k].clone()).collect(),
            );
        }
        Arc::new(o)
    };
    let pz = params.pz;
    let s_z = op(&[(&spin.sz, 1.0, vec![])]);
    let pi_cross_b = op(&[(&spin.sx, b0, vec![1]), (&spin.sy, -b0, vec![0])]);
    let b_cross = op(&[(&spin.sx, b0 * b0, vec![0]), (&spin.sy, b0 * b0, vec![1])]);
    let helicity = op(&[
        (&spin.sx, 1.0, vec![0]),
        (&spin.sy, 1.0, vec![1]),
        (&spin.sz, 1.0, vec![2]),
    ]);
    let binormal = Arc::new(
        (*op(&[
            (&spin.sz, -b0, vec![0, 0]),
            (&spin.sz, -b0, vec![1, 1]),
            (&spin.sz, -b0, vec![2, 2]),
        ]))
        .clone()
        .plus(&helicity, pz * b0),
    );

    let mut out = Vec::with_capacity(ProjectionKind::ALL.len());
    for kind in ProjectionKind::ALL {
        let images: Vec<Vector> = cols
            .iter()
            .map(|v| match kind {
                ProjectionKind::Longitudinal => s_z.apply(v),
                ProjectionKind::AlongPiCrossB => pi_cross_b.apply(v),
                ProjectionKind::AlongBCrossPiCrossB => b_cross.apply(v),
                ProjectionKind::Helicity => helicity.apply(v),
                ProjectionKind::Binormal => binormal.apply(v),
                ProjectionKind::HelicitySquared => helicity.apply(&helicity.apply(v)),
                ProjectionKind::LongitudinalTimesPiCrossB => {
                    let a = s_z.apply(&pi_cross_b.apply(v));
                    let b = pi_cross_b.apply(&s_z.apply(v));
                    a.iter().zip(&b).map(|(x, y)| x + y).collect()
                }
            })
            .collect();
        let aw = gram(&images, &w_cols);
        let commutator = &aw - &aw.adjoint();
        out.push((
            kind,
            ProjectionResidual {
                residual: spectral_norm(&commutator)?,
                scale: image_norm(&images)? * w_norm,
            },
        ));
    }
    Ok(out)
}

fn require_uniform(field: &FieldSpec) -> Result<f64> {
    match field.kind {
        FieldKind::UniformZ { b0 } => Ok(b0),
        _ => Err(Error::UnsupportedField(format!(
            "Landau levels need a uniform field, got {}",
            field.name()
        ))),
    }
}

/// The `count` lowest eigenvalues of the planar π_x² + π_y², with
/// multiplicity, from subspace iteration.
pub fn landau_spectrum_grid(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
    count: usize,
) -> Result<Vec<f64>> {
    require_uniform(field)?;
    let ops = build_operators(field, grid, params)?;
    let h = &ops.pi2_planar;
    Ok(lowest_eigenpairs(
        |x| h.apply(x),
        h.dim(),
        count,
        h.gershgorin_bound(),
        BASIS_SEED,
        1e-9,
    )?
    .values)
}

/// The `count` lowest distinct Landau levels of the planar π_x² + π_y²,
/// read off the spectral measure of a state at the centre of the box.
///
/// In a finite box each level is highly degenerate, so the plain lowest
/// eigenvalues all belong to the n = 0 level. A state localized at the
/// centre couples to every bulk level and hardly to edge states; Lanczos
/// from it resolves the levels with their spectral weights, and levels with
/// weight below 1e−4 are discarded.
pub fn landau_levels_ldos(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
    count: usize,
) -> Result<Vec<f64>> {
    require_uniform(field)?;
    let ops = build_operators(field, grid, params)?;
    let n = grid.n_points;
    let mut start = vec![Complex64::new(0.0, 0.0); grid.sites()];
    let centre = if n.is_multiple_of(2) {
        vec![n / 2 - 1, n / 2]
    } else {
        vec![n / 2]
    };
    for &i in &centre {
        for &j in &centre {
            start[i + n * j] = Complex64::new(1.0, 0.0);
        }
    }
    let h = &ops.pi2_planar;
    let levels: Vec<f64> = lanczos_spectral_weights(|x| h.apply(x), &start, LDOS_STEPS)?
        .into_iter()
        .filter(|&(_, w)| w > LDOS_MIN_WEIGHT)
        .map(|(theta, _)| theta)
        .take(count)
        .collect();
    if levels.len() < count {
        return Err(Error::NoConvergence(format!(
            "resolved only {} of {count} Landau levels",
            levels.len()
        )));
    }
    Ok(levels)
}

/// |e|B(2n + 1) for n = 0, …, count − 1.
pub fn lowest_landau_eigenvalues(params: &ParticleParams, b0: f64, count: usize) -> Vec<f64> {
    let eb = (params.charge * b0).abs();
    (0..count).map(|n| eb * (2 * n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::eigen::norm;

    fn normal() -> ParticleParams {
        ParticleParams::default()
    }

    #[test]
    fn order_of_exact_power_law() {
        let h = [0.5, 0.25, 0.125];
        let v: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        assert!((convergence_order(&h, &v) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn projected_norm_of_identity_images() {
        let basis = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        let images: Vec<Vector> = basis
            .iter()
            .map(|v| v.iter().map(|z| z * 2.5).collect())
            .collect();
        assert!((projected_norm(&basis, &images).unwrap() - 2.5).abs() < 1e-14);
        assert!((norm(&images[0]) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn uniform_commutator_vanishes_with_refinement() {
        let f = FieldSpec::uniform(0.5);
        let study = RefinementStudy::run(&[24, 32], &GridSpec::default(), |g| {
            Ok(commutator_mo_residual(&f, g, &normal())?.direct_norm)
        })
        .unwrap();
        assert!(study.order >= 1.5, "{study:?}");
    }

    #[test]
    fn sheared_commutator_stays_finite() {
        let f = FieldSpec::sheared(0.5, 0.1);
        let mut direct = Vec::new();
        let gap = RefinementStudy::run(&[24, 32], &GridSpec::default(), |g| {
            let r = commutator_mo_residual(&f, g, &normal())?;
            direct.push(r.direct_norm);
            Ok(r.relative_gap)
        })
        .unwrap();
        assert!(direct.iter().all(|&d| d > 4e-2), "{direct:?}");
        assert!(gap.order >= 1.5, "{gap:?}");
    }

    #[test]
    fn anomalous_moment_is_rejected() {
        let p = normal().with_g(1.9);
        let f = FieldSpec::uniform(0.5);
        let g = GridSpec::new(24, 6.0);
        assert!(matches!(
            commutator_mo_residual(&f, &g, &p),
            Err(Error::RequiresNormalMoment(_))
        ));
        assert!(exact_fw_identity_residual(&f, &g, &p).is_err());
        assert!(conserved_projection_residuals(&f, &g, &p).is_err());
    }

    #[test]
    fn field_restrictions() {
        let g = GridSpec::new(24, 6.0);
        assert!(matches!(
            exact_fw_identity_residual(&FieldSpec::sheared(0.5, 0.1), &g, &normal()),
            Err(Error::UnsupportedField(_))
        ));
        assert!(matches!(
            conserved_projection_residuals(&FieldSpec::quadrupole(0.3), &g, &normal()),
            Err(Error::UnsupportedField(_))
        ));
        assert!(matches!(
            landau_levels_ldos(&FieldSpec::quadrupole(0.3), &g, &normal(), 3),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn krylov_root_agrees_with_dense_on_small_grid() {
        let f = FieldSpec::uniform(0.5);
        let grid = GridSpec::new(18, 4.5);
        let ops = build_operators(&f, &grid, &normal()).unwrap();
        let n = ops.sites();
        let apply_dense = |x: &[Complex64]| -> Vector {
            let mut y: Vector = x.to_vec();
            for p in ops.pi.iter() {
                for (a, b) in y.iter_mut().zip(p.apply(&p.apply(x))) {
                    *a += b;
                }
            }
            y
        };
        let dense = ComplexMatrix::from_fn(n, |_, _| Complex64::new(0.0, 0.0));
        let mut dense = dense;
        for c in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[c] = Complex64::new(1.0, 0.0);
            for (r, z) in apply_dense(&e).into_iter().enumerate() {
                dense[(r, c)] = z;
            }
        }
        let dense = (&dense + &dense.adjoint()).scale_real(0.5);
        let root = crate::algebra::sqrt_psd(&dense).unwrap();
        let v: Vector = (0..n)
            .map(|k| {
                let (x, y) = grid.position(k);
                Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.1 * x)
            })
            .collect();
        let want = root.apply(&v).unwrap();
        let got = krylov_function_apply(apply_dense, &v, f64::sqrt, KRYLOV_TOL, KRYLOV_MAX_STEPS)
            .unwrap();
        let err = norm(&sub(&got, &want)) / norm(&want);
        assert!(err < 1e-10, "relative error {err:e}");
    }

    #[test]
    fn longitudinal_projection_commutes_exactly() {
        let f = FieldSpec::uniform(0.5);
        let p = ParticleParams {
            pz: 0.3,
            ..normal()
        };
        let res = conserved_projection_residuals(&f, &GridSpec::new(24, 6.0), &p).unwrap();
        let (kind, r) = res[0];
        assert_eq!(kind, ProjectionKind::Longitudinal);
        assert!(r.residual <= 1e-10 * r.scale, "{r:?}");
        for (kind, r) in &res[1..] {
            assert!(r.residual > 1e-10 * r.scale, "{} {r:?}", kind.name());
        }
    }

    #[test]
    fn landau_levels_from_the_centre() {
        let p = normal();
        let f = FieldSpec::uniform(0.2);
        let grid = GridSpec::new(64, 15.0);
        let levels = landau_levels_ldos(&f, &grid, &p, 3).unwrap();
        for (got, want) in levels.iter().zip(lowest_landau_eigenvalues(&p, 0.2, 3)) {
            assert!((got - want).abs() < 0.02 * want, "{levels:?}");
        }
    }

    #[test]
    fn lowest_level_is_degenerate() {
        let p = normal();
        let f = FieldSpec::uniform(0.2);
        let low = landau_spectrum_grid(&f, &GridSpec::new(40, 10.0), &p, 12).unwrap();
        let near = low
            .iter()
            .filter(|&&v| (v - 0.2).abs() < 0.02 * 0.2)
            .count();
        assert!(near >= 2, "{low:?}");
    }

    #[test]
    fn constant_az_shift_is_absorbed_by_pz() {
        let f = FieldSpec::uniform(0.5);
        let grid = GridSpec::new(20, 5.0);
        let lowest = |field: &FieldSpec, pz: f64| {
            let p = ParticleParams { pz, ..normal() };
            let ops = build_operators(field, &grid, &p).unwrap();
            let h = &ops.pi2_compact;
            lowest_eigenpairs(|x| h.apply(x), h.dim(), 1, h.gershgorin_bound(), 3, 1e-11)
                .unwrap()
                .values[0]
        };
        let base = lowest(&f, 0.0);
        let shifted = lowest(&f.with_az_shift(0.7), 0.7);
        assert!((base - shifted).abs() < 1e-10, "{base} vs {shifted}");
    }
}
