//! Assembly of the lattice operators.
//!
//! Each π_i is a fourth-order central difference minus e·A_i. Everything in
//! ℳ, 𝒪 and ℰ is composed from these π_i (so π² means Σ π_i π_i), which
//! keeps the algebraic cancellations of the continuum operators exact
//! wherever they do not rely on [π_i, π_j]. The compact Peierls form of
//! π_x² + π_y² is assembled separately: it has no doubler modes, so it is
//! the operator whose spectrum is compared with the Landau formula and
//! whose low-lying states span the interior subspace.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{build_spin_matrices, rho_matrices, ComplexMatrix};
use crate::error::Result;
use crate::landau::ParticleParams;

use super::sparse::CsrMatrix;
use super::{FieldSpec, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourth-order first-derivative weights at distance 1 and 2.
const FIRST_DERIVATIVE: [(usize, f64); 2] = [(1, 2.0 / 3.0), (2, -1.0 / 12.0)];
/// Fourth-order second-derivative weights at distance 0, 1 and 2.
const SECOND_DERIVATIVE: [(usize, f64); 3] = [(0, -5.0 / 2.0), (1, 4.0 / 3.0), (2, -1.0 / 12.0)];

/// Σ_t S_t ⊗ (O_t1 O_t2 ⋯) on spin(3) ⊗ orbital space, with an empty
/// orbital chain standing for the identity.
#[derive(Debug, Clone)]
pub struct SpinOrbitalOp {
    sites: usize,
    terms: Vec<(ComplexMatrix, Vec<Arc<CsrMatrix>>)>,
}

impl SpinOrbitalOp {
    pub fn new(sites: usize) -> Self {
        Self {
            sites,
            terms: Vec::new(),
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        3 * self.sites
    }

    pub fn push(&mut self, spin: ComplexMatrix, chain: Vec<Arc<CsrMatrix>>) {
        debug_assert_eq!(spin.dim(), 3);
        if spin.max_abs() != 0.0 {
            self.terms.push((spin, chain));
        }
    }

    pub fn plus(mut self, other: &SpinOrbitalOp, factor: f64) -> Self {
        for (s, chain) in &other.terms {
            self.push(s.scale_real(factor), chain.clone());
        }
        self
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.sites;
        assert_eq!(x.len(), 3 * n, "spin-orbital vector has the wrong length");
        let mut y = vec![ZERO; 3 * n];
        for (spin, chain) in &self.terms {
            for j in 0..3 {
                if (0..3).all(|i| spin[(i, j)] == ZERO) {
                    continue;
                }
                let mut u = x[j * n..(j + 1) * n].to_vec();
                for op in chain.iter().rev() {
                    u = op.apply(&u);
                }
                for i in 0..3 {
                    let s = spin[(i, j)];
                    if s == ZERO {
                        continue;
                    }
                    for (yk, uk) in y[i * n..(i + 1) * n].iter_mut().zip(&u) {
                        *yk += s * uk;
                    }
                }
            }
        }
        y
    }
}

/// Σ_t R_t ⊗ P_t on ρ(2) ⊗ spin(3) ⊗ orbital space.
#[derive(Debug, Clone)]
pub struct FullOp {
    sites: usize,
    terms: Vec<(ComplexMatrix, Arc<SpinOrbitalOp>)>,
}

impl FullOp {
    pub fn new(sites: usize) -> Self {
        Self {
            sites,
            terms: Vec::new(),
        }
    }

    pub fn with(mut self, rho: ComplexMatrix, op: Arc<SpinOrbitalOp>) -> Self {
        debug_assert_eq!(rho.dim(), 2);
        self.terms.push((rho, op));
        self
    }

    pub fn dim(&self) -> usize {
        6 * self.sites
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = 3 * self.sites;
        assert_eq!(x.len(), 2 * m, "full vector has the wrong length");
        let mut y = vec![ZERO; 2 * m];
        for (rho, op) in &self.terms {
            for j in 0..2 {
                if rho[(0, j)] == ZERO && rho[(1, j)] == ZERO {
                    continue;
                }
                let u = op.apply(&x[j * m..(j + 1) * m]);
                for i in 0..2 {
                    let r = rho[(i, j)];
                    if r == ZERO {
                        continue;
                    }
                    for (yk, uk) in y[i * m..(i + 1) * m].iter_mut().zip(&u) {
                        *yk += r * uk;
                    }
                }
            }
        }
        y
    }
}

/// The assembled lattice operators for one field, grid and particle.
#[derive(Debug, Clone)]
pub struct GridOperatorSet {
    pub grid: GridSpec,
    pub field: FieldSpec,
    pub params: ParticleParams,
    /// π_x, π_y, π_z on orbital space.
    pub pi: [Arc<CsrMatrix>; 3],
    /// B at each site.
    pub b_field: [Vec<f64>; 3],
    /// Compact Peierls π_x² + π_y².
    pub pi2_planar: Arc<CsrMatrix>,
    /// Compact Peierls π_x² + π_y² plus π_z².
    pub pi2_compact: Arc<CsrMatrix>,
    /// I ⊗ Σ π_i π_i.
    pub pi2: Arc<SpinOrbitalOp>,
    /// S·B.
    pub s_dot_b: Arc<SpinOrbitalOp>,
    /// (S·π)².
    pub s_dot_pi_sq: Arc<SpinOrbitalOp>,
    /// S·π.
    pub s_dot_pi: Arc<SpinOrbitalOp>,
    /// ℳ = m + π²/2m − (e/m) S·B.
    pub m_op: Arc<SpinOrbitalOp>,
    /// X = π²/2m − (S·π)²/m + e(g−2)/(2m) S·B, so that 𝒪 = iρ₂X.
    pub x_op: Arc<SpinOrbitalOp>,
    /// I_ρ ⊗ ℳ.
    pub m_full: FullOp,
    /// ℰ = −ρ₃ e(g−2)/(2m) S·B.
    pub e_full: FullOp,
    /// 𝒪 = iρ₂ X.
    pub o_full: FullOp,
    /// ρ₃ℳ + ℰ + 𝒪.
    pub h_st: FullOp,
}

impl GridOperatorSet {
    pub fn sites(&self) -> usize {
        self.grid.sites()
    }

    /// Confining operator π²_compact + r²/ℓ_c⁴ whose lowest states span the
    /// interior subspace.
    pub fn confined_pi2(&self) -> CsrMatrix {
        let w = self.grid.confinement_length.powi(-4);
        let extra: Vec<Complex64> = (0..self.sites())
            .map(|k| {
                let (x, y) = self.grid.position(k);
                Complex64::new(w * (x * x + y * y), 0.0)
            })
            .collect();
        add_diagonal(&self.pi2_compact, &extra)
    }

    /// ρ₃ applied to a full vector.
    pub fn apply_rho3(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = 3 * self.sites();
        x.iter()
            .enumerate()
            .map(|(k, &z)| if k < m { z } else { -z })
            .collect()
    }
}

fn add_diagonal(a: &CsrMatrix, d: &[Complex64]) -> CsrMatrix {
    let mut t = a.triplets();
    t.extend(d.iter().enumerate().map(|(k, &v)| (k, k, v)));
    CsrMatrix::from_triplets(a.dim(), t)
}

fn neighbour(grid: &GridSpec, k: usize, axis: usize, step: isize) -> Option<usize> {
    let n = grid.n_points as isize;
    let (i, j) = ((k % grid.n_points) as isize, (k / grid.n_points) as isize);
    let (ii, jj) = if axis == 0 {
        (i + step, j)
    } else {
        (i, j + step)
    };
    if (0..n).contains(&ii) && (0..n).contains(&jj) {
        Some((ii + n * jj) as usize)
    } else {
        None
    }
}

fn derivative(grid: &GridSpec, axis: usize) -> CsrMatrix {
    let h = grid.spacing();
    let mut t = Vec::new();
    for k in 0..grid.sites() {
        for &(dist, w) in &FIRST_DERIVATIVE {
            for s in [1isize, -1] {
                if let Some(q) = neighbour(grid, k, axis, s * dist as isize) {
                    t.push((k, q, Complex64::new(s as f64 * w / h, 0.0)));
                }
            }
        }
    }
    CsrMatrix::from_triplets(grid.sites(), t)
}

/// Simpson's rule for ∫A_axis along the straight link from site k to q.
fn link_phase(grid: &GridSpec, field: &FieldSpec, k: usize, q: usize, axis: usize) -> f64 {
    let (x0, y0) = grid.position(k);
    let (x1, y1) = grid.position(q);
    let a = |x: f64, y: f64| field.vector_potential(x, y)[axis];
    let len = if axis == 0 { x1 - x0 } else { y1 - y0 };
    len * (a(x0, y0) + 4.0 * a((x0 + x1) / 2.0, (y0 + y1) / 2.0) + a(x1, y1)) / 6.0
}

fn compact_planar_pi2(grid: &GridSpec, field: &FieldSpec, charge: f64) -> CsrMatrix {
    let h2 = grid.spacing().powi(2);
    let mut t = Vec::new();
    for k in 0..grid.sites() {
        t.push((
            k,
            k,
            Complex64::new(-2.0 * SECOND_DERIVATIVE[0].1 / h2, 0.0),
        ));
        for axis in 0..2 {
            for &(dist, w) in &SECOND_DERIVATIVE[1..] {
                // Each link is visited once, from its lower end, so the
                // pair of entries is conjugate by construction.
                if let Some(q) = neighbour(grid, k, axis, dist as isize) {
                    let theta = link_phase(grid, field, k, q, axis);
                    let v = Complex64::from_polar(1.0, -charge * theta) * (-w / h2);
                    t.push((k, q, v));
                    t.push((q, k, v.conj()));
                }
            }
        }
    }
    CsrMatrix::from_triplets(grid.sites(), t)
}

/// Assembles every lattice operator after validating the grid.
pub fn build_operators(
    field: &FieldSpec,
    grid: &GridSpec,
    params: &ParticleParams,
) -> Result<GridOperatorSet> {
    params.validate()?;
    grid.validate(field, params)?;
    let n = grid.sites();
    let (m, e, g) = (params.mass, params.charge, params.g_factor);
    let positions: Vec<(f64, f64)> = (0..n).map(|k| grid.position(k)).collect();
    let potential: Vec<[f64; 3]> = positions
        .iter()
        .map(|&(x, y)| field.vector_potential(x, y))
        .collect();

    let mut pis = Vec::with_capacity(3);
    for axis in [0, 1] {
        let mut t: Vec<_> = derivative(grid, axis)
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (r, c, v * Complex64::new(0.0, -1.0)))
            .collect();
        t.extend((0..n).map(|k| (k, k, Complex64::new(-e * potential[k][axis], 0.0))));
        pis.push(Arc::new(CsrMatrix::from_triplets(n, t)));
    }
    let pz_diag: Vec<Complex64> = potential
        .iter()
        .map(|a| Complex64::new(params.pz - e * a[2], 0.0))
        .collect();
    pis.push(Arc::new(CsrMatrix::diagonal(&pz_diag)));
    let pi: [Arc<CsrMatrix>; 3] = [pis[0].clone(), pis[1].clone(), pis[2].clone()];

    let b_field: [Vec<f64>; 3] = std::array::from_fn(|c| {
        positions
            .iter()
            .map(|&(x, y)| field.field(x, y)[c])
            .collect()
    });

    let pi2_planar = Arc::new(compact_planar_pi2(grid, field, e));
    let pz2: Vec<Complex64> = pz_diag.iter().map(|z| z * z).collect();
    let pi2_compact = Arc::new(add_diagonal(&pi2_planar, &pz2));

    let spin = build_spin_matrices();
    let s = [&spin.sx, &spin.sy, &spin.sz];

    let mut pi2 = SpinOrbitalOp::new(n);
    for p in &pi {
        pi2.push(spin.identity3.clone(), vec![p.clone(), p.clone()]);
    }

    let mut s_dot_b = SpinOrbitalOp::new(n);
    for c in 0..3 {
        if b_field[c].iter().any(|&v| v != 0.0) {
            let diag: Vec<Complex64> = b_field[c].iter().map(|&v| Complex64::new(v, 0.0)).collect();
            s_dot_b.push(s[c].clone(), vec![Arc::new(CsrMatrix::diagonal(&diag))]);
        }
    }

    let mut s_dot_pi = SpinOrbitalOp::new(n);
    for c in 0..3 {
        s_dot_pi.push(s[c].clone(), vec![pi[c].clone()]);
    }

    let mut s_dot_pi_sq = SpinOrbitalOp::new(n);
    for i in 0..3 {
        for j in 0..3 {
            s_dot_pi_sq.push(s[i] * s[j], vec![pi[i].clone(), pi[j].clone()]);
        }
    }

    let mut m_op = SpinOrbitalOp::new(n);
    m_op.push(spin.identity3.scale_real(m), Vec::new());
    let m_op = m_op.plus(&pi2, 1.0 / (2.0 * m)).plus(&s_dot_b, -e / m);
    let x_op = SpinOrbitalOp::new(n)
        .plus(&pi2, 1.0 / (2.0 * m))
        .plus(&s_dot_pi_sq, -1.0 / m)
        .plus(&s_dot_b, e * (g - 2.0) / (2.0 * m));
    let m_op = Arc::new(m_op);
    let x_op = Arc::new(x_op);

    let [_, rho2, rho3] = rho_matrices();
    let i_rho2 = rho2.scale(Complex64::new(0.0, 1.0));
    let m_full = FullOp::new(n).with(ComplexMatrix::identity(2), m_op.clone());
    let e_full = FullOp::new(n).with(
        rho3.scale_real(-e * (g - 2.0) / (2.0 * m)),
        Arc::new(SpinOrbitalOp::new(n).plus(&s_dot_b, 1.0)),
    );
    let o_full = FullOp::new(n).with(i_rho2.clone(), x_op.clone());
    let mut h_st = FullOp::new(n)
        .with(rho3.clone(), m_op.clone())
        .with(i_rho2, x_op.clone());
    if g != 2.0 {
        h_st = h_st.with(
            rho3.scale_real(-e * (g - 2.0) / (2.0 * m)),
            Arc::new(SpinOrbitalOp::new(n).plus(&s_dot_b, 1.0)),
        );
    }

    Ok(GridOperatorSet {
        grid: *grid,
        field: *field,
        params: *params,
        pi,
        b_field,
        pi2_planar,
        pi2_compact,
        pi2: Arc::new(pi2),
        s_dot_b: Arc::new(s_dot_b),
        s_dot_pi_sq: Arc::new(s_dot_pi_sq),
        s_dot_pi: Arc::new(s_dot_pi),
        m_op,
        x_op,
        m_full,
        e_full,
        o_full,
        h_st,
    })
}
