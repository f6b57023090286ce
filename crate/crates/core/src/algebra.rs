//! Dense complex matrices for the internal (spin and ρ) spaces, the spin-1
//! matrix set, and Hermitian matrix functions.
//!
//! The matrix functions (`eig_hermitian`, `sqrt_psd`, `exp_unitary`) are the
//! reference against which every closed-form spectral statement in the crate
//! is checked, so they never take shortcuts for structured inputs.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.len(),
            });
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max|A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs()
    }

    fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let scale = self.max_abs();
        if defect <= HERMITIAN_TOL * scale {
            Ok(())
        } else {
            Err(Error::NotHermitian { defect, scale })
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = (self.dim, rhs.dim);
        Self::from_fn(p * q, |i, j| self[(i / q, j / q)] * rhs[(i % q, j % q)])
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// ⟨v|A|v⟩ for a vector of matching length.
    pub fn expectation(&self, v: &[Complex64]) -> Result<Complex64> {
        let av = self.apply(v)?;
        Ok(v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Max-norm distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// The operator impls panic on a size mismatch; use the `checked_*` forms when
// the sizes come from outside.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix dimensions must agree")
    }
}

/// `ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.checked_mul(b)?.checked_sub(&b.checked_mul(a)?)
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.checked_mul(b)?.checked_add(&b.checked_mul(a)?)
}

/// The spin-1 matrices in the S_z basis (+1, 0, −1), with the quadratic
/// combinations that appear in the reduced Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperatorSet {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    /// S_z² = diag(1, 0, 1).
    pub sz2: ComplexMatrix,
    /// S_x² − S_y²: ones at (1,3) and (3,1).
    pub sxx_minus_syy: ComplexMatrix,
    pub identity3: ComplexMatrix,
}

impl SpinOperatorSet {
    pub fn components(&self) -> [&ComplexMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

impl Default for SpinOperatorSet {
    fn default() -> Self {
        build_spin_matrices()
    }
}

pub fn build_spin_matrices() -> SpinOperatorSet {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let ir = Complex64::new(0.0, FRAC_1_SQRT_2);
    let sx = ComplexMatrix {
        dim: 3,
        data: vec![ZERO, r, ZERO, r, ZERO, r, ZERO, r, ZERO],
    };
    let sy = ComplexMatrix {
        dim: 3,
        data: vec![ZERO, -ir, ZERO, ir, ZERO, -ir, ZERO, ir, ZERO],
    };
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]);
    let sz2 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0]);
    let mut sxx_minus_syy = ComplexMatrix::zeros(3);
    sxx_minus_syy[(0, 2)] = ONE;
    sxx_minus_syy[(2, 0)] = ONE;
    SpinOperatorSet {
        sx,
        sy,
        sz,
        sz2,
        sxx_minus_syy,
        identity3: ComplexMatrix::identity(3),
    }
}

/// The 2×2 ρ₁, ρ₂, ρ₃ Pauli matrices acting on the upper/lower components.
pub fn rho_matrices() -> [ComplexMatrix; 3] {
    let rho1 = ComplexMatrix {
        dim: 2,
        data: vec![ZERO, ONE, ONE, ZERO],
    };
    let rho2 = ComplexMatrix {
        dim: 2,
        data: vec![ZERO, -I, I, ZERO],
    };
    let rho3 = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    [rho1, rho2, rho3]
}

/// Π = ρ₃ ⊗ S on the six-component space (ρ index outermost).
pub fn polarization_operator(spin: &SpinOperatorSet) -> [ComplexMatrix; 3] {
    let rho3 = &rho_matrices()[2];
    [
        rho3.kron(&spin.sx),
        rho3.kron(&spin.sy),
        rho3.kron(&spin.sz),
    ]
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// V f(Λ) V†.
    pub fn reconstruct(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix. The input is symmetrized before the decomposition; each
/// eigenvector is rotated so its largest-magnitude component (first one on
/// ties) is real and positive.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    a.require_hermitian()?;
    let n = a.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0),
        });
    }
    let m = a.to_nalgebra();
    let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let v: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
        let phase = canonical_phase(&v);
        for (i, z) in v.iter().enumerate() {
            vectors[(i, col)] = z * phase;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Unit factor that makes the largest-magnitude component real positive.
fn canonical_phase(v: &[Complex64]) -> Complex64 {
    let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if biggest == 0.0 {
        return ONE;
    }
    let lead = v
        .iter()
        .find(|z| z.norm() >= biggest * (1.0 - 1e-12))
        .copied()
        .unwrap_or(ONE);
    lead.conj() / lead.norm()
}

/// f(A) for Hermitian A and a real scalar function.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a)?;
    Ok(eig.reconstruct(|l| Complex64::new(f(l), 0.0)))
}

/// Principal square root of a Hermitian positive-definite matrix.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(a)?;
    if let Some(&min) = eig.values.first() {
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
    }
    Ok(eig.reconstruct(|l| Complex64::new(l.sqrt(), 0.0)))
}

/// U = exp(−i h t) for Hermitian h.
pub fn exp_unitary(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(eig.reconstruct(|l| Complex64::from_polar(1.0, -l * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Literal matrices and a naive triple loop, kept apart from the
    // library's multiplication path.
    fn literal_spin() -> [[[Complex64; 3]; 3]; 3] {
        let r = 1.0 / 2f64.sqrt();
        let z = c(0.0, 0.0);
        [
            [
                [z, c(r, 0.0), z],
                [c(r, 0.0), z, c(r, 0.0)],
                [z, c(r, 0.0), z],
            ],
            [
                [z, c(0.0, -r), z],
                [c(0.0, r), z, c(0.0, -r)],
                [z, c(0.0, r), z],
            ],
            [[c(1.0, 0.0), z, z], [z, z, z], [z, z, c(-1.0, 0.0)]],
        ]
    }

    fn naive_mul(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> [[Complex64; 3]; 3] {
        let mut out = [[c(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn sz_is_diagonal() {
        let s = build_spin_matrices();
        assert_eq!(s.sz, ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn sx_sy_anticommutator_matches_hand_multiplication() {
        let lit = literal_spin();
        let xy = naive_mul(&lit[0], &lit[1]);
        let yx = naive_mul(&lit[1], &lit[0]);
        // Oracle: only (1,3) = −i and (3,1) = +i survive.
        for i in 0..3 {
            for j in 0..3 {
                let expected = match (i, j) {
                    (0, 2) => c(0.0, -1.0),
                    (2, 0) => c(0.0, 1.0),
                    _ => c(0.0, 0.0),
                };
                assert!((xy[i][j] + yx[i][j] - expected).norm() < 1e-15);
            }
        }
        let s = build_spin_matrices();
        let ac = anticommutator(&s.sx, &s.sy).unwrap();
        assert!((ac[(0, 2)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((ac[(2, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(ac[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn sz_cubed_is_sz() {
        let s = build_spin_matrices();
        let cube = &(&s.sz * &s.sz) * &s.sz;
        assert_eq!(cube, s.sz);
    }

    #[test]
    fn commutator_examples() {
        let s = build_spin_matrices();
        let xy = commutator(&s.sx, &s.sy).unwrap();
        assert!(xy.max_abs_diff(&s.sz.scale(I)).unwrap() < 1e-15);
        assert_eq!(commutator(&s.sz, &s.sz).unwrap().max_abs(), 0.0);
        let sx2 = &s.sx * &s.sx;
        assert!(commutator(&s.sz2, &sx2).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn anticommutator_examples() {
        let s = build_spin_matrices();
        let a = &s.sx + &s.sy.scale(c(0.3, 0.0));
        let with_id = anticommutator(&s.identity3, &a).unwrap();
        assert!(with_id.max_abs_diff(&a.scale_real(2.0)).unwrap() < 1e-15);
        let zz = anticommutator(&s.sz, &s.sz).unwrap();
        assert!(zz.max_abs_diff(&s.sz2.scale_real(2.0)).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert_eq!(
            commutator(&a, &b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_err());
    }

    #[test]
    fn quadratic_combinations_match_products() {
        let s = build_spin_matrices();
        let sz2 = &s.sz * &s.sz;
        assert!(sz2.max_abs_diff(&s.sz2).unwrap() < 1e-15);
        let diff = &(&s.sx * &s.sx) - &(&s.sy * &s.sy);
        assert!(diff.max_abs_diff(&s.sxx_minus_syy).unwrap() < 1e-15);
        let sum = &(&(&s.sx * &s.sx) + &(&s.sy * &s.sy)) + &sz2;
        assert!(sum.max_abs_diff(&s.identity3.scale_real(2.0)).unwrap() < 1e-15);
    }

    #[test]
    fn polarization_operator_is_rho3_times_spin() {
        let s = build_spin_matrices();
        let pi = polarization_operator(&s);
        assert_eq!(pi[2].dim(), 6);
        assert_eq!(pi[2][(0, 0)], ONE);
        assert_eq!(pi[2][(3, 3)], -ONE);
        assert_eq!(pi[0][(3, 4)], -s.sx[(0, 1)]);
    }

    #[test]
    fn eig_examples() {
        let s = build_spin_matrices();
        let ez = eig_hermitian(&s.sz).unwrap();
        assert_eq!(ez.values, vec![-1.0, 0.0, 1.0]);
        let ex = eig_hermitian(&s.sx).unwrap();
        // Oracle: characteristic polynomial λ³ = λ.
        for (got, want) in ex.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let one = eig_hermitian(&ComplexMatrix::from_real_diagonal(&[5.0])).unwrap();
        assert_eq!(one.values, vec![5.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenvectors_follow_phase_convention() {
        let s = build_spin_matrices();
        let h = &s.sy + &s.sz.scale_real(0.4);
        let eig = eig_hermitian(&h).unwrap();
        for k in 0..3 {
            let v = eig.vector(k);
            let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lead = v.iter().find(|z| z.norm() >= big * (1.0 - 1e-12)).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn sqrt_examples() {
        let id = ComplexMatrix::identity(4);
        assert!(sqrt_psd(&id).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        let d = ComplexMatrix::from_real_diagonal(&[4.0, 9.0, 16.0]);
        let r = sqrt_psd(&d).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[2.0, 3.0, 4.0]);
        assert!(r.max_abs_diff(&want).unwrap() < 1e-14);
        // m² + |e|B(2n+1) for n = 0, 1, 2 at eB = 0.1.
        let sector = ComplexMatrix::from_real_diagonal(&[1.1, 1.3, 1.5]);
        let r = sqrt_psd(&sector).unwrap();
        for (k, v) in [1.1f64, 1.3, 1.5].iter().enumerate() {
            assert!((r[(k, k)].re - v.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn sqrt_reports_minimum_eigenvalue() {
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -0.5, 2.0]);
        assert_eq!(
            sqrt_psd(&d),
            Err(Error::NotPositiveDefinite {
                min_eigenvalue: -0.5
            })
        );
    }

    #[test]
    fn exp_examples() {
        let s = build_spin_matrices();
        let h = &s.sx + &s.sz2.scale_real(0.7);
        let u0 = exp_unitary(&h, 0.0).unwrap();
        assert!(u0.max_abs_diff(&s.identity3).unwrap() < 1e-14);

        let u = exp_unitary(&s.sz, PI).unwrap();
        let want = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0, -1.0]);
        assert!(u.max_abs_diff(&want).unwrap() < 1e-14);

        let back = &exp_unitary(&h, 1.3).unwrap() * &exp_unitary(&h, -1.3).unwrap();
        assert!(back.max_abs_diff(&s.identity3).unwrap() < 1e-12);
    }
}
