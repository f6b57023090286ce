//! Iterative Hermitian eigensolvers for lattice operators given only as
//! matrix-vector products.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{eig_hermitian, ComplexMatrix};
use crate::error::{Error, Result};

type Vector = Vec<Complex64>;

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Modified Gram-Schmidt, applied twice; a column that collapses is
/// replaced by a fresh random direction.
fn orthonormalize(block: &mut [Vector], rng: &mut ChaCha8Rng) {
    for i in 0..block.len() {
        for attempt in 0..3 {
            let before = norm(&block[i]);
            for _ in 0..2 {
                for j in 0..i {
                    let (done, rest) = block.split_at_mut(i);
                    let c = dot(&done[j], &rest[0]);
                    axpy(&mut rest[0], -c, &done[j]);
                }
            }
            let after = norm(&block[i]);
            if after > 1e-10 * before && after > 0.0 {
                let inv = 1.0 / after;
                block[i].iter_mut().for_each(|z| *z *= inv);
                break;
            }
            assert!(attempt < 2, "could not complete an orthonormal basis");
            block[i] = random_vector(rng, block[i].len());
        }
    }
}

fn symmetrized(h: ComplexMatrix) -> ComplexMatrix {
    let adj = h.adjoint();
    (&h + &adj).scale_real(0.5)
}

/// Lowest eigenpairs of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vector>,
    pub iterations: usize,
    /// Largest ‖A v − λ v‖ among the returned pairs.
    pub max_residual: f64,
}

const FILTER_DEGREE: usize = 20;
const MAX_FILTER_ROUNDS: usize = 400;

/// The `k` lowest eigenpairs of a Hermitian operator by Chebyshev-filtered
/// subspace iteration with Rayleigh-Ritz extraction.
///
/// `upper` must bound the spectrum from above (a Gershgorin bound will do).
/// Iteration stops once every wanted residual is below `tol · upper`. The
/// random start block is drawn from `seed`, so results are reproducible.
pub fn lowest_eigenpairs(
    apply: impl Fn(&[Complex64]) -> Vector,
    n: usize,
    k: usize,
    upper: f64,
    seed: u64,
    tol: f64,
) -> Result<EigenPairs> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "cannot extract {k} eigenpairs from dimension {n}"
        )));
    }
    let p = (k + k.max(8)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vector> = (0..p).map(|_| random_vector(&mut rng, n)).collect();
    orthonormalize(&mut x, &mut rng);
    let (mut theta, mut ax) = rayleigh_ritz(&apply, &mut x)?;

    for round in 0..=MAX_FILTER_ROUNDS {
        let max_residual = (0..k)
            .map(|i| {
                let mut r = ax[i].clone();
                axpy(&mut r, Complex64::new(-theta[i], 0.0), &x[i]);
                norm(&r)
            })
            .fold(0.0, f64::max);
        if max_residual <= tol * upper {
            x.truncate(k);
            theta.truncate(k);
            return Ok(EigenPairs {
                values: theta,
                vectors: x,
                iterations: round,
                max_residual,
            });
        }
        if round == MAX_FILTER_ROUNDS {
            break;
        }
        let cut = theta[p - 1];
        if cut >= upper {
            return Err(Error::InvalidParameter(
                "upper bound lies inside the computed spectrum".into(),
            ));
        }
        chebyshev_filter(&apply, &mut x, cut, upper, theta[0]);
        orthonormalize(&mut x, &mut rng);
        let next = rayleigh_ritz(&apply, &mut x)?;
        theta = next.0;
        ax = next.1;
    }
    Err(Error::NoConvergence(format!(
        "subspace iteration for {k} eigenpairs did not reach tolerance {tol:e}"
    )))
}

/// Rotates the orthonormal block onto Ritz vectors; returns Ritz values and
/// the images A·x.
fn rayleigh_ritz(
    apply: &impl Fn(&[Complex64]) -> Vector,
    x: &mut Vec<Vector>,
) -> Result<(Vec<f64>, Vec<Vector>)> {
    let p = x.len();
    let ax: Vec<Vector> = x.iter().map(|v| apply(v)).collect();
    let h = symmetrized(ComplexMatrix::from_fn(p, |i, j| dot(&x[i], &ax[j])));
    let eig = eig_hermitian(&h)?;
    let rotate = |block: &[Vector]| -> Vec<Vector> {
        (0..p)
            .map(|c| {
                let mut v = vec![Complex64::new(0.0, 0.0); block[0].len()];
                for (r, b) in block.iter().enumerate() {
                    axpy(&mut v, eig.vectors[(r, c)], b);
                }
                v
            })
            .collect()
    };
    let ax = rotate(&ax);
    *x = rotate(x);
    Ok((eig.values, ax))
}

/// Scaled Chebyshev filter that damps [cut, upper] and amplifies the
/// spectrum below `cut`; `lowest` sets the scaling point.
fn chebyshev_filter(
    apply: &impl Fn(&[Complex64]) -> Vector,
    x: &mut [Vector],
    cut: f64,
    upper: f64,
    lowest: f64,
) {
    let e = (upper - cut) / 2.0;
    let c = (upper + cut) / 2.0;
    let mut sigma = e / (lowest - c);
    let tau = 2.0 / sigma;
    for v in x.iter_mut() {
        let mut prev = v.clone();
        let av = apply(v);
        let mut cur: Vector = av
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b * c) * (sigma / e))
            .collect();
        for _ in 2..=FILTER_DEGREE {
            let s_new = 1.0 / (tau - sigma);
            let ac = apply(&cur);
            let next: Vector = ac
                .iter()
                .zip(&cur)
                .zip(&prev)
                .map(|((a, y), x0)| (a - y * c) * (2.0 * s_new / e) - x0 * (sigma * s_new))
                .collect();
            prev = cur;
            cur = next;
            sigma = s_new;
        }
        *v = cur;
    }
}

/// Lanczos with full reorthogonalization from `v0`: returns Ritz values and
/// their weights |⟨v0|y⟩|²/‖v0‖², i.e. the spectral measure of the start
/// vector.
pub fn lanczos_spectral_weights(
    apply: impl Fn(&[Complex64]) -> Vector,
    v0: &[Complex64],
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let (alpha, beta, _) = lanczos(&apply, v0, steps, |_, _| false)?;
    let (values, vectors) = tridiagonal_eigen(&alpha, &beta);
    let mut out: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(j, &theta)| (theta, vectors[(0, j)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

type LanczosRun = (Vec<f64>, Vec<f64>, Vec<Vector>);

/// Runs up to `steps` Lanczos steps. `stop(alpha, beta)` is consulted after
/// each step and may end the run early; an invariant subspace also ends it.
fn lanczos(
    apply: &impl Fn(&[Complex64]) -> Vector,
    v0: &[Complex64],
    steps: usize,
    mut stop: impl FnMut(&[f64], &[f64]) -> bool,
) -> Result<LanczosRun> {
    let n0 = norm(v0);
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidParameter(
            "Lanczos start vector must be nonzero".into(),
        ));
    }
    let mut q: Vec<Vector> = vec![v0.iter().map(|z| z / n0).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut scale = 0.0f64;
    for j in 0..steps {
        let mut w = apply(&q[j]);
        let a = dot(&q[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &w);
                axpy(&mut w, -c, qi);
            }
        }
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        if j + 1 == steps || b <= 1e-13 * scale || stop(&alpha, &beta) {
            break;
        }
        beta.push(b);
        q.push(w.iter().map(|z| z / b).collect());
    }
    beta.truncate(alpha.len() - 1);
    q.truncate(alpha.len());
    Ok((alpha, beta, q))
}

/// f(A)·v for Hermitian A by the Lanczos approximation ‖v‖ Q f(T) e₁.
///
/// The coefficient vector f(T)e₁ is re-evaluated every few steps and the run
/// stops once it changes by less than `tol` relative to its norm.
pub fn krylov_function_apply(
    apply: impl Fn(&[Complex64]) -> Vector,
    v: &[Complex64],
    f: impl Fn(f64) -> f64,
    tol: f64,
    max_steps: usize,
) -> Result<Vector> {
    let n0 = norm(v);
    if n0 == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); v.len()]);
    }
    const CHECK_EVERY: usize = 10;
    let coefficients = |alpha: &[f64], beta: &[f64]| -> Vec<f64> {
        let (values, vectors) = tridiagonal_eigen(alpha, beta);
        let weights: Vec<f64> = (0..alpha.len())
            .map(|k| f(values[k]) * vectors[(0, k)])
            .collect();
        (0..alpha.len())
            .map(|i| (0..alpha.len()).map(|k| vectors[(i, k)] * weights[k]).sum())
            .collect()
    };
    let mut previous: Vec<f64> = Vec::new();
    let mut converged = false;
    let (alpha, beta, q) = lanczos(&apply, v, max_steps, |alpha, beta| {
        if alpha.len() % CHECK_EVERY != 0 {
            return false;
        }
        let y = coefficients(alpha, &beta[..alpha.len() - 1]);
        let change: f64 = y
            .iter()
            .enumerate()
            .map(|(i, c)| (c - previous.get(i).copied().unwrap_or_default()).powi(2))
            .sum::<f64>()
            .sqrt();
        let size = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        previous = y;
        converged = change <= tol * size;
        converged
    })?;
    let exhausted = alpha.len() == max_steps && alpha.len() < v.len();
    if !converged && exhausted {
        return Err(Error::NoConvergence(format!(
            "Krylov function evaluation needs more than {max_steps} steps"
        )));
    }
    let y = coefficients(&alpha, &beta);
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (c, qi) in y.iter().zip(&q) {
        axpy(&mut out, Complex64::new(c * n0, 0.0), qi);
    }
    Ok(out)
}
