//! Time evolution of a spin-1 state under a [`ReducedHamiltonian`].
//!
//! The Hamiltonian is 3×3 and time independent, so states are propagated
//! exactly through its eigendecomposition; no integrator is involved.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{build_spin_matrices, eig_hermitian, HermitianEigen, SpinOperatorSet};
use crate::error::{Error, Result};
use crate::fw_amm::{spin_moments, stationary_states, ReducedHamiltonian, NORM_TOL};

/// Normalized amplitudes in the S_z basis (+1, 0, −1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    amplitudes: [Complex64; 3],
}

impl SpinState {
    /// Accepts amplitudes whose squared norm is 1 within 1e−12.
    pub fn new(amplitudes: [Complex64; 3]) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if n2.is_nan() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero finite amplitudes to unit norm.
    pub fn normalized(amplitudes: [Complex64; 3]) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::Unnormalized(n2));
        }
        let inv = 1.0 / n2.sqrt();
        Ok(Self {
            amplitudes: amplitudes.map(|z| z * inv),
        })
    }

    pub fn sz_plus() -> Self {
        Self::basis(0)
    }

    pub fn sz_zero() -> Self {
        Self::basis(1)
    }

    pub fn sz_minus() -> Self {
        Self::basis(2)
    }

    /// The S_x = +1 eigenstate (1, √2, 1)/2.
    pub fn sx_plus() -> Self {
        let h = Complex64::new(0.5, 0.0);
        Self {
            amplitudes: [h, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), h],
        }
    }

    fn basis(k: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 3];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; 3] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Spin observables at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationRecord {
    pub t: f64,
    /// ⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩.
    pub vector: [f64; 3],
    /// ⟨S_x²⟩, ⟨S_y²⟩, ⟨S_z²⟩, ⟨{S_x,S_y}⟩, ⟨{S_y,S_z}⟩, ⟨{S_z,S_x}⟩.
    pub tensor: [f64; 6],
}

impl PolarizationRecord {
    /// Horizontal vector polarization √(⟨S_x⟩² + ⟨S_y⟩²).
    pub fn p_perp(&self) -> f64 {
        self.vector[0].hypot(self.vector[1])
    }

    pub fn tensor_trace(&self) -> f64 {
        self.tensor[0] + self.tensor[1] + self.tensor[2]
    }
}

/// Exact propagator exp(−iHt) built from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: HermitianEigen,
}

impl Propagator {
    pub fn new(rh: &ReducedHamiltonian) -> Result<Self> {
        Ok(Self {
            eig: eig_hermitian(&rh.matrix)?,
        })
    }

    pub fn apply(&self, psi: &[Complex64; 3], t: f64) -> [Complex64; 3] {
        let v = &self.eig.vectors;
        let mut coeff = [Complex64::new(0.0, 0.0); 3];
        for (k, c) in coeff.iter_mut().enumerate() {
            let proj: Complex64 = (0..3).map(|i| v[(i, k)].conj() * psi[i]).sum();
            *c = proj * Complex64::from_polar(1.0, -self.eig.values[k] * t);
        }
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| v[(i, k)] * coeff[k]).sum();
        }
        out
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidTimeGrid("time grid is empty".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("non-finite time {t}")));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `steps + 1` equally spaced times from 0 to `t_max`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) || steps == 0 {
        return Err(Error::InvalidTimeGrid(format!(
            "need t_max > 0 and steps >= 1, got t_max = {t_max}, steps = {steps}"
        )));
    }
    Ok((0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect())
}

/// States ψ(t) = exp(−iHt)ψ₀ on the grid.
pub fn evolve_states(
    rh: &ReducedHamiltonian,
    psi0: &SpinState,
    t_grid: &[f64],
) -> Result<Vec<[Complex64; 3]>> {
    check_grid(t_grid)?;
    let prop = Propagator::new(rh)?;
    Ok(t_grid
        .iter()
        .map(|&t| prop.apply(psi0.amplitudes(), t))
        .collect())
}

pub fn evolve(
    rh: &ReducedHamiltonian,
    psi0: &SpinState,
    t_grid: &[f64],
) -> Result<Vec<PolarizationRecord>> {
    let spin = build_spin_matrices();
    let states = evolve_states(rh, psi0, t_grid)?;
    t_grid
        .iter()
        .zip(&states)
        .map(|(&t, psi)| record(&spin, t, psi))
        .collect()
}

fn record(spin: &SpinOperatorSet, t: f64, psi: &[Complex64; 3]) -> Result<PolarizationRecord> {
    let m = spin_moments(spin, psi)?;
    Ok(PolarizationRecord {
        t,
        vector: m.vector,
        tensor: m.tensor,
    })
}

/// Vector-to-tensor exchange at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSample {
    pub t: f64,
    pub p_perp: f64,
    /// ⟨S_x²⟩ − ⟨S_y²⟩.
    pub tensor_gain: f64,
    /// ⟨{S_x,S_y}⟩.
    pub tensor_xy: f64,
}

pub fn tensor_vector_transfer(
    rh: &ReducedHamiltonian,
    psi0: &SpinState,
    t_grid: &[f64],
) -> Result<Vec<TransferSample>> {
    Ok(evolve(rh, psi0, t_grid)?
        .into_iter()
        .map(|r| TransferSample {
            t: r.t,
            p_perp: r.p_perp(),
            tensor_gain: r.tensor[0] - r.tensor[1],
            tensor_xy: r.tensor[3],
        })
        .collect())
}

/// Two-cosine fit of ⟨S_x⟩(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatFit {
    /// Angular frequencies, f_high ≥ f_low.
    pub f_high: f64,
    pub f_low: f64,
    pub beat: f64,
    /// Amplitudes √(A² + B²) of the two components.
    pub amp_high: f64,
    pub amp_low: f64,
    /// Seeds |E₊ − E₀| and |E₋ − E₀| ordered like the fitted frequencies.
    pub gap_high: f64,
    pub gap_low: f64,
    pub rms_residual: f64,
    pub iterations: usize,
    pub kappa: f64,
    pub zeta: f64,
    /// ω₀√(1+β²).
    pub omega_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeatOutcome {
    /// ⟨S_x⟩ does not oscillate; `amplitude` is half its peak-to-peak range.
    NoOscillation {
        amplitude: f64,
    },
    Fitted(BeatFit),
}

/// Amplitude below which ⟨S_x⟩ counts as constant.
const FLAT_AMPLITUDE: f64 = 1e-12;

/// Fits ⟨S_x⟩(t) = Σ_k A_k cos(f_k t) + B_k sin(f_k t) with the two
/// frequencies seeded by the eigen-gaps of `rh`.
pub fn beat_analysis(
    series: &[PolarizationRecord],
    rh: &ReducedHamiltonian,
) -> Result<BeatOutcome> {
    let triplet = stationary_states(rh);
    let [ep, e0, em] = triplet.energies;
    let (g1, g2) = ((ep - e0).abs(), (em - e0).abs());
    beat_analysis_seeded(series, rh, [g1.max(g2), g1.min(g2)])
}

/// As [`beat_analysis`] with explicit starting frequencies.
pub fn beat_analysis_seeded(
    series: &[PolarizationRecord],
    rh: &ReducedHamiltonian,
    seeds: [f64; 2],
) -> Result<BeatOutcome> {
    if series.len() < 8 {
        return Err(Error::InvalidTimeGrid(
            "at least 8 samples are needed".into(),
        ));
    }
    let t: Vec<f64> = series.iter().map(|r| r.t).collect();
    check_grid(&t)?;
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if t.windows(2)
        .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(t[t.len() - 1].abs() * 1e-6))
    {
        return Err(Error::InvalidTimeGrid("time grid must be uniform".into()));
    }
    let y: Vec<f64> = series.iter().map(|r| r.vector[0]).collect();
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let amplitude = (hi - lo) / 2.0;

    let triplet = stationary_states(rh);
    let [ep, e0, em] = triplet.energies;
    let (g1, g2) = ((ep - e0).abs(), (em - e0).abs());
    let (gap_high, gap_low) = (g1.max(g2), g1.min(g2));
    if gap_high == 0.0 {
        // A degenerate spectrum cannot oscillate; any spread is rounding.
        return Ok(BeatOutcome::NoOscillation { amplitude: 0.0 });
    }
    if amplitude <= FLAT_AMPLITUDE {
        return Ok(BeatOutcome::NoOscillation { amplitude });
    }
    let beat = gap_high - gap_low;
    if beat == 0.0 {
        return Err(Error::FitFailed(
            "the two gaps coincide; there is no beat to resolve".into(),
        ));
    }
    let span = t[t.len() - 1] - t[0];
    let required = 4.0 * std::f64::consts::TAU / beat;
    if span < required * (1.0 - 1e-12) {
        return Err(Error::InsufficientSpan { span, required });
    }

    let fit = fit_two_cosines(&t, &y, seeds)?;
    let omega_eff = {
        let root = rh.omega0.hypot(rh.kappa);
        if rh.omega0 < 0.0 {
            -root
        } else {
            root
        }
    };
    Ok(BeatOutcome::Fitted(BeatFit {
        f_high: fit.freq[0],
        f_low: fit.freq[1],
        beat: fit.freq[0] - fit.freq[1],
        amp_high: fit.amp[0],
        amp_low: fit.amp[1],
        gap_high,
        gap_low,
        rms_residual: fit.rms,
        iterations: fit.iterations,
        kappa: rh.kappa,
        zeta: rh.zeta,
        omega_eff,
    }))
}

struct TwoCosine {
    freq: [f64; 2],
    amp: [f64; 2],
    rms: f64,
    iterations: usize,
}

/// Levenberg-Marquardt on (A₁, B₁, f₁, A₂, B₂, f₂). Time is rescaled to
/// [0, 1] so the frequency columns of the Jacobian are O(amplitude).
fn fit_two_cosines(t: &[f64], y: &[f64], seeds: [f64; 2]) -> Result<TwoCosine> {
    let t0 = t[0];
    let scale = t[t.len() - 1] - t0;
    let tau: Vec<f64> = t.iter().map(|&v| (v - t0) / scale).collect();
    let n = tau.len();

    // Linear amplitudes at the seed frequencies.
    let mut w = [seeds[0] * scale, seeds[1] * scale];
    let basis = |w: &[f64; 2]| {
        DMatrix::from_fn(n, 4, |i, j| {
            let arg = w[j / 2] * tau[i];
            if j % 2 == 0 {
                arg.cos()
            } else {
                arg.sin()
            }
        })
    };
    let yv = DVector::from_column_slice(y);
    let lin = basis(&w)
        .svd(true, true)
        .solve(&yv, 1e-14)
        .map_err(|e| Error::FitFailed(e.to_string()))?;
    let mut p = [lin[0], lin[1], w[0], lin[2], lin[3], w[1]];

    let residual = |p: &[f64; 6]| -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            let (s1, c1) = (p[2] * tau[i]).sin_cos();
            let (s2, c2) = (p[5] * tau[i]).sin_cos();
            y[i] - (p[0] * c1 + p[1] * s1 + p[3] * c2 + p[4] * s2)
        })
    };
    let jacobian = |p: &[f64; 6]| -> DMatrix<f64> {
        DMatrix::from_fn(n, 6, |i, j| {
            let x = tau[i];
            let k = j / 3;
            let (s, c) = (p[2 + 3 * k] * x).sin_cos();
            let (a, b) = (p[3 * k], p[3 * k + 1]);
            match j % 3 {
                0 => c,
                1 => s,
                _ => x * (-a * s + b * c),
            }
        })
    };

    let mut r = residual(&p);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-6;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 200 {
        iterations += 1;
        let jm = jacobian(&p);
        let jtj = jm.transpose() * &jm;
        let jtr = jm.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..6 {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p;
            for d in 0..6 {
                trial[d] += step[d];
            }
            let rt = residual(&trial);
            let ct = rt.norm_squared();
            if ct <= cost {
                let rel = (step[2] / trial[2]).abs().max((step[5] / trial[5]).abs());
                p = trial;
                r = rt;
                let drop = cost - ct;
                cost = ct;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                if rel < 1e-15 || drop <= 1e-30 * n as f64 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No descent direction left: the fit sits at a minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::FitFailed(format!(
            "no convergence after {iterations} iterations"
        )));
    }
    w = [p[2].abs() / scale, p[5].abs() / scale];
    let amps = [p[0].hypot(p[1]), p[3].hypot(p[4])];
    let (hi, lo) = if w[0] >= w[1] { (0, 1) } else { (1, 0) };
    Ok(TwoCosine {
        freq: [w[hi], w[lo]],
        amp: [amps[hi], amps[lo]],
        rms: (cost / n as f64).sqrt(),
        iterations,
    })
}
