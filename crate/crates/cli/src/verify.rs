//! Verification suites. Each suite runs fixed desk-scale checks and reports
//! them in a fixed order, so identical invocations give identical reports.

use std::f64::consts::TAU;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use spin1fw_core::algebra::{
    build_spin_matrices, commutator, exp_unitary, rho_matrices, sqrt_psd, ComplexMatrix,
};
use spin1fw_core::dynamics::{beat_analysis, evolve, uniform_grid, BeatOutcome, SpinState};
use spin1fw_core::error::{Error, Result};
use spin1fw_core::fw_amm::{
    beta_parameters, compare_with_eigendecomposition, frequencies, reduced_hamiltonian,
    stationary_states, truncation_gap, H0Policy,
};
use spin1fw_core::fw_normal::{closed_form_residual, energy_g2};
use spin1fw_core::grid::{
    commutator_mo_residual, conserved_projection_residuals, convergence_order,
    exact_fw_identity_residual, landau_levels_ldos, FieldSpec, GridSpec, ProjectionKind,
};
use spin1fw_core::landau::{enumerate_levels_g2, make_sector, ParticleParams};

use crate::commands::Metadata;
use crate::format::exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Algebra,
    ClosedForm,
    Stationary,
    Dynamics,
    AmmConsistency,
    GridUniform,
    GridQuadrupole,
    GridSheared,
    All,
}

impl Suite {
    const EACH: [Suite; 8] = [
        Suite::Algebra,
        Suite::ClosedForm,
        Suite::Stationary,
        Suite::Dynamics,
        Suite::AmmConsistency,
        Suite::GridUniform,
        Suite::GridQuadrupole,
        Suite::GridSheared,
    ];

    fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::ClosedForm => "closed-form",
            Suite::Stationary => "stationary",
            Suite::Dynamics => "dynamics",
            Suite::AmmConsistency => "amm-consistency",
            Suite::GridUniform => "grid-uniform",
            Suite::GridQuadrupole => "grid-quadrupole",
            Suite::GridSheared => "grid-sheared",
            Suite::All => "all",
        }
    }

    fn params(self) -> &'static str {
        match self {
            Suite::Algebra => "spin-1 matrices in the S_z basis",
            Suite::ClosedForm => "g=2; 100-point sweep m in [1,2], e in +-[0.5,1.5], B in [0.05,0.6], n in [0,9]; degeneracy m=1 e=1 B=0.1 nmax=10",
            Suite::Stationary => "m=1 e=1 g=1.714 B=0.01 n=1 h0=epsilon-prime; 1000-point beta sweep",
            Suite::Dynamics => "m=1 e=1 g=1.714 B=0.05 n=4 h0=zero; init sx:+1 over 4 beat periods",
            Suite::AmmConsistency => "m=1 e=1 g=1.714 n=1 B in {1e-3,2e-3,5e-3,1e-2}",
            Suite::GridUniform => "m=1 e=1 g=2 pz=0.3 uniform B0=0.5 half-width 6; Landau levels eB=0.2 N=64 half-width 15",
            Suite::GridQuadrupole => "m=1 e=1 g=2 pz=0 quadrupole gradient 0.3 half-width 6",
            Suite::GridSheared => "m=1 e=1 g=2 pz=0 sheared B0=0.5 gradient 0.1 half-width 6",
            Suite::All => "see the individual suites",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Serialize)]
pub struct Check {
    id: String,
    measured: String,
    comparison: Comparison,
    threshold: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    pass: bool,
}

#[derive(Serialize)]
struct SuiteParams {
    suite: &'static str,
    params: &'static str,
}

#[derive(Serialize)]
pub struct Report {
    suite: &'static str,
    version: &'static str,
    target: String,
    grids: Vec<usize>,
    params: Vec<SuiteParams>,
    checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

struct Recorder {
    prefix: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(
        &mut self,
        id: &str,
        measured: f64,
        cmp: Comparison,
        threshold: f64,
        values: Option<&[f64]>,
    ) {
        let pass = match cmp {
            Comparison::AtMost => measured <= threshold,
            Comparison::AtLeast => measured >= threshold,
            Comparison::Below => measured < threshold,
            Comparison::Equal => measured == threshold,
        };
        self.checks.push(Check {
            id: format!("{}.{id}", self.prefix),
            measured: exact(measured),
            comparison: cmp,
            threshold: exact(threshold),
            values: values.map(|v| v.iter().map(|&x| exact(x)).collect()),
            pass,
        });
    }

    fn at_most(&mut self, id: &str, measured: f64, threshold: f64) {
        self.push(id, measured, Comparison::AtMost, threshold, None);
    }

    fn order(&mut self, id: &str, order: f64, values: &[f64]) {
        self.push(id, order, Comparison::AtLeast, 1.5, Some(values));
    }

    /// Records a check whose computation failed: NaN never passes.
    fn failed(&mut self, id: &str, err: &Error) {
        eprintln!("{}.{id}: {err}", self.prefix);
        self.push(id, f64::NAN, Comparison::AtMost, 0.0, None);
    }
}

pub fn run(suite: Suite, grids: &[usize], timestamp: bool) -> std::result::Result<Report, String> {
    if grids.len() < 2 {
        return Err("--grids needs at least two sizes".into());
    }
    if grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err("--grids must be strictly increasing".into());
    }
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in &suites {
        let mut rec = Recorder {
            prefix: s.name(),
            checks: Vec::new(),
        };
        run_suite(*s, grids, &mut rec);
        checks.extend(rec.checks);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        suite: suite.name(),
        version: env!("CARGO_PKG_VERSION"),
        target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
        grids: grids.to_vec(),
        params: suites
            .iter()
            .map(|s| SuiteParams {
                suite: s.name(),
                params: s.params(),
            })
            .collect(),
        checks,
        pass,
        metadata: timestamp.then(Metadata::now),
    })
}

fn run_suite(suite: Suite, grids: &[usize], rec: &mut Recorder) {
    let outcome = match suite {
        Suite::Algebra => algebra(rec),
        Suite::ClosedForm => closed_form(rec),
        Suite::Stationary => stationary(rec),
        Suite::Dynamics => dynamics(rec),
        Suite::AmmConsistency => amm_consistency(rec),
        Suite::GridUniform => grid_uniform(grids, rec),
        Suite::GridQuadrupole => grid_quadrupole(grids, rec),
        Suite::GridSheared => grid_sheared(grids, rec),
        Suite::All => unreachable!("expanded by the caller"),
    };
    if let Err(e) = outcome {
        rec.failed("run", &e);
    }
}

fn algebra(rec: &mut Recorder) -> Result<()> {
    let s = build_spin_matrices();
    let i = Complex64::new(0.0, 1.0);
    let comps = [&s.sx, &s.sy, &s.sz];
    for (a, b, c, id) in [
        (0, 1, 2, "commutator_xy"),
        (1, 2, 0, "commutator_yz"),
        (2, 0, 1, "commutator_zx"),
    ] {
        let d = commutator(comps[a], comps[b])?.max_abs_diff(&comps[c].scale(i))?;
        rec.at_most(id, d, 1e-14);
    }
    let cube = &(&s.sz * &s.sz) * &s.sz;
    rec.at_most("sz_cubed", cube.max_abs_diff(&s.sz)?, 1e-14);
    let casimir = &(&(&s.sx * &s.sx) + &(&s.sy * &s.sy)) + &s.sz2;
    rec.at_most(
        "casimir",
        casimir.max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0))?,
        1e-14,
    );
    let hermitian = comps
        .iter()
        .map(|m| m.hermiticity_defect())
        .fold(0.0, f64::max);
    rec.at_most("hermitian", hermitian, 1e-14);

    let rho = rho_matrices();
    let mut rho_err = 0.0f64;
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let want = rho[c].scale(i);
        rho_err = rho_err.max((&rho[a] * &rho[b]).max_abs_diff(&want)?);
    }
    rec.at_most("rho_products", rho_err, 1e-14);

    let a = &(&s.identity3.scale_real(3.0) + &s.sz) + &s.sx.scale_real(0.5);
    let root = sqrt_psd(&a)?;
    rec.at_most(
        "sqrt_squares_back",
        (&root * &root).max_abs_diff(&a)?,
        1e-12,
    );
    let u = exp_unitary(&a, 1.3)?;
    rec.at_most(
        "exp_unitary",
        (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(3))?,
        1e-12,
    );
    Ok(())
}

fn closed_form(rec: &mut Recorder) -> Result<()> {
    let mut worst_matrix = 0.0f64;
    let mut worst_energy = 0.0f64;
    let mut evaluated = 0usize;
    for k in 0..100usize {
        let m = 1.0 + ((k * 37) % 100) as f64 / 99.0;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e = sign * (0.5 + ((k * 53) % 100) as f64 / 99.0);
        let b = 0.05 + 0.55 * ((k * 71) % 100) as f64 / 99.0;
        let n = (k % 10) as u32;
        let p = ParticleParams::new(m, e, 2.0, b, 0.0)?;
        let sector = make_sector(&p, n)?;
        let Ok(residual) = closed_form_residual(&p, &sector) else {
            continue;
        };
        evaluated += 1;
        let eps = sector.eps_prime;
        worst_matrix = worst_matrix.max(residual / eps);
        for sz in [-1, 0, 1] {
            let want = (eps * eps - 2.0 * e * b * f64::from(sz)).sqrt();
            worst_energy = worst_energy.max((energy_g2(&p, &sector, sz)? - want).abs() / eps);
        }
    }
    rec.push(
        "subcritical_points",
        evaluated as f64,
        Comparison::Equal,
        100.0,
        None,
    );
    rec.at_most("matrix_residual_over_eps", worst_matrix, 1e-12);
    rec.at_most("energy_error_over_eps", worst_energy, 1e-12);

    let p = ParticleParams::new(1.0, 1.0, 2.0, 0.1, 0.0)?;
    let groups = enumerate_levels_g2(&p, 10)?;
    let count = |k: usize| groups.iter().filter(|g| g.multiplicity == k).count() as f64;
    rec.push("singlets", count(1), Comparison::Equal, 1.0, None);
    rec.push("doublets", count(2), Comparison::Equal, 1.0, None);
    rec.push(
        "non_triplets",
        groups.len() as f64 - count(1) - count(2) - count(3),
        Comparison::Equal,
        0.0,
        None,
    );
    let violations = groups
        .iter()
        .filter(|g| g.multiplicity == 3 && !g.satisfies_condition)
        .count();
    rec.push(
        "triplet_condition_violations",
        violations as f64,
        Comparison::Equal,
        0.0,
        None,
    );
    Ok(())
}

fn stationary(rec: &mut Recorder) -> Result<()> {
    let p = ParticleParams::new(1.0, 1.0, 1.714, 0.01, 0.0)?;
    let sector = make_sector(&p, 1)?;
    let rh = reduced_hamiltonian(&p, &sector, H0Policy::EpsilonPrime)?;
    let agreement = compare_with_eigendecomposition(&rh)?;
    rec.at_most("eigen_energy_error", agreement.energy_error, 1e-12);
    rec.at_most(
        "eigen_one_minus_overlap",
        1.0 - agreement.min_overlap,
        1e-12,
    );

    let triplet = stationary_states(&rh);
    let closed = triplet.closed_form_observables();
    let numeric = triplet.observables()?;
    let obs = closed
        .iter()
        .zip(&numeric)
        .fold(0.0f64, |a, (x, y)| a.max(x.max_abs_diff(y)));
    rec.at_most("observables_closed_vs_numeric", obs, 1e-13);
    let cross = numeric
        .iter()
        .fold(0.0f64, |a, o| a.max(o.cross_means.max_abs()));
    rec.at_most("vanishing_cross_means", cross, 1e-13);
    let sum = numeric
        .iter()
        .fold(0.0f64, |a, o| a.max((o.sum_rule() - 2.0).abs()));
    rec.at_most("sum_rule", sum, 1e-13);
    rec.push("Y", triplet.big_y, Comparison::Below, 1.0, None);
    let asym =
        (numeric[0].s_pib2_mean - numeric[0].s_pi2_mean - triplet.beta * triplet.big_y).abs();
    rec.at_most("horizontal_asymmetry", asym, 1e-12);

    let mut beta_err = 0.0f64;
    for k in 0..1000usize {
        let g = 0.5 + 3.0 * ((k * 389) % 1000) as f64 / 999.0;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e = sign * (0.1 + 1.9 * ((k * 613) % 1000) as f64 / 999.0);
        let b = 1e-4 + 0.1 * ((k * 797) % 1000) as f64 / 999.0;
        let m = 0.5 + 1.5 * ((k * 211) % 1000) as f64 / 999.0;
        let q = ParticleParams::new(m, e, g, b, 0.0)?;
        if q.is_normal_moment() {
            continue;
        }
        let s = make_sector(&q, (k % 30) as u32)?;
        let f = frequencies(&q, &s)?;
        let beta = beta_parameters(&q, &s)?.beta;
        beta_err =
            beta_err.max((beta * f.omega0 - f.kappa).abs() / f.kappa.abs().max(f64::MIN_POSITIVE));
    }
    rec.at_most("beta_omega0_equals_kappa", beta_err, 1e-14);
    Ok(())
}

fn dynamics(rec: &mut Recorder) -> Result<()> {
    let p = ParticleParams::new(1.0, 1.0, 1.714, 0.05, 0.0)?;
    let s = make_sector(&p, 4)?;
    let rh = reduced_hamiltonian(&p, &s, H0Policy::Zero)?;

    let flat = rh.without_kappa();
    let (w0, z) = (flat.omega0, flat.zeta);
    let t = uniform_grid(4.0 * TAU / (2.0 * z.abs()), 4000)?;
    let (mut sx_err, mut perp_err, mut trace_err) = (0.0f64, 0.0f64, 0.0f64);
    for r in evolve(&flat, &SpinState::sx_plus(), &t)? {
        sx_err = sx_err.max((r.vector[0] - (w0 * r.t).cos() * (z * r.t).cos()).abs());
        perp_err = perp_err.max((r.p_perp() - (z * r.t).cos().abs()).abs());
        trace_err = trace_err.max((r.tensor_trace() - 2.0).abs());
    }
    rec.at_most("kappa_zero_sx", sx_err, 1e-10);
    rec.at_most("kappa_zero_p_perp", perp_err, 1e-10);
    rec.at_most("tensor_trace", trace_err, 1e-12);

    let f = frequencies(&p, &s)?;
    let beta = beta_parameters(&p, &s)?.beta;
    let w_eff = (f.omega0 * beta.hypot(1.0)).abs();
    let expected = [w_eff + f.zeta.abs(), w_eff - f.zeta.abs()];
    let t = uniform_grid(4.0 * TAU / (expected[0] - expected[1]), 6000)?;
    let series = evolve(&rh, &SpinState::sx_plus(), &t)?;
    let rel = match beat_analysis(&series, &rh)? {
        BeatOutcome::Fitted(fit) => ((fit.f_high - expected[0]).abs() / expected[0])
            .max((fit.f_low - expected[1]).abs() / expected[1]),
        BeatOutcome::NoOscillation { .. } => f64::INFINITY,
    };
    rec.at_most("beat_frequencies_relative", rel, 1e-6);

    let still = evolve(&flat, &SpinState::sz_plus(), &t)?;
    let first = still[0];
    let drift = still.iter().fold(0.0f64, |a, r| {
        r.vector
            .iter()
            .chain(&r.tensor)
            .zip(first.vector.iter().chain(&first.tensor))
            .fold(a, |a, (x, y)| a.max((x - y).abs()))
    });
    rec.at_most("sz_plus_stationary", drift, 1e-12);
    Ok(())
}

fn amm_consistency(rec: &mut Recorder) -> Result<()> {
    let fields = [1e-3, 2e-3, 5e-3, 1e-2];
    let mut gaps = Vec::with_capacity(fields.len());
    for b in fields {
        let p = ParticleParams::new(1.0, 1.0, 1.714, b, 0.0)?;
        gaps.push(truncation_gap(&p, &make_sector(&p, 1)?)?);
    }
    let exponent = convergence_order(&fields, &gaps);
    rec.push(
        "truncation_exponent",
        exponent,
        Comparison::AtLeast,
        2.7,
        Some(&gaps),
    );
    rec.push(
        "truncation_exponent_upper",
        exponent,
        Comparison::AtMost,
        3.3,
        None,
    );
    Ok(())
}

fn grid_for(n: usize) -> GridSpec {
    GridSpec {
        n_points: n,
        ..GridSpec::default()
    }
}

/// Values and the fitted order of `eval` over the grid sequence.
fn refine(
    grids: &[usize],
    mut eval: impl FnMut(&GridSpec) -> Result<f64>,
) -> Result<(Vec<f64>, f64)> {
    let mut spacings = Vec::with_capacity(grids.len());
    let mut values = Vec::with_capacity(grids.len());
    for &n in grids {
        let g = grid_for(n);
        spacings.push(g.spacing());
        values.push(eval(&g)?);
    }
    let order = convergence_order(&spacings, &values);
    Ok((values, order))
}

fn grid_uniform(grids: &[usize], rec: &mut Recorder) -> Result<()> {
    let base = ParticleParams::default();
    let field = FieldSpec::uniform(0.5);
    let (v, order) = refine(grids, |g| {
        Ok(commutator_mo_residual(&field, g, &base)?.direct_norm)
    })?;
    rec.order("commutator_mo_order", order, &v);
    let (v, order) = refine(grids, |g| {
        Ok(exact_fw_identity_residual(&field, g, &base)?.residual)
    })?;
    rec.order("fw_identity_order", order, &v);

    let p = ParticleParams { pz: 0.3, ..base };
    let mut table = vec![Vec::new(); ProjectionKind::ALL.len()];
    for &n in grids {
        for (k, (_, r)) in conserved_projection_residuals(&field, &grid_for(n), &p)?
            .into_iter()
            .enumerate()
        {
            table[k].push((r.residual, r.scale));
        }
    }
    for (kind, column) in ProjectionKind::ALL.iter().zip(&table) {
        let raw: Vec<f64> = column.iter().map(|c| c.0).collect();
        let id = format!("projection[{}]", kind.name());
        if *kind == ProjectionKind::Longitudinal {
            let worst = column.iter().fold(0.0f64, |a, &(r, s)| a.max(r / s));
            rec.push(
                &format!("{id}.relative"),
                worst,
                Comparison::AtMost,
                1e-10,
                Some(&raw),
            );
        } else {
            let rises = raw.windows(2).filter(|w| w[1] >= w[0]).count();
            rec.push(
                &format!("{id}.increases"),
                rises as f64,
                Comparison::Equal,
                0.0,
                Some(&raw),
            );
        }
    }

    let levels = landau_levels_ldos(&FieldSpec::uniform(0.2), &GridSpec::new(64, 15.0), &base, 3)?;
    let worst = levels
        .iter()
        .zip([0.2, 0.6, 1.0])
        .fold(0.0f64, |a, (g, w)| a.max((g - w).abs() / w));
    rec.push(
        "landau_levels_relative",
        worst,
        Comparison::AtMost,
        0.02,
        Some(&levels),
    );
    Ok(())
}

fn grid_quadrupole(grids: &[usize], rec: &mut Recorder) -> Result<()> {
    let p = ParticleParams::default();
    let field = FieldSpec::quadrupole(0.3);
    let (v, order) = refine(grids, |g| {
        Ok(commutator_mo_residual(&field, g, &p)?.direct_norm)
    })?;
    rec.order("commutator_mo_order", order, &v);
    let (v, order) = refine(grids, |g| {
        Ok(exact_fw_identity_residual(&field, g, &p)?.residual)
    })?;
    rec.order("fw_identity_order", order, &v);
    Ok(())
}

fn grid_sheared(grids: &[usize], rec: &mut Recorder) -> Result<()> {
    let p = ParticleParams::default();
    let field = FieldSpec::sheared(0.5, 0.1);
    let mut direct = Vec::with_capacity(grids.len());
    let (gaps, order) = refine(grids, |g| {
        let r = commutator_mo_residual(&field, g, &p)?;
        direct.push(r.direct_norm);
        Ok(r.relative_gap)
    })?;
    let (lo, hi) = direct
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
    rec.push(
        "direct_norm_min_over_max",
        lo / hi,
        Comparison::AtLeast,
        0.5,
        Some(&direct),
    );
    rec.order("formula_gap_order", order, &gaps);
    Ok(())
}
