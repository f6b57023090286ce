//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::{SQRT_2, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spin1fw_core::algebra::{build_spin_matrices, commutator, ComplexMatrix};
use spin1fw_core::dynamics::{beat_analysis, evolve, uniform_grid, BeatOutcome, SpinState};
use spin1fw_core::fw_amm::{
    beta_parameters, compare_with_eigendecomposition, frequencies, reduced_hamiltonian,
    stationary_states, truncation_gap, H0Policy,
};
use spin1fw_core::fw_normal::{closed_form_residual, energy_g2};
use spin1fw_core::grid::{
    commutator_mo_residual, conserved_projection_residuals, convergence_order,
    exact_fw_identity_residual, landau_levels_ldos, FieldSpec, GridSpec, ProjectionKind,
    RefinementStudy, DEFAULT_GRIDS,
};
use spin1fw_core::landau::{enumerate_levels_g2, make_sector, ParticleParams};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix(rows: [[Complex64; 3]; 3]) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, |i, j| rows[i][j])
}

fn spin_algebra() -> Outcome {
    let s = build_spin_matrices();
    let r = 1.0 / SQRT_2;
    let z = c(0.0, 0.0);
    let sx = matrix([
        [z, c(r, 0.0), z],
        [c(r, 0.0), z, c(r, 0.0)],
        [z, c(r, 0.0), z],
    ]);
    let sy = matrix([
        [z, c(0.0, -r), z],
        [c(0.0, r), z, c(0.0, -r)],
        [z, c(0.0, r), z],
    ]);
    let sz = matrix([[c(1.0, 0.0), z, z], [z, z, z], [z, z, c(-1.0, 0.0)]]);
    let mut worst = 0.0f64;
    for (got, want) in [(&s.sx, &sx), (&s.sy, &sy), (&s.sz, &sz)] {
        worst = worst.max(got.max_abs_diff(want).unwrap());
    }
    let comps = [&s.sx, &s.sy, &s.sz];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let lhs = commutator(comps[i], comps[j]).unwrap();
        worst = worst.max(lhs.max_abs_diff(&comps[k].scale(c(0.0, 1.0))).unwrap());
    }
    let cube = &(&s.sz * &s.sz) * &s.sz;
    worst = worst.max(cube.max_abs_diff(&s.sz).unwrap());
    let casimir = &(&(&s.sx * &s.sx) + &(&s.sy * &s.sy)) + &(&s.sz * &s.sz);
    worst = worst.max(
        casimir
            .max_abs_diff(&ComplexMatrix::identity(3).scale_real(2.0))
            .unwrap(),
    );
    check(worst <= 1e-14, format!("max deviation {worst:.3e}"))
}

fn closed_form_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut tried = 0;
    let mut accepted = 0;
    while accepted < 100 {
        tried += 1;
        let m = rng.random_range(0.3..3.0);
        let e = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.1..2.0);
        let b = rng.random_range(0.0..2.0);
        let n = rng.random_range(0..20u32);
        let p = ParticleParams::new(m, e, 2.0, b, 0.0).unwrap();
        let Ok(sector) = make_sector(&p, n) else {
            continue;
        };
        let Ok(residual) = closed_form_residual(&p, &sector) else {
            continue;
        };
        accepted += 1;
        let eps = sector.eps_prime;
        worst = worst.max(residual / eps);
        for s in [-1, 0, 1] {
            let want = (eps * eps - 2.0 * e * b * f64::from(s)).sqrt();
            let got = energy_g2(&p, &sector, s).unwrap();
            worst = worst.max((got - want).abs() / eps);
        }
    }
    check(
        worst <= 1e-12,
        format!(
            "{accepted} subcritical configurations ({tried} drawn), max residual/eps' {worst:.3e}"
        ),
    )
}

fn degeneracy_structure() -> Outcome {
    let p = ParticleParams::new(1.0, 1.0, 2.0, 0.1, 0.0).unwrap();
    let groups = enumerate_levels_g2(&p, 10).map_err(|e| e.to_string())?;
    let count = |k: usize| groups.iter().filter(|g| g.members.len() == k).count();
    let (singlets, doublets, triplets) = (count(1), count(2), count(3));
    let all_conditions = groups
        .iter()
        .filter(|g| g.members.len() == 3)
        .flat_map(|g| g.members.iter())
        .all(|&(n, s)| i64::from(n) - i64::from(s.value()) >= 1);
    check(
        singlets == 1 && doublets == 1 && singlets + doublets + triplets == groups.len() && all_conditions,
        format!("{singlets} singlet, {doublets} doublet, {triplets} triplets, condition holds: {all_conditions}"),
    )
}

fn stationary_states_check() -> Outcome {
    let p = ParticleParams::new(1.0, 1.0, 1.714, 0.01, 0.0).unwrap();
    let sector = make_sector(&p, 1).unwrap();
    let rh = reduced_hamiltonian(&p, &sector, H0Policy::EpsilonPrime).unwrap();
    let agreement = compare_with_eigendecomposition(&rh).map_err(|e| e.to_string())?;
    let triplet = stationary_states(&rh);
    let closed = triplet.closed_form_observables();
    let numeric = triplet.observables().map_err(|e| e.to_string())?;
    let obs_err = closed
        .iter()
        .zip(&numeric)
        .fold(0.0f64, |a, (x, y)| a.max(x.max_abs_diff(y)));
    let cross = numeric
        .iter()
        .fold(0.0f64, |a, o| a.max(o.cross_means.max_abs()));
    let sum_rule = numeric
        .iter()
        .fold(0.0f64, |a, o| a.max((o.sum_rule() - 2.0).abs()));

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut beta_err = 0.0f64;
    for _ in 0..1000 {
        let g = rng.random_range(0.5..3.5);
        let e = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.1..2.0);
        let b = rng.random_range(1e-4..0.1);
        let q = ParticleParams::new(rng.random_range(0.5..2.0), e, g, b, 0.0).unwrap();
        let s = make_sector(&q, rng.random_range(0..30u32)).unwrap();
        let f = frequencies(&q, &s).unwrap();
        let beta = beta_parameters(&q, &s).unwrap().beta;
        beta_err =
            beta_err.max((beta * f.omega0 - f.kappa).abs() / f.kappa.abs().max(f64::MIN_POSITIVE));
    }
    let eig_ok = agreement.energy_error <= 1e-12 && 1.0 - agreement.min_overlap <= 1e-12;
    check(
        eig_ok && obs_err <= 1e-13 && cross <= 1e-13 && sum_rule <= 1e-13 && beta_err <= 1e-14,
        format!(
            "energy {:.2e}, 1-overlap {:.2e}, observables {obs_err:.2e}, cross {cross:.2e}, \
             sum rule {sum_rule:.2e}, beta*omega0-kappa {beta_err:.2e}",
            agreement.energy_error,
            1.0 - agreement.min_overlap
        ),
    )
}

fn non_integer_projection() -> Outcome {
    let (m, e, g, b) = (1.0, 1.0, 1.714, 0.01);
    let p = ParticleParams::new(m, e, g, b, 0.0).unwrap();
    let sector = make_sector(&p, 1).unwrap();
    let rh = reduced_hamiltonian(&p, &sector, H0Policy::EpsilonPrime).unwrap();
    let numeric = stationary_states(&rh)
        .observables()
        .map_err(|e| e.to_string())?;

    let pi2 = e * b * 3.0;
    let eps = (m * m + pi2).sqrt();
    let beta = e * (g - 1.0) * (pi2 / (eps + m)) * b / (4.0 * m * m * eps);
    let y = 1.0 / (1.0 + beta * beta).sqrt();
    let mut worst = 0.0f64;
    for (obs, sign) in [(&numeric[0], 1.0), (&numeric[2], -1.0)] {
        worst = worst.max((obs.sz_mean.abs() - y).abs());
        worst = worst.max((obs.s_pib2_mean - obs.s_pi2_mean - sign * beta * y).abs());
    }
    check(
        y < 1.0 && beta * y != 0.0 && worst <= 1e-12,
        format!(
            "Y = {y:.15}, beta*Y = {:.6e}, max deviation {worst:.2e}",
            beta * y
        ),
    )
}

fn amm_consistency() -> Outcome {
    let fields = [1e-3, 2e-3, 5e-3, 1e-2];
    let mut gaps = Vec::new();
    for b in fields {
        let p = ParticleParams::new(1.0, 1.0, 1.714, b, 0.0).unwrap();
        let s = make_sector(&p, 1).unwrap();
        gaps.push(truncation_gap(&p, &s).map_err(|e| e.to_string())?);
    }
    let exponent = convergence_order(&fields, &gaps);
    check(
        (exponent - 3.0).abs() <= 0.3,
        format!("fitted exponent {exponent:.4}, gaps {}", sci(&gaps)),
    )
}

fn dynamics_check() -> Outcome {
    let p = ParticleParams::new(1.0, 1.0, 1.714, 0.05, 0.0).unwrap();
    let s = make_sector(&p, 4).unwrap();
    let rh = reduced_hamiltonian(&p, &s, H0Policy::Zero).unwrap();

    let flat = rh.without_kappa();
    let (w0, z) = (flat.omega0, flat.zeta);
    let t = uniform_grid(4.0 * TAU / (2.0 * z.abs()), 4000).unwrap();
    let mut worst = 0.0f64;
    for r in evolve(&flat, &SpinState::sx_plus(), &t).map_err(|e| e.to_string())? {
        worst = worst.max((r.vector[0] - (w0 * r.t).cos() * (z * r.t).cos()).abs());
        worst = worst.max((r.p_perp() - (z * r.t).cos().abs()).abs());
    }

    let f = frequencies(&p, &s).unwrap();
    let beta = beta_parameters(&p, &s).unwrap().beta;
    let w_eff = (f.omega0 * (1.0 + beta * beta).sqrt()).abs();
    let expected = [w_eff + f.zeta.abs(), w_eff - f.zeta.abs()];
    let beat = expected[0] - expected[1];
    let t = uniform_grid(4.0 * TAU / beat, 6000).unwrap();
    let series = evolve(&rh, &SpinState::sx_plus(), &t).map_err(|e| e.to_string())?;
    let fit = match beat_analysis(&series, &rh).map_err(|e| e.to_string())? {
        BeatOutcome::Fitted(fit) => fit,
        BeatOutcome::NoOscillation { .. } => return Err("no oscillation found".into()),
    };
    let rel = ((fit.f_high - expected[0]).abs() / expected[0])
        .max((fit.f_low - expected[1]).abs() / expected[1]);
    check(
        worst <= 1e-10 && rel <= 1e-6,
        format!("kappa = 0 deviation {worst:.2e}; fitted frequencies relative error {rel:.2e}"),
    )
}

fn landau_levels() -> Outcome {
    let p = ParticleParams::default();
    let levels = landau_levels_ldos(&FieldSpec::uniform(0.2), &GridSpec::new(64, 15.0), &p, 3)
        .map_err(|e| e.to_string())?;
    let want = [0.2, 0.6, 1.0];
    let worst = levels
        .iter()
        .zip(want)
        .fold(0.0f64, |a, (g, w)| a.max((g - w).abs() / w));
    check(
        worst <= 0.02,
        format!("levels {levels:.5?}, max relative error {worst:.2e}"),
    )
}

fn study(
    field: FieldSpec,
    eval: impl Fn(&FieldSpec, &GridSpec) -> Result<f64, String>,
) -> Result<RefinementStudy, String> {
    RefinementStudy::run(&DEFAULT_GRIDS, &GridSpec::default(), |g| {
        eval(&field, g).map_err(spin1fw_core::error::Error::InvalidParameter)
    })
    .map_err(|e| e.to_string())
}

fn commutator_condition() -> Outcome {
    let p = ParticleParams::default();
    let quad = study(FieldSpec::quadrupole(0.3), |f, g| {
        Ok(commutator_mo_residual(f, g, &p)
            .map_err(|e| e.to_string())?
            .direct_norm)
    })?;
    let sheared = FieldSpec::sheared(0.5, 0.1);
    let mut direct = Vec::new();
    let mut gaps = Vec::new();
    let mut spacings = Vec::new();
    for n in DEFAULT_GRIDS {
        let grid = GridSpec {
            n_points: n,
            ..GridSpec::default()
        };
        let r = commutator_mo_residual(&sheared, &grid, &p).map_err(|e| e.to_string())?;
        spacings.push(grid.spacing());
        direct.push(r.direct_norm);
        gaps.push(r.relative_gap);
    }
    let gap_order = convergence_order(&spacings, &gaps);
    let (lo, hi) = direct
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
    check(
        quad.order >= 1.5 && lo >= 0.5 * hi && gap_order >= 1.5,
        format!(
            "quadrupole order {:.2} ({}); sheared direct {}, gap {}, gap order {gap_order:.2}",
            quad.order,
            sci(&quad.values),
            sci(&direct),
            sci(&gaps)
        ),
    )
}

fn exact_fw_identity() -> Outcome {
    let p = ParticleParams::default();
    let eval = |f: &FieldSpec, g: &GridSpec| -> Result<f64, String> {
        Ok(exact_fw_identity_residual(f, g, &p)
            .map_err(|e| e.to_string())?
            .residual)
    };
    let uniform = study(FieldSpec::uniform(0.5), eval)?;
    let quad = study(FieldSpec::quadrupole(0.3), eval)?;
    check(
        uniform.order >= 1.5 && quad.order >= 1.5,
        format!(
            "uniform order {:.2} ({}); quadrupole order {:.2} ({})",
            uniform.order,
            sci(&uniform.values),
            quad.order,
            sci(&quad.values)
        ),
    )
}

/// Residuals at or below 1e−10·scale count as exact zeros: a sequence of
/// zeros is non-increasing, anything above the floor must strictly fall.
fn conserved_projections() -> Outcome {
    let p = ParticleParams {
        pz: 0.3,
        ..ParticleParams::default()
    };
    let field = FieldSpec::uniform(0.5);
    let kinds = ProjectionKind::ALL.len();
    let mut table: Vec<Vec<(f64, f64)>> = vec![Vec::new(); kinds];
    for n in DEFAULT_GRIDS {
        let grid = GridSpec {
            n_points: n,
            ..GridSpec::default()
        };
        let res = conserved_projection_residuals(&field, &grid, &p).map_err(|e| e.to_string())?;
        for (k, (_, r)) in res.iter().enumerate() {
            table[k].push((r.residual, r.scale));
        }
    }
    let floor = |&(r, s): &(f64, f64)| if r <= 1e-10 * s { 0.0 } else { r };
    let longitudinal = &table[0];
    let longitudinal_ok = longitudinal.iter().all(|v| floor(v) == 0.0);
    let longitudinal_worst = longitudinal.iter().fold(0.0f64, |a, &(r, s)| a.max(r / s));
    let mut detail = format!("Pi_z residual/scale <= {longitudinal_worst:.2e}");
    let mut monotone = true;
    for (kind, values) in ProjectionKind::ALL.iter().zip(&table) {
        let v: Vec<f64> = values.iter().map(floor).collect();
        monotone &= v
            .windows(2)
            .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        let raw: Vec<f64> = values.iter().map(|x| x.0).collect();
        detail.push_str(&format!("; {} {}", kind.name(), sci(&raw)));
    }
    check(longitudinal_ok && monotone, detail)
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 11] = [
        (1, "spin algebra", spin_algebra, Duration::from_secs(1)),
        (
            2,
            "closed-form exactness",
            closed_form_exactness,
            Duration::from_secs(1),
        ),
        (
            3,
            "degeneracy structure",
            degeneracy_structure,
            Duration::from_secs(1),
        ),
        (
            4,
            "stationary states",
            stationary_states_check,
            Duration::from_secs(5),
        ),
        (
            5,
            "non-integer projection and horizontal asymmetry",
            non_integer_projection,
            Duration::MAX,
        ),
        (
            6,
            "anomalous-moment truncation scales as B^3",
            amm_consistency,
            Duration::from_secs(1),
        ),
        (7, "beat dynamics", dynamics_check, Duration::from_secs(10)),
        (
            8,
            "grid Landau levels",
            landau_levels,
            Duration::from_secs(60),
        ),
        (
            9,
            "commutator condition",
            commutator_condition,
            Duration::from_secs(120),
        ),
        (
            10,
            "exact FW identity",
            exact_fw_identity,
            Duration::from_secs(120),
        ),
        (
            11,
            "conserved projections",
            conserved_projections,
            Duration::from_secs(180),
        ),
    ];
    let mut failures = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        let (status, detail) = match outcome {
            Ok(d) if !over => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time budget")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{status} criterion {id:>2} {name}: {detail} [{:.2} s]",
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
