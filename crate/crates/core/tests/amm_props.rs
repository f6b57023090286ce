use proptest::prelude::*;

use spin1fw_core::fw_amm::{
    beta_parameters, compare_with_eigendecomposition, frequencies, reduced_hamiltonian,
    stationary_states, truncation_gap, H0Policy,
};
use spin1fw_core::landau::{make_sector, ParticleParams};

fn amm_params() -> impl Strategy<Value = (ParticleParams, u32)> {
    (
        0.5..2.0f64,
        0.2..2.0f64,
        prop::bool::ANY,
        0.5..3.5f64,
        1e-4..0.05f64,
        0u32..20,
    )
        .prop_map(|(m, e, negative, g, b, n)| {
            let e = if negative { -e } else { e };
            (ParticleParams::new(m, e, g, b, 0.0).unwrap(), n)
        })
}

proptest! {
    #[test]
    fn beta_is_the_kappa_omega_ratio((p, n) in amm_params()) {
        prop_assume!(p.g_factor != 2.0);
        let s = make_sector(&p, n).unwrap();
        let f = frequencies(&p, &s).unwrap();
        let beta = beta_parameters(&p, &s).unwrap().beta;
        prop_assert!((beta * f.omega0 - f.kappa).abs() <= 1e-14 * f.kappa.abs());
    }

    #[test]
    fn closed_forms_diagonalize((p, n) in amm_params()) {
        let s = make_sector(&p, n).unwrap();
        let rh = reduced_hamiltonian(&p, &s, H0Policy::EpsilonPrime).unwrap();
        let a = compare_with_eigendecomposition(&rh).unwrap();
        prop_assert!(a.energy_error <= 1e-12);
        prop_assert!(1.0 - a.min_overlap <= 1e-12);
        let t = stationary_states(&rh);
        for obs in t.observables().unwrap() {
            prop_assert!((obs.sum_rule() - 2.0).abs() <= 1e-13);
            prop_assert!(obs.cross_means.max_abs() <= 1e-13);
        }
    }

    /// ω₀, ζ and κ all carry one factor g − 2.
    #[test]
    fn frequencies_are_linear_near_normal_moment(
        delta in prop_oneof![-1e-3..-1e-8f64, 1e-8..1e-3f64],
        b in 1e-3..0.05f64,
        n in 0u32..10,
    ) {
        let p = ParticleParams::new(1.0, 1.0, 2.0 + delta, b, 0.0).unwrap();
        let s = make_sector(&p, n).unwrap();
        let f = frequencies(&p, &s).unwrap();
        let eps = s.eps_prime;
        let kinetic = s.pi2 / (eps + 1.0);
        let slopes = [-b / 2.0, -2.0 * b * b / (8.0 * eps), -kinetic * b * b / (8.0 * eps)];
        for (value, slope) in [f.omega0, f.zeta, f.kappa].into_iter().zip(slopes) {
            let rel = (value / delta - slope).abs() / slope.abs();
            prop_assert!(rel <= 2.0 * delta.abs() + 1e-9, "rel {rel:e}");
        }
    }
}

#[test]
fn frequencies_vanish_at_normal_moment() {
    let p = ParticleParams::new(1.0, 1.0, 2.0, 0.01, 0.0).unwrap();
    let s = make_sector(&p, 3).unwrap();
    let f = frequencies(&p, &s).unwrap();
    assert_eq!((f.omega0, f.zeta, f.kappa), (0.0, 0.0, 0.0));
    assert_eq!(beta_parameters(&p, &s).unwrap().beta, 0.0);
}

#[test]
fn truncation_error_is_cubic_for_several_moments() {
    let fields = [1e-3, 2e-3, 5e-3, 1e-2];
    for g in [1.714, 2.5, 5.586] {
        let gaps: Vec<f64> = fields
            .iter()
            .map(|&b| {
                let p = ParticleParams::new(1.0, 1.0, g, b, 0.0).unwrap();
                truncation_gap(&p, &make_sector(&p, 1).unwrap()).unwrap()
            })
            .collect();
        let slope = (gaps[3] / gaps[0]).ln() / (fields[3] / fields[0]).ln();
        assert!((slope - 3.0).abs() <= 0.3, "g = {g}: slope {slope}");
    }
}

#[test]
fn longitudinal_momentum_is_rejected() {
    let p = ParticleParams::new(1.0, 1.0, 1.714, 0.01, 0.2).unwrap();
    let s = make_sector(&p, 1).unwrap();
    assert!(frequencies(&p, &s).is_err());
}
