use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::Serialize;
use spin1fw_core::dynamics::{evolve as evolve_series, uniform_grid, SpinState};
use spin1fw_core::fw_amm::{reduced_hamiltonian, stationary_states, PolarizationObservables};
use spin1fw_core::landau::{enumerate_levels_g2, make_sector};

use crate::format::{csv, exact, json, short};
use crate::{EvolveArgs, Failure, Mode, SectorArgs, SpectrumArgs};

/// Reduced-mode energies closer than this (relative) share a group.
const GROUP_TOL: f64 = 1e-12;

pub fn spectrum(a: &SpectrumArgs) -> Result<String, Failure> {
    let params = a.physics.params()?;
    // (n, s_z, energy)
    let mut rows: Vec<(u32, i32, f64)> = Vec::new();
    match a.mode {
        Mode::Exact => {
            for group in enumerate_levels_g2(&params, a.nmax)? {
                rows.extend(
                    group
                        .members
                        .iter()
                        .map(|&(n, s)| (n, s.value(), group.energy)),
                );
            }
        }
        Mode::Reduced => {
            for n in 0..=a.nmax {
                let sector = make_sector(&params, n)?;
                let rh = reduced_hamiltonian(&params, &sector, a.h0_policy.into())?;
                let energies = stationary_states(&rh).energies;
                rows.extend([1, 0, -1].into_iter().zip(energies).map(|(s, e)| (n, s, e)));
            }
        }
    }
    rows.sort_by(|x, y| x.2.total_cmp(&y.2).then(x.0.cmp(&y.0)).then(y.1.cmp(&x.1)));

    let mut group_of = Vec::with_capacity(rows.len());
    let mut sizes: Vec<usize> = Vec::new();
    let mut anchor = f64::NAN;
    for &(_, _, e) in &rows {
        let same = match a.mode {
            Mode::Exact => e == anchor,
            Mode::Reduced => (e - anchor).abs() <= GROUP_TOL * e.abs().max(anchor.abs()),
        };
        if same {
            *sizes.last_mut().expect("group open") += 1;
        } else {
            anchor = e;
            sizes.push(1);
        }
        group_of.push(sizes.len() - 1);
    }

    Ok(csv(
        &["n", "s_z", "energy", "group_id", "multiplicity"],
        rows.iter().zip(&group_of).map(|(&(n, s, e), &gid)| {
            vec![
                n.to_string(),
                s.to_string(),
                short(e),
                gid.to_string(),
                sizes[gid].to_string(),
            ]
        }),
    ))
}

#[derive(Serialize)]
struct ParamsEcho {
    m: String,
    e: String,
    g: String,
    #[serde(rename = "B")]
    field: String,
    pz: String,
    n: u32,
    h0_policy: &'static str,
}

#[derive(Serialize)]
struct Amplitude {
    re: String,
    im: String,
}

#[derive(Serialize)]
struct Cross {
    sx: String,
    sy: String,
    sxy: String,
    sxz: String,
    syz: String,
}

#[derive(Serialize)]
struct StateObservables {
    s_z: i32,
    sz_mean: String,
    sz2_mean: String,
    s_pib2_mean: String,
    s_pi2_mean: String,
    cross: Cross,
}

#[derive(Serialize)]
pub struct Metadata {
    pub timestamp: String,
}

impl Metadata {
    pub fn now() -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            timestamp: format!("unix:{secs}"),
        }
    }
}

#[derive(Serialize)]
struct StationaryReport {
    params: ParamsEcho,
    h0: String,
    omega0: String,
    zeta: String,
    kappa: String,
    beta: String,
    #[serde(rename = "Y")]
    big_y: String,
    #[serde(rename = "Z")]
    big_z: String,
    energies: Vec<String>,
    vectors: Vec<Vec<Amplitude>>,
    observables: Vec<StateObservables>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

fn state_observables(s_z: i32, o: &PolarizationObservables) -> StateObservables {
    let c = &o.cross_means;
    StateObservables {
        s_z,
        sz_mean: exact(o.sz_mean),
        sz2_mean: exact(o.sz2_mean),
        s_pib2_mean: exact(o.s_pib2_mean),
        s_pi2_mean: exact(o.s_pi2_mean),
        cross: Cross {
            sx: exact(c.sx),
            sy: exact(c.sy),
            sxy: exact(c.sxy),
            sxz: exact(c.sxz),
            syz: exact(c.syz),
        },
    }
}

pub fn stationary(a: &SectorArgs) -> Result<String, Failure> {
    let params = a.physics.params()?;
    let sector = make_sector(&params, a.n)?;
    let rh = reduced_hamiltonian(&params, &sector, a.h0_policy.into())?;
    let triplet = stationary_states(&rh);
    let observables = triplet.observables()?;
    let report = StationaryReport {
        params: ParamsEcho {
            m: exact(params.mass),
            e: exact(params.charge),
            g: exact(params.g_factor),
            field: exact(params.field),
            pz: exact(params.pz),
            n: a.n,
            h0_policy: a.h0_policy.name(),
        },
        h0: exact(rh.h0),
        omega0: exact(rh.omega0),
        zeta: exact(rh.zeta),
        kappa: exact(rh.kappa),
        beta: exact(triplet.beta),
        big_y: exact(triplet.big_y),
        big_z: exact(triplet.big_z),
        energies: triplet.energies.iter().map(|&e| exact(e)).collect(),
        vectors: triplet
            .vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|z| Amplitude {
                        re: exact(z.re),
                        im: exact(z.im),
                    })
                    .collect()
            })
            .collect(),
        observables: [1, 0, -1]
            .into_iter()
            .zip(&observables)
            .map(|(s, o)| state_observables(s, o))
            .collect(),
        metadata: a.timestamp.then(Metadata::now),
    };
    Ok(json(&report))
}

pub fn parse_init(spec: &str) -> Result<SpinState, String> {
    let bad =
        || format!("malformed --init {spec:?}; expected sz:+1, sz:0, sz:-1, sx:+1 or custom:a,b,c");
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    match (kind, value) {
        ("sz", "+1" | "1") => Ok(SpinState::sz_plus()),
        ("sz", "0") => Ok(SpinState::sz_zero()),
        ("sz", "-1") => Ok(SpinState::sz_minus()),
        ("sx", "+1" | "1") => Ok(SpinState::sx_plus()),
        ("custom", list) => {
            let parts: Vec<&str> = list.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let mut amps = [Complex64::new(0.0, 0.0); 3];
            for (slot, text) in amps.iter_mut().zip(parts) {
                *slot = text
                    .parse::<Complex64>()
                    .map_err(|_| format!("malformed amplitude {text:?} in --init"))?;
            }
            SpinState::normalized(amps).map_err(|e| format!("--init {spec:?}: {e}"))
        }
        _ => Err(bad()),
    }
}

pub fn evolve(a: &EvolveArgs) -> Result<String, Failure> {
    let params = a.physics.params()?;
    let psi0 = parse_init(&a.init)?;
    let sector = make_sector(&params, a.n)?;
    let mut rh = reduced_hamiltonian(&params, &sector, a.h0_policy.into())?;
    if a.force_kappa_zero {
        rh = rh.without_kappa();
    }
    let t = uniform_grid(a.tmax, a.steps)?;
    let series = evolve_series(&rh, &psi0, &t)?;
    Ok(csv(
        &[
            "t", "Sx", "Sy", "Sz", "Sxx", "Syy", "Szz", "AxySym", "AyzSym", "AzxSym", "P_perp",
        ],
        series.iter().map(|r| {
            std::iter::once(r.t)
                .chain(r.vector)
                .chain(r.tensor)
                .chain(std::iter::once(r.p_perp()))
                .map(short)
                .collect()
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_specs() {
        assert_eq!(parse_init("sz:-1").unwrap(), SpinState::sz_minus());
        assert_eq!(parse_init("sx:1").unwrap(), SpinState::sx_plus());
        let s = parse_init("custom:1, i, 0").unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((s.amplitudes()[1].im - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(parse_init("custom:0,0,0").is_err());
        assert!(parse_init("custom:1,2").is_err());
        assert!(parse_init("sy:+1").is_err());
        assert!(parse_init("sz").is_err());
    }
}
