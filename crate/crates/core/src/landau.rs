//! Landau-level bookkeeping for a uniform field along z.

use crate::error::{Error, Result};

/// Physical configuration shared by every computation, in units ħ = c = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    pub mass: f64,
    /// Signed charge.
    pub charge: f64,
    pub g_factor: f64,
    /// Field strength B ≥ 0.
    pub field: f64,
    /// Longitudinal momentum.
    pub pz: f64,
}

impl Default for ParticleParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: 1.0,
            g_factor: 2.0,
            field: 0.0,
            pz: 0.0,
        }
    }
}

impl ParticleParams {
    pub fn new(mass: f64, charge: f64, g_factor: f64, field: f64, pz: f64) -> Result<Self> {
        let p = Self {
            mass,
            charge,
            g_factor,
            field,
            pz,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.mass, self.charge, self.g_factor, self.field, self.pz];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if self.field < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "field strength must be non-negative, got {}",
                self.field
            )));
        }
        Ok(())
    }

    pub fn with_field(self, field: f64) -> Self {
        Self { field, ..self }
    }

    pub fn with_g(self, g_factor: f64) -> Self {
        Self { g_factor, ..self }
    }

    /// eB, the signed coupling that multiplies S·B.
    pub fn coupling(&self) -> f64 {
        self.charge * self.field
    }

    pub fn is_normal_moment(&self) -> bool {
        self.g_factor == 2.0
    }

    pub(crate) fn require_zero_pz(&self) -> Result<()> {
        if self.pz == 0.0 {
            Ok(())
        } else {
            Err(Error::RequiresZeroPz(self.pz))
        }
    }

    pub(crate) fn require_normal_moment(&self) -> Result<()> {
        if self.is_normal_moment() {
            Ok(())
        } else {
            Err(Error::RequiresNormalMoment(self.g_factor))
        }
    }
}

/// One orbital Landau level with its spin-independent scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauSector {
    pub n: u32,
    /// |e|B(2n+1) + pz².
    pub pi2: f64,
    /// √(m² + π²).
    pub eps_prime: f64,
    /// 2eB/ε′², signed like e.
    pub b: f64,
    /// Set when a nonzero pz was folded into π²; the planar Landau formula
    /// has no longitudinal term.
    pub includes_pz: bool,
}

pub fn make_sector(params: &ParticleParams, n: u32) -> Result<LandauSector> {
    params.validate()?;
    if params.field == 0.0 {
        return Err(Error::SectorUndefined);
    }
    let pi2 = params.charge.abs() * params.field * f64::from(2 * n + 1) + params.pz * params.pz;
    let eps2 = params.mass * params.mass + pi2;
    Ok(LandauSector {
        n,
        pi2,
        eps_prime: eps2.sqrt(),
        b: 2.0 * params.coupling() / eps2,
        includes_pz: params.pz != 0.0,
    })
}

impl LandauSector {
    /// A sector with a prescribed π², used for a particle at rest (π² = 0)
    /// and other synthetic configurations.
    pub fn from_pi2(params: &ParticleParams, n: u32, pi2: f64) -> Result<Self> {
        params.validate()?;
        if !(pi2 >= 0.0 && pi2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pi^2 must be finite and non-negative, got {pi2}"
            )));
        }
        let eps2 = params.mass * params.mass + pi2;
        Ok(Self {
            n,
            pi2,
            eps_prime: eps2.sqrt(),
            b: 2.0 * params.coupling() / eps2,
            includes_pz: false,
        })
    }

    /// ε′ − m evaluated without cancellation.
    pub fn kinetic(&self, mass: f64) -> f64 {
        self.pi2 / (self.eps_prime + mass)
    }
}

/// Spin projection on the field axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinProjection {
    Minus,
    Zero,
    Plus,
}

impl SpinProjection {
    pub const ALL: [SpinProjection; 3] = [Self::Plus, Self::Zero, Self::Minus];

    pub fn value(self) -> i32 {
        match self {
            Self::Minus => -1,
            Self::Zero => 0,
            Self::Plus => 1,
        }
    }

    pub fn from_value(s: i32) -> Result<Self> {
        match s {
            -1 => Ok(Self::Minus),
            0 => Ok(Self::Zero),
            1 => Ok(Self::Plus),
            _ => Err(Error::InvalidParameter(format!(
                "spin projection must be -1, 0 or +1, got {s}"
            ))),
        }
    }
}

/// A set of (n, s_z) pairs sharing one g = 2 energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGroup {
    pub energy: f64,
    /// Members ordered by n.
    pub members: Vec<(u32, SpinProjection)>,
    pub multiplicity: usize,
    /// Whether every member satisfies n − sign(e)·s_z ≥ 1.
    pub satisfies_condition: bool,
}

/// Groups the g = 2 levels √(m² + |e|B(2n+1) − 2eB·s_z + pz²) by energy.
///
/// Energies are grouped on the integer key k = 2n + 1 − 2·sign(e)·s_z, so
/// degenerate members compare exactly. A level with key k collects pairs up
/// to n = (k+1)/2; only keys whose whole group lies inside n ≤ n_max are
/// reported, which drops the truncated tail.
pub fn enumerate_levels_g2(params: &ParticleParams, n_max: u32) -> Result<Vec<LevelGroup>> {
    params.validate()?;
    params.require_normal_moment()?;
    if params.charge == 0.0 {
        return Err(Error::NeutralParticle);
    }
    if params.field == 0.0 {
        return Err(Error::SectorUndefined);
    }
    let sign = params.charge.signum() as i64;
    let eb = params.charge.abs() * params.field;
    let base = params.mass * params.mass + params.pz * params.pz;

    let mut keyed: std::collections::BTreeMap<i64, Vec<(u32, SpinProjection)>> =
        std::collections::BTreeMap::new();
    for n in 0..=n_max {
        for s in SpinProjection::ALL {
            let k = 2 * i64::from(n) + 1 - 2 * sign * i64::from(s.value());
            let radicand = base + eb * k as f64;
            if radicand <= 0.0 {
                return Err(Error::Supercritical {
                    n,
                    s_z: s.value(),
                    radicand,
                });
            }
            keyed.entry(k).or_default().push((n, s));
        }
    }

    let complete_up_to = 2 * i64::from(n_max) - 1;
    Ok(keyed
        .into_iter()
        .filter(|(k, _)| *k <= complete_up_to)
        .map(|(k, mut members)| {
            members.sort();
            let satisfies_condition = members
                .iter()
                .all(|&(n, s)| i64::from(n) - sign * i64::from(s.value()) >= 1);
            LevelGroup {
                energy: (base + eb * k as f64).sqrt(),
                multiplicity: members.len(),
                members,
                satisfies_condition,
            }
        })
        .collect())
}
