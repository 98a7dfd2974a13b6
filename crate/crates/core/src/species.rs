//! Vacuum-fluctuation species and their kinematics.
//!
//! A species is either a bound charged lepton-antilepton pair or a heavy
//! quarkonium state. Speed of light, fine-structure constant and
//! permittivity are passed explicitly to every operation rather than read
//! from the registry: the self-consistent solver evaluates them at trial
//! values of the permittivity.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Rational32;
use serde::{Deserialize, Serialize};

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::quantity::{Dimension, Quantity};

/// Kind tag as it appears in the data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KindTag {
    #[serde(rename = "lepton-pair")]
    LeptonPair,
    #[serde(rename = "quarkonium")]
    Quarkonium,
}

impl KindTag {
    pub fn label(self) -> &'static str {
        match self {
            KindTag::LeptonPair => "lepton-pair",
            KindTag::Quarkonium => "quarkonium",
        }
    }
}

/// A `[[species]]` record: a species described in terms of constant keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesDef {
    pub name: String,
    pub kind: KindTag,
    pub constituent_mass: String,
    pub charge_fraction: String,
    #[serde(default)]
    pub bound_state_mass: Option<String>,
    /// Single two-photon width (used for both ends of the range).
    #[serde(default)]
    pub two_photon_width: Option<String>,
    #[serde(default)]
    pub two_photon_width_min: Option<String>,
    #[serde(default)]
    pub two_photon_width_max: Option<String>,
}

/// Charge of a constituent in units of the elementary charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChargeFraction(Rational32);

impl ChargeFraction {
    pub const ONE: ChargeFraction = ChargeFraction(Rational32::new_raw(1, 1));
    pub const TWO_THIRDS: ChargeFraction = ChargeFraction(Rational32::new_raw(2, 3));
    pub const ONE_THIRD: ChargeFraction = ChargeFraction(Rational32::new_raw(1, 3));

    pub fn new(r: Rational32) -> Result<Self> {
        [Self::ONE, Self::TWO_THIRDS, Self::ONE_THIRD]
            .into_iter()
            .find(|c| c.0 == r)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("charge fraction {r} not in {{1, 2/3, 1/3}}"))
            })
    }

    pub fn as_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn ratio(self) -> Rational32 {
        self.0
    }
}

impl fmt::Display for ChargeFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthChoice {
    Min,
    #[default]
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarkoniumData {
    /// Mass of the lightest J=0 bound state, kg.
    pub bound_state_mass: Quantity,
    /// Two-photon decay rates, s⁻¹.
    pub width_min: Quantity,
    pub width_max: Quantity,
    /// Bound-state rest energy minus twice the quark rest energy, J.
    pub e_min: Quantity,
}

impl QuarkoniumData {
    pub fn two_photon_width(&self, choice: WidthChoice) -> Quantity {
        match choice {
            WidthChoice::Min => self.width_min,
            WidthChoice::Max => self.width_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeciesKind {
    LeptonPair,
    Quarkonium(Box<QuarkoniumData>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpec {
    name: String,
    constituent_mass: Quantity,
    charge_fraction: ChargeFraction,
    kind: SpeciesKind,
}

fn positive(q: &Quantity, dim: Dimension, what: &str, name: &str) -> Result<()> {
    q.expect_dim(dim, what)?;
    if q.value() <= 0.0 {
        return Err(Error::InvalidSpecies {
            name: name.to_string(),
            reason: format!("{what} must be positive"),
        });
    }
    Ok(())
}

impl SpeciesSpec {
    pub fn lepton_pair(name: &str, mass: Quantity) -> Result<Self> {
        positive(&mass, Dimension::MASS, "constituent mass", name)?;
        Ok(SpeciesSpec {
            name: name.to_string(),
            constituent_mass: mass,
            charge_fraction: ChargeFraction::ONE,
            kind: SpeciesKind::LeptonPair,
        })
    }

    pub fn quarkonium(
        name: &str,
        quark_mass: Quantity,
        charge_fraction: ChargeFraction,
        data: QuarkoniumData,
    ) -> Result<Self> {
        positive(&quark_mass, Dimension::MASS, "quark mass", name)?;
        positive(
            &data.bound_state_mass,
            Dimension::MASS,
            "bound-state mass",
            name,
        )?;
        positive(
            &data.width_min,
            Dimension::FREQUENCY,
            "two-photon width",
            name,
        )?;
        positive(
            &data.width_max,
            Dimension::FREQUENCY,
            "two-photon width",
            name,
        )?;
        positive(
            &data.e_min,
            Dimension::ENERGY,
            "minimum excitation energy",
            name,
        )?;
        if data.width_min.value() > data.width_max.value() {
            return Err(Error::InvalidSpecies {
                name: name.to_string(),
                reason: "two-photon width range is inverted".into(),
            });
        }
        Ok(SpeciesSpec {
            name: name.to_string(),
            constituent_mass: quark_mass,
            charge_fraction,
            kind: SpeciesKind::Quarkonium(Box::new(data)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constituent_mass(&self) -> Quantity {
        self.constituent_mass
    }

    pub fn charge_fraction(&self) -> ChargeFraction {
        self.charge_fraction
    }

    pub fn kind(&self) -> &SpeciesKind {
        &self.kind
    }

    pub fn is_lepton_pair(&self) -> bool {
        matches!(self.kind, SpeciesKind::LeptonPair)
    }

    pub fn reduced_mass(&self) -> Result<Quantity> {
        self.constituent_mass.scale(0.5)
    }

    /// Constituent charge q = fraction × e.
    pub fn charge(&self, k: &ConstantsSet) -> Result<Quantity> {
        k.e().scale(self.charge_fraction.as_f64())
    }

    /// Same species with the constituent mass multiplied by `factor`.
    pub fn with_scaled_mass(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.constituent_mass = self.constituent_mass.scale(factor)?;
        positive(
            &out.constituent_mass,
            Dimension::MASS,
            "constituent mass",
            &self.name,
        )?;
        Ok(out)
    }

    pub fn quarkonium_data(&self) -> Option<&QuarkoniumData> {
        match &self.kind {
            SpeciesKind::Quarkonium(q) => Some(q.as_ref()),
            SpeciesKind::LeptonPair => None,
        }
    }
}

/// Effective one-dimensional harmonic oscillator of a species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSpec {
    reduced_mass: Quantity,
    omega0: Quantity,
}

impl OscillatorSpec {
    pub fn new(reduced_mass: Quantity, omega0: Quantity) -> Result<Self> {
        reduced_mass.expect_dim(Dimension::MASS, "reduced mass")?;
        omega0.expect_dim(Dimension::FREQUENCY, "resonant angular frequency")?;
        if reduced_mass.value() <= 0.0 || omega0.value() <= 0.0 {
            return Err(Error::InvalidArgument(
                "oscillator needs positive reduced mass and frequency".into(),
            ));
        }
        Ok(OscillatorSpec {
            reduced_mass,
            omega0,
        })
    }

    pub fn reduced_mass(&self) -> Quantity {
        self.reduced_mass
    }

    pub fn omega0(&self) -> Quantity {
        self.omega0
    }

    /// Natural length √(ħ/μω⁰).
    pub fn length_scale(&self, hbar: &Quantity) -> Result<Quantity> {
        hbar.div(&self.reduced_mass.mul(&self.omega0)?)?.sqrt()
    }
}

fn expect_speed(c: &Quantity) -> Result<()> {
    c.expect_dim(Dimension::VELOCITY, "speed of light")
}

/// Uncertainty-principle lifetime: ħ/(4mc²) for lepton pairs, ħ/(2Mc²) for
/// quarkonia.
pub fn vf_lifetime(s: &SpeciesSpec, k: &ConstantsSet, c: &Quantity) -> Result<Quantity> {
    expect_speed(c)?;
    let rest = match s.quarkonium_data() {
        None => s.constituent_mass.scale(4.0)?,
        Some(q) => q.bound_state_mass.scale(2.0)?,
    };
    k.hbar().div(&rest.mul(&c.powi(2)?)?)
}

/// Distance light travels during the lifetime.
pub fn coherence_length(s: &SpeciesSpec, k: &ConstantsSet, c: &Quantity) -> Result<Quantity> {
    c.mul(&vf_lifetime(s, k, c)?)
}

/// One fluctuation per coherence volume: 1/L³.
pub fn number_density(s: &SpeciesSpec, k: &ConstantsSet, c: &Quantity) -> Result<Quantity> {
    coherence_length(s, k, c)?.powi(-3)
}

fn lepton_only(s: &SpeciesSpec, op: &str) -> Result<()> {
    if s.is_lepton_pair() {
        Ok(())
    } else {
        Err(Error::UnsupportedSpecies {
            name: s.name.clone(),
            reason: format!("{op} is defined for lepton pairs only"),
        })
    }
}

/// Non-relativistic ground-state binding energy −μq⁴/(2(4πε)²ħ²).
pub fn binding_energy(s: &SpeciesSpec, k: &ConstantsSet, epsilon: &Quantity) -> Result<Quantity> {
    lepton_only(s, "binding energy")?;
    epsilon.expect_dim(Dimension::PERMITTIVITY, "permittivity")?;
    let mu = s.reduced_mass()?;
    let q2 = s.charge(k)?.powi(2)?;
    let coulomb = q2.div(&epsilon.scale(4.0 * PI)?)?; // q²/(4πε)
    mu.mul(&coulomb.powi(2)?)?
        .div(&k.hbar().powi(2)?.scale(2.0)?)?
        .scale(-1.0)
}

/// The same binding energy written as −m f⁴ α² c²/4.
pub fn binding_energy_from_alpha(s: &SpeciesSpec, alpha: f64, c: &Quantity) -> Result<Quantity> {
    lepton_only(s, "binding energy")?;
    expect_speed(c)?;
    let f4 = s.charge_fraction.as_f64().powi(4);
    s.constituent_mass
        .mul(&c.powi(2)?)?
        .scale(-f4 * alpha * alpha / 4.0)
}

/// Oscillator with ω⁰ = |E_bind|/ħ (lepton pairs) or E_min/ħ (quarkonia).
pub fn resonant_frequency(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    epsilon: &Quantity,
) -> Result<OscillatorSpec> {
    let energy = match s.quarkonium_data() {
        None => binding_energy(s, k, epsilon)?.abs(),
        Some(q) => q.e_min,
    };
    OscillatorSpec::new(s.reduced_mass()?, energy.div(&k.hbar())?)
}

/// K = μ(ω⁰)².
pub fn spring_constant(o: &OscillatorSpec) -> Result<Quantity> {
    o.reduced_mass.mul(&o.omega0.powi(2)?)
}

/// Decay rate of a photon-excited fluctuation: α⁵mc²/ħ for lepton pairs,
/// twice the two-photon width for quarkonia.
pub fn decay_rate(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
    width: WidthChoice,
) -> Result<Quantity> {
    expect_speed(c)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    match s.quarkonium_data() {
        None => s
            .constituent_mass
            .mul(&c.powi(2)?)?
            .div(&k.hbar())?
            .scale(alpha.powi(5)),
        Some(q) => q.two_photon_width(width).scale(2.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DensityMode {
    /// (1/L³)(1 − e^(−ΓΔt))
    Exact,
    /// (1/L³)ΓΔt
    #[default]
    Linearized,
}

/// Density of fluctuations that actually absorb a photon during their
/// lifetime.
pub fn interacting_density(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
    width: WidthChoice,
    mode: DensityMode,
) -> Result<Quantity> {
    let x = absorption_exponent(s, k, alpha, c, width)?;
    let probability = match mode {
        DensityMode::Exact => -(-x).exp_m1(),
        DensityMode::Linearized => x,
    };
    number_density(s, k, c)?.scale(probability)
}

/// ΓΔt, the dimensionless product that sets the absorption probability.
pub fn absorption_exponent(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
    width: WidthChoice,
) -> Result<f64> {
    decay_rate(s, k, alpha, c, width)?
        .mul(&vf_lifetime(s, k, c)?)?
        .value_as(Dimension::DIMENSIONLESS, "decay rate × lifetime")
}

/// Closed form (α⁵/4)(4mc/ħ)³ of the linearized lepton-pair density.
pub fn interacting_density_closed_form(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
) -> Result<Quantity> {
    lepton_only(s, "closed-form interacting density")?;
    s.constituent_mass
        .mul(c)?
        .scale(4.0)?
        .div(&k.hbar())?
        .powi(3)?
        .scale(alpha.powi(5) / 4.0)
}

const UNSUPPORTED: [(&str, &str); 5] = [
    (
        "eta_t",
        "no experimental information exists about the eta_t(1S) bound state",
    ),
    (
        "pi0",
        "light-quark bound states need a fully relativistic treatment, not an oscillator",
    ),
    (
        "eta",
        "light-quark bound states need a fully relativistic treatment, not an oscillator",
    ),
    (
        "eta_prime",
        "light-quark bound states need a fully relativistic treatment, not an oscillator",
    ),
    (
        "eta_light",
        "light-quark bound states need a fully relativistic treatment, not an oscillator",
    ),
];

/// Species definitions resolved against a constants set.
#[derive(Debug, Clone)]
pub struct SpeciesCatalog<'a> {
    constants: &'a ConstantsSet,
    defs: Vec<SpeciesDef>,
}

impl<'a> SpeciesCatalog<'a> {
    /// Uses the species records of `k`, falling back to the bundled
    /// definitions when the constants file carries none.
    pub fn new(k: &'a ConstantsSet) -> Result<Self> {
        let defs = if k.species_defs().is_empty() {
            ConstantsSet::builtin()?.species_defs().to_vec()
        } else {
            k.species_defs().to_vec()
        };
        Ok(SpeciesCatalog { constants: k, defs })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|d| d.name.as_str())
    }

    pub fn resolve(&self, name: &str) -> Result<SpeciesSpec> {
        if let Some((_, reason)) = UNSUPPORTED.iter().find(|(n, _)| *n == name) {
            return Err(Error::UnsupportedSpecies {
                name: name.to_string(),
                reason: reason.to_string(),
            });
        }
        let def = self
            .defs
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::UnknownSpecies(name.to_string()))?;
        self.build(def)
    }

    pub fn all(&self) -> Result<Vec<SpeciesSpec>> {
        self.defs.iter().map(|d| self.build(d)).collect()
    }

    pub fn leptons(&self) -> Result<Vec<SpeciesSpec>> {
        self.of_kind(KindTag::LeptonPair)
    }

    pub fn quarkonia(&self) -> Result<Vec<SpeciesSpec>> {
        self.of_kind(KindTag::Quarkonium)
    }

    fn of_kind(&self, kind: KindTag) -> Result<Vec<SpeciesSpec>> {
        self.defs
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| self.build(d))
            .collect()
    }

    /// Mass in kg; energies are converted with the reference speed of light.
    fn mass(&self, key: &str) -> Result<Quantity> {
        let q = self.constants.get(key)?;
        if q.dim() == Dimension::ENERGY {
            q.div(&self.constants.ref_c().powi(2)?)
        } else {
            Ok(q)
        }
    }

    fn rest_energy(&self, key: &str) -> Result<Quantity> {
        let q = self.constants.get(key)?;
        if q.dim() == Dimension::MASS {
            q.mul(&self.constants.ref_c().powi(2)?)
        } else {
            Ok(q)
        }
    }

    /// Rate in s⁻¹; widths given as energies are divided by ħ.
    fn rate(&self, key: &str) -> Result<Quantity> {
        let q = self.constants.get(key)?;
        if q.dim() == Dimension::ENERGY {
            q.div(&self.constants.hbar())
        } else {
            Ok(q)
        }
    }

    fn build(&self, def: &SpeciesDef) -> Result<SpeciesSpec> {
        let invalid = |reason: &str| Error::InvalidSpecies {
            name: def.name.clone(),
            reason: reason.to_string(),
        };
        let fraction: Rational32 = def
            .charge_fraction
            .parse()
            .map_err(|_| invalid("charge_fraction is not a rational number"))?;
        let fraction = ChargeFraction::new(fraction)?;
        let has_quark_fields = def.bound_state_mass.is_some()
            || def.two_photon_width.is_some()
            || def.two_photon_width_min.is_some()
            || def.two_photon_width_max.is_some();
        match def.kind {
            KindTag::LeptonPair => {
                if has_quark_fields {
                    return Err(invalid("lepton pairs take no quarkonium fields"));
                }
                if fraction != ChargeFraction::ONE {
                    return Err(invalid("lepton pairs carry unit charge"));
                }
                SpeciesSpec::lepton_pair(&def.name, self.mass(&def.constituent_mass)?)
            }
            KindTag::Quarkonium => {
                let bound_key = def
                    .bound_state_mass
                    .as_deref()
                    .ok_or_else(|| invalid("quarkonium needs bound_state_mass"))?;
                let (min_key, max_key) = match (
                    &def.two_photon_width,
                    &def.two_photon_width_min,
                    &def.two_photon_width_max,
                ) {
                    (Some(w), None, None) => (w.as_str(), w.as_str()),
                    (None, Some(lo), Some(hi)) => (lo.as_str(), hi.as_str()),
                    _ => {
                        return Err(invalid(
                            "give either two_photon_width or both two_photon_width_min/max",
                        ))
                    }
                };
                let e_min = self
                    .rest_energy(bound_key)?
                    .sub(&self.rest_energy(&def.constituent_mass)?.scale(2.0)?)?;
                if e_min.value() <= 0.0 {
                    return Err(invalid("bound-state mass must exceed twice the quark mass"));
                }
                let data = QuarkoniumData {
                    bound_state_mass: self.mass(bound_key)?,
                    width_min: self.rate(min_key)?,
                    width_max: self.rate(max_key)?,
                    e_min,
                };
                SpeciesSpec::quarkonium(
                    &def.name,
                    self.mass(&def.constituent_mass)?,
                    fraction,
                    data,
                )
            }
        }
    }
}
