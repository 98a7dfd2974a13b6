//! Registry of named physical constants with provenance.
//!
//! The data file is TOML with one `[[constant]]` table per record
//! (`key`, `value`, `unit`, `source`) and optional `[[species]]` tables
//! describing vacuum-fluctuation species in terms of constant keys.

use std::env;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quantity::{energy_convert, Dimension, EnergyUnit, Quantity};
use crate::species::SpeciesDef;

/// Environment variable naming a directory that holds `constants.toml`.
pub const DATA_DIR_ENV: &str = "VACUUM_DATA_DIR";
pub const DATA_FILE_NAME: &str = "constants.toml";

const BUILTIN: &str = include_str!("../data/constants.toml");

pub const REQUIRED_KEYS: [&str; 9] = [
    "e",
    "hbar",
    "mu0",
    "m_e",
    "m_mu",
    "m_tau",
    "ref_epsilon0",
    "ref_c",
    "ref_inv_alpha",
];

/// Source label marking a record that replaces an assigned value.
pub const OVERRIDE_SOURCE: &str = "override";

/// Units accepted in the data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataUnit {
    Coulomb,
    JouleSecond,
    HenryPerMetre,
    Kilogram,
    MetrePerSecond,
    FaradPerMetre,
    Dimensionless,
    ElectronVolt,
    KiloElectronVolt,
    GigaElectronVolt,
    PerSecond,
}

impl DataUnit {
    pub fn dimension(self) -> Dimension {
        match self {
            DataUnit::Coulomb => Dimension::CHARGE,
            DataUnit::JouleSecond => Dimension::ACTION,
            DataUnit::HenryPerMetre => Dimension::PERMEABILITY,
            DataUnit::Kilogram => Dimension::MASS,
            DataUnit::MetrePerSecond => Dimension::VELOCITY,
            DataUnit::FaradPerMetre => Dimension::PERMITTIVITY,
            DataUnit::Dimensionless => Dimension::DIMENSIONLESS,
            DataUnit::ElectronVolt | DataUnit::KiloElectronVolt | DataUnit::GigaElectronVolt => {
                Dimension::ENERGY
            }
            DataUnit::PerSecond => Dimension::FREQUENCY,
        }
    }

    fn energy_unit(self) -> Option<EnergyUnit> {
        match self {
            DataUnit::ElectronVolt => Some(EnergyUnit::ElectronVolt),
            DataUnit::KiloElectronVolt => Some(EnergyUnit::KiloElectronVolt),
            DataUnit::GigaElectronVolt => Some(EnergyUnit::GigaElectronVolt),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DataUnit::Coulomb => "C",
            DataUnit::JouleSecond => "J·s",
            DataUnit::HenryPerMetre => "H/m",
            DataUnit::Kilogram => "kg",
            DataUnit::MetrePerSecond => "m/s",
            DataUnit::FaradPerMetre => "F/m",
            DataUnit::Dimensionless => "dimensionless",
            DataUnit::ElectronVolt => "eV",
            DataUnit::KiloElectronVolt => "keV",
            DataUnit::GigaElectronVolt => "GeV",
            DataUnit::PerSecond => "1/s",
        }
    }
}

impl FromStr for DataUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "C" => DataUnit::Coulomb,
            "J·s" | "J*s" => DataUnit::JouleSecond,
            "H/m" => DataUnit::HenryPerMetre,
            "kg" => DataUnit::Kilogram,
            "m/s" => DataUnit::MetrePerSecond,
            "F/m" => DataUnit::FaradPerMetre,
            "dimensionless" => DataUnit::Dimensionless,
            "eV" => DataUnit::ElectronVolt,
            "keV" => DataUnit::KiloElectronVolt,
            "GeV" => DataUnit::GigaElectronVolt,
            "1/s" => DataUnit::PerSecond,
            other => return Err(Error::UnknownUnit(other.to_string())),
        })
    }
}

impl fmt::Display for DataUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRecord {
    pub key: String,
    /// Value as written, in `unit`.
    pub value: f64,
    pub unit: DataUnit,
    /// The same value in SI base units.
    pub quantity: Quantity,
    pub source: String,
}

/// Where constants come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstantsSource {
    BuiltIn,
    File(PathBuf),
}

impl ConstantsSource {
    /// Explicit path first, then `$VACUUM_DATA_DIR/constants.toml`, then the
    /// bundled defaults.
    pub fn resolve(explicit: Option<&Path>) -> Self {
        if let Some(path) = explicit {
            return ConstantsSource::File(path.to_path_buf());
        }
        match env::var_os(DATA_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                ConstantsSource::File(PathBuf::from(dir).join(DATA_FILE_NAME))
            }
            _ => ConstantsSource::BuiltIn,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    constant: Vec<RawConstant>,
    #[serde(default)]
    species: Vec<SpeciesDef>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstant {
    key: String,
    value: toml::Value,
    unit: String,
    source: String,
}

/// Immutable, validated set of constants plus the species definitions that
/// travelled with them.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsSet {
    records: IndexMap<String, ConstantRecord>,
    species: Vec<SpeciesDef>,
    origin: String,
}

pub fn load_constants(source: &ConstantsSource) -> Result<ConstantsSet> {
    match source {
        ConstantsSource::BuiltIn => ConstantsSet::builtin(),
        ConstantsSource::File(path) => ConstantsSet::from_path(path),
    }
}

impl ConstantsSet {
    pub fn builtin() -> Result<Self> {
        Self::from_toml_str(BUILTIN, "built-in")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            origin: origin.to_string(),
            message,
        };
        let raw: RawFile = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;

        // eV-family records need the elementary charge, so find it first.
        let joules_per_ev = raw
            .constant
            .iter()
            .find(|c| c.key == "e")
            .map(|c| numeric(&c.value).map_err(|m| parse_err(format!("`e`: {m}"))))
            .transpose()?;

        let mut records = IndexMap::new();
        for rc in raw.constant {
            let value = numeric(&rc.value).map_err(|m| parse_err(format!("`{}`: {m}", rc.key)))?;
            let unit: DataUnit = rc.unit.parse()?;
            let si = match unit.energy_unit() {
                Some(eu) => {
                    let jpe = joules_per_ev.ok_or_else(|| Error::InvalidConstant {
                        key: rc.key.clone(),
                        reason: format!("unit {unit} needs the `e` record"),
                    })?;
                    energy_convert(value, eu, EnergyUnit::Joule, jpe)?
                }
                None => value,
            };
            let quantity =
                Quantity::new(si, unit.dimension()).map_err(|_| Error::InvalidConstant {
                    key: rc.key.clone(),
                    reason: "value is not finite".into(),
                })?;
            let record = ConstantRecord {
                key: rc.key.clone(),
                value,
                unit,
                quantity,
                source: rc.source,
            };
            if records.insert(rc.key.clone(), record).is_some() {
                return Err(Error::DuplicateConstant(rc.key));
            }
        }

        let set = ConstantsSet {
            records,
            species: raw.species,
            origin: origin.to_string(),
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        for key in REQUIRED_KEYS {
            if !self.records.contains_key(key) {
                return Err(Error::MissingConstant(key.to_string()));
            }
        }
        for rec in self.records.values() {
            let expected: &[Dimension] = match rec.key.as_str() {
                "e" => &[Dimension::CHARGE],
                "hbar" => &[Dimension::ACTION],
                "mu0" => &[Dimension::PERMEABILITY],
                "m_e" | "m_mu" | "m_tau" | "m_u" => &[Dimension::MASS],
                "ref_epsilon0" => &[Dimension::PERMITTIVITY],
                "ref_c" => &[Dimension::VELOCITY],
                "ref_inv_alpha" => &[Dimension::DIMENSIONLESS],
                k if k.starts_with("m_") => &[Dimension::MASS, Dimension::ENERGY],
                k if k.starts_with("gamma_") => &[Dimension::FREQUENCY, Dimension::ENERGY],
                _ => &[],
            };
            if !expected.is_empty() && !expected.contains(&rec.quantity.dim()) {
                return Err(Error::WrongDimension {
                    what: format!("constant `{}`", rec.key),
                    expected: Box::new(expected[0]),
                    found: Box::new(rec.quantity.dim()),
                });
            }
            let must_be_positive = matches!(rec.key.as_str(), "e" | "hbar" | "mu0")
                || rec.key.starts_with("m_")
                || rec.key.starts_with("ref_")
                || rec.key.starts_with("gamma_");
            if must_be_positive && rec.quantity.value() <= 0.0 {
                return Err(Error::InvalidConstant {
                    key: rec.key.clone(),
                    reason: "must be strictly positive".into(),
                });
            }
        }
        let mu0 = &self.records["mu0"];
        let assigned = 4.0 * std::f64::consts::PI * 1e-7;
        if ((mu0.quantity.value() - assigned) / assigned).abs() > 1e-12
            && mu0.source != OVERRIDE_SOURCE
        {
            return Err(Error::InvalidConstant {
                key: "mu0".into(),
                reason: format!(
                    "differs from the assigned 4π×10⁻⁷ H/m without source \"{OVERRIDE_SOURCE}\""
                ),
            });
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<Quantity> {
        self.record(key).map(|r| r.quantity)
    }

    pub fn record(&self, key: &str) -> Result<&ConstantRecord> {
        self.records
            .get(key)
            .ok_or_else(|| Error::UnknownConstant(key.to_string()))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.records.contains_key(key)
    }

    pub fn records(&self) -> impl Iterator<Item = &ConstantRecord> {
        self.records.values()
    }

    pub fn species_defs(&self) -> &[SpeciesDef] {
        &self.species
    }

    /// Where the set was loaded from (`built-in` or a path).
    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// Returns a copy with `key` replaced by `value` (in `unit`, defaulting to
    /// the record's own unit) and source `override`.
    pub fn with_override(&self, key: &str, value: f64, unit: Option<DataUnit>) -> Result<Self> {
        let unit = unit.unwrap_or(self.record(key)?.unit);
        let si = match unit.energy_unit() {
            Some(eu) => energy_convert(value, eu, EnergyUnit::Joule, self.joules_per_ev())?,
            None => value,
        };
        let mut out = self.clone();
        let rec = out.records.get_mut(key).expect("checked above");
        rec.value = value;
        rec.unit = unit;
        rec.quantity = Quantity::new(si, unit.dimension())?;
        rec.source = OVERRIDE_SOURCE.to_string();
        out.validate()?;
        Ok(out)
    }

    /// Serialises back to the data-file format. Values are written in their
    /// original units with shortest round-trip formatting.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        for rec in self.records.values() {
            out.push_str("[[constant]]\n");
            out.push_str(&format!("key = {}\n", toml_str(&rec.key)));
            out.push_str(&format!("value = {:e}\n", rec.value));
            out.push_str(&format!("unit = {}\n", toml_str(rec.unit.symbol())));
            out.push_str(&format!("source = {}\n\n", toml_str(&rec.source)));
        }
        for def in &self.species {
            out.push_str("[[species]]\n");
            out.push_str(&format!("name = {}\n", toml_str(&def.name)));
            out.push_str(&format!("kind = {}\n", toml_str(def.kind.label())));
            out.push_str(&format!(
                "constituent_mass = {}\n",
                toml_str(&def.constituent_mass)
            ));
            out.push_str(&format!(
                "charge_fraction = {}\n",
                toml_str(&def.charge_fraction)
            ));
            let optional = [
                ("bound_state_mass", &def.bound_state_mass),
                ("two_photon_width", &def.two_photon_width),
                ("two_photon_width_min", &def.two_photon_width_min),
                ("two_photon_width_max", &def.two_photon_width_max),
            ];
            for (field, value) in optional {
                if let Some(v) = value {
                    out.push_str(&format!("{field} = {}\n", toml_str(v)));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn e(&self) -> Quantity {
        self.records["e"].quantity
    }

    pub fn hbar(&self) -> Quantity {
        self.records["hbar"].quantity
    }

    pub fn mu0(&self) -> Quantity {
        self.records["mu0"].quantity
    }

    pub fn ref_epsilon0(&self) -> Quantity {
        self.records["ref_epsilon0"].quantity
    }

    pub fn ref_c(&self) -> Quantity {
        self.records["ref_c"].quantity
    }

    pub fn ref_inv_alpha(&self) -> f64 {
        self.records["ref_inv_alpha"].quantity.value()
    }

    /// Joules per electron-volt, numerically the elementary charge.
    pub fn joules_per_ev(&self) -> f64 {
        self.e().value()
    }
}

fn numeric(v: &toml::Value) -> std::result::Result<f64, String> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(format!("value must be a number, got {}", other.type_str())),
    }
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}
