//! Dimensioned SI quantities.
//!
//! A [`Quantity`] is an `f64` value tagged with a [`Dimension`]: exact
//! rational exponents over the seven SI base dimensions. Values are always
//! stored in SI base units; the eV family of energy units only exists at
//! the ingestion and presentation boundary (see [`energy_convert`]).

use std::fmt;
use std::str::FromStr;

use num_rational::Rational32;

use crate::error::{Error, Result};

const BASE_COUNT: usize = 7;

/// Index of each SI base dimension inside a [`Dimension`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Length = 0,
    Mass = 1,
    Time = 2,
    Current = 3,
    Temperature = 4,
    Amount = 5,
    Luminosity = 6,
}

/// Exponents of (length, mass, time, current, temperature, amount, luminosity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    exponents: [Rational32; BASE_COUNT],
}

const fn r(n: i32) -> Rational32 {
    Rational32::new_raw(n, 1)
}

impl Dimension {
    /// Builds a dimension from integer exponents in base order
    /// (m, kg, s, A, K, mol, cd).
    pub const fn from_ints(e: [i32; BASE_COUNT]) -> Self {
        Dimension {
            exponents: [
                r(e[0]),
                r(e[1]),
                r(e[2]),
                r(e[3]),
                r(e[4]),
                r(e[5]),
                r(e[6]),
            ],
        }
    }

    pub fn from_rationals(exponents: [Rational32; BASE_COUNT]) -> Self {
        Dimension { exponents }
    }

    pub const DIMENSIONLESS: Dimension = Dimension::from_ints([0, 0, 0, 0, 0, 0, 0]);
    pub const LENGTH: Dimension = Dimension::from_ints([1, 0, 0, 0, 0, 0, 0]);
    pub const MASS: Dimension = Dimension::from_ints([0, 1, 0, 0, 0, 0, 0]);
    pub const TIME: Dimension = Dimension::from_ints([0, 0, 1, 0, 0, 0, 0]);
    pub const CURRENT: Dimension = Dimension::from_ints([0, 0, 0, 1, 0, 0, 0]);
    pub const FREQUENCY: Dimension = Dimension::from_ints([0, 0, -1, 0, 0, 0, 0]);
    pub const VELOCITY: Dimension = Dimension::from_ints([1, 0, -1, 0, 0, 0, 0]);
    pub const CHARGE: Dimension = Dimension::from_ints([0, 0, 1, 1, 0, 0, 0]);
    pub const ENERGY: Dimension = Dimension::from_ints([2, 1, -2, 0, 0, 0, 0]);
    pub const ACTION: Dimension = Dimension::from_ints([2, 1, -1, 0, 0, 0, 0]);
    pub const NUMBER_DENSITY: Dimension = Dimension::from_ints([-3, 0, 0, 0, 0, 0, 0]);
    pub const SPRING_CONSTANT: Dimension = Dimension::from_ints([0, 1, -2, 0, 0, 0, 0]);
    /// F/m = A²·s⁴·kg⁻¹·m⁻³
    pub const PERMITTIVITY: Dimension = Dimension::from_ints([-3, -1, 4, 2, 0, 0, 0]);
    /// H/m = kg·m·A⁻²·s⁻²
    pub const PERMEABILITY: Dimension = Dimension::from_ints([1, 1, -2, -2, 0, 0, 0]);
    /// V/m = kg·m·s⁻³·A⁻¹
    pub const ELECTRIC_FIELD: Dimension = Dimension::from_ints([1, 1, -3, -1, 0, 0, 0]);
    /// C·m
    pub const DIPOLE_MOMENT: Dimension = Dimension::from_ints([1, 0, 1, 1, 0, 0, 0]);

    pub fn exponents(&self) -> &[Rational32; BASE_COUNT] {
        &self.exponents
    }

    pub fn exponent(&self, base: Base) -> Rational32 {
        self.exponents[base as usize]
    }

    pub fn is_dimensionless(&self) -> bool {
        self.exponents.iter().all(|e| *e == r(0))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Rational32, Rational32) -> Rational32) -> Self {
        let mut exponents = self.exponents;
        for (e, o) in exponents.iter_mut().zip(other.exponents.iter()) {
            *e = f(*e, *o);
        }
        Dimension { exponents }
    }

    pub fn product(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn quotient(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, p: Rational32) -> Self {
        let mut exponents = self.exponents;
        for e in exponents.iter_mut() {
            *e *= p;
        }
        Dimension { exponents }
    }
}

fn superscript(n: i32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut out = String::new();
    if n < 0 {
        out.push('⁻');
    }
    for ch in n.unsigned_abs().to_string().chars() {
        out.push(DIGITS[ch.to_digit(10).unwrap() as usize]);
    }
    out
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // conventional print order: kg m s A K mol cd
        const ORDER: [(Base, &str); BASE_COUNT] = [
            (Base::Mass, "kg"),
            (Base::Length, "m"),
            (Base::Time, "s"),
            (Base::Current, "A"),
            (Base::Temperature, "K"),
            (Base::Amount, "mol"),
            (Base::Luminosity, "cd"),
        ];
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        let mut first = true;
        for (base, symbol) in ORDER {
            let e = self.exponent(base);
            if e == r(0) {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "{symbol}")?;
            if e.is_integer() {
                if *e.numer() != 1 {
                    write!(f, "{}", superscript(*e.numer()))?;
                }
            } else {
                write!(f, "^({}/{})", e.numer(), e.denom())?;
            }
        }
        Ok(())
    }
}

/// A finite real value in SI base units together with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
}

fn finite(value: f64, op: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { op })
    }
}

impl Quantity {
    pub fn new(value: f64, dim: Dimension) -> Result<Self> {
        Ok(Quantity {
            value: finite(value, "construction")?,
            dim,
        })
    }

    pub fn dimensionless(value: f64) -> Result<Self> {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Returns the value if the dimension matches, otherwise a dimension error
    /// naming `what`.
    pub fn value_as(&self, expected: Dimension, what: &str) -> Result<f64> {
        self.expect_dim(expected, what)?;
        Ok(self.value)
    }

    pub fn expect_dim(&self, expected: Dimension, what: &str) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::WrongDimension {
                what: what.to_string(),
                expected: Box::new(expected),
                found: Box::new(self.dim),
            })
        }
    }

    pub fn mul(&self, other: &Quantity) -> Result<Quantity> {
        Ok(Quantity {
            value: finite(self.value * other.value, "multiplication")?,
            dim: self.dim.product(&other.dim),
        })
    }

    pub fn div(&self, other: &Quantity) -> Result<Quantity> {
        if other.value == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Quantity {
            value: finite(self.value / other.value, "division")?,
            dim: self.dim.quotient(&other.dim),
        })
    }

    pub fn add(&self, other: &Quantity) -> Result<Quantity> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: Box::new(self.dim),
                right: Box::new(other.dim),
            });
        }
        Ok(Quantity {
            value: finite(self.value + other.value, "addition")?,
            dim: self.dim,
        })
    }

    pub fn sub(&self, other: &Quantity) -> Result<Quantity> {
        self.add(&other.scale(-1.0)?)
    }

    /// Multiplies by a pure number.
    pub fn scale(&self, factor: f64) -> Result<Quantity> {
        Ok(Quantity {
            value: finite(self.value * factor, "scaling")?,
            dim: self.dim,
        })
    }

    pub fn pow(&self, p: Rational32) -> Result<Quantity> {
        let value = if p.is_integer() {
            self.value.powi(*p.numer())
        } else {
            if self.value < 0.0 {
                return Err(Error::NegativeFractionalPower {
                    base: self.value,
                    power: p.to_string(),
                });
            }
            match (*p.numer(), *p.denom()) {
                (1, 2) => self.value.sqrt(),
                (-1, 2) => 1.0 / self.value.sqrt(),
                (n, d) => self.value.powf(n as f64 / d as f64),
            }
        };
        Ok(Quantity {
            value: finite(value, "power")?,
            dim: self.dim.scaled(p),
        })
    }

    pub fn powi(&self, n: i32) -> Result<Quantity> {
        self.pow(Rational32::from_integer(n))
    }

    pub fn sqrt(&self) -> Result<Quantity> {
        self.pow(Rational32::new(1, 2))
    }

    pub fn recip(&self) -> Result<Quantity> {
        Quantity::dimensionless(1.0)?.div(self)
    }

    pub fn abs(&self) -> Quantity {
        Quantity {
            value: self.value.abs(),
            dim: self.dim,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim.is_dimensionless() {
            write!(f, "{:e}", self.value)
        } else {
            write!(f, "{:e} {}", self.value, self.dim)
        }
    }
}

/// Energy units accepted at the input/output boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    Joule,
    ElectronVolt,
    KiloElectronVolt,
    MegaElectronVolt,
    GigaElectronVolt,
}

impl EnergyUnit {
    /// Joules per unit, given the number of joules in one eV.
    fn joules(self, joules_per_ev: f64) -> f64 {
        match self {
            EnergyUnit::Joule => 1.0,
            EnergyUnit::ElectronVolt => joules_per_ev,
            EnergyUnit::KiloElectronVolt => joules_per_ev * 1e3,
            EnergyUnit::MegaElectronVolt => joules_per_ev * 1e6,
            EnergyUnit::GigaElectronVolt => joules_per_ev * 1e9,
        }
    }

    /// Power of ten relative to eV, `None` for joules.
    fn ev_exponent(self) -> Option<i32> {
        match self {
            EnergyUnit::Joule => None,
            EnergyUnit::ElectronVolt => Some(0),
            EnergyUnit::KiloElectronVolt => Some(3),
            EnergyUnit::MegaElectronVolt => Some(6),
            EnergyUnit::GigaElectronVolt => Some(9),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::Joule => "J",
            EnergyUnit::ElectronVolt => "eV",
            EnergyUnit::KiloElectronVolt => "keV",
            EnergyUnit::MegaElectronVolt => "MeV",
            EnergyUnit::GigaElectronVolt => "GeV",
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "J" => Ok(EnergyUnit::Joule),
            "eV" => Ok(EnergyUnit::ElectronVolt),
            "keV" => Ok(EnergyUnit::KiloElectronVolt),
            "MeV" => Ok(EnergyUnit::MegaElectronVolt),
            "GeV" => Ok(EnergyUnit::GigaElectronVolt),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

/// Converts an energy between units. `joules_per_ev` is the numerical value
/// of the elementary charge from the loaded constants.
pub fn energy_convert(
    value: f64,
    from: EnergyUnit,
    to: EnergyUnit,
    joules_per_ev: f64,
) -> Result<f64> {
    let out = match (from.ev_exponent(), to.ev_exponent()) {
        (None, None) => value,
        (Some(a), Some(b)) => value * 10f64.powi(a - b),
        _ => value * from.joules(joules_per_ev) / to.joules(joules_per_ev),
    };
    finite(out, "energy conversion")
}
