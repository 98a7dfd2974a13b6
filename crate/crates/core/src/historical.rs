//! Numerological coincidences involving α, kept as curiosities. None of
//! these is physics; they are reproduced only to show the arithmetic.

use std::f64::consts::PI;

use crate::constants::ConstantsSet;
use crate::error::Result;
use crate::quantity::Dimension;

pub const LABEL: &str = "historical/numerological";

/// Absolute zero "derived" as T₀ = −(2/α − 1) °C.
pub fn bethe_absolute_zero(alpha: f64) -> f64 {
    -(2.0 / alpha - 1.0)
}

/// 10α², offered as an approximation to m_e/u.
pub fn allen_mass_ratio(alpha: f64) -> f64 {
    10.0 * alpha * alpha
}

/// 1/α = (16π³/9)(5!/π)^(1/4).
pub fn wyler_inverse_alpha() -> f64 {
    16.0 * PI.powi(3) / 9.0 * (120.0 / PI).powf(0.25)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoricalEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub value: f64,
    /// What the value is usually set against.
    pub compare_to: f64,
    pub compare_label: &'static str,
}

pub fn table(k: &ConstantsSet) -> Result<Vec<HistoricalEntry>> {
    let alpha = 1.0 / k.ref_inv_alpha();
    let me_over_u = k
        .get("m_e")?
        .div(&k.get("m_u")?)?
        .value_as(Dimension::DIMENSIONLESS, "m_e/u")?;
    Ok(vec![
        HistoricalEntry {
            name: "bethe",
            formula: "T0 = -(2/alpha - 1) degC",
            value: bethe_absolute_zero(alpha),
            compare_to: -273.15,
            compare_label: "absolute zero (degC)",
        },
        HistoricalEntry {
            name: "allen",
            formula: "m_e/u = 10 alpha^2",
            value: allen_mass_ratio(alpha),
            compare_to: me_over_u,
            compare_label: "m_e/u",
        },
        HistoricalEntry {
            name: "wyler",
            formula: "1/alpha = (16 pi^3/9)(5!/pi)^(1/4)",
            value: wyler_inverse_alpha(),
            compare_to: k.ref_inv_alpha(),
            compare_label: "1/alpha (reference)",
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wyler() {
        assert!((wyler_inverse_alpha() - 137.03608).abs() < 1e-5);
    }

    #[test]
    fn bethe() {
        assert!((bethe_absolute_zero(1.0 / 137.036) + 273.072).abs() < 1e-9);
    }

    #[test]
    fn allen_against_bundled_masses() {
        let k = ConstantsSet::builtin().unwrap();
        let rows = table(&k).unwrap();
        let allen = &rows[1];
        assert!((allen.value - 5.325e-4).abs() < 1e-6);
        assert!((allen.compare_to - 5.486e-4).abs() < 1e-6);
    }
}
