//! Vacuum permittivity assembled from fluctuation polarizabilities, and the
//! speed of light and fine-structure constant that follow from it.

use std::f64::consts::PI;

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::quantity::{Dimension, Quantity};
use crate::species::{
    interacting_density, number_density, resonant_frequency, vf_lifetime, DensityMode, SpeciesSpec,
    WidthChoice,
};

/// Largest relative disagreement tolerated between the composed and the
/// closed lepton routes before the computation is rejected.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesContribution {
    pub species_name: String,
    pub epsilon_term: Quantity,
    /// γ in γ·e²/(ħc).
    pub in_alpha_units: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sum,
    ClosedForm,
    SelfConsistent,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Sum => "sum",
            Method::ClosedForm => "closed-form",
            Method::SelfConsistent => "self-consistent",
        }
    }
}

/// Signed percent differences (reference − model)/model × 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceDeltas {
    pub epsilon0: f64,
    pub c: f64,
    pub inv_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub epsilon0_model: Quantity,
    pub c_model: Quantity,
    pub inv_alpha_model: f64,
    pub contributions: Vec<SpeciesContribution>,
    pub method: Method,
    pub reference_deltas: ReferenceDeltas,
    /// Fixed-point evaluations; `None` for non-iterative methods.
    pub iterations: Option<usize>,
    pub constants_source: String,
}

impl PredictionReport {
    /// Derives c and 1/α from ε₀ and attaches the reference comparison.
    pub fn assemble(
        epsilon0: Quantity,
        contributions: Vec<SpeciesContribution>,
        method: Method,
        iterations: Option<usize>,
        k: &ConstantsSet,
    ) -> Result<Self> {
        let c = speed_of_light(&epsilon0, k)?;
        let inv_alpha = inverse_alpha(&epsilon0, &c, k)?;
        let mut report = PredictionReport {
            epsilon0_model: epsilon0,
            c_model: c,
            inv_alpha_model: inv_alpha,
            contributions,
            method,
            reference_deltas: ReferenceDeltas {
                epsilon0: 0.0,
                c: 0.0,
                inv_alpha: 0.0,
            },
            iterations,
            constants_source: k.origin().to_string(),
        };
        report.reference_deltas = compare_to_reference(&report, k)?;
        Ok(report)
    }
}

/// e²/(ħc), the unit in which contributions are quoted.
pub fn coupling_unit(k: &ConstantsSet, c: &Quantity) -> Result<Quantity> {
    k.e().powi(2)?.div(&k.hbar().mul(c)?)
}

/// ε = e²/(4παħc).
pub fn permittivity_from_alpha(k: &ConstantsSet, alpha: f64, c: &Quantity) -> Result<Quantity> {
    coupling_unit(k, c)?.scale(1.0 / (4.0 * PI * alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

fn contribution(
    name: &str,
    term: Quantity,
    k: &ConstantsSet,
    c: &Quantity,
) -> Result<SpeciesContribution> {
    term.expect_dim(Dimension::PERMITTIVITY, "permittivity contribution")?;
    let unit = coupling_unit(k, c)?;
    Ok(SpeciesContribution {
        species_name: name.to_string(),
        in_alpha_units: term
            .div(&unit)?
            .value_as(Dimension::DIMENSIONLESS, "contribution ratio")?,
        epsilon_term: term,
    })
}

/// N^VF·(q²/μ)/(ω⁰)² through the density and oscillator operations, and the
/// closed 8³αe²/(ħc). Returned as (composed, closed).
pub fn lepton_routes(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
) -> Result<(Quantity, Quantity)> {
    if !s.is_lepton_pair() {
        return Err(Error::UnsupportedSpecies {
            name: s.name().to_string(),
            reason: "lepton contribution needs a lepton pair".into(),
        });
    }
    check_alpha(alpha)?;
    let epsilon = permittivity_from_alpha(k, alpha, c)?;
    let density = interacting_density(
        s,
        k,
        alpha,
        c,
        WidthChoice::default(),
        DensityMode::Linearized,
    )?;
    let osc = resonant_frequency(s, k, &epsilon)?;
    let composed = density
        .mul(&s.charge(k)?.powi(2)?)?
        .div(&osc.reduced_mass())?
        .div(&osc.omega0().powi(2)?)?;
    let closed = coupling_unit(k, c)?.scale(512.0 * alpha)?;
    Ok((composed, closed))
}

pub fn lepton_contribution(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
) -> Result<SpeciesContribution> {
    let (composed, closed) = lepton_routes(s, k, alpha, c)?;
    let rel = ((composed.value() - closed.value()) / closed.value()).abs();
    if rel > ROUTE_TOLERANCE {
        return Err(Error::RouteMismatch {
            what: format!("{} contribution", s.name()),
            first: composed.value(),
            second: closed.value(),
        });
    }
    contribution(s.name(), composed, k, c)
}

/// 8c(M/ħ)²Γ_γγ·(q_Q²/(m_Q/2))/(ω⁰)², with ω⁰ = E_min/ħ.
pub fn quarkonium_contribution(
    s: &SpeciesSpec,
    k: &ConstantsSet,
    c: &Quantity,
    width: WidthChoice,
) -> Result<SpeciesContribution> {
    let Some(q) = s.quarkonium_data() else {
        return Err(Error::UnsupportedSpecies {
            name: s.name().to_string(),
            reason: "quarkonium contribution needs a quarkonium state".into(),
        });
    };
    // N = (1/L³)·2Γ_γγΔt with the uncertainty lifetime of the bound state.
    let gamma = q.two_photon_width(width).scale(2.0)?;
    let density = number_density(s, k, c)?
        .mul(&gamma)?
        .mul(&vf_lifetime(s, k, c)?)?;
    let osc = resonant_frequency(s, k, &k.ref_epsilon0())?;
    let term = density
        .mul(&s.charge(k)?.powi(2)?)?
        .div(&osc.reduced_mass())?
        .div(&osc.omega0().powi(2)?)?;
    contribution(s.name(), term, k, c)
}

/// ε₀ = (n·8³/4π)·μ₀·(e²/ħ)².
pub fn epsilon0_closed_form(k: &ConstantsSet, n_species: u32) -> Result<Quantity> {
    if n_species < 1 {
        return Err(Error::InvalidArgument(
            "closed form needs at least one species".into(),
        ));
    }
    let e2_over_hbar = k.e().powi(2)?.div(&k.hbar())?;
    k.mu0()
        .mul(&e2_over_hbar.powi(2)?)?
        .scale(n_species as f64 * 512.0 / (4.0 * PI))
}

fn contributions_at(
    species: &[SpeciesSpec],
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
    width: WidthChoice,
) -> Result<Vec<SpeciesContribution>> {
    species
        .iter()
        .map(|s| {
            if s.is_lepton_pair() {
                lepton_contribution(s, k, alpha, c)
            } else {
                quarkonium_contribution(s, k, c, width)
            }
        })
        .collect()
}

fn total(contributions: &[SpeciesContribution]) -> Result<Quantity> {
    let mut sum = Quantity::new(0.0, Dimension::PERMITTIVITY)?;
    for c in contributions {
        sum = sum.add(&c.epsilon_term)?;
    }
    Ok(sum)
}

/// Direct sum with α and c fixed at the given values.
pub fn epsilon0_sum(
    species: &[SpeciesSpec],
    k: &ConstantsSet,
    alpha: f64,
    c: &Quantity,
    width: WidthChoice,
) -> Result<PredictionReport> {
    require_lepton(species)?;
    let parts = contributions_at(species, k, alpha, c, width)?;
    PredictionReport::assemble(total(&parts)?, parts, Method::Sum, None, k)
}

/// Closed form for `n` lepton species, with the per-species breakdown taken
/// at the model α and c.
pub fn predict_closed_form(species: &[SpeciesSpec], k: &ConstantsSet) -> Result<PredictionReport> {
    let leptons: Vec<SpeciesSpec> = species
        .iter()
        .filter(|s| s.is_lepton_pair())
        .cloned()
        .collect();
    require_lepton(&leptons)?;
    let eps = epsilon0_closed_form(k, leptons.len() as u32)?;
    let c = speed_of_light(&eps, k)?;
    let alpha = 1.0 / inverse_alpha(&eps, &c, k)?;
    let parts = contributions_at(&leptons, k, alpha, &c, WidthChoice::default())?;
    PredictionReport::assemble(eps, parts, Method::ClosedForm, None, k)
}

fn require_lepton(species: &[SpeciesSpec]) -> Result<()> {
    if species.iter().any(|s| s.is_lepton_pair()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "at least one lepton-pair species is required".into(),
        ))
    }
}

/// Solves ε = F(ε), where F sums every contribution with α(ε) and c(ε)
/// written through the trial permittivity.
pub fn epsilon0_self_consistent(
    species: &[SpeciesSpec],
    k: &ConstantsSet,
    tol: f64,
    max_iter: usize,
    width: WidthChoice,
) -> Result<PredictionReport> {
    require_lepton(species)?;
    if !(1e-15..=1e-6).contains(&tol) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol:e} outside [1e-15, 1e-6]"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be positive".into()));
    }
    let evaluate = |eps: &Quantity| -> Result<(Quantity, Vec<SpeciesContribution>)> {
        let c = speed_of_light(eps, k)?;
        let alpha = 1.0 / inverse_alpha(eps, &c, k)?;
        let parts = contributions_at(species, k, alpha, &c, width)?;
        Ok((total(&parts)?, parts))
    };

    let mut eps = k.ref_epsilon0();
    let mut last_step: Option<f64> = None;
    let mut change = f64::INFINITY;
    for i in 1..=max_iter {
        let (next, parts) = evaluate(&eps)?;
        let step = next.value() - eps.value();
        change = step.abs() / next.value();
        if change <= tol {
            return PredictionReport::assemble(next, parts, Method::SelfConsistent, Some(i), k);
        }
        // Plain Picard unless the step flipped sign without shrinking.
        let damped =
            matches!(last_step, Some(prev) if prev * step < 0.0 && step.abs() >= 0.5 * prev.abs());
        eps = if damped {
            Quantity::new(eps.value() + 0.5 * step, Dimension::PERMITTIVITY)?
        } else {
            next
        };
        last_step = Some(step);
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        last_change: change,
    })
}

/// c = 1/√(μ₀ε₀).
pub fn speed_of_light(epsilon0: &Quantity, k: &ConstantsSet) -> Result<Quantity> {
    epsilon0.expect_dim(Dimension::PERMITTIVITY, "permittivity")?;
    if epsilon0.value() <= 0.0 {
        return Err(Error::InvalidArgument(
            "permittivity must be positive".into(),
        ));
    }
    k.mu0().mul(epsilon0)?.sqrt()?.recip()
}

/// 1/α = 4πε₀ħc/e².
pub fn inverse_alpha(epsilon0: &Quantity, c: &Quantity, k: &ConstantsSet) -> Result<f64> {
    epsilon0
        .mul(&k.hbar())?
        .mul(c)?
        .div(&k.e().powi(2)?)?
        .scale(4.0 * PI)?
        .value_as(Dimension::DIMENSIONLESS, "inverse fine-structure constant")
}

pub fn compare_to_reference(r: &PredictionReport, k: &ConstantsSet) -> Result<ReferenceDeltas> {
    let pct = |reference: f64, model: f64| -> Result<f64> {
        if model == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok((reference - model) / model * 100.0)
    };
    Ok(ReferenceDeltas {
        epsilon0: pct(
            k.ref_epsilon0()
                .value_as(Dimension::PERMITTIVITY, "reference permittivity")?,
            r.epsilon0_model
                .value_as(Dimension::PERMITTIVITY, "model permittivity")?,
        )?,
        c: pct(
            k.ref_c().value_as(Dimension::VELOCITY, "reference speed")?,
            r.c_model.value_as(Dimension::VELOCITY, "model speed")?,
        )?,
        inv_alpha: pct(k.ref_inv_alpha(), r.inv_alpha_model)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::SpeciesCatalog;

    fn k() -> ConstantsSet {
        ConstantsSet::builtin().unwrap()
    }

    fn ref_alpha(k: &ConstantsSet) -> f64 {
        1.0 / k.ref_inv_alpha()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn electron_pair_term() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let e = cat.resolve("e_pair").unwrap();
        let t = lepton_contribution(&e, &k, ref_alpha(&k), &k.ref_c()).unwrap();
        let expected =
            512.0 * ref_alpha(&k) * 1.602176634e-19f64.powi(2) / (1.054571817e-34 * 299792458.0);
        assert!(rel(t.epsilon_term.value(), expected) < 1e-12);
        assert!(rel(t.in_alpha_units, 512.0 * ref_alpha(&k)) < 1e-12);
        assert!((t.epsilon_term.value() - 3.03e-12).abs() < 0.01e-12);
    }

    #[test]
    fn leptons_agree_on_both_routes() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let mut terms = Vec::new();
        for s in cat.leptons().unwrap() {
            let (a, b) = lepton_routes(&s, &k, ref_alpha(&k), &k.ref_c()).unwrap();
            assert!(rel(a.value(), b.value()) < 1e-12, "{}", s.name());
            terms.push(a.value());
        }
        assert!(rel(terms[1], terms[0]) < 1e-12);
        assert!(rel(terms[2], terms[0]) < 1e-12);
    }

    #[test]
    fn kind_checks() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let etac = cat.resolve("eta_c").unwrap();
        let e = cat.resolve("e_pair").unwrap();
        assert!(lepton_contribution(&etac, &k, ref_alpha(&k), &k.ref_c()).is_err());
        assert!(quarkonium_contribution(&e, &k, &k.ref_c(), WidthChoice::Max).is_err());
    }

    #[test]
    fn quarkonium_terms() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let c = k.ref_c();
        let etac =
            quarkonium_contribution(&cat.resolve("eta_c").unwrap(), &k, &c, WidthChoice::Max)
                .unwrap();
        let etab =
            quarkonium_contribution(&cat.resolve("eta_b").unwrap(), &k, &c, WidthChoice::Max)
                .unwrap();
        let etab_min =
            quarkonium_contribution(&cat.resolve("eta_b").unwrap(), &k, &c, WidthChoice::Min)
                .unwrap();
        assert!(
            rel(etac.in_alpha_units, 1.3e-3) < 0.05,
            "{}",
            etac.in_alpha_units
        );
        assert!(
            rel(etab.in_alpha_units, 2.6e-5) < 0.05,
            "{}",
            etab.in_alpha_units
        );
        assert!(rel(etab.in_alpha_units / etab_min.in_alpha_units, 0.45 / 0.22) < 1e-9);
        let leptons = 3.0 * 512.0 * ref_alpha(&k);
        let r = etac.in_alpha_units / leptons;
        assert!(r > 0.5e-4 && r < 2e-4, "{r}");
    }

    #[test]
    fn closed_form_values() {
        let k = k();
        let three = epsilon0_closed_form(&k, 3).unwrap();
        assert!(rel(three.value(), 9.10e-12) < 3e-3);
        let one = epsilon0_closed_form(&k, 1).unwrap();
        assert!(rel(one.value() * 3.0, three.value()) < 1e-15);
        // (6μ₀/π)(8e²/ħ)²
        let direct =
            6.0 * k.mu0().value() / PI * (8.0 * k.e().value().powi(2) / k.hbar().value()).powi(2);
        assert!(rel(three.value(), direct) < 1e-14);
        assert!(epsilon0_closed_form(&k, 0).is_err());
    }

    #[test]
    fn speed_and_alpha_from_closed_form() {
        let k = k();
        let eps = epsilon0_closed_form(&k, 3).unwrap();
        let c = speed_of_light(&eps, &k).unwrap();
        let identity =
            (PI / 6.0).sqrt() * k.hbar().value() / (8.0 * k.e().value().powi(2) * k.mu0().value());
        assert!(rel(c.value(), identity) < 1e-12);
        assert!(rel(c.value(), 2.96e8) < 3e-3);
        let inv = inverse_alpha(&eps, &c, &k).unwrap();
        assert!(rel(inv, 64.0 * (1.5 * PI).sqrt()) < 1e-12);
    }

    #[test]
    fn reference_composition() {
        let k = k();
        let c = speed_of_light(&k.ref_epsilon0(), &k).unwrap();
        assert!(rel(c.value(), k.ref_c().value()) < 1e-9);
        let inv = inverse_alpha(&k.ref_epsilon0(), &k.ref_c(), &k).unwrap();
        assert!((inv - 137.036).abs() < 1e-3);
    }

    #[test]
    fn self_consistent_matches_closed_form() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let leptons = cat.leptons().unwrap();
        for n in 1..=leptons.len() {
            let r =
                epsilon0_self_consistent(&leptons[..n], &k, 1e-13, 50, WidthChoice::Max).unwrap();
            let closed = epsilon0_closed_form(&k, n as u32).unwrap();
            assert!(rel(r.epsilon0_model.value(), closed.value()) < 1e-12);
            assert!(r.iterations.unwrap() <= 2);
        }
        assert!(epsilon0_self_consistent(&[], &k, 1e-12, 50, WidthChoice::Max).is_err());
        let quarks = cat.quarkonia().unwrap();
        assert!(epsilon0_self_consistent(&quarks, &k, 1e-12, 50, WidthChoice::Max).is_err());
        assert!(epsilon0_self_consistent(&leptons, &k, 1e-3, 50, WidthChoice::Max).is_err());
    }

    #[test]
    fn quarks_shift_the_fixed_point() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let leptons = cat.leptons().unwrap();
        let all = cat.all().unwrap();
        let base = epsilon0_self_consistent(&leptons, &k, 1e-14, 50, WidthChoice::Max).unwrap();
        let with = epsilon0_self_consistent(&all, &k, 1e-14, 50, WidthChoice::Max).unwrap();
        let shift = with.epsilon0_model.value() / base.epsilon0_model.value() - 1.0;
        assert!(shift > 1.0e-4 && shift < 1.4e-4, "{shift}");
        assert!(with.c_model.value() < base.c_model.value());
        assert!(with.inv_alpha_model > base.inv_alpha_model);
        assert_eq!(with.contributions.len(), all.len());
    }

    #[test]
    fn report_invariants_and_deltas() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let r = predict_closed_form(&cat.all().unwrap(), &k).unwrap();
        assert_eq!(r.contributions.len(), 3);
        let c = 1.0 / (k.mu0().value() * r.epsilon0_model.value()).sqrt();
        assert!(rel(r.c_model.value(), c) < 1e-12);
        let inv = 4.0 * PI * r.epsilon0_model.value() * k.hbar().value() * r.c_model.value()
            / k.e().value().powi(2);
        assert!(rel(r.inv_alpha_model, inv) < 1e-12);
        assert!((r.reference_deltas.epsilon0 + 2.8).abs() < 0.15);
        assert!((r.reference_deltas.c - 1.3).abs() < 0.15);
        assert!((r.reference_deltas.inv_alpha + 1.4).abs() < 0.15);
        let total: f64 = r.contributions.iter().map(|c| c.epsilon_term.value()).sum();
        assert!(rel(total, r.epsilon0_model.value()) < 1e-12);
    }

    #[test]
    fn sum_at_reference_equals_closed_form() {
        let k = k();
        let cat = SpeciesCatalog::new(&k).unwrap();
        let r = epsilon0_sum(
            &cat.leptons().unwrap(),
            &k,
            ref_alpha(&k),
            &k.ref_c(),
            WidthChoice::Max,
        )
        .unwrap();
        let closed = epsilon0_closed_form(&k, 3).unwrap();
        assert!(rel(r.epsilon0_model.value(), closed.value()) < 1e-9);
        assert_eq!(r.method, Method::Sum);
    }
}
