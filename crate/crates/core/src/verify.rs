//! Self-checks comparing independent routes to the same numbers.

use std::f64::consts::PI;

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::oscillator::dipole_expectation_static;
use crate::oscillator::{
    matrix_element_x_analytic, matrix_element_x_natural, DEFAULT_QUADRATURE_TOL,
};
use crate::perturbation::{
    amplitudes_analytic, amplitudes_ode, mean_dipole, scaling_exponent, Branch, CouplingLambda,
};
use crate::quantity::{Dimension, Quantity};
use crate::species::{resonant_frequency, SpeciesCatalog, SpeciesSpec, WidthChoice};
use crate::vacuum::{
    epsilon0_closed_form, epsilon0_self_consistent, lepton_contribution, lepton_routes,
    permittivity_from_alpha, predict_closed_form,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Worst value of the checked measure; `None` when the check errored.
    pub observed: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Replaces every check's own tolerance.
    pub tolerance: Option<f64>,
    pub branch: Branch,
}

type Check = fn(&ConstantsSet, Branch) -> Result<(f64, String)>;

const CHECKS: [(&str, f64, Check); 8] = [
    ("quadrature-vs-analytic", 1e-10, quadrature_vs_analytic),
    ("parity-forbidden", 1e-10, parity_forbidden),
    ("ode-vs-literal-branch", 50.0, ode_vs_literal),
    ("ode-unitarity", 1e-9, ode_unitarity),
    ("a0-scaling-exponent", 0.05, a0_scaling),
    ("dipole-time-average", 1e-10, dipole_average),
    ("fixed-point-vs-closed-form", 1e-12, fixed_point_vs_closed),
    ("mass-cancellation", 1e-12, mass_cancellation),
];

/// Runs every check, including the dimension audit, which is exact.
pub fn run_checks(k: &ConstantsSet, opts: VerifyOptions) -> Result<Vec<CheckOutcome>> {
    if let Some(t) = opts.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    let mut out = Vec::with_capacity(CHECKS.len() + 1);
    for (name, default_tol, check) in CHECKS {
        let tolerance = opts.tolerance.unwrap_or(default_tol);
        out.push(match check(k, opts.branch) {
            Ok((observed, detail)) => CheckOutcome {
                name,
                observed: Some(observed),
                tolerance,
                passed: observed <= tolerance,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                observed: None,
                tolerance,
                passed: false,
                detail: e.to_string(),
            },
        });
    }
    let (mismatches, detail) = dimension_audit(k);
    out.push(CheckOutcome {
        name: "dimension-audit",
        observed: Some(mismatches as f64),
        tolerance: 0.0,
        passed: mismatches == 0,
        detail,
    });
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn lepton_oscillators(
    k: &ConstantsSet,
) -> Result<Vec<(SpeciesSpec, crate::species::OscillatorSpec)>> {
    let eps = permittivity_from_alpha(k, 1.0 / k.ref_inv_alpha(), &k.ref_c())?;
    SpeciesCatalog::new(k)?
        .leptons()?
        .into_iter()
        .map(|s| {
            let o = resonant_frequency(&s, k, &eps)?;
            Ok((s, o))
        })
        .collect()
}

fn quadrature_vs_analytic(k: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let natural = matrix_element_x_natural(1, 0, DEFAULT_QUADRATURE_TOL)?;
    let mut worst: f64 = 0.0;
    for (_, o) in lepton_oscillators(k)? {
        let quad = o.length_scale(&k.hbar())?.scale(natural.value)?;
        let exact = matrix_element_x_analytic(&o, &k.hbar())?;
        worst = worst.max(rel(quad.value(), exact.value()));
    }
    Ok((
        worst,
        "max relative error of <x>_10 over lepton oscillators".into(),
    ))
}

fn parity_forbidden(_: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    for (a, b) in [(0, 0), (1, 1), (2, 0), (3, 1), (4, 2)] {
        worst = worst.max(
            matrix_element_x_natural(a, b, DEFAULT_QUADRATURE_TOL)?
                .value
                .abs(),
        );
    }
    Ok((
        worst,
        "max |<x>| between equal-parity levels (natural units)".into(),
    ))
}

const ODE_LAMBDAS: [f64; 2] = [1e-4, 1e-3];
const ODE_TAUS: [f64; 3] = [PI, 2.0 * PI, 4.0 * PI];

fn ode_vs_literal(_: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    for l in ODE_LAMBDAS {
        let lam = CouplingLambda::new(l)?;
        for tau in ODE_TAUS {
            let num = amplitudes_ode(tau, lam, 1e-12)?;
            let lit = amplitudes_analytic(tau, lam, Branch::Literal);
            let dev = (num.a0 - lit.a0).norm().max((num.a1 - lit.a1).norm());
            worst = worst.max(dev / (l * l));
        }
    }
    Ok((worst, "max amplitude deviation in units of lambda^2".into()))
}

fn ode_unitarity(_: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    for l in ODE_LAMBDAS {
        for tau in ODE_TAUS {
            let a = amplitudes_ode(tau, CouplingLambda::new(l)?, 1e-12)?;
            worst = worst.max((a.norm_sqr() - 1.0).abs());
        }
    }
    Ok((worst, "max | |a0|^2 + |a1|^2 - 1 |".into()))
}

fn a0_scaling(_: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let p = scaling_exponent(&[1e-4, 3e-4, 1e-3, 3e-3], PI)?;
    Ok((
        (p - 2.0).abs(),
        format!("fitted exponent {p:.4}, expected 2"),
    ))
}

fn dipole_average(k: &ConstantsSet, branch: Branch) -> Result<(f64, String)> {
    let (s, o) = lepton_oscillators(k)?.remove(0);
    let q = s.charge(k)?;
    let field = Quantity::new(1.0, Dimension::ELECTRIC_FIELD)?;
    let target = dipole_expectation_static(&o, &q, &field)?;
    let mean = mean_dipole(&o, &q, &field, &k.hbar(), branch, 1, 64)?;
    Ok((
        rel(mean.value(), target.value()),
        format!("{branch:?} branch period average vs static dipole"),
    ))
}

fn fixed_point_vs_closed(k: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let leptons = SpeciesCatalog::new(k)?.leptons()?;
    let fixed = epsilon0_self_consistent(&leptons, k, 1e-14, 5, WidthChoice::Max)?;
    let closed = epsilon0_closed_form(k, leptons.len() as u32)?;
    Ok((
        rel(fixed.epsilon0_model.value(), closed.value()),
        format!("{} iterations", fixed.iterations.unwrap_or(0)),
    ))
}

fn mass_cancellation(k: &ConstantsSet, _: Branch) -> Result<(f64, String)> {
    let alpha = 1.0 / k.ref_inv_alpha();
    let c = k.ref_c();
    let leptons = SpeciesCatalog::new(k)?.leptons()?;
    let base = lepton_contribution(&leptons[0], k, alpha, &c)?
        .epsilon_term
        .value();
    let mut worst: f64 = 0.0;
    for s in &leptons {
        for factor in [1.0, 1e-2, 1e3, 1e6] {
            let scaled = s.with_scaled_mass(factor)?;
            let (composed, closed) = lepton_routes(&scaled, k, alpha, &c)?;
            worst = worst
                .max(rel(composed.value(), base))
                .max(rel(closed.value(), base));
        }
    }
    Ok((
        worst,
        "max spread of lepton terms over species and mass scalings".into(),
    ))
}

fn dimension_audit(k: &ConstantsSet) -> (usize, String) {
    let mut problems = Vec::new();
    match SpeciesCatalog::new(k)
        .and_then(|cat| cat.leptons())
        .and_then(|l| predict_closed_form(&l, k))
    {
        Ok(r) => {
            if r.epsilon0_model.dim() != Dimension::PERMITTIVITY {
                problems.push(format!("epsilon0 carries {}", r.epsilon0_model.dim()));
            }
            if r.c_model.dim() != Dimension::VELOCITY {
                problems.push(format!("c carries {}", r.c_model.dim()));
            }
            for c in &r.contributions {
                if c.epsilon_term.dim() != Dimension::PERMITTIVITY {
                    problems.push(format!(
                        "{} term carries {}",
                        c.species_name,
                        c.epsilon_term.dim()
                    ));
                }
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let one = Quantity::new(1.0, Dimension::LENGTH)
        .and_then(|l| l.add(&Quantity::new(1.0, Dimension::TIME)?));
    if one.is_ok() {
        problems.push("length + time was accepted".into());
    }
    let detail = if problems.is_empty() {
        "epsilon0 F/m, c m/s, 1/alpha dimensionless; mismatched add rejected".to_string()
    } else {
        problems.join("; ")
    };
    (problems.len(), detail)
}
