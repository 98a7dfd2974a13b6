mod support;

use std::f64::consts::PI;

use num_rational::Rational32;
use proptest::prelude::*;

use support::rel;
use vacuum_core::constants::ConstantsSet;
use vacuum_core::oscillator::{
    dipole_expectation_static, harmonic_approximation, matrix_element_x_analytic,
    matrix_element_x_quadrature, overlap_quadrature, Potential1D,
};
use vacuum_core::perturbation::{
    amplitudes_analytic, amplitudes_ode, dipole_trajectory, mean_dipole, Branch, CouplingLambda,
};
use vacuum_core::quantity::{Dimension, Quantity};
use vacuum_core::report::{ContributionDoc, Outputs, PredictionDocument};
use vacuum_core::species::{
    absorption_exponent, interacting_density, interacting_density_closed_form, number_density,
    DensityMode, OscillatorSpec, SpeciesCatalog, SpeciesSpec, WidthChoice,
};
use vacuum_core::vacuum::{
    epsilon0_closed_form, epsilon0_self_consistent, lepton_contribution, lepton_routes,
};

fn k() -> ConstantsSet {
    ConstantsSet::builtin().unwrap()
}

fn dim() -> impl Strategy<Value = [i32; 7]> {
    proptest::array::uniform7(-4i32..=4)
}

fn magnitude(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e: f64| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mismatched_addition_is_rejected(a in dim(), b in dim(), x in -1e9f64..1e9, y in -1e9f64..1e9) {
        prop_assume!(a != b);
        let qa = Quantity::new(x, Dimension::from_ints(a)).unwrap();
        let qb = Quantity::new(y, Dimension::from_ints(b)).unwrap();
        prop_assert!(qa.add(&qb).is_err());
        prop_assert!(qa.sub(&qb).is_err());
    }
}

proptest! {
    #[test]
    fn product_dimensions_add_exactly(a in dim(), b in dim(), x in magnitude(-20.0, 20.0), y in magnitude(-20.0, 20.0)) {
        let qa = Quantity::new(x, Dimension::from_ints(a)).unwrap();
        let qb = Quantity::new(y, Dimension::from_ints(b)).unwrap();
        let p = qa.mul(&qb).unwrap();
        for i in 0..7 {
            prop_assert_eq!(p.dim().exponents()[i], Rational32::from_integer(a[i] + b[i]));
        }
        let back = qa.div(&qb).unwrap().mul(&qb).unwrap();
        prop_assert_eq!(back.dim(), qa.dim());
        prop_assert!(rel(back.value(), x) <= 1e-15);
    }

    #[test]
    fn override_survives_serialization(factor in 0.5f64..2.0) {
        let k = k();
        let m = k.get("m_tau").unwrap().value() * factor;
        let changed = k.with_override("m_tau", m, None).unwrap();
        let text = changed.to_toml_string();
        let parsed = ConstantsSet::from_toml_str(&text, "round trip").unwrap();
        for r in changed.records() {
            let p = parsed.record(&r.key).unwrap();
            prop_assert_eq!(p.value, r.value);
            prop_assert_eq!(p.quantity, r.quantity);
        }
    }

    #[test]
    fn density_scales_with_mass_cubed(f in magnitude(-2.0, 6.0), g in magnitude(-2.0, 6.0)) {
        let k = k();
        let e = SpeciesCatalog::new(&k).unwrap().resolve("e_pair").unwrap();
        let a = number_density(&e.with_scaled_mass(f).unwrap(), &k, &k.ref_c()).unwrap();
        let b = number_density(&e.with_scaled_mass(g).unwrap(), &k, &k.ref_c()).unwrap();
        prop_assert!(rel(a.value() / b.value(), (f / g).powi(3)) <= 1e-12);
    }

    #[test]
    fn linearized_density_matches_closed_form(f in magnitude(-2.0, 6.0), inv_alpha in 50.0f64..300.0) {
        let k = k();
        let e = SpeciesCatalog::new(&k).unwrap().resolve("e_pair").unwrap().with_scaled_mass(f).unwrap();
        let alpha = 1.0 / inv_alpha;
        let composed = interacting_density(&e, &k, alpha, &k.ref_c(), WidthChoice::Max, DensityMode::Linearized).unwrap();
        let closed = interacting_density_closed_form(&e, &k, alpha, &k.ref_c()).unwrap();
        prop_assert!(rel(composed.value(), closed.value()) <= 1e-12);
    }

    #[test]
    fn quadrature_matches_analytic(mu_exp in -33.0f64..-24.0, w_exp in 12.0f64..21.0) {
        let hbar = k().hbar();
        let o = OscillatorSpec::new(
            Quantity::new(10f64.powf(mu_exp), Dimension::MASS).unwrap(),
            Quantity::new(10f64.powf(w_exp), Dimension::FREQUENCY).unwrap(),
        ).unwrap();
        let q = matrix_element_x_quadrature(1, 0, &o, &hbar).unwrap();
        let a = matrix_element_x_analytic(&o, &hbar).unwrap();
        prop_assert_eq!(q.dim(), Dimension::LENGTH);
        prop_assert!(rel(q.value(), a.value()) <= 1e-10);
    }

    #[test]
    fn harmonic_fit_recovers_parameters(u0 in -10.0f64..10.0, k_exp in -3.0f64..3.0, a in -1.0f64..1.0) {
        let k_spring = 10f64.powf(k_exp);
        let p = Potential1D::new(move |x| u0 + 0.5 * k_spring * (x - a).powi(2), -3.0, 3.0).unwrap();
        let fit = harmonic_approximation(&p).unwrap();
        prop_assert!((fit.x_e.value() - a).abs() <= 1e-8 * a.abs().max(1.0), "x_e {} vs {a}", fit.x_e.value());
        prop_assert!(rel(fit.k_spring.value(), k_spring) <= 1e-8, "K {} vs {k_spring}", fit.k_spring.value());
        prop_assert!((fit.u0.value() - u0).abs() <= 1e-8 * u0.abs().max(1.0));
    }

    #[test]
    fn ode_stays_within_first_order_bound(lam in 1e-5f64..1e-3, tau in 0.0f64..(4.0 * PI)) {
        let l = CouplingLambda::new(lam).unwrap();
        let a = amplitudes_ode(tau, l, 1e-12).unwrap();
        let lit = amplitudes_analytic(tau, l, Branch::Literal);
        prop_assert!((a.a1 - lit.a1).norm() <= 50.0 * lam * lam);
        prop_assert!((a.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn dipole_is_linear_in_field(scale in magnitude(-3.0, 3.0), tau in 0.0f64..20.0) {
        let k = k();
        let o = OscillatorSpec::new(
            Quantity::new(4.554e-31, Dimension::MASS).unwrap(),
            Quantity::new(1.03e16, Dimension::FREQUENCY).unwrap(),
        ).unwrap();
        let e1 = Quantity::new(1.0, Dimension::ELECTRIC_FIELD).unwrap();
        let es = e1.scale(scale).unwrap();
        for b in [Branch::Particular, Branch::Literal] {
            let p1 = dipole_trajectory(&o, &k.e(), &e1, &k.hbar(), b, &[tau]).unwrap()[0].1;
            let ps = dipole_trajectory(&o, &k.e(), &es, &k.hbar(), b, &[tau]).unwrap()[0].1;
            prop_assert!((ps.value() - scale * p1.value()).abs() <= 1e-14 * ps.value().abs().max(1e-300));
        }
    }

    #[test]
    fn period_average_matches_constant(periods in 1usize..6) {
        let k = k();
        let o = OscillatorSpec::new(
            Quantity::new(8.4e-29, Dimension::MASS).unwrap(),
            Quantity::new(2.1e18, Dimension::FREQUENCY).unwrap(),
        ).unwrap();
        let field = Quantity::new(3.0, Dimension::ELECTRIC_FIELD).unwrap();
        let target = dipole_expectation_static(&o, &k.e(), &field).unwrap();
        let mean = mean_dipole(&o, &k.e(), &field, &k.hbar(), Branch::Literal, periods, 32).unwrap();
        prop_assert!(rel(mean.value(), target.value()) <= 1e-10);
    }

    #[test]
    fn lepton_term_is_mass_independent(f in magnitude(-2.0, 6.0)) {
        let k = k();
        let alpha = 1.0 / k.ref_inv_alpha();
        let e = SpeciesCatalog::new(&k).unwrap().resolve("e_pair").unwrap();
        let base = lepton_contribution(&e, &k, alpha, &k.ref_c()).unwrap();
        let scaled = lepton_contribution(&e.with_scaled_mass(f).unwrap(), &k, alpha, &k.ref_c()).unwrap();
        prop_assert!(rel(scaled.epsilon_term.value(), base.epsilon_term.value()) <= 1e-12);
        let (a, b) = lepton_routes(&e.with_scaled_mass(f).unwrap(), &k, alpha, &k.ref_c()).unwrap();
        prop_assert!(rel(a.value(), b.value()) <= 1e-12);
    }

    #[test]
    fn prediction_document_round_trips(
        v in proptest::array::uniform9(-1e30f64..1e30),
        n in 0usize..5,
        iterations in proptest::option::of(1usize..100),
    ) {
        let o = |i: usize| Outputs { epsilon0: v[i], c: v[i + 1], inv_alpha: v[i + 2] };
        let doc = PredictionDocument {
            model: o(0),
            reference: o(3),
            deltas_percent: o(6),
            contributions: (0..n)
                .map(|i| ContributionDoc { species: format!("s{i}"), epsilon_term: v[i], in_alpha_units: v[8 - i] })
                .collect(),
            method: "self-consistent".into(),
            iterations,
            constants_source: "built-in".into(),
            closed_form: if n % 2 == 0 { Some(o(2)) } else { None },
        };
        let text = serde_json::to_string(&doc).unwrap();
        let back: PredictionDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, doc);
    }
}

#[test]
fn orthonormal_up_to_level_five() {
    for n in 0..=5 {
        for m in 0..=5 {
            let v = overlap_quadrature(n, m).unwrap().value;
            let expected = if n == m { 1.0 } else { 0.0 };
            assert!((v - expected).abs() <= 1e-10, "<{n}|{m}> = {v}");
        }
    }
}

#[test]
fn lepton_absorption_is_rare() {
    let k = k();
    let alpha = 1.0 / k.ref_inv_alpha();
    for s in SpeciesCatalog::new(&k).unwrap().leptons().unwrap() {
        let x = absorption_exponent(&s, &k, alpha, &k.ref_c(), WidthChoice::Max).unwrap();
        assert!(x < 1e-10, "{}: {x}", s.name());
    }
}

#[test]
fn fixed_point_equals_closed_form_for_one_to_four_species() {
    let k = k();
    let mut leptons = SpeciesCatalog::new(&k).unwrap().leptons().unwrap();
    // A fourth, heavier copy; its term is mass-independent like the others.
    leptons.push(
        SpeciesSpec::lepton_pair(
            "heavy_pair",
            leptons[2].constituent_mass().scale(10.0).unwrap(),
        )
        .unwrap(),
    );
    for n in 1..=4 {
        let r = epsilon0_self_consistent(&leptons[..n], &k, 1e-14, 10, WidthChoice::Max).unwrap();
        let closed = epsilon0_closed_form(&k, n as u32).unwrap();
        assert!(
            rel(r.epsilon0_model.value(), closed.value()) <= 1e-12,
            "n = {n}"
        );
        assert!(r.iterations.unwrap() <= 2);
    }
}

#[test]
fn each_quarkonium_raises_permittivity() {
    let k = k();
    let cat = SpeciesCatalog::new(&k).unwrap();
    let leptons = cat.leptons().unwrap();
    let base = epsilon0_self_consistent(&leptons, &k, 1e-14, 50, WidthChoice::Max).unwrap();
    for q in cat.quarkonia().unwrap() {
        for width in [WidthChoice::Min, WidthChoice::Max] {
            let mut with = leptons.clone();
            with.push(q.clone());
            let r = epsilon0_self_consistent(&with, &k, 1e-14, 50, width).unwrap();
            assert!(
                r.epsilon0_model.value() > base.epsilon0_model.value(),
                "{}",
                q.name()
            );
            assert!(r.c_model.value() < base.c_model.value());
            assert!(r.inv_alpha_model > base.inv_alpha_model);
            let c = 1.0 / (k.mu0().value() * r.epsilon0_model.value()).sqrt();
            assert!(rel(r.c_model.value(), c) <= 1e-12);
            let inv = 4.0 * PI * r.epsilon0_model.value() * k.hbar().value() * r.c_model.value()
                / k.e().value().powi(2);
            assert!(rel(r.inv_alpha_model, inv) <= 1e-12);
        }
    }
}
