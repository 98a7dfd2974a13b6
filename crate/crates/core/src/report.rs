//! Serializable documents behind every CLI output, and their table and CSV
//! renderings. Tables, JSON and CSV for one command all come from the same
//! document value.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::ConstantsSet;
use crate::error::{Error, Result};
use crate::historical::{self, HistoricalEntry};
use crate::perturbation::{
    amplitudes_analytic, amplitudes_ode, scaling_exponent, Branch, CouplingLambda,
};
use crate::species::{
    absorption_exponent, coherence_length, decay_rate, interacting_density, number_density,
    resonant_frequency, vf_lifetime, DensityMode, KindTag, SpeciesCatalog, WidthChoice,
};
use crate::vacuum::{epsilon0_closed_form, inverse_alpha, speed_of_light, PredictionReport};
use crate::verify::CheckOutcome;

/// Formats `x` with `digits` significant figures, switching to exponent
/// notation outside [1e-3, 1e5).
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..5).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

/// Plain left-aligned text table.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

/// Serializes `rows` with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub epsilon0: f64,
    pub c: f64,
    pub inv_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionDoc {
    pub species: String,
    pub epsilon_term: f64,
    pub in_alpha_units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionDocument {
    pub model: Outputs,
    pub reference: Outputs,
    pub deltas_percent: Outputs,
    pub contributions: Vec<ContributionDoc>,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub constants_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Outputs>,
}

impl PredictionDocument {
    pub fn new(
        report: &PredictionReport,
        closed_form: Option<&PredictionReport>,
        k: &ConstantsSet,
    ) -> Self {
        let outputs = |r: &PredictionReport| Outputs {
            epsilon0: r.epsilon0_model.value(),
            c: r.c_model.value(),
            inv_alpha: r.inv_alpha_model,
        };
        PredictionDocument {
            model: outputs(report),
            reference: Outputs {
                epsilon0: k.ref_epsilon0().value(),
                c: k.ref_c().value(),
                inv_alpha: k.ref_inv_alpha(),
            },
            deltas_percent: Outputs {
                epsilon0: report.reference_deltas.epsilon0,
                c: report.reference_deltas.c,
                inv_alpha: report.reference_deltas.inv_alpha,
            },
            contributions: report
                .contributions
                .iter()
                .map(|c| ContributionDoc {
                    species: c.species_name.clone(),
                    epsilon_term: c.epsilon_term.value(),
                    in_alpha_units: c.in_alpha_units,
                })
                .collect(),
            method: report.method.label().to_string(),
            iterations: report.iterations,
            constants_source: report.constants_source.clone(),
            closed_form: closed_form.map(outputs),
        }
    }

    pub fn to_table(&self, digits: usize) -> String {
        let f = |x: f64| format_sig(x, digits);
        let mut out = String::from("vacuum permittivity prediction\n");
        match self.iterations {
            Some(n) => out.push_str(&format!("method: {} ({n} iterations)\n", self.method)),
            None => out.push_str(&format!("method: {}\n", self.method)),
        }
        out.push_str(&format!("constants: {}\n\n", self.constants_source));

        let row = |name: &str, pick: fn(&Outputs) -> f64, unit: &str| {
            vec![
                name.to_string(),
                f(pick(&self.model)),
                self.closed_form
                    .as_ref()
                    .map(|o| f(pick(o)))
                    .unwrap_or_else(|| "-".into()),
                f(pick(&self.reference)),
                f(pick(&self.deltas_percent)),
                unit.to_string(),
            ]
        };
        let rows = vec![
            row("epsilon0", |o| o.epsilon0, "F/m"),
            row("c", |o| o.c, "m/s"),
            row("inv_alpha", |o| o.inv_alpha, "1"),
        ];
        out.push_str(&render_table(
            &[
                "quantity",
                "model",
                "closed form",
                "reference",
                "delta %",
                "unit",
            ],
            &rows,
        ));
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .contributions
            .iter()
            .map(|c| vec![c.species.clone(), f(c.epsilon_term), f(c.in_alpha_units)])
            .collect();
        out.push_str(&render_table(
            &["species", "epsilon term (F/m)", "x e^2/(hbar c)"],
            &rows,
        ));
        out
    }

    /// Columns: kind, name, value, unit, reference, delta_percent,
    /// in_alpha_units.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        let triples: [Column; 3] = [
            ("epsilon0", |o| o.epsilon0, "F/m"),
            ("c", |o| o.c, "m/s"),
            ("inv_alpha", |o| o.inv_alpha, "1"),
        ];
        for (name, pick, unit) in triples {
            rows.push(PredictCsvRow {
                kind: "model",
                name: name.to_string(),
                value: pick(&self.model),
                unit,
                reference: Some(pick(&self.reference)),
                delta_percent: Some(pick(&self.deltas_percent)),
                in_alpha_units: None,
            });
        }
        if let Some(cf) = &self.closed_form {
            for (name, pick, unit) in triples {
                rows.push(PredictCsvRow {
                    kind: "closed_form",
                    name: name.to_string(),
                    value: pick(cf),
                    unit,
                    reference: None,
                    delta_percent: None,
                    in_alpha_units: None,
                });
            }
        }
        for c in &self.contributions {
            rows.push(PredictCsvRow {
                kind: "contribution",
                name: c.species.clone(),
                value: c.epsilon_term,
                unit: "F/m",
                reference: None,
                delta_percent: None,
                in_alpha_units: Some(c.in_alpha_units),
            });
        }
        to_csv(&rows)
    }
}

/// Output name, field accessor, unit.
type Column = (&'static str, fn(&Outputs) -> f64, &'static str);

#[derive(Serialize)]
struct PredictCsvRow {
    kind: &'static str,
    name: String,
    value: f64,
    unit: &'static str,
    reference: Option<f64>,
    delta_percent: Option<f64>,
    in_alpha_units: Option<f64>,
}

/// One row of the species table, evaluated at the reference α and c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRow {
    pub species: String,
    pub kind: String,
    pub lifetime_s: f64,
    pub coherence_length_m: f64,
    pub density_per_m3: f64,
    pub omega0_per_s: f64,
    pub decay_rate_per_s: f64,
    pub absorption_exponent: f64,
    pub interacting_density_per_m3: f64,
}

pub fn species_rows(k: &ConstantsSet, width: WidthChoice) -> Result<Vec<SpeciesRow>> {
    let c = k.ref_c();
    let alpha = 1.0 / k.ref_inv_alpha();
    let eps = k.ref_epsilon0();
    SpeciesCatalog::new(k)?
        .all()?
        .iter()
        .map(|s| {
            Ok(SpeciesRow {
                species: s.name().to_string(),
                kind: if s.is_lepton_pair() {
                    KindTag::LeptonPair
                } else {
                    KindTag::Quarkonium
                }
                .label()
                .to_string(),
                lifetime_s: vf_lifetime(s, k, &c)?.value(),
                coherence_length_m: coherence_length(s, k, &c)?.value(),
                density_per_m3: number_density(s, k, &c)?.value(),
                omega0_per_s: resonant_frequency(s, k, &eps)?.omega0().value(),
                decay_rate_per_s: decay_rate(s, k, alpha, &c, width)?.value(),
                absorption_exponent: absorption_exponent(s, k, alpha, &c, width)?,
                interacting_density_per_m3: interacting_density(
                    s,
                    k,
                    alpha,
                    &c,
                    width,
                    DensityMode::Linearized,
                )?
                .value(),
            })
        })
        .collect()
}

pub fn species_table(rows: &[SpeciesRow], digits: usize) -> String {
    let f = |x: f64| format_sig(x, digits);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.species.clone(),
                r.kind.clone(),
                f(r.lifetime_s),
                f(r.coherence_length_m),
                f(r.density_per_m3),
                f(r.omega0_per_s),
                f(r.decay_rate_per_s),
                f(r.interacting_density_per_m3),
            ]
        })
        .collect();
    render_table(
        &[
            "species",
            "kind",
            "dt (s)",
            "L (m)",
            "1/L^3 (m^-3)",
            "omega0 (1/s)",
            "Gamma (1/s)",
            "N_VF (m^-3)",
        ],
        &body,
    )
}

pub fn species_csv(rows: &[SpeciesRow]) -> Result<String> {
    to_csv(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub n: u32,
    pub epsilon0: f64,
    pub c: f64,
    pub inv_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub lambda: f64,
    /// |a₀(τ) − 1| from the ODE.
    pub a0_deviation: f64,
    pub a0_deviation_over_lambda2: f64,
    /// |a₁(τ)| for the selected analytic branch.
    pub a1_branch: f64,
    pub a1_ode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityDocument {
    pub species_count: Vec<CountRow>,
    pub tau: f64,
    pub branch: String,
    pub lambda_sweep: Vec<LambdaRow>,
    pub scaling_exponent: f64,
}

pub const SENSITIVITY_COUNTS: std::ops::RangeInclusive<u32> = 1..=6;
pub const SENSITIVITY_LAMBDAS: [f64; 4] = [1e-4, 3e-4, 1e-3, 3e-3];

pub fn sensitivity(k: &ConstantsSet, branch: Branch) -> Result<SensitivityDocument> {
    let species_count = SENSITIVITY_COUNTS
        .map(|n| {
            let eps = epsilon0_closed_form(k, n)?;
            let c = speed_of_light(&eps, k)?;
            Ok(CountRow {
                n,
                epsilon0: eps.value(),
                inv_alpha: inverse_alpha(&eps, &c, k)?,
                c: c.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tau = PI;
    let lambda_sweep = SENSITIVITY_LAMBDAS
        .iter()
        .map(|&l| {
            let lam = CouplingLambda::new(l)?;
            let ode = amplitudes_ode(tau, lam, 1e-12)?;
            let dev = (ode.a0 - 1.0).norm();
            Ok(LambdaRow {
                lambda: l,
                a0_deviation: dev,
                a0_deviation_over_lambda2: dev / (l * l),
                a1_branch: amplitudes_analytic(tau, lam, branch).a1.norm(),
                a1_ode: ode.a1.norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityDocument {
        species_count,
        tau,
        branch: branch_label(branch).to_string(),
        lambda_sweep,
        scaling_exponent: scaling_exponent(&SENSITIVITY_LAMBDAS, tau)?,
    })
}

pub fn branch_label(b: Branch) -> &'static str {
    match b {
        Branch::Particular => "paper",
        Branch::Literal => "literal",
    }
}

impl SensitivityDocument {
    pub fn to_table(&self, digits: usize) -> String {
        let f = |x: f64| format_sig(x, digits);
        let mut out = String::from("dependence on the number of lepton species (closed form)\n");
        let rows: Vec<Vec<String>> = self
            .species_count
            .iter()
            .map(|r| vec![r.n.to_string(), f(r.epsilon0), f(r.c), f(r.inv_alpha)])
            .collect();
        out.push_str(&render_table(
            &["n", "epsilon0 (F/m)", "c (m/s)", "inv_alpha"],
            &rows,
        ));
        out.push_str(&format!(
            "\nground-state depletion at tau = {} ({} branch for a1)\n",
            f(self.tau),
            self.branch
        ));
        let rows: Vec<Vec<String>> = self
            .lambda_sweep
            .iter()
            .map(|r| {
                vec![
                    f(r.lambda),
                    f(r.a0_deviation),
                    f(r.a0_deviation_over_lambda2),
                    f(r.a1_branch),
                    f(r.a1_ode),
                ]
            })
            .collect();
        out.push_str(&render_table(
            &[
                "lambda",
                "|a0 - 1|",
                "|a0 - 1|/lambda^2",
                "|a1| branch",
                "|a1| ode",
            ],
            &rows,
        ));
        out.push_str(&format!(
            "scaling exponent: {}\n",
            format_sig(self.scaling_exponent, digits.max(4))
        ));
        out
    }

    /// Columns: sweep, parameter, epsilon0, c, inv_alpha, a0_deviation,
    /// a1_branch, a1_ode.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows: Vec<SensitivityCsvRow> = self
            .species_count
            .iter()
            .map(|r| SensitivityCsvRow {
                sweep: "species_count",
                parameter: r.n as f64,
                epsilon0: Some(r.epsilon0),
                c: Some(r.c),
                inv_alpha: Some(r.inv_alpha),
                a0_deviation: None,
                a1_branch: None,
                a1_ode: None,
            })
            .collect();
        rows.extend(self.lambda_sweep.iter().map(|r| SensitivityCsvRow {
            sweep: "lambda",
            parameter: r.lambda,
            epsilon0: None,
            c: None,
            inv_alpha: None,
            a0_deviation: Some(r.a0_deviation),
            a1_branch: Some(r.a1_branch),
            a1_ode: Some(r.a1_ode),
        }));
        to_csv(&rows)
    }
}

#[derive(Serialize)]
struct SensitivityCsvRow {
    sweep: &'static str,
    parameter: f64,
    epsilon0: Option<f64>,
    c: Option<f64>,
    inv_alpha: Option<f64>,
    a0_deviation: Option<f64>,
    a1_branch: Option<f64>,
    a1_ode: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoricalRow {
    pub name: String,
    pub formula: String,
    pub value: f64,
    pub compare_to: f64,
    pub compare_label: String,
    pub label: String,
}

impl From<&HistoricalEntry> for HistoricalRow {
    fn from(e: &HistoricalEntry) -> Self {
        HistoricalRow {
            name: e.name.to_string(),
            formula: e.formula.to_string(),
            value: e.value,
            compare_to: e.compare_to,
            compare_label: e.compare_label.to_string(),
            label: historical::LABEL.to_string(),
        }
    }
}

pub fn historical_rows(k: &ConstantsSet) -> Result<Vec<HistoricalRow>> {
    Ok(historical::table(k)?
        .iter()
        .map(HistoricalRow::from)
        .collect())
}

pub fn historical_table(rows: &[HistoricalRow], digits: usize) -> String {
    let f = |x: f64| format_sig(x, digits);
    let mut out = format!("{} coincidences, not physics\n", historical::LABEL);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.formula.clone(),
                f(r.value),
                f(r.compare_to),
                r.compare_label.clone(),
            ]
        })
        .collect();
    out.push_str(&render_table(
        &["name", "formula", "value", "compare to", ""],
        &body,
    ));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub observed: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl From<&CheckOutcome> for CheckRow {
    fn from(c: &CheckOutcome) -> Self {
        CheckRow {
            name: c.name.to_string(),
            observed: c.observed,
            tolerance: c.tolerance,
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

pub fn verify_table(rows: &[CheckRow], digits: usize) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.observed
                    .map(|o| format_sig(o, digits))
                    .unwrap_or_else(|| "error".into()),
                format_sig(r.tolerance, digits),
                if r.passed { "PASS" } else { "FAIL" }.to_string(),
                r.detail.clone(),
            ]
        })
        .collect();
    let mut out = render_table(
        &["check", "observed", "tolerance", "status", "detail"],
        &body,
    );
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        out.push_str(&format!("\nall {} checks passed\n", rows.len()));
    } else {
        out.push_str(&format!("\n{failed} of {} checks failed\n", rows.len()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_figures() {
        assert_eq!(format_sig(9.1008e-12, 3), "9.10e-12");
        assert_eq!(format_sig(2.957e8, 3), "2.96e8");
        assert_eq!(format_sig(138.93144, 5), "138.93");
        assert_eq!(format_sig(138.93144, 3), "139");
        assert_eq!(format_sig(-2.7103, 3), "-2.71");
        assert_eq!(format_sig(0.0, 3), "0.00");
    }

    #[test]
    fn table_alignment() {
        let t = render_table(&["a", "bb"], &[vec!["xxx".into(), "y".into()]]);
        assert_eq!(t, "a    bb\nxxx  y\n");
    }

    #[test]
    fn species_rows_cover_catalog() {
        let k = ConstantsSet::builtin().unwrap();
        let rows = species_rows(&k, WidthChoice::Max).unwrap();
        assert_eq!(rows.len(), 5);
        let e = &rows[0];
        assert!(((e.density_per_m3 - 1.12e39) / 1.12e39).abs() < 0.01);
        let csv = species_csv(&rows).unwrap();
        assert!(csv.starts_with("species,kind,lifetime_s,"));
    }
}
