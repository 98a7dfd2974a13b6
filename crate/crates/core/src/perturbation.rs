//! First-order time-dependent perturbation theory for the two-level
//! (ground / first excited) truncation of a fluctuation oscillator.
//!
//! Time is measured in units of 1/ω⁰ (τ = ω⁰t) and the coupling is the
//! dimensionless λ = q𝔼₀⟨x⟩₁,₀/(ħω⁰). The field 𝔼₀ is the value frozen at the
//! instant of absorption, so nothing here depends on the photon frequency.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode;
use crate::oscillator::{matrix_element_x_analytic, OscillatorSpec};
use crate::quantity::{Dimension, Quantity};

/// Above this |λ| second-order terms exceed ~1% of first-order ones.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;
pub const DEFAULT_ODE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingLambda(f64);

impl CouplingLambda {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(CouplingLambda(value))
        } else {
            Err(Error::InvalidArgument(format!(
                "coupling must be finite, got {value}"
            )))
        }
    }

    /// λ = q𝔼₀⟨x⟩₁,₀/(ħω⁰).
    pub fn from_physical(
        o: &OscillatorSpec,
        charge: &Quantity,
        field_e0: &Quantity,
        hbar: &Quantity,
    ) -> Result<Self> {
        charge.expect_dim(Dimension::CHARGE, "charge")?;
        field_e0.expect_dim(Dimension::ELECTRIC_FIELD, "electric field")?;
        let x10 = matrix_element_x_analytic(o, hbar)?;
        let lam = charge
            .mul(field_e0)?
            .mul(&x10)?
            .div(&hbar.mul(&o.omega0())?)?
            .value_as(Dimension::DIMENSIONLESS, "coupling")?;
        Self::new(lam)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn within_first_order(self) -> bool {
        self.0.abs() < FIRST_ORDER_LIMIT
    }
}

/// Which antiderivative of da₁/dτ = iλe^(iτ) to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// a₁ = λe^(iτ), the particular solution with no transient.
    #[default]
    Particular,
    /// a₁ = λ(e^(iτ) − 1), which satisfies a₁(0) = 0.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub a0: Complex64,
    pub a1: Complex64,
    pub tau: f64,
}

impl AmplitudePair {
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }
}

/// First-order amplitudes; a₀ stays 1 since its correction is O(λ²).
pub fn amplitudes_analytic(tau: f64, lam: CouplingLambda, branch: Branch) -> AmplitudePair {
    let phase = Complex64::from_polar(1.0, tau);
    let a1 = match branch {
        Branch::Particular => phase * lam.0,
        Branch::Literal => (phase - 1.0) * lam.0,
    };
    AmplitudePair {
        a0: Complex64::new(1.0, 0.0),
        a1,
        tau,
    }
}

/// Integrates da₀/dτ = iλa₁e^(−iτ), da₁/dτ = iλa₀e^(iτ) from (1, 0).
///
/// Unlike the analytic branches this keeps the back-reaction on a₀, so the
/// exact two-level evolution is unitary.
pub fn amplitudes_ode(tau_end: f64, lam: CouplingLambda, tol: f64) -> Result<AmplitudePair> {
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(Error::InvalidArgument(format!(
            "ODE tolerance {tol:e} outside [1e-12, 1e-6]"
        )));
    }
    if !tau_end.is_finite() {
        return Err(Error::InvalidArgument("tau must be finite".into()));
    }
    let i_lam = Complex64::new(0.0, lam.0);
    let rhs = move |tau: f64, a: &[Complex64; 2]| {
        let phase = Complex64::from_polar(1.0, tau);
        [i_lam * a[1] * phase.conj(), i_lam * a[0] * phase]
    };
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let sol = ode::integrate(rhs, 0.0, y0, tau_end, tol)?;
    Ok(AmplitudePair {
        a0: sol.y[0],
        a1: sol.y[1],
        tau: tau_end,
    })
}

pub const SCALING_GRID_MIN: f64 = 1e-4;
pub const SCALING_GRID_MAX: f64 = 1e-2;

/// Least-squares slope of log|a₀(τ) − 1| against log λ, with a₀ from the ODE.
pub fn scaling_exponent(grid: &[f64], tau: f64) -> Result<f64> {
    if grid.len() < 4 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 4 points, got {}",
            grid.len()
        )));
    }
    if let Some(bad) = grid
        .iter()
        .find(|l| !(SCALING_GRID_MIN..=SCALING_GRID_MAX).contains(*l))
    {
        return Err(Error::DegenerateGrid(format!(
            "lambda {bad:e} outside [{SCALING_GRID_MIN:e}, {SCALING_GRID_MAX:e}]"
        )));
    }
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    for &l in grid {
        let a = amplitudes_ode(tau, CouplingLambda::new(l)?, 1e-12)?;
        let dev = (a.a0 - 1.0).norm();
        if dev == 0.0 {
            return Err(Error::DegenerateGrid(format!(
                "no a0 deviation at lambda {l:e}"
            )));
        }
        xs.push(l.ln());
        ys.push(dev.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 {
        return Err(Error::DegenerateGrid("all lambda values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Dipole ⟨p⟩(τ) = 2q⟨x⟩₁,₀·Re[a₁(τ)e^(−iτ)] at each sample.
pub fn dipole_trajectory(
    o: &OscillatorSpec,
    charge: &Quantity,
    field_e0: &Quantity,
    hbar: &Quantity,
    branch: Branch,
    taus: &[f64],
) -> Result<Vec<(f64, Quantity)>> {
    let lam = CouplingLambda::from_physical(o, charge, field_e0, hbar)?;
    let scale = charge
        .mul(&matrix_element_x_analytic(o, hbar)?)?
        .scale(2.0)?;
    taus.iter()
        .map(|&tau| {
            if !tau.is_finite() {
                return Err(Error::InvalidArgument("tau samples must be finite".into()));
            }
            let a = amplitudes_analytic(tau, lam, branch);
            let projected = (a.a1 * Complex64::from_polar(1.0, -tau)).re;
            Ok((tau, scale.scale(projected)?))
        })
        .collect()
}

/// Mean dipole over `periods` full periods, by the trapezoid rule on
/// `samples_per_period` equally spaced points (exact for trigonometric
/// polynomials of low degree).
pub fn mean_dipole(
    o: &OscillatorSpec,
    charge: &Quantity,
    field_e0: &Quantity,
    hbar: &Quantity,
    branch: Branch,
    periods: usize,
    samples_per_period: usize,
) -> Result<Quantity> {
    if periods == 0 || samples_per_period < 3 {
        return Err(Error::InvalidArgument(
            "need at least one period and three samples".into(),
        ));
    }
    let n = periods * samples_per_period;
    let step = 2.0 * PI / samples_per_period as f64;
    let taus: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let traj = dipole_trajectory(o, charge, field_e0, hbar, branch, &taus)?;
    let sum: f64 = traj.iter().map(|(_, p)| p.value()).sum();
    Quantity::new(sum / n as f64, Dimension::DIPOLE_MOMENT)
}
