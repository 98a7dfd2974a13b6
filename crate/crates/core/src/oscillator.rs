//! One-dimensional quantum harmonic oscillator numerics.
//!
//! Integrals are evaluated in natural units (lengths in √(ħ/μω⁰)) and only
//! rescaled to SI at the end, so nothing underflows at atomic scales.

use std::f64::consts::PI;

pub use crate::species::OscillatorSpec;

use crate::error::{Error, Result};
use crate::quantity::{Dimension, Quantity};

/// Highest eigenfunction index supported.
pub const MAX_LEVEL: usize = 10;

/// Nodes in the primary Gauss–Hermite rule. With n, n′ ≤ 10 the integrand of
/// ⟨x⟩ is e^(−x²) times a polynomial of degree ≤ 21, integrated exactly by
/// any rule with 11 or more nodes.
pub const PRIMARY_NODES: usize = 40;
/// Nodes in the comparison rule used for the error estimate.
pub const CHECK_NODES: usize = 48;
/// Default acceptance threshold for the quadrature error estimate.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

fn check_level(n: usize) -> Result<()> {
    if n > MAX_LEVEL {
        Err(Error::InvalidArgument(format!(
            "oscillator level {n} above truncation bound {MAX_LEVEL}"
        )))
    } else {
        Ok(())
    }
}

/// Normalised Hermite functions without the Gaussian factor:
/// ψ_k(x) = h_k(x)·e^(−x²/2), for k = 0..=n.
fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(PI.powf(-0.25));
    if n >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Normalised, real eigenfunction ψ_n at natural-unit position `x`, with a
/// positive leading coefficient.
pub fn eigenfunction(n: usize, x: f64) -> Result<f64> {
    check_level(n)?;
    Ok(hermite_functions(n, x)[n] * (-0.5 * x * x).exp())
}

/// Gauss–Hermite rule for ∫ e^(−x²) f(x) dx.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "Gauss-Hermite rule needs at least one node".into(),
            ));
        }
        let pim4 = PI.powf(-0.25);
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::InvalidArgument(format!(
                    "Gauss-Hermite node {i} of {n} did not converge"
                )));
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Ok(GaussHermite { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Result of a natural-unit quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// |I(primary) − I(check)| / max(|I|, 1)
    pub error: f64,
}

fn overlap_natural(n_prime: usize, n: usize, power: i32, tol: f64) -> Result<QuadratureEstimate> {
    check_level(n_prime)?;
    check_level(n)?;
    let top = n_prime.max(n);
    let integrand = |x: f64| {
        let h = hermite_functions(top, x);
        h[n_prime] * h[n] * x.powi(power)
    };
    let primary = GaussHermite::new(PRIMARY_NODES)?.integrate(integrand);
    let check = GaussHermite::new(CHECK_NODES)?.integrate(integrand);
    let error = (primary - check).abs() / primary.abs().max(1.0);
    if error.is_nan() || error > tol {
        return Err(Error::QuadratureNotConverged {
            estimate: error,
            tolerance: tol,
        });
    }
    Ok(QuadratureEstimate {
        value: primary,
        error,
    })
}

/// ∫ψ_n′ ψ_n dx in natural units.
pub fn overlap_quadrature(n_prime: usize, n: usize) -> Result<QuadratureEstimate> {
    overlap_natural(n_prime, n, 0, DEFAULT_QUADRATURE_TOL)
}

/// ⟨x⟩_{n′,n} in natural units, failing if the error estimate exceeds `tol`.
pub fn matrix_element_x_natural(n_prime: usize, n: usize, tol: f64) -> Result<QuadratureEstimate> {
    overlap_natural(n_prime, n, 1, tol)
}

/// ⟨x⟩_{n′,n} in metres by quadrature.
pub fn matrix_element_x_quadrature(
    n_prime: usize,
    n: usize,
    o: &OscillatorSpec,
    hbar: &Quantity,
) -> Result<Quantity> {
    let natural = matrix_element_x_natural(n_prime, n, DEFAULT_QUADRATURE_TOL)?;
    o.length_scale(hbar)?.scale(natural.value)
}

/// ⟨x⟩₁,₀ = √(ħ/(2μω⁰)).
pub fn matrix_element_x_analytic(o: &OscillatorSpec, hbar: &Quantity) -> Result<Quantity> {
    o.length_scale(hbar)?.scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Static dipole (q²/μ)𝔼₀/(ω⁰)² of the perturbed ground state.
pub fn dipole_expectation_static(
    o: &OscillatorSpec,
    charge: &Quantity,
    field_e0: &Quantity,
) -> Result<Quantity> {
    charge.expect_dim(Dimension::CHARGE, "charge")?;
    field_e0.expect_dim(Dimension::ELECTRIC_FIELD, "electric field")?;
    charge
        .powi(2)?
        .div(&o.reduced_mass())?
        .mul(field_e0)?
        .div(&o.omega0().powi(2)?)
}

/// The same dipole written as 2q²𝔼₀⟨x⟩₁,₀²/(ħω⁰).
pub fn dipole_expectation_from_matrix_element(
    o: &OscillatorSpec,
    charge: &Quantity,
    field_e0: &Quantity,
    hbar: &Quantity,
) -> Result<Quantity> {
    charge.expect_dim(Dimension::CHARGE, "charge")?;
    field_e0.expect_dim(Dimension::ELECTRIC_FIELD, "electric field")?;
    let x10 = matrix_element_x_analytic(o, hbar)?;
    charge
        .powi(2)?
        .mul(field_e0)?
        .mul(&x10.powi(2)?)?
        .scale(2.0)?
        .div(&hbar.mul(&o.omega0())?)
}

/// A potential energy U(x) (x in metres, U in joules) with the interval in
/// which to look for its minimum. The evaluator must be safe to call from
/// several threads.
pub struct Potential1D {
    evaluator: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    lo: f64,
    hi: f64,
}

impl Potential1D {
    pub fn new(
        evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "bad search interval [{lo}, {hi}]"
            )));
        }
        Ok(Potential1D {
            evaluator: Box::new(evaluator),
            lo,
            hi,
        })
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let u = (self.evaluator)(x);
        if u.is_finite() {
            Ok(u)
        } else {
            Err(Error::NonFinite {
                op: "potential evaluation",
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFit {
    pub x_e: Quantity,
    pub k_spring: Quantity,
    pub u0: Quantity,
}

/// Relative interval width at which the bracketing search stops.
pub const MINIMIZE_TOL: f64 = 1e-10;

/// Brent's parabolic/golden minimisation on [a, b].
fn brent_minimize(p: &Potential1D) -> Result<f64> {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (p.lo, p.hi);
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = p.eval(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = MINIMIZE_TOL * x.abs().max(1.0) + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(x);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut pp = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                pp = -pp;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if pp.abs() < (0.5 * q * etemp).abs() && pp > q * (a - x) && pp < q * (b - x) {
                d = pp / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = p.eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(x)
}

/// Ridders' extrapolation of a step-dependent estimate `g(h)` that is even
/// in h, starting from `h0`. Returns (estimate, error estimate).
fn ridders(g: impl Fn(f64) -> Result<f64>, h0: f64) -> Result<(f64, f64)> {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    const SAFE: f64 = 2.0;
    let mut table = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = g(h)?;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = g(h)?;
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok((best, err))
}

fn largest_step(p: &Potential1D, x: f64) -> f64 {
    let room = (x - p.lo).min(p.hi - x);
    (0.1 * (p.hi - p.lo)).min(0.9 * room)
}

fn first_derivative(p: &Potential1D, x: f64, h0: f64) -> Result<f64> {
    ridders(|h| Ok((p.eval(x + h)? - p.eval(x - h)?) / (2.0 * h)), h0).map(|r| r.0)
}

fn second_difference(p: &Potential1D, x: f64, h: f64) -> Result<f64> {
    Ok((p.eval(x + h)? - 2.0 * p.eval(x)? + p.eval(x - h)?) / (h * h))
}

/// Locates the interior minimum of `p` and fits U ≈ U(x_e) + ½K(x − x_e)².
///
/// The minimum is bracketed with Brent's method, polished by Newton steps on
/// extrapolated central differences, and K is the Ridders-extrapolated
/// central second difference at x_e.
pub fn harmonic_approximation(p: &Potential1D) -> Result<HarmonicFit> {
    let no_min = || Error::NoInteriorMinimum { lo: p.lo, hi: p.hi };
    let mut x = brent_minimize(p)?;
    let width = p.hi - p.lo;
    let edge = 1e-6 * width;
    if x - p.lo <= edge || p.hi - x <= edge {
        return Err(no_min());
    }
    let u_bracket = p.eval(x)?;
    if u_bracket >= p.eval(p.lo)? || u_bracket >= p.eval(p.hi)? {
        return Err(no_min());
    }

    for _ in 0..8 {
        let h0 = largest_step(p, x);
        if h0 <= 0.0 {
            break;
        }
        let (curv, _) = ridders(|h| second_difference(p, x, h), h0)?;
        if curv.is_nan() || curv <= 0.0 {
            break;
        }
        let step = first_derivative(p, x, h0)? / curv;
        let next = x - step;
        if !(next > p.lo + edge && next < p.hi - edge) || p.eval(next)? > p.eval(x)? {
            break;
        }
        let done = step.abs() <= 1e-15 * x.abs().max(1.0);
        x = next;
        if done {
            break;
        }
    }

    let h0 = largest_step(p, x);
    let coarse = second_difference(p, x, h0)?;
    let (k, _) = ridders(|h| second_difference(p, x, h), h0)?;
    if k.is_nan() || k <= 0.0 || k <= 1e-6 * coarse.abs() {
        return Err(Error::DegenerateMinimum {
            x_e: x,
            k_spring: k,
        });
    }
    Ok(HarmonicFit {
        x_e: Quantity::new(x, Dimension::LENGTH)?,
        k_spring: Quantity::new(k, Dimension::SPRING_CONSTANT)?,
        u0: Quantity::new(p.eval(x)?, Dimension::ENERGY)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite trapezoid on [−L, L]; spectrally accurate for the Gaussian
    /// integrands here and independent of the Gauss–Hermite path.
    fn trapezoid(f: impl Fn(f64) -> f64) -> f64 {
        let (l, n) = (14.0, 4000);
        let h = 2.0 * l / n as f64;
        (0..=n)
            .map(|i| {
                let x = -l + i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * f(x)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn ground_state_values() {
        assert!((eigenfunction(0, 0.0).unwrap() - PI.powf(-0.25)).abs() < 1e-16);
        assert!((eigenfunction(0, 0.0).unwrap() - 0.7511).abs() < 1e-4);
        assert_eq!(eigenfunction(1, 0.0).unwrap(), 0.0);
        assert!(eigenfunction(11, 0.0).is_err());
    }

    #[test]
    fn normalisation_by_independent_quadrature() {
        for n in 0..=MAX_LEVEL {
            let norm = trapezoid(|x| eigenfunction(n, x).unwrap().powi(2));
            assert!((norm - 1.0).abs() < 1e-10, "n={n}: {norm}");
        }
    }

    #[test]
    fn positive_leading_coefficient() {
        // far to the right every ψ_n is positive
        for n in 0..=MAX_LEVEL {
            assert!(eigenfunction(n, 8.0).unwrap() > 0.0, "n={n}");
        }
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        let gh = GaussHermite::new(PRIMARY_NODES).unwrap();
        assert_eq!(gh.len(), PRIMARY_NODES);
        assert!((gh.integrate(|_| 1.0) - PI.sqrt()).abs() < 1e-14);
        assert!((gh.integrate(|x| x * x) - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!(gh.integrate(|x| x.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn matrix_elements() {
        let x10 = matrix_element_x_natural(1, 0, DEFAULT_QUADRATURE_TOL).unwrap();
        assert!((x10.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(
            matrix_element_x_natural(0, 0, DEFAULT_QUADRATURE_TOL)
                .unwrap()
                .value
                .abs()
                < 1e-14
        );
        assert!(
            matrix_element_x_natural(2, 0, DEFAULT_QUADRATURE_TOL)
                .unwrap()
                .value
                .abs()
                < 1e-14
        );
        // ⟨x⟩_{n+1,n} = √((n+1)/2)
        for n in 0..MAX_LEVEL {
            let v = matrix_element_x_natural(n + 1, n, DEFAULT_QUADRATURE_TOL)
                .unwrap()
                .value;
            assert!((v - ((n as f64 + 1.0) / 2.0).sqrt()).abs() < 1e-12);
        }
        let independent =
            trapezoid(|x| eigenfunction(2, x).unwrap() * x * eigenfunction(3, x).unwrap());
        let gh = matrix_element_x_natural(2, 3, DEFAULT_QUADRATURE_TOL)
            .unwrap()
            .value;
        assert!((independent - gh).abs() < 1e-10);
    }

    #[test]
    fn unattainable_tolerance_is_reported() {
        assert!(matches!(
            matrix_element_x_natural(1, 0, 1e-20),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }

    #[test]
    fn analytic_matrix_element_natural_units() {
        let one = |d| Quantity::new(1.0, d).unwrap();
        let o = OscillatorSpec::new(one(Dimension::MASS), one(Dimension::FREQUENCY)).unwrap();
        let x = matrix_element_x_analytic(&o, &one(Dimension::ACTION)).unwrap();
        assert!((x.value() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(x.dim(), Dimension::LENGTH);

        let o4 = OscillatorSpec::new(
            Quantity::new(4.0, Dimension::MASS).unwrap(),
            one(Dimension::FREQUENCY),
        )
        .unwrap();
        let x4 = matrix_element_x_analytic(&o4, &one(Dimension::ACTION)).unwrap();
        assert!((x4.value() - x.value() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn quadratic_potential_fit() {
        let p = Potential1D::new(|x| 0.5 * 5.0 * x * x, -2.0, 3.0).unwrap();
        let fit = harmonic_approximation(&p).unwrap();
        assert!(fit.x_e.value().abs() < 1e-10);
        assert!((fit.k_spring.value() - 5.0).abs() < 1e-8);
        assert!(fit.u0.value().abs() < 1e-18);
    }

    #[test]
    fn morse_potential_fit() {
        // K = 2 D a² at the minimum
        let (d, a) = (2.0, 3.0);
        let p =
            Potential1D::new(move |x: f64| d * (1.0 - (-a * x).exp()).powi(2), -0.5, 2.0).unwrap();
        let fit = harmonic_approximation(&p).unwrap();
        assert!(fit.x_e.value().abs() < 1e-9, "{}", fit.x_e.value());
        assert!(
            (fit.k_spring.value() - 36.0).abs() / 36.0 < 1e-6,
            "{}",
            fit.k_spring.value()
        );
    }

    #[test]
    fn quartic_minimum_is_degenerate() {
        let p = Potential1D::new(|x: f64| x.powi(4), -1.0, 1.0).unwrap();
        assert!(matches!(
            harmonic_approximation(&p),
            Err(Error::DegenerateMinimum { .. })
        ));
    }

    #[test]
    fn monotone_potential_has_no_interior_minimum() {
        let p = Potential1D::new(|x| x, 0.0, 1.0).unwrap();
        assert!(matches!(
            harmonic_approximation(&p),
            Err(Error::NoInteriorMinimum { .. })
        ));
    }

    #[test]
    fn dipole_forms_agree() {
        let hbar = Quantity::new(1.054571817e-34, Dimension::ACTION).unwrap();
        let o = OscillatorSpec::new(
            Quantity::new(4.55e-31, Dimension::MASS).unwrap(),
            Quantity::new(1.03e16, Dimension::FREQUENCY).unwrap(),
        )
        .unwrap();
        let q = Quantity::new(1.602176634e-19, Dimension::CHARGE).unwrap();
        let field = Quantity::new(1.0, Dimension::ELECTRIC_FIELD).unwrap();
        let a = dipole_expectation_static(&o, &q, &field).unwrap();
        let b = dipole_expectation_from_matrix_element(&o, &q, &field, &hbar).unwrap();
        assert_eq!(a.dim(), Dimension::DIPOLE_MOMENT);
        assert!(((a.value() - b.value()) / a.value()).abs() < 1e-12);

        let zero = Quantity::new(0.0, Dimension::ELECTRIC_FIELD).unwrap();
        assert_eq!(
            dipole_expectation_static(&o, &q, &zero).unwrap().value(),
            0.0
        );
    }
}
