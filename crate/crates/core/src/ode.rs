//! Adaptive Dormand–Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1. / 5., 3. / 10., 4. / 5., 8. / 9., 1., 1.];

const A: [[f64; 6]; 7] = [
    [0.; 6],
    [1. / 5., 0., 0., 0., 0., 0.],
    [3. / 40., 9. / 40., 0., 0., 0., 0.],
    [44. / 45., -56. / 15., 32. / 9., 0., 0., 0.],
    [
        19372. / 6561.,
        -25360. / 2187.,
        64448. / 6561.,
        -212. / 729.,
        0.,
        0.,
    ],
    [
        9017. / 3168.,
        -355. / 33.,
        46732. / 5247.,
        49. / 176.,
        -5103. / 18656.,
        0.,
    ],
    [
        35. / 384.,
        0.,
        500. / 1113.,
        125. / 192.,
        -2187. / 6784.,
        11. / 84.,
    ],
];

// 5th-order weights equal the last row of A (FSAL).
const B: [f64; 7] = [
    35. / 384.,
    0.,
    500. / 1113.,
    125. / 192.,
    -2187. / 6784.,
    11. / 84.,
    0.,
];
const B_STAR: [f64; 7] = [
    5179. / 57600.,
    0.,
    7571. / 16695.,
    393. / 640.,
    -92097. / 339200.,
    187. / 2100.,
    1. / 40.,
];

const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution<const N: usize> {
    pub t: f64,
    pub y: [Complex64; N],
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(
    y: &[Complex64; N],
    h: f64,
    ks: &[[Complex64; N]],
    coeffs: &[f64],
) -> [Complex64; N] {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coeffs) {
        if a != 0.0 {
            for i in 0..N {
                out[i] += k[i] * (h * a);
            }
        }
    }
    out
}

/// Integrates dy/dt = f(t, y) from `t0` to `t_end`, controlling the mixed
/// absolute/relative local error to `tol`.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[Complex64; N]) -> [Complex64; N],
    t0: f64,
    y0: [Complex64; N],
    t_end: f64,
    tol: f64,
) -> Result<OdeSolution<N>> {
    let span = t_end - t0;
    let mut sol = OdeSolution {
        t: t0,
        y: y0,
        accepted: 0,
        rejected: 0,
    };
    if span == 0.0 {
        return Ok(sol);
    }
    let dir = span.signum();
    let mut h = dir * (span.abs() * 1e-3).min(tol.powf(0.2) * 0.1).max(1e-12);
    let mut k = [[Complex64::new(0.0, 0.0); N]; 7];
    k[0] = f(sol.t, &sol.y);

    for _ in 0..MAX_STEPS {
        let remaining = t_end - sol.t;
        if remaining * dir <= 0.0 {
            return Ok(sol);
        }
        if (h - remaining) * dir > 0.0 {
            h = remaining;
        }
        for s in 1..7 {
            let ys = axpy(&sol.y, h, &k[..s], &A[s][..s]);
            k[s] = f(sol.t + C[s] * h, &ys);
        }
        let y_new = axpy(&sol.y, h, &k[..6], &B[..6]);

        let mut acc = 0.0;
        for i in 0..N {
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                e += k[s][i] * (h * (B[s] - B_STAR[s]));
            }
            let scale_re = tol + tol * sol.y[i].re.abs().max(y_new[i].re.abs());
            let scale_im = tol + tol * sol.y[i].im.abs().max(y_new[i].im.abs());
            acc += (e.re / scale_re).powi(2) + (e.im / scale_im).powi(2);
        }
        let err = (acc / (2 * N) as f64).sqrt();

        if err <= 1.0 {
            sol.t += h;
            sol.y = y_new;
            sol.accepted += 1;
            k[0] = k[6];
            if (t_end - sol.t) * dir <= 0.0 || (t_end - sol.t).abs() <= 1e-15 * t_end.abs() {
                sol.t = t_end;
                return Ok(sol);
            }
        } else {
            sol.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else if err.is_finite() {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        h *= factor;
        if h.abs() <= 1e-14 * sol.t.abs().max(1.0) {
            return Err(Error::StepSizeCollapse {
                step: h.abs(),
                tau: sol.t,
            });
        }
    }
    Err(Error::StepSizeCollapse {
        step: h.abs(),
        tau: sol.t,
    })
}
