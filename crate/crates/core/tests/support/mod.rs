//! Independent oracles for the integration suites. Nothing here calls into
//! the library's numerics.
#![allow(dead_code)]

use num_bigint::BigInt;

/// Decimal digits carried by the fixed-point big-integer arithmetic.
pub const DIGITS: u32 = 60;

fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

/// arctan(1/x) · 10^DIGITS by its Taylor series.
fn arctan_inv(x: u32) -> BigInt {
    let one = scale();
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = BigInt::from(0);
    let mut k = 0u32;
    while power != BigInt::from(0) {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// π · 10^DIGITS (Machin).
pub fn pi_scaled() -> BigInt {
    arctan_inv(5) * 16 - arctan_inv(239) * 4
}

/// √(v / 10^DIGITS) · 10^DIGITS.
fn sqrt_scaled(v: &BigInt) -> BigInt {
    (v * scale()).sqrt()
}

fn to_f64(v: &BigInt) -> f64 {
    let s = v.to_string();
    let d = DIGITS as usize;
    let (int, frac) = if s.len() > d {
        s.split_at(s.len() - d)
    } else {
        return format!("0.{:0>d$}", s).parse().unwrap();
    };
    format!("{int}.{frac}").parse().unwrap()
}

pub fn pi() -> f64 {
    to_f64(&pi_scaled())
}

/// 8²·√(3π/2).
pub fn inv_alpha_model() -> f64 {
    let three_pi_half = pi_scaled() * 3 / 2;
    to_f64(&(sqrt_scaled(&three_pi_half) * 64))
}

/// (16π³/9)·(120/π)^(1/4).
pub fn wyler() -> f64 {
    let pi = pi_scaled();
    let one = scale();
    let pi3 = &pi * &pi / &one * &pi / &one;
    let ratio = BigInt::from(120) * &one * &one / &pi;
    let fourth_root = sqrt_scaled(&sqrt_scaled(&ratio));
    to_f64(&(pi3 * 16 / 9 * fourth_root / one))
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
