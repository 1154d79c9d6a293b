//! Bessel functions of complex order and real positive argument.
//!
//! For x <= [`SERIES_CROSSOVER`] everything is built from the ascending
//! series of J_ν and I_ν; beyond it the Hankel-type asymptotic expansions
//! are summed up to their smallest term. The order only ever enters as
//! iη or iη ± 1 here, so sin(νπ) stays away from zero.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gamma::gamma_complex, sin_pi, ComplexValue};
use crate::error::{Error, Result};

/// Argument above which the asymptotic expansions replace the series.
pub const SERIES_CROSSOVER: f64 = 10.0;

const MIN_ETA: f64 = 1e-8;
const MAX_SERIES_TERMS: usize = 400;
const MAX_ASYMPTOTIC_TERMS: usize = 200;
const CANCELLATION_TOL: f64 = 1e-12;

/// Which Hankel function: H⁺ = J + iY or H⁻ = J − iY.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HankelKind {
    Plus,
    Minus,
}

impl HankelKind {
    fn sign(self) -> f64 {
        match self {
            HankelKind::Plus => 1.0,
            HankelKind::Minus => -1.0,
        }
    }
}

fn check_argument(func: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("argument must be > 0, got {x}")))
    }
}

fn check_eta(func: &'static str, eta: f64) -> Result<()> {
    if eta > MIN_ETA && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("order eta must exceed {MIN_ETA}, got {eta}")))
    }
}

/// (x/2)^ν Σ_m (s x²/4)^m / (m! Γ(m+ν+1)); s = +1 gives I_ν, s = −1 gives J_ν.
fn ascending_series(nu: Complex64, x: f64, sign: f64) -> Result<Complex64> {
    let q = sign * 0.25 * x * x;
    let mut term = gamma_complex(nu + 1.0)?.inv();
    let mut sum = term;
    let peak = q.abs().sqrt();
    for m in 1..MAX_SERIES_TERMS {
        let mf = m as f64;
        term *= q / (mf * (nu + mf));
        sum += term;
        if mf > peak && term.norm() <= 1e-17 * sum.norm() {
            return Ok(sum * (nu * (0.5 * x).ln()).exp());
        }
    }
    Err(Error::convergence("bessel series", format!("order {nu}, x = {x}")))
}

pub fn bessel_i(nu: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_argument("bessel_i", x)?;
    ascending_series(nu, x, 1.0)
}

pub fn bessel_j(nu: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_argument("bessel_j", x)?;
    ascending_series(nu, x, -1.0)
}

/// Sum of the asymptotic series Σ (phase)^k a_k(ν) / x^k, truncated at its
/// smallest term.
fn asymptotic_sum(nu: Complex64, x: f64, phase: Complex64) -> Complex64 {
    let mu4 = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..MAX_ASYMPTOTIC_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu4 - odd * odd) / (k as f64 * 8.0 * x) * phase;
        let size = next.norm();
        if size >= prev {
            break;
        }
        term = next;
        sum += term;
        if size <= 1e-17 * sum.norm() {
            break;
        }
        prev = size;
    }
    sum
}

/// Returns K_ν(x) together with the magnitude of the two series halves,
/// which bounds the attainable absolute accuracy.
fn bessel_k_with_scale(nu: Complex64, x: f64) -> Result<(Complex64, f64)> {
    if x > SERIES_CROSSOVER {
        let value = (PI / (2.0 * x)).sqrt() * (-x).exp() * asymptotic_sum(nu, x, Complex64::new(1.0, 0.0));
        return Ok((value, value.norm()));
    }
    let s = sin_pi(nu);
    if s.norm() < 1e-300 {
        return Err(Error::domain("bessel_k", format!("integer order {nu} not supported")));
    }
    let plus = ascending_series(nu, x, 1.0)?;
    let minus = ascending_series(-nu, x, 1.0)?;
    let factor = FRAC_PI_2 / s;
    let scale = (factor * plus).norm().max((factor * minus).norm());
    Ok((factor * (minus - plus), scale))
}

/// K_ν(x) for complex order ν.
pub fn bessel_k(nu: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_argument("bessel_k", x)?;
    Ok(bessel_k_with_scale(nu, x)?.0)
}

fn real_part_checked(func: &'static str, value: Complex64, scale: f64) -> Result<f64> {
    if value.im.abs() > CANCELLATION_TOL * value.re.abs().max(f64::EPSILON * scale) {
        return Err(Error::convergence(
            func,
            format!("conjugate halves left imaginary residual {:e} on {:e}", value.im, value.re),
        ));
    }
    Ok(value.re)
}

/// K_{iη}(x), real for real x.
pub fn bessel_k_imag(eta: f64, x: f64) -> Result<f64> {
    check_eta("bessel_k_imag", eta)?;
    check_argument("bessel_k_imag", x)?;
    let (value, scale) = bessel_k_with_scale(Complex64::new(0.0, eta), x)?;
    real_part_checked("bessel_k_imag", value, scale)
}

/// d/dx K_{iη}(x) = −½[K_{1+iη}(x) + K_{−1+iη}(x)].
pub fn bessel_k_imag_deriv(eta: f64, x: f64) -> Result<f64> {
    check_eta("bessel_k_imag_deriv", eta)?;
    check_argument("bessel_k_imag_deriv", x)?;
    let (up, s_up) = bessel_k_with_scale(Complex64::new(1.0, eta), x)?;
    let (down, s_down) = bessel_k_with_scale(Complex64::new(-1.0, eta), x)?;
    real_part_checked("bessel_k_imag_deriv", -0.5 * (up + down), 0.5 * (s_up + s_down))
}

/// H^±_ν(x) for complex order ν.
pub fn hankel(kind: HankelKind, nu: ComplexValue, x: f64) -> Result<ComplexValue> {
    check_argument("hankel", x)?;
    let sign = kind.sign();
    let i = Complex64::new(0.0, 1.0);
    if x > SERIES_CROSSOVER {
        let phase = (sign * i * (x - FRAC_PI_4 - FRAC_PI_2 * nu)).exp();
        return Ok((2.0 / (PI * x)).sqrt() * phase * asymptotic_sum(nu, x, sign * i));
    }
    let s = sin_pi(nu);
    if s.norm() < 1e-300 {
        return Err(Error::domain("hankel", format!("integer order {nu} not supported")));
    }
    let j_pos = ascending_series(nu, x, -1.0)?;
    let j_neg = ascending_series(-nu, x, -1.0)?;
    let rot = (-sign * i * PI * nu).exp();
    Ok(sign * (j_neg - rot * j_pos) / (i * s))
}

/// d/dx H^±_ν(x) = ½[H^±_{ν−1}(x) − H^±_{ν+1}(x)].
pub fn hankel_deriv(kind: HankelKind, nu: ComplexValue, x: f64) -> Result<ComplexValue> {
    Ok(0.5 * (hankel(kind, nu - 1.0, x)? - hankel(kind, nu + 1.0, x)?))
}

/// H^±_{iη}(x).
pub fn hankel_imag(kind: HankelKind, eta: f64, x: f64) -> Result<ComplexValue> {
    check_eta("hankel_imag", eta)?;
    hankel(kind, Complex64::new(0.0, eta), x)
}

pub fn hankel_imag_deriv(kind: HankelKind, eta: f64, x: f64) -> Result<ComplexValue> {
    check_eta("hankel_imag_deriv", eta)?;
    hankel_deriv(kind, Complex64::new(0.0, eta), x)
}
