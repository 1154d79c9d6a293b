//! Complex gamma function and the continuous-branch argument of Γ(iη).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{sin_pi, ComplexValue};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// B_{2k} / (2k (2k-1)) for k = 1..8.
const STIRLING_COEF: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    SQRT_2PI * ((z + 0.5) * t.ln() - t).exp() * series
}

/// Γ(z) for complex `z`, Lanczos approximation with reflection for Re z < 1/2.
pub fn gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("gamma_complex", format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::GammaPole(z.re));
    }
    let value = if z.re < 0.5 {
        PI / (sin_pi(z) * lanczos(Complex64::new(1.0, 0.0) - z))
    } else {
        lanczos(z)
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain("gamma_complex", format!("overflow at {z}")))
    }
}

/// ln Γ(z) on the branch continuous throughout Re z > 0.
///
/// Shifts the argument up to |z| >= 15 and applies the Stirling series; each
/// shift term is a principal logarithm of a right-half-plane number, so the
/// imaginary part never folds.
pub fn ln_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::domain("ln_gamma", format!("requires Re z > 0, got {z}")));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEF {
        tail += c * pow;
        pow *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_2PI + tail - shift)
}

/// ln sinh(a) for a > 0 without overflow.
pub(crate) fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
    } else {
        a.sinh().ln()
    }
}

/// Modulus and argument of Γ(iη).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaImag {
    pub eta: f64,
    pub modulus: f64,
    /// Continuous branch, tending to -π/2 as η → 0⁺.
    pub argument: f64,
    /// Number of 2π turns separating `argument` from its principal value.
    pub winding: i32,
}

impl GammaImag {
    /// Principal value of arg Γ(iη), in (-π, π].
    pub fn wrapped(&self) -> f64 {
        self.argument - TAU * f64::from(self.winding)
    }
}

/// Reduce an angle into (-π, π], returning the reduced value and the winding.
pub(crate) fn wrap_angle(theta: f64) -> (f64, i32) {
    let mut winding = (theta / TAU).round() as i32;
    let mut reduced = theta - TAU * f64::from(winding);
    if reduced <= -PI {
        reduced += TAU;
        winding -= 1;
    } else if reduced > PI {
        reduced -= TAU;
        winding += 1;
    }
    (reduced, winding)
}

pub fn gamma_imag(eta: f64) -> Result<GammaImag> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::domain("gamma_imag", format!("eta must be > 0, got {eta}")));
    }
    let modulus = (0.5 * (PI.ln() - eta.ln() - ln_sinh(eta * PI))).exp();
    let argument = ln_gamma(Complex64::new(1.0, eta))?.im - FRAC_PI_2;
    let (_, winding) = wrap_angle(argument);
    Ok(GammaImag {
        eta,
        modulus,
        argument,
        winding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn integer_values() {
        assert!((gamma_complex(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((gamma_complex(c(5.0, 0.0)).unwrap() - 24.0).norm() < 24.0 * 1e-14);
        let mut fact = 1.0;
        for n in 1..15 {
            let g = gamma_complex(c(n as f64, 0.0)).unwrap();
            assert!((g.re - fact).abs() < fact * 1e-13, "n = {n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn poles_are_rejected() {
        for z in [0.0, -1.0, -7.0] {
            assert_eq!(gamma_complex(c(z, 0.0)), Err(Error::GammaPole(z)));
        }
        assert!(gamma_complex(c(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn modulus_at_i() {
        // |Γ(i)|² = π / sinh π
        let expected = (PI / PI.sinh()).sqrt();
        let g = gamma_complex(c(0.0, 1.0)).unwrap();
        assert!((g.norm() - expected).abs() < 1e-14);
        assert!((expected - 0.521_564_5).abs() < 1e-6);
    }

    #[test]
    fn ln_gamma_agrees_with_lanczos() {
        for &(re, im) in &[(0.7, 0.0), (1.0, 1.0), (2.5, -3.0), (0.1, 4.0), (12.0, 0.5)] {
            let z = c(re, im);
            let lg = ln_gamma(z).unwrap().exp();
            let g = gamma_complex(z).unwrap();
            assert!((lg - g).norm() < 1e-13 * g.norm(), "z = {z}");
        }
    }

    #[test]
    fn gamma_imag_at_one() {
        let g = gamma_imag(1.0).unwrap();
        assert!((g.modulus - 0.521_564_5).abs() < 1e-6);
        // principal argument from the Lanczos route
        let direct = gamma_complex(c(0.0, 1.0)).unwrap().arg();
        assert!((g.wrapped() - direct).abs() < 1e-13);
        assert_eq!(g.winding, 0);
    }

    #[test]
    fn reflection_identity() {
        for eta in [0.5, 1.0, 2.0] {
            let g = gamma_imag(eta).unwrap();
            let lhs = g.modulus * g.modulus * eta * (eta * PI).sinh();
            assert!((lhs - PI).abs() < 1e-12 * PI);
        }
    }

    #[test]
    fn argument_is_continuous_and_winds() {
        let mut prev = gamma_imag(0.01).unwrap();
        assert!((prev.argument + FRAC_PI_2).abs() < 0.01);
        let mut wraps = 0;
        for i in 1..4000 {
            let eta = 0.01 + i as f64 * 0.002;
            let g = gamma_imag(eta).unwrap();
            assert!((g.argument - prev.argument).abs() < 0.02);
            let direct = gamma_complex(c(0.0, eta)).unwrap().arg();
            assert!((g.wrapped() - direct).abs() < 1e-9, "eta = {eta}");
            if g.winding != prev.winding {
                wraps += 1;
            }
            prev = g;
        }
        // arg Γ(iη) first passes π near η ≈ 5.5
        assert!(wraps >= 1);
    }

    #[test]
    fn domain_errors() {
        assert!(gamma_imag(0.0).is_err());
        assert!(gamma_imag(-1.0).is_err());
        assert!(ln_gamma(c(-0.5, 1.0)).is_err());
    }
}
