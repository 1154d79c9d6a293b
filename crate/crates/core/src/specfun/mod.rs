//! Special functions needed by the bound-state and scattering formulas:
//! complex Γ, Gauss ₂F₁, K and H± of imaginary order.
//!
//! Everything here is a pure function of its arguments.

pub mod bessel;
pub mod gamma;
pub mod hyp2f1;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use bessel::{
    bessel_i, bessel_j, bessel_k, bessel_k_imag, bessel_k_imag_deriv, hankel, hankel_deriv, hankel_imag,
    hankel_imag_deriv, HankelKind, SERIES_CROSSOVER,
};
pub use gamma::{gamma_complex, gamma_imag, ln_gamma, GammaImag};
pub use hyp2f1::{hyp2f1, hyp2f1_deriv};

pub type ComplexValue = Complex64;

/// sin(πz) with the real part reduced first, so integer real parts give an
/// exactly zero real component.
pub(crate) fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = z.re - n;
    let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (s, c) = if r == 0.0 { (0.0, 1.0) } else { (PI * r).sin_cos() };
    let y = PI * z.im;
    sign * Complex64::new(s * y.cosh(), c * y.sinh())
}
