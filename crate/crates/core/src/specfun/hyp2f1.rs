//! Gauss hypergeometric function by direct power series.

use num_complex::Complex64;

use super::ComplexValue;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 100_000;
const TERM_TOL: f64 = 1e-16;

fn is_nonpositive_integer(c: Complex64) -> bool {
    c.im == 0.0 && c.re <= 0.0 && c.re == c.re.round()
}

/// ₂F₁(a, b; c; z) for |z| < 1.
///
/// Summation stops once three consecutive terms fall below 1e-16 of the
/// partial sum.
pub fn hyp2f1(a: ComplexValue, b: ComplexValue, c: ComplexValue, z: ComplexValue) -> Result<ComplexValue> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!("hyp2f1: c = {c} is a nonpositive integer")));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::convergence("hyp2f1", format!("|z| = {} outside the unit disk", z.norm())));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() <= TERM_TOL * sum.norm() {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::convergence("hyp2f1", format!("no convergence in {MAX_TERMS} terms at z = {z}")))
}

/// d/dz ₂F₁(a, b; c; z) = (ab/c) ₂F₁(a+1, b+1; c+1; z).
pub fn hyp2f1_deriv(a: ComplexValue, b: ComplexValue, c: ComplexValue, z: ComplexValue) -> Result<ComplexValue> {
    if is_nonpositive_integer(c) {
        return Err(Error::Parameter(format!("hyp2f1_deriv: c = {c} is a nonpositive integer")));
    }
    let factor = a * b / c;
    if factor == Complex64::new(0.0, 0.0) {
        return Ok(factor);
    }
    Ok(factor * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z)?)
}
