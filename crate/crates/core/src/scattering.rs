//! Continuum states: closed-form and exact phase shifts, the amplitude of
//! the inner solution, the assembled scattering wavefunction and the S-matrix.
//!
//! The outer solution is √(kx)[B₊H⁺_{iη}(kx) + B₋H⁻_{iη}(kx)] with
//! B± = √(π/2) e^{∓πη/2} e^{±i(δ+π/4)}, which tends to 2cos(kx + δ).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundstates::{epsilon, inner_offset, inner_wavefunction, outer_phase, InnerSolution, PhaseModel, KX0_GUARD};
use crate::error::{Error, Result};
use crate::potential::{DerivedParams, PotentialParams};
use crate::specfun::{hankel_imag, hankel_imag_deriv, HankelKind};

/// |1 + (η/s) tan θ| below which a phase shift is flagged as a pole.
pub const POLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    pub energy: f64,
    pub k: f64,
    /// Principal value, δ + π/4 ∈ (−π/2, π/2].
    pub delta: f64,
    /// Number of closed-form poles below this energy on the continuous θ branch.
    pub branch: i64,
    pub pole: bool,
    /// 1 + (η/s) tan θ
    pub denominator: f64,
    /// η ln(kx₀/2) − arg Γ(iη)
    pub theta: f64,
}

fn wavenumber(energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Parameter(format!("scattering energy must be > 0, got {energy}")));
    }
    Ok((2.0 * energy).sqrt())
}

fn check_kx0(k: f64, x0: f64) -> Result<()> {
    if k * x0 < KX0_GUARD {
        Ok(())
    } else {
        Err(Error::Guard(format!(
            "k·x0 = {} ≥ {KX0_GUARD}; the closed-form phase shift assumes k·x0 ≪ 1",
            k * x0
        )))
    }
}

/// Closed-form phase shift:
/// tan(δ + π/4) = tanh(πη/2) (η cos θ − s sin θ)/(s cos θ + η sin θ).
pub fn phase_shift(p: &PotentialParams, d: &DerivedParams, energy: f64, model: PhaseModel) -> Result<PhaseShift> {
    let s = inner_offset(p, d, model)?;
    phase_shift_with_offset(p, d, energy, s)
}

pub(crate) fn phase_shift_with_offset(p: &PotentialParams, d: &DerivedParams, energy: f64, s: f64) -> Result<PhaseShift> {
    let k = wavenumber(energy)?;
    check_kx0(k, p.x0)?;
    let eta = d.eta;
    let theta = outer_phase(p, d, k);
    let (sin, cos) = theta.sin_cos();
    let num = (0.5 * PI * eta).tanh() * (eta * cos - s * sin);
    let den = s * cos + eta * sin;
    let denominator = den / (s * cos);
    let pole = denominator.abs() < POLE_TOL;
    let delta = if pole { FRAC_PI_4 } else { (num / den).atan() - FRAC_PI_4 };
    let branch = ((theta + (s / eta).atan()) / PI).floor() as i64;
    Ok(PhaseShift {
        energy,
        k,
        delta,
        branch,
        pole,
        denominator,
        theta,
    })
}

/// e^{−πη/2}√(kx)H⁺_{iη}(kx) and its x-derivative.
fn outgoing(eta: f64, k: f64, x: f64) -> Result<(Complex64, Complex64)> {
    let z = k * x;
    let damp = (-0.5 * PI * eta).exp();
    let h = hankel_imag(HankelKind::Plus, eta, z)?;
    let dh = hankel_imag_deriv(HankelKind::Plus, eta, z)?;
    let r = z.sqrt();
    Ok((damp * r * h, damp * k * (0.5 * h / r + r * dh)))
}

/// Phase shift from exact matching of the inner solution to the Hankel
/// combination at x₀; principal value as in [`PhaseShift::delta`].
pub fn phase_shift_exact(p: &PotentialParams, d: &DerivedParams, energy: f64) -> Result<f64> {
    let k = wavenumber(energy)?;
    let (u, du) = inner_wavefunction(p, d, energy)?.eval(p.x0)?;
    let (g, dg) = outgoing(d.eta, k, p.x0)?;
    let num = u * dg.re - du * g.re;
    let den = u * dg.im - du * g.im;
    let phi = if den == 0.0 { FRAC_PI_2 } else { (num / den).atan() };
    Ok(phi - FRAC_PI_4)
}

/// Normalization C = √(π/2)/(η |Γ(iη)| sinh ηπ) of the small-x outer form.
fn small_x_prefactor(d: &DerivedParams) -> f64 {
    (0.5 * PI).sqrt() / (d.eta * d.gamma_imag.modulus * (d.eta * PI).sinh())
}

/// Closed-form amplitude of the inner solution:
/// A = √(kx₀)·2C·[e^{πη/2} sin(θ+δ+π/4) − e^{−πη/2} sin(θ−δ−π/4)]/ψ_in(x₀).
pub fn scattering_amplitude(p: &PotentialParams, d: &DerivedParams, energy: f64, delta: f64) -> Result<f64> {
    let k = wavenumber(energy)?;
    check_kx0(k, p.x0)?;
    let theta = outer_phase(p, d, k);
    let phi = delta + FRAC_PI_4;
    let a = 0.5 * PI * d.eta;
    let u = a.exp() * (theta + phi).sin() - (-a).exp() * (theta - phi).sin();
    let inner = inner_wavefunction(p, d, energy)?.value(p.x0)?;
    Ok((k * p.x0).sqrt() * 2.0 * small_x_prefactor(d) * u / inner)
}

/// B± = √(π/2) e^{∓πη/2} e^{±i(δ+π/4)}.
pub fn outer_coefficients(eta: f64, delta: f64) -> (Complex64, Complex64) {
    let m = (0.5 * PI).sqrt();
    let phi = delta + FRAC_PI_4;
    (
        Complex64::from_polar(m * (-0.5 * PI * eta).exp(), phi),
        Complex64::from_polar(m * (0.5 * PI * eta).exp(), -phi),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringState {
    pub energy: f64,
    pub k: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub amp_a: f64,
    pub coeff_bplus: Complex64,
    pub coeff_bminus: Complex64,
    pub pole: bool,
}

/// Closed-form state at one energy.
pub fn scattering_state(p: &PotentialParams, d: &DerivedParams, energy: f64, model: PhaseModel) -> Result<ScatteringState> {
    let ps = phase_shift(p, d, energy, model)?;
    let (bp, bm) = outer_coefficients(d.eta, ps.delta);
    Ok(ScatteringState {
        energy,
        k: ps.k,
        epsilon: epsilon(energy, p.lambda),
        delta: ps.delta,
        amp_a: scattering_amplitude(p, d, energy, ps.delta)?,
        coeff_bplus: bp,
        coeff_bminus: bm,
        pole: ps.pole,
    })
}

/// Assembled scattering solution with δ and A from exact matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringWavefunction {
    pub inner: InnerSolution,
    pub eta: f64,
    pub k: f64,
    pub x0: f64,
    pub delta: f64,
    pub amp_a: f64,
    pub coeff_bplus: Complex64,
    pub coeff_bminus: Complex64,
}

impl ScatteringWavefunction {
    /// Outer combination √(kx)(B₊H⁺ + B₋H⁻) as a complex number.
    pub fn outer_complex(&self, x: f64) -> Result<Complex64> {
        let z = self.k * x;
        let hp = hankel_imag(HankelKind::Plus, self.eta, z)?;
        let hm = hankel_imag(HankelKind::Minus, self.eta, z)?;
        Ok(z.sqrt() * (self.coeff_bplus * hp + self.coeff_bminus * hm))
    }

    /// |Im ψ|/|ψ| of the outer combination.
    pub fn imaginary_residual(&self, x: f64) -> Result<f64> {
        let v = self.outer_complex(x)?;
        Ok(v.im.abs() / v.norm())
    }

    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        if x < self.x0 {
            let (u, du) = self.inner.eval(x)?;
            return Ok((self.amp_a * u, self.amp_a * du));
        }
        let (g, dg) = outgoing(self.eta, self.k, x)?;
        let b = (0.5 * PI).sqrt() * Complex64::from_polar(1.0, self.delta + FRAC_PI_4);
        Ok((2.0 * (b * g).re, 2.0 * (b * dg).re))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.0)
    }
}

pub fn scattering_wavefunction(p: &PotentialParams, d: &DerivedParams, energy: f64) -> Result<ScatteringWavefunction> {
    let k = wavenumber(energy)?;
    let delta = phase_shift_exact(p, d, energy)?;
    let inner = inner_wavefunction(p, d, energy)?;
    let (bp, bm) = outer_coefficients(d.eta, delta);
    let mut wf = ScatteringWavefunction {
        inner,
        eta: d.eta,
        k,
        x0: p.x0,
        delta,
        amp_a: 1.0,
        coeff_bplus: bp,
        coeff_bminus: bm,
    };
    let outer = {
        let (g, _) = outgoing(d.eta, k, p.x0)?;
        let b = (0.5 * PI).sqrt() * Complex64::from_polar(1.0, delta + FRAC_PI_4);
        2.0 * (b * g).re
    };
    wf.amp_a = outer / inner.value(p.x0)?;
    Ok(wf)
}

/// e^{2iδ}
pub fn smatrix(delta: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub energy: f64,
    pub k: f64,
    pub delta_principal: f64,
    pub delta_unwrapped: f64,
    pub branch: i64,
    pub pole: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweep {
    pub samples: Vec<PhaseSample>,
    /// Unwrapped δ(E_max) − δ(E_min).
    pub net_change: f64,
    /// Closed-form poles between the end points.
    pub poles_crossed: i64,
}

/// `steps` log-spaced energies on [e_min, e_max].
pub fn log_energies(e_min: f64, e_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(e_min > 0.0 && e_max > e_min) || steps < 2 {
        return Err(Error::Parameter(format!(
            "need 0 < e-min < e-max and at least 2 steps (got [{e_min}, {e_max}], {steps})"
        )));
    }
    let (a, b) = (e_min.ln(), e_max.ln());
    Ok((0..steps)
        .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
        .collect())
}

const UNWRAP_DEPTH: u32 = 16;

/// Unwrapped value at `e_b` continuing from `prev` at `e_a`, bisecting in
/// ln E whenever the step is too large to decide the branch.
fn unwrap_towards(
    eval: &dyn Fn(f64) -> Result<f64>,
    e_a: f64,
    prev: f64,
    e_b: f64,
    principal_b: f64,
    depth: u32,
) -> Result<f64> {
    let m = ((principal_b - prev) / PI).round();
    let candidate = principal_b - m * PI;
    if (candidate - prev).abs() <= FRAC_PI_4 || depth == 0 {
        return Ok(candidate);
    }
    let e_mid = (e_a * e_b).sqrt();
    let mid = unwrap_towards(eval, e_a, prev, e_mid, eval(e_mid)?, depth - 1)?;
    unwrap_towards(eval, e_mid, mid, e_b, principal_b, depth - 1)
}

/// Closed-form δ over the given energies with branch unwrapping.
pub fn phase_sweep(p: &PotentialParams, d: &DerivedParams, energies: &[f64], model: PhaseModel) -> Result<PhaseSweep> {
    let s = inner_offset(p, d, model)?;
    let shifts: Vec<PhaseShift> = energies
        .par_iter()
        .map(|&e| phase_shift_with_offset(p, d, e, s))
        .collect::<Result<_>>()?;
    let eval = |e: f64| phase_shift_with_offset(p, d, e, s).map(|ps| ps.delta);
    let mut samples: Vec<PhaseSample> = Vec::with_capacity(shifts.len());
    for (i, ps) in shifts.iter().enumerate() {
        let unwrapped = if i == 0 {
            ps.delta
        } else {
            let prev = &samples[i - 1];
            unwrap_towards(&eval, prev.energy, prev.delta_unwrapped, ps.energy, ps.delta, UNWRAP_DEPTH)?
        };
        samples.push(PhaseSample {
            energy: ps.energy,
            k: ps.k,
            delta_principal: ps.delta,
            delta_unwrapped: unwrapped,
            branch: ps.branch,
            pole: ps.pole,
        });
    }
    let (net_change, poles_crossed) = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (b.delta_unwrapped - a.delta_unwrapped, b.branch - a.branch),
        _ => (0.0, 0),
    };
    Ok(PhaseSweep {
        samples,
        net_change,
        poles_crossed,
    })
}
