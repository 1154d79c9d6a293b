//! The regularized potential: Eckart shell(s) inside the cutoff, −μ/(2x²)
//! outside, with value continuity at every boundary.
//!
//! Atomic units (ħ = m = 1) throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gamma_imag, GammaImag};

/// Validity guards for the analytic single-shell pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    /// Upper bound on λ·x₀ (the expansions assume λx₀ ≪ 1).
    pub lambda_x0_max: f64,
    /// Lower bound on η = √(μ − 1/4).
    pub eta_min: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            lambda_x0_max: 0.1,
            eta_min: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// Bare coupling, μ > 1/4.
    pub mu: f64,
    /// Renormalized coupling inside the cutoff, 0 < μ̃ < 1/4.
    pub mu_tilde: f64,
    /// Cutoff radius.
    pub x0: f64,
    /// Eckart slope.
    pub lambda: f64,
}

impl PotentialParams {
    pub fn new(mu: f64, mu_tilde: f64, x0: f64, lambda: f64) -> Result<Self> {
        let p = PotentialParams {
            mu,
            mu_tilde,
            x0,
            lambda,
        };
        p.validate(&Guards::default())?;
        Ok(p)
    }

    pub fn with_guards(mu: f64, mu_tilde: f64, x0: f64, lambda: f64, guards: &Guards) -> Result<Self> {
        let p = PotentialParams {
            mu,
            mu_tilde,
            x0,
            lambda,
        };
        p.validate(guards)?;
        Ok(p)
    }

    pub fn validate(&self, guards: &Guards) -> Result<()> {
        let all_finite = [self.mu, self.mu_tilde, self.x0, self.lambda].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Guard("parameters must be finite".into()));
        }
        if !(self.mu > 0.25) {
            return Err(Error::Guard(format!(
                "strong-coupling regime requires μ > 1/4 (got mu = {})",
                self.mu
            )));
        }
        if !(self.mu_tilde > 0.0 && self.mu_tilde < 0.25) {
            return Err(Error::Guard(format!(
                "renormalized coupling requires 0 < μ̃ < 1/4 (got mu-tilde = {})",
                self.mu_tilde
            )));
        }
        if !(self.x0 > 0.0) {
            return Err(Error::Guard(format!("cutoff requires x0 > 0 (got x0 = {})", self.x0)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::Guard(format!("Eckart slope requires λ > 0 (got lambda = {})", self.lambda)));
        }
        if !(self.lambda * self.x0 < guards.lambda_x0_max) {
            return Err(Error::Guard(format!(
                "expansion regime requires λ·x0 < {} (got {})",
                guards.lambda_x0_max,
                self.lambda * self.x0
            )));
        }
        let eta = (self.mu - 0.25).sqrt();
        if !(eta > guards.eta_min) {
            return Err(Error::Guard(format!(
                "η = √(μ − 1/4) = {eta} must exceed {} (μ too close to 1/4)",
                guards.eta_min
            )));
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        (self.mu - 0.25).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// μ̃ = γ + ρ, kept exactly.
    pub mu_tilde: f64,
    pub rho: f64,
    pub gamma_coef: f64,
    pub nu: f64,
    pub tau: f64,
    pub eta: f64,
    /// cosh(λx₀)
    pub z0: f64,
    /// cosh(λx₀) − 1, kept separately to avoid cancellation.
    pub z0_minus_one: f64,
    pub gamma_imag: GammaImag,
}

/// sinh(y)/y − 1, accurate for small y.
pub(crate) fn sinhc_minus_one(y: f64) -> f64 {
    let y2 = y * y;
    if y.abs() < 0.1 {
        y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0 * (1.0 + y2 / 72.0 * (1.0 + y2 / 110.0))))
    } else {
        y.sinh() / y - 1.0
    }
}

/// cosh(y) − 1 = 2 sinh²(y/2).
pub(crate) fn cosh_minus_one(y: f64) -> f64 {
    let s = (0.5 * y).sinh();
    2.0 * s * s
}

/// Continuity function g̃(y) = ((sinh y / y)² − r)/(cosh y − 1), r = μ̃/μ.
pub fn gtilde(y: f64, ratio: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain("gtilde", format!("y must be > 0, got {y}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::domain("gtilde", format!("ratio must lie in (0, 1), got {ratio}")));
    }
    let s1 = sinhc_minus_one(y);
    let numerator = s1 * (s1 + 2.0) + (1.0 - ratio);
    Ok(numerator / cosh_minus_one(y))
}

pub fn derive_params(p: &PotentialParams) -> Result<DerivedParams> {
    derive_params_with_guards(p, &Guards::default())
}

pub fn derive_params_with_guards(p: &PotentialParams, guards: &Guards) -> Result<DerivedParams> {
    p.validate(guards)?;
    let y0 = p.lambda * p.x0;
    let rho = p.mu * gtilde(y0, p.mu_tilde / p.mu)?;
    let gamma_coef = p.mu_tilde - rho;
    let nu = (0.25 - p.mu_tilde).sqrt();
    let tau = (0.25 - p.mu_tilde + 2.0 * rho).sqrt();
    let eta = p.eta();
    let z0_minus_one = cosh_minus_one(y0);
    Ok(DerivedParams {
        mu_tilde: p.mu_tilde,
        rho,
        gamma_coef,
        nu,
        tau,
        eta,
        z0: 1.0 + z0_minus_one,
        z0_minus_one,
        gamma_imag: gamma_imag(eta)?,
    })
}

/// One Eckart shell W(x) = −(λ²/2)(γ + ρ cosh λx)/sinh² λx.
///
/// Stored through μ̃ = γ + ρ rather than γ, since ρ is typically huge and
/// γ + ρ would cancel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EckartShell {
    pub mu_tilde: f64,
    pub rho: f64,
    pub lambda: f64,
}

impl EckartShell {
    pub fn from_derived(d: &DerivedParams, lambda: f64) -> Self {
        EckartShell {
            mu_tilde: d.mu_tilde,
            rho: d.rho,
            lambda,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.mu_tilde - self.rho
    }

    /// γ + ρ cosh y written as μ̃ + ρ (cosh y − 1).
    fn numerator(&self, y: f64) -> f64 {
        self.mu_tilde + self.rho * cosh_minus_one(y)
    }

    /// x²·W(x), finite as x → 0.
    pub fn scaled(&self, x: f64) -> f64 {
        let y = self.lambda * x;
        let sc = 1.0 + sinhc_minus_one(y);
        -0.5 * self.numerator(y) / (sc * sc)
    }

    pub fn value(&self, x: f64) -> f64 {
        let y = self.lambda * x;
        let s = y.sinh();
        -0.5 * self.lambda * self.lambda * self.numerator(y) / (s * s)
    }

    /// τ² = 1/4 − μ̃ + 2ρ.
    pub fn tau_squared(&self) -> f64 {
        0.25 - self.mu_tilde + 2.0 * self.rho
    }
}

/// W(x) of the single-shell regularization.
pub fn eckart(x: f64, d: &DerivedParams, lambda: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("eckart", format!("x must be > 0, got {x}")));
    }
    Ok(EckartShell::from_derived(d, lambda).value(x))
}

/// V(x): Eckart inside x₀, −μ/(2x²) outside.
pub fn regularized_potential(x: f64, p: &PotentialParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("regularized_potential", format!("x must be > 0, got {x}")));
    }
    if x >= p.x0 {
        return Ok(-0.5 * p.mu / (x * x));
    }
    let d = derive_params(p)?;
    eckart(x, &d, p.lambda)
}

/// Potential on the half-line as seen by the ODE integrator.
pub trait Potential: Sync {
    fn value(&self, x: f64) -> f64;

    /// x²·V(x).
    fn scaled(&self, x: f64) -> f64 {
        x * x * self.value(x)
    }

    /// Coupling c with x²V(x) → −c/2 as x → 0.
    fn origin_coupling(&self) -> f64;

    /// Coupling of the −μ/(2x²) tail; zero for short-range potentials.
    fn outer_coupling(&self) -> f64 {
        0.0
    }

    /// Radius beyond which the tail form is exact.
    fn outer_radius(&self) -> f64;
}

/// Requested shell of a multi-shell stack: the shell spans
/// [inner_radius, previous boundary).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub mu_tilde: f64,
    pub lambda: f64,
    pub inner_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePotential {
    pub outer_mu: f64,
    /// Outer boundary of each shell, strictly decreasing; the first is x₀.
    pub boundaries: Vec<f64>,
    pub shells: Vec<EckartShell>,
    pub couplings: Vec<f64>,
}

impl PiecewisePotential {
    /// Single-shell regularization of the given parameters.
    pub fn regularized(p: &PotentialParams) -> Result<Self> {
        build_multishell(
            p.mu,
            &[ShellSpec {
                mu_tilde: p.mu_tilde,
                lambda: p.lambda,
                inner_radius: 0.0,
            }],
            p.x0,
        )
    }

    pub fn x0(&self) -> f64 {
        self.boundaries[0]
    }

    fn shell_index(&self, x: f64) -> Option<usize> {
        if x >= self.boundaries[0] {
            return None;
        }
        let j = self.boundaries.iter().rposition(|&b| x < b).unwrap_or(0);
        Some(j)
    }

    /// Relative value jump at every boundary.
    pub fn continuity_residuals(&self) -> Vec<f64> {
        self.boundaries
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                let inner = self.shells[j].value(b);
                let outer = if j == 0 {
                    -0.5 * self.outer_mu / (b * b)
                } else {
                    self.shells[j - 1].value(b)
                };
                ((inner - outer) / outer).abs()
            })
            .collect()
    }
}

impl Potential for PiecewisePotential {
    fn value(&self, x: f64) -> f64 {
        match self.shell_index(x) {
            None => -0.5 * self.outer_mu / (x * x),
            Some(j) => self.shells[j].value(x),
        }
    }

    fn scaled(&self, x: f64) -> f64 {
        match self.shell_index(x) {
            None => -0.5 * self.outer_mu,
            Some(j) => self.shells[j].scaled(x),
        }
    }

    fn origin_coupling(&self) -> f64 {
        *self.couplings.last().expect("at least one shell")
    }

    fn outer_coupling(&self) -> f64 {
        self.outer_mu
    }

    fn outer_radius(&self) -> f64 {
        self.boundaries[0]
    }
}

/// Stack of Eckart shells inside x₀; each shell's ρ is fixed by continuity
/// with the region just outside it, which is linear in ρ.
pub fn build_multishell(outer_mu: f64, shells: &[ShellSpec], x0: f64) -> Result<PiecewisePotential> {
    build_multishell_with_guards(outer_mu, shells, x0, &Guards::default())
}

pub fn build_multishell_with_guards(
    outer_mu: f64,
    shells: &[ShellSpec],
    x0: f64,
    guards: &Guards,
) -> Result<PiecewisePotential> {
    if shells.is_empty() {
        return Err(Error::Parameter("at least one shell is required".into()));
    }
    if !(outer_mu > 0.0) || !(x0 > 0.0) {
        return Err(Error::Parameter(format!("need outer μ > 0 and x0 > 0 (got {outer_mu}, {x0})")));
    }
    let mut boundaries = Vec::with_capacity(shells.len());
    let mut built: Vec<EckartShell> = Vec::with_capacity(shells.len());
    let mut outer = x0;
    for (j, spec) in shells.iter().enumerate() {
        if !(0.0..=0.25).contains(&spec.mu_tilde) {
            return Err(Error::Parameter(format!("shell {j}: μ̃ = {} outside [0, 1/4]", spec.mu_tilde)));
        }
        if !(spec.lambda > 0.0) {
            return Err(Error::Parameter(format!("shell {j}: λ must be > 0")));
        }
        let last = j + 1 == shells.len();
        if last && spec.inner_radius != 0.0 {
            return Err(Error::Parameter("innermost shell must reach the origin".into()));
        }
        if !last && !(spec.inner_radius > 0.0 && spec.inner_radius < outer) {
            return Err(Error::Parameter(format!(
                "shell {j}: inner radius {} must lie in (0, {outer})",
                spec.inner_radius
            )));
        }
        let y = spec.lambda * outer;
        if !(y < guards.lambda_x0_max) {
            return Err(Error::Matching(format!(
                "shell {j}: λ·x = {y} violates the guard {}",
                guards.lambda_x0_max
            )));
        }
        // −2x²V just outside the boundary
        let target = match built.last() {
            None => outer_mu,
            Some(prev) => -2.0 * prev.scaled(outer),
        };
        let sc = 1.0 + sinhc_minus_one(y);
        let rho = (target * sc * sc - spec.mu_tilde) / cosh_minus_one(y);
        let shell = EckartShell {
            mu_tilde: spec.mu_tilde,
            rho,
            lambda: spec.lambda,
        };
        if !rho.is_finite() || !(shell.tau_squared() >= 0.0) {
            return Err(Error::Matching(format!(
                "shell {j}: continuity at x = {outer} gives ρ = {rho}, τ² = {} < 0",
                shell.tau_squared()
            )));
        }
        boundaries.push(outer);
        built.push(shell);
        outer = spec.inner_radius;
    }
    Ok(PiecewisePotential {
        outer_mu,
        boundaries,
        shells: built,
        couplings: shells.iter().map(|s| s.mu_tilde).collect(),
    })
}

/// (x, V(x)) on a log-spaced grid from 1e-4·x₀ to 1e2·x₀.
pub fn potential_dump(p: &PotentialParams, points: usize) -> Result<Vec<(f64, f64)>> {
    let pot = PiecewisePotential::regularized(p)?;
    let points = points.max(2);
    let (lo, hi) = ((1e-4 * p.x0).ln(), (1e2 * p.x0).ln());
    Ok((0..points)
        .map(|i| {
            let x = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
            (x, pot.value(x))
        })
        .collect())
}
