//! Independent checks by direct integration of the radial equation.
//!
//! Numerov on t = ln x for φ = ψ/√x, which obeys φ″ = f φ with
//! f = 1/4 + 2x²(V − E). The grid is uniform in t, so the logarithmically
//! dense oscillations near a strong inverse-square core cost a fixed number
//! of steps per period. Nothing here uses the analytic wavefunctions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::roots::bisect_secant;
use crate::specfun::{hankel_imag, HankelKind};

/// Hard bound on h·√|f| in classically allowed regions.
pub const MAX_RESOLUTION: f64 = 0.05;
/// Stability bound on h²·f in forbidden regions.
pub const MAX_FORBIDDEN: f64 = 6.0;

const RENORM_INTERVAL: usize = 1000;
const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Default 1e-6 × the potential's outer radius.
    pub x_min: Option<f64>,
    /// Default 40/κ for bound states, just past the last fit radius for scattering.
    pub x_max: Option<f64>,
    /// Fixed step in ln x; chosen from `resolution` when absent.
    pub step: Option<f64>,
    /// Target h·√|f| in allowed regions.
    pub resolution: f64,
    /// Default √(x₀/κ).
    pub match_radius: Option<f64>,
    /// Phase-fit radii in units of 1/k.
    pub fit_radii: Vec<f64>,
    pub max_iter: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            x_min: None,
            x_max: None,
            step: None,
            resolution: 0.01,
            match_radius: None,
            fit_radii: vec![40.0, 60.0],
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Outward,
    Inward,
}

/// Uniform grid in ln x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub h: f64,
    pub n: usize,
    /// Index placed exactly on a breakpoint of the potential.
    pub breakpoint: Option<usize>,
}

impl Grid {
    pub fn x(&self, i: usize) -> f64 {
        (self.t0 + self.h * i as f64).exp()
    }

    /// Index of the grid point nearest to x.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x.ln() - self.t0) / self.h).round();
        (i.max(0.0) as usize).min(self.n - 1)
    }
}

/// f = 1/4 + 2x²(V − E)
fn f_value<P: Potential + ?Sized>(pot: &P, x: f64, energy: f64) -> f64 {
    0.25 + 2.0 * pot.scaled(x) - 2.0 * x * x * energy
}

/// Grid on [x_min, x_max] resolving every energy in `energies`.
pub fn build_grid<P: Potential + ?Sized>(
    pot: &P,
    energies: &[f64],
    x_min: f64,
    x_max: f64,
    step: Option<f64>,
    resolution: f64,
    breakpoint: Option<f64>,
) -> Result<Grid> {
    if !(x_min > 0.0 && x_max > x_min) {
        return Err(Error::Integrator(format!("need 0 < x_min < x_max (got {x_min}, {x_max})")));
    }
    if !(resolution > 0.0 && resolution <= MAX_RESOLUTION) {
        return Err(Error::Integrator(format!(
            "resolution {resolution} must lie in (0, {MAX_RESOLUTION}]"
        )));
    }
    let (t0, t1) = (x_min.ln(), x_max.ln());
    let mut allowed: f64 = 0.0;
    let mut forbidden: f64 = 0.0;
    for i in 0..=SCAN_POINTS {
        let x = (t0 + (t1 - t0) * i as f64 / SCAN_POINTS as f64).exp();
        for &e in energies {
            let f = f_value(pot, x, e);
            if f < 0.0 {
                allowed = allowed.max(-f);
            } else {
                forbidden = forbidden.max(f);
            }
        }
    }
    // scan spacing can miss a narrow maximum; keep a margin
    let (allowed, forbidden) = (1.1 * allowed, 1.1 * forbidden);
    let h = match step {
        Some(h) => {
            if !(h > 0.0) {
                return Err(Error::Integrator(format!("step must be > 0, got {h}")));
            }
            if h * allowed.sqrt() > MAX_RESOLUTION || h * h * forbidden > MAX_FORBIDDEN {
                return Err(Error::Integrator(format!(
                    "step {h} under-resolves the solution: h·√|f| = {:.3e}, h²f = {:.3e}",
                    h * allowed.sqrt(),
                    h * h * forbidden
                )));
            }
            h
        }
        None => {
            let mut h = (t1 - t0) / 200.0;
            if allowed > 0.0 {
                h = h.min(resolution / allowed.sqrt());
            }
            if forbidden > 0.0 {
                h = h.min((0.5 * MAX_FORBIDDEN / forbidden).sqrt());
            }
            h
        }
    };
    match breakpoint.filter(|&r| r > x_min && r < x_max) {
        // put a grid point on the breakpoint, extending x_max by under one step
        Some(r) => {
            let ta = r.ln();
            let below = ((ta - t0) / h).ceil().max(2.0) as usize;
            let h = (ta - t0) / below as f64;
            let above = ((t1 - ta) / h).ceil().max(2.0) as usize;
            Ok(Grid {
                t0,
                h,
                n: below + above + 1,
                breakpoint: Some(below),
            })
        }
        None => {
            let n = (((t1 - t0) / h).ceil() as usize + 1).max(4);
            Ok(Grid {
                t0,
                h: (t1 - t0) / (n - 1) as f64,
                n,
                breakpoint: None,
            })
        }
    }
}

/// Jumps of f and df/dt across the breakpoint, right minus left.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Kink {
    index: usize,
    jump_f: f64,
    jump_ft: f64,
}

/// One-sided limits of x²V and its t-derivative at r.
fn one_sided<P: Potential + ?Sized>(pot: &P, r: f64, side: f64) -> (f64, f64) {
    const D: f64 = 1e-5;
    let g = |j: f64| pot.scaled(r * (side * D * j).exp());
    let (g0, g1, g2) = (g(1e-8), g(1.0), g(2.0));
    (g0, side * (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * D))
}

/// x²V on the grid; at the breakpoint, the mean of the one-sided limits.
fn scaled_on_grid<P: Potential + ?Sized>(pot: &P, grid: &Grid) -> (Vec<f64>, Option<Kink>) {
    let mut v: Vec<f64> = (0..grid.n).map(|i| pot.scaled(grid.x(i))).collect();
    let kink = grid.breakpoint.map(|b| {
        let r = pot.outer_radius();
        let (gl, dl) = one_sided(pot, r, -1.0);
        let (gr, dr) = one_sided(pot, r, 1.0);
        v[b] = 0.5 * (gl + gr);
        Kink {
            index: b,
            jump_f: 2.0 * (gr - gl),
            jump_ft: 2.0 * (dr - dl),
        }
    });
    (v, kink)
}

fn f_from_scaled(grid: &Grid, scaled: &[f64], energy: f64) -> Vec<f64> {
    (0..grid.n)
        .map(|i| {
            let x = grid.x(i);
            0.25 + 2.0 * scaled[i] - 2.0 * x * x * energy
        })
        .collect()
}

/// Integrated samples of φ = ψ/√x; the true φᵢ is `phi[i]·exp(log_scale[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub grid: Grid,
    pub phi: Vec<f64>,
    pub log_scale: Vec<f64>,
    pub f: Vec<f64>,
}

impl Solution {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    /// φ at i relative to the scale at `reference`.
    fn phi_rel(&self, i: usize, reference: usize) -> f64 {
        self.phi[i] * (self.log_scale[i] - self.log_scale[reference]).exp()
    }

    /// ψ at i, relative to the scale at `reference`.
    pub fn psi_rel(&self, i: usize, reference: usize) -> f64 {
        self.phi_rel(i, reference) * self.x(i).sqrt()
    }

    /// ψ at i with its true scale (may overflow for long integrations).
    pub fn psi(&self, i: usize) -> f64 {
        self.phi[i] * self.log_scale[i].exp() * self.x(i).sqrt()
    }

    /// ln|ψ| at i.
    pub fn ln_abs_psi(&self, i: usize) -> f64 {
        self.phi[i].abs().ln() + self.log_scale[i] + 0.5 * self.x(i).ln()
    }

    /// dφ/dt at an interior index, fourth order.
    fn dphi_rel(&self, i: usize) -> f64 {
        let h = self.grid.h;
        let (pm, pp) = (self.phi_rel(i - 1, i), self.phi_rel(i + 1, i));
        (pp - pm - h * h / 6.0 * (self.f[i + 1] * pp - self.f[i - 1] * pm)) / (2.0 * h)
    }

    /// x ψ′/ψ at an interior index.
    pub fn log_derivative(&self, i: usize) -> f64 {
        0.5 + self.dphi_rel(i) / self.phi[i]
    }

    /// ψ′ at an interior index, relative to the scale at i.
    pub fn derivative_rel(&self, i: usize) -> f64 {
        (0.5 * self.phi[i] + self.dphi_rel(i)) / self.x(i).sqrt()
    }

    /// Sign changes of ψ over the index range.
    pub fn sign_changes(&self, range: std::ops::Range<usize>) -> usize {
        let mut prev = 0.0_f64;
        let mut n = 0;
        for i in range {
            let v = self.phi[i];
            if v != 0.0 {
                if prev != 0.0 && v.signum() != prev.signum() {
                    n += 1;
                }
                prev = v;
            }
        }
        n
    }
}

/// Numerov sweep over `f` (grid order) between `from` and `to` inclusive,
/// started from two samples at `from` and the next index towards `to`.
///
/// A grid point sitting on a kink of f gets the h³ correction that keeps
/// the scheme fourth order; a jump in f itself is corrected to third order.
#[allow(clippy::too_many_arguments)]
fn numerov(
    f: &[f64],
    h: f64,
    kink: Option<Kink>,
    from: usize,
    to: usize,
    start: (f64, f64),
    scale0: f64,
    phi: &mut [f64],
    ls: &mut [f64],
) {
    let h12 = h * h / 12.0;
    let forward = to >= from;
    let next = |i: usize| if forward { i + 1 } else { i - 1 };
    let (i0, i1) = (from, next(from));
    phi[i0] = start.0;
    phi[i1] = start.1;
    ls[i0] = scale0;
    ls[i1] = scale0;
    let (mut prev, mut cur) = start;
    let mut scale = scale0;
    let (mut ip, mut ic) = (i0, i1);
    let mut steps = 1;
    while ic != to {
        let inx = next(ic);
        let mut rhs = 2.0 * (1.0 + 5.0 * h12 * f[ic]) * cur - (1.0 - h12 * f[ip]) * prev;
        if let Some(k) = kink.filter(|k| k.index == ic) {
            let dphi = if forward { cur - prev } else { prev - cur } / h;
            rhs += h * h12 * (k.jump_ft * cur + k.jump_f * dphi);
        }
        let new = rhs / (1.0 - h12 * f[inx]);
        prev = cur;
        cur = new;
        steps += 1;
        let big = !(1e-150..=1e150).contains(&cur.abs());
        if (steps % RENORM_INTERVAL == 0 || big) && cur != 0.0 && cur.is_finite() {
            let r = cur.abs();
            prev /= r;
            cur /= r;
            scale += r.ln();
        }
        phi[inx] = cur;
        ls[inx] = scale;
        ip = ic;
        ic = inx;
    }
}

fn check_resolution(f: &[f64], h: f64) -> Result<()> {
    for &v in f {
        if v < 0.0 && h * (-v).sqrt() > MAX_RESOLUTION {
            return Err(Error::Integrator(format!(
                "step resolution violated: h·√|f| = {:.3e} > {MAX_RESOLUTION}",
                h * (-v).sqrt()
            )));
        }
        if v > 0.0 && h * h * v > MAX_FORBIDDEN {
            return Err(Error::Integrator(format!(
                "step too large in forbidden region: h²f = {:.3e}",
                h * h * v
            )));
        }
    }
    Ok(())
}

fn origin_exponent<P: Potential + ?Sized>(pot: &P) -> Result<f64> {
    let c = pot.origin_coupling();
    if c > 0.25 {
        return Err(Error::Integrator(format!(
            "origin coupling {c} > 1/4 has no regular solution to start from"
        )));
    }
    Ok((0.25 - c).sqrt())
}

/// Outward start: φ = e^{ν̃t}, i.e. ψ ∝ x^{1/2+ν̃} with ν̃ from the innermost coupling.
fn outward_start<P: Potential + ?Sized>(pot: &P, grid: &Grid) -> Result<(f64, f64, f64)> {
    let nu = origin_exponent(pot)?;
    Ok((1.0, (nu * grid.h).exp(), nu * grid.t0))
}

/// Outer-region basis function g with ψ ∝ Re(e^{iφ} g) → cos(kx + φ − π/4).
fn scattering_basis<P: Potential + ?Sized>(pot: &P, k: f64, x: f64) -> Result<Complex64> {
    let mu = pot.outer_coupling();
    let z = k * x;
    if mu == 0.0 {
        return Ok((2.0 / PI).sqrt() * Complex64::from_polar(1.0, z - FRAC_PI_4));
    }
    if mu <= 0.25 {
        return Err(Error::Integrator(format!(
            "outer coupling {mu} in (0, 1/4] has no imaginary-order Hankel basis"
        )));
    }
    let eta = (mu - 0.25).sqrt();
    Ok((-0.5 * PI * eta).exp() * z.sqrt() * hankel_imag(HankelKind::Plus, eta, z)?)
}

/// Inward start at the last two grid points.
fn inward_start<P: Potential + ?Sized>(pot: &P, grid: &Grid, energy: f64) -> Result<(f64, f64, f64)> {
    let (xa, xb) = (grid.x(grid.n - 1), grid.x(grid.n - 2));
    let kappa2 = 2.0 * (pot.value(xa) - energy);
    if kappa2 > 0.0 {
        // ψ ∝ e^{−κx}
        let kappa = kappa2.sqrt();
        let la = -kappa * xa - 0.5 * xa.ln();
        let lb = -kappa * xb - 0.5 * xb.ln();
        return Ok((1.0, (lb - la).exp(), la));
    }
    if energy > 0.0 {
        let k = (2.0 * energy).sqrt();
        let ga = scattering_basis(pot, k, xa)?.re / xa.sqrt();
        let gb = scattering_basis(pot, k, xb)?.re / xb.sqrt();
        return Ok((ga, gb, 0.0));
    }
    Err(Error::Integrator(format!(
        "no inward boundary condition at x_max = {xa} for E = {energy}"
    )))
}

fn f_on_grid<P: Potential + ?Sized>(pot: &P, grid: &Grid, energy: f64) -> (Vec<f64>, Option<Kink>) {
    let (scaled, kink) = scaled_on_grid(pot, grid);
    (f_from_scaled(grid, &scaled, energy), kink)
}

/// Integrate over the whole grid in one direction.
pub fn integrate<P: Potential + ?Sized>(
    pot: &P,
    energy: f64,
    cfg: &IntegratorConfig,
    direction: Direction,
) -> Result<Solution> {
    let x_min = cfg.x_min.unwrap_or(1e-6 * pot.outer_radius());
    let x_max = match cfg.x_max {
        Some(x) => x,
        None if energy < 0.0 => 40.0 / (-2.0 * energy).sqrt(),
        None => {
            return Err(Error::Integrator("x_max is required for E ≥ 0".into()));
        }
    };
    let grid = build_grid(pot, &[energy], x_min, x_max, cfg.step, cfg.resolution, Some(pot.outer_radius()))?;
    integrate_on(pot, energy, &grid, direction)
}

pub fn integrate_on<P: Potential + ?Sized>(pot: &P, energy: f64, grid: &Grid, direction: Direction) -> Result<Solution> {
    let (f, kink) = f_on_grid(pot, grid, energy);
    check_resolution(&f, grid.h)?;
    let mut phi = vec![0.0; grid.n];
    let mut ls = vec![0.0; grid.n];
    match direction {
        Direction::Outward => {
            let (a, b, s) = outward_start(pot, grid)?;
            numerov(&f, grid.h, kink, 0, grid.n - 1, (a, b), s, &mut phi, &mut ls);
        }
        Direction::Inward => {
            let (a, b, s) = inward_start(pot, grid, energy)?;
            numerov(&f, grid.h, kink, grid.n - 1, 0, (a, b), s, &mut phi, &mut ls);
        }
    }
    Ok(Solution {
        grid: *grid,
        phi,
        log_scale: ls,
        f,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEigenvalue {
    pub energy: f64,
    pub nodes: usize,
    /// Relative jump of xψ′/ψ at the match radius.
    pub logderiv_residual: f64,
}

/// Fixed grid and match index for one shooting problem.
struct Shooter<'a, P: Potential + ?Sized> {
    pot: &'a P,
    grid: Grid,
    m: usize,
    scaled: Vec<f64>,
    kink: Option<Kink>,
}

struct ShotPair {
    out: Solution,
    inw: Solution,
}

impl<'a, P: Potential + ?Sized> Shooter<'a, P> {
    fn f(&self, energy: f64) -> Vec<f64> {
        f_from_scaled(&self.grid, &self.scaled, energy)
    }

    fn shoot(&self, energy: f64) -> Result<ShotPair> {
        let f = self.f(energy);
        check_resolution(&f, self.grid.h)?;
        let n = self.grid.n;
        let m = self.m;
        let mut phi_o = vec![0.0; n];
        let mut ls_o = vec![0.0; n];
        let (a, b, s) = outward_start(self.pot, &self.grid)?;
        numerov(&f, self.grid.h, self.kink, 0, m + 1, (a, b), s, &mut phi_o, &mut ls_o);
        let mut phi_i = vec![0.0; n];
        let mut ls_i = vec![0.0; n];
        let (a, b, s) = inward_start(self.pot, &self.grid, energy)?;
        numerov(&f, self.grid.h, self.kink, n - 1, m - 1, (a, b), s, &mut phi_i, &mut ls_i);
        Ok(ShotPair {
            out: Solution {
                grid: self.grid,
                phi: phi_o,
                log_scale: ls_o,
                f: f.clone(),
            },
            inw: Solution {
                grid: self.grid,
                phi: phi_i,
                log_scale: ls_i,
                f,
            },
        })
    }

    /// Normalized discrete Wronskian of the Numerov-modified values at (m, m+1).
    fn mismatch(&self, energy: f64) -> Result<f64> {
        let pair = self.shoot(energy)?;
        let m = self.m;
        let h12 = self.grid.h * self.grid.h / 12.0;
        let y = |s: &Solution, i: usize| (1.0 - h12 * s.f[i]) * s.phi_rel(i, m);
        let (o0, o1) = (y(&pair.out, m), y(&pair.out, m + 1));
        let (i0, i1) = (y(&pair.inw, m), y(&pair.inw, m + 1));
        Ok((o0 * i1 - o1 * i0) / (o0.hypot(o1) * i0.hypot(i1)))
    }
}

/// Shooting eigenvalue on an energy bracket containing one sign change of
/// the outward/inward mismatch.
pub fn shoot_eigenvalue<P: Potential + ?Sized>(
    pot: &P,
    e_bracket: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<OracleEigenvalue> {
    let (e_lo, e_hi) = (e_bracket.0.min(e_bracket.1), e_bracket.0.max(e_bracket.1));
    let r0 = pot.outer_radius();
    let x_min = cfg.x_min.unwrap_or(1e-6 * r0);
    let kappa = |e: f64| (2.0 * e.abs()).sqrt();
    let x_max = match cfg.x_max {
        Some(x) => x,
        None if e_hi < 0.0 => 40.0 / kappa(e_hi),
        None => return Err(Error::Integrator("x_max is required when the bracket reaches E ≥ 0".into())),
    };
    let match_radius = cfg
        .match_radius
        .unwrap_or_else(|| (r0 / (kappa(e_lo) * kappa(e_hi)).sqrt()).sqrt());
    if !(x_min < match_radius && match_radius < x_max) {
        return Err(Error::Integrator(format!(
            "need x_min < match_radius < x_max (got {x_min}, {match_radius}, {x_max})"
        )));
    }
    let grid = build_grid(pot, &[e_lo, e_hi], x_min, x_max, cfg.step, cfg.resolution, Some(r0))?;
    let mut m = grid.index_of(match_radius).clamp(2, grid.n - 4);
    // the derivative stencil should not straddle the kink
    if grid.breakpoint.is_some_and(|b| b + 1 >= m && b <= m + 2) {
        let b = grid.breakpoint.unwrap();
        m = if b + 3 <= grid.n - 4 { b + 3 } else { b - 2 };
    }
    let (scaled, kink) = scaled_on_grid(pot, &grid);
    let shooter = Shooter {
        pot,
        grid,
        m,
        scaled,
        kink,
    };
    let energy = bisect_secant(
        |e| shooter.mismatch(e),
        e_lo,
        e_hi,
        1e-6,
        1e-15,
        cfg.max_iter,
        "shooting mismatch",
    )?;
    let pair = shooter.shoot(energy)?;
    let sign = (pair.out.phi[m] / pair.inw.phi[m]).signum();
    let mut nodes = pair.out.sign_changes(0..m + 1);
    let mut prev = pair.out.phi[m];
    for i in m + 1..grid.n {
        let v = sign * pair.inw.phi[i];
        if v != 0.0 {
            if prev != 0.0 && v.signum() != prev.signum() {
                nodes += 1;
            }
            prev = v;
        }
    }
    let (lo, li) = (pair.out.log_derivative(m), pair.inw.log_derivative(m));
    Ok(OracleEigenvalue {
        energy,
        nodes,
        logderiv_residual: (lo - li).abs() / lo.abs().max(li.abs()).max(f64::MIN_POSITIVE),
    })
}

/// Zeros of the outward solution on (x_min, x_end) at a fixed energy.
pub fn outward_nodes<P: Potential + ?Sized>(pot: &P, energy: f64, x_end: f64, cfg: &IntegratorConfig) -> Result<usize> {
    let cfg = IntegratorConfig {
        x_max: Some(x_end),
        ..cfg.clone()
    };
    let sol = integrate(pot, energy, &cfg, Direction::Outward)?;
    Ok(sol.sign_changes(0..sol.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    /// δ + π/4 ∈ (−π/2, π/2].
    pub delta: f64,
    /// Ratio of the smallest to the largest singular value of the basis matrix.
    pub conditioning: f64,
    pub radii: Vec<f64>,
}

/// Phase shift from a least-squares fit of the outward solution to the
/// outer-region basis at the configured radii (units of 1/k).
pub fn extract_phase<P: Potential + ?Sized>(pot: &P, energy: f64, cfg: &IntegratorConfig) -> Result<PhaseFit> {
    if !(energy > 0.0) {
        return Err(Error::Integrator(format!("phase extraction needs E > 0, got {energy}")));
    }
    if cfg.fit_radii.len() < 2 {
        return Err(Error::FitConditioning("at least two fit radii are required".into()));
    }
    let k = (2.0 * energy).sqrt();
    let r_max = cfg.fit_radii.iter().cloned().fold(0.0, f64::max) / k;
    let cfg = IntegratorConfig {
        x_max: Some(cfg.x_max.unwrap_or(0.0).max(1.02 * r_max)),
        ..cfg.clone()
    };
    let sol = integrate(pot, energy, &cfg, Direction::Outward)?;
    let idx: Vec<usize> = cfg.fit_radii.iter().map(|r| sol.grid.index_of(r / k)).collect();
    let reference = idx[0];
    // normal equations for ψ = α Re g + β Im g
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut radii = Vec::with_capacity(idx.len());
    for &i in &idx {
        let x = sol.x(i);
        if x < pot.outer_radius() {
            return Err(Error::FitConditioning(format!("fit radius {x} lies inside the cutoff")));
        }
        radii.push(x);
        let g = scattering_basis(pot, k, x)?;
        let psi = sol.psi_rel(i, reference);
        a11 += g.re * g.re;
        a12 += g.re * g.im;
        a22 += g.im * g.im;
        b1 += g.re * psi;
        b2 += g.im * psi;
    }
    let tr = a11 + a22;
    let disc = ((a11 - a22).powi(2) + 4.0 * a12 * a12).sqrt();
    let (l_max, l_min) = (0.5 * (tr + disc), 0.5 * (tr - disc));
    let conditioning = (l_min.max(0.0) / l_max).sqrt();
    if !(conditioning > 1e-3) {
        return Err(Error::FitConditioning(format!(
            "basis nearly degenerate at radii {radii:?} (conditioning {conditioning:.2e})"
        )));
    }
    let det = a11 * a22 - a12 * a12;
    let alpha = (a22 * b1 - a12 * b2) / det;
    let beta = (a11 * b2 - a12 * b1) / det;
    // ψ ∝ cos φ Re g − sin φ Im g
    let mut phi = (-beta).atan2(alpha);
    while phi > FRAC_PI_2 {
        phi -= PI;
    }
    while phi <= -FRAC_PI_2 {
        phi += PI;
    }
    Ok(PhaseFit {
        delta: phi - FRAC_PI_4,
        conditioning,
        radii,
    })
}

/// K_{iη}(x) = ∫₀^∞ e^{−x cosh t} cos(ηt) dt by composite Simpson, truncated
/// where x cosh t = 50.
pub fn bessel_k_imag_quadrature(eta: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !(eta >= 0.0) {
        return Err(Error::domain("bessel_k_imag_quadrature", format!("need x > 0, eta ≥ 0 (got {x}, {eta})")));
    }
    let upper = (50.0 / x).max(1.0).acosh().max(1.0);
    let n = 1 << 16;
    let h = upper / n as f64;
    let g = |t: f64| (-x * t.cosh()).exp() * (eta * t).cos();
    let mut sum = g(0.0) + g(upper);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(h * i as f64);
    }
    Ok(sum * h / 3.0)
}
