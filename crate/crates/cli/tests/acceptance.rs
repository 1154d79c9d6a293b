//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL` line with its measured residual before asserting.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use invsq::boundstates::{
    asymptotic_k, bound_wavefunction, c1_residual, figure1_sweep, first_index, inner_wavefunction, quantization_residual,
    spectrum, BoundState, Normalization, PhaseModel,
};
use invsq::oracle::{bessel_k_imag_quadrature, extract_phase, shoot_eigenvalue, IntegratorConfig};
use invsq::potential::{derive_params, gtilde, regularized_potential, PiecewisePotential, PotentialParams};
use invsq::scattering::phase_shift;
use invsq::specfun::{bessel_k_imag, gamma_imag, hankel_imag, hankel_imag_deriv, HankelKind};
use num_complex::Complex64;

fn defaults() -> PotentialParams {
    PotentialParams::new(1.25, 0.2, 1e-3, 1.0).unwrap()
}

fn verdict(id: u32, ok: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

/// States with kx₀ < 1e-3 from an exact-matched spectrum.
fn deep_states() -> (Vec<BoundState>, Duration) {
    let t = Instant::now();
    let sp = spectrum(&defaults(), 6, PhaseModel::Eckart).unwrap();
    let deep = sp.states.into_iter().filter(|s| s.k * 1e-3 < 1e-3).collect();
    (deep, t.elapsed())
}

/// Least-squares slope of y against x.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn wrap_pi(x: f64) -> f64 {
    x - (x / PI).round() * PI
}

#[test]
fn criterion_01_geometric_spectrum() {
    let (deep, elapsed) = deep_states();
    let pts: Vec<(f64, f64)> = deep.iter().map(|s| (s.n as f64, s.energy.abs().ln())).collect();
    let fitted = slope(&pts);
    let rel = (fitted / (-2.0 * PI) - 1.0).abs();
    let ok = deep.len() >= 5 && rel < 1e-3 && elapsed < Duration::from_secs(10);
    verdict(
        1,
        ok,
        format!("{} states, slope {fitted:.10}, rel err {rel:.2e} (tol 1e-3), {elapsed:.2?}", deep.len()),
    );
}

#[test]
fn criterion_02_oracle_eigenvalues() {
    let t = Instant::now();
    let (deep, _) = deep_states();
    let pot = PiecewisePotential::regularized(&defaults()).unwrap();
    let mut worst: f64 = 0.0;
    for s in &deep {
        let ev = shoot_eigenvalue(&pot, (1.3 * s.energy, s.energy / 1.3), &IntegratorConfig::default()).unwrap();
        worst = worst.max((ev.energy / s.energy - 1.0).abs());
    }
    let elapsed = t.elapsed();
    let ok = deep.len() >= 5 && worst < 1e-6 && elapsed < Duration::from_secs(60);
    verdict(2, ok, format!("{} states, worst rel diff {worst:.2e} (tol 1e-6), {elapsed:.2?}", deep.len()));
}

#[test]
fn criterion_03_quantization_residual() {
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for model in [PhaseModel::Eckart, PhaseModel::PowerLaw] {
        let n0 = first_index(&p, &d, model).unwrap();
        for n in n0..n0 + 8 {
            let k = asymptotic_k(n, &p, &d, model).unwrap();
            worst = worst.max(quantization_residual(&p, &d, k, model).unwrap().abs());
            count += 1;
        }
    }
    verdict(3, worst < 1e-10, format!("{count} wavenumbers, worst residual {worst:.2e} (tol 1e-10)"));
}

#[test]
fn criterion_04_renormalized_ground_state() {
    let p = defaults();
    let fig = figure1_sweep((0.3, 3.0), 400, p.mu_tilde, p.x0, p.lambda, PhaseModel::Eckart).unwrap();
    let mut worst: f64 = 0.0;
    for j in &fig.jumps {
        let expected = (-4.0 * PI / j.eta).exp();
        worst = worst.max((j.measured_factor / expected - 1.0).abs());
    }
    let mut crossing_err: f64 = 0.0;
    for &mu in &fig.crossings {
        let near = fig
            .points
            .iter()
            .min_by(|a, b| (a.mu - mu).abs().total_cmp(&(b.mu - mu).abs()))
            .unwrap();
        crossing_err = crossing_err.max(near.bracket.abs());
    }
    let ok = !fig.jumps.is_empty() && !fig.crossings.is_empty() && worst < 1e-6;
    verdict(
        4,
        ok,
        format!(
            "mu in (0.3, 3): {} jumps (worst factor err {worst:.2e}, tol 1e-6), {} crossings of E0 x0^2 = -2",
            fig.jumps.len(),
            fig.crossings.len()
        ),
    );
}

#[test]
fn criterion_05_poles_at_bound_states() {
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let mut worst: f64 = 0.0;
    for model in [PhaseModel::Eckart, PhaseModel::PowerLaw] {
        let n0 = first_index(&p, &d, model).unwrap();
        for n in n0..n0 + 8 {
            let k = asymptotic_k(n, &p, &d, model).unwrap();
            let ps = phase_shift(&p, &d, 0.5 * k * k, model).unwrap();
            worst = worst.max(ps.denominator.abs());
        }
    }
    verdict(5, worst < 1e-10, format!("worst |denominator| {worst:.2e} (tol 1e-10)"));
}

#[test]
fn criterion_06_phase_shift_oracle() {
    let t = Instant::now();
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for i in 0..20 {
        let kx0 = 1e-5 * 1e3f64.powf(i as f64 / 19.0);
        let k = kx0 / p.x0;
        let e = 0.5 * k * k;
        let ps = phase_shift(&p, &d, e, PhaseModel::Eckart).unwrap();
        // pole neighbourhood: the closed form's denominator nearly vanishes
        if ps.pole || ps.denominator.abs() < 1e-3 {
            continue;
        }
        let fit = extract_phase(&pot, e, &IntegratorConfig::default()).unwrap();
        worst = worst.max(wrap_pi(fit.delta - ps.delta).abs());
        used += 1;
    }
    let elapsed = t.elapsed();
    let ok = used > 0 && worst < 1e-3 && elapsed < Duration::from_secs(60);
    verdict(6, ok, format!("{used}/20 energies, worst |Δδ| {worst:.2e} rad (tol 1e-3), {elapsed:.2?}"));
}

#[test]
fn criterion_07_special_functions() {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut sub = |name: &str, err: f64, tol: f64| {
        let pass = err < tol;
        ok &= pass;
        lines.push(format!("{name} {err:.2e}/{tol:.0e}{}", if pass { "" } else { " FAIL" }));
    };

    let mut e: f64 = 0.0;
    for i in 1..=50 {
        let eta = 0.1 * i as f64;
        let g = gamma_imag(eta).unwrap();
        e = e.max((g.modulus.powi(2) * eta * (eta * PI).sinh() / PI - 1.0).abs());
    }
    sub("reflection", e, 1e-12);

    let mut e: f64 = 0.0;
    for eta in [0.5, 1.0, 2.0] {
        for x in [0.01, 0.1, 1.0, 5.0] {
            let q = bessel_k_imag_quadrature(eta, x).unwrap();
            e = e.max((bessel_k_imag(eta, x).unwrap() / q - 1.0).abs());
        }
    }
    sub("K vs quadrature", e, 1e-8);

    let mut e: f64 = 0.0;
    for x in [0.1, 1.0, 10.0, 20.0] {
        let hp = hankel_imag(HankelKind::Plus, 1.0, x).unwrap();
        let hm = hankel_imag(HankelKind::Minus, 1.0, x).unwrap();
        let w = hp * hankel_imag_deriv(HankelKind::Minus, 1.0, x).unwrap()
            - hm * hankel_imag_deriv(HankelKind::Plus, 1.0, x).unwrap();
        let expected = Complex64::new(0.0, -4.0 / (PI * x));
        e = e.max(((w - expected) / expected).norm());
    }
    sub("Wronskian", e, 1e-8);

    // √(kx) H± → √(2/π) e^{±πη/2} e^{±i(kx − π/4)}
    let (eta, z) = (1.0f64, 50.0f64);
    let mut e: f64 = 0.0;
    for (kind, s) in [(HankelKind::Plus, 1.0), (HankelKind::Minus, -1.0)] {
        let h = z.sqrt() * hankel_imag(kind, eta, z).unwrap();
        let lim = (2.0 / PI).sqrt() * (s * 0.5 * PI * eta).exp() * Complex64::from_polar(1.0, s * (z - FRAC_PI_4));
        e = e.max(((h - lim) / lim).norm());
    }
    sub("large-x limit at kx=50", e, 1e-2);

    // H± → ∓i/(η sinh ηπ) [e^{±ηπ}(x/2)^{iη}/Γ(iη) + (x/2)^{−iη}/Γ(−iη)]
    let x = 1e-5f64;
    let g = gamma_imag(eta).unwrap();
    let gp = Complex64::from_polar(g.modulus, g.argument);
    let up = Complex64::from_polar(1.0, eta * (0.5 * x).ln());
    let mut e: f64 = 0.0;
    for (kind, s) in [(HankelKind::Plus, 1.0), (HankelKind::Minus, -1.0)] {
        let lim = Complex64::new(0.0, -s) / (eta * (eta * PI).sinh())
            * ((s * eta * PI).exp() * up / gp + up.conj() / gp.conj());
        let h = hankel_imag(kind, eta, x).unwrap();
        e = e.max(((h - lim) / lim).norm());
    }
    sub("small-x limit at x=1e-5", e, 1e-6);

    verdict(7, ok, lines.join(", "));
}

#[test]
fn criterion_08_potential_construction() {
    let p = defaults();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let cont = pot.continuity_residuals()[0];
    // W ~ −μ̃/(2x²) at the origin: slope of ln|W| against ln x
    let pts: Vec<(f64, f64)> = (0..10)
        .map(|i| {
            let x = 1e-9 * 10f64.powf(i as f64 / 9.0);
            (x.ln(), regularized_potential(x, &p).unwrap().abs().ln())
        })
        .collect();
    let s = slope(&pts);
    let x = 1e-9;
    let limit = (x * x * regularized_potential(x, &p).unwrap() / (-0.5 * p.mu_tilde) - 1.0).abs();
    let mut g_min = f64::INFINITY;
    for i in 1..=500 {
        for j in 1..100 {
            g_min = g_min.min(gtilde(5.0 * i as f64 / 500.0, j as f64 / 100.0).unwrap());
        }
    }
    let ok = cont < 1e-10 && (s + 2.0).abs() < 1e-3 && limit < 1e-3 && g_min > 2.0 / 3.0;
    verdict(
        8,
        ok,
        format!("continuity {cont:.2e}, slope {s:.8}, x^2 W limit err {limit:.2e}, min g~ {g_min:.6}"),
    );
}

#[test]
fn criterion_09_wavefunction_regularity() {
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let sp = spectrum(&p, 6, PhaseModel::Eckart).unwrap();
    let (mut slope_err, mut c1, mut nodes_ok): (f64, f64, bool) = (0.0, 0.0, true);
    for s in &sp.states {
        let wf = bound_wavefunction(&p, &d, s, Normalization::MaxAbs).unwrap();
        let (x1, x2) = (1e-7 * p.x0, 1e-6 * p.x0);
        let ls = (wf.value(x2).unwrap().abs().ln() - wf.value(x1).unwrap().abs().ln()) / (x2 / x1).ln();
        slope_err = slope_err.max((ls - 0.5 - d.nu).abs());
        // value and derivative continuity of the assembled pieces at x₀
        let (u, du) = inner_wavefunction(&p, &d, s.energy).unwrap().eval(p.x0).unwrap();
        let (v, dv) = wf.outer.eval(p.x0).unwrap();
        let (v, dv) = (s.coeff_b * v, s.coeff_b * dv);
        c1 = c1.max(((u - v) / u).abs()).max(((du - dv) / du).abs());
        c1 = c1.max(c1_residual(&p, &d, s.k).unwrap());
        let ev = shoot_eigenvalue(&pot, (1.3 * s.energy, s.energy / 1.3), &IntegratorConfig::default()).unwrap();
        nodes_ok &= ev.nodes as i64 == s.n;
    }
    let ok = slope_err < 1e-3 && c1 < 1e-9 && nodes_ok;
    verdict(
        9,
        ok,
        format!(
            "{} states, slope err {slope_err:.2e}, C1 residual {c1:.2e}, oracle nodes {}",
            sp.states.len(),
            if nodes_ok { "= n" } else { "mismatch" }
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_invsq");
    let runs: [&[&str]; 5] = [
        &["spectrum", "--states", "6"],
        &["phase", "--e-steps", "30"],
        &["figure1", "--steps", "60"],
        &["potential-dump", "--points", "50", "--units", "x0"],
        &["spectrum", "--format", "json"],
    ];
    let mut mismatches = Vec::new();
    for args in runs {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        if !(a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty()) {
            mismatches.push(args.join(" "));
        }
    }
    verdict(
        10,
        mismatches.is_empty(),
        format!("{} configurations, {} differing: {mismatches:?}", runs.len(), mismatches.len()),
    );
}
