use std::f64::consts::PI;

use invsq::boundstates::{asymptotic_k, first_index, spectrum, PhaseModel};
use invsq::oracle::{extract_phase, shoot_eigenvalue, IntegratorConfig};
use invsq::potential::{derive_params, EckartShell, PiecewisePotential, Potential, PotentialParams};
use invsq::scattering::{phase_shift, phase_shift_exact};

fn defaults() -> PotentialParams {
    PotentialParams::new(1.25, 0.2, 1e-3, 1.0).unwrap()
}

fn wrap(x: f64) -> f64 {
    x - (x / PI).round() * PI
}

#[test]
fn exact_matching_agrees_with_shooting() {
    let p = defaults();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let sp = spectrum(&p, 6, PhaseModel::Eckart).unwrap();
    for s in &sp.states {
        let ev = shoot_eigenvalue(&pot, (1.3 * s.energy, s.energy / 1.3), &IntegratorConfig::default()).unwrap();
        assert!((ev.energy / s.energy - 1.0).abs() < 1e-6, "state {}", s.n);
        assert_eq!(ev.nodes as i64, s.n);
        assert_eq!(ev.nodes, s.nodes);
        assert!(ev.logderiv_residual < 1e-9);
    }
}

#[test]
fn richardson_on_regularized_problem() {
    let p = defaults();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let s = &spectrum(&p, 3, PhaseModel::Eckart).unwrap().states[1];
    // explicit halvings; the resolution knob alone can be capped by the forbidden-region bound
    let es: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&h| {
            let cfg = IntegratorConfig {
                step: Some(h),
                ..Default::default()
            };
            shoot_eigenvalue(&pot, (1.3 * s.energy, s.energy / 1.3), &cfg).unwrap().energy
        })
        .collect();
    let (d1, d2) = ((es[1] - es[0]).abs(), (es[2] - es[1]).abs());
    assert!(d2 < d1 / 15.0, "{d1:e} then {d2:e}");
}

#[test]
fn halving_x_min_barely_moves_eigenvalues() {
    let p = defaults();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    for s in &spectrum(&p, 4, PhaseModel::Eckart).unwrap().states {
        let br = (1.3 * s.energy, s.energy / 1.3);
        let a = shoot_eigenvalue(&pot, br, &IntegratorConfig::default()).unwrap();
        let b = shoot_eigenvalue(
            &pot,
            br,
            &IntegratorConfig {
                x_min: Some(0.5e-6 * p.x0),
                ..Default::default()
            },
        )
        .unwrap();
        assert!((a.energy / b.energy - 1.0).abs() < 1e-8, "state {}", s.n);
    }
}

#[test]
fn oracle_phase_matches_exact_and_closed_form() {
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    for kx0 in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        let k: f64 = kx0 / p.x0;
        let e = 0.5 * k * k;
        let fit = extract_phase(&pot, e, &IntegratorConfig::default()).unwrap();
        let exact = phase_shift_exact(&p, &d, e).unwrap();
        assert!(wrap(fit.delta - exact).abs() < 1e-7, "kx0 = {kx0}");
        let closed = phase_shift(&p, &d, e, PhaseModel::Eckart).unwrap();
        assert!(wrap(fit.delta - closed.delta).abs() < 1e-3, "kx0 = {kx0}");
    }
}

#[test]
fn oracle_phase_wraps_by_pi_across_a_pole() {
    let p = defaults();
    let d = derive_params(&p).unwrap();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let n = first_index(&p, &d, PhaseModel::Eckart).unwrap() + 2;
    let kn = asymptotic_k(n, &p, &d, PhaseModel::Eckart).unwrap();
    let cfg = IntegratorConfig::default();
    let below = extract_phase(&pot, 0.5 * (0.99 * kn).powi(2), &cfg).unwrap().delta;
    let above = extract_phase(&pot, 0.5 * (1.01 * kn).powi(2), &cfg).unwrap().delta;
    // δ + π/4 is reported in (−π/2, π/2], so passing through the pole wraps it
    let jump = (above - below).abs();
    assert!((jump - PI).abs() < 0.1 * PI, "jump {jump}");
}

/// Eckart shell inside x₀ and nothing outside.
struct ShortRange {
    shell: EckartShell,
    x0: f64,
}

impl Potential for ShortRange {
    fn value(&self, x: f64) -> f64 {
        if x < self.x0 {
            self.shell.value(x)
        } else {
            0.0
        }
    }
    fn origin_coupling(&self) -> f64 {
        self.shell.mu_tilde
    }
    fn outer_radius(&self) -> f64 {
        self.x0
    }
}

#[test]
fn short_range_phase_stable_when_x_max_doubles() {
    let p = defaults();
    let pot = PiecewisePotential::regularized(&p).unwrap();
    let short = ShortRange {
        shell: pot.shells[0],
        x0: p.x0,
    };
    let e = 0.5 * 3.0f64.powi(2);
    let a = extract_phase(&short, e, &IntegratorConfig::default()).unwrap();
    let b = extract_phase(
        &short,
        e,
        &IntegratorConfig {
            x_max: Some(2.0 * 61.0 / 3.0),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(wrap(a.delta - b.delta).abs() < 1e-8);
}
