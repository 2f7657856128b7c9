use std::f64::consts::TAU;

use modgauss::cgf::{
    expansion_for, expansion_window, gamma_ratio_expansion, gamma_ratio_sum, log_mellin, upsilon_fast, EnsembleSpec,
};
use modgauss::upsilon::BetaParam;
use modgauss::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 20 points on a spiral inside the window at n = 100.
fn window_grid(beta: &BetaParam) -> Vec<Complex64> {
    let r = expansion_window(100, beta);
    (0..20)
        .map(|j| {
            let radius = r * (0.3 + 0.65 * j as f64 / 19.0);
            Complex64::from_polar(radius, TAU * j as f64 / 20.0)
        })
        .collect()
}

fn normalized_error(z: Complex64, n: u64, beta: &BetaParam) -> f64 {
    let exact = gamma_ratio_sum(z, n, beta).unwrap();
    let approx = gamma_ratio_expansion(z, n, beta).unwrap();
    let a = z.norm();
    n as f64 * (exact - approx).norm() / (a + a * a + a * a * a)
}

#[test]
fn remainder_law() {
    for b in [1.0, 2.0, 4.0, 2.0 / 3.0] {
        let beta = BetaParam::new(b).unwrap();
        let per_n: Vec<f64> = [100u64, 1_000, 10_000, 100_000]
            .iter()
            .map(|&n| window_grid(&beta).into_iter().map(|z| normalized_error(z, n, &beta)).fold(0.0, f64::max))
            .collect();
        let spread = per_n.iter().cloned().fold(0.0, f64::max) / per_n.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 3.0, "beta={b}: {per_n:?}");
    }
}

#[test]
fn telescoping_at_beta_two() {
    let beta = BetaParam::new(2.0).unwrap();
    // Σ ℓ(k+1) − ℓ(k) = ℓ(n+1)
    for n in [100u64, 10_000, 100_000] {
        let exact = gamma_ratio_sum(c(1.0, 0.0), n, &beta).unwrap();
        let lg = modgauss::specfun::log_gamma(c(n as f64 + 1.0, 0.0)).unwrap();
        assert!((exact - lg).norm() <= 1e-9, "n={n}");
    }
}

fn all_specs(n: u64) -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::gue(n).unwrap(),
        EnsembleSpec::laguerre(2.0, n).unwrap(),
        EnsembleSpec::laguerre(1.0, n).unwrap(),
        EnsembleSpec::gram(4.0, n).unwrap(),
        EnsembleSpec::jacobi(2.0, n, 1.5, 0.5).unwrap(),
        EnsembleSpec::circular(2.0, n).unwrap(),
        EnsembleSpec::circular_jacobi(1.0, n, c(0.2, 0.3)).unwrap(),
    ]
}

#[test]
fn residue_converges() {
    let grid = [c(0.3, 0.0), c(-0.2, 0.5), c(0.8, -0.7)];
    let ns = [1_000u64, 10_000, 100_000];
    for i in 0..all_specs(1000).len() {
        for &z in &grid {
            let gaps: Vec<f64> = ns
                .iter()
                .map(|&n| {
                    let spec = all_specs(n)[i];
                    let e = expansion_for(&spec).unwrap();
                    let psi_n = e.log_residue(&spec, z).unwrap().exp();
                    (psi_n - e.log_psi(z).unwrap().exp()).norm()
                })
                .collect();
            let kind = all_specs(10)[i].kind;
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{kind} z={z}: {gaps:?}");
        }
    }
}

#[test]
fn circular_reduction_at_large_n() {
    let n = 100_000;
    for b in [1.0, 2.0, 4.0] {
        let beta = BetaParam::new(b).unwrap();
        let spec = EnsembleSpec::circular(b, n).unwrap();
        let t = (n as f64).ln() / b;
        for z in [c(0.4, 0.0), c(1.0, 0.5)] {
            let residue = log_mellin(&spec, z).unwrap() - z * z * (0.5 * t);
            let h = beta.half();
            let u = |w: Complex64| upsilon_fast(w, &beta).unwrap();
            let limit = u(c(1.0 - h, 0.0)) - u(z * 0.5 + (1.0 - h)) * 2.0 + u(z + (1.0 - h));
            assert!((residue - limit).norm() < 0.01, "beta={b} z={z}");
        }
    }
}

#[test]
fn jacobi_quadratic_term_uses_beta() {
    // log ψ carries (z²/β)·log(τ₁τ₂/(τ₁+τ₂)); the alternative 2z²/β is far off
    let z = c(0.6, 0.0);
    for b in [1.0, 2.0, 4.0] {
        let spec = EnsembleSpec::jacobi(b, 20_000, 0.5, 2.0).unwrap();
        let e = expansion_for(&spec).unwrap();
        let gap = (e.log_residue(&spec, z).unwrap() - e.log_psi(z).unwrap()).norm();
        let tau: f64 = 0.5 * 2.0 / 2.5;
        let alternative_gap = (gap - (z * z).re * tau.ln() / b).abs();
        assert!(gap < 1e-3 && alternative_gap > 10.0 * gap, "beta={b}: {gap} {alternative_gap}");
    }
}

#[test]
fn laplace_expansion_tracks_gaussian_part() {
    // |log-Mellin − zμ − t z²/2 − Υ(z)| ≤ 0.01 at n = 1000 and decreasing
    let z = c(0.5, 0.0);
    let gaps: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let spec = EnsembleSpec::laguerre(2.0, n).unwrap();
            let e = expansion_for(&spec).unwrap();
            (e.log_residue(&spec, z).unwrap() - e.log_psi(z).unwrap()).norm()
        })
        .collect();
    assert!(gaps[0] <= 0.01 && gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
}

#[test]
fn variance_parameter_grows() {
    for ctor in [
        |n| EnsembleSpec::gue(n),
        |n| EnsembleSpec::laguerre(1.0, n),
        |n| EnsembleSpec::gram(2.0, n),
        |n| EnsembleSpec::jacobi(4.0, n, 1.0, 1.0),
        |n| EnsembleSpec::circular(2.0, n),
    ] {
        let ts: Vec<f64> =
            [10u64, 11, 50, 1000].iter().map(|&n| expansion_for(&ctor(n).unwrap()).unwrap().t_n).collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]), "{ts:?}");
    }
}
