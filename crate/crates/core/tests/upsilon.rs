use modgauss::specfun::QuadratureConfig;
use modgauss::upsilon::{
    upsilon, upsilon_closed, upsilon_closed_integer, upsilon_closed_inv_integer, upsilon_closed_rational,
    upsilon_quadrature, upsilon_shifted, BetaParam,
};
use modgauss::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 50 points with Re z ∈ (−β/2 + 0.05, 3), |Im z| ≤ 2.
fn strip_grid(beta: f64) -> Vec<Complex64> {
    let lo = -beta / 2.0 + 0.05;
    let mut zs = Vec::with_capacity(50);
    for i in 0..10 {
        let re = lo + 0.01 + (2.99 - lo - 0.01) * i as f64 / 9.0;
        for im in [-2.0, -0.9, 0.0, 0.6, 2.0] {
            zs.push(c(re, im));
        }
    }
    zs
}

#[test]
fn quadrature_agrees_with_closed_forms() {
    for b in [1.0, 2.0, 3.0, 4.0, 2.0 / 3.0, 0.5] {
        let beta = BetaParam::new(b).unwrap();
        assert!(beta.rational_form().is_some());
        let mut worst: f64 = 0.0;
        for z in strip_grid(b) {
            let q = upsilon(z, &beta).unwrap();
            let cl = upsilon_closed(z, &beta).unwrap();
            worst = worst.max((q - cl).norm());
        }
        assert!(worst <= 1e-8, "beta={b}: worst {worst:e}");
    }
}

#[test]
fn vanishes_at_origin() {
    for b in [0.3, 1.0, 2.0, 4.0, 9.5] {
        let beta = BetaParam::new(b).unwrap();
        assert_eq!(upsilon(c(0.0, 0.0), &beta).unwrap(), c(0.0, 0.0));
        for d in [c(0.0, 0.0), c(0.4, -1.0), c(-0.1, 0.2)] {
            assert_eq!(upsilon_shifted(c(0.0, 0.0), d, &beta).unwrap(), c(0.0, 0.0));
        }
    }
}

#[test]
fn holomorphic_in_strip() {
    let h = 1e-4;
    for b in [1.0, 2.5] {
        let beta = BetaParam::new(b).unwrap();
        for z in [c(-0.3, 0.4), c(0.8, -1.2), c(2.0, 0.0)] {
            let f = |w: Complex64| upsilon(w, &beta).unwrap();
            let dx = (f(z + h) - f(z - h)) / (2.0 * h);
            let dy = (f(z + c(0.0, h)) - f(z - c(0.0, h))) / (2.0 * h);
            let residual = (dy - c(0.0, 1.0) * dx).norm();
            assert!(residual <= 1e-5, "beta={b} z={z}: {residual:e}");
        }
    }
}

#[test]
fn specialization_chain() {
    for k in 1..=4u32 {
        for z in strip_grid(2.0).into_iter().step_by(3) {
            if z.re <= -1.0 {
                continue;
            }
            let a = upsilon_closed_rational(z, k, 1).unwrap();
            let b = upsilon_closed_integer(z, k).unwrap();
            assert!((a - b).norm() < 1e-10, "p={k} z={z}");
            if z.re > -1.0 / k as f64 {
                let a = upsilon_closed_rational(z, 1, k).unwrap();
                let b = upsilon_closed_inv_integer(z, k).unwrap();
                assert!((a - b).norm() < 1e-10, "q={k} z={z}");
            }
        }
    }
}

#[test]
fn rational_p_equals_q_one_is_integer_one() {
    for z in strip_grid(2.0).into_iter().take(20) {
        let a = upsilon_closed_rational(z, 1, 1).unwrap();
        let b = upsilon_closed_integer(z, 1).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn irrational_beta_uses_quadrature_only() {
    let beta = BetaParam::new(std::f64::consts::E).unwrap();
    assert!(upsilon_closed(c(0.5, 0.0), &beta).is_err());
    let loose = QuadratureConfig { abs_tol: 1e-10, rel_tol: 1e-10, ..QuadratureConfig::default() };
    let a = upsilon_quadrature(c(0.5, 0.5), &beta, &loose).unwrap();
    let b = upsilon(c(0.5, 0.5), &beta).unwrap();
    assert!((a - b).norm() < 1e-8);
    // β near 3: continuity with the closed form
    let near = BetaParam::new(3.0 + 1e-7).unwrap();
    assert!(near.rational_form().is_none());
    let d = upsilon(c(0.5, 0.0), &near).unwrap() - upsilon_closed_rational(c(0.5, 0.0), 3, 2).unwrap();
    assert!(d.norm() < 1e-6);
}

#[test]
fn tolerance_failure_is_reported() {
    let beta = BetaParam::new(1.0).unwrap();
    let starved =
        QuadratureConfig { max_subdivisions: 1, abs_tol: 1e-15, rel_tol: 1e-15, ..QuadratureConfig::default() };
    assert!(upsilon_quadrature(c(0.4, 1.0), &beta, &starved).is_err());
}
