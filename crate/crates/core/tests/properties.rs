use modgauss::cgf::{log_mellin, log_mellin_laguerre, EnsembleSpec};
use modgauss::specfun::{log_barnes_g, log_gamma};
use modgauss::summation::CompensatedSum;
use modgauss::upsilon::{upsilon, upsilon_step, BetaParam};
use modgauss::Complex64;
use proptest::prelude::*;

fn wrapped(d: Complex64) -> f64 {
    let k = (d.im / std::f64::consts::TAU).round();
    (d - Complex64::new(0.0, k * std::f64::consts::TAU)).norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn gamma_recurrence(re in 0.01f64..80.0, im in -80.0f64..80.0) {
        let z = Complex64::new(re, im);
        let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
        prop_assert!(wrapped(d) < 1e-9);
    }

    #[test]
    fn barnes_recurrence(re in -0.95f64..40.0, im in -30.0f64..30.0) {
        let w = Complex64::new(re, im);
        let d = log_barnes_g(w + 1.0).unwrap() - log_barnes_g(w).unwrap() - log_gamma(w + 1.0).unwrap();
        prop_assert!(wrapped(d) < 1e-9);
    }

    #[test]
    fn upsilon_step_relation(beta in 0.4f64..6.0, t in 0.02f64..1.0, im in -1.5f64..1.5) {
        let b = BetaParam::new(beta).unwrap();
        let z = Complex64::new(-b.half() + t * (b.half() + 1.0), im);
        let lhs = upsilon(z, &b).unwrap();
        let rhs = upsilon(z + b.half(), &b).unwrap() + upsilon_step(z, b.half()).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn transforms_real_on_real(n in 1u64..300, beta in 0.3f64..5.0, x in -0.1f64..3.0) {
        let z = Complex64::new(x, 0.0);
        for spec in [
            EnsembleSpec::laguerre(beta, n).unwrap(),
            EnsembleSpec::gram(beta, n).unwrap(),
            EnsembleSpec::circular(beta, n).unwrap(),
        ] {
            let v = log_mellin(&spec, z).unwrap();
            prop_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1.0));
        }
    }

    #[test]
    fn laguerre_conjugate_symmetry(n in 1u64..200, re in -0.4f64..2.0, im in -3.0f64..3.0) {
        let b = BetaParam::new(1.0).unwrap();
        let z = Complex64::new(re, im);
        let a = log_mellin_laguerre(z, n, &b).unwrap();
        let c = log_mellin_laguerre(z.conj(), n, &b).unwrap();
        prop_assert!((a - c.conj()).norm() < 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn compensated_sum_is_exact_for_cancelling_terms(xs in proptest::collection::vec(-1e12f64..1e12, 1..200)) {
        let mut s = CompensatedSum::new();
        for &x in &xs { s.add(x); s.add(1.0); }
        for &x in xs.iter().rev() { s.add(-x); }
        prop_assert_eq!(s.value(), xs.len() as f64);
    }

    #[test]
    fn gue_pairs_of_factors(n in 1u64..400, x in -0.9f64..3.0) {
        // n odd adds one factor to n−1
        let z = Complex64::new(x, 0.0);
        let m = n | 1;
        let hi = log_mellin(&EnsembleSpec::gue(m).unwrap(), z).unwrap();
        let lo = if m == 1 { Complex64::new(0.0, 0.0) } else { log_mellin(&EnsembleSpec::gue(m - 1).unwrap(), z).unwrap() };
        let j = (m / 2) as f64;
        let factor = z * (0.5 * std::f64::consts::LN_2) + log_gamma(z * 0.5 + 0.5 + j).unwrap() - log_gamma(Complex64::new(0.5 + j, 0.0)).unwrap();
        prop_assert!((hi - lo - factor).norm() < 1e-9);
    }
}
