//! Complex special functions on the right half-plane: log-Gamma, digamma,
//! log-Barnes-G and the Binet kernel, plus the adaptive quadrature and the
//! Abel–Plana evaluator built on top of them.
//!
//! All logarithms are the branch obtained by continuation from the positive
//! real axis, which on `Re z > 0` coincides with summing principal logs in the
//! recurrences used here. Nothing in this module reflects into the left
//! half-plane.

mod abel_plana;
pub mod quad;

pub use abel_plana::abel_plana_sum;
pub use quad::QuadratureConfig;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::summation::CompensatedComplexSum;

/// ζ′(−1), to 21 significant digits.
#[allow(clippy::excessive_precision)]
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_21;

/// ½·log(2π).
#[allow(clippy::excessive_precision)]
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;

/// Below this argument `binet_phi` switches to its Taylor polynomial.
pub const BINET_TAYLOR_CROSSOVER: f64 = 1e-3;

/// Radius beyond which the Stirling-type series are used directly.
const ASYMPTOTIC_RADIUS: f64 = 15.0;

/// B_{2k} / (2k(2k-1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2k} / (2k), k = 1..8.
const DIGAMMA_SERIES: [f64; 8] =
    [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32_760.0, 1.0 / 12.0, -3617.0 / 8160.0];

/// B_{2k+2} / (4k(k+1)), k = 1..6: the tail of the log-G asymptotic series.
const BARNES_SERIES: [f64; 6] =
    [-1.0 / 240.0, 1.0 / 1008.0, -1.0 / 1440.0, 1.0 / 1056.0, -691.0 / 327_600.0, 1.0 / 144.0];

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure_finite(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn require_right_half_plane(z: Complex64, what: &str) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("{what}: non-finite argument {z}")));
    }
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("{what} requires Re(z) > 0, got {z}")));
    }
    Ok(())
}

/// `e^z − 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    c(z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin, z.re.exp() * z.im.sin())
}

/// Principal `log(1 + w)` without cancellation for small `|w|`.
pub fn log1p(w: Complex64) -> Complex64 {
    if w.norm_sqr() < 0.25 {
        let modulus_arg = 2.0 * w.re + w.re * w.re + w.im * w.im;
        c(0.5 * modulus_arg.ln_1p(), w.im.atan2(1.0 + w.re))
    } else {
        (c(1.0, 0.0) + w).ln()
    }
}

/// The Binet kernel φ(s) = (1/2 − 1/s + 1/(eˢ − 1)) / s.
///
/// φ is even, so negative arguments are folded onto `|s|`.
pub fn binet_phi(s: f64) -> f64 {
    let s = s.abs();
    if s < BINET_TAYLOR_CROSSOVER {
        let s2 = s * s;
        1.0 / 12.0 - s2 / 720.0 + s2 * s2 / 30_240.0
    } else {
        (0.5 - 1.0 / s + 1.0 / s.exp_m1()) / s
    }
}

fn stirling_tail(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut acc = c(0.0, 0.0);
    for coeff in STIRLING.iter().rev() {
        acc = acc * inv2 + *coeff;
    }
    acc * inv
}

/// log Γ(w) from the Stirling series; assumes `|w| ≥ ASYMPTOTIC_RADIUS`, `Re w > 0`.
fn ln_gamma_asymptotic(w: Complex64) -> Complex64 {
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + stirling_tail(w)
}

pub(crate) fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0) {
        return c(0.0, 0.0);
    }
    let mut w = z;
    let mut logs = CompensatedComplexSum::new();
    while w.norm() < ASYMPTOTIC_RADIUS {
        logs.add(w.ln());
        w += 1.0;
    }
    ln_gamma_asymptotic(w) - logs.value()
}

/// Principal-branch log Γ(z) for `Re z > 0`.
///
/// Absolute error stays near 1e-14 for `|z| ≤ 100`; beyond that the error is
/// relative (~1e-15·|log Γ(z)|), which is what double precision allows.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    require_right_half_plane(z, "log_gamma")?;
    ensure_finite(ln_gamma_unchecked(z), "log_gamma")
}

/// Ψ(z) = d/dz log Γ(z) for `Re z > 0`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    require_right_half_plane(z, "digamma")?;
    let mut w = z;
    let mut recip = CompensatedComplexSum::new();
    while w.norm() < ASYMPTOTIC_RADIUS {
        recip.add(w.inv());
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = c(0.0, 0.0);
    for coeff in DIGAMMA_SERIES.iter().rev() {
        series = series * inv2 + *coeff;
    }
    let value = w.ln() - inv * 0.5 - series * inv2 - recip.value();
    ensure_finite(value, "digamma")
}

/// Stirling form of log Γ(a+z) − log Γ(a) for large `|a|`, written so the
/// large terms cancel analytically.
fn ln_gamma_shift_asymptotic(a: Complex64, z: Complex64) -> Complex64 {
    (a - 0.5) * log1p(z / a) + z * (a + z).ln() - z + (stirling_tail(a + z) - stirling_tail(a))
}

pub(crate) fn ln_gamma_shift_unchecked(a: Complex64, z: Complex64) -> Complex64 {
    if z == c(0.0, 0.0) {
        return z;
    }
    let zabs = z.norm();
    if zabs > 32.0 && zabs > 0.5 * a.norm() {
        return ln_gamma_unchecked(a + z) - ln_gamma_unchecked(a);
    }
    let radius = ASYMPTOTIC_RADIUS.max(2.0 * zabs);
    let mut base = a;
    let mut logs = CompensatedComplexSum::new();
    while base.norm() < radius || (base + z).norm() < ASYMPTOTIC_RADIUS {
        logs.add(log1p(z / base));
        base += 1.0;
    }
    ln_gamma_shift_asymptotic(base, z) - logs.value()
}

/// log Γ(a + z) − log Γ(a), accurate even when both terms are huge.
///
/// Requires `Re a > 0` and `Re(a + z) > 0`. This is the building block of
/// every exact transform in [`crate::cgf`].
pub fn log_gamma_shift(a: Complex64, z: Complex64) -> Result<Complex64> {
    require_right_half_plane(a, "log_gamma_shift (base)")?;
    require_right_half_plane(a + z, "log_gamma_shift (shifted)")?;
    ensure_finite(ln_gamma_shift_unchecked(a, z), "log_gamma_shift")
}

/// s / (e^{2πs} − 1), continuous at 0.
fn planck_weight(s: f64) -> f64 {
    let x = std::f64::consts::TAU * s;
    if x < 1e-8 {
        1.0 / std::f64::consts::TAU
    } else {
        s / x.exp_m1()
    }
}

/// log G(1+w) for `Re w ≥ 1` from the integral representation, with the
/// logarithmic endpoint singularity removed analytically
/// (∫₀^∞ s·log s /(e^{2πs}−1) ds = ζ′(−1)/2).
fn ln_barnes_g_integral(w: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let inv_w2 = (w * w).inv();
    let integrand = |s: f64| log1p(inv_w2 * (s * s)) * planck_weight(s);
    let tail = quad::integrate(integrand, &[0.0, 0.5, 1.0, 2.0, 4.0, 8.0], cfg)?;
    let lw = w.ln();
    Ok(w * w * 0.5 * lw - w * w * 0.75 + w * HALF_LN_2PI - lw / 12.0 + ZETA_PRIME_MINUS_ONE - tail)
}

/// log G(1+z) for `Re z > −1`, where G is the Barnes G-function.
///
/// Arguments with `Re z < 1` are first moved right with
/// G(1+z+m) = G(1+z)·Γ(z+1)⋯Γ(z+m), then the integral representation is
/// used. Absolute error ≲ 1e-12 for `|z| ≤ 100`.
pub fn log_barnes_g(z: Complex64) -> Result<Complex64> {
    log_barnes_g_with(z, &QuadratureConfig::default())
}

pub fn log_barnes_g_with(z: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.re <= -1.0 {
        return Err(Error::Domain(format!("log_barnes_g requires Re(z) > -1, got {z}")));
    }
    if z == c(0.0, 0.0) {
        return Ok(z);
    }
    let shift = if z.re < 1.0 { (1.0 - z.re).ceil() as usize } else { 0 };
    let w = z + shift as f64;
    let mut value = ln_barnes_g_integral(w, cfg)?;
    for j in 1..=shift {
        value -= ln_gamma_unchecked(z + j as f64);
    }
    ensure_finite(value, "log_barnes_g")
}

/// Large-argument expansion of log G(1+z): the leading terms plus six
/// Bernoulli corrections. Meant as an independent check of
/// [`log_barnes_g`]; accurate to ~1e-15 once `|z| ≥ 10`.
pub fn log_barnes_g_asymptotic(z: Complex64) -> Result<Complex64> {
    require_right_half_plane(z, "log_barnes_g_asymptotic")?;
    let lz = z.ln();
    let inv2 = (z * z).inv();
    let mut series = c(0.0, 0.0);
    for coeff in BARNES_SERIES.iter().rev() {
        series = (series + *coeff) * inv2;
    }
    let value = z * z * 0.5 * lz - z * z * 0.75 + z * HALF_LN_2PI - lz / 12.0 + ZETA_PRIME_MINUS_ONE + series;
    ensure_finite(value, "log_barnes_g_asymptotic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    /// Equality modulo 2πi, for comparing against principal-value references.
    fn close_mod_2pi(a: Complex64, b: Complex64, tol: f64) -> bool {
        let d = a - b;
        let k = (d.im / std::f64::consts::TAU).round();
        (d.re.abs() < tol) && ((d.im - k * std::f64::consts::TAU).abs() < tol)
    }

    #[test]
    fn binet_phi_anchor_values() {
        assert_eq!(binet_phi(0.0), 1.0 / 12.0);
        assert!((binet_phi(1e-8) - 0.083_333_333_333_333_333_194_4).abs() < 2e-19);
        assert_abs_diff_eq!(binet_phi(10.0), 0.040_004_540_199_100_968_776_8, epsilon = 1e-15);
        // both sides of the crossover agree
        let lo = binet_phi(BINET_TAYLOR_CROSSOVER * (1.0 - 1e-12));
        let hi = binet_phi(BINET_TAYLOR_CROSSOVER * (1.0 + 1e-12));
        // the direct formula loses ~7 digits to cancellation at the crossover
        assert!((lo - hi).abs() < 1e-9);
        assert_eq!(binet_phi(-2.5), binet_phi(2.5));
    }

    #[test]
    fn binet_phi_is_positive_and_bounded() {
        for i in 0..10_000 {
            let s = 100.0 * i as f64 / 9_999.0;
            let v = binet_phi(s);
            assert!(v > 0.0 && v <= 1.0 / 12.0, "phi({s}) = {v}");
        }
    }

    #[test]
    fn log_gamma_reference_values() {
        assert_eq!(log_gamma(r(1.0)).unwrap(), r(0.0));
        assert_abs_diff_eq!(log_gamma(r(0.5)).unwrap().re, 0.572_364_942_924_700_087_07, epsilon = 1e-14);
        let v = log_gamma(c(1.0, 1.0)).unwrap();
        assert!((v - c(-0.650_923_199_301_856_338_9, -0.301_640_320_467_533_197_9)).norm() < 1e-14);
        let v = log_gamma(c(3.5, -7.0)).unwrap();
        assert!((v - c(-4.153_889_091_342_364_770_4, -10.714_294_798_948_088_812)).norm() < 1e-13);
        // continuous branch: imaginary part is not reduced mod 2π
        let v = log_gamma(c(0.1, 40.0)).unwrap();
        assert!((v - c(-63.388_462_569_939_019_935, 106.925_901_267_644_059_6)).norm() < 1e-12);
    }

    #[test]
    fn log_gamma_large_argument_relative_accuracy() {
        let z = c(7.5e5, 3.0e5);
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-14);
    }

    #[test]
    fn log_gamma_domain() {
        assert!(matches!(log_gamma(r(0.0)), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(c(-0.5, 2.0)), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(c(f64::NAN, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_is_real_on_real_axis() {
        for k in 1..200 {
            assert_eq!(log_gamma(r(0.07 * k as f64)).unwrap().im, 0.0);
        }
    }

    #[test]
    fn digamma_reference_values() {
        let euler = 0.577_215_664_901_532_860_6;
        assert_abs_diff_eq!(digamma(r(1.0)).unwrap().re, -euler, epsilon = 1e-14);
        assert_abs_diff_eq!(digamma(r(2.0)).unwrap().re, 1.0 - euler, epsilon = 1e-14);
        assert_abs_diff_eq!(digamma(r(0.5)).unwrap().re, -1.963_510_026_021_423_479_4, epsilon = 1e-14);
        let v = digamma(c(2.0, 3.0)).unwrap();
        assert!((v - c(1.207_980_710_710_150_880_8, 1.104_129_680_587_576_209_7)).norm() < 1e-14);
        assert!(digamma(r(-1.0)).is_err());
    }

    #[test]
    fn log_gamma_shift_matches_difference() {
        for &(a, z) in &[(r(0.3), c(0.2, 0.1)), (r(50.0), c(-0.4, 1.3)), (c(7.0, 2.0), c(0.5, -0.5)), (r(2.0), r(60.0))]
        {
            let direct = ln_gamma_unchecked(a + z) - ln_gamma_unchecked(a);
            let shift = log_gamma_shift(a, z).unwrap();
            let scale = 1.0_f64.max(direct.norm());
            assert!((direct - shift).norm() / scale < 1e-13, "a={a} z={z}: {direct} vs {shift}");
        }
        let v = log_gamma_shift(r(1e6), c(0.7, 0.2)).unwrap();
        assert!((v - c(9.670_857_265_575_002_259_3, 2.763_102_151_592_860_640_9)).norm() < 1e-14);
        // ℓ(a+1) − ℓ(a) = log a, exactly representable check at large a
        let a = r(123_456.0);
        assert_abs_diff_eq!(log_gamma_shift(a, r(1.0)).unwrap().re, 123_456f64.ln(), epsilon = 1e-14);
        assert!(log_gamma_shift(r(0.2), r(-0.3)).is_err());
    }

    #[test]
    fn log_barnes_g_reference_values() {
        assert_eq!(log_barnes_g(r(0.0)).unwrap(), r(0.0));
        assert_abs_diff_eq!(log_barnes_g(r(1.0)).unwrap().re, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(log_barnes_g(r(3.0)).unwrap().re, std::f64::consts::LN_2, epsilon = 1e-13);
        // G(1/2)
        assert_abs_diff_eq!(log_barnes_g(r(-0.5)).unwrap().re, -0.505_433_054_489_695_382_8, epsilon = 1e-12);
        let cases = [
            (c(1.0, 1.0), c(-0.060_978_179_283_356_929_14, -0.297_916_374_464_555_060_9)),
            (c(0.2, 5.0), c(-3.022_231_208_322_686_237_7, -1.960_858_172_161_816_466_8)),
            (c(-0.7, 0.3), c(-0.595_108_774_492_447_865_1, 0.842_909_149_896_574_279_4)),
            (r(50.0), r(3_060.484_258_718_088_766_333_5)),
            (c(30.0, 40.0), c(-1_929.885_580_099_932_288_3, -0.967_353_939_545_319_588)),
        ];
        for (z, expected) in cases {
            let got = log_barnes_g(z).unwrap();
            assert!(close_mod_2pi(got, expected, 1e-10), "z={z}: {got} vs {expected}");
        }
    }

    #[test]
    fn log_barnes_g_agrees_with_asymptotic_series() {
        for &z in &[r(12.0), c(20.0, 5.0), c(15.0, -30.0), r(90.0), c(60.0, 70.0)] {
            let a = log_barnes_g(z).unwrap();
            let b = log_barnes_g_asymptotic(z).unwrap();
            assert!((a - b).norm() < 1e-10, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn log_barnes_g_domain() {
        assert!(matches!(log_barnes_g(r(-1.0)), Err(Error::Domain(_))));
        assert!(matches!(log_barnes_g(c(-1.5, 3.0)), Err(Error::Domain(_))));
        assert!(log_barnes_g(c(-0.99, 0.0)).is_ok());
    }

    #[test]
    fn expm1_and_log1p_small_arguments() {
        let w = c(1e-12, -3e-12);
        assert!((expm1(w) - w).norm() < 1e-23);
        assert!((log1p(w) - w).norm() < 1e-23);
        let w = c(0.3, 0.4);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
        assert!((log1p(w) - (w + 1.0).ln()).norm() < 1e-15);
    }
}
