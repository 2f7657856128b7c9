use num_complex::Complex64;

use super::quad::{self, QuadratureConfig};
use crate::error::{Error, Result};

/// Evaluate Σ_{k=0}^{n-1} f(k) through the Abel–Plana formula
///
/// ∫₀ⁿ f + ½f(0) − ½f(n) + i∫₀^∞ (f(is) − f(−is))/(e^{2πs}−1) ds
///                       − i∫₀^∞ (f(n+is) − f(n−is))/(e^{2πs}−1) ds.
///
/// The caller vouches that `f` is holomorphic on `0 ≤ Re z ≤ n` and grows
/// slower than `e^{2π|Im z|}`; nothing here can check that.
pub fn abel_plana_sum<F>(f: F, n: u64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if n == 0 {
        return Err(Error::InvalidArgument("abel_plana_sum needs n ≥ 1".into()));
    }
    let top = n as f64;
    let panels = n.min(64) as usize;
    let points: Vec<f64> = (0..=panels).map(|i| top * i as f64 / panels as f64).collect();
    let bulk = quad::integrate(|s| f(Complex64::new(s, 0.0)), &points, cfg)?;

    let kernel = |s: f64| 1.0 / (std::f64::consts::TAU * s).exp_m1();
    let i = Complex64::i();
    let left = quad::integrate_to_infinity(
        |s| (f(Complex64::new(0.0, s)) - f(Complex64::new(0.0, -s))) * kernel(s),
        0.0,
        0.5,
        cfg,
    )?;
    let right = quad::integrate_to_infinity(
        |s| (f(Complex64::new(top, s)) - f(Complex64::new(top, -s))) * kernel(s),
        0.0,
        0.5,
        cfg,
    )?;
    let f0 = f(Complex64::new(0.0, 0.0));
    let fnn = f(Complex64::new(top, 0.0));
    let value = bulk + (f0 - fnn) * 0.5 + i * left - i * right;
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("abel_plana_sum"))
    }
}
