//! The building block Υ of every β-ensemble limiting function.
//!
//! `upsilon_quadrature` evaluates the defining Barnes-G / log-Gamma /
//! Binet-integral expression for arbitrary β > 0. For β/2 rational the
//! closed forms below express Υ with finitely many log Γ and log G terms,
//! and the two routes are used as oracles for each other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, quad, QuadratureConfig, HALF_LN_2PI};

/// Dyson parameter β, optionally with an exact rational form β/2 = p/q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParam {
    beta: f64,
    rational: Option<(u32, u32)>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl BetaParam {
    /// Wraps `beta`, recognising β/2 = p/q with q ≤ 12 when β is (to
    /// rounding) such a fraction.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be positive and finite, got {beta}")));
        }
        let half = 0.5 * beta;
        let rational = (1..=12u32).find_map(|q| {
            let p = (half * q as f64).round();
            if p >= 1.0 && p <= u32::MAX as f64 && (p / q as f64 - half).abs() <= 4.0 * f64::EPSILON * half {
                let p = p as u32;
                let g = gcd(p, q);
                Some((p / g, q / g))
            } else {
                None
            }
        });
        Ok(Self { beta, rational })
    }

    /// β = 2p/q exactly.
    pub fn rational(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!("rational beta needs p, q ≥ 1, got {p}/{q}")));
        }
        let g = gcd(p, q);
        Ok(Self { beta: 2.0 * p as f64 / q as f64, rational: Some((p / g, q / g)) })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// β′ = β/2.
    pub fn half(&self) -> f64 {
        0.5 * self.beta
    }

    /// `(p, q)` in lowest terms with β/2 = p/q, when known.
    pub fn rational_form(&self) -> Option<(u32, u32)> {
        self.rational
    }
}

fn check_strip(z: Complex64, lower: f64, what: &str) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("{what}: non-finite argument {z}")));
    }
    if z.re <= lower {
        return Err(Error::Domain(format!("{what} requires Re(z) > {lower}, got {z}")));
    }
    Ok(())
}

#[inline]
fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Upper integration limit for the Binet integral: beyond it every term of
/// the integrand is below `tol/10`.
fn truncation_point(z: Complex64, half_beta: f64, tol: f64) -> f64 {
    let decay = (z.re + half_beta).min(half_beta);
    let target = (tol / 10.0).max(f64::MIN_POSITIVE);
    let s = (1.0 / (6.0 * decay * target)).ln() / decay;
    s.max(8.0)
}

/// ∫₀^∞ φ(s)(e^{−sz} − 1)/(e^{sβ′} − 1) ds.
fn binet_integral(z: Complex64, half_beta: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if z == real(0.0) {
        return Ok(z);
    }
    let upper = truncation_point(z, half_beta, cfg.abs_tol);
    let mut points = vec![0.0, specfun::BINET_TAYLOR_CROSSOVER, 0.05, 0.5, 2.0];
    let mut p = 8.0;
    while p < upper {
        points.push(p);
        p *= 2.0;
    }
    points.push(upper);
    let integrand = |s: f64| {
        let phi = specfun::binet_phi(s);
        let sb = s * half_beta;
        if sb < 30.0 {
            specfun::expm1(-z * s) * (phi / sb.exp_m1())
        } else {
            // e^{−sz} alone overflows near the left edge of the strip
            let tail = (-sb).exp();
            ((-(z + half_beta) * s).exp() - tail) * (phi / (1.0 - tail))
        }
    };
    quad::integrate(integrand, &points, cfg)
}

/// Υ(z) by quadrature of its defining integral, for `Re z > −β/2`.
pub fn upsilon_quadrature(z: Complex64, beta: &BetaParam, cfg: &QuadratureConfig) -> Result<Complex64> {
    let hb = beta.half();
    check_strip(z, -hb, "upsilon")?;
    if z == real(0.0) {
        return Ok(z);
    }
    let w = z / hb;
    let barnes = specfun::log_barnes_g_with(w, cfg)?;
    let gamma = specfun::ln_gamma_unchecked(w + 1.0);
    let integral = binet_integral(z, hb, cfg)?;
    Ok(barnes * hb - (z - 0.5) * gamma + integral + z * z / beta.beta() + z * 0.5)
}

/// [`upsilon_quadrature`] with the default quadrature configuration.
pub fn upsilon(z: Complex64, beta: &BetaParam) -> Result<Complex64> {
    upsilon_quadrature(z, beta, &QuadratureConfig::default())
}

/// Υ(z) − Υ(z + β/2), which is elementary:
/// ℓ(z+β/2) − (z + β/2 − ½)·log(β/2) − ½·log 2π.
///
/// Used to carry a closed form from `Re z > 0` into the rest of the strip.
pub fn upsilon_step(z: Complex64, half_beta: f64) -> Result<Complex64> {
    let shifted = z + half_beta;
    let lg = specfun::log_gamma(shifted)?;
    Ok(lg - (shifted - 0.5) * half_beta.ln() - HALF_LN_2PI)
}

/// Closed form for β/2 = `halfbeta` ∈ ℕ.
pub fn upsilon_closed_integer(z: Complex64, halfbeta: u32) -> Result<Complex64> {
    if halfbeta == 0 {
        return Err(Error::InvalidArgument("halfbeta must be ≥ 1".into()));
    }
    let h = halfbeta as f64;
    check_strip(z, -h, "upsilon_closed_integer")?;
    if z.re <= -1.0 {
        // log G(1+z) is not available here; step right by β/2 first.
        return Ok(upsilon_closed_integer(z + h, halfbeta)? + upsilon_step(z, h)?);
    }
    let beta = 2.0 * h;
    let mut value = z / beta * (2.0 * HALF_LN_2PI) + z * z / beta * h.ln() - specfun::log_barnes_g(z)? * (2.0 / beta);
    for m in 1..halfbeta {
        let a = m as f64 / h;
        value -= specfun::log_gamma_shift(real(a), z / h)? * a;
    }
    Ok(value)
}

/// Closed form for β/2 = 1/q.
pub fn upsilon_closed_inv_integer(z: Complex64, q: u32) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be ≥ 1".into()));
    }
    let qf = q as f64;
    check_strip(z, -1.0 / qf, "upsilon_closed_inv_integer")?;
    let linear = (0.5 - 0.5 * qf) * (1.0 / qf).ln() + HALF_LN_2PI;
    let mut value = z * linear - specfun::log_barnes_g(z * qf)? / qf;
    for m in 1..q {
        let a = m as f64 / qf;
        value -= specfun::log_gamma_shift(real(a), z)? * (a - 1.0);
    }
    Ok(value)
}

/// Closed form for β/2 = p/q.
pub fn upsilon_closed_rational(z: Complex64, p: u32, q: u32) -> Result<Complex64> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(format!("need p, q ≥ 1, got {p}/{q}")));
    }
    let (pf, qf) = (p as f64, q as f64);
    check_strip(z, -pf / qf, "upsilon_closed_rational")?;
    let linear = (0.5 - 0.5 * qf) * (1.0 / qf).ln() + HALF_LN_2PI;
    let mut value = z * linear;
    for l in 0..p {
        let lf = l as f64;
        let g_shift = specfun::log_barnes_g((z + lf) * (qf / pf))? - specfun::log_barnes_g(real(lf * qf / pf))?;
        value -= g_shift / qf;
        for m in 1..q {
            let mq = m as f64 / qf;
            let base = real(mq + lf / pf);
            value -= specfun::log_gamma_shift(base, z / pf)? * (mq - 1.0);
        }
    }
    Ok(value)
}

/// Whichever closed form applies to `beta`, if β/2 is rational.
pub fn upsilon_closed(z: Complex64, beta: &BetaParam) -> Result<Complex64> {
    match beta.rational_form() {
        Some((p, 1)) => upsilon_closed_integer(z, p),
        Some((1, q)) => upsilon_closed_inv_integer(z, q),
        Some((p, q)) => upsilon_closed_rational(z, p, q),
        None => Err(Error::InvalidArgument(format!("beta = {} has no rational form", beta.beta()))),
    }
}

/// Υ_δ(z) = Υ(z + δ) − Υ(δ).
pub fn upsilon_shifted(z: Complex64, delta: Complex64, beta: &BetaParam) -> Result<Complex64> {
    let hb = beta.half();
    check_strip(delta, -hb, "upsilon_shifted (delta)")?;
    check_strip(z + delta, -hb, "upsilon_shifted (z + delta)")?;
    Ok(upsilon(z + delta, beta)? - upsilon(delta, beta)?)
}

/// Limiting-function logarithm of the GUE log-|det|:
/// log( Γ(½)/Γ((z+1)/2) · G(½)²/G((z+1)/2)² ), for `Re z > −1`.
pub fn upsilon_gue(z: Complex64) -> Result<Complex64> {
    check_strip(z, -1.0, "upsilon_gue")?;
    if z == real(0.0) {
        return Ok(z);
    }
    let half = real(0.5);
    let w = (z + 1.0) * 0.5;
    let gamma = -specfun::log_gamma_shift(half, z * 0.5)?;
    let barnes = specfun::log_barnes_g(real(-0.5))? - specfun::log_barnes_g(w - 1.0)?;
    Ok(gamma + barnes * 2.0)
}
