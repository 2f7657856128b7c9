//! Quantitative predictions read off an [`Expansion`]: Gaussian tails,
//! precise moderate deviations, Berry–Esseen bounds and local-limit window
//! probabilities.
//!
//! Only real arguments of the limiting function are ever used.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cgf::Expansion;
use crate::error::{Error, Result};

/// Constants (γ, D, v, w, K₁, K₂) of a zone of control
/// |ψ_n(iξ) − 1| ≤ K₁|ξ|^v e^{K₂|ξ|^w} for |ξ| ≤ D t_n^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneOfControl {
    pub gamma: f64,
    pub d: f64,
    pub v: f64,
    pub w: f64,
    pub k1: f64,
    pub k2: f64,
}

impl ZoneOfControl {
    /// β-ensemble zone as concluded at the end of the proof:
    /// v = 1, w = 3, K₂ = 8/β², D = 1/(4K₂), γ = 0.
    pub fn beta_ensemble(beta: f64, k1: f64) -> Self {
        Self::with_k2(8.0 / (beta * beta), k1)
    }

    /// Same as [`Self::beta_ensemble`] with the larger K₂ = 8/β² + 9/β + 4
    /// printed in the theorem statements.
    pub fn beta_ensemble_theorem(beta: f64, k1: f64) -> Self {
        Self::with_k2(8.0 / (beta * beta) + 9.0 / beta + 4.0, k1)
    }

    fn with_k2(k2: f64, k1: f64) -> Self {
        Self { gamma: 0.0, d: 1.0 / (4.0 * k2), v: 1.0, w: 3.0, k1, k2 }
    }

    /// GUE constants as printed in the theorem: C(1/22, 1, (3+K)e^{7/4+3K}).
    pub fn gue_theorem(k: f64) -> Self {
        Self { gamma: 0.0, d: 1.0 / 22.0, v: 1.0, w: 3.0, k1: (3.0 + k) * (1.75 + 3.0 * k).exp(), k2: 1.0 }
    }

    /// GUE constants from the proof: D = ¼, K₂ = 1, K₁ = K(3+K)e^K.
    pub fn gue_proof(k: f64) -> Self {
        Self { gamma: 0.0, d: 0.25, v: 1.0, w: 3.0, k1: k * (3.0 + k) * k.exp(), k2: 1.0 }
    }

    /// Condition (Z2), plus positivity of the constants.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Zone(m));
        let all_finite = [self.gamma, self.d, self.v, self.w, self.k1, self.k2].iter().all(|x| x.is_finite());
        if !all_finite {
            return fail("non-finite zone constant".into());
        }
        if !(self.d > 0.0 && self.k1 > 0.0 && self.k2 > 0.0) {
            return fail(format!("D, K1, K2 must be positive: {self:?}"));
        }
        if self.v < 1.0 {
            return fail(format!("v must be ≥ 1, got {}", self.v));
        }
        if self.w < 2.0 {
            return fail(format!("w must be ≥ 2, got {}", self.w));
        }
        let gamma_max = 1.0 / (self.w - 2.0);
        if !(self.gamma > -0.5 && self.gamma <= gamma_max) {
            return fail(format!("gamma = {} outside (-1/2, {gamma_max}]", self.gamma));
        }
        let d_max = (1.0 / (4.0 * self.k2)).powf(1.0 / (self.w - 2.0));
        if self.d > d_max * (1.0 + 1e-12) {
            return fail(format!("D = {} exceeds (1/(4 K2))^(1/(w-2)) = {d_max}", self.d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Clt,
    MdpUpper,
    MdpLower,
    Llt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPrediction {
    pub probability: f64,
    pub regime: Regime,
    pub leading_term: f64,
    /// ψ(x), or 1 where no correction applies.
    pub correction: f64,
}

/// P[N(0,1) ≥ y].
pub fn clt_tail(y: f64) -> f64 {
    0.5 * libm::erfc(y / SQRT_2)
}

/// Standard normal distribution function.
pub fn normal_cdf(y: f64) -> f64 {
    0.5 * libm::erfc(-y / SQRT_2)
}

/// Gaussian prediction P[X_n ≥ y√t_n] ≈ P[N(0,1) ≥ y].
pub fn clt_prediction(y: f64) -> TailPrediction {
    let p = clt_tail(y);
    TailPrediction { probability: p, regime: Regime::Clt, leading_term: p, correction: 1.0 }
}

/// ψ(x) = exp(log ψ(x)) at real `x`.
pub fn psi_real(exp: &Expansion, x: f64) -> Result<f64> {
    Ok(exp.log_psi(Complex64::new(x, 0.0))?.re.exp())
}

/// Moderate-deviation prediction for P[X_n ≥ t_n x] (x > 0) or
/// P[X_n ≤ t_n x] (x < 0), where X_n is the centered statistic:
/// e^{−t_n x²/2}/(|x|√(2π t_n)) · ψ(x).
pub fn mdp_probability(exp: &Expansion, x: f64) -> Result<TailPrediction> {
    if !x.is_finite() || x == 0.0 {
        return Err(Error::Domain(format!("moderate deviations need real x ≠ 0, got {x}")));
    }
    let (c, d) = exp.strip;
    if !(x > c && x < d) {
        return Err(Error::Domain(format!("x = {x} outside the strip ({c}, {d})")));
    }
    let t = exp.t_n;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("degenerate variance parameter t_n = {t}")));
    }
    let leading = (-0.5 * t * x * x).exp() / (x.abs() * (2.0 * PI * t).sqrt());
    let correction = psi_real(exp, x)?;
    let regime = if x > 0.0 { Regime::MdpUpper } else { Regime::MdpLower };
    Ok(TailPrediction {
        probability: (leading * correction).clamp(0.0, 1.0),
        regime,
        leading_term: leading,
        correction,
    })
}

/// C(D, v, K₁) = (3/2π)·(2^{v−1}Γ(v/2)K₁ + (7/D)√(π/2)).
pub fn berry_esseen_constant(d: f64, v: f64, k1: f64) -> f64 {
    let first = 2f64.powf(v - 1.0) * libm::tgamma(v / 2.0) * k1;
    3.0 / (2.0 * PI) * (first + 7.0 / d * (PI / 2.0).sqrt())
}

/// Upper bound C(D, v, K₁)·t_n^{−(γ+½)} on the Kolmogorov distance between
/// X_n/√t_n and N(0,1).
pub fn berry_esseen_bound(exp: &Expansion, zone: &ZoneOfControl) -> Result<f64> {
    zone.validate()?;
    if zone.gamma > (zone.v - 1.0) / 2.0 {
        return Err(Error::Zone(format!("gamma = {} exceeds (v-1)/2 = {}", zone.gamma, (zone.v - 1.0) / 2.0)));
    }
    if !(exp.t_n > 0.0) {
        return Err(Error::Domain(format!("degenerate variance parameter t_n = {}", exp.t_n)));
    }
    Ok(berry_esseen_constant(zone.d, zone.v, zone.k1) * exp.t_n.powf(-(zone.gamma + 0.5)))
}

/// Local-limit prediction P[X_n/√t_n ∈ t_n^{−δ}(a, b)] ≈ (b−a)/(√(2π)·t_n^δ)
/// at the origin, for 0 ≤ δ ≤ ½.
pub fn llt_window_probability(exp: &Expansion, a: f64, b: f64, delta_exp: f64) -> Result<f64> {
    llt_checked(exp, a, b, delta_exp, 0.5)
}

/// [`llt_window_probability`] with δ limited by the zone: 0 ≤ δ < γ + ½.
pub fn llt_window_probability_in_zone(
    exp: &Expansion,
    a: f64,
    b: f64,
    delta_exp: f64,
    zone: &ZoneOfControl,
) -> Result<f64> {
    zone.validate()?;
    let limit = zone.gamma + 0.5;
    if delta_exp >= limit {
        return Err(Error::Domain(format!("delta_exp = {delta_exp} must be < gamma + 1/2 = {limit}")));
    }
    llt_checked(exp, a, b, delta_exp, limit)
}

fn llt_checked(exp: &Expansion, a: f64, b: f64, delta_exp: f64, limit: f64) -> Result<f64> {
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("window needs a < b, got ({a}, {b})")));
    }
    if !(0.0..=limit).contains(&delta_exp) {
        return Err(Error::Domain(format!("delta_exp = {delta_exp} outside [0, {limit}]")));
    }
    if !(exp.t_n > 0.0) {
        return Err(Error::Domain(format!("degenerate variance parameter t_n = {}", exp.t_n)));
    }
    Ok((b - a) / ((2.0 * PI).sqrt() * exp.t_n.powf(delta_exp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::{expansion_for, EnsembleSpec};
    use std::sync::Arc;

    fn laguerre(n: u64) -> Expansion {
        expansion_for(&EnsembleSpec::laguerre(2.0, n).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_tail() {
        assert_eq!(clt_tail(0.0), 0.5);
        assert!((clt_tail(1.959_964) - 0.025).abs() < 1e-6);
        assert!((clt_tail(-40.0) - 1.0).abs() < 1e-15);
        // scipy.stats.norm.sf
        assert!((clt_tail(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((clt_tail(5.0) - 2.866_515_718_791_939e-7).abs() < 1e-19);
        assert!((normal_cdf(0.3) + clt_tail(0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_arithmetic() {
        let c = berry_esseen_constant(0.25, 1.0, 1.0);
        let expected = 3.0 / (2.0 * PI) * (PI.sqrt() + 28.0 * (PI / 2.0).sqrt());
        assert!((c - expected).abs() < 1e-13 && (c - 17.60).abs() < 5e-3);
        let no_k1 = berry_esseen_constant(0.25, 2.0, 0.0);
        assert!((no_k1 - 3.0 / (2.0 * PI) * 28.0 * (PI / 2.0).sqrt()).abs() < 1e-13);
        let a = berry_esseen_constant(0.25, 1.0, 0.0);
        let b = berry_esseen_constant(0.5, 1.0, 0.0);
        assert!((a / b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zone_checks() {
        let e = laguerre(1000);
        let z = ZoneOfControl::beta_ensemble(2.0, 1.0);
        assert_eq!(z.k2, 2.0);
        assert_eq!(z.d, 0.125);
        let bound = berry_esseen_bound(&e, &z).unwrap();
        assert!((bound - berry_esseen_constant(0.125, 1.0, 1.0) / e.t_n.sqrt()).abs() < 1e-14);
        let bad = ZoneOfControl { gamma: 2.0, ..z };
        assert!(matches!(berry_esseen_bound(&e, &bad), Err(Error::Zone(_))));
        let too_wide = ZoneOfControl { d: 0.2, ..z };
        assert!(too_wide.validate().is_err());
        assert!(ZoneOfControl::beta_ensemble_theorem(1.0, 1.0).validate().is_ok());
        assert!(ZoneOfControl::gue_theorem(1.0).validate().is_ok());
        assert!(ZoneOfControl::gue_proof(1.0).validate().is_ok());
        let b1 = berry_esseen_bound(&laguerre(100), &z).unwrap();
        let b2 = berry_esseen_bound(&laguerre(10_000), &z).unwrap();
        assert!(b2 < b1);
    }

    #[test]
    fn moderate_deviations() {
        let e = laguerre(10_000);
        let p = mdp_probability(&e, 0.5).unwrap();
        assert_eq!(p.regime, Regime::MdpUpper);
        assert!(p.correction > 0.0 && p.probability > 0.0 && p.probability < 1.0);
        assert_eq!(mdp_probability(&e, -0.5).unwrap().regime, Regime::MdpLower);
        assert!(mdp_probability(&e, 0.0).is_err());
        assert!(mdp_probability(&e, -1.5).is_err());
        assert_eq!(psi_real(&e, 0.0).unwrap(), 1.0);
        let small = mdp_probability(&e, 1e-6).unwrap();
        assert!(small.leading_term > 1e3);
    }

    #[test]
    fn boundary_consistency() {
        // clt_tail(x√t)·ψ(x)/prediction is the Mills factor y·Q(y)/φ(y), y = x√t
        let mills = |y: f64| y * clt_tail(y) * (2.0 * PI).sqrt() * (0.5 * y * y).exp();
        let e = laguerre(1_000_000);
        let x = 0.3;
        let y = x * e.t_n.sqrt();
        let p = mdp_probability(&e, x).unwrap();
        let ratio = clt_tail(y) * p.correction / p.probability;
        assert!((ratio - mills(y)).abs() < 1e-12, "{ratio}");
        // it tends to 1 only once y is large, far beyond any feasible n
        let mut prev = 0.0;
        for t in [1e2, 1e3, 1e4] {
            let big = Expansion { t_n: t, ..e.clone() };
            let p = mdp_probability(&big, x).unwrap();
            let r = clt_tail(x * t.sqrt()) * p.correction / (p.leading_term * p.correction);
            assert!(r > prev);
            prev = r;
        }
        assert!((prev - 1.0).abs() < 0.02);
    }

    #[test]
    fn only_real_axis_is_read() {
        let e = laguerre(10_000);
        let inner = e.log_psi.clone();
        let perturbed = Expansion {
            log_psi: Arc::new(move |z: Complex64| Ok(inner(z)? + Complex64::new(0.0, 1.0) * z.im * z.im * 7.0)),
            ..e.clone()
        };
        assert_eq!(mdp_probability(&e, 0.4).unwrap(), mdp_probability(&perturbed, 0.4).unwrap());
    }

    #[test]
    fn local_limit() {
        let e = laguerre(10_000);
        let p = llt_window_probability(&e, -1.0, 1.0, 0.5).unwrap();
        assert!((p - 2.0 / (2.0 * PI * e.t_n).sqrt()).abs() < 1e-15);
        let flat = llt_window_probability(&e, 0.0, 1.0, 0.0).unwrap();
        assert!((flat - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let p1 = llt_window_probability(&e, 0.0, 1e-3, 0.3).unwrap();
        let p2 = llt_window_probability(&e, 0.0, 2e-3, 0.3).unwrap();
        assert!((p2 / p1 - 2.0).abs() < 1e-12);
        assert!(llt_window_probability(&e, 1.0, 1.0, 0.3).is_err());
        assert!(llt_window_probability(&e, 0.0, 1.0, 0.6).is_err());
        let zone = ZoneOfControl::beta_ensemble(2.0, 1.0);
        assert!(llt_window_probability_in_zone(&e, 0.0, 1.0, 0.5, &zone).is_err());
        assert!(llt_window_probability_in_zone(&e, 0.0, 1.0, 0.4, &zone).is_ok());
    }
}
