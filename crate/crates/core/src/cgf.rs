//! Exact finite-n log-Mellin transforms of the six ensembles and their
//! mod-Gaussian expansions.
//!
//! Every exact transform is a sum of log Γ differences evaluated with
//! [`specfun::log_gamma_shift`]; no Gamma value is ever formed.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, HALF_LN_2PI};
use crate::summation::CompensatedComplexSum;
use crate::upsilon::{self, BetaParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Gue,
    Laguerre,
    Gram,
    Jacobi,
    Circular,
    CircularJacobi,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 6] = [
        EnsembleKind::Gue,
        EnsembleKind::Laguerre,
        EnsembleKind::Gram,
        EnsembleKind::Jacobi,
        EnsembleKind::Circular,
        EnsembleKind::CircularJacobi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::Gue => "gue",
            EnsembleKind::Laguerre => "laguerre",
            EnsembleKind::Gram => "gram",
            EnsembleKind::Jacobi => "jacobi",
            EnsembleKind::Circular => "circular",
            EnsembleKind::CircularJacobi => "circular-jacobi",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnsembleKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown ensemble '{s}'")))
    }
}

/// An ensemble with its parameters. Build through the named constructors,
/// which validate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub beta: BetaParam,
    pub n: u64,
    /// Jacobi only.
    pub tau1: f64,
    /// Jacobi only.
    pub tau2: f64,
    /// Circular-Jacobi only; zero for every other kind.
    pub delta: Complex64,
}

impl EnsembleSpec {
    fn raw(kind: EnsembleKind, beta: f64, n: u64) -> Result<Self> {
        Ok(Self { kind, beta: BetaParam::new(beta)?, n, tau1: 0.0, tau2: 0.0, delta: Complex64::new(0.0, 0.0) })
    }

    pub fn gue(n: u64) -> Result<Self> {
        Self::raw(EnsembleKind::Gue, 2.0, n)?.validated()
    }

    pub fn laguerre(beta: f64, n: u64) -> Result<Self> {
        Self::raw(EnsembleKind::Laguerre, beta, n)?.validated()
    }

    pub fn gram(beta: f64, n: u64) -> Result<Self> {
        Self::raw(EnsembleKind::Gram, beta, n)?.validated()
    }

    pub fn jacobi(beta: f64, n: u64, tau1: f64, tau2: f64) -> Result<Self> {
        Self { tau1, tau2, ..Self::raw(EnsembleKind::Jacobi, beta, n)? }.validated()
    }

    pub fn circular(beta: f64, n: u64) -> Result<Self> {
        Self::raw(EnsembleKind::Circular, beta, n)?.validated()
    }

    pub fn circular_jacobi(beta: f64, n: u64, delta: Complex64) -> Result<Self> {
        Self { delta, ..Self::raw(EnsembleKind::CircularJacobi, beta, n)? }.validated()
    }

    /// Checks the invariants of `self` and returns it.
    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be ≥ 1".into());
        }
        if !(self.beta.beta() > 0.0 && self.beta.beta().is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta.beta()));
        }
        match self.kind {
            EnsembleKind::Gue if self.beta.beta() != 2.0 => bad("GUE has beta = 2".into()),
            EnsembleKind::Jacobi => {
                if !(self.tau1 > 0.0 && self.tau2 > 0.0 && self.tau1.is_finite() && self.tau2.is_finite()) {
                    return bad(format!("Jacobi needs tau1, tau2 > 0, got {}, {}", self.tau1, self.tau2));
                }
                let (n1, n2) = self.jacobi_sizes();
                if n1 == 0 || n2 == 0 {
                    return bad(format!("floor(n·tau) must be ≥ 1, got {n1}, {n2}"));
                }
                Ok(self)
            }
            EnsembleKind::CircularJacobi => {
                let d = self.delta;
                if !(d.re.is_finite() && d.im.is_finite()) || d.re <= -1.0 / 3.0 {
                    return bad(format!("circular-Jacobi needs Re(delta) > -1/3, got {d}"));
                }
                Ok(self)
            }
            EnsembleKind::Circular if self.delta != Complex64::new(0.0, 0.0) => {
                bad("circular ensemble has delta = 0".into())
            }
            _ => Ok(self),
        }
    }

    /// (⌊nτ₁⌋, ⌊nτ₂⌋).
    pub fn jacobi_sizes(&self) -> (u64, u64) {
        let n = self.n as f64;
        ((n * self.tau1).floor() as u64, (n * self.tau2).floor() as u64)
    }

    /// Lower edge of the strip on which the exact transform is computed.
    pub fn strip_lower(&self) -> f64 {
        match self.kind {
            EnsembleKind::Gue => -1.0,
            EnsembleKind::Circular | EnsembleKind::CircularJacobi => -1.0 / 3.0,
            _ => -self.beta.half(),
        }
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

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    Ok(())
}

#[inline]
fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[inline]
fn shift(a: Complex64, z: Complex64) -> Complex64 {
    specfun::ln_gamma_shift_unchecked(a, z)
}

fn finite(v: Complex64, what: &'static str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// log E|det H|^z for the n×n GUE.
pub fn log_mellin_gue(z: Complex64, n: u64) -> Result<Complex64> {
    check_n(n)?;
    check_strip(z, -1.0, "log_mellin_gue")?;
    let mut acc = CompensatedComplexSum::new();
    acc.add(z * (0.5 * n as f64 * std::f64::consts::LN_2));
    // ⌊k/2⌋ = j occurs for k = 2j and k = 2j+1
    for j in 0..=n / 2 {
        let mult = (2 * j + 1).min(n) - (2 * j).max(1) + 1;
        acc.add(shift(real(0.5 + j as f64), z * 0.5) * mult as f64);
    }
    finite(acc.value(), "log_mellin_gue")
}

/// Σ_{k=1}^n [ℓ(βk/2 + z) − ℓ(βk/2)].
pub fn gamma_ratio_sum(z: Complex64, n: u64, beta: &BetaParam) -> Result<Complex64> {
    check_n(n)?;
    check_strip(z, -beta.half(), "gamma_ratio_sum")?;
    let hb = beta.half();
    let acc: CompensatedComplexSum = (1..=n).map(|k| shift(real(hb * k as f64), z)).collect();
    finite(acc.value(), "gamma_ratio_sum")
}

/// log E[det(L)^z] for the β-Laguerre (Wishart) ensemble.
pub fn log_mellin_laguerre(z: Complex64, n: u64, beta: &BetaParam) -> Result<Complex64> {
    let sum = gamma_ratio_sum(z, n, beta)?;
    Ok(sum + z * (n as f64 * std::f64::consts::LN_2))
}

/// log E[det(G)^z] for the β-Gram ensemble.
pub fn log_mellin_gram(z: Complex64, n: u64, beta: &BetaParam) -> Result<Complex64> {
    check_n(n)?;
    check_strip(z, -beta.half(), "log_mellin_gram")?;
    let hb = beta.half();
    let nf = n as f64;
    let mut acc = CompensatedComplexSum::new();
    for k in 1..n {
        acc.add(shift(real(hb * k as f64), z));
    }
    // the k = n term cancels against one copy of the normalisation
    acc.add(-shift(real(hb * nf), z) * (nf - 1.0));
    finite(acc.value(), "log_mellin_gram")
}

/// log E[det(J)^z] for the β-Jacobi ensemble with sizes ⌊nτ₁⌋, ⌊nτ₂⌋.
pub fn log_mellin_jacobi(z: Complex64, spec: &EnsembleSpec) -> Result<Complex64> {
    if spec.kind != EnsembleKind::Jacobi {
        return Err(Error::InvalidArgument(format!("log_mellin_jacobi called with {}", spec.kind)));
    }
    spec.validated()?;
    check_strip(z, -spec.beta.half(), "log_mellin_jacobi")?;
    let hb = spec.beta.half();
    let (n1, n2) = spec.jacobi_sizes();
    let mut acc = CompensatedComplexSum::new();
    for k in 1..=n1 {
        let kf = k as f64;
        acc.add(shift(real(hb * kf), z) - shift(real(hb * (n2 as f64 + kf)), z));
    }
    finite(acc.value(), "log_mellin_jacobi")
}

/// log E|1 − det U|^z (more precisely of the characteristic polynomial at 1)
/// for the circular and circular-Jacobi ensembles.
pub fn log_mellin_circular_jacobi(z: Complex64, spec: &EnsembleSpec) -> Result<Complex64> {
    if !matches!(spec.kind, EnsembleKind::Circular | EnsembleKind::CircularJacobi) {
        return Err(Error::InvalidArgument(format!("log_mellin_circular_jacobi called with {}", spec.kind)));
    }
    spec.validated()?;
    check_strip(z, -1.0 / 3.0, "log_mellin_circular_jacobi")?;
    let hb = spec.beta.half();
    let d = spec.delta;
    let dc = d.conj();
    let mut acc = CompensatedComplexSum::new();
    for k in 0..spec.n {
        let a = real(hb * k as f64 + 1.0);
        acc.add(shift(a + d + dc, z) - shift(a + d, z * 0.5) - shift(a + dc, z * 0.5));
    }
    finite(acc.value(), "log_mellin_circular_jacobi")
}

/// Exact log-Mellin transform of `spec` at `z`.
pub fn log_mellin(spec: &EnsembleSpec, z: Complex64) -> Result<Complex64> {
    match spec.kind {
        EnsembleKind::Gue => log_mellin_gue(z, spec.n),
        EnsembleKind::Laguerre => log_mellin_laguerre(z, spec.n, &spec.beta),
        EnsembleKind::Gram => log_mellin_gram(z, spec.n, &spec.beta),
        EnsembleKind::Jacobi => log_mellin_jacobi(z, spec),
        EnsembleKind::Circular | EnsembleKind::CircularJacobi => log_mellin_circular_jacobi(z, spec),
    }
}

/// Radius (β/8)·n^{1/6} of the disc on which the remainder of
/// [`gamma_ratio_expansion`] is controlled.
pub fn expansion_window(n: u64, beta: &BetaParam) -> f64 {
    beta.beta() / 8.0 * (n as f64).powf(1.0 / 6.0)
}

/// Closed approximation of [`gamma_ratio_sum`]:
/// z((½ − 1/β)log n + n log(βn/2) − n) + (z²/β)log n + Υ(z).
///
/// The error is O((|z| + |z|² + |z|³)/n) inside the window.
pub fn gamma_ratio_expansion(z: Complex64, n: u64, beta: &BetaParam) -> Result<Complex64> {
    check_n(n)?;
    let radius = expansion_window(n, beta);
    if z.norm() >= radius {
        return Err(Error::Domain(format!("|z| = {} outside the window |z| < {radius}", z.norm())));
    }
    gamma_ratio_approximation(z, n, beta)
}

/// [`gamma_ratio_expansion`] without the window check; still needs the strip.
pub fn gamma_ratio_approximation(z: Complex64, n: u64, beta: &BetaParam) -> Result<Complex64> {
    check_n(n)?;
    check_strip(z, -beta.half(), "gamma_ratio_approximation")?;
    let b = beta.beta();
    let nf = n as f64;
    let ln = nf.ln();
    let linear = (0.5 - 1.0 / b) * ln + nf * (beta.half() * nf).ln() - nf;
    Ok(z * linear + z * z * (ln / b) + upsilon_fast(z, beta)?)
}

/// Υ through a closed form when β/2 is rational, by quadrature otherwise.
pub fn upsilon_fast(z: Complex64, beta: &BetaParam) -> Result<Complex64> {
    if beta.rational_form().is_some() {
        upsilon::upsilon_closed(z, beta)
    } else {
        upsilon::upsilon(z, beta)
    }
}

pub type LogPsi = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// Mod-Gaussian data of an ensemble: log E[e^{zX_n}] ≈ zμ + t_n z²/2 + log ψ(z).
#[derive(Clone)]
pub struct Expansion {
    pub mu: f64,
    pub t_n: f64,
    pub log_psi: LogPsi,
    /// (c, d): the centered variable's transform is analytic on c < Re z < d.
    pub strip: (f64, f64),
    /// Set when t_n ≤ 0; the exact transform is still valid, the
    /// asymptotic scale is not.
    pub degenerate: bool,
}

impl fmt::Debug for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expansion")
            .field("mu", &self.mu)
            .field("t_n", &self.t_n)
            .field("strip", &self.strip)
            .field("degenerate", &self.degenerate)
            .finish_non_exhaustive()
    }
}

impl Expansion {
    pub fn log_psi(&self, z: Complex64) -> Result<Complex64> {
        (self.log_psi)(z)
    }

    /// log ψ_n(z) = log-Mellin(z) − zμ − t_n z²/2, the finite-n residue.
    pub fn log_residue(&self, spec: &EnsembleSpec, z: Complex64) -> Result<Complex64> {
        Ok(log_mellin(spec, z)? - z * self.mu - z * z * (0.5 * self.t_n))
    }
}

/// x·log(1 + y/x).
fn eps_term(x: f64, y: f64) -> f64 {
    x * (y / x).ln_1p()
}

/// Centering, variance parameter and limiting function for `spec`.
pub fn expansion_for(spec: &EnsembleSpec) -> Result<Expansion> {
    let spec = spec.validated()?;
    let beta = spec.beta;
    let b = beta.beta();
    let nf = spec.n as f64;
    let ln = nf.ln();
    let inf = f64::INFINITY;
    let (mu, t_n, log_psi, strip): (f64, f64, LogPsi, (f64, f64)) = match spec.kind {
        EnsembleKind::Gue => {
            (HALF_LN_2PI - nf / 2.0 + nf / 2.0 * ln, 0.5 * (nf / 2.0).ln(), Arc::new(upsilon::upsilon_gue), (-1.0, inf))
        }
        EnsembleKind::Laguerre => (
            (0.5 - 1.0 / b) * ln - nf + nf * (b * nf).ln(),
            2.0 / b * ln,
            Arc::new(move |z| upsilon_fast(z, &beta)),
            (-beta.half(), inf),
        ),
        EnsembleKind::Gram => (
            (0.5 - 1.0 / b) * ln - nf + 1.0 / b,
            2.0 / b * ln,
            Arc::new(move |z| Ok(upsilon_fast(z, &beta)? - z * z / b)),
            (-beta.half(), inf),
        ),
        EnsembleKind::Jacobi => {
            let (n1, n2) = spec.jacobi_sizes();
            let (n1, n2) = (n1 as f64, n2 as f64);
            let tau = spec.tau1 * spec.tau2 / (spec.tau1 + spec.tau2);
            let mu = (0.5 - 1.0 / b) * (ln + tau.ln()) - eps_term(n1, n2) - eps_term(n2, n1);
            let quad = tau.ln() / b;
            (mu, 2.0 / b * ln, Arc::new(move |z| Ok(upsilon_fast(z, &beta)? + z * z * quad)), (-beta.half(), inf))
        }
        EnsembleKind::Circular | EnsembleKind::CircularJacobi => {
            let d = spec.delta;
            (2.0 * d.re / b * ln, ln / b, Arc::new(move |z| circular_log_psi(z, d, &beta)), (-1.0 / 3.0, inf))
        }
    };
    Ok(Expansion { mu, t_n, log_psi, strip, degenerate: !(t_n > 0.0) })
}

/// The six-term Υ combination limiting the circular-Jacobi transform.
fn circular_log_psi(z: Complex64, d: Complex64, beta: &BetaParam) -> Result<Complex64> {
    if z.re <= -1.0 / 3.0 {
        return Err(Error::Domain(format!("circular limiting function requires Re(z) > -1/3, got {z}")));
    }
    let base = real(1.0 - beta.half());
    let dc = d.conj();
    let u = |w: Complex64| upsilon_fast(base + w, beta);
    Ok(u(d)? - u(d + z * 0.5)? + u(dc)? - u(dc + z * 0.5)? - u(d + dc)? + u(d + dc + z)?)
}
