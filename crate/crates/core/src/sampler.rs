//! Exact Monte Carlo samplers for the log-determinant (or log-modulus of the
//! characteristic polynomial) of every ensemble, through products of
//! independent Gamma, Beta and chi variables, plus the `mc_run` harness.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::cgf::{expansion_for, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::predict::normal_cdf;
use crate::summation::CompensatedSum;
use crate::upsilon::BetaParam;

/// A reproducible random stream: identical (seed, stream_id) pairs give
/// identical sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Generator for this stream. Distinct stream ids under one seed map to
    /// distinct 64-bit keys, each expanded to a full 256-bit state.
    pub fn rng(&self) -> Xoshiro256PlusPlus {
        let key = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29)
            ^ self.stream_id.wrapping_mul(0xD1B5_4A32_D192_ED03);
        Xoshiro256PlusPlus::seed_from_u64(key)
    }
}

/// Uniform on (0, 1].
#[inline]
fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Running Σ log xᵢ, taking one logarithm per batch of factors.
struct LogProduct {
    prod: f64,
    logs: CompensatedSum,
}

impl LogProduct {
    fn new() -> Self {
        Self { prod: 1.0, logs: CompensatedSum::new() }
    }

    #[inline]
    fn mul(&mut self, x: f64) {
        self.prod *= x;
        if !(1e-150..1e150).contains(&self.prod) {
            self.logs.add(self.prod.ln());
            self.prod = 1.0;
        }
    }

    #[inline]
    fn add_log(&mut self, l: f64) {
        self.logs.add(l);
    }

    fn value(mut self) -> f64 {
        self.logs.add(self.prod.ln());
        self.logs.value()
    }
}

/// Gamma(shape, 1) by Marsaglia–Tsang, with the shape-dependent constants
/// computed once. Shapes below 1 use Gamma(a) = Gamma(a+1)·U^{1/a}.
///
/// Besides the usual squeeze u < 1 − 0.0331x⁴ a second one is used: with
/// y = cx the log acceptance ratio equals 3d·(log(1+y) − y + y²/2 − y³/3),
/// which is ≥ −x⁴/(108d) for y ≥ 0 and ≥ −x⁴/(108d(1+y)) for −1 < y < 0.
/// Both squeezes only accept points the exact test accepts; the second one
/// makes the logarithm branch rare for large shapes.
#[derive(Debug, Clone, Copy)]
struct GammaShape {
    d: f64,
    c: f64,
    ln_d: f64,
    squeeze: f64,
    inv_small_shape: Option<f64>,
}

impl GammaShape {
    fn new(shape: f64) -> Self {
        debug_assert!(shape > 0.0);
        let (a, small) = if shape < 1.0 { (shape + 1.0, Some(1.0 / shape)) } else { (shape, None) };
        let d = a - 1.0 / 3.0;
        let squeeze = (1.0 + 1e-6) / (108.0 * d);
        Self { d, c: 1.0 / (9.0 * d).sqrt(), ln_d: d.ln(), squeeze, inv_small_shape: small }
    }

    /// The accepted v³ of one Marsaglia–Tsang draw; the variate is d·v³.
    #[inline]
    fn cube<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x: f64 = rng.sample(StandardNormal);
            let y = self.c * x;
            let v = 1.0 + y;
            if v <= 0.0 {
                continue;
            }
            let v3 = v * v * v;
            let u: f64 = rng.gen();
            let x2 = x * x;
            let x4 = x2 * x2;
            // branch-free form of the two cases y ≥ 0 (v ≥ 1) and y < 0
            let tail = x4 * self.squeeze / v.min(1.0);
            if u < 1.0 - tail.min(0.0331 * x4) {
                return v3;
            }
            if u.ln() < 0.5 * x2 + self.d * (1.0 - v3 + v3.ln()) {
                return v3;
            }
        }
    }

    /// Adds log of one Gamma(shape, 1) draw to `acc`.
    #[inline]
    fn accumulate<R: Rng + ?Sized>(&self, rng: &mut R, acc: &mut LogProduct) {
        acc.mul(self.cube(rng));
        if let Some(inv) = self.inv_small_shape {
            acc.add_log(open_uniform(rng).ln() * inv);
        }
    }

    /// log of one Gamma(shape, 1) draw.
    #[inline]
    fn log_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut l = self.ln_d + self.cube(rng).ln();
        if let Some(inv) = self.inv_small_shape {
            l += open_uniform(rng).ln() * inv;
        }
        l
    }
}

/// log of a Beta(a, b) draw from two Gamma draws.
#[inline]
fn log_beta<R: Rng + ?Sized>(a: &GammaShape, b: &GammaShape, rng: &mut R) -> f64 {
    let lx = a.log_sample(rng);
    let ly = b.log_sample(rng);
    let m = lx.max(ly);
    lx - (m + ((lx - m).exp() + (ly - m).exp()).ln())
}

#[derive(Debug, Clone)]
enum Plan {
    /// Σ log Gamma(shapeᵢ) scaled: `scale`·(offset + Σ log Gᵢ).
    GammaProduct { shapes: Vec<GammaShape>, offset: f64, scale: f64 },
    /// Σ log Beta(aᵢ, bᵢ).
    BetaProduct { pairs: Vec<(GammaShape, GammaShape)> },
    /// Σ log|1 − γ_k| over deformed Verblunsky coefficients, real δ ≥ 0.
    Verblunsky { radial: Vec<f64>, delta: f64 },
}

/// Precomputed sampler for one ensemble's log-statistic.
#[derive(Debug, Clone)]
pub struct EnsembleSampler {
    plan: Plan,
}

impl EnsembleSampler {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        let spec = spec.validated()?;
        let hb = spec.beta.half();
        let n = spec.n;
        let plan = match spec.kind {
            EnsembleKind::Gue => {
                // ρ_k = √(2·Gamma(⌊k/2⌋ + ½))
                let shapes: Vec<GammaShape> = (1..=n).map(|k| GammaShape::new((k / 2) as f64 + 0.5)).collect();
                let offset = constant_offset(&shapes, std::f64::consts::LN_2);
                Plan::GammaProduct { shapes, offset, scale: 0.5 }
            }
            EnsembleKind::Laguerre => {
                // Gamma(βj/2, scale 2)
                let shapes: Vec<GammaShape> = (1..=n).map(|j| GammaShape::new(hb * j as f64)).collect();
                let offset = constant_offset(&shapes, std::f64::consts::LN_2);
                Plan::GammaProduct { shapes, offset, scale: 1.0 }
            }
            EnsembleKind::Gram => {
                let nf = n as f64;
                let pairs = (2..=n)
                    .map(|k| {
                        let kf = k as f64;
                        (GammaShape::new(hb * (nf - kf + 1.0)), GammaShape::new(hb * (kf - 1.0)))
                    })
                    .collect();
                Plan::BetaProduct { pairs }
            }
            EnsembleKind::Jacobi => {
                let (n1, n2) = spec.jacobi_sizes();
                let second = GammaShape::new(hb * n2 as f64);
                let pairs = (1..=n1).map(|k| (GammaShape::new(hb * k as f64), second)).collect();
                Plan::BetaProduct { pairs }
            }
            EnsembleKind::Circular | EnsembleKind::CircularJacobi => {
                let d = spec.delta;
                if d.im != 0.0 || d.re < 0.0 {
                    return Err(Error::UnsupportedParameter(format!(
                        "sampling needs real delta ≥ 0, got {d}; exact transforms cover complex delta"
                    )));
                }
                // |γ_k|² ~ Beta(1, β(n−k−1)/2); stored as 1/b, with 0 for the unit-circle coefficient
                let radial = (0..n).map(|k| if k + 1 < n { 1.0 / (hb * (n - k - 1) as f64) } else { 0.0 }).collect();
                Plan::Verblunsky { radial, delta: d.re }
            }
        };
        Ok(Self { plan })
    }

    /// One draw of the statistic whose log-Mellin transform is
    /// [`crate::cgf::log_mellin`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.plan {
            Plan::GammaProduct { shapes, offset, scale } => {
                let mut acc = LogProduct::new();
                for g in shapes {
                    g.accumulate(rng, &mut acc);
                }
                scale * (offset + acc.value())
            }
            Plan::BetaProduct { pairs } => {
                let mut acc = CompensatedSum::new();
                for (a, b) in pairs {
                    acc.add(log_beta(a, b, rng));
                }
                acc.value()
            }
            Plan::Verblunsky { radial, delta } => {
                let mut acc = CompensatedSum::new();
                for &inv_b in radial {
                    acc.add(verblunsky_log_modulus(inv_b, *delta, rng));
                }
                acc.value()
            }
        }
    }
}

fn constant_offset(shapes: &[GammaShape], per_factor: f64) -> f64 {
    shapes.iter().map(|g| g.ln_d + per_factor).collect::<CompensatedSum>().value()
}

/// log|1 − γ| for one deformed Verblunsky coefficient. `inv_b` = 1/b for
/// |γ|² ~ Beta(1, b), or 0 for a coefficient uniform on the circle. With
/// δ > 0 the δ = 0 draw is accepted with probability |1−γ|^{2δ}/2^{2δ}.
#[inline]
fn verblunsky_log_modulus<R: Rng + ?Sized>(inv_b: f64, delta: f64, rng: &mut R) -> f64 {
    loop {
        let r = if inv_b == 0.0 { 1.0 } else { (-(open_uniform(rng).powf(inv_b) - 1.0)).max(0.0).sqrt() };
        let theta = std::f64::consts::TAU * rng.gen::<f64>();
        // |1 − re^{iθ}|² = 1 − 2r cos θ + r², written to keep precision near γ = 1
        let m2 = (1.0 - r).powi(2) + 2.0 * r * (1.0 - theta.cos());
        let log_mod = 0.5 * m2.ln();
        if delta == 0.0 {
            return log_mod;
        }
        let log_weight = 2.0 * delta * (log_mod - std::f64::consts::LN_2);
        if open_uniform(rng).ln() <= log_weight {
            return log_mod;
        }
    }
}

/// log|1 − γ| for a single deformed Verblunsky coefficient with
/// |γ|² ~ Beta(1, b) under δ = 0 (`b = None`: γ uniform on the unit circle),
/// reweighted by |1 − γ|^{2δ} for real δ ≥ 0.
pub fn sample_verblunsky_log_modulus<R: Rng + ?Sized>(b: Option<f64>, delta: f64, rng: &mut R) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::UnsupportedParameter(format!("delta must be real and ≥ 0, got {delta}")));
    }
    let inv_b = match b {
        None => 0.0,
        Some(b) if b > 0.0 && b.is_finite() => 1.0 / b,
        Some(b) => return Err(Error::InvalidArgument(format!("radial parameter must be positive, got {b}"))),
    };
    Ok(verblunsky_log_modulus(inv_b, delta, rng))
}

fn one_shot(spec: Result<EnsembleSpec>, rng: &mut RngStream) -> Result<f64> {
    let sampler = EnsembleSampler::new(&spec?)?;
    let mut r = rng.rng();
    rng.stream_id = rng.stream_id.wrapping_add(1);
    Ok(sampler.sample(&mut r))
}

/// One draw of log|det| of the n×n GUE. Advances `rng.stream_id`.
pub fn sample_log_det_gue(n: u64, rng: &mut RngStream) -> Result<f64> {
    one_shot(EnsembleSpec::gue(n), rng)
}

/// One draw of log det of the β-Laguerre ensemble. Advances `rng.stream_id`.
pub fn sample_log_det_laguerre(n: u64, beta: &BetaParam, rng: &mut RngStream) -> Result<f64> {
    one_shot(EnsembleSpec::laguerre(beta.beta(), n), rng)
}

/// One draw of log det of the β-Gram ensemble. Advances `rng.stream_id`.
pub fn sample_log_det_gram(n: u64, beta: &BetaParam, rng: &mut RngStream) -> Result<f64> {
    one_shot(EnsembleSpec::gram(beta.beta(), n), rng)
}

/// One draw of log det of the β-Jacobi ensemble. Advances `rng.stream_id`.
pub fn sample_log_det_jacobi(spec: &EnsembleSpec, rng: &mut RngStream) -> Result<f64> {
    if spec.kind != EnsembleKind::Jacobi {
        return Err(Error::InvalidArgument(format!("sample_log_det_jacobi called with {}", spec.kind)));
    }
    one_shot(Ok(*spec), rng)
}

/// One draw of log|det(1 − U)| for the circular(-Jacobi) ensemble with real
/// δ ≥ 0. Advances `rng.stream_id`.
pub fn sample_log_charpoly_circular_jacobi(spec: &EnsembleSpec, rng: &mut RngStream) -> Result<f64> {
    if !matches!(spec.kind, EnsembleKind::Circular | EnsembleKind::CircularJacobi) {
        return Err(Error::InvalidArgument(format!("circular sampler called with {}", spec.kind)));
    }
    one_shot(Ok(*spec), rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePoint {
    pub z: f64,
    pub value: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCount {
    pub threshold: f64,
    pub count: u64,
}

/// The window t_n^{−δ}(a, b) for the normalized statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub a: f64,
    pub b: f64,
    pub delta_exp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCount {
    pub window: Window,
    pub count: u64,
}

/// Summary of a Monte Carlo run.
///
/// With X the raw statistic, μ and t_n from [`expansion_for`], and
/// Y = (X − μ)/√t_n:
/// - `mean`, `variance`: of X;
/// - `empirical_laplace`: E[e^{z(X−μ)}], comparable to exp(log_mellin(z) − zμ);
/// - `kolmogorov_distance`: sup |F_Y − Φ| (absent when t_n ≤ 0);
/// - `tail_counts`: #{Y ≥ threshold};
/// - `window_counts`: #{Y ∈ t_n^{−δ}(a, b)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCResult {
    pub n_samples: u64,
    pub mu: f64,
    pub t_n: f64,
    pub mean: f64,
    pub variance: f64,
    pub empirical_laplace: Vec<LaplacePoint>,
    pub kolmogorov_distance: Option<f64>,
    pub tail_counts: Vec<TailCount>,
    pub window_counts: Vec<WindowCount>,
}

/// Samples per RNG stream; block i always uses stream i.
pub const BLOCK_SIZE: u64 = 4096;

struct BlockStats {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
    laplace: Vec<(CompensatedSum, CompensatedSum)>,
    tails: Vec<u64>,
    windows: Vec<u64>,
    normalized: Vec<f64>,
}

struct RunPlan<'a> {
    sampler: EnsembleSampler,
    mu: f64,
    scale: Option<f64>,
    z_grid: &'a [f64],
    thresholds: &'a [f64],
    windows: Vec<(f64, f64)>,
    seed: u64,
    n_samples: u64,
}

impl RunPlan<'_> {
    fn block(&self, index: u64) -> BlockStats {
        let start = index * BLOCK_SIZE;
        let len = BLOCK_SIZE.min(self.n_samples - start) as usize;
        let mut rng = RngStream::new(self.seed, index).rng();
        let mut stats = BlockStats {
            sum: CompensatedSum::new(),
            sum_sq: CompensatedSum::new(),
            laplace: vec![(CompensatedSum::new(), CompensatedSum::new()); self.z_grid.len()],
            tails: vec![0; self.thresholds.len()],
            windows: vec![0; self.windows.len()],
            normalized: Vec::with_capacity(if self.scale.is_some() { len } else { 0 }),
        };
        for _ in 0..len {
            let y = self.sampler.sample(&mut rng) - self.mu;
            stats.sum.add(y);
            stats.sum_sq.add(y * y);
            for (acc, &z) in stats.laplace.iter_mut().zip(self.z_grid) {
                let e = (z * y).exp();
                acc.0.add(e);
                acc.1.add(e * e);
            }
            if let Some(scale) = self.scale {
                let u = y * scale;
                for (count, &t) in stats.tails.iter_mut().zip(self.thresholds) {
                    *count += (u >= t) as u64;
                }
                for (count, &(lo, hi)) in stats.windows.iter_mut().zip(&self.windows) {
                    *count += (u > lo && u < hi) as u64;
                }
                stats.normalized.push(u);
            }
        }
        stats
    }
}

/// Draws `n_samples` statistics for `spec` and summarizes them. The result
/// depends only on the arguments, not on the number of worker threads.
pub fn mc_run(
    spec: &EnsembleSpec,
    n_samples: u64,
    z_grid: &[f64],
    thresholds: &[f64],
    windows: &[Window],
    seed: u64,
) -> Result<MCResult> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    mc_run_with_threads(spec, n_samples, z_grid, thresholds, windows, seed, threads)
}

/// [`mc_run`] with an explicit worker count.
pub fn mc_run_with_threads(
    spec: &EnsembleSpec,
    n_samples: u64,
    z_grid: &[f64],
    thresholds: &[f64],
    windows: &[Window],
    seed: u64,
    threads: usize,
) -> Result<MCResult> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    let spec = spec.validated()?;
    let lower = spec.strip_lower();
    if let Some(&z) = z_grid.iter().find(|z| !(z.is_finite() && **z > lower)) {
        return Err(Error::Domain(format!("z = {z} outside the strip Re z > {lower}")));
    }
    for w in windows {
        if !(w.a < w.b && w.delta_exp.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad window {w:?}")));
        }
    }
    let exp = expansion_for(&spec)?;
    let scale = (exp.t_n > 0.0).then(|| 1.0 / exp.t_n.sqrt());
    if scale.is_none() && !(thresholds.is_empty() && windows.is_empty()) {
        return Err(Error::Domain(format!("t_n = {} ≤ 0: tails and windows are undefined", exp.t_n)));
    }
    let plan = RunPlan {
        sampler: EnsembleSampler::new(&spec)?,
        mu: exp.mu,
        scale,
        z_grid,
        thresholds,
        windows: windows
            .iter()
            .map(|w| {
                let shrink = exp.t_n.powf(-w.delta_exp);
                (w.a * shrink, w.b * shrink)
            })
            .collect(),
        seed,
        n_samples,
    };
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let threads = threads.clamp(1, n_blocks as usize) as u64;
    let blocks: Vec<BlockStats> = if threads == 1 {
        (0..n_blocks).map(|i| plan.block(i)).collect()
    } else {
        let mut per_worker: Vec<Vec<BlockStats>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let plan = &plan;
                    scope.spawn(move || (w..n_blocks).step_by(threads as usize).map(|i| plan.block(i)).collect())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).collect()
        });
        let mut iters: Vec<_> = per_worker.iter_mut().map(|v| v.drain(..)).collect();
        (0..n_blocks).map(|i| iters[(i % threads) as usize].next().expect("missing block")).collect()
    };
    Ok(merge(&plan, exp.t_n, blocks, windows))
}

fn merge(plan: &RunPlan<'_>, t_n: f64, blocks: Vec<BlockStats>, windows: &[Window]) -> MCResult {
    let n = plan.n_samples as f64;
    let mut sum = CompensatedSum::new();
    let mut sum_sq = CompensatedSum::new();
    let mut laplace = vec![(CompensatedSum::new(), CompensatedSum::new()); plan.z_grid.len()];
    let mut tails = vec![0u64; plan.thresholds.len()];
    let mut wins = vec![0u64; windows.len()];
    let mut normalized = Vec::with_capacity(if plan.scale.is_some() { plan.n_samples as usize } else { 0 });
    for b in blocks {
        sum.merge(&b.sum);
        sum_sq.merge(&b.sum_sq);
        for (acc, part) in laplace.iter_mut().zip(&b.laplace) {
            acc.0.merge(&part.0);
            acc.1.merge(&part.1);
        }
        tails.iter_mut().zip(&b.tails).for_each(|(a, c)| *a += c);
        wins.iter_mut().zip(&b.windows).for_each(|(a, c)| *a += c);
        normalized.extend_from_slice(&b.normalized);
    }
    let mean_y = sum.value() / n;
    let variance = if plan.n_samples > 1 { ((sum_sq.value() - n * mean_y * mean_y) / (n - 1.0)).max(0.0) } else { 0.0 };
    let empirical_laplace = plan
        .z_grid
        .iter()
        .zip(&laplace)
        .map(|(&z, (s1, s2))| {
            let m1 = s1.value() / n;
            let m2 = s2.value() / n;
            LaplacePoint { z, value: m1, std_err: ((m2 - m1 * m1).max(0.0) / n).sqrt() }
        })
        .collect();
    MCResult {
        n_samples: plan.n_samples,
        mu: plan.mu,
        t_n,
        mean: mean_y + plan.mu,
        variance,
        empirical_laplace,
        kolmogorov_distance: plan.scale.map(|_| kolmogorov_distance(&mut normalized)),
        tail_counts: plan
            .thresholds
            .iter()
            .zip(tails)
            .map(|(&threshold, count)| TailCount { threshold, count })
            .collect(),
        window_counts: windows.iter().zip(wins).map(|(&window, count)| WindowCount { window, count }).collect(),
    }
}

/// sup_x |F_n(x) − Φ(x)| for the empirical distribution of `samples`
/// (sorted in place).
pub fn kolmogorov_distance(samples: &mut [f64]) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}
