//! Adaptive Gauss–Kronrod (G10/K21) quadrature for complex-valued integrands
//! of a real variable, with a panel-doubling driver for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target absolute error.
    pub abs_tol: f64,
    /// Target error relative to the magnitude of the integral.
    pub rel_tol: f64,
    /// Maximum number of interval bisections across one integral.
    pub max_subdivisions: usize,
    /// Integrand magnitude below which a semi-infinite tail is dropped.
    pub truncation_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-12, max_subdivisions: 4000, truncation_threshold: 1e-17 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 1".into()));
        }
        if !(self.truncation_threshold >= 0.0) {
            return Err(Error::InvalidArgument("truncation_threshold must be non-negative".into()));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Integral of |f|, used to detect round-off limited panels.
    abs_mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_mass = WGK[10] * fc.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        abs_mass += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let value = kronrod * half;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite("quadrature integrand"));
    }
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Ok(Panel { a, b, value, error, abs_mass: abs_mass * scale })
}

/// Integrate `f` over `[points[0], points[last]]`, using the interior points
/// as initial breakpoints.
pub fn integrate<F>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two integration points".into()));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!(
                "integration points must be strictly increasing ({} !< {})",
                w[0], w[1]
            )));
        }
        heap.push(gk21(&f, w[0], w[1])?);
    }
    let mut subdivisions = 0usize;
    loop {
        let total: Complex64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let roundoff: f64 = 64.0 * f64::EPSILON * heap.iter().map(|p| p.abs_mass).sum::<f64>();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm()).max(roundoff);
        if err <= target {
            return Ok(total);
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature { estimated_error: err, subdivisions });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval at machine resolution; nothing left to refine
            return Err(Error::Quadrature { estimated_error: err, subdivisions });
        }
        heap.push(gk21(&f, worst.a, mid)?);
        heap.push(gk21(&f, mid, worst.b)?);
        subdivisions += 1;
    }
}

/// Integrate `f` over `[a, ∞)` for integrands that decay at least
/// exponentially. Panels of doubling width are added until two consecutive
/// panels contribute less than `cfg.truncation_threshold`.
pub fn integrate_to_infinity<F>(f: F, a: f64, first_width: f64, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut lo = a;
    let mut width = first_width;
    let mut quiet = 0;
    for _ in 0..80 {
        let hi = lo + width;
        let part = integrate(&f, &[lo, hi], cfg)?;
        total += part;
        if part.norm() <= cfg.truncation_threshold && f(hi).norm() <= cfg.truncation_threshold {
            quiet += 1;
            if quiet >= 2 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::Quadrature { estimated_error: f64::INFINITY, subdivisions: cfg.max_subdivisions })
}
