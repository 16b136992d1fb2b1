//! Boundary-deformation sweeps, spectral distances and the exponential
//! sensitivity screen.

use std::fmt;

use rayon::prelude::*;

use crate::matrix::{linear_fit, Spectrum};
use crate::{Error, Result, C64};

/// A model whose spectrum depends on the boundary deformation `δ`.
pub type DeltaFamily<'a> = dyn Fn(f64) -> Result<Spectrum> + Sync + 'a;
/// The same, also parameterized by system size.
pub type SizedFamily<'a> = dyn Fn(usize, f64) -> Result<Spectrum> + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exponential,
    NonExponential,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Exponential => "exponential",
            Verdict::NonExponential => "non-exponential",
        })
    }
}

/// Distance between two spectra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Hausdorff,
    /// Hausdorff after dropping the `k` smallest-modulus eigenvalues of each
    /// spectrum, e.g. to ignore zero modes.
    HausdorffExcludingSmallest(usize),
}

impl Metric {
    pub fn distance(&self, a: &[C64], b: &[C64]) -> Result<f64> {
        match *self {
            Metric::Hausdorff => hausdorff(a, b),
            Metric::HausdorffExcludingSmallest(k) => hausdorff_excluding_smallest(a, b, k),
        }
    }
}

fn directed(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance of two point sets in the complex plane.
pub fn hausdorff(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParams("Hausdorff distance of an empty spectrum".into()));
    }
    Ok(directed(a, b).max(directed(b, a)))
}

pub fn hausdorff_excluding_smallest(a: &[C64], b: &[C64], k: usize) -> Result<f64> {
    let strip = |s: &[C64]| {
        let mut v = s.to_vec();
        v.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        v.split_off(k.min(v.len()))
    };
    hausdorff(&strip(a), &strip(b))
}

/// `start, start + step, …` up to `stop` (inclusive within rounding).
pub fn delta_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidParams(format!(
            "bad grid {start}..{stop} step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// One spectrum per grid point, in grid order.
pub fn delta_sweep(family: &DeltaFamily, grid: &[f64]) -> Result<Vec<Spectrum>> {
    grid.par_iter().map(|&d| family(d)).collect()
}

/// Sweep plus distances to the first grid point.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub grid: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    pub distances: Vec<f64>,
}

pub fn sweep_report(family: &DeltaFamily, grid: &[f64], metric: Metric) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty delta grid".into()));
    }
    let spectra = delta_sweep(family, grid)?;
    let distances = spectra
        .iter()
        .map(|s| metric.distance(&spectra[0].values, &s.values))
        .collect::<Result<_>>()?;
    Ok(SweepReport {
        grid: grid.to_vec(),
        spectra,
        distances,
    })
}

const DELTA_FLOOR: f64 = 1e-16;
const BISECTION_STEPS: usize = 60;

/// Smallest `δ ∈ [1e-16, 1]` with `d(S(δ), S(0)) ≥ Δ`, by bisection in
/// `ln δ`. `None` if even `δ = 1` stays below `Δ`.
pub fn critical_delta(family: &DeltaFamily, target: f64, metric: Metric) -> Result<Option<f64>> {
    if !(target > 0.0) {
        return Err(Error::InvalidParams("target distance must be positive".into()));
    }
    let base = family(0.0)?;
    let dist = |d: f64| -> Result<f64> { metric.distance(&base.values, &family(d)?.values) };
    if dist(1.0)? < target {
        return Ok(None);
    }
    if dist(DELTA_FLOOR)? >= target {
        return Ok(Some(DELTA_FLOOR));
    }
    let (mut lo, mut hi) = (DELTA_FLOOR.ln(), 0.0f64);
    for _ in 0..BISECTION_STEPS {
        if hi - lo < 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if dist(mid.exp())? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi.exp()))
}

/// Fit of `ln δ*` against `N`.
#[derive(Clone, Debug)]
pub struct ExponentFit {
    /// `(N, δ*)`; `None` marks sizes where `Δ` was never reached. Those are
    /// left out of the fit.
    pub critical: Vec<(usize, Option<f64>)>,
    pub xi: f64,
    pub r2: f64,
    pub verdict: Verdict,
}

/// Exponential iff at least four sizes reach `Δ`, `R² ≥ 0.9`, and `δ*`
/// falls by more than a factor two across the fitted sizes.
pub fn sensitivity_exponent(
    family: &SizedFamily,
    target: f64,
    sizes: &[usize],
    metric: Metric,
) -> Result<ExponentFit> {
    if sizes.len() < 4 {
        return Err(Error::InvalidParams("need at least four system sizes".into()));
    }
    let critical = sizes
        .par_iter()
        .map(|&n| critical_delta(&|d| family(n, d), target, metric).map(|c| (n, c)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = critical
        .iter()
        .filter_map(|&(n, c)| c.map(|d| (n as f64, d.ln())))
        .collect();
    if pts.len() < 2 {
        return Ok(ExponentFit {
            critical,
            xi: 0.0,
            r2: 0.0,
            verdict: Verdict::NonExponential,
        });
    }
    let (slope, r2) = linear_fit(&pts);
    let xi = -slope;
    let span = pts[pts.len() - 1].0 - pts[0].0;
    let exponential = pts.len() >= 4 && r2 >= 0.9 && xi * span > std::f64::consts::LN_2;
    Ok(ExponentFit {
        critical,
        xi,
        r2,
        verdict: if exponential {
            Verdict::Exponential
        } else {
            Verdict::NonExponential
        },
    })
}

/// Single-size screen for exponential sensitivity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScreenPolicy {
    /// `p = log₂(d(0,ε)/d(0,ε/2))` is the local power of the response; a
    /// jump already complete at `ε/2` gives `p ≈ 0`, smooth motion `p ≈ 1`.
    /// Exponential iff `p < threshold`.
    LogSlope { threshold: f64 },
    /// `d(0,ε)/d(ε,2ε) > ratio`.
    StepRatio { ratio: f64 },
}

impl Default for ScreenPolicy {
    fn default() -> Self {
        ScreenPolicy::LogSlope { threshold: 0.5 }
    }
}

#[derive(Clone, Debug)]
pub struct Screen {
    pub verdict: Verdict,
    /// `p` or the step ratio, depending on the policy.
    pub statistic: f64,
    pub d_first: f64,
}

pub fn classify_sensitivity(family: &DeltaFamily, eps: f64, policy: ScreenPolicy) -> Result<Screen> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams("epsilon must be positive".into()));
    }
    let s0 = family(0.0)?;
    let scale = 1.0 + s0.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = 1e-9 * scale;
    let d = |a: &Spectrum, b: &Spectrum| hausdorff(&a.values, &b.values);
    let (stat, d_first, exponential) = match policy {
        ScreenPolicy::LogSlope { threshold } => {
            let d1 = d(&s0, &family(eps)?)?;
            let d2 = d(&s0, &family(0.5 * eps)?)?;
            if d1 < floor {
                (f64::NAN, d1, false)
            } else {
                let p = (d1 / d2.max(f64::MIN_POSITIVE)).log2();
                (p, d1, p < threshold)
            }
        }
        ScreenPolicy::StepRatio { ratio } => {
            let s1 = family(eps)?;
            let d1 = d(&s0, &s1)?;
            let d2 = d(&s1, &family(2.0 * eps)?)?;
            if d1 < floor {
                (f64::NAN, d1, false)
            } else {
                let r = d1 / d2.max(f64::MIN_POSITIVE);
                (r, d1, r > ratio)
            }
        }
    };
    Ok(Screen {
        verdict: if exponential {
            Verdict::Exponential
        } else {
            Verdict::NonExponential
        },
        statistic: stat,
        d_first,
    })
}

/// Everything the sweep and exponent tasks report.
#[derive(Clone, Debug)]
pub struct SensitivityReport {
    pub sweep: SweepReport,
    pub fit: Option<ExponentFit>,
    pub screen: Screen,
}
