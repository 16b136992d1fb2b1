//! Winding numbers of Bloch Hamiltonians and point-gap detection.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::matrix::{dense_spectrum, ChainStencil, DenseOperator};
use crate::{Error, Result, C64};

type ScalarFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
type BlockFn = Arc<dyn Fn(f64) -> DenseOperator + Send + Sync>;

/// `k ↦ H(k)` on the Brillouin zone, 2π-periodic.
#[derive(Clone)]
pub enum BlochSampler {
    Scalar(ScalarFn),
    Block { dim: usize, f: BlockFn },
}

impl BlochSampler {
    pub fn scalar(f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        BlochSampler::Scalar(Arc::new(f))
    }

    pub fn block(dim: usize, f: impl Fn(f64) -> DenseOperator + Send + Sync + 'static) -> Self {
        BlochSampler::Block { dim, f: Arc::new(f) }
    }

    /// Bloch function of a uniform chain stencil.
    pub fn from_stencil(stencil: &ChainStencil) -> Result<Self> {
        if !stencil.is_uniform() {
            return Err(Error::NoBlochReduction);
        }
        let s = stencil.clone();
        Ok(Self::scalar(move |k| s.bloch(k)))
    }

    pub fn dim(&self) -> usize {
        match self {
            BlochSampler::Scalar(_) => 1,
            BlochSampler::Block { dim, .. } => *dim,
        }
    }

    pub fn det_shifted(&self, k: f64, e_b: C64) -> C64 {
        match self {
            BlochSampler::Scalar(f) => f(k) - e_b,
            BlochSampler::Block { dim, f } => {
                let mut h = f(k);
                for i in 0..*dim {
                    h.add(i, i, -e_b);
                }
                h.determinant()
            }
        }
    }

    /// Eigenvalues of `H(k)`.
    pub fn bands(&self, k: f64) -> Result<Vec<C64>> {
        match self {
            BlochSampler::Scalar(f) => Ok(vec![f(k)]),
            BlochSampler::Block { f, .. } => Ok(dense_spectrum(&f(k))?.values),
        }
    }

    /// Spectral curve sampled on `n` points of `[−π, π)`.
    pub fn curve(&self, n: usize) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(n * self.dim());
        for j in 0..n {
            out.extend(self.bands(grid_k(j, n))?);
        }
        Ok(out)
    }

    /// Checks `H(k+2π) = H(k)` at `n` sample points.
    pub fn is_periodic(&self, n: usize) -> bool {
        (0..n).all(|j| {
            let k = grid_k(j, n);
            match self {
                BlochSampler::Scalar(f) => (f(k) - f(k + 2.0 * PI)).norm() <= 1e-12 * f(k).norm().max(1.0),
                BlochSampler::Block { f, .. } => {
                    let (a, b) = (f(k), f(k + 2.0 * PI));
                    let scale = a.max_abs().max(1.0);
                    (0..a.dim()).all(|r| (0..a.dim()).all(|c| (a.get(r, c) - b.get(r, c)).norm() <= 1e-12 * scale))
                }
            }
        })
    }
}

fn grid_k(j: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingResult {
    pub e_b: C64,
    pub w: i64,
    pub samples: usize,
    pub min_abs_det: f64,
}

const MAX_SAMPLES: usize = 1 << 20;

/// Winding of `det(H(k) − E_B)` for `k` running from −π to π,
/// counterclockwise positive.
pub fn winding_number(b: &BlochSampler, e_b: C64, n_samples: usize) -> Result<WindingResult> {
    if n_samples < 64 {
        return Err(Error::InvalidParams(format!("winding needs at least 64 samples, got {n_samples}")));
    }
    let mut n = n_samples;
    loop {
        let dets: Vec<C64> = (0..n).map(|j| b.det_shifted(grid_k(j, n), e_b)).collect();
        let min_abs_det = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        if min_abs_det < 1e-10 {
            return Err(Error::OnSpectrum(min_abs_det));
        }
        let mut total = 0.0;
        let mut largest = 0.0f64;
        for j in 0..n {
            let step = (dets[(j + 1) % n] / dets[j]).arg();
            largest = largest.max(step.abs());
            total += step;
        }
        let turns = total / (2.0 * PI);
        let settled = (turns - turns.round()).abs() < 0.1 && largest < PI / 3.0;
        if settled || n >= MAX_SAMPLES {
            return Ok(WindingResult {
                e_b,
                w: turns.round() as i64,
                samples: n,
                min_abs_det,
            });
        }
        n *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapVerdict {
    PointGap { witness: C64, w: i64 },
    /// No nonzero winding found on the probe grid. Not a proof.
    LineGapConsistent { probes: usize },
}

impl GapVerdict {
    pub fn is_point_gap(&self) -> bool {
        matches!(self, GapVerdict::PointGap { .. })
    }
}

/// Looks for a base energy with nonzero winding: first the centroid of the
/// spectral curve, then a `grid × grid` lattice over its bounding box
/// padded by 20%.
pub fn gap_classify(b: &BlochSampler, grid: usize) -> Result<GapVerdict> {
    let curve = b.curve(512)?;
    let centroid = curve.iter().sum::<C64>() / curve.len() as f64;
    let mut candidates = vec![centroid];
    candidates.extend(padded_grid(&curve, grid));
    let mut probes = 0;
    for e_b in candidates {
        match winding_number(b, e_b, 256) {
            Ok(r) => {
                probes += 1;
                if r.w != 0 {
                    return Ok(GapVerdict::PointGap { witness: e_b, w: r.w });
                }
            }
            Err(Error::OnSpectrum(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(GapVerdict::LineGapConsistent { probes })
}

fn padded_grid(points: &[C64], grid: usize) -> Vec<C64> {
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in points {
        lo_re = lo_re.min(z.re);
        hi_re = hi_re.max(z.re);
        lo_im = lo_im.min(z.im);
        hi_im = hi_im.max(z.im);
    }
    let pad = 0.2 * (hi_re - lo_re).max(hi_im - lo_im).max(1e-3);
    let (lo_re, hi_re, lo_im, hi_im) = (lo_re - pad, hi_re + pad, lo_im - pad, hi_im + pad);
    let grid = grid.max(2);
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            // Offset by an irrational fraction so probes avoid symmetric curves.
            let x = lo_re + (hi_re - lo_re) * (i as f64 + 0.5 + 0.0137) / grid as f64;
            let y = lo_im + (hi_im - lo_im) * (j as f64 + 0.5 + 0.0071) / grid as f64;
            out.push(C64::new(x, y));
        }
    }
    out
}

/// Determinant of the `N₂×N₂` Bloch block of the triangular lattice,
/// through `det(n) = a·det(n−1) − b·c·det(n−2)`.
pub fn tridiag_bloch_det(t_l: C64, t_r: C64, k: f64, n2: usize) -> C64 {
    let e = C64::from_polar(1.0, k);
    let a = t_l / e + t_r * e;
    let bc = (t_r + t_l * e) * (t_l + t_r / e);
    let (mut prev, mut cur) = (C64::new(1.0, 0.0), a);
    if n2 == 0 {
        return prev;
    }
    for _ in 1..n2 {
        let next = a * cur - bc * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The tridiagonal Bloch block itself, for checking the recursion.
pub fn tridiag_bloch_block(t_l: C64, t_r: C64, k: f64, n2: usize) -> DenseOperator {
    let e = C64::from_polar(1.0, k);
    let a = t_l / e + t_r * e;
    let (b, c) = (t_r + t_l * e, t_l + t_r / e);
    DenseOperator::from_fn(n2, |r, col| {
        if r == col {
            a
        } else if col == r + 1 {
            b
        } else if r == col + 1 {
            c
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TridiagWinding {
    pub result: WindingResult,
    /// `|t_r/t_l| = 1`, where the curve cannot wind.
    pub phase_condition: bool,
    /// The sampled curve encloses no area.
    pub degenerate: bool,
}

pub fn tridiag_det_winding(t_l: C64, t_r: C64, n2: usize, n_samples: usize) -> Result<TridiagWinding> {
    if n2 < 2 {
        return Err(Error::InvalidParams("determinant winding needs N2 >= 2".into()));
    }
    let phase_condition = ((t_r / t_l).norm() - 1.0).abs() <= 1e-12;
    let n = n_samples.max(64);
    let curve: Vec<C64> = (0..n).map(|j| tridiag_bloch_det(t_l, t_r, grid_k(j, n), n2)).collect();
    let scale = curve.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let area = shoelace(&curve);
    let centroid = curve.iter().sum::<C64>() / n as f64;
    let sampler = BlochSampler::scalar(move |k| tridiag_bloch_det(t_l, t_r, k, n2));
    if area.abs() <= 1e-12 * scale * scale {
        return Ok(TridiagWinding {
            result: WindingResult {
                e_b: centroid,
                w: 0,
                samples: n,
                min_abs_det: 0.0,
            },
            phase_condition,
            degenerate: true,
        });
    }
    let mut best: Option<WindingResult> = None;
    let mut candidates = vec![centroid];
    candidates.extend(padded_grid(&curve, 25));
    for e_b in candidates {
        match winding_number(&sampler, e_b, n) {
            Ok(r) => {
                if best.map_or(true, |b| r.w.abs() > b.w.abs()) {
                    best = Some(r);
                }
            }
            Err(Error::OnSpectrum(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let result = best.ok_or(Error::OnSpectrum(0.0))?;
    Ok(TridiagWinding {
        result,
        phase_condition,
        degenerate: false,
    })
}

/// Signed area of a closed polygon.
pub fn shoelace(points: &[C64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_cosine_does_not_wind() {
        let b = BlochSampler::scalar(|k| c(2.0 * k.cos(), 0.0));
        assert_eq!(winding_number(&b, c(0.0, 3.0), 64).unwrap().w, 0);
    }

    #[test]
    fn unbalanced_hn_winds_negatively() {
        let b = BlochSampler::scalar(|k| C64::from_polar(1.0, k) + C64::from_polar(2.0, -k));
        let r = winding_number(&b, c(0.0, 0.0), 64).unwrap();
        assert_eq!(r.w, -1);
        assert!(r.min_abs_det > 0.9);
    }

    #[test]
    fn base_energy_on_curve_is_rejected() {
        let b = BlochSampler::scalar(|k| c(2.0 * k.cos(), 0.0));
        assert!(matches!(winding_number(&b, c(2.0, 0.0), 64), Err(Error::OnSpectrum(_))));
        assert!(winding_number(&b, c(0.0, 1.0), 10).is_err());
    }

    #[test]
    fn block_winding_adds_bands() {
        let b = BlochSampler::block(2, |k| {
            let mut h = DenseOperator::zeros(2);
            h.set(0, 0, C64::from_polar(1.0, k));
            h.set(1, 1, C64::from_polar(1.0, 2.0 * k));
            h
        });
        assert_eq!(winding_number(&b, c(0.0, 0.0), 64).unwrap().w, 3);
        assert!(b.is_periodic(16));
    }

    #[test]
    fn gap_verdicts() {
        let hn = BlochSampler::scalar(|k| C64::from_polar(1.0, k) + C64::from_polar(2.0, -k) + c(0.5, 0.0));
        match gap_classify(&hn, 9).unwrap() {
            GapVerdict::PointGap { witness, w } => {
                assert_eq!(w, -1);
                assert!((witness - c(0.5, 0.0)).norm() < 1e-9);
            }
            v => panic!("{v:?}"),
        }
        let t = C64::from_polar(1.0, PI / 4.0);
        let balanced = BlochSampler::scalar(move |k| C64::from_polar(1.0, k) + t * C64::from_polar(1.0, -k));
        assert!(!gap_classify(&balanced, 9).unwrap().is_point_gap());
    }

    #[test]
    fn tridiag_small_cases() {
        let (tl, tr) = (c(0.3, 1.0), c(-0.7, 0.2));
        let e = C64::from_polar(1.0, 0.4);
        assert!((tridiag_bloch_det(tl, tr, 0.4, 1) - (tl / e + tr * e)).norm() < 1e-15);
        assert!(tridiag_bloch_det(c(1.0, 0.0), c(1.0, 0.0), 0.0, 2).norm() < 1e-15);
        for n2 in 1..7 {
            let direct = tridiag_bloch_block(tl, tr, 0.4, n2).determinant();
            assert!((direct - tridiag_bloch_det(tl, tr, 0.4, n2)).norm() < 1e-10);
        }
    }

    #[test]
    fn tridiag_winding_cases() {
        let w = tridiag_det_winding(c(1.0, 0.0), c(5.0, 0.0), 3, 256).unwrap();
        assert!(w.result.w != 0 && !w.phase_condition && !w.degenerate);
        let w = tridiag_det_winding(c(1.0, 0.0), C64::from_polar(1.0, 0.7), 5, 256).unwrap();
        assert!(w.phase_condition);
        assert_eq!(w.result.w, 0);
        assert_eq!(tridiag_det_winding(c(1.0, 0.0), c(1.0, 0.0), 4, 256).unwrap().result.w, 0);
        assert!(tridiag_det_winding(c(1.0, 0.0), c(1.0, 0.0), 1, 256).is_err());
    }

    #[test]
    fn shoelace_unit_square() {
        let sq = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        assert!((shoelace(&sq) - 1.0).abs() < 1e-15);
    }
}
