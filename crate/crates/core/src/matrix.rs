//! Boundary-deformed chain matrices, the dense eigensolver oracle and
//! site-resolved expectation values.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use faer::Mat;

use crate::{Error, Result, C64};

/// Condition number above which eigenvector-derived quantities are flagged.
pub const CONDITION_LIMIT: f64 = 1e8;

/// One-band chain of `n` sites.
///
/// `hoppings[d]` holds the amplitude of the entry `H[row][row + d]`. A pattern
/// longer than one is periodic in the bond index, i.e. the smaller of the two
/// site indices joined by the bond. Entries that wrap around the corners are
/// scaled by `delta_r` (upper right) and `delta_l` (lower left).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainStencil {
    pub n: usize,
    pub hoppings: BTreeMap<i64, Vec<C64>>,
    pub onsite: Vec<C64>,
    pub eps_first: C64,
    pub eps_last: C64,
    pub delta_l: C64,
    pub delta_r: C64,
    /// Replaces the unscaled amplitude of a wrapped entry `(row, col)`.
    pub wrap_override: BTreeMap<(usize, usize), C64>,
}

impl ChainStencil {
    pub fn new(n: usize) -> Self {
        ChainStencil {
            n,
            hoppings: BTreeMap::new(),
            onsite: vec![C64::new(0.0, 0.0)],
            eps_first: C64::new(0.0, 0.0),
            eps_last: C64::new(0.0, 0.0),
            delta_l: C64::new(0.0, 0.0),
            delta_r: C64::new(0.0, 0.0),
            wrap_override: BTreeMap::new(),
        }
    }

    pub fn hopping(self, offset: i64, amplitude: C64) -> Self {
        self.hopping_pattern(offset, vec![amplitude])
    }

    pub fn hopping_pattern(mut self, offset: i64, pattern: Vec<C64>) -> Self {
        self.hoppings.insert(offset, pattern);
        self
    }

    pub fn onsite(mut self, pattern: Vec<C64>) -> Self {
        self.onsite = pattern;
        self
    }

    pub fn ends(mut self, eps_first: C64, eps_last: C64) -> Self {
        self.eps_first = eps_first;
        self.eps_last = eps_last;
        self
    }

    pub fn delta(self, delta: C64) -> Self {
        self.split_delta(delta, delta)
    }

    pub fn split_delta(mut self, delta_l: C64, delta_r: C64) -> Self {
        self.delta_l = delta_l;
        self.delta_r = delta_r;
        self
    }

    pub fn override_wrap(mut self, row: usize, col: usize, amplitude: C64) -> Self {
        self.wrap_override.insert((row, col), amplitude);
        self
    }

    /// Largest offset carrying a nonzero amplitude.
    pub fn range(&self) -> usize {
        self.hoppings
            .iter()
            .filter(|(d, p)| **d != 0 && p.iter().any(|t| t.norm() > 0.0))
            .map(|(d, _)| d.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    fn has_corners(&self) -> bool {
        self.delta_l.norm() > 0.0 || self.delta_r.norm() > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidStencil("chain needs at least one site".into()));
        }
        if self.onsite.is_empty() || self.hoppings.values().any(|p| p.is_empty()) {
            return Err(Error::InvalidStencil("empty periodic pattern".into()));
        }
        let range = self.range();
        // A wrapped entry of hopping d lands n-|d| off the diagonal on the
        // opposite side, where it must not meet the bulk hoppings there.
        let reach = |sign: i64| {
            self.hoppings
                .iter()
                .filter(|(d, p)| d.signum() == sign && p.iter().any(|t| t.norm() > 0.0))
                .map(|(d, _)| d.unsigned_abs() as usize)
                .max()
                .unwrap_or(0)
        };
        let (up, down) = (reach(1), reach(-1));
        if self.has_corners() && up > 0 && down > 0 && up + down >= self.n {
            return Err(Error::InvalidStencil(format!(
                "reach {up} up and {down} down overlaps the corner blocks of a {n}-site chain (need sum < {n})",
                n = self.n
            )));
        }
        if range >= self.n {
            return Err(Error::InvalidStencil(format!(
                "hopping range {range} does not fit in {} sites",
                self.n
            )));
        }
        Ok(())
    }

    /// Bulk Bloch function `sum_d h_d e^{ikd}` for uniform patterns.
    pub fn bloch(&self, k: f64) -> C64 {
        let mut h = self.onsite[0];
        for (d, p) in &self.hoppings {
            h += p[0] * C64::from_polar(1.0, k * *d as f64);
        }
        h
    }

    pub fn is_uniform(&self) -> bool {
        self.onsite.iter().all(|v| *v == self.onsite[0])
            && self
                .hoppings
                .values()
                .all(|p| p.iter().all(|t| *t == p[0]))
    }
}

/// Dense square complex matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| C64::new(if r == c { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] += v;
    }

    /// Adds `scale * block` with its top-left corner at `(row0, col0)`.
    pub fn add_block(&mut self, row0: usize, col0: usize, block: &DenseOperator, scale: C64) {
        for r in 0..block.dim {
            for c in 0..block.dim {
                self.add(row0 + r, col0 + c, scale * block.get(r, c));
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hash of the exact bit pattern, used to identify a matrix in error reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for z in &self.data {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }

    pub fn determinant(&self) -> C64 {
        match self.dim {
            0 => C64::new(1.0, 0.0),
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => self.to_faer().as_ref().determinant(),
        }
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }

    fn no_convergence(&self) -> Error {
        Error::NoConvergence {
            fingerprint: self.fingerprint(),
            dim: self.dim,
        }
    }
}

pub fn build_chain_matrix(stencil: &ChainStencil) -> Result<DenseOperator> {
    stencil.validate()?;
    let n = stencil.n;
    let mut m = DenseOperator::zeros(n);
    for r in 0..n {
        m.add(r, r, stencil.onsite[r % stencil.onsite.len()]);
    }
    m.add(0, 0, stencil.eps_first);
    m.add(n - 1, n - 1, stencil.eps_last);

    for (&d, pattern) in &stencil.hoppings {
        let len = pattern.len() as i64;
        for r in 0..n as i64 {
            let c = r + d;
            let bond = r.min(c).rem_euclid(len) as usize;
            let amp = pattern[bond];
            if (0..n as i64).contains(&c) {
                m.add(r as usize, c as usize, amp);
            } else if c >= n as i64 {
                let cw = (c - n as i64) as usize;
                let a = *stencil.wrap_override.get(&(r as usize, cw)).unwrap_or(&amp);
                m.add(r as usize, cw, stencil.delta_l * a);
            } else {
                let cw = (c + n as i64) as usize;
                let a = *stencil.wrap_override.get(&(r as usize, cw)).unwrap_or(&amp);
                m.add(r as usize, cw, stencil.delta_r * a);
            }
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Analytic,
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<C64>,
    pub provenance: Provenance,
    pub params: BTreeMap<String, C64>,
}

impl Spectrum {
    pub fn new(values: Vec<C64>, provenance: Provenance) -> Self {
        Spectrum {
            values,
            provenance,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: C64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn dense_spectrum(m: &DenseOperator) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    if m.dim() == 0 {
        return Ok(Spectrum::new(vec![], Provenance::Oracle));
    }
    let values = m.to_faer().eigenvalues().map_err(|_| m.no_convergence())?;
    Ok(Spectrum::new(values, Provenance::Oracle))
}

/// Eigenvalues with unit-norm right vectors of `M` and left vectors taken from
/// the transposed operator, paired by eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub spectrum: Spectrum,
    pub right: Vec<Vec<C64>>,
    /// `left[i]` satisfies `left[i]^† M = λ_i left[i]^†`.
    pub left: Vec<Vec<C64>>,
    /// `‖l‖‖r‖ / |l^† r|` per eigenvalue.
    pub condition: Vec<f64>,
}

impl Eigensystem {
    pub fn reliable(&self, i: usize) -> bool {
        self.condition[i] <= CONDITION_LIMIT
    }
}

/// Eigenvalues with unit-norm right vectors only.
pub fn dense_right_eigenpairs(m: &DenseOperator) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    if !m.is_finite() {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    eigen_pairs(m)
}

fn eigen_pairs(m: &DenseOperator) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let e = m.to_faer().eigen().map_err(|_| m.no_convergence())?;
    let u = e.U();
    let s = e.S().column_vector();
    let n = m.dim();
    let values: Vec<C64> = (0..n).map(|i| s[i]).collect();
    let vectors = (0..n)
        .map(|j| {
            let v: Vec<C64> = (0..n).map(|i| u[(i, j)]).collect();
            normalized(v)
        })
        .collect();
    Ok((values, vectors))
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.into_iter().map(|z| z / norm).collect()
    } else {
        v
    }
}

pub fn dense_eigensystem(m: &DenseOperator) -> Result<Eigensystem> {
    if !m.is_finite() {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    let (values, right) = eigen_pairs(m)?;
    let (t_values, t_vectors) = eigen_pairs(&m.transpose())?;
    let assignment = match_spectra(&values, &t_values);
    let left: Vec<Vec<C64>> = assignment
        .iter()
        .map(|&j| t_vectors[j].iter().map(|z| z.conj()).collect())
        .collect();
    let condition = left
        .iter()
        .zip(&right)
        .map(|(l, r)| {
            let overlap: C64 = l.iter().zip(r).map(|(a, b)| a.conj() * b).sum();
            1.0 / overlap.norm()
        })
        .collect();
    Ok(Eigensystem {
        spectrum: Spectrum::new(values, Provenance::Oracle),
        right,
        left,
        condition,
    })
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assignment[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let big = cost
        .iter()
        .flatten()
        .filter(|c| c.is_finite())
        .fold(0.0f64, |a, &c| a.max(c.abs()))
        * 4.0
        + 1.0;
    let at = |i: usize, j: usize| {
        let c = cost[i][j];
        if c.is_finite() {
            c
        } else {
            big
        }
    };
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Pairs two equal-size multisets of complex numbers, minimizing the summed distance.
pub fn match_spectra(a: &[C64], b: &[C64]) -> Vec<usize> {
    assert_eq!(a.len(), b.len(), "spectra of different cardinality");
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    min_cost_assignment(&cost)
}

/// Largest pair distance after optimal matching; infinite if the sizes differ.
pub fn matched_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    match_spectra(a, b)
        .iter()
        .enumerate()
        .map(|(i, &j)| (a[i] - b[j]).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `rr` and `ll` sum to one, `lr` is divided by the overlap `ψˡ†ψʳ`.
    Biorthogonal,
    /// Values exactly as implied by the vectors passed in.
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateProfiles {
    pub rr: Vec<f64>,
    pub ll: Vec<f64>,
    /// Absent when the biorthogonal overlap vanishes.
    pub lr: Option<Vec<C64>>,
    pub overlap: C64,
    pub normalization: Normalization,
}

pub fn expectation_profiles(
    psi_r: &[C64],
    psi_l: &[C64],
    normalization: Normalization,
) -> Result<StateProfiles> {
    if psi_r.len() != psi_l.len() {
        return Err(Error::InvalidParams(format!(
            "right vector has {} sites, left vector {}",
            psi_r.len(),
            psi_l.len()
        )));
    }
    let mut rr: Vec<f64> = psi_r.iter().map(|z| z.norm_sqr()).collect();
    let mut ll: Vec<f64> = psi_l.iter().map(|z| z.norm_sqr()).collect();
    let mut lr: Vec<C64> = psi_l.iter().zip(psi_r).map(|(l, r)| l.conj() * r).collect();
    let overlap: C64 = lr.iter().sum();
    let scale = (rr.iter().sum::<f64>() * ll.iter().sum::<f64>()).sqrt();
    let vanishing = !(overlap.norm() > 1e-14 * scale);

    if normalization == Normalization::Biorthogonal {
        for p in [&mut rr, &mut ll] {
            let s: f64 = p.iter().sum();
            if s > 0.0 {
                p.iter_mut().for_each(|x| *x /= s);
            }
        }
        if !vanishing {
            lr.iter_mut().for_each(|z| *z /= overlap);
        }
    }
    Ok(StateProfiles {
        rr,
        ll,
        lr: if vanishing { None } else { Some(lr) },
        overlap,
        normalization,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    /// Weighted mean site index, counting sites from zero.
    pub center_of_mass: f64,
    pub left_edge_fraction: f64,
    pub right_edge_fraction: f64,
    pub heavier: Edge,
    /// Growth rate of `|ψʳ_n|²` towards the heavier edge, per site.
    pub decay_rate: f64,
    pub fit_r2: f64,
}

impl LocalizationReport {
    pub fn heavier_edge_fraction(&self) -> f64 {
        self.left_edge_fraction.max(self.right_edge_fraction)
    }
}

/// Number of sites counted as "edge" on each side: the outer 10%.
pub fn edge_width(n: usize) -> usize {
    n.div_ceil(10).max(1)
}

pub fn localization_report(profile: &StateProfiles) -> Result<LocalizationReport> {
    weight_report(&profile.rr)
}

/// Localization metrics for any nonnegative site weight.
pub fn weight_report(weights: &[f64]) -> Result<LocalizationReport> {
    let n = weights.len();
    if n < 10 {
        return Err(Error::ProfileTooShort(n));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroProfile);
    }
    let w: Vec<f64> = weights.iter().map(|x| x / total).collect();
    let center_of_mass = w.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
    let k = edge_width(n);
    let left_edge_fraction: f64 = w[..k].iter().sum();
    let right_edge_fraction: f64 = w[n - k..].iter().sum();

    let half = n / 2;
    let left_half: f64 = w[..half].iter().sum();
    let heavier = if left_half > 1.0 - left_half {
        Edge::Left
    } else {
        Edge::Right
    };
    let (sites, sign) = match heavier {
        Edge::Right => (half..n - 2, 1.0),
        Edge::Left => (2..n - half, -1.0),
    };
    let points: Vec<(f64, f64)> = sites
        .filter(|&i| w[i] > 1e-300)
        .map(|i| (i as f64, w[i].ln()))
        .collect();
    let (slope, fit_r2) = linear_fit(&points);
    Ok(LocalizationReport {
        center_of_mass,
        left_edge_fraction,
        right_edge_fraction,
        heavier,
        decay_rate: sign * slope,
        fit_r2,
    })
}

/// Least-squares slope and coefficient of determination.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    if points.len() < 2 {
        return (0.0, 0.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_open_chain() {
        let s = ChainStencil::new(3).hopping(1, c(1.0, 0.0)).hopping(-1, c(1.0, 0.0));
        let m = build_chain_matrix(&s).unwrap();
        let expect = [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        for r in 0..3 {
            for col in 0..3 {
                assert_eq!(m.get(r, col), c(expect[r][col], 0.0));
            }
        }
    }

    #[test]
    fn periodic_hn_is_circulant() {
        let (td, tl, tr) = (c(0.3, 0.1), c(1.0, -0.5), c(2.0, 0.7));
        let s = ChainStencil::new(5)
            .onsite(vec![td])
            .hopping(1, tl)
            .hopping(-1, tr)
            .delta(c(1.0, 0.0));
        let m = build_chain_matrix(&s).unwrap();
        let row = [td, tl, c(0.0, 0.0), c(0.0, 0.0), tr];
        for r in 0..5 {
            for col in 0..5 {
                assert_eq!(m.get(r, col), row[(col + 5 - r) % 5]);
            }
        }
    }

    #[test]
    fn next_nearest_corner_block() {
        let (t12, t13, t21, t31) = (c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
        let s = ChainStencil::new(6)
            .hopping(1, t12)
            .hopping(2, t13)
            .hopping(-1, t21)
            .hopping(-2, t31)
            .delta(c(0.5, 0.0));
        let m = build_chain_matrix(&s).unwrap();
        assert_eq!(m.get(0, 4), 0.5 * t31);
        assert_eq!(m.get(0, 5), 0.5 * t21);
        assert_eq!(m.get(1, 4), c(0.0, 0.0));
        assert_eq!(m.get(1, 5), 0.5 * t31);
    }

    #[test]
    fn range_overlapping_corners_is_rejected() {
        let s = ChainStencil::new(4)
            .hopping(2, c(1.0, 0.0))
            .hopping(-2, c(1.0, 0.0))
            .delta(c(1.0, 0.0));
        let one_way = ChainStencil::new(4).hopping(2, c(1.0, 0.0)).delta(c(1.0, 0.0));
        assert!(build_chain_matrix(&one_way).is_ok());
        let err = build_chain_matrix(&s).unwrap_err();
        assert!(err.to_string().contains("overlaps the corner"));
        let open = ChainStencil::new(2).hopping(1, c(1.0, 0.0)).hopping(-1, c(2.0, 0.0));
        assert!(build_chain_matrix(&open).is_ok());
    }

    #[test]
    fn identity_spectrum() {
        let s = dense_spectrum(&DenseOperator::identity(4)).unwrap();
        assert!(s.values.iter().all(|z| (z - 1.0).norm() < 1e-14));
    }

    #[test]
    fn periodic_hn_four_sites() {
        let s = ChainStencil::new(4)
            .hopping(1, c(1.0, 0.0))
            .hopping(-1, c(2.0, 0.0))
            .delta(c(1.0, 0.0));
        let spec = dense_spectrum(&build_chain_matrix(&s).unwrap()).unwrap();
        let expect = [c(3.0, 0.0), c(-3.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        assert!(matched_distance(&spec.values, &expect) < 1e-12);
    }

    #[test]
    fn hungarian_prefers_global_optimum() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = min_cost_assignment(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn unit_vector_profile() {
        let e = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let p = expectation_profiles(&e, &e, Normalization::Biorthogonal).unwrap();
        assert_eq!(p.rr, vec![1.0, 0.0, 0.0]);
        assert_eq!(p.lr.unwrap()[0], c(1.0, 0.0));
    }

    #[test]
    fn orthogonal_pair_has_no_biorthogonal_profile() {
        let r = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let l = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let p = expectation_profiles(&r, &l, Normalization::Biorthogonal).unwrap();
        assert!(p.lr.is_none());
    }

    #[test]
    fn uniform_weight_report() {
        let r = weight_report(&vec![1.0; 30]).unwrap();
        assert!((r.left_edge_fraction - 0.1).abs() < 1e-12);
        assert!((r.right_edge_fraction - 0.1).abs() < 1e-12);
        assert!(r.decay_rate.abs() < 1e-12);
    }

    #[test]
    fn geometric_weight_report() {
        let w: Vec<f64> = (0..30).map(|i| 4f64.powi(i)).collect();
        let r = weight_report(&w).unwrap();
        let want = (1.0 - 4f64.powi(-3)) / (1.0 - 4f64.powi(-30));
        assert!((r.right_edge_fraction - want).abs() < 1e-12);
        assert!((r.decay_rate - 4f64.ln()).abs() < 1e-9);
        assert_eq!(r.heavier, Edge::Right);
    }

    #[test]
    fn short_and_zero_profiles_are_errors() {
        assert!(matches!(weight_report(&[1.0; 5]), Err(Error::ProfileTooShort(5))));
        assert!(matches!(weight_report(&[0.0; 12]), Err(Error::ZeroProfile)));
    }
}
