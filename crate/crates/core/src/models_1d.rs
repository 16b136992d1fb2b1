//! Closed-form spectra of one-dimensional chains: Hatano-Nelson (with end
//! potentials and asymmetric corners), SSH of either parity, and the two
//! long-range chains with a finite-size solution.

use std::f64::consts::PI;

use crate::alpha::{
    alpha_from_roots, dirichlet_ratio, group_triples, polynomialize, refine_mixed_roots, refine_ssh_odd_roots, roots, AlphaEquation,
    AlphaSet, Generator, Pairing, PolyY,
};
use crate::matrix::{build_chain_matrix, dense_spectrum, ChainStencil, Provenance, Spectrum};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
#[cfg(test)]
const ONE: C64 = C64::new(1.0, 0.0);

/// A spectrum together with the wave numbers that produced it.
#[derive(Clone, Debug)]
pub struct Solution {
    pub spectrum: Spectrum,
    /// Absent when the closed form does not apply and the oracle was used.
    pub alphas: Option<AlphaSet>,
    pub oracle_fallback: bool,
    pub notes: Vec<String>,
}

impl Solution {
    fn oracle(stencil: &ChainStencil, note: &str) -> Result<Self> {
        let spectrum = dense_spectrum(&build_chain_matrix(stencil)?)?;
        Ok(Solution {
            spectrum,
            alphas: None,
            oracle_fallback: true,
            notes: vec![note.to_string()],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Balance {
    pub balanced: bool,
    /// Phase of the ratio whose modulus decides the balance.
    pub theta: f64,
}

fn balance_of(num: C64, den: C64) -> Balance {
    let (a, b) = (num.norm(), den.norm());
    Balance {
        balanced: (a - b).abs() <= 1e-12 * (a + b),
        theta: (num / den).arg(),
    }
}

// ---------------------------------------------------------------------------
// Hatano-Nelson

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HnParams {
    pub t_d: C64,
    pub t_l: C64,
    pub t_r: C64,
    pub eps_first: C64,
    pub eps_last: C64,
    pub delta_l: C64,
    pub delta_r: C64,
}

impl HnParams {
    pub fn new(t_l: C64, t_r: C64) -> Self {
        HnParams {
            t_d: ZERO,
            t_l,
            t_r,
            eps_first: ZERO,
            eps_last: ZERO,
            delta_l: ZERO,
            delta_r: ZERO,
        }
    }

    pub fn with_td(mut self, t_d: C64) -> Self {
        self.t_d = t_d;
        self
    }

    pub fn with_delta(mut self, delta: C64) -> Self {
        self.delta_l = delta;
        self.delta_r = delta;
        self
    }

    pub fn with_split_delta(mut self, delta_l: C64, delta_r: C64) -> Self {
        self.delta_l = delta_l;
        self.delta_r = delta_r;
        self
    }

    pub fn with_ends(mut self, eps_first: C64, eps_last: C64) -> Self {
        self.eps_first = eps_first;
        self.eps_last = eps_last;
        self
    }

    /// Symmetric corners and no end potentials.
    pub fn is_plain(&self) -> bool {
        self.eps_first == ZERO && self.eps_last == ZERO && self.delta_l == self.delta_r
    }

    pub fn stencil(&self, n: usize) -> ChainStencil {
        ChainStencil::new(n)
            .onsite(vec![self.t_d])
            .hopping(1, self.t_l)
            .hopping(-1, self.t_r)
            .ends(self.eps_first, self.eps_last)
            .split_delta(self.delta_l, self.delta_r)
    }

    /// `√t_r / √t_l`, the geometric growth per site.
    pub fn rho(&self) -> C64 {
        self.t_r.sqrt() / self.t_l.sqrt()
    }

    /// `√t_l·√t_r`, half the bandwidth factor.
    pub fn q(&self) -> C64 {
        self.t_l.sqrt() * self.t_r.sqrt()
    }
}

pub fn hn_equation(p: &HnParams, n: usize) -> AlphaEquation {
    let rho = p.rho();
    let q = p.q();
    let rho_n = rho.powu(n as u32);
    AlphaEquation::Chain {
        n,
        e: (p.eps_first + p.eps_last) / q,
        c: p.delta_l * p.delta_r - p.eps_first * p.eps_last / (p.t_l * p.t_r),
        g: p.delta_l / rho_n + p.delta_r * rho_n,
    }
}

pub fn hn_spectrum(p: &HnParams, n: usize) -> Result<Solution> {
    let stencil = p.stencil(n);
    stencil.validate()?;
    if p.t_l == ZERO || p.t_r == ZERO {
        return Solution::oracle(&stencil, "zero hopping, closed form does not apply");
    }
    if n < 2 {
        return Solution::oracle(&stencil, "single site");
    }
    let poly = polynomialize(&hn_equation(p, n))?;
    let generator = if p.is_plain() {
        Generator::HatanoNelson
    } else {
        Generator::GeneralizedHn
    };
    let shift = C64::new(0.0, 1.0) * p.rho().ln();
    let alphas = alpha_from_roots(&roots(&poly)?, Pairing::Reciprocal, n, generator, shift)?;
    let q = p.q();
    let values = alphas
        .expanded()
        .iter()
        .map(|a| p.t_d + 2.0 * q * a.cos())
        .collect();
    Ok(Solution {
        spectrum: Spectrum::new(values, Provenance::Analytic),
        alphas: Some(alphas),
        oracle_fallback: false,
        notes: vec![],
    })
}

/// Unnormalized right eigenvector for the wave number `alpha`, sites `1..=n`.
pub fn hn_eigenvector(p: &HnParams, alpha: C64, n: usize) -> Result<Vec<C64>> {
    let rho = p.rho();
    let psi: Vec<C64> = if p.is_plain() {
        let rho_n = rho.powu(n as u32);
        (1..=n)
            .map(|k| {
                let kf = k as f64;
                rho.powu(k as u32)
                    * ((kf * alpha).sin() + p.delta_r * rho_n * ((n as f64 - kf) * alpha).sin())
            })
            .collect()
    } else {
        general_hn_vector(p, alpha, n)?
    };
    let scale = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sines = (1..=n).map(|k| (k as f64 * alpha).sin().norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || sines < 1e-12 {
        return Err(Error::VanishingVector(alpha));
    }
    Ok(psi)
}

/// Combination of `ρⁿ sin(nα̃)` and `ρⁿ cos(nα̃)` satisfying both boundary rows.
fn general_hn_vector(p: &HnParams, alpha: C64, n: usize) -> Result<Vec<C64>> {
    let h = build_chain_matrix(&p.stencil(n))?;
    let lambda = p.t_d + 2.0 * p.q() * alpha.cos();
    let rho = p.rho();
    let basis = |f: fn(C64) -> C64| -> Vec<C64> {
        (1..=n)
            .map(|k| rho.powu(k as u32) * f(k as f64 * alpha))
            .collect()
    };
    let f1 = basis(|z| z.sin());
    let f2 = basis(|z| z.cos());
    let res = |f: &Vec<C64>| -> Vec<C64> {
        let hf = h.matvec(f);
        vec![hf[0] - lambda * f[0], hf[n - 1] - lambda * f[n - 1]]
    };
    let (r1, r2) = (res(&f1), res(&f2));
    let (c1, c2) = if r1[0].norm() + r2[0].norm() >= r1[1].norm() + r2[1].norm() {
        (r2[0], -r1[0])
    } else {
        (r2[1], -r1[1])
    };
    Ok(f1.iter().zip(&f2).map(|(a, b)| c1 * a + c2 * b).collect())
}

pub fn hn_balanced(p: &HnParams) -> Balance {
    balance_of(p.t_r, p.t_l)
}

// ---------------------------------------------------------------------------
// SSH

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SshParams {
    pub t_l1: C64,
    pub t_r1: C64,
    pub t_l2: C64,
    pub t_r2: C64,
    pub v1: C64,
    pub v2: C64,
    pub delta_l: C64,
    pub delta_r: C64,
    pub n: usize,
}

impl SshParams {
    pub fn new(t_l1: C64, t_r1: C64, t_l2: C64, t_r2: C64, n: usize) -> Self {
        SshParams {
            t_l1,
            t_r1,
            t_l2,
            t_r2,
            v1: ZERO,
            v2: ZERO,
            delta_l: ZERO,
            delta_r: ZERO,
            n,
        }
    }

    pub fn with_potentials(mut self, v1: C64, v2: C64) -> Self {
        self.v1 = v1;
        self.v2 = v2;
        self
    }

    pub fn with_delta(mut self, delta: C64) -> Self {
        self.delta_l = delta;
        self.delta_r = delta;
        self
    }

    pub fn with_split_delta(mut self, delta_l: C64, delta_r: C64) -> Self {
        self.delta_l = delta_l;
        self.delta_r = delta_r;
        self
    }

    pub fn is_odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// Half the potential difference, `(v₁−v₂)/2`.
    pub fn v(&self) -> C64 {
        (self.v1 - self.v2) / 2.0
    }

    pub fn stencil(&self) -> ChainStencil {
        let n = self.n;
        let s = ChainStencil::new(n)
            .onsite(vec![self.v1, self.v2])
            .hopping_pattern(1, vec![self.t_l1, self.t_l2])
            .hopping_pattern(-1, vec![self.t_r1, self.t_r2])
            .split_delta(self.delta_l, self.delta_r);
        if self.is_odd() && n > 1 {
            s.override_wrap(0, n - 1, self.t_r1.sqrt() * self.t_r2.sqrt())
                .override_wrap(n - 1, 0, self.t_l1.sqrt() * self.t_l2.sqrt())
        } else {
            s
        }
    }

    /// `√t_l1·√t_l2·√t_r1·√t_r2`.
    pub fn q(&self) -> C64 {
        self.t_l1.sqrt() * self.t_l2.sqrt() * self.t_r1.sqrt() * self.t_r2.sqrt()
    }

    /// `t_l1·t_r1 + t_l2·t_r2`.
    pub fn p(&self) -> C64 {
        self.t_l1 * self.t_r1 + self.t_l2 * self.t_r2
    }

    fn hoppings_nonzero(&self) -> bool {
        [self.t_l1, self.t_r1, self.t_l2, self.t_r2].iter().all(|t| *t != ZERO)
    }
}

pub fn ssh_even_equation(p: &SshParams) -> AlphaEquation {
    let cells = p.n / 2;
    let (sl1, sr1, sl2, sr2) = (p.t_l1.sqrt(), p.t_r1.sqrt(), p.t_l2.sqrt(), p.t_r2.sqrt());
    let s = (sl2 * sr2) / (sl1 * sr1);
    let r = (sr1 * sr2) / (sl1 * sl2);
    let r_l = r.powu(cells as u32);
    let dd = p.delta_l * p.delta_r;
    AlphaEquation::Chain {
        n: cells,
        e: (dd - 1.0) * s,
        c: dd,
        g: p.delta_r * r_l + p.delta_l / r_l,
    }
}

pub fn ssh_odd_equation(p: &SshParams) -> AlphaEquation {
    let cells = (p.n + 1) / 2;
    let m = (cells - 1) as i32;
    let rr = p.t_r1 * p.t_r2;
    let ll = p.t_l1 * p.t_l2;
    let dd = p.delta_l * p.delta_r;
    let k = p.delta_r * p.delta_r * rr * (rr / ll).powi(m)
        + p.delta_l * p.delta_l * ll * (ll / rr).powi(m)
        + 2.0 * dd * p.q();
    AlphaEquation::SshOdd {
        cells,
        q: p.q(),
        p: p.p(),
        k,
        dd,
    }
}

pub fn ssh_spectrum(p: &SshParams) -> Result<Solution> {
    let stencil = p.stencil();
    stencil.validate()?;
    if !p.hoppings_nonzero() {
        return Solution::oracle(&stencil, "zero hopping, closed form does not apply");
    }
    if p.is_odd() {
        ssh_odd_spectrum(p, &stencil)
    } else {
        ssh_even_spectrum(p)
    }
}

fn ssh_even_spectrum(p: &SshParams) -> Result<Solution> {
    let cells = p.n / 2;
    let poly = polynomialize(&ssh_even_equation(p))?;
    let r = (p.t_r1.sqrt() * p.t_r2.sqrt()) / (p.t_l1.sqrt() * p.t_l2.sqrt());
    let shift = C64::new(0.0, 1.0) * r.ln();
    let alphas = alpha_from_roots(&roots(&poly)?, Pairing::Reciprocal, cells, Generator::SshEven, shift)?;
    let mid = (p.v1 + p.v2) / 2.0;
    let v = p.v();
    let (q, pp) = (p.q(), p.p());
    let mut values = Vec::with_capacity(p.n);
    for a in alphas.expanded() {
        let w = (v * v + pp + 2.0 * q * a.cos()).sqrt();
        values.push(mid + w);
        values.push(mid - w);
    }
    Ok(Solution {
        spectrum: Spectrum::new(values, Provenance::Analytic),
        alphas: Some(alphas),
        oracle_fallback: false,
        notes: vec![],
    })
}

fn ssh_odd_spectrum(p: &SshParams, stencil: &ChainStencil) -> Result<Solution> {
    if p.v1 != p.v2 {
        return Solution::oracle(stencil, "odd chain with alternating potential has no closed form");
    }
    let n = p.n;
    let cells = (n + 1) / 2;
    let m = cells - 1;
    let eq = ssh_odd_equation(p);
    let mut ys = roots(&polynomialize(&eq)?)?;
    if let AlphaEquation::SshOdd { cells, q, p, k, dd } = eq {
        refine_ssh_odd_roots(cells, q, p, k, dd, &mut ys);
    }
    let alphas = alpha_from_roots(&ys, Pairing::Reciprocal, n, Generator::SshOdd, ZERO)?;
    let (q, pp) = (p.q(), p.p());
    let dd = p.delta_l * p.delta_r;
    let gl = p.t_l1.sqrt() * p.t_l2.sqrt();
    let gr = p.t_r1.sqrt() * p.t_r2.sqrt();
    let d = p.delta_l * gl.powu(n as u32) + p.delta_r * gr.powu(n as u32);
    let d_scale = gl.norm().powi(n as i32).max(gr.norm().powi(n as i32));
    let q_m = q.powu(m as u32);
    let bulk_scale = pp.norm() + 2.0 * q.norm();

    let open = p.delta_l == ZERO && p.delta_r == ZERO;

    let mut values = Vec::with_capacity(n);
    let mut unresolved = Vec::new();
    for (&a, &mult) in alphas.values.iter().zip(&alphas.multiplicity) {
        let lam2 = pp + 2.0 * q * a.cos();
        let root = lam2.sqrt();
        if open && root.norm() <= 1e-7 * bulk_scale.sqrt() {
            // Without corners (Qy²+Py+Q) divides the equation and the mode is exact.
            values.extend(std::iter::repeat(p.v1).take(mult));
            continue;
        }
        let mut left = mult;
        if open {
            // Chiral symmetry pairs ±λ on a doubled wave number.
            for _ in 0..mult / 2 {
                values.push(p.v1 + root);
                values.push(p.v1 - root);
            }
            left = mult % 2;
        }
        for _ in 0..left {
            let mut resolved = None;
            if d.norm() > 1e-12 * d_scale {
                let w = dirichlet_ratio(cells as i64, a) - dd * dirichlet_ratio(m as i64, a);
                // λ = d/(W q^m) directly; near zero it is more accurate than
                // the square root of the cancelling λ².
                let direct = d / (w * q_m);
                let near = if (direct - root).norm() <= (direct + root).norm() { root } else { -root };
                let slack = 1e-3 * root.norm() + 1e-12 * bulk_scale / root.norm();
                if direct.is_finite() && (direct - near).norm() <= slack {
                    resolved = Some(if root.norm() < 1e-4 * bulk_scale.sqrt() { direct } else { near });
                }
            }
            match resolved {
                Some(l) => values.push(l + p.v1),
                None => unresolved.push(root),
            }
        }
    }
    let mut notes = vec![];
    if !unresolved.is_empty() {
        let oracle = dense_spectrum(&build_chain_matrix(stencil)?)?;
        let mut used = vec![false; oracle.len()];
        for root in unresolved {
            let mut best = (f64::INFINITY, 0usize, root);
            for cand in [root, -root] {
                for (i, o) in oracle.values.iter().enumerate() {
                    let dist = (cand + p.v1 - o).norm();
                    if !used[i] && dist < best.0 {
                        best = (dist, i, cand);
                    }
                }
            }
            used[best.1] = true;
            values.push(best.2 + p.v1);
        }
        notes.push("sign of some eigenvalues taken from the oracle".to_string());
    }
    Ok(Solution {
        spectrum: Spectrum::new(values, Provenance::Analytic),
        alphas: Some(alphas),
        oracle_fallback: !notes.is_empty(),
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroMode {
    /// `None` when `|r₁|` is within 1e-12 of one.
    pub present: Option<bool>,
    /// `|r₁| − 1` with `r₁ = t_l2·t_r2 / (t_l1·t_r1)`.
    pub margin: f64,
}

pub fn ssh_zero_mode_predicate(p: &SshParams) -> ZeroMode {
    let r1 = (p.t_l2 * p.t_r2 / (p.t_l1 * p.t_r1)).norm();
    let margin = r1 - 1.0;
    ZeroMode {
        present: if margin.abs() < 1e-12 { None } else { Some(margin > 0.0) },
        margin,
    }
}

pub fn ssh_balanced(p: &SshParams) -> Balance {
    balance_of(p.t_r1 * p.t_r2, p.t_l1 * p.t_l2)
}

// ---------------------------------------------------------------------------
// Long-range chains

pub fn unidirectional_stencil(t_l: C64, u_l: C64, delta: C64, n: usize) -> ChainStencil {
    ChainStencil::new(n)
        .hopping(1, t_l)
        .hopping(2, u_l)
        .delta(delta)
}

pub fn unidirectional_spectrum(t_l: C64, u_l: C64, delta: C64, n: usize) -> Result<Spectrum> {
    if n < 3 {
        return Err(Error::InvalidParams("unidirectional chain needs N >= 3".into()));
    }
    let nf = n as f64;
    let (mag, phi) = (delta.norm(), delta.arg());
    let values = (0..n)
        .map(|j| {
            let z = C64::from_polar(mag.powf(1.0 / nf), (phi + 2.0 * PI * j as f64) / nf);
            t_l * z + u_l * z * z
        })
        .collect();
    Ok(Spectrum::new(values, Provenance::Analytic))
}

pub fn mixed_stencil(t_r: C64, u_l: C64, delta_l: C64, delta_r: C64, n: usize) -> ChainStencil {
    ChainStencil::new(n)
        .hopping(2, u_l)
        .hopping(-1, t_r)
        .split_delta(delta_l, delta_r)
}

/// Degree-3N polynomial of the mixed-range chain and its roots.
pub fn mixed_roots(t_r: C64, u_l: C64, delta: C64, n: usize) -> Result<(PolyY, Vec<C64>)> {
    if u_l == ZERO || t_r == ZERO {
        return Err(Error::InvalidParams("mixed-range chain needs t_r, u_l != 0".into()));
    }
    let poly = polynomialize(&AlphaEquation::Mixed {
        n,
        rho: t_r / u_l,
        delta,
    })?;
    let mut r = roots(&poly)?;
    refine_mixed_roots(n, t_r / u_l, delta, &mut r);
    Ok((poly, r))
}

pub fn mixed_lambda(t_r: C64, u_l: C64) -> impl Fn(C64) -> C64 {
    move |y: C64| u_l * y * y + t_r / y
}

pub fn mixed_longrange_spectrum(t_r: C64, u_l: C64, delta: C64, n: usize) -> Result<Solution> {
    let stencil = mixed_stencil(t_r, u_l, delta, delta, n);
    stencil.validate()?;
    if u_l == ZERO || t_r == ZERO {
        return Solution::oracle(&stencil, "zero hopping, closed form does not apply");
    }
    let (_, ys) = mixed_roots(t_r, u_l, delta, n)?;
    let lambda = mixed_lambda(t_r, u_l);
    let groups = group_triples(&ys, &lambda)?;
    let values = groups
        .iter()
        .map(|g| g.iter().map(|&i| lambda(ys[i])).sum::<C64>() / 3.0)
        .collect();
    let alphas = alpha_from_roots(&ys, Pairing::Triples(&lambda), n, Generator::MixedLongRange, ZERO)?;
    Ok(Solution {
        spectrum: Spectrum::new(values, Provenance::Analytic),
        alphas: Some(alphas),
        oracle_fallback: false,
        notes: vec![],
    })
}

/// Chain with hoppings one and two sites in both directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralLongRange {
    pub t_l: C64,
    pub t_r: C64,
    pub u_l: C64,
    pub u_r: C64,
}

impl GeneralLongRange {
    /// Chain of triangles: `u_l = t_r`, `u_r = t_l`.
    pub fn triangle(t_l: C64, t_r: C64) -> Self {
        GeneralLongRange {
            t_l,
            t_r,
            u_l: t_r,
            u_r: t_l,
        }
    }

    pub fn stencil(&self, delta: C64, n: usize) -> ChainStencil {
        ChainStencil::new(n)
            .hopping(1, self.t_l)
            .hopping(-1, self.t_r)
            .hopping(2, self.u_l)
            .hopping(-2, self.u_r)
            .delta(delta)
    }
}

pub fn bloch_1d(p: &GeneralLongRange, k: f64) -> C64 {
    let e = |m: f64| C64::from_polar(1.0, m * k);
    p.t_l * e(1.0) + p.t_r * e(-1.0) + p.u_l * e(2.0) + p.u_r * e(-2.0)
}

/// Parametrizations whose Bloch curve encloses no area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NonwindingCase {
    /// Straight segment through a common phase `φ`.
    One { t: f64, u: f64, phi: f64, phi1: f64, phi2: f64 },
    /// Factorizes into a product of two cosines.
    Two { t: f64, phi: f64, phi1: f64, phi2: f64 },
    /// The curve for `k ∈ [π, 2π]` retraces the one for `k ∈ [0, π]`.
    Three { t: f64, u: f64, phi: f64, phi1: f64, phi2: f64 },
}

pub fn nonwinding_family(case: NonwindingCase) -> GeneralLongRange {
    let e = |mag: f64, arg: f64| C64::from_polar(mag, arg);
    match case {
        NonwindingCase::One { t, u, phi, phi1, phi2 } => GeneralLongRange {
            t_l: e(t, phi + phi1 / 2.0),
            t_r: e(t, phi - phi1 / 2.0),
            u_l: e(u, phi + phi2 / 2.0),
            u_r: e(u, phi - phi2 / 2.0),
        },
        NonwindingCase::Two { t, phi, phi1, phi2 } => GeneralLongRange {
            t_l: e(t, phi1),
            t_r: e(t, phi2),
            u_l: e(t, phi1 + phi),
            u_r: e(t, phi2 - phi),
        },
        NonwindingCase::Three { t, u, phi, phi1, phi2 } => GeneralLongRange {
            t_l: e(t, phi1),
            t_r: e(t, phi1 + phi),
            u_l: e(u, phi2),
            u_r: e(u, phi2 + 2.0 * phi),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matched_distance;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn oracle(s: &ChainStencil) -> Vec<C64> {
        dense_spectrum(&build_chain_matrix(s).unwrap()).unwrap().values
    }

    #[test]
    fn hermitian_three_sites() {
        let sol = hn_spectrum(&HnParams::new(ONE, ONE), 3).unwrap();
        let s2 = 2f64.sqrt();
        assert!(matched_distance(&sol.spectrum.values, &[c(s2, 0.0), ZERO, c(-s2, 0.0)]) < 1e-12);
    }

    #[test]
    fn two_sites_unbalanced() {
        let sol = hn_spectrum(&HnParams::new(ONE, c(2.0, 0.0)), 2).unwrap();
        let s2 = 2f64.sqrt();
        assert!(matched_distance(&sol.spectrum.values, &[c(s2, 0.0), c(-s2, 0.0)]) < 1e-12);
    }

    #[test]
    fn eigenvector_residual() {
        let p = HnParams::new(ONE, C64::from_polar(2.0, PI / 4.0)).with_delta(c(0.3, 0.0));
        let n = 12;
        let sol = hn_spectrum(&p, n).unwrap();
        let h = build_chain_matrix(&p.stencil(n)).unwrap();
        for a in sol.alphas.unwrap().values {
            let psi = hn_eigenvector(&p, a, n).unwrap();
            let lam = p.t_d + 2.0 * p.q() * a.cos();
            let hp = h.matvec(&psi);
            let res: f64 = hp.iter().zip(&psi).map(|(x, y)| (x - lam * y).norm_sqr()).sum::<f64>().sqrt();
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(res / norm < 1e-8, "residual {}", res / norm);
        }
    }

    #[test]
    fn general_eigenvector_residual() {
        let p = HnParams::new(c(1.0, 0.2), c(0.7, -0.4))
            .with_split_delta(c(0.3, 0.1), c(-0.5, 0.2))
            .with_ends(c(0.2, 0.0), c(0.0, -0.3));
        let n = 9;
        let sol = hn_spectrum(&p, n).unwrap();
        let h = build_chain_matrix(&p.stencil(n)).unwrap();
        for a in sol.alphas.unwrap().values {
            let psi = hn_eigenvector(&p, a, n).unwrap();
            let lam = 2.0 * p.q() * a.cos();
            let hp = h.matvec(&psi);
            let res: f64 = hp.iter().zip(&psi).map(|(x, y)| (x - lam * y).norm_sqr()).sum::<f64>().sqrt();
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(res / norm < 1e-8, "residual {}", res / norm);
        }
    }

    #[test]
    fn vanishing_vector_is_reported() {
        let p = HnParams::new(ONE, ONE);
        assert!(matches!(hn_eigenvector(&p, ZERO, 5), Err(Error::VanishingVector(_))));
    }

    #[test]
    fn balance_flags() {
        assert!(!hn_balanced(&HnParams::new(ONE, C64::from_polar(2.0, PI / 4.0))).balanced);
        let b = hn_balanced(&HnParams::new(ONE, C64::from_polar(1.0, PI / 4.0)));
        assert!(b.balanced && (b.theta - PI / 4.0).abs() < 1e-15);
        assert!(hn_balanced(&HnParams::new(c(0.5, 0.0), c(0.5, 0.0))).balanced);
        let ssh = |a: C64, b: C64, cc: C64, d: C64| SshParams::new(a, b, cc, d, 30);
        assert!(!ssh_balanced(&ssh(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0))).balanced);
        assert!(ssh_balanced(&ssh(c(0.0, -1.0), c(0.5, 0.0), c(4.0, 0.0), c(8.0, 0.0))).balanced);
    }

    #[test]
    fn ssh_matches_oracle_both_parities() {
        for n in [8, 9] {
            let p = SshParams::new(c(1.0, 0.3), c(0.6, -0.2), c(1.2, 0.1), c(0.8, 0.5), n)
                .with_split_delta(c(0.4, 0.1), c(0.7, -0.2));
            let sol = ssh_spectrum(&p).unwrap();
            let d = matched_distance(&sol.spectrum.values, &oracle(&p.stencil()));
            assert!(d < 1e-9, "N={n}: {d}");
        }
    }

    #[test]
    fn hermitian_periodic_ssh_bands() {
        let n = 10;
        let p = SshParams::new(ONE, ONE, ONE, ONE, n).with_delta(ONE);
        let sol = ssh_spectrum(&p).unwrap();
        let mut want = vec![];
        for j in 0..n / 2 {
            let k = 2.0 * PI * j as f64 / (n / 2) as f64;
            let e = (ONE + C64::from_polar(1.0, k)).norm();
            want.push(c(e, 0.0));
            want.push(c(-e, 0.0));
        }
        assert!(matched_distance(&sol.spectrum.values, &want) < 1e-7);
    }

    #[test]
    fn odd_open_chain_has_zero_mode() {
        let p = SshParams::new(c(0.9, 0.4), c(1.3, -0.2), c(0.7, 0.1), c(1.1, 0.6), 5);
        let sol = ssh_spectrum(&p).unwrap();
        let min = sol.spectrum.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!(min < 1e-10);
    }

    #[test]
    fn zero_mode_predicate_examples() {
        let ssh = |a: f64, b: f64, cc: f64, d: f64| SshParams::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0), 30);
        assert_eq!(ssh_zero_mode_predicate(&ssh(1.0, 2.0, 3.0, 4.0)).present, Some(true));
        assert_eq!(ssh_zero_mode_predicate(&ssh(3.0, 4.0, 1.0, 2.0)).present, Some(false));
        assert_eq!(ssh_zero_mode_predicate(&ssh(1.0, 2.0, 2.0, 1.0)).present, None);
    }

    #[test]
    fn unidirectional_examples() {
        let zero = unidirectional_spectrum(ONE, c(2.0, 0.0), ZERO, 7).unwrap();
        assert!(zero.values.iter().all(|z| z.norm() == 0.0));
        let s = unidirectional_spectrum(ONE, c(2.0, 0.0), ONE, 4).unwrap();
        let want: Vec<C64> = (0..4)
            .map(|j| C64::new(0.0, 1.0).powu(j) + 2.0 * c(-1.0, 0.0).powu(j))
            .collect();
        assert!(matched_distance(&s.values, &want) < 1e-12);
        assert!(matched_distance(&s.values, &oracle(&unidirectional_stencil(ONE, c(2.0, 0.0), ONE, 4))) < 1e-12);
    }

    #[test]
    fn mixed_periodic_contains_fourier_values() {
        let n = 6;
        let sol = mixed_longrange_spectrum(ONE, ONE, ONE, n).unwrap();
        for j in 0..n {
            let k = 2.0 * PI * j as f64 / n as f64;
            let f = C64::from_polar(1.0, 2.0 * k) + C64::from_polar(1.0, -k);
            let best = sol.spectrum.values.iter().map(|z| (z - f).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "missing {f}");
        }
    }

    #[test]
    fn mixed_degree_and_oracle() {
        let (t_r, u_l) = (ONE, c(2.0, 0.0));
        let (poly, _) = mixed_roots(t_r, u_l, c(0.3, 0.0), 6).unwrap();
        assert_eq!(poly.degree(), 18);
        let sol = mixed_longrange_spectrum(t_r, u_l, c(0.3, 0.0), 5).unwrap();
        assert_eq!(sol.alphas.as_ref().unwrap().count(), 5);
        let o = oracle(&mixed_stencil(t_r, u_l, c(0.3, 0.0), c(0.3, 0.0), 5));
        assert!(matched_distance(&sol.spectrum.values, &o) < 1e-9);
    }

    #[test]
    fn bloch_examples() {
        let p = GeneralLongRange { t_l: c(1.0, 0.5), t_r: c(-0.3, 0.2), u_l: c(0.7, 0.0), u_r: c(0.0, 1.1) };
        assert!((bloch_1d(&p, 0.0) - (p.t_l + p.t_r + p.u_l + p.u_r)).norm() < 1e-15);
        assert!(bloch_1d(&GeneralLongRange::triangle(ONE, ONE), PI).norm() < 1e-14);
        for i in 0..16 {
            let k = -PI + 0.4 * i as f64;
            let direct = p.t_l * C64::new(0.0, k).exp()
                + p.t_r * C64::new(0.0, -k).exp()
                + p.u_l * C64::new(0.0, 2.0 * k).exp()
                + p.u_r * C64::new(0.0, -2.0 * k).exp();
            assert!((bloch_1d(&p, k) - direct).norm() < 1e-14);
            let s = p.stencil(ZERO, 12).bloch(k);
            assert!((s - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn nonwinding_examples() {
        let one = nonwinding_family(NonwindingCase::One { t: 1.0, u: 1.0, phi: 0.0, phi1: 0.0, phi2: 0.0 });
        assert_eq!(one, GeneralLongRange { t_l: ONE, t_r: ONE, u_l: ONE, u_r: ONE });
        let two = nonwinding_family(NonwindingCase::Two { t: 1.0, phi: PI / 2.0, phi1: 0.0, phi2: 0.0 });
        for i in 0..20 {
            let k = -PI + 0.3 * i as f64;
            let want = 4.0 * ((k + PI / 2.0) / 2.0).cos() * ((3.0 * k + PI / 2.0) / 2.0).cos();
            assert!((bloch_1d(&two, k) - c(want, 0.0)).norm() < 1e-13);
        }
    }
}
