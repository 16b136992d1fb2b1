//! Boundary-determinant conditions rewritten as polynomials in `y = e^{iα̃}`,
//! their roots, and the reduction of roots to sets of wave numbers.

use std::collections::BTreeMap;
use std::fmt;

use faer::Mat;

use crate::matrix::{build_chain_matrix, ChainStencil};
use crate::{Error, Result, C64};

/// Two roots closer than this in the y-plane count as one value of multiplicity two.
pub const DEDUP_TOL: f64 = 1e-9;

/// `sin(n z) / sin(z)`, continuous through the zeros of `sin z`.
pub fn dirichlet_ratio(n: i64, z: C64) -> C64 {
    if n < 0 {
        return -dirichlet_ratio(-n, z);
    }
    if n == 0 {
        return C64::new(0.0, 0.0);
    }
    if z.sin().norm() >= 1e-3 {
        return (z * n as f64).sin() / z.sin();
    }
    // Chebyshev recurrence for U_{n-1}(cos z).
    let x = z.cos();
    let (mut u0, mut u1) = (C64::new(1.0, 0.0), 2.0 * x);
    if n == 1 {
        return u0;
    }
    for _ in 2..n {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// Polynomial in `y`, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyY {
    pub coeffs: Vec<C64>,
    /// Human-readable record of every factor divided out.
    pub removed: Vec<String>,
}

impl PolyY {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        PolyY {
            coeffs,
            removed: Vec::new(),
        }
    }

    fn from_laurent(terms: &BTreeMap<i64, C64>) -> Self {
        let lo = terms.keys().next().copied().unwrap_or(0);
        let hi = terms.keys().last().copied().unwrap_or(0);
        let mut coeffs = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, v) in terms {
            coeffs[(k - lo) as usize] += v;
        }
        PolyY::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, y: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * y + c)
    }

    fn eval_with_derivative(&self, y: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * y + p;
            p = p * y + c;
        }
        (p, dp)
    }

    /// Newton correction `p(y)/p'(y)` without overflow: outside the unit
    /// disk the reversed polynomial is evaluated at `1/y`.
    pub fn newton_correction(&self, y: C64) -> C64 {
        if y.norm() <= 1.0 {
            let (p, dp) = self.eval_with_derivative(y);
            return safe_div(p, dp);
        }
        let m = self.degree() as f64;
        let z = C64::new(1.0, 0.0) / y;
        let mut q = C64::new(0.0, 0.0);
        let mut dq = C64::new(0.0, 0.0);
        for c in &self.coeffs {
            dq = dq * z + q;
            q = q * z + c;
        }
        safe_div(y * q, m * q - z * dq)
    }

    pub fn derivative(&self) -> PolyY {
        let coeffs: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        if coeffs.is_empty() {
            PolyY::new(vec![C64::new(0.0, 0.0)])
        } else {
            PolyY::new(coeffs)
        }
    }

    pub fn mul(&self, other: &PolyY) -> PolyY {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyY::new(out)
    }

    /// Divides out a factor known to be exact, logging it under `label`.
    ///
    /// The division runs from whichever end of the divisor has the larger
    /// coefficient, so the recurrence never amplifies rounding errors.
    pub fn divide_exact(&self, divisor: &PolyY, label: &str) -> Result<PolyY> {
        let n = self.degree();
        let m = divisor.degree();
        if m > n {
            return Err(Error::DegeneratePolynomial(format!(
                "cannot divide degree {n} by degree {m}"
            )));
        }
        let a = &self.coeffs;
        let d = &divisor.coeffs;
        let mut q = vec![C64::new(0.0, 0.0); n - m + 1];
        let residual;
        if d[m].norm() >= d[0].norm() {
            let mut r = a.clone();
            for k in (0..=n - m).rev() {
                q[k] = r[k + m] / d[m];
                for (i, di) in d.iter().enumerate() {
                    r[k + i] -= q[k] * di;
                }
            }
            residual = r[..m].iter().map(|c| c.norm()).fold(0.0, f64::max);
        } else {
            let mut r = a.clone();
            for k in 0..=n - m {
                q[k] = r[k] / d[0];
                for (i, di) in d.iter().enumerate() {
                    r[k + i] -= q[k] * di;
                }
            }
            residual = r[n - m + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        }
        if residual > 1e-8 * self.norm().max(1.0) {
            return Err(Error::DegeneratePolynomial(format!(
                "factor {label} leaves remainder {residual:e}"
            )));
        }
        let mut out = PolyY::new(q);
        out.removed = self.removed.clone();
        out.removed.push(label.to_string());
        Ok(out)
    }
}

/// Complex division that scales first, so `|b|²` cannot overflow.
pub(crate) fn safe_div(a: C64, b: C64) -> C64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}

/// Root of `(y²−1)`, shared by every sine-ratio equation.
fn sine_factor() -> PolyY {
    PolyY::new(vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
}

/// All roots, with multiplicity: eigenvalues of the companion matrix,
/// polished by one Newton step when that lowers the residual and then
/// refined together.
pub fn roots(poly: &PolyY) -> Result<Vec<C64>> {
    let n = poly.degree();
    if n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let zeros = poly.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    let core = PolyY::new(poly.coeffs[zeros..].to_vec());
    let m = core.degree();
    if m == 0 {
        return Ok(out);
    }
    // Rescale y = s·z so the end coefficients have equal magnitude.
    let s = (core.coeffs[0].norm() / core.leading().norm()).powf(1.0 / m as f64);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    let lead = core.leading() * s.powi(m as i32);
    let monic: Vec<C64> = core
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * s.powi(k as i32) / lead)
        .collect();
    let companion = Mat::<C64>::from_fn(m, m, |r, c| {
        if c == m - 1 {
            -monic[r]
        } else if r == c + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let eig = companion
        .eigenvalues()
        .map_err(|_| Error::DegeneratePolynomial("companion eigensolver failed".into()))?;
    for z in eig {
        let y = z * s;
        let p = core.eval(y);
        let step = y - core.newton_correction(y);
        let polished = if step.is_finite() && core.eval(step).norm() < p.norm() {
            step
        } else {
            y
        };
        out.push(polished);
    }
    merge_multiple_roots(&core, &mut out[zeros..]);
    // Strongly graded coefficients leave some companion eigenvalues far off.
    aberth_refine(&mut out[zeros..], &|y| core.newton_correction(y));
    Ok(out)
}

/// Companion eigenvalues split a k-fold root into a cluster of radius
/// about `eps^(1/k)`. Clusters that are genuinely one multiple root are
/// collapsed onto the zero of the (k−1)-th derivative near their centroid.
fn merge_multiple_roots(poly: &PolyY, ys: &mut [C64]) {
    let n = ys.len();
    let close = |a: C64, b: C64| (a - b).norm() < 1e-4 * a.norm().max(b.norm()).max(1.0);
    let mut cluster: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if close(ys[i], ys[j]) {
                let (ci, cj) = (cluster[i], cluster[j]);
                for c in cluster.iter_mut() {
                    if *c == ci {
                        *c = cj;
                    }
                }
            }
        }
    }
    let magnitude = |y: C64| {
        poly.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * y.norm().powi(k as i32))
            .sum::<f64>()
    };
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| cluster[i] == root).collect();
        let k = members.len();
        if k < 2 {
            continue;
        }
        let centroid = members.iter().map(|&i| ys[i]).sum::<C64>() / k as f64;
        let mut d = poly.clone();
        for _ in 1..k {
            d = d.derivative();
        }
        let mut y = centroid;
        for _ in 0..20 {
            let (p, dp) = d.eval_with_derivative(y);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            y -= step;
            if step.norm() <= 1e-15 * y.norm().max(1.0) {
                break;
            }
        }
        let member_residual = members
            .iter()
            .map(|&i| poly.eval(ys[i]).norm())
            .fold(0.0, f64::max);
        let bound = (100.0 * member_residual.max(1e-15 * magnitude(y))).min(1e-12 * magnitude(y));
        if y.is_finite() && close(y, centroid) && poly.eval(y).norm() <= bound {
            for &i in &members {
                ys[i] = y;
            }
        }
    }
}

/// Model equations that become polynomials in `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaEquation {
    /// `g − U(n+1) + e·U(n) + c·U(n−1) = 0` with `U(k) = sin(kα̃)/sin α̃`.
    ///
    /// Covers the Hatano-Nelson chain, its end-potential generalization and the
    /// even SSH chain (with `n` the number of unit cells).
    Chain { n: usize, e: C64, c: C64, g: C64 },
    /// Odd SSH chain with `cells = (N+1)/2`:
    /// `(Q y² + P y + Q)·B̃² = K y^{2·cells−1}` where
    /// `B̃ = [(y^{2M}−1) − dd·(y^{2M−1}−y)] / (y²−1)`.
    SshOdd {
        cells: usize,
        q: C64,
        p: C64,
        k: C64,
        dd: C64,
    },
    /// Mixed-range chain (`u_l` two sites up, `t_r` one site down),
    /// `rho = t_r/u_l`, on `y = e^{iα}`.
    Mixed { n: usize, rho: C64, delta: C64 },
}

fn monomial(k: usize, c: C64) -> PolyY {
    let mut v = vec![C64::new(0.0, 0.0); k + 1];
    v[k] = c;
    PolyY::new(v)
}

fn add(a: &PolyY, b: &PolyY) -> PolyY {
    let mut v = vec![C64::new(0.0, 0.0); a.coeffs.len().max(b.coeffs.len())];
    for (i, c) in a.coeffs.iter().enumerate() {
        v[i] += c;
    }
    for (i, c) in b.coeffs.iter().enumerate() {
        v[i] += c;
    }
    PolyY::new(v)
}

/// Polynomial in `r` for the sequence `p(0)=0, p(1)=−1, p(n) = −p(n−1) + r·p(n−2)`.
pub fn mixed_p(n: usize) -> Vec<C64> {
    let mut prev = vec![C64::new(0.0, 0.0)];
    let mut cur = vec![C64::new(-1.0, 0.0)];
    if n == 0 {
        return prev;
    }
    for _ in 2..=n {
        let mut next = vec![C64::new(0.0, 0.0); cur.len().max(prev.len() + 1)];
        for (i, c) in cur.iter().enumerate() {
            next[i] -= c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i + 1] += c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Polynomial in `r` helpers for the mixed-range equation.
fn rpoly_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        v[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        v[i] += c;
    }
    v
}

fn rpoly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    v
}

fn rpoly_scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|c| c * s).collect()
}

/// `(−r)^k` as a polynomial in `r`.
fn neg_r_pow(k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); k + 1];
    v[k] = C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    v
}

fn r_lin(c0: f64, c1: f64) -> Vec<C64> {
    vec![C64::new(c0, 0.0), C64::new(c1, 0.0)]
}

fn mixed_polynomial(n: usize, rho: C64, delta: C64) -> Result<PolyY> {
    if n < 2 {
        return Err(Error::InvalidParams("mixed-range chain needs N >= 2".into()));
    }
    let pn = mixed_p(n);
    let pm = mixed_p(n - 1);
    let one = C64::new(1.0, 0.0);
    let d2 = delta * delta;
    let d3 = d2 * delta;
    let ni = n as i64;

    // (prefactor, power of y, bracket polynomial in r)
    let mut terms: Vec<(C64, i64, Vec<C64>)> = Vec::new();
    let t1 = rpoly_add(
        &rpoly_add(&rpoly_mul(&r_lin(2.0, 1.0), &pn), &rpoly_mul(&r_lin(0.0, -2.0), &pm)),
        &neg_r_pow(n + 1),
    );
    terms.push((-one, 3 * ni + 3, t1));
    let t2 = rpoly_add(
        &rpoly_add(&[C64::new(2.0, 0.0)], &rpoly_scale(&pn, C64::new(2.0, 0.0))),
        &rpoly_mul(&[C64::new(0.0, 0.0), C64::new(-2.0, 0.0), C64::new(2.0, 0.0)], &pm),
    );
    terms.push((delta, 2 * ni + 3, t2));
    terms.push((delta, 4 * ni + 3, rpoly_mul(&r_lin(2.0, -1.0), &neg_r_pow(n))));
    let t4 = rpoly_add(
        &rpoly_add(
            &rpoly_mul(&r_lin(0.0, 2.0), &pn),
            &rpoly_mul(&[C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(-2.0, 0.0)], &pm),
        ),
        &rpoly_scale(&neg_r_pow(n), C64::new(-2.0, 0.0)),
    );
    terms.push((d2, 3 * ni + 3, t4));
    terms.push((-d2, ni + 3, r_lin(2.0, -1.0)));
    let t6 = rpoly_mul(
        &r_lin(0.0, 1.0),
        &rpoly_add(&rpoly_add(&[one], &rpoly_scale(&pm, C64::new(2.0, 0.0))), &pn),
    );
    terms.push((-d3, 2 * ni + 3, t6));

    // r = rho·y^{-3}
    let mut laurent: BTreeMap<i64, C64> = BTreeMap::new();
    for (pre, ypow, bracket) in terms {
        let mut rk = C64::new(1.0, 0.0);
        for (k, c) in bracket.iter().enumerate() {
            if c.norm() > 0.0 {
                *laurent.entry(ypow - 3 * k as i64).or_insert(C64::new(0.0, 0.0)) += pre * c * rk;
            }
            rk *= rho;
        }
    }
    // The powers run exactly from y^0 (coefficient ±rho^{n+1}) to y^{3n+3};
    // small end coefficients are genuine, not rounding noise.
    let poly = PolyY::from_laurent(&laurent);
    let spurious = PolyY::new(vec![rho, C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.0, 0.0)]);
    let out = poly.divide_exact(&spurious, "(t_r/u_l - 2y^3)")?;
    if out.degree() != 3 * n {
        return Err(Error::DegeneratePolynomial(format!(
            "expected degree {} after factor removal, found {} (leading coefficient {})",
            3 * n,
            out.degree(),
            out.leading()
        )));
    }
    Ok(out)
}

/// Value and derivative carried together.
#[derive(Clone, Copy)]
struct Dual(C64, C64);

impl Dual {
    fn c(v: C64) -> Self {
        Dual(v, C64::new(0.0, 0.0))
    }
    fn add(self, o: Dual) -> Dual {
        Dual(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: Dual) -> Dual {
        Dual(self.0 * o.0, self.0 * o.1 + self.1 * o.0)
    }
    fn scale(self, s: C64) -> Dual {
        Dual(self.0 * s, self.1 * s)
    }
    fn powu(self, k: usize) -> Dual {
        if k == 0 {
            return Dual::c(C64::new(1.0, 0.0));
        }
        let v = self.0.powu(k as u32);
        Dual(v, self.1 * k as f64 * self.0.powu(k as u32 - 1))
    }
}

/// Mixed-range equation evaluated without expanding into coefficients,
/// returning the Newton correction for the reduced (degree 3N) form.
fn mixed_newton_step(n: usize, rho: C64, delta: C64, y: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let yd = Dual(y, one);
    let r = Dual(rho / y.powu(3), -3.0 * rho / y.powu(4));
    let (mut prev, mut cur) = (Dual::c(C64::new(0.0, 0.0)), Dual::c(-one));
    for _ in 2..=n {
        let next = cur.scale(-one).add(r.mul(prev));
        prev = cur;
        cur = next;
    }
    let (pn, pm) = (cur, prev);
    let k = |v: f64| Dual::c(C64::new(v, 0.0));
    let neg_r = r.scale(-one);
    let t1 = k(2.0).add(r).mul(pn).add(r.scale(C64::new(-2.0, 0.0)).mul(pm)).add(neg_r.powu(n + 1));
    let t2 = k(2.0).add(pn.scale(C64::new(2.0, 0.0))).add(r.scale(C64::new(-2.0, 0.0)).add(r.mul(r).scale(C64::new(2.0, 0.0))).mul(pm));
    let t3 = k(2.0).add(r.scale(-one)).mul(neg_r.powu(n));
    let t4 = r.scale(C64::new(2.0, 0.0)).mul(pn)
        .add(r.scale(C64::new(2.0, 0.0)).add(r.mul(r).scale(C64::new(-2.0, 0.0))).mul(pm))
        .add(neg_r.powu(n).scale(C64::new(-2.0, 0.0)));
    let t5 = k(2.0).add(r.scale(-one));
    let t6 = r.mul(k(1.0).add(pm.scale(C64::new(2.0, 0.0))).add(pn));
    let d2 = delta * delta;
    let f = yd.powu(3 * n + 3).mul(t1).scale(-one)
        .add(yd.powu(2 * n + 3).mul(t2).scale(delta))
        .add(yd.powu(4 * n + 3).mul(t3).scale(delta))
        .add(yd.powu(3 * n + 3).mul(t4).scale(d2))
        .add(yd.powu(n + 3).mul(t5).scale(-d2))
        .add(yd.powu(2 * n + 3).mul(t6).scale(-d2 * delta));
    let spurious = rho - 2.0 * y.powu(3);
    let log_deriv = safe_div(f.1, f.0) + safe_div(6.0 * y * y, spurious);
    safe_div(one, log_deriv)
}

/// Newton refinement of roots against an unexpanded form of the equation;
/// `step(y)` returns `f(y)/f'(y)`.
///
/// Each root may move at most a third of the way to its nearest neighbour,
/// so distinct estimates cannot collapse onto one root. Merged multiple
/// roots are left alone: Newton on `f` stalls near them at `eps^(1/k)`.
pub fn refine_roots(ys: &mut [C64], step: &dyn Fn(C64) -> C64) {
    let orig = ys.to_vec();
    for i in 0..ys.len() {
        if orig.iter().enumerate().any(|(j, &z)| j != i && z == orig[i]) {
            continue;
        }
        let gap = orig
            .iter()
            .enumerate()
            .filter(|&(j, z)| j != i && (z - orig[i]).norm() > 1e-10 * orig[i].norm().max(1.0))
            .map(|(_, z)| (z - orig[i]).norm())
            .fold(f64::INFINITY, f64::min);
        let mut y = orig[i];
        let mut ok = true;
        for _ in 0..30 {
            let dy = step(y);
            if !dy.is_finite() {
                ok = false;
                break;
            }
            y -= dy;
            if dy.norm() <= 1e-15 * y.norm().max(1e-300) {
                break;
            }
        }
        if ok && y.is_finite() && (y - orig[i]).norm() < gap / 3.0 {
            ys[i] = y;
        }
    }
}

/// Simultaneous (Aberth) refinement of all roots of a polynomial whose
/// Newton correction `f/f'` is given by `step`. Unlike independent Newton
/// steps this recovers roots that the companion matrix placed badly, since
/// each estimate is repelled from the others. Merged multiple roots stay put.
pub fn aberth_refine(ys: &mut [C64], step: &dyn Fn(C64) -> C64) {
    let n = ys.len();
    let fixed: Vec<bool> = (0..n)
        .map(|i| (0..n).any(|j| j != i && ys[j] == ys[i]))
        .collect();
    let orig = ys.to_vec();
    for _ in 0..200 {
        let mut moved = false;
        for i in 0..n {
            if fixed[i] {
                continue;
            }
            let newton = step(ys[i]);
            if !newton.is_finite() {
                continue;
            }
            let repel: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (ys[i] - ys[j]))
                .sum();
            let w = safe_div(newton, C64::new(1.0, 0.0) - newton * repel);
            if !w.is_finite() {
                continue;
            }
            ys[i] -= w;
            if w.norm() > 1e-14 * ys[i].norm().max(1e-300) {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    for i in 0..n {
        if !ys[i].is_finite() {
            ys[i] = orig[i];
        }
    }
}

pub fn refine_mixed_roots(n: usize, rho: C64, delta: C64, ys: &mut [C64]) {
    aberth_refine(ys, &|y| mixed_newton_step(n, rho, delta, y));
}

/// Newton correction for the odd SSH equation in product form.
fn ssh_odd_newton_step(cells: usize, q: C64, p: C64, k: C64, dd: C64, y: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let yd = Dual(y, one);
    let y2 = yd.mul(yd);
    let mut b = Dual::c(C64::new(0.0, 0.0));
    let mut pw = Dual::c(one);
    for j in 0..cells {
        b = b.add(pw);
        if j + 1 < cells {
            b = b.add(pw.mul(yd).scale(-dd));
        }
        pw = pw.mul(y2);
    }
    let quad = y2.scale(q).add(yd.scale(p)).add(Dual::c(q));
    let f = quad.mul(b).mul(b).add(yd.powu(2 * cells - 1).scale(-k));
    safe_div(f.0, f.1)
}

pub fn refine_ssh_odd_roots(cells: usize, q: C64, p: C64, k: C64, dd: C64, ys: &mut [C64]) {
    refine_roots(ys, &|y| ssh_odd_newton_step(cells, q, p, k, dd, y));
}

pub fn polynomialize(eq: &AlphaEquation) -> Result<PolyY> {
    match *eq {
        AlphaEquation::Chain { n, e, c, g } => {
            if n == 0 {
                return Err(Error::InvalidParams("chain equation needs n >= 1".into()));
            }
            let one = C64::new(1.0, 0.0);
            let mut p = PolyY::new(vec![C64::new(0.0, 0.0)]);
            for (k, v) in [
                (2 * n + 2, -one),
                (0, one),
                (2 * n + 1, e),
                (1, -e),
                (2 * n, c),
                (2, -c),
                (n + 2, g),
                (n, -g),
            ] {
                p = add(&p, &monomial(k, v));
            }
            // The leading coefficient is exactly −1, however large `g` is.
            p.divide_exact(&sine_factor(), "(y^2 - 1)")
        }
        AlphaEquation::SshOdd { cells, q, p, k, dd } => {
            if cells < 2 {
                return Err(Error::InvalidParams("odd SSH chain needs N >= 3".into()));
            }
            let m = cells;
            let one = C64::new(1.0, 0.0);
            let mut b = PolyY::new(vec![C64::new(0.0, 0.0)]);
            for (deg, v) in [(2 * m, one), (0, -one), (2 * m - 1, -dd), (1, dd)] {
                b = add(&b, &monomial(deg, v));
            }
            let bt = b.divide_exact(&sine_factor(), "(y^2 - 1)")?;
            let quad = PolyY::new(vec![q, p, q]);
            let mut poly = quad.mul(&bt.mul(&bt));
            poly = add(&poly, &monomial(2 * m - 1, -k));
            poly.removed = bt.removed.clone();
            if q == C64::new(0.0, 0.0) {
                return Err(Error::DegeneratePolynomial("odd SSH equation with q = 0".into()));
            }
            Ok(poly)
        }
        AlphaEquation::Mixed { n, rho, delta } => mixed_polynomial(n, rho, delta),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    HatanoNelson,
    GeneralizedHn,
    SshEven,
    SshOdd,
    MixedLongRange,
    StackedHn,
    StackedSsh,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::HatanoNelson => "hatano-nelson",
            Generator::GeneralizedHn => "generalized-hn",
            Generator::SshEven => "ssh-even",
            Generator::SshOdd => "ssh-odd",
            Generator::MixedLongRange => "mixed-longrange",
            Generator::StackedHn => "stacked-hn",
            Generator::StackedSsh => "stacked-ssh",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSet {
    pub values: Vec<C64>,
    pub multiplicity: Vec<usize>,
    /// `α̃ = α + shift`.
    pub shift: C64,
    pub generator: Generator,
}

impl AlphaSet {
    pub fn count(&self) -> usize {
        self.multiplicity.iter().sum()
    }

    /// Values repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.values
            .iter()
            .zip(&self.multiplicity)
            .flat_map(|(v, &m)| std::iter::repeat(*v).take(m))
            .collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }
}

/// How roots of a model polynomial collapse onto distinct wave numbers.
pub enum Pairing<'a> {
    /// Roots come in `(y, 1/y)` pairs giving the same eigenvalue.
    Reciprocal,
    /// Roots come in triples with equal image under the eigenvalue map.
    Triples(&'a dyn Fn(C64) -> C64),
    /// Every root is its own class.
    Plain,
}

fn to_alpha(y: C64) -> C64 {
    C64::new(0.0, -1.0) * y.ln()
}

/// Canonical representative of `±α̃`: real part in `[0, π]`.
fn canonical(a: C64) -> C64 {
    if a.re < -1e-15 || (a.re.abs() <= 1e-15 && a.im < 0.0) {
        -a
    } else {
        a
    }
}

pub fn alpha_from_roots(
    roots: &[C64],
    pairing: Pairing<'_>,
    expected: usize,
    generator: Generator,
    shift: C64,
) -> Result<AlphaSet> {
    let reps: Vec<C64> = match pairing {
        Pairing::Plain => roots.iter().map(|&y| to_alpha(y)).collect(),
        Pairing::Reciprocal => {
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for i in 0..roots.len() {
                for j in i + 1..roots.len() {
                    pairs.push(((roots[i] * roots[j] - 1.0).norm(), i, j));
                }
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut used = vec![false; roots.len()];
            let mut reps = Vec::new();
            for (_, i, j) in pairs {
                if used[i] || used[j] {
                    continue;
                }
                used[i] = true;
                used[j] = true;
                let y = 0.5 * (roots[i] + 1.0 / roots[j]);
                reps.push(canonical(to_alpha(y)));
            }
            if used.iter().any(|u| !u) {
                return Err(Error::Cardinality {
                    expected: 2 * expected,
                    found: roots.len(),
                });
            }
            reps
        }
        Pairing::Triples(lambda) => {
            let groups = group_triples(roots, lambda)?;
            groups
                .iter()
                .map(|g| {
                    let y = *g
                        .iter()
                        .map(|&i| &roots[i])
                        .min_by(|a, b| a.norm().ln().abs().total_cmp(&b.norm().ln().abs()))
                        .unwrap();
                    to_alpha(y)
                })
                .collect()
        }
    };

    let mut values: Vec<C64> = Vec::new();
    let mut multiplicity: Vec<usize> = Vec::new();
    for a in reps {
        let y = (C64::new(0.0, 1.0) * a).exp();
        match values
            .iter()
            .position(|v| ((C64::new(0.0, 1.0) * v).exp() - y).norm() < DEDUP_TOL)
        {
            Some(k) => multiplicity[k] += 1,
            None => {
                values.push(a);
                multiplicity.push(1);
            }
        }
    }
    let set = AlphaSet {
        values,
        multiplicity,
        shift,
        generator,
    };
    if set.count() != expected {
        return Err(Error::Cardinality {
            expected,
            found: set.count(),
        });
    }
    Ok(set)
}

/// Groups roots into triples with equal eigenvalue; returns root indices.
pub fn group_triples(roots: &[C64], lambda: &dyn Fn(C64) -> C64) -> Result<Vec<[usize; 3]>> {
    if roots.len() % 3 != 0 {
        return Err(Error::TripleGrouping(format!(
            "{} roots cannot form triples",
            roots.len()
        )));
    }
    let lam: Vec<C64> = roots.iter().map(|&y| lambda(y)).collect();
    let scale = lam.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut used = vec![false; roots.len()];
    let mut groups = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut near: Vec<(f64, usize)> = (0..roots.len())
            .filter(|&j| !used[j])
            .map(|j| ((lam[j] - lam[i]).norm(), j))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if near.len() < 2 {
            return Err(Error::TripleGrouping("ran out of partners".into()));
        }
        let (j, k) = (near[0].1, near[1].1);
        used[j] = true;
        used[k] = true;
        let spread = [(i, j), (i, k), (j, k)]
            .iter()
            .map(|&(a, b)| (lam[a] - lam[b]).norm())
            .fold(0.0, f64::max);
        if spread > 1e-6 * scale {
            return Err(Error::TripleGrouping(format!(
                "eigenvalue spread {spread:e} within triple around {}",
                lam[i]
            )));
        }
        groups.push([i, j, k]);
    }
    Ok(groups)
}

/// Largest eigenvalue spread inside any triple.
pub fn triple_spread(roots: &[C64], lambda: &dyn Fn(C64) -> C64) -> Result<f64> {
    let groups = group_triples(roots, lambda)?;
    Ok(groups
        .iter()
        .map(|g| {
            let l: Vec<C64> = g.iter().map(|&i| lambda(roots[i])).collect();
            (l[0] - l[1]).norm().max((l[0] - l[2]).norm()).max((l[1] - l[2]).norm())
        })
        .fold(0.0, f64::max))
}

/// Certifies `lambda` as an eigenvalue of a uniform chain.
///
/// The general bulk solution `ψ_n = Σ c_i x_iⁿ` runs over the roots of the
/// characteristic polynomial at `lambda`. Rows of `(H − λ)ψ` near the two ends
/// form a square boundary matrix whose determinant, after normalizing each
/// column and row to unit size, is returned.
pub fn verify_generic(stencil: &ChainStencil, lambda: C64) -> Result<f64> {
    if !stencil.is_uniform() {
        return Err(Error::BoundaryMatrix("periodic patterns are not supported".into()));
    }
    let h = build_chain_matrix(stencil)?;
    let n = stencil.n;
    let nonzero = |d: &i64| stencil.hoppings[d][0].norm() > 0.0;
    let p = stencil.hoppings.keys().filter(|d| **d > 0 && nonzero(d)).max().copied().unwrap_or(0) as usize;
    let q = stencil.hoppings.keys().filter(|d| **d < 0 && nonzero(d)).min().map(|d| -d).unwrap_or(0) as usize;
    let order = p + q;
    if order == 0 {
        return Err(Error::BoundaryMatrix("chain has no hopping".into()));
    }
    if n <= order {
        return Err(Error::BoundaryMatrix(format!("{n} sites are too few for range {order}")));
    }
    let mut cp = vec![C64::new(0.0, 0.0); order + 1];
    for (d, pat) in &stencil.hoppings {
        let idx = (q as i64 + d) as usize;
        cp[idx] += pat[0];
    }
    cp[q] += stencil.onsite[0] - lambda;
    let xs = roots(&PolyY::new(cp))?;

    // Confluent basis for coinciding roots.
    let mut power = vec![0u32; xs.len()];
    for i in 0..xs.len() {
        power[i] = (0..i).filter(|&j| (xs[i] - xs[j]).norm() < 1e-10).count() as u32;
    }
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(order);
    for (x, &pw) in xs.iter().zip(&power) {
        let mut f: Vec<C64> = (0..n)
            .map(|site| x.powu(site as u32) * (site as f64).powi(pw as i32))
            .collect();
        let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::BoundaryMatrix("basis function does not scale".into()));
        }
        f.iter_mut().for_each(|z| *z /= scale);
        let hf = h.matvec(&f);
        columns.push(hf.iter().zip(&f).map(|(a, b)| a - lambda * b).collect());
    }
    let rows: Vec<usize> = (0..q).chain(n - p..n).collect();
    let mut m = Mat::<C64>::from_fn(order, order, |r, c| columns[c][rows[r]]);
    for r in 0..order {
        let norm = (0..order).map(|c| m[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in 0..order {
                m[(r, c)] /= norm;
            }
        }
    }
    Ok(m.as_ref().determinant().norm())
}
