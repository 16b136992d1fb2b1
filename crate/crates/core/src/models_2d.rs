//! Two-dimensional lattices built by stacking chains: stacked Hatano-Nelson
//! (with the triangular lattice as a special case), stacked SSH, a Kagome
//! lattice and separable square lattices.
//!
//! The stacked operator has `A` on the block diagonal, `B` above it, `C`
//! below it, `δ₂·C` in the top-right block and `δ₂′·B` in the bottom-left.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::alpha::AlphaSet;
use crate::matrix::{
    build_chain_matrix, dense_right_eigenpairs, dense_spectrum, ChainStencil, DenseOperator,
    Provenance, Spectrum,
};
use crate::models_1d::{hn_spectrum, ssh_spectrum, HnParams, Solution, SshParams};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    /// Periodic in the stacking direction, `δ₂ = δ₂′ = 1`.
    Bc1,
    /// `δ₂′ = 1/δ₂`.
    Bc2(C64),
    /// `δ₂ = δ₂′ = 0`.
    Open,
}

impl Boundary {
    /// `(δ₂, δ₂′)`.
    pub fn deltas(&self) -> (C64, C64) {
        match *self {
            Boundary::Bc1 => (ONE, ONE),
            Boundary::Bc2(d) => (d, ONE / d),
            Boundary::Open => (ZERO, ZERO),
        }
    }
}

/// Hoppings of a stack of Hatano-Nelson chains.
///
/// `t_*` act within a chain, `u_d`/`u_u` straight to the chain above/below,
/// `v_d*`/`v_u*` diagonally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StackedHnParams {
    pub t_d: C64,
    pub t_l: C64,
    pub t_r: C64,
    pub u_d: C64,
    pub u_u: C64,
    pub v_dl: C64,
    pub v_dr: C64,
    pub v_ul: C64,
    pub v_ur: C64,
}

impl StackedHnParams {
    /// Decoupled chains.
    pub fn chains(t_d: C64, t_l: C64, t_r: C64) -> Self {
        StackedHnParams {
            t_d,
            t_l,
            t_r,
            u_d: ZERO,
            u_u: ZERO,
            v_dl: ZERO,
            v_dr: ZERO,
            v_ul: ZERO,
            v_ur: ZERO,
        }
    }

    /// The triangular lattice with balanced hoppings in both directions.
    pub fn triangular(t_l: C64, t_r: C64) -> Self {
        StackedHnParams {
            t_d: ZERO,
            t_l,
            t_r,
            u_d: t_r,
            u_u: t_l,
            v_dl: ZERO,
            v_dr: t_l,
            v_ul: t_r,
            v_ur: ZERO,
        }
    }

    /// Stencils of `A`, `B`, `C`.
    pub fn blocks(&self, n1: usize, delta1: C64) -> [ChainStencil; 3] {
        let chain = |d: C64, l: C64, r: C64| {
            ChainStencil::new(n1)
                .onsite(vec![d])
                .hopping(1, l)
                .hopping(-1, r)
                .delta(delta1)
        };
        [
            chain(self.t_d, self.t_l, self.t_r),
            chain(self.u_d, self.v_dl, self.v_dr),
            chain(self.u_u, self.v_ul, self.v_ur),
        ]
    }

    /// `(h_d, h_l, h_r)` of the reduced block with factor `w` on `B`.
    pub fn bloch(&self, w: C64) -> (C64, C64, C64) {
        let wi = ONE / w;
        (
            self.t_d + w * self.u_d + wi * self.u_u,
            self.t_l + w * self.v_dl + wi * self.v_ul,
            self.t_r + w * self.v_dr + wi * self.v_ur,
        )
    }

    fn values(&self) -> [C64; 9] {
        [
            self.t_d, self.t_l, self.t_r, self.u_d, self.u_u, self.v_dl, self.v_dr, self.v_ul, self.v_ur,
        ]
    }
}

/// Hoppings of a stack of SSH chains; index 0 and 1 are the two sublattices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StackedSshParams {
    pub t_d: [C64; 2],
    pub t_l: [C64; 2],
    pub t_r: [C64; 2],
    pub u_d: [C64; 2],
    pub u_u: [C64; 2],
    pub v_dl: [C64; 2],
    pub v_dr: [C64; 2],
    pub v_ul: [C64; 2],
    pub v_ur: [C64; 2],
}

/// Per-block hoppings of a reduced stacked-SSH block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SshBloch {
    pub h_d: [C64; 2],
    pub h_l: [C64; 2],
    pub h_r: [C64; 2],
}

impl StackedSshParams {
    pub fn chains(t_d: [C64; 2], t_l: [C64; 2], t_r: [C64; 2]) -> Self {
        StackedSshParams {
            t_d,
            t_l,
            t_r,
            u_d: [ZERO; 2],
            u_u: [ZERO; 2],
            v_dl: [ZERO; 2],
            v_dr: [ZERO; 2],
            v_ul: [ZERO; 2],
            v_ur: [ZERO; 2],
        }
    }

    pub fn blocks(&self, n1: usize, delta1: C64) -> [ChainStencil; 3] {
        let chain = |d: [C64; 2], l: [C64; 2], r: [C64; 2]| {
            ChainStencil::new(n1)
                .onsite(d.to_vec())
                .hopping_pattern(1, l.to_vec())
                .hopping_pattern(-1, r.to_vec())
                .delta(delta1)
        };
        [
            chain(self.t_d, self.t_l, self.t_r),
            chain(self.u_d, self.v_dl, self.v_dr),
            chain(self.u_u, self.v_ul, self.v_ur),
        ]
    }

    pub fn bloch(&self, w: C64) -> SshBloch {
        let wi = ONE / w;
        let f = |a: [C64; 2], b: [C64; 2], c: [C64; 2]| [a[0] + w * b[0] + wi * c[0], a[1] + w * b[1] + wi * c[1]];
        SshBloch {
            h_d: f(self.t_d, self.u_d, self.u_u),
            h_l: f(self.t_l, self.v_dl, self.v_ul),
            h_r: f(self.t_r, self.v_dr, self.v_ur),
        }
    }

    fn values(&self) -> Vec<C64> {
        [self.t_d, self.t_l, self.t_r, self.u_d, self.u_u, self.v_dl, self.v_dr, self.v_ul, self.v_ur]
            .iter()
            .flat_map(|p| p.iter().copied())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lattice {
    Hn(StackedHnParams),
    Ssh(StackedSshParams),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stacked2DSpec {
    pub lattice: Lattice,
    pub n1: usize,
    pub n2: usize,
    pub delta1: C64,
    pub boundary: Boundary,
}

impl Stacked2DSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidParams("lattice sizes must be positive".into()));
        }
        if let Boundary::Bc2(d) = self.boundary {
            if d == ZERO {
                return Err(Error::InvalidParams("BC2 needs a nonzero delta2".into()));
            }
        }
        let finite = match &self.lattice {
            Lattice::Hn(p) => p.values().iter().all(|z| z.is_finite()),
            Lattice::Ssh(p) => p.values().iter().all(|z| z.is_finite()),
        };
        if !finite || !self.delta1.is_finite() {
            return Err(Error::InvalidParams("non-finite hopping".into()));
        }
        Ok(())
    }

    fn block_matrices(&self) -> Result<[DenseOperator; 3]> {
        let stencils = match &self.lattice {
            Lattice::Hn(p) => p.blocks(self.n1, self.delta1),
            Lattice::Ssh(p) => p.blocks(self.n1, self.delta1),
        };
        Ok([
            build_chain_matrix(&stencils[0])?,
            build_chain_matrix(&stencils[1])?,
            build_chain_matrix(&stencils[2])?,
        ])
    }
}

/// Block-tridiagonal operator with corner blocks `δ₂·C` (top right) and
/// `δ₂′·B` (bottom left). Blocks that land on the same position add.
pub fn assemble_stacked(
    a: &DenseOperator,
    b: &DenseOperator,
    c: &DenseOperator,
    n2: usize,
    delta2: C64,
    delta2p: C64,
) -> Result<DenseOperator> {
    let n1 = a.dim();
    if b.dim() != n1 || c.dim() != n1 {
        return Err(Error::InvalidParams(format!(
            "block sizes differ: A {}, B {}, C {}",
            n1,
            b.dim(),
            c.dim()
        )));
    }
    if n2 == 0 {
        return Err(Error::InvalidParams("need at least one layer".into()));
    }
    let mut h = DenseOperator::zeros(n1 * n2);
    for i in 0..n2 {
        h.add_block(i * n1, i * n1, a, ONE);
        if i + 1 < n2 {
            h.add_block(i * n1, (i + 1) * n1, b, ONE);
            h.add_block((i + 1) * n1, i * n1, c, ONE);
        }
    }
    if delta2 != ZERO {
        h.add_block(0, (n2 - 1) * n1, c, delta2);
    }
    if delta2p != ZERO {
        h.add_block((n2 - 1) * n1, 0, b, delta2p);
    }
    Ok(h)
}

pub fn build_stacked_matrix(spec: &Stacked2DSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let [a, b, c] = spec.block_matrices()?;
    let (d2, d2p) = spec.boundary.deltas();
    assemble_stacked(&a, &b, &c, spec.n2, d2, d2p)
}

/// Factors `w_j` multiplying `B` in the reduced blocks `A + w_j B + w_j⁻¹ C`.
///
/// An eigenvector `(v, w v, w² v, …)` closes on itself iff `w^{N₂} = δ₂′`,
/// so BC2 gives `w_j = ω_j·δ₂^{−1/N₂}` (principal root).
pub fn bloch_factors(n2: usize, boundary: Boundary) -> Result<Vec<C64>> {
    let root = match boundary {
        Boundary::Bc1 => ONE,
        Boundary::Bc2(d) => {
            if d == ZERO {
                return Err(Error::InvalidParams("BC2 needs a nonzero delta2".into()));
            }
            ONE / d.powf(1.0 / n2 as f64)
        }
        Boundary::Open => return Err(Error::NoBlochReduction),
    };
    Ok((0..n2)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n2 as f64) * root)
        .collect())
}

#[derive(Clone, Debug)]
pub struct ReducedBlock {
    pub j: usize,
    pub w: C64,
    pub matrix: DenseOperator,
}

pub fn bc_reduce(spec: &Stacked2DSpec) -> Result<Vec<ReducedBlock>> {
    spec.validate()?;
    let ws = bloch_factors(spec.n2, spec.boundary)?;
    let [a, b, c] = spec.block_matrices()?;
    Ok(ws
        .into_iter()
        .enumerate()
        .map(|(j, w)| {
            let mut m = a.clone();
            m.add_block(0, 0, &b, w);
            m.add_block(0, 0, &c, ONE / w);
            ReducedBlock { j, w, matrix: m }
        })
        .collect())
}

/// Eigenvector of the stacked operator from one of a reduced block.
pub fn lift_eigenvector(v: &[C64], w: C64, n2: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(v.len() * n2);
    let mut f = ONE;
    for _ in 0..n2 {
        out.extend(v.iter().map(|z| z * f));
        f *= w;
    }
    out
}

#[derive(Clone, Debug)]
pub struct BlockSolution {
    pub j: usize,
    pub w: C64,
    pub values: Vec<C64>,
    pub alphas: Option<AlphaSet>,
    pub oracle_fallback: bool,
}

#[derive(Clone, Debug)]
pub struct StackedSolution {
    pub spectrum: Spectrum,
    /// Empty when the whole lattice went to the oracle.
    pub blocks: Vec<BlockSolution>,
}

impl StackedSolution {
    pub fn any_fallback(&self) -> bool {
        self.blocks.iter().any(|b| b.oracle_fallback)
    }
}

fn open_oracle(spec: &Stacked2DSpec) -> Result<StackedSolution> {
    Ok(StackedSolution {
        spectrum: dense_spectrum(&build_stacked_matrix(spec)?)?,
        blocks: vec![],
    })
}

fn assemble(blocks: Vec<BlockSolution>) -> StackedSolution {
    let values = blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
    let provenance = if blocks.iter().all(|b| b.oracle_fallback) {
        Provenance::Oracle
    } else {
        Provenance::Analytic
    };
    StackedSolution {
        spectrum: Spectrum::new(values, provenance),
        blocks,
    }
}

fn block_from(j: usize, w: C64, sol: Solution) -> BlockSolution {
    BlockSolution {
        j,
        w,
        values: sol.spectrum.values,
        alphas: sol.alphas,
        oracle_fallback: sol.oracle_fallback,
    }
}

pub fn stacked_hn_spectrum(spec: &Stacked2DSpec) -> Result<StackedSolution> {
    spec.validate()?;
    let p = match spec.lattice {
        Lattice::Hn(p) => p,
        Lattice::Ssh(_) => return Err(Error::InvalidParams("expected a stacked Hatano-Nelson lattice".into())),
    };
    if spec.boundary == Boundary::Open {
        return open_oracle(spec);
    }
    let ws = bloch_factors(spec.n2, spec.boundary)?;
    let blocks = ws
        .par_iter()
        .enumerate()
        .map(|(j, &w)| {
            let (h_d, h_l, h_r) = p.bloch(w);
            let hp = HnParams::new(h_l, h_r).with_td(h_d).with_delta(spec.delta1);
            hn_spectrum(&hp, spec.n1).map(|sol| block_from(j, w, sol))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(blocks))
}

pub fn stacked_ssh_spectrum(spec: &Stacked2DSpec) -> Result<StackedSolution> {
    spec.validate()?;
    let p = match spec.lattice {
        Lattice::Ssh(p) => p,
        Lattice::Hn(_) => return Err(Error::InvalidParams("expected a stacked SSH lattice".into())),
    };
    if spec.boundary == Boundary::Open {
        return open_oracle(spec);
    }
    if spec.n1 % 2 == 1 {
        // Odd stacked chains have no closed form; diagonalize each block.
        let blocks = bc_reduce(spec)?
            .into_par_iter()
            .map(|b| {
                Ok(BlockSolution {
                    j: b.j,
                    w: b.w,
                    values: dense_spectrum(&b.matrix)?.values,
                    alphas: None,
                    oracle_fallback: true,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(assemble(blocks));
    }
    let ws = bloch_factors(spec.n2, spec.boundary)?;
    let blocks = ws
        .par_iter()
        .enumerate()
        .map(|(j, &w)| {
            let h = p.bloch(w);
            let sp = SshParams::new(h.h_l[0], h.h_r[0], h.h_l[1], h.h_r[1], spec.n1)
                .with_potentials(h.h_d[0], h.h_d[1])
                .with_delta(spec.delta1);
            ssh_spectrum(&sp).map(|sol| block_from(j, w, sol))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(blocks))
}

// ---------------------------------------------------------------------------
// Balance classification

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceCase {
    /// One of the structural parameter relations, numbered as in the text.
    Case(u8),
    /// Balanced for every block without matching a listed relation.
    GeneralR,
    Unbalanced,
}

impl BalanceCase {
    pub fn is_balanced(&self) -> bool {
        *self != BalanceCase::Unbalanced
    }
}

impl fmt::Display for BalanceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BalanceCase::Case(k) => write!(f, "case{k}"),
            BalanceCase::GeneralR => write!(f, "general-r"),
            BalanceCase::Unbalanced => write!(f, "unbalanced"),
        }
    }
}

const CASE_TOL: f64 = 1e-10;

fn same(a: C64, b: C64) -> bool {
    (a - b).norm() <= CASE_TOL * a.norm().max(b.norm()).max(1.0)
}

fn all_real(vals: &[C64]) -> bool {
    vals.iter().all(|z| z.im.abs() <= 1e-12 * z.re.abs().max(1.0))
}

fn unit_ratio(num: C64, den: C64) -> bool {
    den != ZERO && ((num / den).norm() - 1.0).abs() <= CASE_TOL
}

/// `|h_l/h_r| = 1` for the block with factor `w`.
pub fn stacked_hn_block_balanced(p: &StackedHnParams, w: C64) -> bool {
    let (_, h_l, h_r) = p.bloch(w);
    unit_ratio(h_l, h_r)
}

pub fn stacked_hn_balance(p: &StackedHnParams, n2: usize) -> BalanceCase {
    if all_real(&p.values()) {
        let cases = [
            same(p.t_r, p.t_l) && same(p.v_ur, p.v_dl) && same(p.v_dr, p.v_ul),
            same(p.t_l, p.t_r) && same(p.v_ul, p.v_ur) && same(p.v_dl, p.v_dr),
            same(p.t_l, p.v_ur) && same(p.v_dl, p.t_r) && same(p.v_ul, ZERO) && same(p.v_dr, ZERO),
            same(p.t_l, p.v_dr) && same(p.v_dl, ZERO) && same(p.v_ur, ZERO) && same(p.v_ul, p.t_r),
        ];
        if let Some(k) = cases.iter().position(|&c| c) {
            return BalanceCase::Case(k as u8 + 1);
        }
    }
    match bloch_factors(n2.max(1), Boundary::Bc1) {
        Ok(ws) if ws.iter().all(|&w| stacked_hn_block_balanced(p, w)) => BalanceCase::GeneralR,
        _ => BalanceCase::Unbalanced,
    }
}

/// Coefficients of `ω⁻², …, ω²` in a product of two `a + ω b + ω⁻¹ c` factors.
fn laurent_product(x: [C64; 3], y: [C64; 3]) -> [C64; 5] {
    let mut out = [ZERO; 5];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `|h_r1 h_r2 / (h_l1 h_l2)| = 1` for the block with factor `w`.
pub fn stacked_ssh_block_balanced(p: &StackedSshParams, w: C64) -> bool {
    let h = p.bloch(w);
    unit_ratio(h.h_r[0] * h.h_r[1], h.h_l[0] * h.h_l[1])
}

pub fn stacked_ssh_balance(p: &StackedSshParams, n2: usize) -> BalanceCase {
    if all_real(&p.values()) {
        let (tl, tr, dl, dr, ul, ur) = (p.t_l, p.t_r, p.v_dl, p.v_dr, p.v_ul, p.v_ur);
        let cases = [
            (0..2).all(|i| same(tr[i], tl[i]) && same(dr[i], dl[i]) && same(ur[i], ul[i])),
            (0..2).all(|i| same(tr[i], tl[i]) && same(dr[i], ul[i]) && same(ur[i], dl[i])),
            (0..2).all(|i| same(tr[i], tl[1 - i]) && same(dr[i], dl[1 - i]) && same(ur[i], ul[1 - i])),
            (0..2).all(|i| same(tr[i], tl[1 - i]) && same(dr[i], ul[1 - i]) && same(ur[i], dl[1 - i])),
        ];
        if let Some(k) = cases.iter().position(|&c| c) {
            return BalanceCase::Case(k as u8 + 1);
        }
        // Laurent coefficients in ω, ordered ω⁻¹, 1, ω.
        let r = laurent_product([ur[0], tr[0], dr[0]], [ur[1], tr[1], dr[1]]);
        let l = laurent_product([ul[0], tl[0], dl[0]], [ul[1], tl[1], dl[1]]);
        for s in 0..3usize {
            // h_r1 h_r2 = ω^s h_l1 h_l2, coefficient by coefficient.
            let ok = (-2i64..=4).all(|k| {
                let get = |v: &[C64; 5], idx: i64| if (0..5).contains(&idx) { v[idx as usize] } else { ZERO };
                same(get(&r, k), get(&l, k - s as i64))
            });
            if ok {
                return BalanceCase::Case(5 + s as u8);
            }
        }
    }
    match bloch_factors(n2.max(1), Boundary::Bc1) {
        Ok(ws) if ws.iter().all(|&w| stacked_ssh_block_balanced(p, w)) => BalanceCase::GeneralR,
        _ => BalanceCase::Unbalanced,
    }
}

// ---------------------------------------------------------------------------
// Envelopes

/// Curves bounding the balanced stacked-HN spectrum: for each `t` the
/// eigenvalues lie on the segment `[z₋(t), z₊(t)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeCurves {
    pub t: Vec<f64>,
    pub z1: Vec<C64>,
    pub z2: Vec<C64>,
    pub z_plus: Vec<C64>,
    pub z_minus: Vec<C64>,
    /// Closed loop `s(t′)`, present for the case-3 relation.
    pub loop_s: Option<Vec<C64>>,
}

/// `m` points of `[0, 2π)`. With `m` a multiple of `N₂` the grid contains
/// every block's `t = 2πj/N₂`.
pub fn uniform_t_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect()
}

pub fn envelope_curves(p: &StackedHnParams, t_grid: &[f64]) -> EnvelopeCurves {
    let mut z1 = Vec::with_capacity(t_grid.len());
    let mut z2 = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (h_d, h_l, h_r) = p.bloch(C64::from_polar(1.0, t));
        z1.push(h_d);
        z2.push(2.0 * h_r.sqrt() * h_l.sqrt());
    }
    let z_plus = z1.iter().zip(&z2).map(|(a, b)| a + b).collect();
    let z_minus = z1.iter().zip(&z2).map(|(a, b)| a - b).collect();
    let loop_s = if stacked_hn_balance(p, 1) == BalanceCase::Case(3) {
        Some(t_grid.iter().map(|&t| case3_loop(p, t)).collect())
    } else {
        None
    };
    EnvelopeCurves {
        t: t_grid.to_vec(),
        z1,
        z2,
        z_plus,
        z_minus,
        loop_s,
    }
}

/// `s(t′)` for real case-3 parameters.
pub fn case3_loop(p: &StackedHnParams, t: f64) -> C64 {
    let (td, uu, ud, tl, tr) = (p.t_d.re, p.u_u.re, p.u_d.re, p.t_l.re, p.t_r.re);
    C64::new(
        td + (uu + ud) * (2.0 * t).cos() + 2.0 * (tl + tr) * t.cos(),
        (ud - uu) * (2.0 * t).sin() + 2.0 * (tr - tl) * t.sin(),
    )
}

/// Case-2 envelopes written out: ellipses centred at `t_d ± 2t_r`.
pub fn case2_ellipses(p: &StackedHnParams, t: f64) -> (C64, C64) {
    let e = C64::from_polar(1.0, t);
    let f = |s: f64| p.t_d + s * 2.0 * p.t_r + e * (p.u_d + s * 2.0 * p.v_dr) + (p.u_u + s * 2.0 * p.v_ur) / e;
    (f(1.0), f(-1.0))
}

fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = ((z - a) * ab.conj()).re / len2;
    (z - (a + ab * s.clamp(0.0, 1.0))).norm()
}

/// Distance from `z` to the nearest segment `[z₋(t), z₊(t)]`.
pub fn segment_family_distance(curves: &EnvelopeCurves, z: C64) -> f64 {
    curves
        .z_minus
        .iter()
        .zip(&curves.z_plus)
        .map(|(&a, &b)| point_segment_distance(z, a, b))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Triangular and Kagome lattices

pub fn triangular_spec(t_l: C64, t_r: C64, n1: usize, n2: usize, delta1: C64, boundary: Boundary) -> Stacked2DSpec {
    Stacked2DSpec {
        lattice: Lattice::Hn(StackedHnParams::triangular(t_l, t_r)),
        n1,
        n2,
        delta1,
        boundary,
    }
}

pub fn triangular_spectrum(
    t_l: C64,
    t_r: C64,
    n1: usize,
    n2: usize,
    delta1: C64,
    boundary: Boundary,
) -> Result<StackedSolution> {
    stacked_hn_spectrum(&triangular_spec(t_l, t_r, n1, n2, delta1, boundary))
}

/// Kagome hoppings. Up triangles (inside a unit cell) carry `t_l` against
/// and `t_r` along the cyclic order A→B→C; down triangles (between cells)
/// carry `u_l`, `u_r` the same way.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KagomeParams {
    pub t_l: C64,
    pub t_r: C64,
    pub u_l: C64,
    pub u_r: C64,
}

/// `A`, `B`, `C` blocks of one layer of `n1` three-site cells.
///
/// Site `3i + s` is sublattice `s` (A, B, C) of cell `i`. Down triangles
/// join `A(i, j)`, `B(i−1, j)` and `C(i, j−1)`.
pub fn kagome_blocks(p: &KagomeParams, n1: usize, delta1: C64) -> Result<[DenseOperator; 3]> {
    if n1 < 2 {
        return Err(Error::InvalidParams("Kagome lattice needs N1 >= 2".into()));
    }
    let dim = 3 * n1;
    let mut a = DenseOperator::zeros(dim);
    let mut b = DenseOperator::zeros(dim);
    let mut c = DenseOperator::zeros(dim);
    // (x, y) in cyclic order: H[x][y] = l, H[y][x] = r.
    let bond = |m: &mut DenseOperator, x: usize, y: usize, l: C64, r: C64| {
        m.add(x, y, l);
        m.add(y, x, r);
    };
    for i in 0..n1 {
        let (sa, sb, sc) = (3 * i, 3 * i + 1, 3 * i + 2);
        bond(&mut a, sa, sb, p.t_l, p.t_r);
        bond(&mut a, sb, sc, p.t_l, p.t_r);
        bond(&mut a, sc, sa, p.t_l, p.t_r);

        let (prev, scale) = if i == 0 { (n1 - 1, delta1) } else { (i - 1, ONE) };
        let sb_prev = 3 * prev + 1;
        // A(i,j) -> B(i-1,j) within the layer.
        bond(&mut a, sa, sb_prev, scale * p.u_l, scale * p.u_r);
        // B(i-1,j+1) -> C(i,j): row in layer j+1, column in layer j.
        c.add(sb_prev, sc, scale * p.u_l);
        b.add(sc, sb_prev, scale * p.u_r);
        // C(i,j) -> A(i,j+1).
        b.add(sc, sa, p.u_l);
        c.add(sa, sc, p.u_r);
    }
    Ok([a, b, c])
}

pub fn kagome_matrix(
    p: &KagomeParams,
    n1: usize,
    n2: usize,
    delta1: C64,
    delta2: C64,
    delta2p: C64,
) -> Result<DenseOperator> {
    if n2 < 2 {
        return Err(Error::InvalidParams("Kagome lattice needs N2 >= 2".into()));
    }
    let [a, b, c] = kagome_blocks(p, n1, delta1)?;
    assemble_stacked(&a, &b, &c, n2, delta2, delta2p)
}

// ---------------------------------------------------------------------------
// Separable square lattice

/// Spectrum of independent hopping along two directions: all sums
/// `λ_α + λ_β`, ordered with the second index fastest.
pub fn separable_square_spectrum(a: &Solution, b: &Solution) -> Result<Spectrum> {
    if a.alphas.is_none() || b.alphas.is_none() {
        return Err(Error::InvalidParams("separable lattice needs two analytically solved chains".into()));
    }
    let values = a
        .spectrum
        .values
        .iter()
        .flat_map(|x| b.spectrum.values.iter().map(move |y| x + y))
        .collect();
    Ok(Spectrum::new(values, Provenance::Analytic))
}

/// `A ⊗ I + I ⊗ B`.
pub fn kronecker_sum(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let (n, m) = (a.dim(), b.dim());
    DenseOperator::from_fn(n * m, |r, c| {
        let (ra, rb) = (r / m, r % m);
        let (ca, cb) = (c / m, c % m);
        let mut v = ZERO;
        if rb == cb {
            v += a.get(ra, ca);
        }
        if ra == ca {
            v += b.get(rb, cb);
        }
        v
    })
}

// ---------------------------------------------------------------------------
// Localization helpers

/// Sums site weights over direction 2 (and the unit cell), giving a profile
/// along direction 1. Site index is `layer·cell·n1 + cell·i + s`.
pub fn marginal_dir1(weights: &[f64], n1: usize, n2: usize, cell: usize) -> Vec<f64> {
    let mut out = vec![0.0; n1];
    for j in 0..n2 {
        for i in 0..n1 {
            for s in 0..cell {
                out[i] += weights[j * cell * n1 + cell * i + s];
            }
        }
    }
    out
}

pub fn marginal_dir2(weights: &[f64], n1: usize, n2: usize, cell: usize) -> Vec<f64> {
    (0..n2)
        .map(|j| weights[j * cell * n1..(j + 1) * cell * n1].iter().sum())
        .collect()
}

/// Index of the eigenvalue whose modulus is closest to the median modulus.
pub fn representative_index(values: &[C64]) -> usize {
    let mut mags: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let median = mags[mags.len() / 2];
    values
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            (a.norm() - median)
                .abs()
                .total_cmp(&(b.norm() - median).abs())
                .then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Representative eigenvalue of a lattice operator and its normalized
/// `|ψʳ|²` profile along direction 1.
pub fn representative_profile(m: &DenseOperator, n1: usize, n2: usize, cell: usize) -> Result<(C64, Vec<f64>)> {
    if m.dim() != n1 * n2 * cell {
        return Err(Error::InvalidParams("operator size does not match the lattice".into()));
    }
    let (values, vectors) = dense_right_eigenpairs(m)?;
    let i = representative_index(&values);
    let w: Vec<f64> = vectors[i].iter().map(|z| z.norm_sqr()).collect();
    let mut prof = marginal_dir1(&w, n1, n2, cell);
    let total: f64 = prof.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroProfile);
    }
    prof.iter_mut().for_each(|x| *x /= total);
    Ok((values[i], prof))
}
