//! Turns a configuration into spectra, both through the closed forms and
//! through the dense matrix.

use anyhow::{bail, Result};
use nhskin::matrix::{build_chain_matrix, dense_spectrum, DenseOperator, Provenance, Spectrum};
use nhskin::models_1d::{
    hn_spectrum, mixed_longrange_spectrum, mixed_stencil, ssh_spectrum, unidirectional_spectrum,
    unidirectional_stencil, GeneralLongRange, HnParams, SshParams,
};
use nhskin::models_2d::{
    build_stacked_matrix, kagome_matrix, kronecker_sum, separable_square_spectrum, stacked_hn_spectrum,
    stacked_ssh_spectrum, Boundary, KagomeParams, Lattice, Stacked2DSpec, StackedHnParams, StackedSshParams,
};
use nhskin::C64;

use crate::config::{Delta, ModelId, RunConfig};

/// Eigenvalues of one configuration at one deformation.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Block index (stacked lattices with a Bloch reduction) and eigenvalue.
    pub values: Vec<(Option<usize>, C64)>,
    pub provenance: Provenance,
    pub oracle_fallback: bool,
    pub notes: Vec<String>,
}

impl Evaluation {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.values.iter().map(|v| v.1).collect(), self.provenance)
    }

    fn plain(s: Spectrum, oracle_fallback: bool, notes: Vec<String>) -> Self {
        Evaluation {
            provenance: s.provenance,
            values: s.values.into_iter().map(|v| (None, v)).collect(),
            oracle_fallback,
            notes,
        }
    }
}

fn c(d: f64) -> C64 {
    C64::new(d, 0.0)
}

pub fn hn_params(cfg: &RunConfig, d: Delta) -> HnParams {
    let p = HnParams::new(cfg.param("t_l"), cfg.param("t_r"))
        .with_td(cfg.param("t_d"))
        .with_ends(cfg.param("eps_first"), cfg.param("eps_last"));
    match d {
        Delta::Single(x) => p.with_delta(c(x)),
        Delta::Split(l, r) => p.with_split_delta(c(l), c(r)),
    }
}

pub fn ssh_params(cfg: &RunConfig, n: usize, d: Delta) -> SshParams {
    let p = SshParams::new(cfg.param("t_l1"), cfg.param("t_r1"), cfg.param("t_l2"), cfg.param("t_r2"), n)
        .with_potentials(cfg.param("v1"), cfg.param("v2"));
    match d {
        Delta::Single(x) => p.with_delta(c(x)),
        Delta::Split(l, r) => p.with_split_delta(c(l), c(r)),
    }
}

pub fn general_chain(cfg: &RunConfig) -> GeneralLongRange {
    GeneralLongRange {
        t_l: cfg.param("t_l"),
        t_r: cfg.param("t_r"),
        u_l: cfg.param("u_l"),
        u_r: cfg.param("u_r"),
    }
}

pub fn stacked_hn(cfg: &RunConfig) -> StackedHnParams {
    if cfg.model == ModelId::Triangular {
        return StackedHnParams::triangular(cfg.param("t_l"), cfg.param("t_r"));
    }
    let p = |n: &str| cfg.param(n);
    StackedHnParams {
        t_d: p("t_d"),
        t_l: p("t_l"),
        t_r: p("t_r"),
        u_d: p("u_d"),
        u_u: p("u_u"),
        v_dl: p("v_dl"),
        v_dr: p("v_dr"),
        v_ul: p("v_ul"),
        v_ur: p("v_ur"),
    }
}

pub fn stacked_ssh(cfg: &RunConfig) -> StackedSshParams {
    let p = |n: &str| [cfg.param(&format!("{n}1")), cfg.param(&format!("{n}2"))];
    StackedSshParams {
        t_d: p("t_d"),
        t_l: p("t_l"),
        t_r: p("t_r"),
        u_d: p("u_d"),
        u_u: p("u_u"),
        v_dl: p("v_dl"),
        v_dr: p("v_dr"),
        v_ul: p("v_ul"),
        v_ur: p("v_ur"),
    }
}

pub fn kagome(cfg: &RunConfig) -> KagomeParams {
    KagomeParams {
        t_l: cfg.param("t_l"),
        t_r: cfg.param("t_r"),
        u_l: cfg.param("u_l"),
        u_r: cfg.param("u_r"),
    }
}

pub fn stacked_spec(cfg: &RunConfig, sizes: &[usize], d: Delta) -> Result<Stacked2DSpec> {
    let lattice = match cfg.model {
        ModelId::StackedHn | ModelId::Triangular => Lattice::Hn(stacked_hn(cfg)),
        ModelId::StackedSsh => Lattice::Ssh(stacked_ssh(cfg)),
        m => bail!("model {m:?} is not a stacked lattice"),
    };
    Ok(Stacked2DSpec {
        lattice,
        n1: sizes[0],
        n2: sizes[1],
        delta1: c(d.left()),
        boundary: cfg.boundary(),
    })
}

fn separable_chains(cfg: &RunConfig, d: Delta) -> (HnParams, HnParams) {
    let x = c(d.left());
    (
        HnParams::new(cfg.param("t_l1"), cfg.param("t_r1")).with_delta(x),
        HnParams::new(cfg.param("t_l2"), cfg.param("t_r2")).with_delta(x),
    )
}

/// True when no closed form exists for the configuration.
pub fn oracle_only(cfg: &RunConfig) -> bool {
    match cfg.model {
        ModelId::GeneralChain | ModelId::Kagome => true,
        ModelId::StackedHn | ModelId::StackedSsh | ModelId::Triangular => cfg.boundary() == Boundary::Open,
        _ => false,
    }
}

/// Spectrum through the closed form where one exists.
pub fn evaluate(cfg: &RunConfig, sizes: &[usize], d: Delta) -> Result<Evaluation> {
    let n = sizes[0];
    Ok(match cfg.model {
        ModelId::Hn | ModelId::HnGeneral => {
            let s = hn_spectrum(&hn_params(cfg, d), n)?;
            Evaluation::plain(s.spectrum, s.oracle_fallback, s.notes)
        }
        ModelId::Ssh | ModelId::SshOdd => {
            let s = ssh_spectrum(&ssh_params(cfg, n, d))?;
            Evaluation::plain(s.spectrum, s.oracle_fallback, s.notes)
        }
        ModelId::Unidirectional => Evaluation::plain(
            unidirectional_spectrum(cfg.param("t_l"), cfg.param("u_l"), c(d.left()), n)?,
            false,
            vec![],
        ),
        ModelId::MixedLongrange => {
            let s = mixed_longrange_spectrum(cfg.param("t_r"), cfg.param("u_l"), c(d.left()), n)?;
            Evaluation::plain(s.spectrum, s.oracle_fallback, s.notes)
        }
        ModelId::GeneralChain | ModelId::Kagome => Evaluation::plain(dense_spectrum(&matrix(cfg, sizes, d)?)?, false, vec![]),
        ModelId::StackedHn | ModelId::StackedSsh | ModelId::Triangular => {
            let spec = stacked_spec(cfg, sizes, d)?;
            let sol = if cfg.model == ModelId::StackedSsh {
                stacked_ssh_spectrum(&spec)?
            } else {
                stacked_hn_spectrum(&spec)?
            };
            if sol.blocks.is_empty() {
                Evaluation::plain(sol.spectrum, false, vec![])
            } else {
                let fallback = sol.any_fallback();
                Evaluation {
                    values: sol
                        .blocks
                        .iter()
                        .flat_map(|b| b.values.iter().map(move |v| (Some(b.j), *v)))
                        .collect(),
                    provenance: sol.spectrum.provenance,
                    oracle_fallback: fallback,
                    notes: if fallback {
                        vec!["some blocks were diagonalized numerically".into()]
                    } else {
                        vec![]
                    },
                }
            }
        }
        ModelId::SeparableSquare => {
            let (a, b) = separable_chains(cfg, d);
            let sa = hn_spectrum(&a, sizes[0])?;
            let sb = hn_spectrum(&b, sizes[1])?;
            let fallback = sa.oracle_fallback || sb.oracle_fallback;
            let s = if fallback {
                dense_spectrum(&matrix(cfg, sizes, d)?)?
            } else {
                separable_square_spectrum(&sa, &sb)?
            };
            Evaluation::plain(s, fallback, vec![])
        }
    })
}

/// The dense operator of the configuration.
pub fn matrix(cfg: &RunConfig, sizes: &[usize], d: Delta) -> Result<DenseOperator> {
    let n = sizes[0];
    let x = c(d.left());
    Ok(match cfg.model {
        ModelId::Hn | ModelId::HnGeneral => build_chain_matrix(&hn_params(cfg, d).stencil(n))?,
        ModelId::Ssh | ModelId::SshOdd => build_chain_matrix(&ssh_params(cfg, n, d).stencil())?,
        ModelId::Unidirectional => build_chain_matrix(&unidirectional_stencil(cfg.param("t_l"), cfg.param("u_l"), x, n))?,
        ModelId::MixedLongrange => build_chain_matrix(&mixed_stencil(cfg.param("t_r"), cfg.param("u_l"), x, x, n))?,
        ModelId::GeneralChain => build_chain_matrix(&general_chain(cfg).stencil(x, n))?,
        ModelId::StackedHn | ModelId::StackedSsh | ModelId::Triangular => {
            build_stacked_matrix(&stacked_spec(cfg, sizes, d)?)?
        }
        ModelId::Kagome => {
            let (d2, d2p) = cfg.boundary().deltas();
            kagome_matrix(&kagome(cfg), sizes[0], sizes[1], x, d2, d2p)?
        }
        ModelId::SeparableSquare => {
            let (a, b) = separable_chains(cfg, d);
            kronecker_sum(
                &build_chain_matrix(&a.stencil(sizes[0]))?,
                &build_chain_matrix(&b.stencil(sizes[1]))?,
            )
        }
    })
}

/// Sites per unit cell along direction 1 of a lattice.
pub fn cell_size(cfg: &RunConfig) -> usize {
    if cfg.model == ModelId::Kagome {
        3
    } else {
        1
    }
}
