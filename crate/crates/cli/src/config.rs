use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nhskin::models_2d::Boundary;
use nhskin::sensitivity::{delta_grid, ScreenPolicy};
use nhskin::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    Hn,
    HnGeneral,
    Ssh,
    SshOdd,
    Unidirectional,
    MixedLongrange,
    GeneralChain,
    StackedHn,
    StackedSsh,
    Triangular,
    Kagome,
    SeparableSquare,
}

impl ModelId {
    pub fn is_2d(&self) -> bool {
        matches!(
            self,
            ModelId::StackedHn | ModelId::StackedSsh | ModelId::Triangular | ModelId::Kagome | ModelId::SeparableSquare
        )
    }

    /// Accepted parameter names; the first `required` of them must be given.
    pub fn parameters(&self) -> (&'static [&'static str], usize) {
        match self {
            ModelId::Hn => (&["t_l", "t_r", "t_d"], 2),
            ModelId::HnGeneral => (&["t_l", "t_r", "t_d", "eps_first", "eps_last"], 2),
            ModelId::Ssh | ModelId::SshOdd => (&["t_l1", "t_r1", "t_l2", "t_r2", "v1", "v2"], 4),
            ModelId::Unidirectional => (&["t_l", "u_l"], 2),
            ModelId::MixedLongrange => (&["t_r", "u_l"], 2),
            ModelId::GeneralChain => (&["t_l", "t_r", "u_l", "u_r"], 4),
            ModelId::StackedHn => (&["t_d", "t_l", "t_r", "u_d", "u_u", "v_dl", "v_dr", "v_ul", "v_ur"], 0),
            ModelId::StackedSsh => (
                &[
                    "t_d1", "t_d2", "t_l1", "t_l2", "t_r1", "t_r2", "u_d1", "u_d2", "u_u1", "u_u2", "v_dl1", "v_dl2",
                    "v_dr1", "v_dr2", "v_ul1", "v_ul2", "v_ur1", "v_ur2",
                ],
                0,
            ),
            ModelId::Triangular => (&["t_l", "t_r"], 2),
            ModelId::Kagome => (&["t_l", "t_r", "u_l", "u_r"], 4),
            ModelId::SeparableSquare => (&["t_l1", "t_r1", "t_l2", "t_r2"], 4),
        }
    }

    pub fn supports_split_delta(&self) -> bool {
        matches!(self, ModelId::HnGeneral | ModelId::Ssh | ModelId::SshOdd)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Spectrum,
    States,
    Winding,
    Gap,
    Envelope,
    Sweep,
    Sensitivity,
    Balance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// `0.3`, `[0.1, 0.5]` for separate left and right deformations, or a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Scalar(f64),
    Pair([f64; 2]),
    Grid(GridSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundarySpec {
    Bc1,
    Open,
    Bc2([f64; 2]),
}

impl BoundarySpec {
    pub fn boundary(&self) -> Boundary {
        match *self {
            BoundarySpec::Bc1 => Boundary::Bc1,
            BoundarySpec::Open => Boundary::Open,
            BoundarySpec::Bc2([re, im]) => Boundary::Bc2(C64::new(re, im)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreenSpec {
    LogSlope,
    StepRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelId,
    pub task: Task,
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    /// `[N]` for chains, `[N1, N2]` for lattices; the sensitivity task takes
    /// a list of chain lengths.
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<DeltaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    /// Stem of the output files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_energy: Option<[f64; 2]>,
    /// Spectral change `Δ` for the sensitivity task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclude_smallest: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// One boundary deformation: equal at both ends or split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Delta {
    Single(f64),
    Split(f64, f64),
}

impl Delta {
    pub fn left(&self) -> f64 {
        match *self {
            Delta::Single(d) | Delta::Split(d, _) => d,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let (names, required) = self.model.parameters();
        for key in self.params.keys() {
            if !names.contains(&key.as_str()) {
                bail!(
                    "field `params`: unknown parameter `{key}` for model {:?}; accepted: {}",
                    self.model,
                    names.join(", ")
                );
            }
        }
        for name in &names[..required] {
            if !self.params.contains_key(*name) {
                bail!("field `params`: missing required parameter `{name}`");
            }
        }
        for (k, v) in &self.params {
            if !v[0].is_finite() || !v[1].is_finite() {
                bail!("field `params.{k}`: non-finite value");
            }
        }

        let want = if self.model.is_2d() { 2 } else { 1 };
        if self.task == Task::Sensitivity {
            if self.model.is_2d() {
                bail!("field `task`: sensitivity fits are available for chains only");
            }
            if self.sizes.len() < 4 {
                bail!("field `sizes`: the sensitivity task needs at least four chain lengths");
            }
            if !self.target.is_some_and(|t| t > 0.0) {
                bail!("field `target`: the sensitivity task needs a positive target distance");
            }
        } else if self.sizes.len() != want {
            bail!("field `sizes`: expected {want} value(s), got {}", self.sizes.len());
        }
        if self.sizes.contains(&0) {
            bail!("field `sizes`: sizes must be positive");
        }
        for &n in &self.sizes {
            match self.model {
                ModelId::Ssh if n % 2 == 1 => bail!("field `sizes`: model ssh needs an even N, use ssh-odd"),
                ModelId::SshOdd if n % 2 == 0 => bail!("field `sizes`: model ssh-odd needs an odd N"),
                _ => {}
            }
        }

        match self.delta {
            Some(DeltaSpec::Grid(g)) => {
                delta_grid(g.start, g.stop, g.step).map_err(|e| anyhow::anyhow!("field `delta`: {e}"))?;
            }
            Some(DeltaSpec::Pair(_)) if !self.model.supports_split_delta() => {
                bail!("field `delta`: model {:?} takes a single deformation", self.model)
            }
            Some(DeltaSpec::Scalar(d)) if !d.is_finite() => bail!("field `delta`: non-finite value"),
            _ => {}
        }
        if self.boundary.is_some() && !self.model.is_2d() {
            bail!("field `boundary`: only lattice models take a stacking boundary");
        }
        if let Some(BoundarySpec::Bc2(d)) = self.boundary {
            if d == [0.0, 0.0] {
                bail!("field `boundary`: bc2 needs a nonzero delta2");
            }
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            bail!("field `epsilon`: must be positive");
        }
        if self.samples.is_some_and(|s| s == 0) {
            bail!("field `samples`: must be positive");
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> C64 {
        self.params
            .get(name)
            .map(|v| C64::new(v[0], v[1]))
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn deltas(&self) -> Vec<Delta> {
        match self.delta {
            None => vec![Delta::Single(0.0)],
            Some(DeltaSpec::Scalar(d)) => vec![Delta::Single(d)],
            Some(DeltaSpec::Pair([l, r])) => vec![Delta::Split(l, r)],
            Some(DeltaSpec::Grid(g)) => delta_grid(g.start, g.stop, g.step)
                .map(|v| v.into_iter().map(Delta::Single).collect())
                .unwrap_or_default(),
        }
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.map(|b| b.boundary()).unwrap_or(Boundary::Bc1)
    }

    pub fn screen_policy(&self) -> ScreenPolicy {
        match self.screen {
            Some(ScreenSpec::StepRatio) => ScreenPolicy::StepRatio { ratio: 10.0 },
            _ => ScreenPolicy::default(),
        }
    }

    pub fn base_energy(&self) -> C64 {
        self.base_energy.map(|[re, im]| C64::new(re, im)).unwrap_or(C64::new(0.0, 0.0))
    }
}
