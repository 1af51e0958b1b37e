//! Experiment configuration: a JSON document whose fields command-line flags
//! may override.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use harmlab::ball::DEFAULT_SIZE_CAP;
use harmlab::{Group, GroupElement, Mode, StepDistribution};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Ball,
    Exit,
    EpsilonScan,
    Growth,
    Certify,
    Lemma2,
    Telescope,
    Simulate,
    ProbeGrigorchuk,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ball => "ball",
            Experiment::Exit => "exit",
            Experiment::EpsilonScan => "epsilon-scan",
            Experiment::Growth => "growth",
            Experiment::Certify => "certify",
            Experiment::Lemma2 => "lemma2",
            Experiment::Telescope => "telescope",
            Experiment::Simulate => "simulate",
            Experiment::ProbeGrigorchuk => "probe-grigorchuk",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Group spec such as `z:2` or `bs:1:2`.
    pub group: String,
    /// Step probabilities in generator order, as rationals like `1/4`.
    pub probs: Option<Vec<String>>,
    /// Base vertex; the identity when absent.
    pub a: Option<String>,
    /// Second vertex; the first step when absent.
    pub b: Option<String>,
    pub radius_min: usize,
    pub radius_max: usize,
    pub mode: Mode,
    pub delta: String,
    pub r0: usize,
    pub samples: u64,
    pub seed: u64,
    /// Instances per randomized suite.
    pub instances: usize,
    /// Largest ball (interior plus boundary) any run may enumerate.
    pub size_cap: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::EpsilonScan,
            group: "z:1".into(),
            probs: None,
            a: None,
            b: None,
            radius_min: 1,
            radius_max: 8,
            mode: Mode::Exact,
            delta: "1/4".into(),
            r0: 4,
            samples: 100_000,
            seed: 1,
            instances: 100,
            size_cap: DEFAULT_SIZE_CAP,
            out: PathBuf::from("harmlab-out"),
        }
    }
}

/// Flags that replace config fields when given.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Group spec: z:<d>, free:<k>, heis, lamplighter, bs:1:<m>, grigorchuk
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Comma-separated step probabilities in generator order, e.g. 1/2,1/4,1/8,1/8
    #[arg(long, global = true, value_delimiter = ',')]
    pub probs: Option<Vec<String>>,
    /// Base vertex (word or tuple)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Second vertex (word or tuple)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, global = true)]
    pub radius_min: Option<usize>,
    #[arg(long, global = true)]
    pub radius_max: Option<usize>,
    /// exact, float or auto
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Certificate slack, a rational in (0, 1)
    #[arg(long, global = true)]
    pub delta: Option<String>,
    #[arg(long, global = true)]
    pub r0: Option<usize>,
    /// Monte Carlo walks
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Instances per randomized suite
    #[arg(long, global = true)]
    pub instances: Option<usize>,
    #[arg(long, global = true)]
    pub size_cap: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), RunError> {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                })*
            };
        }
        set!(group, radius_min, radius_max, delta, r0, samples, seed, instances, size_cap, out);
        if self.probs.is_some() {
            cfg.probs = self.probs.clone();
        }
        if self.a.is_some() {
            cfg.a = self.a.clone();
        }
        if self.b.is_some() {
            cfg.b = self.b.clone();
        }
        if let Some(m) = &self.mode {
            cfg.mode = Mode::from_str(m).map_err(|e| RunError::Input(e.to_string()))?;
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))
}

/// A validated configuration with its parsed objects.
pub struct Resolved {
    pub group: Group,
    pub steps: StepDistribution,
    pub a: GroupElement,
    pub b: GroupElement,
    pub delta: BigRational,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Resolved, RunError> {
        let input = |e: harmlab::Error| RunError::Input(e.to_string());
        let group = Group::from_spec(&self.group).map_err(input)?;
        let steps = match &self.probs {
            None => group.uniform_steps(),
            Some(ps) => {
                let probs = ps
                    .iter()
                    .map(|p| BigRational::from_str(p.trim()).map_err(|_| RunError::Input(format!("bad probability `{p}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                StepDistribution::with_probabilities(&group, &probs).map_err(input)?
            }
        };
        if self.radius_min > self.radius_max {
            return Err(RunError::Input(format!(
                "empty radius range {}..={}",
                self.radius_min, self.radius_max
            )));
        }
        let a = match &self.a {
            Some(s) => group.parse_element(s).map_err(input)?,
            None => group.identity().clone(),
        };
        let b = match &self.b {
            Some(s) => group.parse_element(s).map_err(input)?,
            None => a.try_mul(&steps.steps()[0].element).map_err(input)?,
        };
        let delta = BigRational::from_str(self.delta.trim())
            .map_err(|_| RunError::Input(format!("bad delta `{}`", self.delta)))?;
        Ok(Resolved { group, steps, a, b, delta })
    }

    pub fn radii(&self) -> Vec<usize> {
        (self.radius_min..=self.radius_max).collect()
    }
}
