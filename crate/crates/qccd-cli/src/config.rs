//! Run configuration: the TOML document driving `route` and `sweep`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use qccd_core::circuit::generators::{self, BenchmarkKind};
use qccd_core::circuit::{qasm, Circuit};
use qccd_core::physics::PhysicsParams;
use qccd_core::router::PlacementStrategy;
use qccd_core::scoring::ScoreWeights;
use qccd_core::sweep::StagePlan;
use qccd_core::topology::MachineGraph;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub placement: Placement,
    pub topology: TopologyConfig,
    pub circuit: CircuitConfig,
    pub weights: Option<WeightsConfig>,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub physics: PhysicsParams,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    #[default]
    Sequential,
    Greedy,
}

impl From<Placement> for PlacementStrategy {
    fn from(p: Placement) -> Self {
        match p {
            Placement::Sequential => PlacementStrategy::Sequential,
            Placement::Greedy => PlacementStrategy::Greedy,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub kind: String,
    pub traps: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub capacity: Option<usize>,
    pub capacities: Option<Vec<usize>>,
    pub junctions: Option<Vec<(u32, u32)>>,
}

impl TopologyConfig {
    pub fn build(&self) -> Result<MachineGraph> {
        let capacity = || {
            self.capacity
                .context("topology requires `capacity` for built-in layouts")
        };
        let machine = match self.kind.as_str() {
            "linear" => MachineGraph::linear(
                self.traps.context("linear topology requires `traps`")?,
                capacity()?,
            )?,
            "ring" => MachineGraph::ring(
                self.traps.context("ring topology requires `traps`")?,
                capacity()?,
            )?,
            "grid" => MachineGraph::grid(
                self.rows.context("grid topology requires `rows`")?,
                self.cols.context("grid topology requires `cols`")?,
                capacity()?,
            )?,
            "custom" => MachineGraph::custom(
                self.capacities
                    .clone()
                    .context("custom topology requires `capacities`")?,
                self.junctions
                    .clone()
                    .context("custom topology requires `junctions`")?,
            )?,
            other => bail!("unknown topology kind `{other}`"),
        };
        Ok(machine)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub file: Option<PathBuf>,
    pub generator: Option<String>,
    pub qubits: Option<usize>,
    pub layers: Option<usize>,
    pub repeat_bias: Option<f64>,
    pub seed: Option<u64>,
}

impl CircuitConfig {
    pub fn build(&self, base_dir: &Path, run_seed: u64) -> Result<Circuit> {
        match (&self.file, &self.generator) {
            (Some(path), None) => {
                let resolved = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                let text = std::fs::read_to_string(&resolved)
                    .with_context(|| format!("reading circuit file {}", resolved.display()))?;
                Ok(qasm::parse_circuit(&text)?)
            }
            (None, Some(name)) => {
                let qubits = self.qubits.context("generator circuits require `qubits`")?;
                let seed = self.seed.unwrap_or(run_seed);
                if name == "random" {
                    let layers = self.layers.unwrap_or(qubits);
                    let bias = self.repeat_bias.context("random generator requires `repeat_bias`")?;
                    return Ok(generators::random_matching(qubits, layers, bias, seed)?);
                }
                let kind = BenchmarkKind::from_name(name)
                    .with_context(|| format!("unknown circuit generator `{name}`"))?;
                Ok(kind.generate(qubits, seed)?)
            }
            (Some(_), Some(_)) => bail!("circuit config sets both `file` and `generator`"),
            (None, None) => bail!("circuit config needs `file` or `generator`"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    #[serde(default = "one")]
    pub shuttle: f64,
    #[serde(default = "one")]
    pub swap: f64,
    #[serde(default = "one")]
    pub future_ops: f64,
    #[serde(default = "one")]
    pub excess_capacity: f64,
    #[serde(default = "one")]
    pub parallelism: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_lookahead")]
    pub lookahead: usize,
}

fn one() -> f64 {
    1.0
}

fn default_threshold() -> f64 {
    -350.0
}

fn default_lookahead() -> usize {
    7
}

impl From<&WeightsConfig> for ScoreWeights {
    fn from(w: &WeightsConfig) -> Self {
        ScoreWeights {
            shuttle: w.shuttle,
            swap: w.swap,
            future_ops: w.future_ops,
            excess_capacity: w.excess_capacity,
            parallelism: w.parallelism,
            threshold: w.threshold,
            lookahead: w.lookahead,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub retain_k: Option<usize>,
    pub lookahead: Option<usize>,
    pub swap_grid: Option<Vec<f64>>,
    pub shuttle_grid: Option<Vec<f64>>,
    pub threshold_grid: Option<Vec<f64>>,
    pub parallelism_grid: Option<Vec<f64>>,
    pub future_ops_grid: Option<Vec<f64>>,
    pub excess_capacity_grid: Option<Vec<f64>>,
}

impl SweepConfig {
    pub fn plan(&self) -> Result<StagePlan> {
        let mut plan = StagePlan::default();
        if let Some(k) = self.retain_k {
            if k == 0 {
                bail!("sweep retain_k must be at least 1");
            }
            plan.retain_k = k;
        }
        if let Some(l) = self.lookahead {
            if l == 0 {
                bail!("sweep lookahead must be at least 1");
            }
            plan.lookahead = l;
        }
        let grids = [
            (&self.swap_grid, &mut plan.swap_grid),
            (&self.shuttle_grid, &mut plan.shuttle_grid),
            (&self.threshold_grid, &mut plan.threshold_grid),
            (&self.parallelism_grid, &mut plan.parallelism_grid),
            (&self.future_ops_grid, &mut plan.future_ops_grid),
            (&self.excess_capacity_grid, &mut plan.excess_capacity_grid),
        ];
        for (source, slot) in grids {
            if let Some(values) = source {
                if values.is_empty() {
                    bail!("sweep grids must be non-empty");
                }
                *slot = values.clone();
            }
        }
        Ok(plan)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        match (&self.weights, &self.sweep) {
            (Some(_), Some(_)) => bail!("config must set exactly one of [weights] or [sweep], found both"),
            (None, None) => bail!("config must set exactly one of [weights] or [sweep], found neither"),
            _ => Ok(()),
        }
    }
}
