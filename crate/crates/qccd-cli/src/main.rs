//! `qccd`: route circuits onto trapped-ion QCCD machines, sweep routing
//! weights, report benchmark structure statistics, and validate traces.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use qccd_core::benchmarks::{benchmark_stats, stats_csv};
use qccd_core::circuit::generators::BenchmarkKind;
use qccd_core::circuit::build_gate_dag;
use qccd_core::physics::{accumulate_fidelity, annotate_durations, RunMetrics};
use qccd_core::router::route;
use qccd_core::scoring::ScoreWeights;
use qccd_core::sweep::{evaluations_csv, staged_optimize, SweepContext};
use qccd_core::trace::{replay, ExecutionTrace, RoundKind};

#[derive(Parser)]
#[command(name = "qccd", version, about = "Qubit routing and scheduling for trapped-ion QCCD devices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Route a circuit with fixed weights and emit trace + metrics.
    Route {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the staged weight sweep declared in the config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Report structure statistics for generated benchmark circuits.
    Bench {
        /// Comma-separated preset names (qft, qaoa, ca, da, rnd10, rnd80).
        #[arg(long, value_delimiter = ',')]
        circuits: Vec<String>,
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay a trace and verify every scheduling invariant.
    Validate {
        trace: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Route { config, seed, out_dir } => cmd_route(&config, seed, out_dir),
        Command::Sweep { config, seed, out_dir } => cmd_sweep(&config, seed, out_dir),
        Command::Bench { circuits, qubits, seed, out_dir } => cmd_bench(&circuits, qubits, seed, out_dir),
        Command::Validate { trace } => cmd_validate(&trace),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

struct LoadedRun {
    config: RunConfig,
    out_dir: PathBuf,
    seed: u64,
}

fn load_run(config_path: &Path, seed: Option<u64>, out_dir: Option<PathBuf>) -> Result<LoadedRun> {
    let config = RunConfig::load(config_path)?;
    let seed = seed.unwrap_or(config.seed);
    let out_dir = out_dir
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    Ok(LoadedRun { config, out_dir, seed })
}

fn gate_round_count(trace: &ExecutionTrace) -> usize {
    trace.rounds.iter().filter(|r| r.kind == RoundKind::Gate).count()
}

fn metrics_csv(metrics: &RunMetrics, gate_rounds: usize, seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "# seed={seed}").unwrap();
    writeln!(out, "shuttles,swaps,depth,exec_time_us,coherence,fidelity").unwrap();
    writeln!(
        out,
        "{},{},{},{},{},{}",
        metrics.shuttle_count,
        metrics.swap_count,
        gate_rounds,
        metrics.exec_time_us,
        metrics.coherence_factor,
        metrics.total_fidelity
    )
    .unwrap();
    out
}

fn summary_text(metrics: &RunMetrics, trace: &ExecutionTrace, seed: u64) -> String {
    let mut out = String::new();
    writeln!(out, "seed:            {seed}").unwrap();
    writeln!(out, "qubits:          {}", trace.num_qubits).unwrap();
    writeln!(out, "gates:           {}", trace.num_gates).unwrap();
    writeln!(out, "rounds:          {} ({} gate rounds)", trace.rounds.len(), gate_round_count(trace)).unwrap();
    writeln!(out, "shuttles:        {}", metrics.shuttle_count).unwrap();
    writeln!(out, "swaps:           {}", metrics.swap_count).unwrap();
    writeln!(out, "exec time (us):  {:.3}", metrics.exec_time_us).unwrap();
    writeln!(out, "coherence:       {:.6}", metrics.coherence_factor).unwrap();
    writeln!(out, "fidelity:        {:.6}", metrics.total_fidelity).unwrap();
    out
}

fn cmd_route(config_path: &Path, seed: Option<u64>, out_dir: Option<PathBuf>) -> Result<()> {
    let run = load_run(config_path, seed, out_dir)?;
    let weights: ScoreWeights = match &run.config.weights {
        Some(w) => w.into(),
        None => bail!("`route` requires a [weights] section (use `sweep` for sweep plans)"),
    };
    let machine = run.config.topology.build()?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let circuit = run.config.circuit.build(base, run.seed)?;
    let dag = build_gate_dag(&circuit);

    let mut trace = route(&dag, &machine, &weights, run.config.placement.into(), run.seed)?;
    let metrics = accumulate_fidelity(&trace, &run.config.physics)?;
    annotate_durations(&mut trace, &run.config.physics);

    std::fs::write(run.out_dir.join("trace.json"), trace.to_json())?;
    std::fs::write(
        run.out_dir.join("metrics.csv"),
        metrics_csv(&metrics, gate_round_count(&trace), run.seed),
    )?;
    let summary = summary_text(&metrics, &trace, run.seed);
    std::fs::write(run.out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    println!("artifacts written to {}", run.out_dir.display());
    Ok(())
}

fn cmd_sweep(config_path: &Path, seed: Option<u64>, out_dir: Option<PathBuf>) -> Result<()> {
    let run = load_run(config_path, seed, out_dir)?;
    let plan = match &run.config.sweep {
        Some(s) => s.plan()?,
        None => bail!("`sweep` requires a [sweep] section (use `route` for fixed weights)"),
    };
    let machine = run.config.topology.build()?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let circuit = run.config.circuit.build(base, run.seed)?;
    let dag = build_gate_dag(&circuit);

    let ctx = SweepContext {
        dag: &dag,
        machine: &machine,
        physics: &run.config.physics,
        placement: run.config.placement.into(),
        seed: run.seed,
    };
    let result = staged_optimize(&plan, &ctx)?;

    std::fs::write(run.out_dir.join("evaluations.csv"), evaluations_csv(&result, run.seed))?;
    let best = serde_json::json!({
        "seed": run.seed,
        "weights": result.best_weights,
        "metrics": result.best_metrics,
        "best_fidelity_by_stage": result.best_fidelity_by_stage,
        "stage_no_impact": result.stage_no_impact,
    });
    std::fs::write(run.out_dir.join("best.json"), serde_json::to_string_pretty(&best)?)?;

    println!("evaluated {} points across {} stages", result.evaluations.len(), result.best_fidelity_by_stage.len());
    for (i, (fid, no_impact)) in result
        .best_fidelity_by_stage
        .iter()
        .zip(&result.stage_no_impact)
        .enumerate()
    {
        let note = if *no_impact { "  (no impact)" } else { "" };
        println!("stage {}: best fidelity {:.6}{note}", i + 1, fid);
    }
    println!(
        "best: fidelity {:.6} with shuttles {} swaps {} (weights in best.json)",
        result.best_metrics.total_fidelity,
        result.best_metrics.shuttle_count,
        result.best_metrics.swap_count
    );
    println!("artifacts written to {}", run.out_dir.display());
    Ok(())
}

fn cmd_bench(circuits: &[String], qubits: usize, seed: u64, out_dir: Option<PathBuf>) -> Result<()> {
    let names: Vec<String> = if circuits.is_empty() || circuits.iter().any(|c| c == "all") {
        BenchmarkKind::ALL.iter().map(|k| k.name().to_string()).collect()
    } else {
        circuits.to_vec()
    };
    let mut rows = Vec::new();
    for name in &names {
        let kind = BenchmarkKind::from_name(name)
            .with_context(|| format!("unknown benchmark `{name}`"))?;
        rows.push(benchmark_stats(kind, qubits, seed)?);
    }
    let csv = stats_csv(&rows, seed);
    print!("{csv}");
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("benchmark-stats.csv");
        std::fs::write(&path, &csv)?;
        println!("written to {}", path.display());
    }
    Ok(())
}

fn cmd_validate(trace_path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(trace_path)
        .with_context(|| format!("reading trace {}", trace_path.display()))?;
    let trace = ExecutionTrace::from_json(&text)?;
    replay(&trace, true).context("trace replay failed")?;

    // Consistency of the derived metrics with a fresh structural pass.
    let machine_gates: usize = trace
        .rounds
        .iter()
        .flat_map(|r| &r.ops)
        .filter(|op| matches!(op, qccd_core::trace::TraceOp::Gate1 { .. } | qccd_core::trace::TraceOp::Gate2 { .. }))
        .count();
    println!(
        "trace valid: {} rounds, {} gates, {} shuttles, {} swaps",
        trace.rounds.len(),
        machine_gates,
        trace.shuttle_count(),
        trace.swap_count()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_csv_shape() {
        let metrics = RunMetrics {
            shuttle_count: 3,
            swap_count: 4,
            rounds: 5,
            exec_time_us: 123.0,
            gate_fidelity_product: 0.9,
            coherence_factor: 0.99,
            total_fidelity: 0.891,
            trap_heat: vec![0.0],
        };
        let csv = metrics_csv(&metrics, 2, 7);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# seed=7"));
        assert_eq!(lines.next(), Some("shuttles,swaps,depth,exec_time_us,coherence,fidelity"));
        assert_eq!(lines.next(), Some("3,4,2,123,0.99,0.891"));
    }
}
