//! Command-line front end: sampling, optimization, startup checks,
//! uniformity diagnostics, walker benchmarks and the product experiment.

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use dikin_core::baselines::{run_baseline, BaselineConfig, BaselineKind};
use dikin_core::body::{parse_body_spec, BodySpec};
use dikin_core::chain::{run_chain, ChainConfig, ChainRun, DEFAULT_RADIUS};
use dikin_core::diagnostics::{
    autocorrelation_curve, bounding_box, effective_sample_size, grid_histogram,
    integrated_autocorrelation_time, product_mixing_experiment, startup_checks, tv_distance,
    uniformity_report,
};
use dikin_core::error::Error;
use dikin_core::io::{atomic_write, digest_bytes, samples_to_csv, to_json_pretty, RunManifest};
use dikin_core::optimizer::{
    las_vegas_optimize, HatWalkConfig, OptimizeStatus, OptimizerConfig, DEFAULT_J_CAP,
};

#[derive(Parser)]
#[command(name = "dikin", version, about = "Random walks over convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Dikin walk and write a CSV sample stream plus a JSON summary.
    Sample {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        burnin: u64,
        #[arg(long, default_value_t = 1)]
        thin: u64,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize a linear objective by the projective walk.
    Optimize {
        #[arg(long)]
        body: PathBuf,
        /// Comma-separated objective, pre-scaled so the target is cᵀx = 1.
        #[arg(long)]
        objective: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Chord-centrality bound of the origin in Q.
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_J_CAP)]
        j_cap: f64,
        #[arg(long, default_value_t = 1.0)]
        budget_c1: f64,
        #[arg(long, default_value_t = 1.0)]
        budget_c2: f64,
        /// Hard step cap; defaults to 10·τ(ε, δ).
        #[arg(long)]
        hard_cap: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Startup checks: proposal tail and self-concordance sweep.
    Check {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniformity report of a fresh Dikin run against the rejection oracle.
    Diagnose {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 4)]
        grid: usize,
        #[arg(long, default_value_t = 100_000)]
        oracle: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Side-by-side mixing proxies and histogram consistency of walkers.
    Benchmark {
        #[arg(long)]
        body: PathBuf,
        /// Comma-separated subset of dikin,hitrun,ball.
        #[arg(long, default_value = "dikin,hitrun,ball")]
        walks: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ball-walk radius; required when `ball` is among the walks.
        #[arg(long)]
        ball_delta: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixing of the walk on h-fold products of a factor body.
    ProductExperiment {
        #[arg(long)]
        factor: PathBuf,
        #[arg(long, default_value = "1,2,4,8")]
        copies: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems exit 1 uniformly.
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Numeric(_)
        | Error::InfeasiblePoint { .. }
        | Error::UnboundedBody(_)
        | Error::StepTooLarge
        | Error::ProjectiveDomain(_) => 2,
        _ => 1,
    }
}

struct LoadedBody {
    spec: BodySpec,
    digest: String,
}

fn load_body(path: &Path) -> Result<LoadedBody, Error> {
    let text = std::fs::read_to_string(path)?;
    let spec = parse_body_spec(&text)?;
    Ok(LoadedBody {
        spec,
        digest: digest_bytes(text.as_bytes()),
    })
}

fn parse_vector(text: &str, dim: usize) -> Result<DVector<f64>, Error> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let values = parts.map_err(|e| Error::InvalidConfig(format!("objective: {e}")))?;
    if values.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "objective",
            expected: dim,
            found: values.len(),
        });
    }
    Ok(DVector::from_vec(values))
}

fn parse_copies(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidConfig(format!("copies: {e}")))
        })
        .collect()
}

/// Writes `document` to `out` (or stdout when absent) and, for file
/// outputs, the run manifest next to it.
fn emit(document: &str, out: Option<&Path>, mut manifest: RunManifest) -> Result<(), Error> {
    match out {
        Some(path) => {
            atomic_write(path, document.as_bytes())?;
            manifest.finish();
            let manifest_path = sibling(path, ".manifest.json");
            atomic_write(&manifest_path, to_json_pretty(&manifest)?.as_bytes())?;
        }
        None => print!("{document}"),
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

#[derive(Serialize)]
struct OptimizeDocument {
    schema_version: u32,
    status: OptimizeStatus,
    x: Vec<f64>,
    objective_value: f64,
    steps_used: u64,
    tau_budget: u64,
    hard_cap: u64,
    seed: u64,
    #[serde(rename = "J_cap")]
    j_cap: f64,
}

#[derive(Serialize)]
struct BenchmarkWalkRow {
    walk: String,
    tau_int: f64,
    tau_error: f64,
    ess: f64,
    acceptance_rate: f64,
}

#[derive(Serialize)]
struct BenchmarkDocument {
    schema_version: u32,
    steps: u64,
    grid_cells: usize,
    walks: Vec<BenchmarkWalkRow>,
    pairwise_tv: Vec<PairwiseTv>,
}

#[derive(Serialize)]
struct PairwiseTv {
    a: String,
    b: String,
    tv: f64,
}

#[derive(Serialize)]
struct ProductDocument {
    schema_version: u32,
    steps: u64,
    radius: f64,
    rows: Vec<dikin_core::diagnostics::ProductMixingRow>,
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Sample {
            body,
            steps,
            burnin,
            thin,
            radius,
            seed,
            out,
        } => {
            let loaded = load_body(&body)?;
            let config = ChainConfig {
                radius,
                seed,
                max_steps: steps,
                burn_in: burnin,
                thinning: thin,
                ..ChainConfig::default()
            };
            let manifest = RunManifest::new(
                "sample",
                json!({"chain": &config, "weights": loaded.spec.weights(), "body": body}),
                loaded.digest.clone(),
                seed,
            );
            let start = DVector::zeros(loaded.spec.dim());
            let run = run_chain(&loaded.spec, &loaded.spec.weights(), &config, &start)?;
            let csv = samples_to_csv(&run.samples, loaded.spec.dim());
            atomic_write(&out, csv.as_bytes())?;
            let summary_path = sibling(&out, ".summary.json");
            atomic_write(&summary_path, to_json_pretty(&run.summary)?.as_bytes())?;
            let mut manifest = manifest;
            manifest.finish();
            atomic_write(
                &sibling(&out, ".manifest.json"),
                to_json_pretty(&manifest)?.as_bytes(),
            )?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Optimize {
            body,
            objective,
            eps,
            delta,
            s,
            seed,
            radius,
            j_cap,
            budget_c1,
            budget_c2,
            hard_cap,
            out,
        } => {
            let loaded = load_body(&body)?;
            let c = parse_vector(&objective, loaded.spec.dim())?;
            let mut opt = OptimizerConfig::new(c, eps, delta, s);
            opt.budget_c1 = budget_c1;
            opt.budget_c2 = budget_c2;
            opt.hard_cap = hard_cap;
            let walk = HatWalkConfig {
                radius,
                seed,
                j_cap,
                ..HatWalkConfig::default()
            };
            let manifest = RunManifest::new(
                "optimize",
                json!({
                    "optimizer": &opt,
                    "walk": &walk,
                    "objective": objective,
                    "body": body,
                }),
                loaded.digest.clone(),
                seed,
            );
            let outcome = las_vegas_optimize(&loaded.spec, &loaded.spec.weights(), &opt, &walk)?;
            let document = OptimizeDocument {
                schema_version: 1,
                status: outcome.status,
                x: outcome.x.iter().copied().collect(),
                objective_value: outcome.objective_value,
                steps_used: outcome.steps_used,
                tau_budget: outcome.tau_budget,
                hard_cap: outcome.hard_cap,
                seed: outcome.seed,
                j_cap: outcome.j_cap,
            };
            emit(&to_json_pretty(&document)?, Some(&out), manifest)?;
            // Budget exhaustion is a reported status with its own exit code;
            // the result file is written either way.
            Ok(match outcome.status {
                OptimizeStatus::Success => ExitCode::SUCCESS,
                OptimizeStatus::BudgetExhausted => ExitCode::from(3),
            })
        }

        Command::Check {
            body,
            seed,
            radius,
            out,
        } => {
            let loaded = load_body(&body)?;
            let config = ChainConfig {
                radius,
                seed,
                ..ChainConfig::default()
            };
            let manifest = RunManifest::new(
                "check",
                json!({"chain": &config, "body": body}),
                loaded.digest.clone(),
                seed,
            );
            let report = startup_checks(&loaded.spec, &loaded.spec.weights(), &config)?;
            emit(&to_json_pretty(&report)?, out.as_deref(), manifest)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Diagnose {
            body,
            steps,
            grid,
            oracle,
            seed,
            radius,
            out,
        } => {
            let loaded = load_body(&body)?;
            let config = ChainConfig {
                radius,
                seed,
                max_steps: steps,
                burn_in: steps / 10,
                thinning: 1,
                ..ChainConfig::default()
            };
            let manifest = RunManifest::new(
                "diagnose",
                json!({
                    "chain": &config,
                    "grid": grid,
                    "oracle": oracle,
                    "body": body,
                }),
                loaded.digest.clone(),
                seed,
            );
            let start = DVector::zeros(loaded.spec.dim());
            let run = run_chain(&loaded.spec, &loaded.spec.weights(), &config, &start)?;
            let report = uniformity_report(&run.samples, &loaded.spec, grid, oracle, seed)?;
            // Plot-friendly side files next to the report.
            if let Some(path) = &out {
                if let (Some(w), Some(o)) = (&report.walker_histogram, &report.oracle_histogram) {
                    let mut csv = String::from("cell,walker,oracle\n");
                    for (i, (a, b)) in w.iter().zip(o).enumerate() {
                        csv.push_str(&format!("{i},{a:.16e},{b:.16e}\n"));
                    }
                    atomic_write(&sibling(path, ".histogram.csv"), csv.as_bytes())?;
                }
                let series: Vec<f64> = run.samples.iter().map(|p| p[0]).collect();
                let curve = autocorrelation_curve(&series, 200);
                let mut csv = String::from("lag,rho\n");
                for (lag, rho) in curve.iter().enumerate() {
                    csv.push_str(&format!("{},{rho:.16e}\n", lag + 1));
                }
                atomic_write(&sibling(path, ".autocorr.csv"), csv.as_bytes())?;
            }
            emit(&to_json_pretty(&report)?, out.as_deref(), manifest)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Benchmark {
            body,
            walks,
            steps,
            seed,
            ball_delta,
            radius,
            out,
        } => {
            let loaded = load_body(&body)?;
            let spec = Arc::new(loaded.spec);
            let names: Vec<String> = walks
                .split(',')
                .map(|w| w.trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect();
            if names.is_empty() {
                return Err(Error::InvalidConfig("no walks requested".into()));
            }
            let manifest = RunManifest::new(
                "benchmark",
                json!({
                    "walks": names,
                    "steps": steps,
                    "radius": radius,
                    "ball_delta": ball_delta,
                    "body": body,
                }),
                loaded.digest.clone(),
                seed,
            );
            let start = DVector::zeros(spec.dim());
            let burn_in = steps / 10;
            let mut rows = Vec::new();
            let mut histograms: Vec<(String, Vec<f64>)> = Vec::new();
            let (dims, resolution) = if spec.dim() == 1 { (1, 16) } else { (2, 4) };
            let (lo, hi) = bounding_box(&spec, seed ^ 0x5bd1_e995)?;
            for name in &names {
                let run: ChainRun = match name.as_str() {
                    "dikin" => {
                        let config = ChainConfig {
                            radius,
                            seed,
                            max_steps: steps,
                            burn_in,
                            thinning: 1,
                            ..ChainConfig::default()
                        };
                        run_chain(&spec, &spec.weights(), &config, &start)?
                    }
                    "hitrun" => {
                        let config = BaselineConfig {
                            kind: BaselineKind::HitAndRun,
                            ball_delta: None,
                            seed,
                            steps,
                            burn_in,
                            thinning: 1,
                        };
                        run_baseline(&spec, &config, &start)?
                    }
                    "ball" => {
                        let config = BaselineConfig {
                            kind: BaselineKind::Ball,
                            ball_delta,
                            seed,
                            steps,
                            burn_in,
                            thinning: 1,
                        };
                        run_baseline(&spec, &config, &start)?
                    }
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "unknown walk `{other}` (expected dikin, hitrun, ball)"
                        )))
                    }
                };
                let series: Vec<f64> = run.samples.iter().map(|p| p[0]).collect();
                let proxy = integrated_autocorrelation_time(&series);
                rows.push(BenchmarkWalkRow {
                    walk: name.clone(),
                    tau_int: proxy.tau_int,
                    tau_error: proxy.error,
                    ess: effective_sample_size(&series),
                    acceptance_rate: run.summary.acceptance_rate,
                });
                histograms.push((
                    name.clone(),
                    grid_histogram(&run.samples, &lo, &hi, resolution, dims),
                ));
            }
            let mut pairwise = Vec::new();
            for i in 0..histograms.len() {
                for j in i + 1..histograms.len() {
                    pairwise.push(PairwiseTv {
                        a: histograms[i].0.clone(),
                        b: histograms[j].0.clone(),
                        tv: tv_distance(&histograms[i].1, &histograms[j].1),
                    });
                }
            }
            let document = BenchmarkDocument {
                schema_version: 1,
                steps,
                grid_cells: resolution.pow(dims as u32),
                walks: rows,
                pairwise_tv: pairwise,
            };
            emit(&to_json_pretty(&document)?, out.as_deref(), manifest)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::ProductExperiment {
            factor,
            copies,
            steps,
            seed,
            radius,
            out,
        } => {
            let loaded = load_body(&factor)?;
            let copies = parse_copies(&copies)?;
            let config = ChainConfig {
                radius,
                seed,
                max_steps: steps,
                burn_in: steps / 10,
                thinning: 1,
                ..ChainConfig::default()
            };
            let manifest = RunManifest::new(
                "product-experiment",
                json!({"chain": &config, "copies": copies, "factor": factor}),
                loaded.digest.clone(),
                seed,
            );
            let rows = product_mixing_experiment(&loaded.spec, &copies, &config)?;
            let document = ProductDocument {
                schema_version: 1,
                steps,
                radius,
                rows,
            };
            emit(&to_json_pretty(&document)?, out.as_deref(), manifest)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
