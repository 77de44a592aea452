//! Batch front end: run built-in games, check the embezzlement and
//! compilation guarantees, synthesize gate programs, and sweep parameter
//! grids. Reports are JSON on stdout (or `--out`), sweeps and traces are
//! CSV. Exit code 0 means every pass flag was true, 1 means a verification
//! failed, 2 means the command line did not parse.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use embezzlab::config::{Tolerances, DEFAULT_DENSE_CAP};
use embezzlab::embezzle::{
    catalyst_side, embezzlement_fidelity, verify_fidelity_bound, EmbezzlementState,
};
use embezzlab::games::{self, classical_value, strategy_value, ClassicalGame, PovmStrategy};
use embezzlab::optimize::{seesaw, SeesawConfig};
use embezzlab::qlin::{schmidt_decompose, CMatrix, SchmidtDecomposition, StateVector};
use embezzlab::synth::{synthesize, DispatchCircuit};
use embezzlab::transform::{compile, verify_bound};

use rand::SeedableRng;

#[derive(Parser)]
#[command(name = "embezzlab", version, about = "Non-local games on embezzlement catalysts")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every stochastic path.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate games and strategies.
    Game {
        #[command(subcommand)]
        action: GameAction,
    },
    /// Embezzlement fidelity checks and catalyst sizing.
    Embezzle {
        #[command(subcommand)]
        action: EmbezzleAction,
    },
    /// Compile a strategy onto an embezzlement catalyst and verify the
    /// value-loss bound.
    Transform(TransformArgs),
    /// Synthesize a dispatch program for a target unitary.
    Synth(SynthArgs),
    /// See-saw search for high-value strategies.
    Optimize(OptimizeArgs),
    /// Parameter sweeps, one CSV row per grid point.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum GameAction {
    /// Winning probability of a strategy.
    Value {
        #[command(flatten)]
        game: GameSource,
        /// optimal | zeros
        #[arg(long, default_value = "optimal")]
        strategy: String,
    },
    /// Deterministic-strategy optimum.
    Classical {
        #[command(flatten)]
        game: GameSource,
    },
}

#[derive(Args)]
struct GameSource {
    /// Built-in name: chsh | magic_square.
    #[arg(long, conflicts_with = "file")]
    name: Option<String>,
    /// Game JSON document.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EmbezzleAction {
    /// Check the fidelity guarantee at n = ceil(m / epsilon).
    Verify {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        epsilon: f64,
        /// epr | rank1 | random
        #[arg(long, default_value = "epr")]
        state: String,
    },
    /// Closed-form fidelity at an explicit catalyst size.
    Fidelity {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "epr")]
        state: String,
    },
}

#[derive(Args)]
struct TransformArgs {
    /// Built-in name or game JSON path.
    #[arg(long)]
    game: String,
    #[arg(long)]
    epsilon: f64,
    /// Per-side dense qubit cap (overrides EMBEZZLE_DENSE_CAP).
    #[arg(long)]
    dense_cap: Option<u32>,
}

#[derive(Args)]
struct SynthArgs {
    /// swap | cnot | ih | it | ry:<angle> | rz:<angle> | a matrix JSON path.
    #[arg(long)]
    target: String,
    /// Working register width in qubits.
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 12)]
    max_slots: usize,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Built-in name or game JSON path (one round, binary answers).
    #[arg(long)]
    game: String,
    /// Qubits per side.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the per-restart iteration trace as CSV (restart, iter, value).
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in name or game JSON path.
    #[arg(long, default_value = "chsh")]
    game: String,
    /// Comma-separated epsilon grid (picks n = ceil(m / epsilon) per row).
    #[arg(long, value_delimiter = ',')]
    epsilons: Vec<f64>,
    /// Comma-separated catalyst sizes (rows use epsilon = m / n).
    #[arg(long, value_delimiter = ',')]
    n_values: Vec<u32>,
    #[arg(long)]
    dense_cap: Option<u32>,
    /// Write the CSV here (defaults to stdout after the JSON report).
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs: serde_json::Value,
    outputs: serde_json::Value,
    timings: Timings,
}

#[derive(Serialize)]
struct Timings {
    total_ms: f64,
}

fn dense_cap(explicit: Option<u32>) -> u32 {
    explicit
        .or_else(|| {
            std::env::var("EMBEZZLE_DENSE_CAP")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_DENSE_CAP)
}

fn load_game(spec: &str) -> anyhow::Result<(ClassicalGame, Option<PovmStrategy>)> {
    match spec {
        "chsh" => {
            let (game, strat) = games::chsh();
            Ok((game, Some(strat)))
        }
        "magic_square" | "magic-square" => {
            let (game, strat) = games::magic_square();
            Ok((game, Some(strat)))
        }
        path => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading game file '{path}'"))?;
            Ok((games::json::game_from_json(&text)?, None))
        }
    }
}

fn game_from_source(src: &GameSource) -> anyhow::Result<(ClassicalGame, Option<PovmStrategy>)> {
    match (&src.name, &src.file) {
        (Some(name), None) => load_game(name),
        (None, Some(path)) => load_game(path.to_str().ok_or_else(|| anyhow!("bad path"))?),
        _ => bail!("pass exactly one of --name or --file"),
    }
}

fn source_state(kind: &str, m: u32, seed: u64, tol: &Tolerances) -> anyhow::Result<SchmidtDecomposition> {
    match kind {
        "epr" => {
            // m maximally entangled pairs, interleaved to the m|m split
            let mut state = embezzlab::qlin::gates::epr();
            for _ in 1..m {
                let product = embezzlab::qlin::tensor(&state, &embezzlab::qlin::gates::epr());
                state = product;
            }
            // pairs are [A1 B1 A2 B2 ...]; regroup to [A... | B...]
            let q = state.qubit_count() as usize;
            let mut perm = Vec::with_capacity(q);
            for i in 0..m as usize {
                perm.push(2 * i);
            }
            for i in 0..m as usize {
                perm.push(2 * i + 1);
            }
            let state = state.permute_qubits(&perm);
            Ok(schmidt_decompose(&state, m, tol)?)
        }
        "rank1" => {
            let theta = StateVector::zero_state(m);
            Ok(SchmidtDecomposition::from_parts(
                vec![1.0],
                vec![theta.clone()],
                vec![theta],
            )?)
        }
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let state = embezzlab::qlin::random::random_state(2 * m, &mut rng);
            Ok(schmidt_decompose(&state, m, tol)?)
        }
        other => bail!("unknown state '{other}' (use epr, rank1, or random)"),
    }
}

fn synth_target(spec: &str, d: u32) -> anyhow::Result<CMatrix> {
    use embezzlab::qlin::gates;
    let pad = |single: CMatrix| -> CMatrix {
        // the named single-qubit gates act on the last working qubit
        CMatrix::identity(1 << (d - 1)).kron(&single)
    };
    let matrix = match spec {
        "swap" => gates::swap().embed(d, &[0, 1]),
        "cnot" => gates::cnot().embed(d, &[0, 1]),
        "ih" => pad(gates::hadamard()),
        "it" => pad(gates::gate_t()),
        _ => {
            if let Some(angle) = spec.strip_prefix("ry:") {
                pad(gates::ry(angle.parse()?))
            } else if let Some(angle) = spec.strip_prefix("rz:") {
                pad(gates::rz(angle.parse()?))
            } else {
                let text = fs::read_to_string(spec)
                    .with_context(|| format!("reading matrix file '{spec}'"))?;
                serde_json::from_str(&text).context("matrix files hold row-major [re, im] pairs")?
            }
        }
    };
    if matrix.rows() != 1 << d {
        bail!("target is {}x{}, width {d} needs {}", matrix.rows(), matrix.cols(), 1 << d);
    }
    Ok(matrix)
}

fn write_csv(path: &Option<PathBuf>, header: &str, rows: &[String]) -> anyhow::Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs the command; returns (inputs, outputs, all_passed).
fn execute(cli: &Cli, tol: &Tolerances) -> anyhow::Result<(serde_json::Value, serde_json::Value, bool)> {
    match &cli.command {
        Command::Game { action } => match action {
            GameAction::Value { game, strategy } => {
                let (g, builtin_strategy) = game_from_source(game)?;
                let strat = match strategy.as_str() {
                    "optimal" => builtin_strategy
                        .ok_or_else(|| anyhow!("no built-in strategy for this game; use a built-in name"))?,
                    "zeros" => games::builtin::chsh_deterministic_zeros(),
                    other => bail!("unknown strategy '{other}'"),
                };
                let value = strategy_value(&g, &strat, tol)?;
                Ok((
                    json!({"game": g.name, "strategy": strategy}),
                    json!({"value": value}),
                    true,
                ))
            }
            GameAction::Classical { game } => {
                let (g, _) = game_from_source(game)?;
                let value = classical_value(&g)?;
                Ok((json!({"game": g.name}), json!({"classical_value": value}), true))
            }
        },
        Command::Embezzle { action } => match action {
            EmbezzleAction::Verify { m, epsilon, state } => {
                let source = source_state(state, *m, cli.seed, tol)?;
                let report = verify_fidelity_bound(&source, *epsilon)?;
                let pass = report.pass;
                Ok((
                    json!({"m": m, "epsilon": epsilon, "state": state, "seed": cli.seed}),
                    serde_json::to_value(report)?,
                    pass,
                ))
            }
            EmbezzleAction::Fidelity { m, n, state } => {
                let source = source_state(state, *m, cli.seed, tol)?;
                let fidelity = embezzlement_fidelity(&source, *n);
                let c = EmbezzlementState::new(*n)?.normalization();
                Ok((
                    json!({"m": m, "n": n, "state": state, "seed": cli.seed}),
                    json!({"fidelity": fidelity, "normalization": c}),
                    true,
                ))
            }
        },
        Command::Transform(args) => {
            let cap = dense_cap(args.dense_cap);
            let (game, strat) = load_game(&args.game)?;
            let strat = strat.ok_or_else(|| {
                anyhow!("transform needs a built-in game with its optimal strategy")
            })?;
            let compiled = compile(&strat, args.epsilon, cap, tol)?;
            let report = verify_bound(&game, &compiled, tol)?;
            let pass = report.pass;
            Ok((
                json!({"game": game.name, "epsilon": args.epsilon, "dense_cap": cap}),
                serde_json::to_value(report)?,
                pass,
            ))
        }
        Command::Synth(args) => {
            let target = synth_target(&args.target, args.d)?;
            let result = synthesize(&target, args.d, args.eps, args.max_slots)?;
            let pass = result.program.is_some();
            let outputs = match &result.program {
                Some(program) => {
                    let dispatch = DispatchCircuit::new(program.slot_count(), args.d)?;
                    json!({
                        "found": true,
                        "program": program.to_string(),
                        "slots": program.slot_count(),
                        "ancilla_bits": dispatch.ancilla_bits(),
                        "distance": result.distance,
                        "examined": result.examined,
                    })
                }
                None => json!({
                    "found": false,
                    "best_distance": result.distance,
                    "examined": result.examined,
                }),
            };
            Ok((
                json!({"target": args.target, "d": args.d, "eps": args.eps, "max_slots": args.max_slots}),
                outputs,
                pass,
            ))
        }
        Command::Optimize(args) => {
            let (game, _) = load_game(&args.game)?;
            let cfg = SeesawConfig {
                side_qubits: args.m,
                max_iters: args.iters,
                convergence_tol: args.tol,
                seed: cli.seed,
                restarts: args.restarts,
            };
            let outcome = seesaw(&game, &cfg, tol)?;
            if args.trace_out.is_some() {
                let mut rows = Vec::new();
                for (restart, trace) in outcome.traces.iter().enumerate() {
                    for (iter, value) in trace.iter().enumerate() {
                        rows.push(format!("{restart},{iter},{value:.15}"));
                    }
                }
                write_csv(&args.trace_out, "restart,iter,value", &rows)?;
            }
            Ok((
                json!({
                    "game": game.name, "m": args.m, "iters": args.iters,
                    "restarts": args.restarts, "seed": cli.seed, "tol": args.tol,
                }),
                json!({
                    "best_value": outcome.best_value,
                    "best_restart": outcome.best_restart,
                    "iterations": outcome.traces[outcome.best_restart].len() - 1,
                }),
                true,
            ))
        }
        Command::Sweep(args) => {
            let cap = dense_cap(args.dense_cap);
            let (game, strat) = load_game(&args.game)?;
            let strat = strat
                .ok_or_else(|| anyhow!("sweep needs a built-in game with its optimal strategy"))?;
            let m = strat.side_qubits();
            let omega = strategy_value(&game, &strat, tol)?;
            let source = schmidt_decompose(strat.shared_state(), m, tol)?;

            let mut grid: Vec<(f64, u32)> = Vec::new();
            for &eps in &args.epsilons {
                grid.push((eps, catalyst_side(m, eps)?));
            }
            for &n in &args.n_values {
                grid.push((m as f64 / n as f64, n));
            }
            if grid.is_empty() {
                bail!("pass --epsilons and/or --n-values");
            }

            let mut rows = Vec::new();
            let mut all_pass = true;
            let mut row_reports = Vec::new();
            for (eps, n) in grid {
                let fidelity = embezzlement_fidelity(&source, n);
                if n + m > cap {
                    rows.push(format!("{eps},{n},{fidelity:.12},,,,,skipped"));
                    row_reports.push(json!({
                        "epsilon": eps, "n": n, "fidelity": fidelity, "status": "skipped"
                    }));
                    continue;
                }
                let compiled = compile(&strat, eps, cap, tol)?;
                let report = verify_bound(&game, &compiled, tol)?;
                all_pass &= report.pass;
                rows.push(format!(
                    "{eps},{n},{fidelity:.12},{:.12},{:.12},{:.12},{:.12},{}",
                    report.omega,
                    report.omega_prime,
                    report.bound,
                    report.gap,
                    if report.pass { "pass" } else { "fail" }
                ));
                row_reports.push(json!({
                    "epsilon": eps, "n": n, "fidelity": fidelity,
                    "omega": report.omega, "omega_prime": report.omega_prime,
                    "bound": report.bound, "gap": report.gap,
                    "status": if report.pass { "pass" } else { "fail" },
                }));
            }
            write_csv(
                &args.csv_out,
                "epsilon,n,fidelity,omega,omega_prime,bound,gap,status",
                &rows,
            )?;
            Ok((
                json!({"game": game.name, "m": m, "omega": omega, "dense_cap": cap}),
                json!({"rows": row_reports}),
                all_pass,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tolerances::DEFAULT;
    let started = Instant::now();
    match execute(&cli, &tol) {
        Ok((inputs, outputs, pass)) => {
            let report = RunReport {
                command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
                inputs,
                outputs,
                timings: Timings { total_ms: started.elapsed().as_secs_f64() * 1e3 },
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cli.out {
                Some(path) => {
                    if let Err(err) = fs::write(path, text) {
                        eprintln!("error: writing report: {err}");
                        return ExitCode::from(1);
                    }
                }
                None => println!("{text}"),
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
