//! Thin command-line front end. All logic lives in the library; each
//! subcommand parses flags, calls one or two library functions and writes
//! CSV/JSON.

use clap::{Args, Parser, Subcommand};
use spectral_markov::config::{ModelKind, PartialConfig, RunConfig};
use spectral_markov::diffusion::{
    boundary_classify, build_model, em_simulate, invariant_psi, EmSummary, Side, SpectralSeries,
};
use spectral_markov::error::{Error, Result};
use spectral_markov::io;
use spectral_markov::oracles::{expm, reports_to_jsonl};
use spectral_markov::qbd::{
    build_generator, classify, gillespie_simulate, invariant_measure, km_transition_bd,
    km_transition_qbd2, ChainState,
};
use spectral_markov::validate::{validate_model, ValidateOptions};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spectral-markov",
    about = "Level-phase Markov models: generators, transition probabilities, spectral densities, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonFlags {
    /// Model: bd, qbd2, l1-killed, l1-switch2, l2-switch3, l2-killswitch2
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Family parameter
    #[arg(long)]
    nu: Option<f64>,
    /// Base seed for all randomness
    #[arg(long)]
    seed: Option<u64>,
    /// Simulation horizon
    #[arg(long)]
    t_max: Option<f64>,
    /// Euler-Maruyama step
    #[arg(long)]
    dt: Option<f64>,
    /// Generator truncation (levels)
    #[arg(long)]
    levels: Option<usize>,
    /// Number of Monte Carlo paths
    #[arg(long)]
    n_paths: Option<usize>,
    /// Series / reporting tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Series truncation cap
    #[arg(long)]
    truncation: Option<usize>,
    /// JSON config file (flags win over file entries)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format where both are supported
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the truncated generator as JSON
    Generator(CommonFlags),
    /// Simulate paths (exact jumps for chains, Euler-Maruyama for
    /// diffusions); writes a path CSV and prints a summary JSON
    Simulate(CommonFlags),
    /// Karlin-McGregor transition value vs the matrix-exponential oracle
    Transition {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        t: f64,
    },
    /// Spectral transition density on a destination grid
    Density {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        /// Grid points over (0, 1)
        #[arg(long, default_value_t = 99)]
        grid: usize,
    },
    /// Invariant objects: potential coefficients, measure blocks, psi grid
    Invariant(CommonFlags),
    /// Recurrence / boundary classification with Feller integrals
    Classify(CommonFlags),
    /// Run the oracle suite for the selected model; exit 1 on any failure
    Validate {
        #[command(flatten)]
        common: CommonFlags,
        /// Inject a recurrence-coefficient perturbation (sensitivity check)
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn resolve(common: &CommonFlags) -> Result<RunConfig> {
    let file = match &common.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        model: common.model,
        nu: common.nu,
        seed: common.seed,
        t_max: common.t_max,
        dt: common.dt,
        levels: common.levels,
        n_paths: common.n_paths,
        tol: common.tol,
        truncation: common.truncation,
    };
    flags.over(file).resolve()
}

fn emit(common: &CommonFlags, content: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generator(common) => {
            let cfg = resolve(&common)?;
            let chain = cfg.model.as_chain().ok_or_else(|| {
                Error::InvalidArgument("generator dumps need --model bd or qbd2".into())
            })?;
            let gen = build_generator(cfg.nu, cfg.levels, chain)?;
            emit(&common, &io::generator_json(&gen)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(common) => {
            let cfg = resolve(&common)?;
            if let Some(chain) = cfg.model.as_chain() {
                let gen = build_generator(cfg.nu, cfg.levels, chain)?;
                let start = ChainState::new(0, 1);
                let mut csv = String::new();
                let mut returns = 0usize;
                let mut truncation_hits = 0usize;
                for k in 0..cfg.n_paths {
                    let path =
                        gillespie_simulate(&gen, start, cfg.t_max, cfg.seed ^ k as u64)?;
                    csv.push_str(&io::chain_path_csv(&path));
                    if path.states[1..].contains(&start) {
                        returns += 1;
                    }
                    if path.truncation_hit {
                        truncation_hits += 1;
                    }
                }
                emit(&common, &csv)?;
                println!(
                    "{}",
                    json!({
                        "model": cfg.model,
                        "n_paths": cfg.n_paths,
                        "returns_to_start": returns,
                        "truncation_hits": truncation_hits,
                    })
                );
            } else {
                let label = cfg.model.as_diffusion().expect("diffusion model");
                let model = build_model(cfg.nu, label)?;
                let mut csv = String::new();
                let mut paths = Vec::with_capacity(cfg.n_paths);
                for k in 0..cfg.n_paths {
                    let path = em_simulate(
                        &model,
                        0.5,
                        1,
                        cfg.dt,
                        cfg.t_max,
                        cfg.seed ^ k as u64,
                    )?;
                    csv.push_str(&io::diffusion_path_csv(&path));
                    paths.push(path);
                }
                emit(&common, &csv)?;
                let summary = EmSummary::from_paths(&paths, model.phases());
                println!("{}", serde_json::to_string(&summary)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transition { common, i, j, t } => {
            let cfg = resolve(&common)?;
            let chain = cfg.model.as_chain().ok_or_else(|| {
                Error::InvalidArgument("transition values need --model bd or qbd2".into())
            })?;
            let gen = build_generator(cfg.nu, cfg.levels, chain)?;
            let p = expm(&gen.dense(), t);
            let doc = match chain {
                spectral_markov::qbd::ChainModel::Bd => {
                    let km = km_transition_bd(cfg.nu, i, j, t)?;
                    let oracle = p[(i as usize, j as usize)];
                    json!({
                        "model": "bd", "i": i, "j": j, "t": t,
                        "km": km, "expm": oracle, "abs_diff": (km - oracle).abs(),
                    })
                }
                spectral_markov::qbd::ChainModel::Qbd2 => {
                    let km = km_transition_qbd2(cfg.nu, i, j, t)?;
                    let mut diff = 0.0f64;
                    let mut rows = Vec::new();
                    for r in 0..2 {
                        for c in 0..2 {
                            let oracle = p[(2 * i as usize + r, 2 * j as usize + c)];
                            diff = diff.max((km[(r, c)] - oracle).abs());
                            rows.push(json!({
                                "phase_from": r + 1, "phase_to": c + 1,
                                "km": km[(r, c)], "expm": oracle,
                            }));
                        }
                    }
                    json!({
                        "model": "qbd2", "i": i, "j": j, "t": t,
                        "entries": rows, "max_abs_diff": diff,
                    })
                }
            };
            emit(&common, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Density { common, t, x, grid } => {
            let cfg = resolve(&common)?;
            let label = cfg.model.as_diffusion().ok_or_else(|| {
                Error::InvalidArgument("density grids need a diffusion model".into())
            })?;
            let series = SpectralSeries::new(cfg.nu, label, cfg.tol)?;
            let phases = label.phases();
            let mut rows = Vec::new();
            for g in 1..=grid {
                let y = g as f64 / (grid + 1) as f64;
                let p = series.density(t, x, y)?;
                for pf in 0..phases {
                    for pt in 0..phases {
                        rows.push((t, x, y, pf as u32 + 1, pt as u32 + 1, p[(pf, pt)]));
                    }
                }
            }
            emit(&common, &io::density_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariant(common) => {
            let cfg = resolve(&common)?;
            match cfg.model {
                ModelKind::Bd => {
                    let pis =
                        spectral_markov::qbd::bd_potential_coefficients(cfg.nu, 30);
                    emit(&common, &format!("{}\n", json!({"pi": pis})))?;
                }
                ModelKind::Qbd2 => {
                    let blocks = invariant_measure(cfg.nu, 30)?;
                    emit(&common, &format!("{}\n", json!({"pi_blocks": blocks})))?;
                }
                ModelKind::L1Switch2 => {
                    let mut out = String::from("# schema: invariant-psi v1\ny,psi1,psi2\n");
                    let mut m1 = 0.0;
                    let mut m2 = 0.0;
                    let n = 199;
                    for g in 1..=n {
                        let y = g as f64 / (n + 1) as f64;
                        let p = invariant_psi(cfg.nu, y);
                        out.push_str(&format!("{y},{},{}\n", p.values[0], p.values[1]));
                        m1 += p.values[0] / (n + 1) as f64;
                        m2 += p.values[1] / (n + 1) as f64;
                    }
                    emit(&common, &out)?;
                    let (w1, w2) =
                        spectral_markov::diffusion::invariant_psi_masses(cfg.nu);
                    println!(
                        "{}",
                        json!({
                            "phase1_mass": w1, "phase2_mass": w2,
                            "grid_estimate": [m1, m2],
                            "positive_recurrent": cfg.nu >= 0.5,
                        })
                    );
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "invariant output exists for bd, qbd2 and l1-switch2".into(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify(common) => {
            let cfg = resolve(&common)?;
            let doc = if let Some(chain) = cfg.model.as_chain() {
                json!({
                    "model": cfg.model, "nu": cfg.nu,
                    "class": classify(cfg.nu, chain),
                })
            } else {
                let label = cfg.model.as_diffusion().expect("diffusion model");
                let model = build_model(cfg.nu, label)?;
                let mut verdicts = Vec::new();
                for phase in 1..=model.phases() {
                    let barrier = barrier_phase(label, phase);
                    let segments: Vec<((f64, f64), Side, &str)> = if barrier {
                        vec![
                            ((0.0, 0.5), Side::Lower, "0"),
                            ((0.0, 0.5), Side::Upper, "1/2-"),
                            ((0.5, 1.0), Side::Lower, "1/2+"),
                            ((0.5, 1.0), Side::Upper, "1"),
                        ]
                    } else {
                        vec![((0.0, 1.0), Side::Lower, "0"), ((0.0, 1.0), Side::Upper, "1")]
                    };
                    for (interval, side, name) in segments {
                        let drift = |y: f64| model.drift(phase, y);
                        let (class, integrals) = boundary_classify(drift, interval, side)?;
                        verdicts.push(json!({
                            "phase": phase,
                            "boundary": name,
                            "class": class,
                            "integrals": integrals,
                        }));
                    }
                }
                json!({ "model": cfg.model, "nu": cfg.nu, "boundaries": verdicts })
            };
            emit(&common, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { common, perturb } => {
            let cfg = resolve(&common)?;
            let reports = validate_model(
                cfg.model,
                ValidateOptions {
                    nu: cfg.nu,
                    perturb,
                },
            )?;
            emit(&common, &reports_to_jsonl(&reports)?)?;
            let all_green = reports.iter().all(|r| r.passed);
            Ok(if all_green {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// Phases whose drift has the interior `1/(1-2y)` barrier.
fn barrier_phase(label: spectral_markov::diffusion::ModelLabel, phase: usize) -> bool {
    use spectral_markov::diffusion::ModelLabel::*;
    matches!(
        (label, phase),
        (L1Switch2, 2) | (L2Switch3, 2) | (L2KillSwitch2, 1)
    )
}
