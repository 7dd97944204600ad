//! Command-line front end: configuration parsing, subcommand dispatch, and
//! machine-readable reports tying every output number to the condition that
//! produced it.
//!
//! Exit codes are stable: 0 for a decisive outcome, 1 for errors, 2 for an
//! indeterminate verdict.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use simma::catalog::canonical_models;
use simma::config::parse_config;
use simma::criteria::{
    evaluate, expected_bv_bound, verdict_from_report, zero_one_classify, CriteriaError,
    ExistenceStatus, MixedModel, VerdictStatus, ZeroOneReport,
};
use simma::identities::run_battery;
use simma::kernels::{Kernel, KernelPair};
use simma::noise::{LevyMeasure, NoiseComponent};
use simma::report::{to_pretty_json, write_levels_csv, Report};
use simma::simulate::{
    mc_expected_variation, sample_path_resolved, verify_l1_sandwich, zero_one_experiment,
    SimPlan, ZeroOneExperiment,
};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INDETERMINATE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "simma",
    about = "Finite-variation analysis and simulation of stationary increment mixed moving averages",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Model and plan configuration (JSON document).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here (stdout otherwise). Level tables also get
    /// a CSV sibling with the same stem.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the configured root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the configured replica count.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Override the dyadic level where a command takes one.
    #[arg(long, global = true)]
    level: Option<u32>,
    /// Scale factor on the identity-battery tolerances.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the criteria and report the finite-variation verdict.
    Check,
    /// Expected-variation bound for mean-zero finite-variation models.
    Bound,
    /// Simulate paths and report dyadic variation levels.
    Simulate,
    /// Monte Carlo estimates of the scaled mean increments per level.
    Mbv,
    /// Compare the mean increment against its analytic envelope.
    Sandwich,
    /// Zero-one-law classification, plus the finite-activity experiment.
    Zeroone {
        /// Use the built-in counterexample model (oscillating kernel with a
        /// unit-rate atom) instead of a configuration file.
        #[arg(long)]
        counterexample: bool,
        /// Level-growth ratio below which a path counts as bounded.
        #[arg(long, default_value_t = 1.25)]
        growth_threshold: f64,
    },
    /// Closed-form-versus-quadrature identity battery.
    Identities,
    /// Classify the canonical reference models.
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

struct Ctx {
    config_echo: serde_json::Value,
    model: MixedModel,
    plan: SimPlan,
}

fn load_ctx(cli: &Cli) -> Result<Ctx> {
    let path = cli
        .config
        .as_ref()
        .context("this command needs --config <path>")?;
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read configuration {}", path.display()))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.plan.seed = seed;
    }
    if let Some(replicas) = cli.replicas {
        config.plan.replicas = replicas;
    }
    if let Some(level) = cli.level {
        config.plan.n_max = level;
    }
    let model = config.model()?;
    let plan = config.sim_plan();
    let config_echo = config.resolved_value();
    Ok(Ctx { config_echo, model, plan })
}

fn emit<T: Serialize>(cli: &Cli, report: &Report<T>) -> Result<()> {
    let text = report.to_json();
    match &cli.out {
        Some(path) => fs::write(path, text + "\n")
            .with_context(|| format!("cannot write report {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_levels_csv(cli: &Cli, levels: &[(u32, f64, f64)]) -> Result<()> {
    if let Some(out) = &cli.out {
        let path: &Path = out.as_ref();
        let csv = path.with_extension("csv");
        let mut buf = Vec::new();
        write_levels_csv(&mut buf, levels)?;
        fs::write(&csv, buf).with_context(|| format!("cannot write {}", csv.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Check => check(&cli),
        Command::Bound => bound(&cli),
        Command::Simulate => simulate(&cli),
        Command::Mbv => mbv(&cli),
        Command::Sandwich => sandwich(&cli),
        Command::Zeroone { counterexample, growth_threshold } => {
            zeroone(&cli, *counterexample, *growth_threshold)
        }
        Command::Identities => identities(&cli),
        Command::Table => table(&cli),
    }
}

#[derive(Serialize)]
struct CheckResult {
    existence: simma::criteria::ExistenceReport,
    verdict: Option<simma::criteria::Verdict>,
    zero_one: ZeroOneReport,
}

fn check(cli: &Cli) -> Result<u8> {
    let ctx = load_ctx(cli)?;
    let report = evaluate(&ctx.model)?;
    let zero_one = zero_one_classify(&ctx.model);
    let existence = report.existence.clone();
    // Ratio-condition evidence as a CSV side table.
    if let Some(out) = &cli.out {
        let grid = simma::noise::UGrid::default();
        let us = grid.values();
        let series: Vec<(String, Vec<f64>)> = ctx
            .model
            .noise
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let vals = us
                    .iter()
                    .map(|&u| {
                        c.levy
                            .as_ref()
                            .and_then(|m| m.moment_ratio(u).ok())
                            .unwrap_or(f64::NAN)
                    })
                    .collect();
                (format!("moment_ratio_component_{i}"), vals)
            })
            .collect();
        let mut buf = Vec::new();
        simma::report::write_ugrid_csv(&mut buf, &us, &series)?;
        fs::write(out.with_extension("csv"), buf)?;
    }
    let (verdict, code) = if existence.status == ExistenceStatus::Exists {
        let v = verdict_from_report(report);
        let code = match v.status {
            VerdictStatus::Indeterminate => EXIT_INDETERMINATE,
            _ => EXIT_OK,
        };
        (Some(v), code)
    } else if existence.status == ExistenceStatus::Indeterminate {
        (None, EXIT_INDETERMINATE)
    } else {
        // A decisive non-existence finding.
        (None, EXIT_OK)
    };
    let result = CheckResult { existence, verdict, zero_one };
    emit(cli, &Report::new("check", ctx.plan.seed, ctx.config_echo, result))?;
    Ok(code)
}

#[derive(Serialize)]
struct BoundResult {
    bound: f64,
    c_f: simma::criteria::Evaluation,
    d_f: simma::criteria::Evaluation,
}

fn bound(cli: &Cli) -> Result<u8> {
    let ctx = load_ctx(cli)?;
    match expected_bv_bound(&ctx.model) {
        Ok(b) => {
            let report = evaluate(&ctx.model)?;
            let result = BoundResult { bound: b, c_f: report.c_f, d_f: report.d_f };
            emit(cli, &Report::new("bound", ctx.plan.seed, ctx.config_echo, result))?;
            Ok(EXIT_OK)
        }
        Err(CriteriaError::Precondition(msg)) if msg.contains("Indeterminate") => {
            eprintln!("indeterminate: {msg}");
            Ok(EXIT_INDETERMINATE)
        }
        Err(e) => bail!("bound refused: {e}"),
    }
}

#[derive(Serialize)]
struct SimulateResult {
    resolved_plan: simma::simulate::ResolvedPlan,
    levels: Vec<(u32, f64, f64)>,
    mean_residual_small_jump_variance: f64,
    mean_window_residual_bound: f64,
}

fn simulate(cli: &Cli) -> Result<u8> {
    let ctx = load_ctx(cli)?;
    let existence = evaluate(&ctx.model)?.existence;
    if existence.status != ExistenceStatus::Exists {
        bail!("cannot simulate: the defining integral does not exist ({:?})", existence.status);
    }
    let resolved = ctx.plan.resolve(&ctx.model)?;
    let replicas = ctx.plan.replicas;
    let n = resolved.n_max as usize;
    let mut level_samples = vec![Vec::with_capacity(replicas); n + 1];
    let mut res_var = 0.0;
    let mut res_window = 0.0;
    for r in 0..replicas {
        let sample = sample_path_resolved(&ctx.model, &resolved, r as u32)?;
        for (lvl, v) in sample.variation_levels.iter().enumerate() {
            level_samples[lvl].push(*v);
        }
        res_var += sample.diagnostics.residual_small_jump_variance;
        res_window += sample.diagnostics.window_residual_bound;
    }
    let levels: Vec<(u32, f64, f64)> = level_samples
        .iter()
        .enumerate()
        .map(|(lvl, xs)| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
                / (xs.len().max(2) - 1) as f64;
            (lvl as u32, m, (var / xs.len() as f64).sqrt())
        })
        .collect();
    emit_levels_csv(cli, &levels)?;
    let result = SimulateResult {
        resolved_plan: resolved,
        levels,
        mean_residual_small_jump_variance: res_var / replicas as f64,
        mean_window_residual_bound: res_window / replicas as f64,
    };
    emit(cli, &Report::new("simulate", ctx.plan.seed, ctx.config_echo, result))?;
    Ok(EXIT_OK)
}

fn mbv(cli: &Cli) -> Result<u8> {
    let ctx = load_ctx(cli)?;
    let level = cli.level.unwrap_or(8).min(ctx.plan.n_max);
    let est = mc_expected_variation(&ctx.model, &ctx.plan, level, ctx.plan.replicas)?;
    emit_levels_csv(cli, &est.per_level)?;
    emit(cli, &Report::new("mbv", ctx.plan.seed, ctx.config_echo, est))?;
    Ok(EXIT_OK)
}

fn sandwich(cli: &Cli) -> Result<u8> {
    let ctx = load_ctx(cli)?;
    let level = cli.level.unwrap_or(4);
    let rep = verify_l1_sandwich(&ctx.model, &ctx.plan, level, ctx.plan.replicas)?;
    let within = rep.within;
    emit(cli, &Report::new("sandwich", ctx.plan.seed, ctx.config_echo, rep))?;
    Ok(if within { EXIT_OK } else { EXIT_ERROR })
}

/// The configuration for which the one-interval law genuinely fails: a
/// continuous kernel oscillating on every subinterval, driven by unit-rate
/// unit jumps.
fn counterexample_model() -> MixedModel {
    MixedModel::single(
        NoiseComponent::jumps(1.0, LevyMeasure::finite_atoms(vec![(1.0, 1.0)]).unwrap()),
        KernelPair::moving_average(Kernel::weierstrass_bump(0.5, 13, 20).unwrap()),
    )
    .unwrap()
}

#[derive(Serialize)]
struct ZeroOneResult {
    classification: ZeroOneReport,
    experiment: Option<ZeroOneExperiment>,
}

fn zeroone(cli: &Cli, counterexample: bool, growth_threshold: f64) -> Result<u8> {
    let (model, plan, echo) = if counterexample {
        let plan = SimPlan {
            n_max: cli.level.unwrap_or(12),
            replicas: cli.replicas.unwrap_or(1000),
            seed: cli.seed.unwrap_or(simma::simulate::DEFAULT_SEED),
            ..SimPlan::default()
        };
        (counterexample_model(), plan, serde_json::json!("builtin: counterexample"))
    } else {
        let ctx = load_ctx(cli)?;
        (ctx.model, ctx.plan, ctx.config_echo)
    };
    let classification = zero_one_classify(&model);
    let finite_activity = model.noise.components.iter().all(|c| {
        c.sigma2 == 0.0 && matches!(c.levy, Some(LevyMeasure::FiniteAtoms { .. }) | None)
    });
    let experiment = if finite_activity {
        Some(zero_one_experiment(&model, &plan, plan.replicas, growth_threshold)?)
    } else {
        None
    };
    let result = ZeroOneResult { classification, experiment };
    emit(cli, &Report::new("zeroone", plan.seed, echo, result))?;
    Ok(EXIT_OK)
}

fn identities(cli: &Cli) -> Result<u8> {
    let checks = run_battery(cli.tol);
    let all_pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{} {}: rel error {:.3e} (tol {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.max_rel_error,
            c.tolerance
        );
    }
    match &cli.out {
        Some(path) => fs::write(path, to_pretty_json(&checks) + "\n")?,
        None => println!("{}", to_pretty_json(&checks)),
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_ERROR })
}

#[derive(Serialize)]
struct TableRow {
    name: String,
    status: VerdictStatus,
    justification: simma::criteria::TheoremTag,
    expected: VerdictStatus,
    matches: bool,
    note: String,
}

fn table(cli: &Cli) -> Result<u8> {
    let mut rows = Vec::new();
    let mut all_match = true;
    for entry in canonical_models() {
        let v = simma::criteria::verdict(&entry.model)?;
        let matches = v.status == entry.expected;
        all_match &= matches;
        eprintln!(
            "{} {:<46} -> {:?} [{:?}]",
            if matches { "PASS" } else { "FAIL" },
            entry.name,
            v.status,
            v.justification
        );
        rows.push(TableRow {
            name: entry.name.to_string(),
            status: v.status,
            justification: v.justification,
            expected: entry.expected,
            matches,
            note: entry.note.to_string(),
        });
    }
    match &cli.out {
        Some(path) => fs::write(path, to_pretty_json(&rows) + "\n")?,
        None => println!("{}", to_pretty_json(&rows)),
    }
    Ok(if all_match { EXIT_OK } else { EXIT_ERROR })
}
