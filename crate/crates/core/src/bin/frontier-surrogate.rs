//! Command-line entry point for fitting, auditing and comparing frontier
//! surrogates.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frontier_surrogate::conditions::Verdict;
use frontier_surrogate::harness::{
    audit_frontier, beta_sweep, builtin_problems, compare_models, gp_vs_svm, run_experiment,
    write_comparison, ExperimentConfig, ModelKind, ProblemRef, SavedModel, DEFAULT_BETA_SWEEP,
};
use frontier_surrogate::io::{to_json_fixed, write_json_file};
use frontier_surrogate::levelset::{
    extract_zero_set, AxisBox, FrontierEstimate, DEFAULT_REFINE_TOL,
};
use frontier_surrogate::{Error, Result, ScoreModel};

const EXIT_FAILURE: u8 = 1;
const EXIT_FIT: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "frontier-surrogate",
    version,
    about = "Score-function surrogates for Pareto frontiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a problem and write all experiment artifacts.
    Fit(FitArgs),
    /// Audit a saved model against its extracted (or a given) frontier.
    Audit(AuditArgs),
    /// Extract the zero level set of a saved model.
    Levelset(LevelsetArgs),
    /// Run several configs on one problem and tabulate the results.
    Compare(CompareArgs),
    /// List the built-in problems.
    Problems(ProblemsArgs),
}

#[derive(Args, Clone)]
struct Overrides {
    /// Inverse-gamma scale on the noise variance (`inf` disables the prior).
    #[arg(long, value_parser = parse_beta)]
    beta: Option<f64>,
    /// RBF width of the one-class SVM.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid resolution, e.g. `256x256`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(b) = self.beta {
            c.beta = b;
        }
        if let Some(g) = self.gamma {
            c.gamma = Some(g);
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some((nx, ny)) = self.grid {
            c.grid.nx = nx;
            c.grid.ny = ny;
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem name; overrides the config.
    #[arg(long)]
    problem: Option<String>,
    /// monotonic_gp, plain_gp, ocsvm or staircase; overrides the config.
    #[arg(long)]
    model: Option<ModelKind>,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: PathBuf,
    /// Exit with status 3 when the audits find the frontier invalid.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct AuditArgs {
    /// Saved model (`model.json`).
    #[arg(long)]
    model: PathBuf,
    /// Frontier to audit (`frontier.csv`); extracted from the model when absent.
    #[arg(long)]
    frontier: Option<PathBuf>,
    /// Resolved experiment config supplying box, grid and seed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Audit box as `lo1,lo2,hi1,hi2`.
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    r#box: Option<AxisBox>,
    #[command(flatten)]
    overrides: Overrides,
    /// Directory for `validity.json`; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct LevelsetArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    r#box: AxisBox,
    #[arg(long, value_parser = parse_grid, default_value = "256x256")]
    grid: (usize, usize),
    /// Directory for `frontier.csv` and `frontier.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Experiment configs (JSON), at least two.
    #[arg(long = "config")]
    configs: Vec<PathBuf>,
    /// `gp-vs-svm` (discontinuous problem) or `beta-sweep` (needs --problem).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
    /// Directory for `comparison.csv`, `comparison.json` and one subdirectory per config.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProblemsArgs {
    /// Print full problem definitions instead of a summary.
    #[arg(long)]
    json: bool,
}

fn parse_beta(s: &str) -> std::result::Result<f64, String> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        v => v.parse::<f64>().map_err(|e| e.to_string()).and_then(|b| {
            if b >= 0.0 {
                Ok(b)
            } else {
                Err("beta must be non-negative".into())
            }
        }),
    }
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or("expected NXxNY, e.g. 256x256")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_box(s: &str) -> std::result::Result<AxisBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if v.len() != 4 {
        return Err("expected lo1,lo2,hi1,hi2".into());
    }
    AxisBox::new(vec![v[0], v[1]], vec![v[2], v[3]]).map_err(|e| e.to_string())
}

fn verdict_exit(verdict: Verdict, strict: bool) -> u8 {
    if strict && verdict != Verdict::Valid {
        EXIT_INVALID
    } else {
        0
    }
}

fn fit(a: FitArgs) -> Result<u8> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_json_file(p)?,
        None => {
            let problem = a
                .problem
                .clone()
                .ok_or_else(|| Error::InvalidParameter("fit needs --config or --problem".into()))?;
            let model = a
                .model
                .ok_or_else(|| Error::InvalidParameter("fit needs --config or --model".into()))?;
            ExperimentConfig::new(&problem, model)
        }
    };
    if let Some(p) = a.problem {
        cfg.problem = ProblemRef::Named(p);
    }
    if let Some(m) = a.model {
        cfg.model = m;
    }
    a.overrides.apply(&mut cfg);
    cfg.output_dir = Some(a.out.clone());
    let art = run_experiment(&cfg)?;
    let m = &art.metrics;
    println!(
        "{} on {}: {} component(s), violation depth {:.4}, verdict {:?}; artifacts in {}",
        cfg.label(),
        m.problem,
        m.component_count,
        m.dominance_violation_depth,
        m.verdict,
        a.out.display()
    );
    Ok(verdict_exit(m.verdict, a.strict))
}

fn audit(a: AuditArgs) -> Result<u8> {
    let model = SavedModel::from_json_file(&a.model)?.load()?;
    let mut cfg = match &a.config {
        Some(p) => Some(ExperimentConfig::from_json_file(p)?),
        None => None,
    };
    if let Some(c) = cfg.as_mut() {
        a.overrides.apply(c);
    }
    let bbox = a
        .r#box
        .or_else(|| cfg.as_ref().and_then(|c| c.grid.bbox.clone()))
        .ok_or_else(|| {
            Error::InvalidParameter("audit needs --box or a config with a resolved grid box".into())
        })?;
    let (nx, ny) = a
        .overrides
        .grid
        .or(cfg.as_ref().map(|c| (c.grid.nx, c.grid.ny)))
        .unwrap_or((256, 256));
    let seed = a
        .overrides
        .seed
        .or(cfg.as_ref().map(|c| c.seed))
        .unwrap_or(0);
    let frontier = match &a.frontier {
        Some(p) => FrontierEstimate::read_csv(std::fs::File::open(p)?)?,
        None => extract_zero_set(&model, &bbox, nx, ny, DEFAULT_REFINE_TOL)?,
    };
    let validity = audit_frontier(&model, model.is_differentiable(), &frontier, &bbox, seed)?;
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            write_json_file(&dir.join("validity.json"), &validity)?;
            println!(
                "verdict {:?}, violation depth {:.4}",
                validity.verdict, validity.dominance.depth
            );
        }
        None => println!("{}", to_json_fixed(&validity)?),
    }
    Ok(verdict_exit(validity.verdict, a.strict))
}

fn levelset(a: LevelsetArgs) -> Result<u8> {
    let model = SavedModel::from_json_file(&a.model)?.load()?;
    if model.dim() != 2 {
        return Err(Error::InvalidParameter(
            "level sets need two objectives".into(),
        ));
    }
    let e = extract_zero_set(&model, &a.r#box, a.grid.0, a.grid.1, DEFAULT_REFINE_TOL)?;
    std::fs::create_dir_all(&a.out)?;
    e.write_csv(std::fs::File::create(a.out.join("frontier.csv"))?)?;
    write_json_file(&a.out.join("frontier.json"), &e)?;
    match &e.diagnostics.message {
        Some(msg) => println!("empty level set: {msg}"),
        None => println!(
            "{} component(s), {} vertices",
            e.component_count,
            e.vertex_count()
        ),
    }
    Ok(0)
}

fn subdir(out: &Path, i: usize, c: &ExperimentConfig) -> PathBuf {
    let label: String = c
        .label()
        .chars()
        .map(|ch| {
            if ch.is_ascii_alphanumeric() || ch == '.' {
                ch
            } else {
                '_'
            }
        })
        .collect();
    out.join(format!("{i:02}_{}", label.trim_matches('_')))
}

fn compare(a: CompareArgs) -> Result<u8> {
    let mut configs = match a.preset.as_deref() {
        Some("gp-vs-svm") => gp_vs_svm(),
        Some("beta-sweep") => {
            let p = a
                .problem
                .clone()
                .ok_or_else(|| Error::InvalidParameter("beta-sweep needs --problem".into()))?;
            beta_sweep(&p, &DEFAULT_BETA_SWEEP)
        }
        Some(other) => return Err(Error::InvalidParameter(format!("unknown preset {other:?}"))),
        None => Vec::new(),
    };
    for p in &a.configs {
        configs.push(ExperimentConfig::from_json_file(p)?);
    }
    for (i, c) in configs.iter_mut().enumerate() {
        a.overrides.apply(c);
        c.output_dir = Some(subdir(&a.out, i, c));
    }
    let rows = compare_models(&configs)?;
    write_comparison(&rows, &a.out)?;
    for r in &rows {
        println!(
            "{:<28} hausdorff {:>8} violation {:.4} partition {:<5} verdict {:?}",
            r.label,
            r.hausdorff.map_or("-".into(), |h| format!("{h:.4}")),
            r.violation_depth,
            r.sign_partition_ok,
            r.verdict
        );
    }
    Ok(0)
}

fn problems(a: ProblemsArgs) -> Result<u8> {
    let all = builtin_problems();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&all)?);
    } else {
        for p in &all {
            println!(
                "{:<14} {:?}: {} frontier point(s), {} anchor(s), {} data point(s)",
                p.name,
                p.kind,
                p.frontier_points.len(),
                p.anchor_points.len(),
                p.grid_points()?.len()
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Audit(a) => audit(a),
        Command::Levelset(a) => levelset(a),
        Command::Compare(a) => compare(a),
        Command::Problems(a) => problems(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::FitFailed { .. }) {
                EXIT_FIT
            } else {
                EXIT_FAILURE
            })
        }
    }
}
