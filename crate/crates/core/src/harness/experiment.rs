use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conditions::{
    check_coordinatewise_increasing, check_differentiable, check_score_function,
    check_sign_partition, AuditConfig, MonotonicityCheck, PartitionConfig, SignPartitionReport,
    ValidityReport, Verdict,
};
use crate::dominance::{staircase_frontier, PointSet, StaircaseFrontier};
use crate::error::{Error, Result};
use crate::gp::{optimize_hyperparams, GpModel, GpSpec, HyperOptConfig, HyperOptReport};
use crate::harness::problems::{builtin_problem, TestProblem};
use crate::io::{to_json_fixed, write_json_file};
use crate::kernel::SeKernelParams;
use crate::levelset::{
    directed_hausdorff, dominance_violation_depth, extract_zero_set, hausdorff, AxisBox, Chains,
    FrontierEstimate, ViolationWitness, DEFAULT_REFINE_TOL,
};
use crate::monotonic::{
    constraints_everywhere, fit_with_noise_prior, MonotonicConfig, MonotonicGpModel, MonotonicSpec,
    NoisePrior,
};
use crate::score::ScoreModel;
use crate::svm::{select_gamma_cv, train_ocsvm, GammaScore, OneClassSvmModel, SvmScore};

/// Smallest β used; smaller values (including 0) are raised to it.
pub const BETA_FLOOR: f64 = 1e-3;
pub const DEFAULT_BETA_SWEEP: [f64; 3] = [f64::INFINITY, 0.1, 0.01];
pub const DEFAULT_GAMMA_SWEEP: [f64; 4] = [1.0, 5.0, 6.0, 8.0];
/// Audited frontier vertices per experiment.
pub const AUDIT_SAMPLES: usize = 64;
/// Probe grid per axis for the sign-partition check.
pub const PROBE_GRID: usize = 50;
/// Grid per axis for the coordinatewise monotonicity scan.
pub const MONOTONE_GRID: usize = 50;
/// Violation depths at or below this are treated as discretization noise.
pub const DEPTH_TOL: f64 = 1e-6;
/// Thresholds for counting spurious near-zero grid points.
pub const NEAR_ZERO: f64 = 1e-2;
pub const STAIRCASE_BAND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    MonotonicGp,
    PlainGp,
    Ocsvm,
    Staircase,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotonic_gp" => Ok(Self::MonotonicGp),
            "plain_gp" => Ok(Self::PlainGp),
            "ocsvm" => Ok(Self::Ocsvm),
            "staircase" => Ok(Self::Staircase),
            _ => Err(Error::Parse(format!(
                "unknown model {s:?}; expected monotonic_gp, plain_gp, ocsvm or staircase"
            ))),
        }
    }
}

/// A built-in problem by name or a full inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Named(String),
    Inline(TestProblem),
}

impl ProblemRef {
    pub fn resolve(&self) -> Result<TestProblem> {
        match self {
            ProblemRef::Named(n) => builtin_problem(n),
            ProblemRef::Inline(p) => {
                p.validate()?;
                Ok(p.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Defaults to the problem's bounding box with a 20% margin.
    #[serde(default)]
    pub bbox: Option<AxisBox>,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            bbox: None,
            nx: 256,
            ny: 256,
        }
    }
}

fn default_beta() -> f64 {
    0.1
}
fn default_alpha() -> f64 {
    3.0
}
fn default_svm_nu() -> f64 {
    1e-3
}
fn default_restarts() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemRef,
    pub model: ModelKind,
    /// Inverse-gamma scale on the noise variance; `null` means no prior.
    #[serde(default = "default_beta", with = "crate::io::serde_f64_inf")]
    pub beta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// RBF width for the one-class SVM; chosen by cross-validation when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_svm_nu")]
    pub svm_nu: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Random restarts of the hyperparameter search.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

impl ExperimentConfig {
    pub fn new(problem: &str, model: ModelKind) -> Self {
        Self {
            problem: ProblemRef::Named(problem.to_string()),
            model,
            beta: default_beta(),
            alpha: default_alpha(),
            gamma: None,
            svm_nu: default_svm_nu(),
            seed: 0,
            grid: GridSpec::default(),
            output_dir: None,
            restarts: default_restarts(),
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_grid(mut self, nx: usize, ny: usize) -> Self {
        self.grid.nx = nx;
        self.grid.ny = ny;
        self
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// β actually used by the fit: the configured value raised to the floor.
    pub fn effective_beta(&self) -> f64 {
        self.beta.max(BETA_FLOOR)
    }

    pub fn label(&self) -> String {
        match self.model {
            ModelKind::MonotonicGp if self.beta.is_infinite() => "monotonic_gp(beta=inf)".into(),
            ModelKind::MonotonicGp => format!("monotonic_gp(beta={})", self.beta),
            ModelKind::Ocsvm => match self.gamma {
                Some(g) => format!("ocsvm(gamma={g})"),
                None => "ocsvm(gamma=cv)".into(),
            },
            ModelKind::PlainGp => "plain_gp".into(),
            ModelKind::Staircase => "staircase".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 || self.beta == 0.0) || !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need beta >= 0 and alpha > 0, got {} and {}",
                self.beta, self.alpha
            )));
        }
        if self.grid.nx < 8 || self.grid.ny < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 8x8, got {}x{}",
                self.grid.nx, self.grid.ny
            )));
        }
        Ok(())
    }
}

/// Serialized form of any fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "spec", rename_all = "snake_case")]
pub enum SavedModel {
    MonotonicGp(MonotonicSpec),
    PlainGp(GpSpec),
    Ocsvm(OneClassSvmModel),
    Staircase(PointSet),
}

impl SavedModel {
    pub fn load(self) -> Result<Fitted> {
        Ok(match self {
            SavedModel::MonotonicGp(s) => Fitted::MonotonicGp(MonotonicGpModel::from_spec(s)?),
            SavedModel::PlainGp(s) => Fitted::PlainGp(GpModel::from_spec(s)?),
            SavedModel::Ocsvm(m) => Fitted::Ocsvm(m),
            SavedModel::Staircase(p) => Fitted::Staircase(staircase_frontier(&p)?),
        })
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// A fitted model of any kind, usable as a score function. The one-class SVM
/// scores through its normalized decision value.
#[derive(Debug, Clone)]
pub enum Fitted {
    MonotonicGp(MonotonicGpModel),
    PlainGp(GpModel),
    Ocsvm(OneClassSvmModel),
    Staircase(StaircaseFrontier),
}

impl Fitted {
    pub fn save(&self) -> SavedModel {
        match self {
            Fitted::MonotonicGp(m) => SavedModel::MonotonicGp(m.spec().clone()),
            Fitted::PlainGp(m) => SavedModel::PlainGp(m.spec().clone()),
            Fitted::Ocsvm(m) => SavedModel::Ocsvm(m.clone()),
            Fitted::Staircase(s) => SavedModel::Staircase(s.points().clone()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Fitted::MonotonicGp(_) => ModelKind::MonotonicGp,
            Fitted::PlainGp(_) => ModelKind::PlainGp,
            Fitted::Ocsvm(_) => ModelKind::Ocsvm,
            Fitted::Staircase(_) => ModelKind::Staircase,
        }
    }

    /// Whether the model has a smooth analytic gradient.
    pub fn is_differentiable(&self) -> bool {
        !matches!(self, Fitted::Staircase(_))
    }
}

impl ScoreModel for Fitted {
    fn dim(&self) -> usize {
        match self {
            Fitted::MonotonicGp(m) => m.dim(),
            Fitted::PlainGp(m) => m.dim(),
            Fitted::Ocsvm(m) => SvmScore(m).dim(),
            Fitted::Staircase(s) => s.dim(),
        }
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        match self {
            Fitted::MonotonicGp(m) => m.value(y),
            Fitted::PlainGp(m) => m.value(y),
            Fitted::Ocsvm(m) => SvmScore(m).value(y),
            Fitted::Staircase(s) => s.value(y),
        }
    }

    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        match self {
            Fitted::MonotonicGp(m) => m.gradient(y),
            Fitted::PlainGp(m) => m.gradient(y),
            Fitted::Ocsvm(m) => SvmScore(m).gradient(y),
            Fitted::Staircase(s) => s.gradient(y),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub eta: Option<f64>,
    pub rho: Option<Vec<f64>>,
    pub noise_var: Option<f64>,
    pub gamma: Option<f64>,
    pub svm_nu: Option<f64>,
    pub svm_offset: Option<f64>,
    pub support_vectors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpSummary {
    pub converged: bool,
    pub sweeps: usize,
    pub skipped_updates: usize,
    pub final_damping: f64,
    pub log_evidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    /// No start reached the gradient tolerance.
    pub warning: bool,
    pub starts: usize,
}

impl From<&HyperOptReport> for OptimizerSummary {
    fn from(r: &HyperOptReport) -> Self {
        Self {
            objective: r.best.value,
            converged: r.best.converged,
            iterations: r.best.iterations,
            warning: r.warning,
            starts: r.starts.len(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitInfo {
    pub hyperparameters: Hyperparameters,
    pub ep: Option<EpSummary>,
    pub optimizer: Option<OptimizerSummary>,
    pub gamma_cv: Option<Vec<GammaScore>>,
}

fn gp_init(dim: usize) -> (SeKernelParams, f64) {
    (
        SeKernelParams::isotropic(1.0, 0.5, dim).expect("valid initial kernel"),
        0.01,
    )
}

fn opt_config(cfg: &ExperimentConfig) -> HyperOptConfig {
    HyperOptConfig {
        restarts: cfg.restarts,
        seed: cfg.seed,
        tie_rho: true,
        ..Default::default()
    }
}

/// Fits the configured model to the problem data.
pub fn fit_model(cfg: &ExperimentConfig, problem: &TestProblem) -> Result<(Fitted, FitInfo)> {
    let mut info = FitInfo::default();
    let fitted = match cfg.model {
        ModelKind::MonotonicGp => {
            let (inputs, targets) = problem.gp_training();
            let (params, noise) = gp_init(problem.dim());
            let prior = if cfg.beta.is_infinite() {
                NoisePrior::new(cfg.alpha, f64::INFINITY)?
            } else {
                NoisePrior::new(cfg.alpha, cfg.effective_beta())?
            };
            let mcfg = MonotonicConfig {
                noise_prior: Some(prior),
                ..Default::default()
            };
            let constraints = constraints_everywhere(&inputs);
            let (m, report) = fit_with_noise_prior(
                &inputs,
                &targets,
                &constraints,
                params,
                noise,
                &mcfg,
                Some(&opt_config(cfg)),
            )?;
            let st = m.ep_state();
            info.ep = Some(EpSummary {
                converged: st.converged,
                sweeps: st.iterations,
                skipped_updates: st.skipped_updates,
                final_damping: st.final_damping,
                log_evidence: m.log_evidence(),
            });
            info.optimizer = report.as_ref().map(OptimizerSummary::from);
            info.hyperparameters = Hyperparameters {
                eta: Some(m.params().eta),
                rho: Some(m.params().rho.clone()),
                noise_var: Some(m.noise_var()),
                ..Default::default()
            };
            Fitted::MonotonicGp(m)
        }
        ModelKind::PlainGp => {
            let (inputs, targets) = problem.gp_training();
            let (params, noise) = gp_init(problem.dim());
            let (m, report) =
                optimize_hyperparams(&inputs, &targets, &params, noise, &opt_config(cfg))?;
            info.optimizer = Some(OptimizerSummary::from(&report));
            info.hyperparameters = Hyperparameters {
                eta: Some(m.params().eta),
                rho: Some(m.params().rho.clone()),
                noise_var: Some(m.noise_var()),
                ..Default::default()
            };
            Fitted::PlainGp(m)
        }
        ModelKind::Ocsvm => {
            let data = problem.svm_training()?;
            let gamma = match cfg.gamma {
                Some(g) => g,
                None => {
                    let (g, scores) =
                        select_gamma_cv(&data, cfg.svm_nu, &DEFAULT_GAMMA_SWEEP, 5, cfg.seed)?;
                    info.gamma_cv = Some(scores);
                    g
                }
            };
            let m = train_ocsvm(&data, cfg.svm_nu, gamma)?;
            info.hyperparameters = Hyperparameters {
                gamma: Some(gamma),
                svm_nu: Some(cfg.svm_nu),
                svm_offset: Some(m.offset),
                support_vectors: Some(m.alphas.len()),
                ..Default::default()
            };
            Fitted::Ocsvm(m)
        }
        ModelKind::Staircase => Fitted::Staircase(staircase_frontier(problem.reference_samples())?),
    };
    Ok((fitted, info))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceSummary {
    pub depth: f64,
    pub witness: Option<ViolationWitness>,
}

/// All audit results for one frontier estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub score_function: ValidityReport,
    pub differentiable: Option<ValidityReport>,
    /// Absent when the frontier is empty.
    pub sign_partition: Option<SignPartitionReport>,
    pub coordinatewise: MonotonicityCheck,
    pub dominance: DominanceSummary,
    pub verdict: Verdict,
}

/// Evenly spaced subset of at most `n` frontier vertices.
pub fn audit_samples(frontier: &FrontierEstimate, n: usize) -> Result<PointSet> {
    let total = frontier.vertex_count();
    let step = total.div_ceil(n.max(1)).max(1);
    PointSet::from_rows(frontier.vertices().step_by(step).map(|p| p.to_vec()))
}

/// Runs every audit on `f` and its extracted frontier over `bbox`.
pub fn audit_frontier<F: ScoreModel + ?Sized>(
    f: &F,
    differentiable: bool,
    frontier: &FrontierEstimate,
    bbox: &AxisBox,
    seed: u64,
) -> Result<Validity> {
    let samples = audit_samples(frontier, AUDIT_SAMPLES)?;
    let acfg = AuditConfig {
        seed,
        ..Default::default()
    };
    let score_function = check_score_function(f, &samples, &acfg)?;
    let differentiable = if differentiable {
        Some(check_differentiable(f, &samples, &acfg)?)
    } else {
        None
    };
    let sign_partition = if frontier.is_empty() {
        None
    } else {
        let probes = PointSet::from_rows(
            bbox.grid2(PROBE_GRID, PROBE_GRID)
                .iter()
                .map(|p| p.to_vec()),
        )?;
        Some(check_sign_partition(
            f,
            frontier,
            &probes,
            &PartitionConfig::default(),
        )?)
    };
    let coordinatewise = check_coordinatewise_increasing(f, bbox, MONOTONE_GRID)?;
    let (depth, witness) = dominance_violation_depth(frontier);
    let partition_ok = sign_partition.as_ref().is_some_and(|r| r.ok);
    let verdict = if score_function.verdict == Verdict::Violated
        || depth > DEPTH_TOL
        || (sign_partition.is_some() && !partition_ok)
    {
        Verdict::Violated
    } else if score_function.verdict == Verdict::Valid && partition_ok {
        Verdict::Valid
    } else {
        Verdict::Inconclusive
    };
    Ok(Validity {
        score_function,
        differentiable,
        sign_partition,
        coordinatewise,
        dominance: DominanceSummary { depth, witness },
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub bbox: AxisBox,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub problem: String,
    pub model: ModelKind,
    #[serde(with = "crate::io::serde_f64_inf")]
    pub beta: f64,
    /// β after applying the floor; absent for models without a noise prior.
    pub effective_beta: Option<f64>,
    pub seed: u64,
    pub grid: GridRecord,
    pub fit: FitInfo,
    /// Symmetric Hausdorff distance between the frontier and the reference samples.
    pub hausdorff: Option<f64>,
    /// Largest distance from a reference sample to the frontier.
    pub sample_distance: Option<f64>,
    pub dominance_violation_depth: f64,
    pub violation_witness: Option<ViolationWitness>,
    pub component_count: usize,
    pub connected: bool,
    pub saddle_cells: usize,
    pub unrefined_vertices: usize,
    /// Grid points with `|f| < 0.01` farther than 0.1 from the reference staircase.
    pub spurious_zero_points: Option<usize>,
    pub score_function_verdict: Verdict,
    pub max_violation: f64,
    pub sign_partition_ok: bool,
    pub coordinatewise_increasing: bool,
    pub verdict: Verdict,
}

/// Everything one experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentArtifacts {
    /// Config with the grid box resolved.
    pub config: ExperimentConfig,
    pub problem: TestProblem,
    pub model: Fitted,
    pub frontier: FrontierEstimate,
    /// `(y1, y2, f)` row-major over the grid, first coordinate fastest.
    pub contour: Vec<[f64; 3]>,
    pub validity: Validity,
    pub metrics: Metrics,
}

/// Number of grid values with `|f| < NEAR_ZERO` farther than `STAIRCASE_BAND`
/// from the staircase through `reference`.
pub fn spurious_zero_points(
    contour: &[[f64; 3]],
    reference: &PointSet,
    bbox: &AxisBox,
) -> Result<usize> {
    let stairs = staircase_frontier(reference)?.polyline([bbox.hi[0], bbox.hi[1]])?;
    let chain = Chains(vec![stairs.iter().map(|p| p.to_vec()).collect()]);
    let mut count = 0;
    for c in contour {
        if c[2].abs() < NEAR_ZERO {
            let d = directed_hausdorff(&Chains(vec![vec![vec![c[0], c[1]]]]), &chain, 1.0)?;
            if d > STAIRCASE_BAND {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn fit_error(cfg: &ExperimentConfig, e: Error) -> Error {
    let config = serde_json::to_string(cfg).unwrap_or_else(|_| format!("{cfg:?}"));
    Error::FitFailed {
        config,
        source: Box::new(e),
    }
}

/// Fits, extracts, audits and measures one configuration. Artifacts are
/// written when the config names an output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentArtifacts> {
    cfg.validate()?;
    let problem = cfg.problem.resolve()?;
    if problem.dim() != 2 {
        return Err(Error::InvalidParameter(
            "experiments support two objectives only".into(),
        ));
    }
    let bbox = match &cfg.grid.bbox {
        Some(b) => b.clone(),
        None => problem.default_box()?,
    };
    let mut config = cfg.clone();
    config.grid.bbox = Some(bbox.clone());
    let (model, fit) = fit_model(cfg, &problem).map_err(|e| fit_error(cfg, e))?;

    let (nx, ny) = (cfg.grid.nx, cfg.grid.ny);
    let frontier = extract_zero_set(&model, &bbox, nx, ny, DEFAULT_REFINE_TOL)?;
    let mut contour = Vec::with_capacity(nx * ny);
    for p in bbox.grid2(nx, ny) {
        contour.push([p[0], p[1], model.value(&p)?]);
    }
    let validity = audit_frontier(
        &model,
        model.is_differentiable(),
        &frontier,
        &bbox,
        cfg.seed,
    )?;

    let reference = problem.reference_samples();
    let (hd, sample_distance) = if frontier.is_empty() {
        (None, None)
    } else {
        let step = frontier.cell_diagonal() / 4.0;
        let (a, b) = (Chains::from(&frontier), Chains::from(reference));
        (
            Some(hausdorff(&a, &b, step)?),
            Some(directed_hausdorff(&b, &a, step)?),
        )
    };
    let metrics = Metrics {
        problem: problem.name.clone(),
        model: cfg.model,
        beta: cfg.beta,
        effective_beta: (cfg.model == ModelKind::MonotonicGp && cfg.beta.is_finite())
            .then(|| cfg.effective_beta()),
        seed: cfg.seed,
        grid: GridRecord {
            bbox: bbox.clone(),
            nx,
            ny,
        },
        fit,
        hausdorff: hd,
        sample_distance,
        dominance_violation_depth: validity.dominance.depth,
        violation_witness: validity.dominance.witness,
        component_count: frontier.component_count,
        connected: frontier.component_count == 1,
        saddle_cells: frontier.diagnostics.saddle_cells,
        unrefined_vertices: frontier.diagnostics.unrefined_vertices,
        spurious_zero_points: Some(spurious_zero_points(&contour, reference, &bbox)?),
        score_function_verdict: validity.score_function.verdict,
        max_violation: validity.score_function.max_violation,
        sign_partition_ok: validity.sign_partition.as_ref().is_some_and(|r| r.ok),
        coordinatewise_increasing: validity.coordinatewise.increasing,
        verdict: validity.verdict,
    };
    let art = ExperimentArtifacts {
        config,
        problem,
        model,
        frontier,
        contour,
        validity,
        metrics,
    };
    if let Some(dir) = &cfg.output_dir {
        write_artifacts(&art, dir)?;
    }
    Ok(art)
}

/// Writes `frontier.csv`, `contour_grid.csv`, `validity.json`, `metrics.json`,
/// `config.json` and `model.json` into `dir`.
pub fn write_artifacts(art: &ExperimentArtifacts, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    art.frontier
        .write_csv(fs::File::create(dir.join("frontier.csv"))?)?;
    let mut wr = csv::Writer::from_path(dir.join("contour_grid.csv"))?;
    wr.write_record(["y1", "y2", "f"])?;
    for c in &art.contour {
        wr.write_record([c[0].to_string(), c[1].to_string(), c[2].to_string()])?;
    }
    wr.flush()?;
    write_json_file(&dir.join("validity.json"), &art.validity)?;
    write_json_file(&dir.join("metrics.json"), &art.metrics)?;
    let mut config = art.config.clone();
    config.output_dir = None;
    write_json_file(&dir.join("config.json"), &config)?;
    write_json_file(&dir.join("model.json"), &art.model.save())?;
    Ok(())
}

/// Serialized `metrics.json` contents.
pub fn metrics_json(m: &Metrics) -> Result<String> {
    to_json_fixed(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub model: ModelKind,
    #[serde(with = "crate::io::serde_f64_inf")]
    pub beta: f64,
    pub hyperparameters: Hyperparameters,
    pub hausdorff: Option<f64>,
    pub sample_distance: Option<f64>,
    pub violation_depth: f64,
    pub component_count: usize,
    pub sign_partition_ok: bool,
    pub verdict: Verdict,
    pub runtime_seconds: f64,
}

/// Runs every config (all on the same problem) and tabulates the results.
pub fn compare_models(configs: &[ExperimentConfig]) -> Result<Vec<ComparisonRow>> {
    if configs.len() < 2 {
        return Err(Error::InvalidParameter(
            "comparison needs at least two configs".into(),
        ));
    }
    let first = configs[0].problem.resolve()?;
    for c in &configs[1..] {
        if c.problem.resolve()? != first {
            return Err(Error::InvalidParameter(
                "all compared configs must use the same problem".into(),
            ));
        }
    }
    let mut rows = Vec::new();
    for c in configs {
        let start = Instant::now();
        let art = run_experiment(c)?;
        let m = &art.metrics;
        rows.push(ComparisonRow {
            label: c.label(),
            model: c.model,
            beta: c.beta,
            hyperparameters: m.fit.hyperparameters.clone(),
            hausdorff: m.hausdorff,
            sample_distance: m.sample_distance,
            violation_depth: m.dominance_violation_depth,
            component_count: m.component_count,
            sign_partition_ok: m.sign_partition_ok,
            verdict: m.verdict,
            runtime_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

fn opt_str(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `comparison.csv` and `comparison.json` into `dir`.
pub fn write_comparison(rows: &[ComparisonRow], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut wr = csv::Writer::from_path(dir.join("comparison.csv"))?;
    wr.write_record([
        "label",
        "model",
        "beta",
        "eta",
        "rho",
        "noise_var",
        "gamma",
        "hausdorff",
        "sample_distance",
        "violation_depth",
        "component_count",
        "sign_partition_ok",
        "verdict",
        "runtime_seconds",
    ])?;
    for r in rows {
        let h = &r.hyperparameters;
        wr.write_record([
            r.label.clone(),
            serde_json::to_value(r.model)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            r.beta.to_string(),
            opt_str(h.eta),
            h.rho
                .as_ref()
                .map(|v| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))
                .unwrap_or_default(),
            opt_str(h.noise_var),
            opt_str(h.gamma),
            opt_str(r.hausdorff),
            opt_str(r.sample_distance),
            r.violation_depth.to_string(),
            r.component_count.to_string(),
            r.sign_partition_ok.to_string(),
            serde_json::to_value(r.verdict)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            r.runtime_seconds.to_string(),
        ])?;
    }
    wr.flush()?;
    write_json_file(&dir.join("comparison.json"), rows)
}

/// The β sweep for a monotonic GP on one problem.
pub fn beta_sweep(problem: &str, betas: &[f64]) -> Vec<ExperimentConfig> {
    betas
        .iter()
        .map(|&b| ExperimentConfig::new(problem, ModelKind::MonotonicGp).with_beta(b))
        .collect()
}

/// Monotonic GP against one-class SVMs over the default γ sweep on the
/// discontinuous problem.
pub fn gp_vs_svm() -> Vec<ExperimentConfig> {
    let mut v = vec![ExperimentConfig::new(
        "discontinuous",
        ModelKind::MonotonicGp,
    )];
    v.extend(
        DEFAULT_GAMMA_SWEEP
            .iter()
            .map(|&g| ExperimentConfig::new("discontinuous", ModelKind::Ocsvm).with_gamma(g)),
    );
    v
}
