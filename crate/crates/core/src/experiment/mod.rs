//! Monte Carlo experiment driver: configuration, per-trial execution,
//! shape sweeps, aggregation, and persistence.
//!
//! Everything is deterministic given the config and master seed: per-trial
//! seeds are `derive_seed(master_seed, [TRIAL, shape_index, trial_index])`,
//! trials may run on any number of worker threads, and records are
//! assembled in `(shape_index, trial_index)` order regardless of completion
//! order. Wall-clock timings are the one nondeterministic field; setting
//! `deterministic_timing` records them as zero so that emitted files are
//! byte-identical across runs.

pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{corollary1_bound, corollary2_bound, net_slack, theorem1_bound, BoundParams};
use crate::error::{Error, Result};
use crate::estimators::cover::{build_sphere_cover_capped, DEFAULT_COVER_POINT_CAP};
use crate::estimators::{certified_upper_bound, config_for_trial, power_iteration, PowerIterConfig};
use crate::models::ModelSpec;
use crate::rng::{derive_seed, tag};
use crate::tensor::Shape;

use report::{write_report, ReportFiles};

/// Environment variable supplying the default output directory; a config
/// value or CLI flag takes precedence.
pub const OUTPUT_DIR_ENV: &str = "SPECNORM_OUT_DIR";

pub const CONFIG_VERSION: u32 = 1;

/// One experiment: a model, a list of shapes, and a trial budget per shape.
///
/// Parsed from TOML with a mandatory `version` key; unknown keys are
/// rejected so a stored config replays exactly or not at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub master_seed: u64,
    pub trials: usize,
    pub delta: f64,
    pub model: ModelSpec,
    pub shapes: Vec<Shape>,
    #[serde(default)]
    pub estimator: PowerIterConfig,
    /// Enables net certification on every shape when set. All shapes must
    /// then fit under the enumeration cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Worker-thread cap; defaults to the rayon global pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Records wall times as zero so repeated runs emit identical bytes.
    #[serde(default)]
    pub deterministic_timing: bool,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} not supported, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta {} not in (0,1)", self.delta)));
        }
        if self.shapes.is_empty() {
            return Err(Error::Config("shapes must be nonempty".into()));
        }
        if self.shapes.iter().any(|s| s.order() == 0) {
            return Err(Error::Config("every shape needs at least one mode".into()));
        }
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.estimator.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(eps) = self.epsilon {
            for shape in &self.shapes {
                check_certifiable(shape, eps)?;
            }
        }
        Ok(())
    }
}

/// Verifies a shape stays under the net enumeration cap at radius `epsilon`.
fn check_certifiable(shape: &Shape, epsilon: f64) -> Result<()> {
    let pair = net_slack(shape.order(), epsilon).map_err(|e| Error::Config(e.to_string()))?;
    if pair.binomial >= 1.0 {
        return Err(Error::Config(format!(
            "epsilon {epsilon} gives slack {} >= 1 for shape {shape}",
            pair.binomial
        )));
    }
    let mut tuples: u128 = 1;
    for &n in shape.dims() {
        let cover = build_sphere_cover_capped(n, epsilon, DEFAULT_COVER_POINT_CAP)
            .map_err(|e| Error::Config(e.to_string()))?;
        tuples = tuples.saturating_mul(cover.len() as u128);
    }
    if tuples > crate::estimators::DEFAULT_ENUMERATION_CAP as u128 {
        return Err(Error::Config(format!(
            "shape {shape} needs {tuples} net tuples at epsilon {epsilon}, cap is {}",
            crate::estimators::DEFAULT_ENUMERATION_CAP
        )));
    }
    Ok(())
}

/// One Monte Carlo observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub shape: Shape,
    pub model: ModelSpec,
    pub seed: u64,
    /// Power-iteration estimate, a lower bound on the spectral norm.
    pub norm_lower: f64,
    /// Net-certificate upper bound, present when certification was enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_upper: Option<f64>,
    /// Closed-form bound at the model's base sigma and the experiment delta.
    pub bound_theorem1: f64,
    /// Model-specific corollary bound: the measurement bound for the
    /// measurement model, the sampling bound for the sampling model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_corollary: Option<f64>,
    pub wall_time_ms: u64,
}

/// A trial either produced a record or is kept as a failure marker so that
/// exclusions from the summary stay visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum TrialOutcome {
    Ok {
        #[serde(flatten)]
        record: TrialRecord,
    },
    Failed {
        shape: Shape,
        model: ModelSpec,
        seed: u64,
        error: String,
    },
}

impl TrialOutcome {
    pub fn record(&self) -> Option<&TrialRecord> {
        match self {
            TrialOutcome::Ok { record } => Some(record),
            TrialOutcome::Failed { .. } => None,
        }
    }

    pub fn shape(&self) -> &Shape {
        match self {
            TrialOutcome::Ok { record } => &record.shape,
            TrialOutcome::Failed { shape, .. } => shape,
        }
    }
}

/// Samples one tensor, estimates its norm, evaluates the bounds, and packs
/// the observation. Deterministic in `seed` except for `wall_time_ms`; the
/// estimator's own seed field is replaced by one derived from the trial
/// seed.
pub fn run_trial(
    shape: &Shape,
    model: &ModelSpec,
    estimator: &PowerIterConfig,
    delta: f64,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let tensor = model.sample(shape, seed)?;
    let cfg = config_for_trial(estimator, seed);
    let power = power_iteration(&tensor, &cfg)?;
    let norm_upper = match epsilon {
        Some(eps) => Some(certified_upper_bound(&tensor, eps)?.upper_bound),
        None => None,
    };
    let mut params = BoundParams::new(shape.clone(), model.sigma(), delta);
    if let Some(m) = model.measurement_count() {
        params = params.with_measurements(m);
    }
    let bound_theorem1 = theorem1_bound(&params)?.value;
    let bound_corollary = match model {
        ModelSpec::Iid { .. } => None,
        ModelSpec::Measurement { .. } => Some(corollary1_bound(&params)?.value),
        ModelSpec::Sampling { .. } => Some(corollary2_bound(&params)?.value),
    };
    Ok(TrialRecord {
        shape: shape.clone(),
        model: *model,
        seed,
        norm_lower: power.value,
        norm_upper,
        bound_theorem1,
        bound_corollary,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Per-shape aggregates of the successful trials. Statistics are absent
/// when every trial of the shape failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeAggregate {
    pub shape: Shape,
    pub sqrt_sum_dims: f64,
    pub trials_ok: usize,
    pub trials_failed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q95: Option<f64>,
    /// The model-appropriate closed-form bound for this shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// `q95 / bound`; expected in (0, 1] when the bound's preconditions
    /// hold. Values above 1 are reported as-is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Experiment-level aggregates: per-shape statistics plus the least-squares
/// fit of mean norm against `sqrt(sum_k n_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub version: u32,
    pub per_shape: Vec<ShapeAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<RegressionFit>,
    pub failed_trials: usize,
}

/// Nearest-rank quantile of ascending-sorted `values`: the element at rank
/// `ceil(q * len)` (1-based). Median and q95 both use this convention.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Aggregates outcomes into a [`ScalingSummary`]. Shapes appear in first
/// occurrence order, so a summary recomputed from re-read records matches
/// the original bit for bit.
pub fn summarize(outcomes: &[TrialOutcome]) -> Result<ScalingSummary> {
    if outcomes.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut order: Vec<&Shape> = Vec::new();
    for oc in outcomes {
        if !order.contains(&oc.shape()) {
            order.push(oc.shape());
        }
    }
    let mut per_shape = Vec::with_capacity(order.len());
    let mut failed_trials = 0usize;
    for shape in order {
        let records: Vec<&TrialRecord> = outcomes
            .iter()
            .filter(|oc| oc.shape() == shape)
            .filter_map(TrialOutcome::record)
            .collect();
        let failed = outcomes
            .iter()
            .filter(|oc| oc.shape() == shape && oc.record().is_none())
            .count();
        failed_trials += failed;
        let mut aggregate = ShapeAggregate {
            shape: shape.clone(),
            sqrt_sum_dims: (shape.sum_dims() as f64).sqrt(),
            trials_ok: records.len(),
            trials_failed: failed,
            mean: None,
            median: None,
            q95: None,
            bound: None,
            ratio: None,
        };
        if !records.is_empty() {
            let mut values: Vec<f64> = records.iter().map(|r| r.norm_lower).collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite norms"));
            let bound = records[0].bound_corollary.unwrap_or(records[0].bound_theorem1);
            let q95 = nearest_rank(&values, 0.95);
            aggregate.mean = Some(mean);
            aggregate.median = Some(nearest_rank(&values, 0.5));
            aggregate.q95 = Some(q95);
            aggregate.bound = Some(bound);
            aggregate.ratio = Some(q95 / bound);
        }
        per_shape.push(aggregate);
    }
    let points: Vec<(f64, f64)> = per_shape
        .iter()
        .filter_map(|a| a.mean.map(|m| (a.sqrt_sum_dims, m)))
        .collect();
    let regression = fit_line(&points);
    Ok(ScalingSummary {
        version: CONFIG_VERSION,
        per_shape,
        regression,
        failed_trials,
    })
}

fn fit_line(points: &[(f64, f64)]) -> Option<RegressionFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(RegressionFit { slope, intercept, r_squared })
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub outcomes: Vec<TrialOutcome>,
    pub summary: ScalingSummary,
    pub files: ReportFiles,
}

/// Runs `trials` trials per shape, aggregates, and persists records,
/// summary, and plot before returning. Individual trial failures are
/// recorded and do not abort the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.shapes.len())
        .flat_map(|si| (0..cfg.trials).map(move |ti| (si, ti)))
        .collect();
    let run_one = |&(si, ti): &(usize, usize)| -> TrialOutcome {
        let shape = &cfg.shapes[si];
        let seed = derive_seed(cfg.master_seed, &[tag::TRIAL, si as u64, ti as u64]);
        match run_trial(shape, &cfg.model, &cfg.estimator, cfg.delta, cfg.epsilon, seed) {
            Ok(record) => TrialOutcome::Ok { record },
            Err(e) => TrialOutcome::Failed {
                shape: shape.clone(),
                model: cfg.model,
                seed,
                error: format!("trial seed {seed}: {e}"),
            },
        }
    };
    let mut outcomes: Vec<TrialOutcome> = match cfg.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            pool.install(|| tasks.par_iter().map(run_one).collect())
        }
        None => tasks.par_iter().map(run_one).collect(),
    };
    if cfg.deterministic_timing {
        for oc in &mut outcomes {
            if let TrialOutcome::Ok { record } = oc {
                record.wall_time_ms = 0;
            }
        }
    }
    let summary = summarize(&outcomes)?;
    let dir = resolve_output_dir(cfg.output_dir.as_deref());
    let files = write_report(&outcomes, &summary, &dir)?;
    Ok(ExperimentOutput { outcomes, summary, files })
}

/// Output-directory precedence: explicit value (config or CLI flag), then
/// the `SPECNORM_OUT_DIR` environment variable, then `./specnorm-out`.
pub fn resolve_output_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(env) = std::env::var_os(OUTPUT_DIR_ENV) {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from("specnorm-out")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LawKind, SubGaussianLaw};
    use approx::assert_relative_eq;

    fn gaussian_spec() -> ModelSpec {
        ModelSpec::Iid { law: SubGaussianLaw::gaussian(1.0) }
    }

    fn base_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            version: 1,
            master_seed: 42,
            trials: 3,
            delta: 0.05,
            model: gaussian_spec(),
            shapes: vec![Shape::new(&[3, 3]).unwrap(), Shape::new(&[4, 4]).unwrap()],
            estimator: PowerIterConfig { restarts: 3, max_iters: 60, tol: 1e-9, seed: 0 },
            epsilon: None,
            output_dir: Some(dir.to_path_buf()),
            threads: Some(2),
            deterministic_timing: true,
        }
    }

    #[test]
    fn trial_is_deterministic_except_for_timing() {
        let shape = Shape::new(&[4, 4, 4]).unwrap();
        let est = PowerIterConfig { restarts: 3, max_iters: 50, tol: 1e-9, seed: 0 };
        let mut a = run_trial(&shape, &gaussian_spec(), &est, 0.05, None, 7).unwrap();
        let mut b = run_trial(&shape, &gaussian_spec(), &est, 0.05, None, 7).unwrap();
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a, b);
    }

    #[test]
    fn near_degenerate_sigma_yields_near_zero_norm() {
        let shape = Shape::new(&[5, 5]).unwrap();
        let est = PowerIterConfig { restarts: 2, max_iters: 30, tol: 1e-9, seed: 0 };
        let spec = ModelSpec::Iid { law: SubGaussianLaw { kind: LawKind::Gaussian, sigma: 1e-12 } };
        let record = run_trial(&shape, &spec, &est, 0.05, None, 1).unwrap();
        assert!(record.norm_lower <= 1e-9);
    }

    #[test]
    fn iid_trial_stays_under_its_bound() {
        let shape = Shape::new(&[10, 10, 10]).unwrap();
        let est = PowerIterConfig { restarts: 4, max_iters: 80, tol: 1e-9, seed: 0 };
        for seed in 0..5 {
            let r = run_trial(&shape, &gaussian_spec(), &est, 0.05, None, seed).unwrap();
            assert!(
                r.norm_lower <= r.bound_theorem1,
                "seed {seed}: {} above bound {}",
                r.norm_lower,
                r.bound_theorem1
            );
            assert!(r.bound_corollary.is_none());
        }
    }

    #[test]
    fn corollary_bounds_are_attached_per_model() {
        let shape = Shape::new(&[4, 4]).unwrap();
        let est = PowerIterConfig { restarts: 2, max_iters: 30, tol: 1e-8, seed: 0 };
        let meas = ModelSpec::Measurement {
            m: 16,
            entry_law: SubGaussianLaw::gaussian(1.0),
            coeff_sigma: 1.0,
        };
        let r = run_trial(&shape, &meas, &est, 0.05, None, 3).unwrap();
        assert!(r.bound_corollary.is_some());
        let samp = ModelSpec::Sampling { m: 8, value_law: SubGaussianLaw::rademacher(1.0) };
        let r = run_trial(&shape, &samp, &est, 0.05, None, 3).unwrap();
        // the sampling bound coincides with the theorem bound
        assert_eq!(r.bound_corollary, Some(r.bound_theorem1));
    }

    #[test]
    fn single_trial_summary_is_degenerate() {
        let shape = Shape::new(&[2, 2]).unwrap();
        let est = PowerIterConfig::default();
        let record = run_trial(&shape, &gaussian_spec(), &est, 0.1, None, 9).unwrap();
        let value = record.norm_lower;
        let summary = summarize(&[TrialOutcome::Ok { record }]).unwrap();
        assert_eq!(summary.per_shape.len(), 1);
        let agg = &summary.per_shape[0];
        assert_eq!(agg.trials_ok, 1);
        assert_eq!(agg.q95, Some(value));
        assert_eq!(agg.median, Some(value));
        assert_eq!(agg.mean, Some(value));
        assert!(summary.regression.is_none());
    }

    #[test]
    fn summarize_rejects_empty_input() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyRecords)));
    }

    #[test]
    fn nearest_rank_quantiles() {
        let values = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(nearest_rank(&values, 0.5), 2.0);
        assert_eq!(nearest_rank(&values, 0.95), 4.0);
        assert_eq!(nearest_rank(&values, 1.0), 4.0);
        let single = [7.0];
        assert_eq!(nearest_rank(&single, 0.95), 7.0);
    }

    #[test]
    fn experiment_is_deterministic_across_thread_counts() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = base_config(tmp.path());
        cfg.output_dir = Some(tmp.path().join("a"));
        cfg.threads = Some(1);
        let a = run_experiment(&cfg).unwrap();
        cfg.output_dir = Some(tmp.path().join("b"));
        cfg.threads = Some(4);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn failed_trials_are_recorded_and_excluded() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = base_config(tmp.path());
        // sampling 30 positions cannot work on the 3x3 shape but succeeds
        // on the 4x4 one
        cfg.model = ModelSpec::Sampling { m: 14, value_law: SubGaussianLaw::gaussian(1.0) };
        cfg.shapes = vec![Shape::new(&[3, 3]).unwrap(), Shape::new(&[4, 4]).unwrap()];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.summary.failed_trials, cfg.trials);
        let first = &out.summary.per_shape[0];
        assert_eq!(first.trials_failed, cfg.trials);
        assert_eq!(first.trials_ok, 0);
        assert!(first.mean.is_none());
        let second = &out.summary.per_shape[1];
        assert_eq!(second.trials_ok, cfg.trials);
        for oc in &out.outcomes {
            if let TrialOutcome::Failed { error, .. } = oc {
                assert!(error.contains("trial seed"));
            }
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let text = r#"
version = 1
master_seed = 7
trials = 2
delta = 0.05
shapes = [[2, 2], [3, 3]]
epsilon = 0.25
deterministic_timing = true

[model]
model = "iid"
law = { kind = "gaussian", sigma = 1.0 }

[estimator]
restarts = 4
max_iters = 50
tol = 1e-9
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.trials, 2);
        assert_eq!(cfg.shapes.len(), 2);
        assert_eq!(cfg.epsilon, Some(0.25));
        assert_eq!(cfg.estimator.restarts, 4);
        assert!(cfg.deterministic_timing);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        let unknown = r#"
version = 1
master_seed = 7
trials = 2
delta = 0.05
shapes = [[2, 2]]
surprise = true

[model]
model = "iid"
law = { kind = "gaussian", sigma = 1.0 }
"#;
        assert!(ExperimentConfig::from_toml_str(unknown).is_err());
        let wrong_version = unknown.replace("surprise = true", "").replace("version = 1", "version = 3");
        assert!(ExperimentConfig::from_toml_str(&wrong_version).is_err());
        let zero_trials = unknown.replace("surprise = true", "").replace("trials = 2", "trials = 0");
        assert!(ExperimentConfig::from_toml_str(&zero_trials).is_err());
    }

    #[test]
    fn config_rejects_uncertifiable_epsilon() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = base_config(tmp.path());
        cfg.shapes = vec![Shape::new(&[30, 30, 30]).unwrap()];
        cfg.epsilon = Some(0.14);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn certified_experiment_brackets_every_trial() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = base_config(tmp.path());
        cfg.shapes = vec![Shape::new(&[2, 2, 2]).unwrap()];
        cfg.epsilon = Some(crate::bounds::k0() / 3.0);
        let out = run_experiment(&cfg).unwrap();
        for oc in &out.outcomes {
            let r = oc.record().expect("no failures expected");
            let upper = r.norm_upper.expect("certification enabled");
            assert!(r.norm_lower <= upper);
        }
    }

    #[test]
    fn regression_fit_recovers_a_line() {
        let points = [(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)];
        let fit = fit_line(&points).unwrap();
        assert_relative_eq!(fit.slope, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept, 1.0, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn output_dir_resolution_precedence() {
        let explicit = resolve_output_dir(Some(Path::new("/tmp/custom")));
        assert_eq!(explicit, PathBuf::from("/tmp/custom"));
        // no explicit value: env or fallback; both acceptable here as the
        // env may be set by the harness, so just check it is nonempty
        assert!(!resolve_output_dir(None).as_os_str().is_empty());
    }
}
