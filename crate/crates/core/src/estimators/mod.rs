//! Spectral-norm estimators: a multi-restart higher-order power iteration
//! for the lower bound and a constructive epsilon-net certificate for the
//! upper bound.

pub mod cover;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, tag};
use crate::tensor::{
    mode_collapse, multilinear_eval, random_unit_vector, DenseTensor, UnitTuple,
};

pub use cover::{
    build_sphere_cover, build_sphere_cover_capped, certified_upper_bound,
    certified_upper_bound_capped, max_cover_gap, NetCertificate, DEFAULT_COVER_POINT_CAP,
    DEFAULT_ENUMERATION_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerIterConfig {
    /// Number of independent starts. The first start is the deterministic
    /// maximum-entry basis tuple; the rest are uniform on the spheres, each
    /// from its own `(seed, restart)` stream.
    pub restarts: usize,
    /// Sweep budget per restart.
    pub max_iters: usize,
    /// Relative-change threshold on the objective, in (0, 1). The objective
    /// is used rather than the vectors because sign flips under odd
    /// contractions make vector-based criteria noisy.
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for PowerIterConfig {
    fn default() -> Self {
        PowerIterConfig { restarts: 16, max_iters: 200, tol: 1e-10, seed: 0 }
    }
}

impl PowerIterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Outcome of a power-iteration run. `value` is a certified lower bound on
/// the spectral norm: it equals `|X(argmax)|` at a valid unit tuple.
#[derive(Debug, Clone)]
pub struct PowerIterResult {
    pub value: f64,
    pub argmax: UnitTuple,
    /// Sweeps used by the winning restart.
    pub iterations_used: usize,
    /// Whether the winning restart met the tolerance before its budget.
    pub converged: bool,
    /// Best objective reached by each restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Objective after each sweep for every restart (index 0 is the value at
    /// the starting tuple); used to audit monotone ascent.
    pub restart_histories: Vec<Vec<f64>>,
}

struct RestartOutcome {
    value: f64,
    tuple: UnitTuple,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

/// Maximizes `|X(u_1, ..., u_K)|` by cyclic rank-one updates: each step sets
/// `u_k` to the normalized collapse of `X` against the other vectors, which
/// never decreases the objective. The best restart wins; on exact ties the
/// lowest restart index is kept.
pub fn power_iteration(x: &DenseTensor, cfg: &PowerIterConfig) -> Result<PowerIterResult> {
    cfg.validate()?;
    if x.order() == 0 {
        return Err(Error::InvalidParameter(
            "power iteration needs a tensor with at least one mode".into(),
        ));
    }
    if x.frobenius_norm() == 0.0 {
        let idx = vec![0usize; x.order()];
        return Ok(PowerIterResult {
            value: 0.0,
            argmax: UnitTuple::basis(x.shape(), &idx)?,
            iterations_used: 0,
            converged: true,
            restart_values: vec![0.0; cfg.restarts],
            restart_histories: vec![Vec::new(); cfg.restarts],
        });
    }

    let mut best: Option<RestartOutcome> = None;
    let mut restart_values = Vec::with_capacity(cfg.restarts);
    let mut restart_histories = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let start = if restart == 0 {
            let (flat, _) = x.max_abs_entry();
            UnitTuple::basis(x.shape(), &x.shape().multi_index(flat))?
        } else {
            let mut rng = stream_rng(cfg.seed, &[tag::POWER_RESTART, restart as u64]);
            UnitTuple::random(x.shape(), &mut rng)
        };
        let outcome = run_restart(x, start, cfg, restart)?;
        restart_values.push(outcome.value);
        restart_histories.push(outcome.history.clone());
        let better = match &best {
            None => true,
            Some(b) => outcome.value > b.value,
        };
        if better {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    Ok(PowerIterResult {
        value: best.value,
        argmax: best.tuple,
        iterations_used: best.iterations,
        converged: best.converged,
        restart_values,
        restart_histories,
    })
}

fn run_restart(
    x: &DenseTensor,
    mut tuple: UnitTuple,
    cfg: &PowerIterConfig,
    restart: usize,
) -> Result<RestartOutcome> {
    let order = x.order();
    let mut objective = multilinear_eval(x, &tuple)?.abs();
    let mut history = vec![objective];
    let mut iterations = 0;
    let mut converged = false;
    let mut degenerate_recently = false;
    for sweep in 1..=cfg.max_iters {
        iterations = sweep;
        degenerate_recently = false;
        for k in 0..order {
            let w = collapse_all_but(x, &tuple, k)?;
            let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                // The current tuple annihilates the tensor in this mode;
                // restart the vector from a rescue stream and keep going.
                let mut rng = stream_rng(
                    cfg.seed,
                    &[tag::POWER_RESCUE, restart as u64, sweep as u64, k as u64],
                );
                tuple.set_vector(k, random_unit_vector(x.shape().dim(k), &mut rng));
                degenerate_recently = true;
                continue;
            }
            tuple.set_vector(k, w.iter().map(|c| c / norm).collect());
        }
        let value = multilinear_eval(x, &tuple)?.abs();
        history.push(value);
        let rel_change = (value - objective).abs() / value.abs().max(f64::MIN_POSITIVE);
        objective = value;
        if rel_change < cfg.tol && !degenerate_recently {
            converged = true;
            break;
        }
    }
    if degenerate_recently {
        converged = false;
    }
    Ok(RestartOutcome { value: objective, tuple, iterations, converged, history })
}

/// Contracts every mode of `x` except `keep` against the tuple, yielding the
/// gradient vector of the multilinear form in mode `keep`. Modes are
/// collapsed largest-first to keep intermediates small.
fn collapse_all_but(x: &DenseTensor, tuple: &UnitTuple, keep: usize) -> Result<Vec<f64>> {
    let mut remaining: Vec<usize> = (0..x.order()).collect();
    let mut cur: Option<DenseTensor> = None;
    while remaining.len() > 1 {
        let t = cur.as_ref().unwrap_or(x);
        let mut pick = usize::MAX;
        for (p, &orig) in remaining.iter().enumerate() {
            if orig == keep {
                continue;
            }
            if pick == usize::MAX || t.shape().dim(p) > t.shape().dim(pick) {
                pick = p;
            }
        }
        let orig = remaining.remove(pick);
        cur = Some(mode_collapse(t, pick, tuple.vector(orig))?);
    }
    debug_assert_eq!(remaining, vec![keep]);
    Ok(match cur {
        Some(t) => t.entries().to_vec(),
        None => x.entries().to_vec(),
    })
}

/// Two-sided bracket on the spectral norm: the power-iteration value from
/// below and the net certificate from above.
#[derive(Debug, Clone)]
pub struct SpectralBracket {
    pub lower: f64,
    pub upper: f64,
    pub power: PowerIterResult,
    pub certificate: NetCertificate,
}

pub fn spectral_norm_bracket(
    x: &DenseTensor,
    cfg: &PowerIterConfig,
    epsilon: f64,
) -> Result<SpectralBracket> {
    let power = power_iteration(x, cfg)?;
    let certificate = certified_upper_bound(x, epsilon)?;
    Ok(SpectralBracket {
        lower: power.value,
        upper: certificate.upper_bound,
        power,
        certificate,
    })
}

/// Derives a per-trial estimator configuration from a trial seed.
pub fn config_for_trial(base: &PowerIterConfig, trial_seed: u64) -> PowerIterConfig {
    PowerIterConfig {
        seed: derive_seed(trial_seed, &[tag::TRIAL_ESTIMATOR]),
        ..*base
    }
}
