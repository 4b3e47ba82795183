//! Seeded samplers for the three random-tensor models, each exposing its
//! sub-Gaussian variance proxy.
//!
//! Model descriptions serialize to/from a JSON object
//! `{"model": "iid" | "measurement" | "sampling", <params>, "seed": <u64>}`
//! (schema version 1). Every sampler is a pure function of its parameters
//! and seed: draws come from per-object streams derived via
//! [`crate::rng::derive_seed`], so concurrent sampling is reproducible.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, tag};
use crate::tensor::{multilinear_eval, DenseTensor, Shape, UnitTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Gaussian,
    Rademacher,
    Uniform,
}

/// Zero-mean scalar law with a declared sub-Gaussian variance proxy `sigma`:
/// `E[exp(tX)] <= exp(sigma^2 t^2 / 2)` for all `t`.
///
/// - `gaussian`: `N(0, sigma^2)`; the proxy is exact.
/// - `rademacher`: `+sigma` or `-sigma` equiprobably.
/// - `uniform`: `Uniform[-sigma, sigma]`; the proxy is the support
///   half-width, valid by Hoeffding's lemma but conservative (the tight
///   proxy would be `sigma / sqrt(3)`).
///
/// Draws are standardized-then-scaled: the underlying stream produces a
/// proxy-1 variate which is multiplied by `sigma`, so rescaling `sigma`
/// rescales a fixed stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubGaussianLaw {
    pub kind: LawKind,
    pub sigma: f64,
}

impl SubGaussianLaw {
    pub fn gaussian(sigma: f64) -> Self {
        SubGaussianLaw { kind: LawKind::Gaussian, sigma }
    }

    pub fn rademacher(sigma: f64) -> Self {
        SubGaussianLaw { kind: LawKind::Rademacher, sigma }
    }

    pub fn uniform(sigma: f64) -> Self {
        SubGaussianLaw { kind: LawKind::Uniform, sigma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sub-Gaussian proxy sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// One draw: `sigma` times a standardized (proxy-1) variate.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let standardized = match self.kind {
            LawKind::Gaussian => StandardNormal.sample(rng),
            LawKind::Rademacher => {
                if rng.random::<u64>() & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            LawKind::Uniform => rng.random_range(-1.0..=1.0),
        };
        self.sigma * standardized
    }
}

impl std::fmt::Display for LawKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LawKind::Gaussian => write!(f, "gaussian"),
            LawKind::Rademacher => write!(f, "rademacher"),
            LawKind::Uniform => write!(f, "uniform"),
        }
    }
}

/// Measurement-sum model: `X = sum_{j=1}^{M} eps_j W_j` with proxy-1 entry
/// tensors `W_j` and coefficients `eps_j` of proxy `coeff_sigma`. The
/// coefficients are drawn Gaussian; the entry law's kind is configurable but
/// its proxy must be exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementModel {
    pub m: usize,
    pub entry_law: SubGaussianLaw,
    pub coeff_sigma: f64,
}

impl MeasurementModel {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("measurement count m must be >= 1".into()));
        }
        self.entry_law.validate()?;
        if self.entry_law.sigma != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "measurement entry law must have proxy 1, got {}",
                self.entry_law.sigma
            )));
        }
        if !(self.coeff_sigma > 0.0 && self.coeff_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coeff_sigma must be positive and finite, got {}",
                self.coeff_sigma
            )));
        }
        Ok(())
    }
}

/// Sparse model: exactly `m` positions chosen uniformly without replacement,
/// each holding an independent draw from `value_law`; all other entries are
/// exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingModel {
    pub m: usize,
    pub value_law: SubGaussianLaw,
}

impl SamplingModel {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("sample count m must be >= 1".into()));
        }
        self.value_law.validate()
    }
}

/// Which of the three models generates a tensor, minus the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Iid { law: SubGaussianLaw },
    Measurement { m: usize, entry_law: SubGaussianLaw, coeff_sigma: f64 },
    Sampling { m: usize, value_law: SubGaussianLaw },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Iid { law } => law.validate(),
            ModelSpec::Measurement { m, entry_law, coeff_sigma } => {
                MeasurementModel { m, entry_law, coeff_sigma }.validate()
            }
            ModelSpec::Sampling { m, value_law } => SamplingModel { m, value_law }.validate(),
        }
    }

    /// The model's base sub-Gaussian parameter: the entry proxy for `iid`,
    /// the coefficient proxy for the other two.
    pub fn sigma(&self) -> f64 {
        match *self {
            ModelSpec::Iid { law } => law.sigma,
            ModelSpec::Measurement { coeff_sigma, .. } => coeff_sigma,
            ModelSpec::Sampling { value_law, .. } => value_law.sigma,
        }
    }

    pub fn measurement_count(&self) -> Option<usize> {
        match *self {
            ModelSpec::Iid { .. } => None,
            ModelSpec::Measurement { m, .. } | ModelSpec::Sampling { m, .. } => Some(m),
        }
    }

    /// Samples a tensor of the given shape. For measurement and sampling
    /// models the extra outputs (coefficients, positions) are dropped.
    pub fn sample(&self, shape: &Shape, seed: u64) -> Result<DenseTensor> {
        match *self {
            ModelSpec::Iid { law } => sample_iid(shape, &law, seed),
            ModelSpec::Measurement { m, entry_law, coeff_sigma } => {
                let model = MeasurementModel { m, entry_law, coeff_sigma };
                Ok(sample_measurement_model(shape, &model, seed)?.0)
            }
            ModelSpec::Sampling { m, value_law } => {
                let model = SamplingModel { m, value_law };
                Ok(sample_without_replacement(shape, &model, seed)?.0)
            }
        }
    }

    /// Compact single-token rendering used in CSV output; never contains a
    /// semicolon.
    pub fn csv_token(&self) -> String {
        match *self {
            ModelSpec::Iid { law } => format!("iid({},sigma={})", law.kind, law.sigma),
            ModelSpec::Measurement { m, entry_law, coeff_sigma } => {
                format!("measurement(entry={},coeff_sigma={},m={})", entry_law.kind, coeff_sigma, m)
            }
            ModelSpec::Sampling { m, value_law } => {
                format!("sampling(value={},sigma={},m={})", value_law.kind, value_law.sigma, m)
            }
        }
    }
}

/// A model spec plus the seed that realizes it; the unit of the JSON model
/// interchange format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    #[serde(flatten)]
    pub spec: ModelSpec,
    pub seed: u64,
}

impl RandomModel {
    pub fn sample(&self, shape: &Shape) -> Result<DenseTensor> {
        self.spec.sample(shape, self.seed)
    }
}

/// Tensor with i.i.d. entries from `law`; deterministic in
/// `(shape, law, seed)`.
pub fn sample_iid(shape: &Shape, law: &SubGaussianLaw, seed: u64) -> Result<DenseTensor> {
    law.validate()?;
    require_ambient(shape)?;
    let mut rng = stream_rng(seed, &[tag::IID_ENTRIES]);
    let entries = (0..shape.total_size()).map(|_| law.sample(&mut rng)).collect();
    DenseTensor::new(shape.clone(), entries)
}

/// `X = sum_j coeffs[j] * W_j` for externally supplied coefficients; each
/// `W_j` has i.i.d. `entry_law` entries from the stream
/// `(seed, MEASUREMENT_ENTRIES, j)`.
pub fn sample_measurement_given_coeffs(
    shape: &Shape,
    entry_law: &SubGaussianLaw,
    coeffs: &[f64],
    seed: u64,
) -> Result<DenseTensor> {
    entry_law.validate()?;
    require_ambient(shape)?;
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("need at least one coefficient".into()));
    }
    let mut entries = vec![0.0; shape.total_size()];
    for (j, &c) in coeffs.iter().enumerate() {
        let mut rng = stream_rng(seed, &[tag::MEASUREMENT_ENTRIES, j as u64]);
        for slot in entries.iter_mut() {
            *slot += c * entry_law.sample(&mut rng);
        }
    }
    DenseTensor::new(shape.clone(), entries)
}

/// Draws Gaussian coefficients of proxy `coeff_sigma` and the proxy-1 entry
/// tensors, returning the measurement-sum tensor together with the realized
/// coefficient vector.
pub fn sample_measurement_model(
    shape: &Shape,
    model: &MeasurementModel,
    seed: u64,
) -> Result<(DenseTensor, Vec<f64>)> {
    model.validate()?;
    require_ambient(shape)?;
    let mut coeff_rng = stream_rng(seed, &[tag::MEASUREMENT_COEFFS]);
    let coeffs: Vec<f64> = (0..model.m)
        .map(|_| {
            let standardized: f64 = StandardNormal.sample(&mut coeff_rng);
            model.coeff_sigma * standardized
        })
        .collect();
    let x = sample_measurement_given_coeffs(shape, &model.entry_law, &coeffs, seed)?;
    Ok((x, coeffs))
}

/// Sparse tensor with exactly `model.m` nonzero positions chosen uniformly
/// without replacement (partial Fisher-Yates over flat indices, O(m) extra
/// memory). Returns the tensor and the positions in draw order.
pub fn sample_without_replacement(
    shape: &Shape,
    model: &SamplingModel,
    seed: u64,
) -> Result<(DenseTensor, Vec<Vec<usize>>)> {
    model.validate()?;
    require_ambient(shape)?;
    let total = shape.total_size();
    if model.m > total {
        return Err(Error::InvalidParameter(format!(
            "cannot sample {} positions from {} cells without replacement",
            model.m, total
        )));
    }
    let mut pos_rng = stream_rng(seed, &[tag::SAMPLE_POSITIONS]);
    let flats = partial_fisher_yates(total, model.m, &mut pos_rng);
    let mut val_rng = stream_rng(seed, &[tag::SAMPLE_VALUES]);
    let mut entries = vec![0.0; total];
    for &flat in &flats {
        entries[flat] = model.value_law.sample(&mut val_rng);
    }
    let positions = flats.iter().map(|&f| shape.multi_index(f)).collect();
    Ok((DenseTensor::new(shape.clone(), entries)?, positions))
}

/// First `m` steps of a Fisher-Yates shuffle of `0..n`, tracked in a map so
/// memory stays O(m).
fn partial_fisher_yates<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut swapped: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let j = rng.random_range(i..n);
        let value_at_j = swapped.get(&j).copied().unwrap_or(j);
        let value_at_i = swapped.get(&i).copied().unwrap_or(i);
        out.push(value_at_j);
        swapped.insert(j, value_at_i);
    }
    out
}

/// `trials` independent evaluations of `|X(u)|` with `X` drawn i.i.d. from
/// `law`. The tuple is fixed by the caller before any sampling happens, as
/// the fixed-direction tail statement requires.
pub fn empirical_tail(
    shape: &Shape,
    law: &SubGaussianLaw,
    u: &UnitTuple,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    law.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if !u.matches(shape) {
        return Err(Error::ShapeMismatch(format!(
            "unit tuple does not match shape {shape}"
        )));
    }
    (0..trials)
        .map(|t| {
            let x = sample_iid(shape, law, derive_seed(seed, &[tag::TAIL_TRIAL, t as u64]))?;
            Ok(multilinear_eval(&x, u)?.abs())
        })
        .collect()
}

/// `sum_j <W_j, u_1 o ... o u_K>^2` over sampled positions, where `W_j` is
/// the indicator tensor of position j. Distinct positions keep this at most
/// `||u_1 o ... o u_K||_F^2 = 1`.
pub fn indicator_overlap_sum(positions: &[Vec<usize>], u: &UnitTuple) -> f64 {
    positions
        .iter()
        .map(|pos| {
            let inner: f64 = pos
                .iter()
                .enumerate()
                .map(|(k, &i)| u.vector(k)[i])
                .product();
            inner * inner
        })
        .sum()
}

fn require_ambient(shape: &Shape) -> Result<()> {
    if shape.order() == 0 {
        return Err(Error::InvalidParameter(
            "samplers need a shape with at least one mode".into(),
        ));
    }
    Ok(())
}
