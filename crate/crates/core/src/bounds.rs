//! Closed-form tail bounds and counting inequalities, with validity-domain
//! checks.
//!
//! Every logarithm here is the natural log. In particular the constant
//! [`k0`] is `ln(3/2)`: that choice makes the net discretization slack
//! `e^{eps K} - 1` equal exactly 1/2 at `eps = K0/K`, which is what the
//! factor-2 certificate relies on.
//!
//! Bounds are still computed when their preconditions fail; violations are
//! reported through `validity_flags` rather than by refusing, so experiment
//! sweeps can plot would-be values. Structurally meaningless inputs (a
//! nonpositive sigma, an empty shape, a nonpositive delta) are hard errors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Shape;

/// `K0 = ln(3/2)`.
pub fn k0() -> f64 {
    1.5f64.ln()
}

/// Inputs shared by the norm bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundParams {
    pub shape: Shape,
    pub sigma: f64,
    pub delta: f64,
    /// Measurement count, required by the measurement-model bound.
    pub m: Option<usize>,
}

impl BoundParams {
    pub fn new(shape: Shape, sigma: f64, delta: f64) -> Self {
        BoundParams { shape, sigma, delta, m: None }
    }

    pub fn with_measurements(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    fn check_hard(&self) -> Result<()> {
        if self.shape.order() == 0 {
            return Err(Error::InvalidParameter("bounds need at least one mode".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive and finite, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    fn soft_flags(&self) -> Vec<String> {
        let mut flags = Vec::new();
        if self.delta >= 1.0 {
            flags.push(format!("delta out of range: {} not in (0,1)", self.delta));
        }
        flags
    }

    fn echo(&self) -> EchoedInputs {
        EchoedInputs {
            shape: Some(self.shape.dims().to_vec()),
            sigma: Some(self.sigma),
            delta: Some(self.delta),
            m: self.m,
            ..EchoedInputs::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    Lemma1Tail,
    Theorem1,
    Corollary1,
    Corollary2,
    NetSlack,
    CoverCount,
}

impl std::fmt::Display for FormulaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FormulaId::Lemma1Tail => "lemma1_tail",
            FormulaId::Theorem1 => "theorem1",
            FormulaId::Corollary1 => "corollary1",
            FormulaId::Corollary2 => "corollary2",
            FormulaId::NetSlack => "net_slack",
            FormulaId::CoverCount => "cover_count",
        };
        write!(f, "{name}")
    }
}

/// Inputs echoed back in a report; only the fields relevant to the formula
/// are present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EchoedInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

/// One evaluated bound. `value` is the bound itself, `log_value` its natural
/// log (computed from parts, so it stays finite when `value` overflows).
/// `validity_flags` is empty exactly when all preconditions hold; the value
/// is still reported otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula_id: FormulaId,
    pub value: f64,
    pub log_value: f64,
    pub inputs: EchoedInputs,
    pub validity_flags: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extras: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn is_valid(&self) -> bool {
        self.validity_flags.is_empty()
    }
}

/// Two-sided sub-Gaussian tail bound `2 exp(-t^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// Capped at 1, since it bounds a probability.
    pub capped: f64,
    pub uncapped: f64,
}

pub fn hoeffding_tail(t: f64, sigma: f64) -> Result<TailBound> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    let uncapped = 2.0 * (-t * t / (2.0 * sigma * sigma)).exp();
    Ok(TailBound { capped: uncapped.min(1.0), uncapped })
}

/// High-probability spectral-norm bound for proxy-`sigma` entries:
/// `sqrt(8 sigma^2 ((sum_k n_k) ln(2K/K0) + ln(2/delta)))`.
pub fn theorem1_bound(p: &BoundParams) -> Result<BoundReport> {
    sum_form_bound(p, FormulaId::Theorem1)
}

/// Identical closed form for the without-replacement sampling model.
pub fn corollary2_bound(p: &BoundParams) -> Result<BoundReport> {
    sum_form_bound(p, FormulaId::Corollary2)
}

fn sum_form_bound(p: &BoundParams, id: FormulaId) -> Result<BoundReport> {
    p.check_hard()?;
    let k = p.shape.order() as f64;
    let sum_n = p.shape.sum_dims() as f64;
    let log_cover = (2.0 * k / k0()).ln();
    let arg = sum_n * log_cover + (2.0 / p.delta).ln();
    let value = (8.0 * p.sigma * p.sigma * arg).sqrt();
    let log_value = 0.5 * (8.0f64.ln() + 2.0 * p.sigma.ln() + arg.ln());
    Ok(BoundReport {
        formula_id: id,
        value,
        log_value,
        inputs: p.echo(),
        validity_flags: p.soft_flags(),
        extras: BTreeMap::new(),
    })
}

/// Measurement-model bound
/// `sqrt(32 M sigma^2 ((sum_k n_k) ln(2K/K0) + ln(4/delta)))`,
/// valid when `M >= 2 ln(2/delta)`; a violation is flagged but the value is
/// still computed.
pub fn corollary1_bound(p: &BoundParams) -> Result<BoundReport> {
    p.check_hard()?;
    let m = p.m.ok_or_else(|| {
        Error::InvalidParameter("corollary1 needs the measurement count M".into())
    })?;
    if m == 0 {
        return Err(Error::InvalidParameter("measurement count M must be >= 1".into()));
    }
    let mut flags = p.soft_flags();
    let threshold = 2.0 * (2.0 / p.delta).ln();
    if (m as f64) < threshold {
        flags.push(format!("M below 2ln(2/delta): {m} < {threshold}"));
    }
    let k = p.shape.order() as f64;
    let sum_n = p.shape.sum_dims() as f64;
    let arg = sum_n * (2.0 * k / k0()).ln() + (4.0 / p.delta).ln();
    let value = (32.0 * m as f64 * p.sigma * p.sigma * arg).sqrt();
    let log_value =
        0.5 * (32.0f64.ln() + (m as f64).ln() + 2.0 * p.sigma.ln() + arg.ln());
    Ok(BoundReport {
        formula_id: FormulaId::Corollary1,
        value,
        log_value,
        inputs: p.echo(),
        validity_flags: flags,
        extras: BTreeMap::new(),
    })
}

/// The two net-discretization slacks for order `K` at radius `epsilon`:
/// the exact binomial sum `(1+eps)^K - 1` and its exponential majorant
/// `e^{eps K} - 1`. The binomial one is never larger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackPair {
    pub binomial: f64,
    pub exp: f64,
}

pub fn net_slack(k: usize, epsilon: f64) -> Result<SlackPair> {
    if k == 0 {
        return Err(Error::InvalidParameter("order K must be >= 1".into()));
    }
    check_epsilon(epsilon, 1.0)?;
    let kf = k as f64;
    Ok(SlackPair {
        binomial: (kf * epsilon.ln_1p()).exp_m1(),
        exp: (kf * epsilon).exp_m1(),
    })
}

/// Packing-style cover cardinality bound `(2/eps)^n`, reported both directly
/// (which may overflow to infinity) and in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverCount {
    pub value: f64,
    pub log_value: f64,
}

/// Accepts `epsilon` in `(0, 1]`; the closed form is still meaningful at 1.
pub fn cover_count_bound(n: usize, epsilon: f64) -> Result<CoverCount> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
    }
    check_epsilon(epsilon, 1.0 + f64::EPSILON)?;
    let log_value = n as f64 * (2.0 / epsilon).ln();
    Ok(CoverCount { value: log_value.exp(), log_value })
}

/// Union-bound tail `(2K/K0)^{sum_k n_k} * 2 exp(-t^2 / (8 sigma^2))`,
/// evaluated in log space; the reported probability is clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnionTail {
    pub probability: f64,
    pub log_value: f64,
}

pub fn union_tail(p: &BoundParams, t: f64) -> Result<UnionTail> {
    p.check_hard()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    let k = p.shape.order() as f64;
    let sum_n = p.shape.sum_dims() as f64;
    let log_value =
        sum_n * (2.0 * k / k0()).ln() + 2.0f64.ln() - t * t / (8.0 * p.sigma * p.sigma);
    Ok(UnionTail { probability: log_value.exp().min(1.0), log_value })
}

/// Report wrapper for the fixed-direction tail, used by the CLI.
pub fn lemma1_tail_report(t: f64, sigma: f64) -> Result<BoundReport> {
    let tail = hoeffding_tail(t, sigma)?;
    let mut extras = BTreeMap::new();
    extras.insert("uncapped".to_string(), tail.uncapped);
    Ok(BoundReport {
        formula_id: FormulaId::Lemma1Tail,
        value: tail.capped,
        log_value: 2.0f64.ln() - t * t / (2.0 * sigma * sigma),
        inputs: EchoedInputs { t: Some(t), sigma: Some(sigma), ..EchoedInputs::default() },
        validity_flags: Vec::new(),
        extras,
    })
}

/// Report wrapper for [`net_slack`], used by the CLI.
pub fn net_slack_report(k: usize, epsilon: f64) -> Result<BoundReport> {
    let pair = net_slack(k, epsilon)?;
    let mut extras = BTreeMap::new();
    extras.insert("exp_slack".to_string(), pair.exp);
    Ok(BoundReport {
        formula_id: FormulaId::NetSlack,
        value: pair.binomial,
        log_value: pair.binomial.ln(),
        inputs: EchoedInputs { k: Some(k), epsilon: Some(epsilon), ..EchoedInputs::default() },
        validity_flags: Vec::new(),
        extras,
    })
}

/// Report wrapper for [`cover_count_bound`], used by the CLI.
pub fn cover_count_report(n: usize, epsilon: f64) -> Result<BoundReport> {
    let count = cover_count_bound(n, epsilon)?;
    Ok(BoundReport {
        formula_id: FormulaId::CoverCount,
        value: count.value,
        log_value: count.log_value,
        inputs: EchoedInputs { n: Some(n), epsilon: Some(epsilon), ..EchoedInputs::default() },
        validity_flags: Vec::new(),
        extras: BTreeMap::new(),
    })
}

fn check_epsilon(epsilon: f64, upper: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < upper && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} out of range")));
    }
    Ok(())
}
