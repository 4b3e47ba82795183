//! Spectral norms of dense random tensors: estimation, certification, and
//! Monte Carlo verification of sub-Gaussian concentration bounds.
//!
//! The crate is organized around five pieces:
//!
//! - [`tensor`] — dense K-way tensors, index arithmetic, and the multilinear
//!   form `X(u_1, ..., u_K)`, plus a stable JSON/base64 file format.
//! - [`estimators`] — a multi-restart higher-order power iteration that
//!   lower-bounds the spectral norm, and a constructive epsilon-net
//!   certificate that upper-bounds it.
//! - [`models`] — seeded samplers for three random-tensor models (i.i.d.
//!   sub-Gaussian entries, coefficient-weighted measurement sums, and sparse
//!   uniform sampling without replacement).
//! - [`bounds`] — the closed-form tail bounds those models obey, with
//!   validity-domain checks.
//! - [`experiment`] — a reproducible Monte Carlo harness that sweeps shapes,
//!   compares estimates against bounds, and persists CSV/JSON/SVG reports.
//!
//! Determinism is a design rule throughout: every random object has its own
//! ChaCha12 stream derived from `(seed, tags)` via SplitMix64 hashing (see
//! [`rng`]), so results are independent of thread count and schedule.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod models;
pub mod rng;
pub mod tensor;

pub use bounds::{
    corollary1_bound, corollary2_bound, cover_count_bound, hoeffding_tail, k0, net_slack,
    theorem1_bound, union_tail, BoundParams, BoundReport, FormulaId,
};
pub use error::{Error, Result};
pub use estimators::{
    build_sphere_cover, certified_upper_bound, power_iteration, spectral_norm_bracket,
    NetCertificate, PowerIterConfig, PowerIterResult, SpectralBracket,
};
pub use experiment::{
    run_experiment, run_trial, summarize, ExperimentConfig, ScalingSummary, TrialOutcome,
    TrialRecord,
};
pub use models::{
    empirical_tail, sample_iid, sample_measurement_model, sample_without_replacement, LawKind,
    MeasurementModel, ModelSpec, RandomModel, SamplingModel, SubGaussianLaw,
};
pub use tensor::{
    frobenius_norm, mode_collapse, multilinear_eval, outer_product, DenseTensor, Shape, UnitTuple,
};
