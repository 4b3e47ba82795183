//! Constructive epsilon-covers of unit spheres and the net-enumeration
//! upper bound they certify.
//!
//! A cover for `S^{n-1}` is built from the cubical grid of pitch
//! `eps / sqrt(n)`: grid points whose norm lies in `[1 - eps/2, 1 + eps/2]`
//! are normalized onto the sphere and deduplicated. Rounding any unit vector
//! coordinatewise to the grid moves it by at most `eps/2`, and the kept
//! point normalizes back to the sphere at cost at most another `eps/2`, so
//! the result is a genuine eps-cover. The grid constant is heuristic in the
//! sense that covers are larger than optimal, which never hurts soundness;
//! tests additionally spot-verify coverage with random sphere points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::tensor::{mode_collapse, random_unit_vector, DenseTensor};

/// Per-mode cover cardinality cap.
pub const DEFAULT_COVER_POINT_CAP: usize = 4_000_000;

/// Cap on the product of cover sizes enumerated by the certificate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// Deterministic eps-cover of the unit sphere in dimension `n`, under the
/// default size cap. For `n = 1` the sphere is `{+1, -1}` and the cover is
/// exactly that. Points come back in a fixed sorted order.
pub fn build_sphere_cover(n: usize, epsilon: f64) -> Result<Vec<Vec<f64>>> {
    build_sphere_cover_capped(n, epsilon, DEFAULT_COVER_POINT_CAP)
}

pub fn build_sphere_cover_capped(
    n: usize,
    epsilon: f64,
    point_cap: usize,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sphere dimension must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cover radius epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if n == 1 {
        return Ok(vec![vec![1.0], vec![-1.0]]);
    }

    let pitch = epsilon / (n as f64).sqrt();
    // Coordinates are integer multiples of the pitch out to 1 + pitch/2, so
    // coordinatewise rounding of any point in [-1, 1]^n stays on the grid.
    let reach = (1.0 / pitch + 0.5).floor() as i64;
    let per_axis = 2 * reach + 1;
    let candidates = (per_axis as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if candidates > point_cap as u128 {
        return Err(Error::NetTooLarge { dim: n, points: candidates, cap: point_cap as u64 });
    }

    let lo = 1.0 - epsilon / 2.0;
    let hi = 1.0 + epsilon / 2.0;
    let mut seen: BTreeMap<Vec<u64>, Vec<f64>> = BTreeMap::new();
    let mut digits = vec![-reach; n];
    loop {
        let mut norm_sq = 0.0;
        for &d in &digits {
            let c = d as f64 * pitch;
            norm_sq += c * c;
        }
        let norm = norm_sq.sqrt();
        if norm >= lo && norm <= hi {
            let point: Vec<f64> = digits.iter().map(|&d| d as f64 * pitch / norm).collect();
            let key: Vec<u64> = point.iter().map(|c| c.to_bits()).collect();
            seen.entry(key).or_insert(point);
            if seen.len() > point_cap {
                return Err(Error::NetTooLarge {
                    dim: n,
                    points: seen.len() as u128,
                    cap: point_cap as u64,
                });
            }
        }
        // odometer over the grid
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(seen.into_values().collect());
            }
            k -= 1;
            if digits[k] < reach {
                digits[k] += 1;
                break;
            }
            digits[k] = -reach;
        }
    }
}

/// Largest distance from `samples` random unit points to their nearest cover
/// point; a sound cover keeps this at most epsilon.
pub fn max_cover_gap(cover: &[Vec<f64>], n: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, &[0x434f_5645]);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = random_unit_vector(n, &mut rng);
        let mut best = f64::INFINITY;
        for c in cover {
            let d: f64 = c.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best {
                best = d;
            }
        }
        worst = worst.max(best.sqrt());
    }
    worst
}

/// A sound upper bound on the spectral norm obtained by enumerating the
/// product of per-mode covers.
///
/// Writing the true maximizer as a cover point plus per-mode perturbations
/// of norm at most epsilon and expanding multilinearly gives
/// `|X| <= net_max + ((1+eps)^K - 1) |X|`, hence
/// `upper_bound = net_max / (1 - slack)` with `slack = (1+eps)^K - 1`. The
/// classical exponential majorant `e^{eps K} - 1` is recorded alongside; at
/// `eps = K0/K` it equals 1/2 and the certificate collapses to
/// `2 * net_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCertificate {
    pub epsilon: f64,
    /// Cover cardinality per mode.
    pub net_sizes: Vec<usize>,
    /// Maximum of `|X|` over the product net.
    pub net_max: f64,
    /// Binomial slack `(1+eps)^K - 1`; construction fails unless it is
    /// below 1.
    pub slack: f64,
    /// Exponential majorant `e^{eps K} - 1` of the slack.
    pub exp_slack: f64,
    pub upper_bound: f64,
}

pub fn certified_upper_bound(x: &DenseTensor, epsilon: f64) -> Result<NetCertificate> {
    certified_upper_bound_capped(x, epsilon, DEFAULT_ENUMERATION_CAP, DEFAULT_COVER_POINT_CAP)
}

pub fn certified_upper_bound_capped(
    x: &DenseTensor,
    epsilon: f64,
    enumeration_cap: u64,
    point_cap: usize,
) -> Result<NetCertificate> {
    let k = x.order();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "certification needs a tensor with at least one mode".into(),
        ));
    }
    let pair = crate::bounds::net_slack(k, epsilon)?;
    if pair.binomial >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "slack (1+eps)^K - 1 = {} is not below 1; decrease epsilon",
            pair.binomial
        )));
    }

    let mut cover_by_dim: BTreeMap<usize, Vec<Vec<f64>>> = BTreeMap::new();
    for &n in x.shape().dims() {
        if let std::collections::btree_map::Entry::Vacant(slot) = cover_by_dim.entry(n) {
            slot.insert(build_sphere_cover_capped(n, epsilon, point_cap)?);
        }
    }
    let covers: Vec<&Vec<Vec<f64>>> = x
        .shape()
        .dims()
        .iter()
        .map(|n| &cover_by_dim[n])
        .collect();
    let net_sizes: Vec<usize> = covers.iter().map(|c| c.len()).collect();
    let tuples = net_sizes
        .iter()
        .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
    if tuples > enumeration_cap as u128 {
        return Err(Error::EnumerationCapExceeded { tuples, cap: enumeration_cap });
    }

    let net_max = net_max_recursive(x, &covers)?;
    Ok(NetCertificate {
        epsilon,
        net_sizes,
        net_max,
        slack: pair.binomial,
        exp_slack: pair.exp,
        upper_bound: net_max / (1.0 - pair.binomial),
    })
}

/// Maximum of `|X|` over the product net, sharing partial contractions
/// across tuples with a common prefix. Enumeration runs in lexicographic
/// tuple order with strict improvement, so exact ties resolve to the lowest
/// index.
fn net_max_recursive(x: &DenseTensor, covers: &[&Vec<Vec<f64>>]) -> Result<f64> {
    if covers.len() == 1 {
        let v = x.entries();
        let mut best = 0.0f64;
        for point in covers[0] {
            let dot: f64 = v.iter().zip(point).map(|(a, b)| a * b).sum();
            if dot.abs() > best {
                best = dot.abs();
            }
        }
        return Ok(best);
    }
    let mut best = 0.0f64;
    for point in covers[0] {
        let collapsed = mode_collapse(x, 0, point)?;
        let sub = net_max_recursive(&collapsed, &covers[1..])?;
        if sub > best {
            best = sub;
        }
    }
    Ok(best)
}
