//! Coherent information, relative entropy and optimal-decoder success
//! probabilities of sector distributions. All entropies are in bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{Field, FieldSet, SectorDistribution};
use crate::error::{Error, Result};
use crate::f2linalg::BitVector;

/// Slack allowed when checking the inequality chain in floating point.
pub const BOUND_SLACK: f64 = 1e-12;

/// Relative entropy in bits, or infinite when the supports are disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bits", rename_all = "lowercase")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn is_infinite(&self) -> bool {
        matches!(self, RelativeEntropy::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            RelativeEntropy::Finite(v) => Some(v),
            RelativeEntropy::Infinite => None,
        }
    }
}

impl fmt::Display for RelativeEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeEntropy::Finite(v) => write!(f, "{v}"),
            RelativeEntropy::Infinite => f.write_str("inf"),
        }
    }
}

fn syndrome_mask(dist: &SectorDistribution) -> usize {
    (1usize << dist.syndrome_bits()) - 1
}

/// Marginal over the syndrome fields, indexed by the low bits of a packed label.
fn syndrome_marginal(dist: &SectorDistribution) -> Vec<f64> {
    let mask = syndrome_mask(dist);
    let mut marginal = vec![0.0; mask + 1];
    for (i, &p) in dist.probabilities().iter().enumerate() {
        marginal[i & mask] += p;
    }
    marginal
}

/// `Σ P log2(P / P_syndrome)`: minus the conditional entropy of the logical
/// label given the syndrome.
pub fn conditional_log_sum(dist: &SectorDistribution) -> f64 {
    let mask = syndrome_mask(dist);
    let marginal = syndrome_marginal(dist);
    dist.probabilities()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| p * (p / marginal[i & mask]).log2())
        .sum()
}

fn require_fields(dist: &SectorDistribution, expected: FieldSet) -> Result<()> {
    if dist.fields() == expected {
        Ok(())
    } else {
        Err(Error::ModeMismatch {
            expected: expected.to_string(),
            found: dist.fields().to_string(),
        })
    }
}

/// `Ic` for independent bit and phase flips from the two single-side tables.
pub fn coherent_information_factorized(
    dist_x: &SectorDistribution,
    dist_z: &SectorDistribution,
    k: usize,
) -> Result<f64> {
    require_fields(dist_x, FieldSet::X_SIDE)?;
    require_fields(dist_z, FieldSet::Z_SIDE)?;
    if dist_x.code_hash() != dist_z.code_hash() {
        return Err(Error::InvalidParameter(
            "distributions come from different codes".into(),
        ));
    }
    Ok(k as f64 + conditional_log_sum(dist_x) + conditional_log_sum(dist_z))
}

/// `Ic` from a joint `(a, b, kx, kz)` table.
pub fn coherent_information_general(dist: &SectorDistribution, k: usize) -> Result<f64> {
    require_fields(dist, FieldSet::ALL)?;
    Ok(k as f64 + conditional_log_sum(dist))
}

/// Relative entropy between the channel outputs of two logical basis states,
/// `Σ P(s, k) log2(P(s, k) / P(s, k ⊕ k0 ⊕ k0'))`.
///
/// The table must carry exactly one logical field, of width `k0.len()`.
pub fn relative_entropy(
    dist: &SectorDistribution,
    k0: &BitVector,
    k0p: &BitVector,
) -> Result<RelativeEntropy> {
    let logical: Vec<Field> = dist
        .fields()
        .iter()
        .filter(|f| matches!(f, Field::Kx | Field::Kz))
        .collect();
    let [field] = logical[..] else {
        return Err(Error::ModeMismatch {
            expected: "exactly one logical field".into(),
            found: dist.fields().to_string(),
        });
    };
    let width = dist.width(field);
    for v in [k0, k0p] {
        if v.len() != width {
            return Err(Error::DimensionMismatch {
                context: "logical shift",
                expected: width,
                found: v.len(),
            });
        }
    }
    let shift = (k0.xor(k0p).to_u64() as usize) << dist.offset(field);
    let probs = dist.probabilities();
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let q = probs[i ^ shift];
        if q == 0.0 {
            return Ok(RelativeEntropy::Infinite);
        }
        total += p * (p / q).log2();
    }
    Ok(RelativeEntropy::Finite(total))
}

/// Success probability of the maximum-likelihood decoder:
/// `Σ_syndrome max_logical P`.
pub fn ml_success(dist: &SectorDistribution) -> f64 {
    let mask = syndrome_mask(dist);
    let mut best = vec![0.0f64; mask + 1];
    for (i, &p) in dist.probabilities().iter().enumerate() {
        best[i & mask] = best[i & mask].max(p);
    }
    best.iter().sum()
}

/// Success probability of the decoder that samples a logical label from its
/// posterior: `Σ P² / P_syndrome`.
pub fn sampling_success(dist: &SectorDistribution) -> f64 {
    let mask = syndrome_mask(dist);
    let marginal = syndrome_marginal(dist);
    dist.probabilities()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| p * p / marginal[i & mask])
        .sum()
}

/// Which links of the inequality chain failed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundViolations {
    pub ic_range: bool,
    pub jensen: bool,
    pub sampling_above_ml: bool,
    pub ml_above_one: bool,
    pub ml_lower: bool,
}

impl BoundViolations {
    pub fn any(&self) -> bool {
        self.ic_range || self.jensen || self.sampling_above_ml || self.ml_above_one || self.ml_lower
    }
}

/// The quantities of the chain `2^(Ic−k) ≤ sampling ≤ ml ≤ 1` and
/// `2·ml − 1 ≤ sampling`, with any violations flagged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub ic_bits: f64,
    pub jensen_lower: f64,
    pub sampling: f64,
    pub ml: f64,
    pub ml_lower: f64,
    pub violations: BoundViolations,
}

impl BoundReport {
    fn new(k: usize, ic_bits: f64, sampling: f64, ml: f64) -> Self {
        let k = k as f64;
        let jensen_lower = (ic_bits - k).exp2();
        let ml_lower = 2.0 * ml - 1.0;
        let violations = BoundViolations {
            ic_range: ic_bits < -k - BOUND_SLACK || ic_bits > k + BOUND_SLACK,
            jensen: jensen_lower > sampling + BOUND_SLACK,
            sampling_above_ml: sampling > ml + BOUND_SLACK,
            ml_above_one: ml > 1.0 + BOUND_SLACK,
            ml_lower: ml_lower > sampling + BOUND_SLACK,
        };
        Self {
            ic_bits,
            jensen_lower,
            sampling,
            ml,
            ml_lower,
            violations,
        }
    }
}

/// Bound report for a single table, treating its syndrome fields as the
/// decoder input and its logical fields as the label to recover.
pub fn bound_report(dist: &SectorDistribution, k: usize) -> BoundReport {
    BoundReport::new(
        k,
        k as f64 + conditional_log_sum(dist),
        sampling_success(dist),
        ml_success(dist),
    )
}

/// Bound report for independent bit and phase flips. The joint table is the
/// product of the two sides, so both success probabilities factorize.
pub fn bound_report_factorized(
    dist_x: &SectorDistribution,
    dist_z: &SectorDistribution,
    k: usize,
) -> Result<BoundReport> {
    let ic = coherent_information_factorized(dist_x, dist_z, k)?;
    Ok(BoundReport::new(
        k,
        ic,
        sampling_success(dist_x) * sampling_success(dist_z),
        ml_success(dist_x) * ml_success(dist_z),
    ))
}
