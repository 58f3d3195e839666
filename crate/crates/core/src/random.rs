//! Random knots from a fixed shadow: every crossing is set over or under
//! independently and the resulting diagram is identified through the table.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::pd::{relabel, Label, OrientedCrossing, PdCode, PdError};
use crate::table::{classify, InvariantIndex, UNKNOT_LABEL};

/// Largest shadow enumerated exhaustively.
pub const ENUMERATION_BUDGET: usize = 20;

pub const UNIDENTIFIED: &str = "unidentified";

#[derive(Debug, Error)]
pub enum RandomError {
    #[error("{k} crossings exceed the enumeration budget of {max}")]
    OverBudget { k: usize, max: usize },
    #[error("a shadow needs at least one crossing")]
    Empty,
    #[error("need at least one sample")]
    NoSamples,
    #[error(transparent)]
    Pd(#[from] PdError),
}

/// A diagram with its crossing information forgotten; stored as one
/// reference diagram whose crossings are switched on demand.
#[derive(Clone, Debug)]
pub struct Shadow {
    base: PdCode,
    pub descriptor: String,
}

impl Shadow {
    pub fn from_pd(pd: &PdCode, descriptor: impl Into<String>) -> Result<Self, RandomError> {
        let report = pd.validate();
        if !report.is_ok() {
            return Err(PdError::Invalid(report).into());
        }
        if pd.is_empty() {
            return Err(RandomError::Empty);
        }
        Ok(Self { base: pd.clone(), descriptor: descriptor.into() })
    }

    /// Closure of a two-strand braid with `k` crossings.
    pub fn twist(k: usize) -> Result<Self, RandomError> {
        if k == 0 {
            return Err(RandomError::Empty);
        }
        // Level j carries edges L_j = 2j+1 and R_j = 2j+2; level k is level 0.
        let left = |j: usize| (2 * (j % k) + 1) as Label;
        let right = |j: usize| (2 * (j % k) + 2) as Label;
        let crossings: Vec<OrientedCrossing> = (0..k)
            .map(|j| OrientedCrossing { slots: [left(j), right(j), right(j + 1), left(j + 1)], over_forward: true })
            .collect();
        Self::from_pd(&relabel(&crossings), format!("twist k={k}"))
    }

    pub fn sites(&self) -> usize {
        self.base.n()
    }

    /// The diagram for one assignment; bit `i` of `mask` switches crossing `i`.
    pub fn assign(&self, mask: u64) -> Result<PdCode, PdError> {
        let which: Vec<bool> = (0..self.sites()).map(|i| mask >> i & 1 == 1).collect();
        self.base.switch(&which)
    }
}

/// Names the knot type of a diagram; chirality is collapsed.
pub fn label_of(pd: &PdCode, index: &InvariantIndex) -> String {
    match pd.components() {
        Ok(c) if c > 1 => return format!("{c}-component link, unclassified"),
        Err(_) => return UNIDENTIFIED.to_string(),
        _ => {}
    }
    let report = classify(pd, index);
    if report.jones_trivial {
        return UNKNOT_LABEL.to_string();
    }
    let mut names: Vec<&str> = report.candidates.iter().map(|c| c.name.as_str()).collect();
    names.dedup();
    if names.is_empty() {
        UNIDENTIFIED.to_string()
    } else {
        names.join("|")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabelCount {
    pub label: String,
    pub count: u64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    pub shadow: String,
    pub total: u64,
    /// Most frequent first, ties by label.
    pub labels: Vec<LabelCount>,
}

impl Distribution {
    fn from_counts(shadow: &str, counts: BTreeMap<String, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let mut labels: Vec<LabelCount> = counts
            .into_iter()
            .map(|(label, count)| LabelCount { label, count, fraction: count as f64 / total as f64 })
            .collect();
        labels.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
        Self { shadow: shadow.to_string(), total, labels }
    }

    pub fn count(&self, label: &str) -> u64 {
        self.labels.iter().find(|l| l.label == label).map_or(0, |l| l.count)
    }

    pub fn fraction(&self, label: &str) -> f64 {
        self.count(label) as f64 / self.total as f64
    }
}

fn tally<I>(shadow: &Shadow, masks: I, index: &InvariantIndex) -> Result<Distribution, RandomError>
where
    I: ParallelIterator<Item = u64>,
{
    let labels: Vec<String> =
        masks.map(|m| shadow.assign(m).map(|pd| label_of(&pd, index))).collect::<Result<_, _>>()?;
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    Ok(Distribution::from_counts(&shadow.descriptor, counts))
}

/// Exact counts over all `2^k` assignments.
pub fn enumerate_assignments(shadow: &Shadow, index: &InvariantIndex) -> Result<Distribution, RandomError> {
    let k = shadow.sites();
    if k > ENUMERATION_BUDGET {
        return Err(RandomError::OverBudget { k, max: ENUMERATION_BUDGET });
    }
    tally(shadow, (0..1u64 << k).into_par_iter(), index)
}

/// Monte Carlo estimate; the masks are drawn up front from one seeded
/// stream so the result does not depend on thread scheduling.
pub fn sample_assignments(
    shadow: &Shadow,
    samples: usize,
    seed: u64,
    index: &InvariantIndex,
) -> Result<Distribution, RandomError> {
    if samples == 0 {
        return Err(RandomError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = shadow.sites().min(64);
    let masks: Vec<u64> = (0..samples).map(|_| if k == 64 { rng.gen() } else { rng.gen_range(0..1u64 << k) }).collect();
    tally(shadow, masks.into_par_iter(), index)
}
