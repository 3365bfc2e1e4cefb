//! Path-metric update and list pruning: exact sorting and the sorter-free
//! double-thresholding selection.

use crate::channel::{pm_sat_add, Llr, Metric};
use serde::{Deserialize, Serialize};

/// Per-bit path metric update: the hypothesis matching the hard decision
/// keeps the metric, the flip pays the LLR magnitude.
#[inline]
pub fn pmu_bit(gamma: Metric, lam: Llr) -> (Metric, Metric) {
    (gamma, pm_sat_add(gamma, lam.magnitude() as Metric))
}

/// An expanded path before pruning.
///
/// `key` orders the expansions of one parent (hypothesis bit, or the block
/// pattern rank for multi-bit expansions); enumeration order of a candidate
/// slice is the expanded-path index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub metric: Metric,
    pub parent: usize,
    pub key: u32,
}

/// Keeps the `l` smallest metrics out of up to `2l` (or more) expansions.
/// Ties break toward the lower parent index, then the lower key. Survivor
/// indices are returned in (parent, key) order.
pub fn prune_exact(cands: &[Candidate], l: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cands.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ca, cb) = (&cands[a], &cands[b]);
        ca.metric
            .cmp(&cb.metric)
            .then(ca.parent.cmp(&cb.parent))
            .then(ca.key.cmp(&cb.key))
    });
    idx.truncate(l);
    idx.sort_by(|&a, &b| {
        let (ca, cb) = (&cands[a], &cands[b]);
        ca.parent.cmp(&cb.parent).then(ca.key.cmp(&cb.key))
    });
    idx
}

/// Acceptance and rejection thresholds. Expansions below `at` are always
/// kept, above `rt` always dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub at: Metric,
    pub rt: Metric,
}

/// Threshold extraction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdVariant {
    /// `[AT, RT] = [sorted[L/2], sorted[L-1]]`.
    Standard,
    /// Standard acceptance threshold, rejection from a lower rank.
    Advance { rt_index: usize },
}

/// Rejection-threshold rank used by the advance variant for the supported
/// list sizes.
pub fn advance_rt_index(l: usize) -> Option<usize> {
    match l {
        8 => Some(6),
        16 => Some(12),
        32 => Some(25),
        _ => None,
    }
}

/// Extracts thresholds from the ascending per-parent survivor metrics.
pub fn dts_thresholds(sorted: &[Metric], variant: ThresholdVariant) -> Thresholds {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "input must be sorted");
    let l = sorted.len();
    let rt_index = match variant {
        ThresholdVariant::Standard => l - 1,
        ThresholdVariant::Advance { rt_index } => rt_index.min(l - 1),
    };
    Thresholds {
        at: sorted[l / 2],
        rt: sorted[rt_index],
    }
}

/// Sorter-free pruning: keep everything below `at`, drop everything above
/// `rt`, and fill the remaining slots from the middle band in expansion
/// order. If the band underfills, rejected entries are admitted in scan
/// order so that exactly `l` paths always come out.
pub fn dts_prune(cands: &[Candidate], l: usize, th: Thresholds) -> Vec<usize> {
    let mut out: Vec<usize> = (0..cands.len())
        .filter(|&i| cands[i].metric < th.at)
        .collect();
    debug_assert!(out.len() <= l, "acceptance band exceeded the list size");
    out.truncate(l);
    if out.len() < l {
        let mut middle: Vec<usize> = (0..cands.len())
            .filter(|&i| {
                let m = cands[i].metric;
                m >= th.at && m <= th.rt
            })
            .collect();
        middle.truncate(l - out.len());
        out.extend_from_slice(&middle);
    }
    if out.len() < l {
        let need = l - out.len();
        let rejected: Vec<usize> = (0..cands.len())
            .filter(|&i| cands[i].metric > th.rt)
            .take(need)
            .collect();
        out.extend_from_slice(&rejected);
    }
    out.sort_unstable();
    out
}

/// One logged pruning event, serializable as a JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneEvent {
    /// Index of the first bit of the expansion.
    pub bit_index: usize,
    pub tuple_len: usize,
    pub expanded: Vec<Candidate>,
    /// Thresholds in effect; absent for exact-sort events.
    pub thresholds: Option<Thresholds>,
    /// Indices into `expanded` of the surviving paths.
    pub survivors: Vec<usize>,
}
