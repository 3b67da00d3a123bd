//! Mapping propagation: grows a seed correspondence between two graphs by
//! scoring candidate pairs against already-mapped neighbors.
//!
//! A candidate's score counts direction-respecting matched neighbors,
//! normalized by sqrt of the degree product. A pair is only committed when
//! the best candidate stands out from the rest (the gap statistic clears
//! `theta`) and, optionally, when the reverse direction picks the same pair.
//! Seeds are never revoked.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, NodeMapping};

#[derive(Debug, Clone)]
pub struct PropagationConfig {
    /// Minimum gap statistic for a commit.
    pub theta: f64,
    pub max_rounds: usize,
    /// Require the reverse direction to agree before committing.
    pub bidirectional_check: bool,
    /// Keep at most this many candidates (by score) per node.
    pub candidate_cap: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            max_rounds: 10,
            bidirectional_check: true,
            candidate_cap: 50,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidConfig("theta must be >= 0".into()));
        }
        if self.max_rounds < 1 {
            return Err(Error::InvalidConfig("max_rounds must be >= 1".into()));
        }
        if self.candidate_cap < 1 {
            return Err(Error::InvalidConfig("candidate_cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// Count of u's neighbors whose image under `mapping` is the
/// corresponding-direction neighbor of v, over sqrt(deg(u)·deg(v)).
fn score_pair(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    ui: usize,
    vi: usize,
) -> f64 {
    let deg_u = g1.out_at(ui).len() + g1.in_at(ui).len();
    let deg_v = g2.out_at(vi).len() + g2.in_at(vi).len();
    if deg_u == 0 || deg_v == 0 {
        return 0.0;
    }
    let mut matched = 0usize;
    for &w in g1.out_at(ui) {
        if let Some(w2) = mapping.get(w) {
            // u→w, so the image must satisfy v→w2
            if g2.out_at(vi).binary_search(&w2).is_ok() {
                matched += 1;
            }
        }
    }
    for &w in g1.in_at(ui) {
        if let Some(w2) = mapping.get(w) {
            if g2.in_at(vi).binary_search(&w2).is_ok() {
                matched += 1;
            }
        }
    }
    matched as f64 / ((deg_u * deg_v) as f64).sqrt()
}

/// Public scoring operation with the precondition checks: u unmapped,
/// v unclaimed.
pub fn candidate_score(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    u: NodeId,
    v: NodeId,
) -> Result<f64> {
    if mapping.contains_source(u) {
        return Err(Error::AlreadyMapped(u));
    }
    if mapping.contains_target(v) {
        return Err(Error::AlreadyClaimed(v));
    }
    let ui = g1.index_of(u).ok_or(Error::UnknownNode(u))?;
    let vi = g2.index_of(v).ok_or(Error::UnknownNode(v))?;
    Ok(score_pair(g1, g2, mapping, ui, vi))
}

/// Gap statistic of a candidate score list: (max − second max) divided by the
/// population standard deviation. Degenerate inputs (fewer than two scores,
/// or all equal) score 0: no confident gap.
pub fn eccentricity(scores: &[f64]) -> f64 {
    if scores.len() < 2 {
        return 0.0;
    }
    let mut max = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &s in scores {
        if s > max {
            second = max;
            max = s;
        } else if s > second {
            second = s;
        }
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|&s| (s - mean) * (s - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return 0.0;
    }
    (max - second) / var.sqrt()
}

/// Unclaimed g2 nodes adjacent to the images of u's mapped neighbors,
/// deduplicated and sorted by id.
fn gather_candidates(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    ui: usize,
) -> Vec<usize> {
    let mut cands: Vec<usize> = Vec::new();
    let mut push_neighbors_of_image = |w: NodeId| {
        if let Some(w2) = mapping.get(w) {
            let wi = g2.index_of(w2).expect("mapping image is a g2 node");
            for &c in g2.out_at(wi).iter().chain(g2.in_at(wi).iter()) {
                if !mapping.contains_target(c) {
                    cands.push(g2.index_of(c).expect("adjacency is closed"));
                }
            }
        }
    };
    for &w in g1.out_at(ui) {
        push_neighbors_of_image(w);
    }
    for &w in g1.in_at(ui) {
        push_neighbors_of_image(w);
    }
    cands.sort_unstable();
    cands.dedup();
    cands
}

/// Best candidate for `ui` against the frozen `mapping`, if it clears the
/// gap threshold. Ties on score break by ascending candidate id.
fn best_candidate(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    ui: usize,
    config: &PropagationConfig,
) -> Option<(usize, f64)> {
    let cands = gather_candidates(g1, g2, mapping, ui);
    if cands.is_empty() {
        return None;
    }
    let mut scored: Vec<(usize, f64)> = cands
        .into_iter()
        .map(|vi| (vi, score_pair(g1, g2, mapping, ui, vi)))
        .collect();
    // descending score, ascending id; cap keeps the strongest
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("scores are finite").then(a.0.cmp(&b.0)));
    scored.truncate(config.candidate_cap);

    let (best_vi, best_score) = scored[0];
    if best_score <= 0.0 {
        return None;
    }
    let scores: Vec<f64> = scored.iter().map(|&(_, s)| s).collect();
    if eccentricity(&scores) < config.theta {
        return None;
    }
    Some((best_vi, best_score))
}

/// The mirror of [`best_candidate`]: the strongest unmapped g1 node for a
/// given g2 node, used by the bidirectional check (no gap test here, only
/// agreement of the argmax).
fn best_reverse_candidate(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    inverse: &NodeMapping,
    vi: usize,
) -> Option<usize> {
    let mut cands: Vec<usize> = Vec::new();
    let mut push_neighbors_of_source = |w2: NodeId| {
        if let Some(w) = inverse.get(w2) {
            let wi = g1.index_of(w).expect("inverse image is a g1 node");
            for &c in g1.out_at(wi).iter().chain(g1.in_at(wi).iter()) {
                if !mapping.contains_source(c) {
                    cands.push(g1.index_of(c).expect("adjacency is closed"));
                }
            }
        }
    };
    for &w2 in g2.out_at(vi) {
        push_neighbors_of_source(w2);
    }
    for &w2 in g2.in_at(vi) {
        push_neighbors_of_source(w2);
    }
    cands.sort_unstable();
    cands.dedup();

    let mut best: Option<(usize, f64)> = None;
    for ui in cands {
        let s = score_pair(g1, g2, mapping, ui, vi);
        match best {
            Some((_, bs)) if s <= bs => {}
            _ => best = Some((ui, s)),
        }
    }
    best.filter(|&(_, s)| s > 0.0).map(|(ui, _)| ui)
}

/// Temporary calibration hook: classifies why each unmapped node fails to
/// commit against the given mapping state.
#[doc(hidden)]
pub fn diagnose_stall(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    mapping: &NodeMapping,
    config: &PropagationConfig,
) -> std::collections::BTreeMap<&'static str, usize> {
    let mut counts = std::collections::BTreeMap::new();
    let inverse = mapping.inverted();
    for ui in 0..g1.node_count() {
        if mapping.contains_source(g1.node_at(ui)) {
            continue;
        }
        let cands = gather_candidates(g1, g2, mapping, ui);
        let reason = if cands.is_empty() {
            "no_candidates"
        } else {
            let mut scored: Vec<(usize, f64)> = cands
                .into_iter()
                .map(|vi| (vi, score_pair(g1, g2, mapping, ui, vi)))
                .collect();
            scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            scored.truncate(config.candidate_cap);
            if scored[0].1 <= 0.0 {
                "top_score_zero"
            } else if scored.len() == 1 {
                "singleton"
            } else if scored.len() > 1 && scored[1].1 == scored[0].1 {
                "top_tie"
            } else {
                let scores: Vec<f64> = scored.iter().map(|&(_, s)| s).collect();
                if eccentricity(&scores) < config.theta {
                    "low_eccentricity"
                } else if config.bidirectional_check
                    && best_reverse_candidate(g1, g2, mapping, &inverse, scored[0].0)
                        != Some(ui)
                {
                    "reverse_disagrees"
                } else {
                    "would_commit"
                }
            }
        };
        *counts.entry(reason).or_insert(0) += 1;
    }
    counts
}

/// Extends `seeds` over up to `max_rounds` passes. Within a pass every
/// unmapped g1 node is scored against the frozen start-of-pass mapping
/// (parallel-safe); commits are applied in ascending node order with claim
/// conflicts resolved in that order. A pass that commits nothing ends the
/// loop. The result always contains `seeds` and is injective.
pub fn propagate(
    g1: &DirectedGraph,
    g2: &DirectedGraph,
    seeds: &NodeMapping,
    config: &PropagationConfig,
) -> Result<NodeMapping> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    config.validate()?;
    for (a, b) in seeds.iter() {
        if !g1.contains_node(a) {
            return Err(Error::UnknownNode(a));
        }
        if !g2.contains_node(b) {
            return Err(Error::UnknownNode(b));
        }
    }

    let mut mapping = seeds.clone();
    for _ in 0..config.max_rounds {
        let frozen = mapping.clone();
        let inverse = frozen.inverted();

        let unmapped: Vec<usize> = (0..g1.node_count())
            .filter(|&i| !frozen.contains_source(g1.node_at(i)))
            .collect();

        let proposals: Vec<(usize, usize)> = unmapped
            .par_iter()
            .filter_map(|&ui| {
                let (vi, _) = best_candidate(g1, g2, &frozen, ui, config)?;
                if config.bidirectional_check
                    && best_reverse_candidate(g1, g2, &frozen, &inverse, vi) != Some(ui)
                {
                    return None;
                }
                Some((ui, vi))
            })
            .collect();

        let mut committed = 0usize;
        for (ui, vi) in proposals {
            let u = g1.node_at(ui);
            let v = g2.node_at(vi);
            // earlier commits this pass may have claimed v
            if !mapping.contains_target(v) && !mapping.contains_source(u) {
                mapping.insert(u, v)?;
                committed += 1;
            }
        }
        if committed == 0 {
            break;
        }
    }
    Ok(mapping)
}
