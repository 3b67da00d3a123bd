//! Combining de-anonymization with classifier output, and all evaluation
//! metrics.
//!
//! A de-anonymized test pair is scored by looking the mapped pair up in the
//! attacker's crawl; everything else keeps its classifier probability. The
//! AUC is the Mann-Whitney statistic with ties counting one half, computed by
//! rank summation (the O(n²) pair count lives in the tests as the oracle).

use crate::contest::ContestDataset;
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::graph::{DirectedGraph, NodeMapping};

/// Confidence constants for de-anonymized lookups. The two crawls differ, so
/// a lookup is strong evidence rather than certainty.
#[derive(Debug, Clone)]
pub struct CombineConfig {
    pub p_edge: f64,
    pub p_nonedge: f64,
    pub augment: bool,
}

impl Default for CombineConfig {
    fn default() -> Self {
        Self {
            p_edge: 0.99,
            p_nonedge: 0.01,
            augment: true,
        }
    }
}

impl CombineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.p_nonedge && self.p_nonedge < self.p_edge && self.p_edge <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= p_nonedge < p_edge <= 1, got p_nonedge={}, p_edge={}",
                self.p_nonedge, self.p_edge
            )));
        }
        Ok(())
    }
}

/// Final metrics of a pipeline run, all in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// AUC of the submitted probabilities against the hidden labels.
    pub auc: f64,
    /// Fraction of test pairs with both endpoints mapped.
    pub coverage: f64,
    /// Fraction of mapped nodes whose image agrees with ground truth
    /// (1.0 on an empty mapping, vacuously).
    pub mapping_precision: f64,
    /// Over covered pairs: fraction where the attacker-crawl edge lookup
    /// equals the hidden label (1.0 when nothing is covered, vacuously).
    pub deanon_label_accuracy: f64,
}

/// For every test pair with both endpoints mapped, overrides the classifier
/// probability with p_edge / p_nonedge according to the attacker-crawl edge
/// lookup. Unmapped pairs pass through unchanged.
pub fn combine_predictions(
    test_pairs: &[(crate::graph::NodeId, crate::graph::NodeId)],
    mapping: &NodeMapping,
    attacker_graph: &DirectedGraph,
    clf_probs: &[f64],
    config: &CombineConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    if clf_probs.len() != test_pairs.len() {
        return Err(Error::DimensionMismatch {
            expected: test_pairs.len(),
            got: clf_probs.len(),
        });
    }
    for &p in clf_probs {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "classifier probability {p} outside [0,1]"
            )));
        }
    }
    Ok(test_pairs
        .iter()
        .zip(clf_probs.iter())
        .map(|(&(u, v), &p)| match (mapping.get(u), mapping.get(v)) {
            (Some(mu), Some(mv)) => {
                if attacker_graph.has_edge(mu, mv) {
                    config.p_edge
                } else {
                    config.p_nonedge
                }
            }
            _ => p,
        })
        .collect())
}

/// Appends one training row per covered test pair: features from the contest
/// training graph, label from the attacker-crawl edge lookup. Original rows
/// are preserved.
pub fn augment_training(
    x: &[Vec<f64>],
    y: &[u8],
    test_pairs: &[(crate::graph::NodeId, crate::graph::NodeId)],
    mapping: &NodeMapping,
    attacker_graph: &DirectedGraph,
    train_graph: &DirectedGraph,
) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let mut x2 = x.to_vec();
    let mut y2 = y.to_vec();
    for &(u, v) in test_pairs {
        if let (Some(mu), Some(mv)) = (mapping.get(u), mapping.get(v)) {
            let row = extract_features(train_graph, u, v)?;
            x2.push(row.to_vec());
            y2.push(u8::from(attacker_graph.has_edge(mu, mv)));
        }
    }
    Ok((x2, y2))
}

/// Mann-Whitney AUC with ties counting one half, by average-rank summation.
/// Ranks are multiples of ½, so the result is exact and matches the
/// pair-counting definition bit for bit.
pub fn auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    for (i, &l) in labels.iter().enumerate() {
        if l > 1 {
            return Err(Error::InvalidArgument(format!(
                "label[{i}] = {l} is not 0/1"
            )));
        }
    }
    for &s in scores {
        if s.is_nan() {
            return Err(Error::InvalidArgument("score is NaN".into()));
        }
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("no NaN"));

    // tie runs share the average of their 1-based ranks
    let mut rank_sum_pos = 0.0_f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// All pipeline metrics. `truth_contest` must cover the mapped sources and
/// the test-pair endpoints; `truth_attacker` must cover the mapped targets.
pub fn evaluate(
    dataset: &ContestDataset,
    mapping: &NodeMapping,
    truth_contest: &NodeMapping,
    truth_attacker: &NodeMapping,
    attacker_graph: &DirectedGraph,
    probs: &[f64],
) -> Result<EvalReport> {
    let auc = auc(&dataset.hidden_labels, probs)?;

    let mut precise = 0usize;
    for (u, v) in mapping.iter() {
        let tu = truth_contest.get(u).ok_or_else(|| {
            Error::MappingConflict(format!("mapped node {u} missing from contest truth"))
        })?;
        let tv = truth_attacker.get(v).ok_or_else(|| {
            Error::MappingConflict(format!("mapping target {v} missing from attacker truth"))
        })?;
        if tu == tv {
            precise += 1;
        }
    }
    let mapping_precision = if mapping.is_empty() {
        1.0
    } else {
        precise as f64 / mapping.len() as f64
    };

    let mut covered = 0usize;
    let mut label_hits = 0usize;
    for (i, &(u, v)) in dataset.test_pairs.iter().enumerate() {
        if let (Some(mu), Some(mv)) = (mapping.get(u), mapping.get(v)) {
            covered += 1;
            let lookup = u8::from(attacker_graph.has_edge(mu, mv));
            if lookup == dataset.hidden_labels[i] {
                label_hits += 1;
            }
        }
    }
    let coverage = covered as f64 / dataset.test_pairs.len() as f64;
    let deanon_label_accuracy = if covered == 0 {
        1.0
    } else {
        label_hits as f64 / covered as f64
    };

    Ok(EvalReport {
        auc,
        coverage,
        mapping_precision,
        deanon_label_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DirectedGraph, NodeId};

    fn n(v: u64) -> NodeId {
        NodeId(v)
    }

    /// Pair-counting oracle: wins + half-ties over all (pos, neg) pairs.
    pub(crate) fn auc_brute_force(labels: &[u8], scores: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut pairs = 0usize;
        for (i, &li) in labels.iter().enumerate() {
            if li != 1 {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj != 0 {
                    continue;
                }
                pairs += 1;
                if scores[i] > scores[j] {
                    total += 1.0;
                } else if scores[i] == scores[j] {
                    total += 0.5;
                }
            }
        }
        total / pairs as f64
    }

    #[test]
    fn auc_simple_cases() {
        assert_eq!(auc(&[1, 0], &[0.9, 0.1]).unwrap(), 1.0);
        assert_eq!(auc(&[1, 0], &[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(auc(&[1, 0], &[0.1, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn auc_tie_enumeration() {
        // pairs: (0.8 vs 0.8) tie ½, (0.8 vs 0.1) win, (0.3 vs 0.8) loss,
        // (0.3 vs 0.1) win → 2.5/4
        let a = auc(&[1, 0, 1, 0], &[0.8, 0.8, 0.3, 0.1]).unwrap();
        assert_eq!(a, 0.625);
    }

    #[test]
    fn auc_rejects_degenerate_input() {
        assert!(matches!(auc(&[1, 1], &[0.1, 0.2]), Err(Error::SingleClass)));
        assert!(matches!(auc(&[0, 0], &[0.1, 0.2]), Err(Error::SingleClass)));
        assert!(auc(&[1, 0], &[0.1]).is_err());
        assert!(auc(&[1, 2], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn auc_matches_brute_force_with_ties() {
        use rand::Rng;
        let mut rng = crate::rng::make_rng(55);
        for _ in 0..500 {
            let len = rng.gen_range(2..=50);
            let labels: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
            if labels.iter().all(|&l| l == 0) || labels.iter().all(|&l| l == 1) {
                continue;
            }
            // quantized scores to force plenty of ties
            let scores: Vec<f64> = (0..len).map(|_| rng.gen_range(0..10) as f64 / 10.0).collect();
            let fast = auc(&labels, &scores).unwrap();
            let brute = auc_brute_force(&labels, &scores);
            assert_eq!(fast, brute, "labels {labels:?} scores {scores:?}");
        }
    }

    #[test]
    fn auc_complement_property() {
        use rand::Rng;
        let mut rng = crate::rng::make_rng(56);
        for _ in 0..100 {
            let len = rng.gen_range(2..=40);
            let labels: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
            if labels.iter().all(|&l| l == 0) || labels.iter().all(|&l| l == 1) {
                continue;
            }
            // distinct scores: tie-free
            let scores: Vec<f64> = (0..len).map(|i| i as f64 + rng.gen::<f64>() * 0.5).collect();
            let negated: Vec<f64> = scores.iter().map(|&s| -s).collect();
            let a = auc(&labels, &scores).unwrap();
            let b = auc(&labels, &negated).unwrap();
            assert!((a + b - 1.0).abs() < 1e-12);
            // invariance under strictly increasing transforms
            let squashed: Vec<f64> = scores.iter().map(|&s| (0.05 * s).tanh()).collect();
            assert_eq!(a, auc(&labels, &squashed).unwrap());
        }
    }

    fn tiny_setup() -> (DirectedGraph, Vec<(NodeId, NodeId)>, Vec<f64>) {
        // attacker graph on ids 10,11,12 with edges 10→11, 11→12
        let attacker = DirectedGraph::from_edges([(10, 11), (11, 12)]).unwrap();
        let pairs = vec![(n(0), n(1)), (n(1), n(2)), (n(0), n(2))];
        let clf = vec![0.4, 0.6, 0.7];
        (attacker, pairs, clf)
    }

    #[test]
    fn combine_passthrough_on_empty_mapping() {
        let (attacker, pairs, clf) = tiny_setup();
        let out = combine_predictions(
            &pairs,
            &NodeMapping::new(),
            &attacker,
            &clf,
            &CombineConfig::default(),
        )
        .unwrap();
        assert_eq!(out, clf);
    }

    #[test]
    fn combine_overrides_covered_pairs_only() {
        let (attacker, pairs, clf) = tiny_setup();
        // map 0↦10, 1↦11; node 2 unmapped
        let mapping = NodeMapping::from_pairs([(n(0), n(10)), (n(1), n(11))]).unwrap();
        let out = combine_predictions(&pairs, &mapping, &attacker, &clf, &CombineConfig::default())
            .unwrap();
        assert_eq!(out[0], 0.99); // 10→11 is an attacker edge
        assert_eq!(out[1], clf[1]); // endpoint 2 unmapped
        assert_eq!(out[2], clf[2]);
    }

    #[test]
    fn combine_scores_missing_edge_as_nonedge() {
        let (attacker, pairs, clf) = tiny_setup();
        let mapping =
            NodeMapping::from_pairs([(n(0), n(10)), (n(1), n(11)), (n(2), n(12))]).unwrap();
        let out = combine_predictions(&pairs, &mapping, &attacker, &clf, &CombineConfig::default())
            .unwrap();
        assert_eq!(out, vec![0.99, 0.99, 0.01]); // 10→12 is not an edge
    }

    #[test]
    fn combine_validates_input() {
        let (attacker, pairs, _) = tiny_setup();
        let m = NodeMapping::new();
        assert!(combine_predictions(&pairs, &m, &attacker, &[0.5], &CombineConfig::default())
            .is_err());
        assert!(combine_predictions(
            &pairs,
            &m,
            &attacker,
            &[0.5, 0.5, 1.5],
            &CombineConfig::default()
        )
        .is_err());
        let bad = CombineConfig {
            p_edge: 0.2,
            p_nonedge: 0.8,
            augment: false,
        };
        assert!(combine_predictions(&pairs, &m, &attacker, &[0.5, 0.5, 0.5], &bad).is_err());
    }

    #[test]
    fn perfect_mapping_gives_perfect_auc() {
        // attacker crawl holds the full ground truth and the mapping is total
        let attacker = DirectedGraph::from_edges([(10, 11), (11, 12), (12, 13), (13, 10), (10, 12)])
            .unwrap();
        let mapping = NodeMapping::from_pairs([
            (n(0), n(10)),
            (n(1), n(11)),
            (n(2), n(12)),
            (n(3), n(13)),
        ])
        .unwrap();
        // test pairs: (0,2) real (10→12 in attacker), (1,3) fake
        let pairs = vec![(n(0), n(2)), (n(1), n(3))];
        let labels = vec![1u8, 0];
        let clf = vec![0.1, 0.9]; // classifier is maximally wrong
        let combined =
            combine_predictions(&pairs, &mapping, &attacker, &clf, &CombineConfig::default())
                .unwrap();
        assert_eq!(auc(&labels, &combined).unwrap(), 1.0);
    }

    #[test]
    fn augment_appends_covered_rows() {
        let train = DirectedGraph::from_edges([(0, 1), (1, 2), (0, 2)]).unwrap();
        let attacker = DirectedGraph::from_edges([(10, 11), (11, 12)]).unwrap();
        let mapping = NodeMapping::from_pairs([(n(0), n(10)), (n(1), n(11))]).unwrap();
        let pairs = vec![(n(0), n(1)), (n(1), n(2))];
        let x = vec![vec![0.0; crate::features::FEATURE_COUNT]];
        let y = vec![1u8];

        let (x2, y2) = augment_training(&x, &y, &pairs, &mapping, &attacker, &train).unwrap();
        // only (0,1) is covered; lookup 10→11 = edge → label 1
        assert_eq!(x2.len(), 2);
        assert_eq!(y2, vec![1, 1]);

        let (x3, y3) =
            augment_training(&x, &y, &pairs, &NodeMapping::new(), &attacker, &train).unwrap();
        assert_eq!(x3.len(), x.len());
        assert_eq!(y3, y);
    }

    #[test]
    fn evaluate_perfect_and_empty() {
        // contest graph = relabeled copy of attacker graph, fully mapped
        let train = DirectedGraph::from_edges([(0, 1), (1, 2)]).unwrap();
        let attacker = DirectedGraph::from_edges([(10, 11), (11, 12), (10, 12)]).unwrap();
        let truth_contest =
            NodeMapping::from_pairs([(n(0), n(100)), (n(1), n(101)), (n(2), n(102))]).unwrap();
        let truth_attacker =
            NodeMapping::from_pairs([(n(10), n(100)), (n(11), n(101)), (n(12), n(102))]).unwrap();
        let mapping =
            NodeMapping::from_pairs([(n(0), n(10)), (n(1), n(11)), (n(2), n(12))]).unwrap();
        let ds = ContestDataset {
            train_graph: train,
            test_pairs: vec![(n(0), n(2)), (n(2), n(0))],
            hidden_labels: vec![1, 0],
        };
        let probs = vec![0.9, 0.2];
        let r = evaluate(&ds, &mapping, &truth_contest, &truth_attacker, &attacker, &probs)
            .unwrap();
        assert_eq!(r.coverage, 1.0);
        assert_eq!(r.mapping_precision, 1.0);
        assert_eq!(r.deanon_label_accuracy, 1.0);
        assert_eq!(r.auc, 1.0);

        let r = evaluate(
            &ds,
            &NodeMapping::new(),
            &truth_contest,
            &truth_attacker,
            &attacker,
            &probs,
        )
        .unwrap();
        assert_eq!(r.coverage, 0.0);
        assert_eq!(r.mapping_precision, 1.0); // vacuous
        assert_eq!(r.deanon_label_accuracy, 1.0); // vacuous
    }

    #[test]
    fn evaluate_counts_wrong_mappings() {
        let train = DirectedGraph::from_edges([(0, 1)]).unwrap();
        let attacker = DirectedGraph::from_edges([(10, 11)]).unwrap();
        let truth_contest = NodeMapping::from_pairs([(n(0), n(100)), (n(1), n(101))]).unwrap();
        let truth_attacker = NodeMapping::from_pairs([(n(10), n(100)), (n(11), n(101))]).unwrap();
        // both nodes mapped, both to the wrong target
        let mapping = NodeMapping::from_pairs([(n(0), n(11)), (n(1), n(10))]).unwrap();
        let ds = ContestDataset {
            train_graph: train,
            test_pairs: vec![(n(0), n(1)), (n(1), n(0))],
            hidden_labels: vec![1, 0],
        };
        let r = evaluate(
            &ds,
            &mapping,
            &truth_contest,
            &truth_attacker,
            &attacker,
            &[0.9, 0.1],
        )
        .unwrap();
        assert_eq!(r.mapping_precision, 0.0);
        assert_eq!(r.coverage, 1.0);
    }

    #[test]
    fn evaluate_rejects_inconsistent_truths() {
        let train = DirectedGraph::from_edges([(0, 1)]).unwrap();
        let attacker = DirectedGraph::from_edges([(10, 11)]).unwrap();
        let truth_contest = NodeMapping::from_pairs([(n(0), n(100))]).unwrap(); // missing node 1
        let truth_attacker = NodeMapping::from_pairs([(n(10), n(100)), (n(11), n(101))]).unwrap();
        let mapping = NodeMapping::from_pairs([(n(1), n(11))]).unwrap();
        let ds = ContestDataset {
            train_graph: train,
            test_pairs: vec![(n(0), n(1)), (n(1), n(0))],
            hidden_labels: vec![1, 0],
        };
        assert!(evaluate(
            &ds,
            &mapping,
            &truth_contest,
            &truth_attacker,
            &attacker,
            &[0.9, 0.1]
        )
        .is_err());
    }
}
