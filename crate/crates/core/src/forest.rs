//! Random forest classifier, built from scratch.
//!
//! Trees are grown on bootstrap samples; each node searches a random feature
//! subset for the split with the largest Gini impurity decrease, with
//! thresholds at midpoints of consecutive distinct values. Leaves store the
//! positive-class fraction; the forest prediction is the mean over trees.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_stream, make_rng};

#[derive(Debug, Clone)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features sampled (without replacement) at each split. 0 means the
    /// usual ⌈sqrt(d)⌉ default, resolved at training time.
    pub features_per_split: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 12,
            min_leaf: 5,
            features_per_split: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,  // node index; rule x[feature] <= threshold
        right: usize, // rule x[feature] > threshold
    },
    Leaf {
        positive_fraction: f64,
    },
}

/// One decision tree as a flat node arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { positive_fraction } => return *positive_fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn rec(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + rec(nodes, *left).max(rec(nodes, *right)),
            }
        }
        rec(&self.nodes, 0)
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_features: usize,
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = pos as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

/// Best (feature, threshold, impurity decrease) over the given candidate
/// features for the rows at `idx`, or None when no split satisfies min_leaf.
/// Ties keep the first candidate in iteration order.
pub(crate) fn best_split(
    x: &[Vec<f64>],
    y: &[u8],
    idx: &[usize],
    candidates: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64, f64)> {
    let total = idx.len();
    let total_pos = idx.iter().filter(|&&i| y[i] == 1).count();
    let parent = gini(total_pos, total);

    let mut best: Option<(usize, f64, f64)> = None;
    let mut column: Vec<(f64, u8)> = Vec::with_capacity(total);
    for &f in candidates {
        column.clear();
        column.extend(idx.iter().map(|&i| (x[i][f], y[i])));
        column.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("features are finite"));

        let mut left_n = 0usize;
        let mut left_pos = 0usize;
        for w in 0..total - 1 {
            left_n += 1;
            left_pos += usize::from(column[w].1 == 1);
            if column[w].0 == column[w + 1].0 {
                continue; // not a boundary between distinct values
            }
            let right_n = total - left_n;
            if left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            let right_pos = total_pos - left_pos;
            let weighted = (left_n as f64 * gini(left_pos, left_n)
                + right_n as f64 * gini(right_pos, right_n))
                / total as f64;
            let decrease = parent - weighted;
            let threshold = 0.5 * (column[w].0 + column[w + 1].0);
            if best.map_or(true, |(_, _, d)| decrease > d) {
                best = Some((f, threshold, decrease));
            }
        }
    }
    best
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    max_depth: usize,
    min_leaf: usize,
    features_per_split: usize,
    n_features: usize,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(TreeNode::Leaf {
            positive_fraction: pos as f64 / idx.len() as f64,
        });
        self.nodes.len() - 1
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut impl Rng) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let pure = pos == 0 || pos == idx.len();
        if depth == self.max_depth || pure || idx.len() < 2 * self.min_leaf {
            return self.leaf(&idx);
        }

        // feature subset: partial Fisher-Yates over 0..d
        let mut feats: Vec<usize> = (0..self.n_features).collect();
        for i in 0..self.features_per_split.min(self.n_features) {
            let j = rng.gen_range(i..feats.len());
            feats.swap(i, j);
        }
        feats.truncate(self.features_per_split.min(self.n_features));

        let Some((feature, threshold, _)) =
            best_split(self.x, self.y, &idx, &feats, self.min_leaf)
        else {
            return self.leaf(&idx);
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x[i][feature] <= threshold);

        let slot = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            positive_fraction: 0.0, // placeholder, overwritten below
        });
        let left = self.grow(left_idx, depth + 1, rng);
        let right = self.grow(right_idx, depth + 1, rng);
        self.nodes[slot] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        slot
    }
}

fn train_tree(x: &[Vec<f64>], y: &[u8], cfg: &ForestConfig, fps: usize, tree_index: u64) -> Tree {
    let mut rng = make_rng(derive_stream(cfg.seed, tree_index));
    let n = x.len();
    let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut builder = TreeBuilder {
        x,
        y,
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf,
        features_per_split: fps,
        n_features: x[0].len(),
        nodes: Vec::new(),
    };
    let root = builder.grow(bootstrap, 0, &mut rng);
    debug_assert_eq!(root, 0);
    Tree {
        nodes: builder.nodes,
    }
}

/// Trains the forest. Deterministic in `cfg.seed`; trees are independent
/// given their per-tree RNG streams, so training parallelizes freely.
pub fn train(x: &[Vec<f64>], y: &[u8], cfg: &ForestConfig) -> Result<ForestModel> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 training rows".into(),
        ));
    }
    let n_features = x[0].len();
    if n_features == 0 {
        return Err(Error::InvalidArgument("rows have no features".into()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "row {i} contains a non-finite feature"
            )));
        }
    }
    let pos = y.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    if cfg.n_trees < 1 || cfg.max_depth < 1 || cfg.min_leaf < 1 {
        return Err(Error::InvalidConfig(
            "n_trees, max_depth and min_leaf must all be >= 1".into(),
        ));
    }
    let fps = if cfg.features_per_split == 0 {
        (n_features as f64).sqrt().ceil() as usize
    } else {
        cfg.features_per_split
    };
    if fps > n_features {
        return Err(Error::InvalidConfig(format!(
            "features_per_split {fps} exceeds feature count {n_features}"
        )));
    }

    let trees: Vec<Tree> = (0..cfg.n_trees as u64)
        .into_par_iter()
        .map(|t| train_tree(x, y, cfg, fps, t))
        .collect();
    Ok(ForestModel { trees, n_features })
}

/// Mean leaf positive-fraction across trees.
pub fn predict_proba(model: &ForestModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: x.len(),
        });
    }
    let sum: f64 = model.trees.iter().map(|t| t.predict(x)).sum();
    Ok(sum / model.trees.len() as f64)
}
