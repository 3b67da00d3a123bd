//! Contest construction: split the obfuscated crawl into a training edge set
//! and a test set of real edges plus an equal number of fake (non-edge)
//! pairs, keeping the labels aside for evaluation only.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::eval;
use crate::graph::{DirectedGraph, GraphBuilder, NodeId};
use crate::rng::make_rng;

/// A link-prediction contest. `hidden_labels` is aligned with `test_pairs`
/// and is only ever consumed by the evaluator; attack stages receive the
/// graph and the pairs.
#[derive(Debug, Clone)]
pub struct ContestDataset {
    pub train_graph: DirectedGraph,
    pub test_pairs: Vec<(NodeId, NodeId)>,
    pub hidden_labels: Vec<u8>,
}

/// Samples `count` distinct non-edges of `g` with realistic endpoints: the
/// source is drawn from the out-endpoint distribution of real edges, the
/// target from the in-endpoint distribution. Self-loops, existing edges and
/// repeats are rejected.
pub(crate) fn sample_endpoint_matched_nonedges(
    g: &DirectedGraph,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(NodeId, NodeId)>> {
    let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    if edges.is_empty() {
        return Err(Error::SamplingExhausted(
            "graph has no edges to match endpoints against".into(),
        ));
    }
    let mut picked = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = 1000 + 200 * count;
    while out.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::SamplingExhausted(format!(
                "could not find {count} non-edges after {max_attempts} attempts \
                 (graph too dense?)"
            )));
        }
        let u = edges[rng.gen_range(0..edges.len())].0;
        let v = edges[rng.gen_range(0..edges.len())].1;
        if u == v || g.has_edge(u, v) || picked.contains(&(u, v)) {
            continue;
        }
        picked.insert((u, v));
        out.push((u, v));
    }
    Ok(out)
}

/// Removes `n_test` random edges from `g` to form the positive test pairs,
/// samples an equal number of endpoint-matched fakes from the non-edges of
/// `g`, and shuffles the union. The training graph keeps every node of `g`.
pub fn build_contest(g: &DirectedGraph, n_test: usize, seed: u64) -> Result<ContestDataset> {
    if n_test < 1 || n_test > g.edge_count() / 10 {
        return Err(Error::InvalidArgument(format!(
            "n_test must be in 1..={} (a tenth of the {} edges), got {n_test}",
            g.edge_count() / 10,
            g.edge_count()
        )));
    }
    let mut rng = make_rng(seed);

    let mut edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    // partial Fisher-Yates: the first n_test entries become the positives
    for i in 0..n_test {
        let j = rng.gen_range(i..edges.len());
        edges.swap(i, j);
    }
    let positives: HashSet<(NodeId, NodeId)> = edges[..n_test].iter().copied().collect();

    let fakes = sample_endpoint_matched_nonedges(g, n_test, &mut rng)?;

    let mut builder = GraphBuilder::new();
    for &u in g.nodes() {
        builder.add_node(u);
    }
    for &(u, v) in &edges[n_test..] {
        builder.add_edge(u, v)?;
    }
    let train_graph = builder.freeze();

    let mut labeled: Vec<((NodeId, NodeId), u8)> = positives
        .iter()
        .map(|&p| (p, 1u8))
        .chain(fakes.iter().map(|&f| (f, 0u8)))
        .collect();
    labeled.sort(); // canonical order before the seeded shuffle
    labeled.shuffle(&mut rng);

    let (test_pairs, hidden_labels) = labeled.into_iter().unzip();
    Ok(ContestDataset {
        train_graph,
        test_pairs,
        hidden_labels,
    })
}

/// AUC of a submission against the hidden labels.
pub fn score_submission(dataset: &ContestDataset, probs: &[f64]) -> Result<f64> {
    check_probs(&dataset.test_pairs, probs)?;
    eval::auc(&dataset.hidden_labels, probs)
}

fn check_probs(test_pairs: &[(NodeId, NodeId)], probs: &[f64]) -> Result<()> {
    if probs.len() != test_pairs.len() {
        return Err(Error::DimensionMismatch {
            expected: test_pairs.len(),
            got: probs.len(),
        });
    }
    for &p in probs {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "prediction {p} outside [0,1]"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Files: test pairs, labels and predictions are aligned by line number, so
// order is preserved exactly (unlike edge lists, which are sorted).
// ---------------------------------------------------------------------------

pub fn save_test_pairs(pairs: &[(NodeId, NodeId)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for &(u, v) in pairs {
        writeln!(w, "{u},{v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_test_pairs(path: impl AsRef<Path>) -> Result<Vec<(NodeId, NodeId)>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let parse = |s: Option<&str>| -> Result<u64> {
            s.and_then(|x| x.trim().parse().ok()).ok_or(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "expected `u,v` integer pair".into(),
            })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        pairs.push((NodeId(u), NodeId(v)));
    }
    Ok(pairs)
}

pub fn save_labels(labels: &[u8], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for &l in labels {
        writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("expected 0 or 1, got {other:?}"),
                })
            }
        }
    }
    Ok(labels)
}

/// One probability per line, aligned with the test pairs.
pub fn write_predictions(
    test_pairs: &[(NodeId, NodeId)],
    probs: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    check_probs(test_pairs, probs)?;
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for &p in probs {
        writeln!(w, "{p}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut probs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let p: f64 = trimmed.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("invalid probability {trimmed:?}"),
        })?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("probability {p} outside [0,1]"),
            });
        }
        probs.push(p);
    }
    Ok(probs)
}
