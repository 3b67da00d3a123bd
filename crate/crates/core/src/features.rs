//! Structural link-prediction features.
//!
//! Neighborhood features are computed on the undirected view
//! Γ(x) = inN(x) ∪ outN(x); degree features and the reverse-edge indicator
//! keep direction. For a positive training pair the edge u→v is masked out of
//! every feature, so the label never leaks into its own row; the shortest
//! path ignores that edge unconditionally.

use rand::Rng;

use crate::contest::sample_endpoint_matched_nonedges;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::rng::make_rng;

pub const FEATURE_COUNT: usize = 10;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "common_neighbors",
    "jaccard",
    "adamic_adar",
    "pref_attachment",
    "out_deg_u",
    "in_deg_u",
    "out_deg_v",
    "in_deg_v",
    "reverse_edge",
    "shortest_path_capped",
];

/// Undirected BFS distances beyond this cap collapse to the sentinel.
pub const PATH_CAP: usize = 4;
pub const PATH_SENTINEL: f64 = (PATH_CAP + 1) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub common_neighbors: f64,
    pub jaccard: f64,
    pub adamic_adar: f64,
    pub pref_attachment: f64,
    pub out_deg_u: f64,
    pub in_deg_u: f64,
    pub out_deg_v: f64,
    pub in_deg_v: f64,
    pub reverse_edge: f64,
    pub shortest_path_capped: f64,
}

impl FeatureVector {
    pub fn to_array(self) -> [f64; FEATURE_COUNT] {
        [
            self.common_neighbors,
            self.jaccard,
            self.adamic_adar,
            self.pref_attachment,
            self.out_deg_u,
            self.in_deg_u,
            self.out_deg_v,
            self.in_deg_v,
            self.reverse_edge,
            self.shortest_path_capped,
        ]
    }

    pub fn to_vec(self) -> Vec<f64> {
        self.to_array().to_vec()
    }
}

/// Sorted union of in- and out-neighbors, optionally with one node dropped
/// (the masked edge endpoint).
fn undirected_neighbors(g: &DirectedGraph, i: usize, drop: Option<NodeId>) -> Vec<NodeId> {
    let out = g.out_at(i);
    let inn = g.in_at(i);
    let mut merged = Vec::with_capacity(out.len() + inn.len());
    let (mut a, mut b) = (0, 0);
    while a < out.len() || b < inn.len() {
        let next = match (out.get(a), inn.get(b)) {
            (Some(&x), Some(&y)) => {
                if x <= y {
                    if x == y {
                        b += 1;
                    }
                    a += 1;
                    x
                } else {
                    b += 1;
                    y
                }
            }
            (Some(&x), None) => {
                a += 1;
                x
            }
            (None, Some(&y)) => {
                b += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if Some(next) != drop {
            merged.push(next);
        }
    }
    merged
}

fn intersect_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Undirected BFS distance from u to v with the directed edge u→v ignored,
/// capped at [`PATH_CAP`]; unreachable within the cap → sentinel.
fn capped_distance(g: &DirectedGraph, ui: usize, vi: usize) -> f64 {
    let v = g.node_at(vi);
    let mut dist = vec![u8::MAX; g.node_count()];
    dist[ui] = 0;
    let mut queue = std::collections::VecDeque::from([ui]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[cur];
        if d as usize >= PATH_CAP {
            continue;
        }
        let masking_start = cur == ui;
        for &nb in g.out_at(cur).iter().chain(g.in_at(cur).iter()) {
            // the masked edge u→v only matters when expanding u itself, and
            // only via its out-list; v→u still connects them
            if masking_start && nb == v && !g.in_at(ui).contains(&v) {
                continue;
            }
            let i = g.index_of(nb).expect("adjacency references graph nodes");
            if dist[i] == u8::MAX {
                if i == vi {
                    return (d + 1) as f64;
                }
                dist[i] = d + 1;
                queue.push_back(i);
            }
        }
    }
    PATH_SENTINEL
}

fn extract_impl(g: &DirectedGraph, u: NodeId, v: NodeId, mask_uv: bool) -> Result<FeatureVector> {
    if u == v {
        return Err(Error::InvalidArgument(format!(
            "feature pair endpoints must differ, got ({u},{v})"
        )));
    }
    let ui = g.index_of(u).ok_or(Error::UnknownNode(u))?;
    let vi = g.index_of(v).ok_or(Error::UnknownNode(v))?;

    let has_uv = mask_uv && g.has_edge(u, v);
    let gamma_u = undirected_neighbors(g, ui, if has_uv && !g.has_edge(v, u) { Some(v) } else { None });
    let gamma_v = undirected_neighbors(g, vi, if has_uv && !g.has_edge(v, u) { Some(u) } else { None });
    let common = intersect_sorted(&gamma_u, &gamma_v);

    let union_len = gamma_u.len() + gamma_v.len() - common.len();
    let jaccard = if union_len == 0 {
        0.0
    } else {
        common.len() as f64 / union_len as f64
    };

    // common neighbors are never u or v themselves (no self-loops), so their
    // Γ sizes are unaffected by the mask
    let mut adamic_adar = 0.0;
    for &z in &common {
        let zi = g.index_of(z).expect("common neighbor is a graph node");
        let gz = undirected_neighbors(g, zi, None).len();
        if gz > 1 {
            adamic_adar += 1.0 / (gz as f64).ln();
        }
    }

    let out_u = g.out_at(ui).len() - usize::from(has_uv);
    let in_v = g.in_at(vi).len() - usize::from(has_uv);

    Ok(FeatureVector {
        common_neighbors: common.len() as f64,
        jaccard,
        adamic_adar,
        pref_attachment: (gamma_u.len() * gamma_v.len()) as f64,
        out_deg_u: out_u as f64,
        in_deg_u: g.in_at(ui).len() as f64,
        out_deg_v: g.out_at(vi).len() as f64,
        in_deg_v: in_v as f64,
        reverse_edge: f64::from(g.has_edge(v, u)),
        shortest_path_capped: capped_distance(g, ui, vi),
    })
}

/// Feature vector for an ordered candidate pair (u, v).
pub fn extract_features(g: &DirectedGraph, u: NodeId, v: NodeId) -> Result<FeatureVector> {
    extract_impl(g, u, v, false)
}

/// Features for a known-positive pair with the edge u→v treated as absent.
pub fn extract_features_masked(g: &DirectedGraph, u: NodeId, v: NodeId) -> Result<FeatureVector> {
    extract_impl(g, u, v, true)
}

/// Builds a labeled training matrix: `n_pos` sampled edges (featurized with
/// the edge masked) and `n_neg` endpoint-matched non-edges, shuffled.
pub fn build_training_rows(
    train_graph: &DirectedGraph,
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, Vec<u8>)> {
    if n_pos < 1 || n_pos > train_graph.edge_count() / 10 {
        return Err(Error::InvalidArgument(format!(
            "n_pos must be in 1..={} (a tenth of the edges), got {n_pos}",
            train_graph.edge_count() / 10
        )));
    }
    if n_neg < 1 {
        return Err(Error::InvalidArgument("n_neg must be >= 1".into()));
    }
    let mut rng = make_rng(seed);

    let mut edges: Vec<(NodeId, NodeId)> = train_graph.edges().collect();
    for i in 0..n_pos {
        let j = rng.gen_range(i..edges.len());
        edges.swap(i, j);
    }
    let negatives = sample_endpoint_matched_nonedges(train_graph, n_neg, &mut rng)?;

    let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(n_pos + n_neg);
    for &(u, v) in &edges[..n_pos] {
        rows.push((extract_features_masked(train_graph, u, v)?.to_vec(), 1));
    }
    for &(u, v) in &negatives {
        rows.push((extract_features(train_graph, u, v)?.to_vec(), 0));
    }
    use rand::seq::SliceRandom;
    rows.shuffle(&mut rng);

    Ok(rows.into_iter().unzip())
}
