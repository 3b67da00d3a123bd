//! Directed graph data model.
//!
//! Graphs are built once through [`GraphBuilder`] and immutable afterwards, so
//! every downstream stage can read them concurrently. Adjacency lists are kept
//! sorted; all tie-breaking throughout the crate is by ascending [`NodeId`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Opaque non-negative node label. Carries no semantics beyond identity and
/// deterministic tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Accumulates nodes and edges, deduplicating as it goes; `freeze` produces
/// the immutable graph.
#[derive(Default, Debug, Clone)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, u: NodeId) -> &mut Self {
        self.nodes.insert(u);
        self
    }

    /// Inserts the edge u→v. Duplicates are a no-op; self-loops are rejected.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<&mut Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.nodes.insert(u);
        self.nodes.insert(v);
        self.edges.insert((u, v));
        Ok(self)
    }

    pub fn freeze(self) -> DirectedGraph {
        let nodes: Vec<NodeId> = self.nodes.into_iter().collect();
        let index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        let edge_count = self.edges.len();
        for (u, v) in self.edges {
            out_adj[index[&u]].push(v);
            in_adj[index[&v]].push(u);
        }
        // BTreeSet iteration is sorted by (u, v), so out-lists arrive sorted;
        // in-lists need their own sort.
        for l in &mut in_adj {
            l.sort_unstable();
        }
        DirectedGraph {
            nodes,
            index,
            out_adj,
            in_adj,
            edge_count,
        }
    }
}

/// Immutable directed graph with both adjacency directions. No self-loops,
/// no parallel edges.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn from_edges<I: IntoIterator<Item = (u64, u64)>>(edges: I) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (u, v) in edges {
            b.add_edge(NodeId(u), NodeId(v))?;
        }
        Ok(b.freeze())
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        self.index.contains_key(&u)
    }

    /// Position of `u` in the sorted node list, for the `*_at` accessors.
    pub fn index_of(&self, u: NodeId) -> Option<usize> {
        self.index.get(&u).copied()
    }

    pub fn node_at(&self, i: usize) -> NodeId {
        self.nodes[i]
    }

    pub fn out_at(&self, i: usize) -> &[NodeId] {
        &self.out_adj[i]
    }

    pub fn in_at(&self, i: usize) -> &[NodeId] {
        &self.in_adj[i]
    }

    pub fn out_neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        let i = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        Ok(&self.out_adj[i])
    }

    pub fn in_neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        let i = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        Ok(&self.in_adj[i])
    }

    pub fn out_degree(&self, u: NodeId) -> Result<usize> {
        Ok(self.out_neighbors(u)?.len())
    }

    pub fn in_degree(&self, u: NodeId) -> Result<usize> {
        Ok(self.in_neighbors(u)?.len())
    }

    /// In-degree plus out-degree; mutual edges count twice.
    pub fn total_degree(&self, u: NodeId) -> Result<usize> {
        let i = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        Ok(self.out_adj[i].len() + self.in_adj[i].len())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        match self.index_of(u) {
            Some(i) => self.out_adj[i].binary_search(&v).is_ok(),
            None => false,
        }
    }

    /// All edges sorted by (source, target).
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(move |(i, &u)| self.out_adj[i].iter().map(move |&v| (u, v)))
    }

    /// The k nodes with the highest in-degree, sorted by descending in-degree
    /// with ties broken by ascending NodeId.
    pub fn top_k_in_degree(&self, k: usize) -> Result<Vec<NodeId>> {
        if k == 0 || k > self.nodes.len() {
            return Err(Error::KOutOfRange {
                k,
                min: 1,
                max: self.nodes.len(),
            });
        }
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            self.in_adj[b]
                .len()
                .cmp(&self.in_adj[a].len())
                .then(self.nodes[a].cmp(&self.nodes[b]))
        });
        Ok(order[..k].iter().map(|&i| self.nodes[i]).collect())
    }

    /// Relabels every node through `perm`, which must be total on the nodes
    /// and injective. The target labels may be a fresh range.
    pub fn apply_permutation(&self, perm: &NodeMapping) -> Result<DirectedGraph> {
        let mut b = GraphBuilder::new();
        for &u in &self.nodes {
            let pu = perm
                .get(u)
                .ok_or_else(|| Error::NotBijective(format!("node {u} has no image")))?;
            b.add_node(pu);
        }
        for (u, v) in self.edges() {
            // unwrap: totality established above
            b.add_edge(perm.get(u).unwrap(), perm.get(v).unwrap())?;
        }
        Ok(b.freeze())
    }

    /// Edge-set equality (node sets may differ by isolated nodes).
    pub fn same_edges(&self, other: &DirectedGraph) -> bool {
        self.edge_count == other.edge_count && self.edges().eq(other.edges())
    }
}

/// Partial injective map between the node sets of two graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMapping {
    forward: std::collections::BTreeMap<NodeId, NodeId>,
    reverse: std::collections::BTreeMap<NodeId, NodeId>,
}

impl NodeMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (NodeId, NodeId)>>(pairs: I) -> Result<Self> {
        let mut m = Self::new();
        for (a, b) in pairs {
            m.insert(a, b)?;
        }
        Ok(m)
    }

    /// Adds a↦b. Re-inserting the identical pair is a no-op; any conflicting
    /// source or target is an error (injectivity).
    pub fn insert(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        match self.forward.get(&a) {
            Some(&prev) if prev == b => return Ok(()),
            Some(&prev) => {
                return Err(Error::MappingConflict(format!(
                    "{a} already maps to {prev}, cannot remap to {b}"
                )))
            }
            None => {}
        }
        if let Some(&src) = self.reverse.get(&b) {
            return Err(Error::MappingConflict(format!(
                "{b} is already the image of {src}"
            )));
        }
        self.forward.insert(a, b);
        self.reverse.insert(b, a);
        Ok(())
    }

    pub fn get(&self, a: NodeId) -> Option<NodeId> {
        self.forward.get(&a).copied()
    }

    pub fn source_of(&self, b: NodeId) -> Option<NodeId> {
        self.reverse.get(&b).copied()
    }

    pub fn contains_source(&self, a: NodeId) -> bool {
        self.forward.contains_key(&a)
    }

    pub fn contains_target(&self, b: NodeId) -> bool {
        self.reverse.contains_key(&b)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Pairs sorted by source id.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.forward.iter().map(|(&a, &b)| (a, b))
    }

    pub fn inverted(&self) -> NodeMapping {
        NodeMapping {
            forward: self.reverse.clone(),
            reverse: self.forward.clone(),
        }
    }

    /// self: A→B composed with `other`: B→C, giving A→C. Every image of self
    /// must be in other's domain.
    pub fn compose(&self, other: &NodeMapping) -> Result<NodeMapping> {
        let mut m = NodeMapping::new();
        for (a, b) in self.iter() {
            let c = other
                .get(b)
                .ok_or_else(|| Error::MappingConflict(format!("{b} missing from composed map")))?;
            m.insert(a, c)?;
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// File formats: edge lists and mapping CSVs. Both are plain `a,b` integer
// pairs per line; saved files are byte-deterministic.
// ---------------------------------------------------------------------------

fn parse_pair_line(path: &Path, lineno: usize, line: &str) -> Result<(NodeId, NodeId)> {
    let mut parts = line.split(',');
    let err = |msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line: lineno,
        msg: msg.to_string(),
    };
    let a = parts
        .next()
        .ok_or_else(|| err("missing first field"))?
        .trim();
    let b = parts
        .next()
        .ok_or_else(|| err("missing second field"))?
        .trim();
    if parts.next().is_some() {
        return Err(err("expected exactly two comma-separated fields"));
    }
    let a: u64 = a
        .parse()
        .map_err(|_| err(&format!("invalid integer {a:?}")))?;
    let b: u64 = b
        .parse()
        .map_err(|_| err(&format!("invalid integer {b:?}")))?;
    Ok((NodeId(a), NodeId(b)))
}

/// Reads `u,v` pairs, one per line. A single leading `source,target` header
/// is accepted and skipped. Duplicate lines are deduplicated; a self-loop
/// line is an error.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut builder = GraphBuilder::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if i == 0 && trimmed == "source,target" {
            continue;
        }
        let (u, v) = parse_pair_line(path, i + 1, trimmed)?;
        if u == v {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("self-loop on node {u}"),
            });
        }
        builder.add_edge(u, v)?;
    }
    Ok(builder.freeze())
}

/// Writes the edge list sorted by (u, v), one `u,v` pair per line.
pub fn save_edge_list(g: &DirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (u, v) in g.edges() {
        writeln!(w, "{u},{v}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads an `a,b` pair-per-line mapping file.
pub fn load_mapping(path: impl AsRef<Path>) -> Result<NodeMapping> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut m = NodeMapping::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (a, b) = parse_pair_line(path, i + 1, trimmed)?;
        m.insert(a, b).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        })?;
    }
    Ok(m)
}

/// Writes the mapping sorted by source id, one `a,b` pair per line.
pub fn save_mapping(m: &NodeMapping, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (a, b) in m.iter() {
        writeln!(w, "{a},{b}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> NodeId {
        NodeId(v)
    }

    #[test]
    fn add_edge_basics() {
        let mut b = GraphBuilder::new();
        b.add_edge(n(1), n(2)).unwrap();
        let g = b.freeze();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.in_degree(n(2)).unwrap(), 1);
    }

    #[test]
    fn duplicate_edge_is_noop() {
        let mut b = GraphBuilder::new();
        b.add_edge(n(1), n(2)).unwrap();
        b.add_edge(n(1), n(2)).unwrap();
        assert_eq!(b.freeze().edge_count(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        let mut b = GraphBuilder::new();
        assert!(matches!(
            b.add_edge(n(3), n(3)),
            Err(Error::SelfLoop(NodeId(3)))
        ));
    }

    #[test]
    fn in_degree_counts() {
        let g = DirectedGraph::from_edges([(1, 3), (2, 3)]).unwrap();
        assert_eq!(g.in_degree(n(3)).unwrap(), 2);

        let g = DirectedGraph::from_edges([(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(g.in_degree(n(2)).unwrap(), 1);

        let mut b = GraphBuilder::new();
        b.add_node(n(9));
        let g = b.freeze();
        assert_eq!(g.in_degree(n(9)).unwrap(), 0);
    }

    #[test]
    fn unknown_node_is_error() {
        let g = DirectedGraph::from_edges([(1, 2)]).unwrap();
        assert!(matches!(g.in_degree(n(99)), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn top_k_orders_by_degree_then_id() {
        let g = DirectedGraph::from_edges([(1, 3), (2, 3), (1, 2)]).unwrap();
        assert_eq!(g.top_k_in_degree(2).unwrap(), vec![n(3), n(2)]);
    }

    #[test]
    fn top_k_ties_ascending() {
        let mut b = GraphBuilder::new();
        for v in [5, 1, 9] {
            b.add_node(n(v));
        }
        let g = b.freeze();
        assert_eq!(g.top_k_in_degree(3).unwrap(), vec![n(1), n(5), n(9)]);
    }

    #[test]
    fn top_k_full_is_permutation() {
        let g = DirectedGraph::from_edges([(1, 3), (2, 3), (1, 2)]).unwrap();
        let mut all = g.top_k_in_degree(g.node_count()).unwrap();
        all.sort_unstable();
        assert_eq!(all, g.nodes());
    }

    #[test]
    fn top_k_out_of_range() {
        let g = DirectedGraph::from_edges([(1, 2)]).unwrap();
        assert!(g.top_k_in_degree(0).is_err());
        assert!(g.top_k_in_degree(3).is_err());
    }

    #[test]
    fn permutation_relabels_edges() {
        let g = DirectedGraph::from_edges([(1, 2)]).unwrap();
        let perm = NodeMapping::from_pairs([(n(1), n(9)), (n(2), n(7))]).unwrap();
        let h = g.apply_permutation(&perm).unwrap();
        assert!(h.has_edge(n(9), n(7)));
        assert_eq!(h.edge_count(), 1);
    }

    #[test]
    fn identity_permutation_is_identity() {
        let g = DirectedGraph::from_edges([(1, 2), (2, 3), (3, 1)]).unwrap();
        let id = NodeMapping::from_pairs(g.nodes().iter().map(|&u| (u, u))).unwrap();
        assert!(g.apply_permutation(&id).unwrap().same_edges(&g));
    }

    #[test]
    fn permutation_round_trip() {
        let g = DirectedGraph::from_edges([(1, 2), (2, 3), (1, 3)]).unwrap();
        let perm = NodeMapping::from_pairs([(n(1), n(10)), (n(2), n(20)), (n(3), n(30))]).unwrap();
        let h = g.apply_permutation(&perm).unwrap();
        let back = h.apply_permutation(&perm.inverted()).unwrap();
        assert!(back.same_edges(&g));
    }

    #[test]
    fn non_total_permutation_rejected() {
        let g = DirectedGraph::from_edges([(1, 2), (2, 3)]).unwrap();
        let partial = NodeMapping::from_pairs([(n(1), n(10))]).unwrap();
        assert!(matches!(
            g.apply_permutation(&partial),
            Err(Error::NotBijective(_))
        ));
    }

    #[test]
    fn mapping_injectivity_enforced() {
        let mut m = NodeMapping::new();
        m.insert(n(1), n(5)).unwrap();
        assert!(m.insert(n(2), n(5)).is_err());
        assert!(m.insert(n(1), n(6)).is_err());
        m.insert(n(1), n(5)).unwrap(); // identical re-insert ok
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn edge_list_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.csv");
        std::fs::write(&path, "1,2\n2,3\n").unwrap();
        let g = load_edge_list(&path).unwrap();
        assert_eq!(g.edge_count(), 2);

        let out = dir.path().join("out.csv");
        save_edge_list(&g, &out).unwrap();
        let g2 = load_edge_list(&out).unwrap();
        assert!(g.same_edges(&g2));
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "1,2\n2,3\n");
    }

    #[test]
    fn edge_list_header_and_dups() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.csv");
        std::fs::write(&path, "source,target\n5,4\n5,4\n1,2\n").unwrap();
        let g = load_edge_list(&path).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_list_parse_error_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,one\n").unwrap();
        match load_edge_list(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn edge_list_self_loop_line_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loop.csv");
        std::fs::write(&path, "1,2\n3,3\n").unwrap();
        match load_edge_list(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mapping_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.csv");
        let m = NodeMapping::from_pairs([(n(3), n(30)), (n(1), n(10))]).unwrap();
        save_mapping(&m, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1,10\n3,30\n");
        assert_eq!(load_mapping(&path).unwrap(), m);
    }

    #[test]
    fn compose_and_invert() {
        let a = NodeMapping::from_pairs([(n(1), n(10)), (n(2), n(20))]).unwrap();
        let b = NodeMapping::from_pairs([(n(10), n(100)), (n(20), n(200))]).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.get(n(1)), Some(n(100)));
        assert_eq!(c.get(n(2)), Some(n(200)));
        assert_eq!(a.inverted().get(n(10)), Some(n(1)));
    }
}
