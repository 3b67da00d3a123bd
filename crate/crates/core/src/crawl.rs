//! Synthetic ground-truth graphs and partial crawls.
//!
//! The generator grows a directed preferential-attachment graph (heavy-tailed
//! in-degrees, so hub-based seeding has something to hold on to). A crawl is
//! a bidirectional BFS over a fraction of the nodes; its result is relabeled
//! with fresh ids and comes with the truth mapping back to the source graph.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphBuilder, NodeId, NodeMapping};
use crate::rng::make_rng;

/// A crawled subgraph plus the truth mapping from its fresh node ids back to
/// the ids of the crawled graph.
#[derive(Debug, Clone)]
pub struct CrawlResult {
    pub subgraph: DirectedGraph,
    pub truth: NodeMapping,
}

/// Directed preferential attachment: nodes 0..n are added one at a time and
/// each new node emits up to `m` out-edges to distinct existing nodes chosen
/// proportional to (in-degree + 1).
pub fn generate_scale_free(n: usize, m: usize, seed: u64) -> Result<DirectedGraph> {
    if m < 1 || n < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "need n >= m+1 >= 2, got n={n}, m={m}"
        )));
    }
    let mut rng = make_rng(seed);
    let mut builder = GraphBuilder::new();
    builder.add_node(NodeId(0));

    // Urn sampling: node i appears (in_degree(i) + 1) times.
    let mut urn: Vec<u64> = vec![0];
    let mut picked: Vec<u64> = Vec::with_capacity(m);
    for v in 1..n as u64 {
        picked.clear();
        let targets = m.min(v as usize);
        while picked.len() < targets {
            let t = urn[rng.gen_range(0..urn.len())];
            if !picked.contains(&t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            builder.add_edge(NodeId(v), NodeId(t))?;
            urn.push(t);
        }
        urn.push(v);
    }
    Ok(builder.freeze())
}

/// Bidirectional BFS crawl visiting ⌈coverage·n⌉ nodes, restarting from a
/// fresh random unvisited node whenever the frontier empties. The induced
/// subgraph is relabeled 0.. in visit order; `truth` maps fresh id → source id.
pub fn partial_crawl(g: &DirectedGraph, coverage: f64, seed: u64) -> Result<CrawlResult> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "coverage must be in (0,1], got {coverage}"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidArgument("cannot crawl an empty graph".into()));
    }
    let quota = ((coverage * n as f64).ceil() as usize).clamp(1, n);

    let mut rng = make_rng(seed);
    // Pre-shuffled restart order; each restart takes the next unvisited node,
    // which is a uniform without-replacement draw.
    let mut restart_order: Vec<usize> = (0..n).collect();
    restart_order.shuffle(&mut rng);
    let mut restart_pos = 0;

    let mut visited = vec![false; n];
    let mut visit_order: Vec<usize> = Vec::with_capacity(quota);
    let mut queue = std::collections::VecDeque::new();

    'crawl: while visit_order.len() < quota {
        while visited[restart_order[restart_pos]] {
            restart_pos += 1;
        }
        let start = restart_order[restart_pos];
        visited[start] = true;
        visit_order.push(start);
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            if visit_order.len() == quota {
                break 'crawl;
            }
            for &nb in g.out_at(cur).iter().chain(g.in_at(cur).iter()) {
                let i = g.index_of(nb).expect("adjacency references graph nodes");
                if !visited[i] {
                    visited[i] = true;
                    visit_order.push(i);
                    queue.push_back(i);
                    if visit_order.len() == quota {
                        break 'crawl;
                    }
                }
            }
        }
    }

    let mut truth = NodeMapping::new();
    let mut builder = GraphBuilder::new();
    for (fresh, &idx) in visit_order.iter().enumerate() {
        truth
            .insert(NodeId(fresh as u64), g.node_at(idx))
            .expect("fresh ids are unique, visit order has no repeats");
        builder.add_node(NodeId(fresh as u64));
    }
    let back: std::collections::HashMap<NodeId, u64> = visit_order
        .iter()
        .enumerate()
        .map(|(fresh, &idx)| (g.node_at(idx), fresh as u64))
        .collect();
    for &idx in &visit_order {
        let u = g.node_at(idx);
        for &v in g.out_at(idx) {
            if let Some(&fv) = back.get(&v) {
                builder.add_edge(NodeId(back[&u]), NodeId(fv))?;
            }
        }
    }
    Ok(CrawlResult {
        subgraph: builder.freeze(),
        truth,
    })
}

/// Relabels the graph by a uniformly random bijection onto the dense range
/// 0..|nodes|. Returns the relabeled graph and the mapping from obfuscated
/// ids back to the input ids.
pub fn obfuscate(g: &DirectedGraph, seed: u64) -> Result<(DirectedGraph, NodeMapping)> {
    let mut rng = make_rng(seed);
    let n = g.node_count();
    let mut fresh: Vec<u64> = (0..n as u64).collect();
    fresh.shuffle(&mut rng);
    let perm = NodeMapping::from_pairs(
        g.nodes()
            .iter()
            .zip(fresh.iter())
            .map(|(&u, &f)| (u, NodeId(f))),
    )?;
    let obfuscated = g.apply_permutation(&perm)?;
    Ok((obfuscated, perm.inverted()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected_connected(g: &DirectedGraph) -> bool {
        let n = g.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &nb in g.out_at(i).iter().chain(g.in_at(i).iter()) {
                let j = g.index_of(nb).unwrap();
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    #[test]
    fn generator_small_case() {
        let g = generate_scale_free(5, 1, 7).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 4);
        assert!(undirected_connected(&g));
    }

    #[test]
    fn generator_edge_count_formula() {
        // node i emits min(m, i) edges
        let g = generate_scale_free(50, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 1 + 2 + 3 * 47);
    }

    #[test]
    fn generator_deterministic() {
        let g1 = generate_scale_free(200, 4, 99).unwrap();
        let g2 = generate_scale_free(200, 4, 99).unwrap();
        assert!(g1.same_edges(&g2));
        let g3 = generate_scale_free(200, 4, 100).unwrap();
        assert!(!g1.same_edges(&g3));
    }

    #[test]
    fn generator_rejects_bad_params() {
        assert!(generate_scale_free(2, 2, 0).is_err());
        assert!(generate_scale_free(10, 0, 0).is_err());
    }

    #[test]
    fn generator_has_heavy_tail() {
        // max in-degree well above the median, across seeds
        for s in 0..20u64 {
            let g = generate_scale_free(2000, 5, s).unwrap();
            let mut degs: Vec<usize> = g
                .nodes()
                .iter()
                .map(|&u| g.in_degree(u).unwrap())
                .collect();
            degs.sort_unstable();
            let median = degs[degs.len() / 2] as f64;
            let max = *degs.last().unwrap() as f64;
            assert!(
                max > 5.0 * median.max(1.0),
                "seed {s}: max {max} vs median {median}"
            );
        }
    }

    #[test]
    fn full_crawl_is_isomorphic() {
        let g = generate_scale_free(100, 3, 5).unwrap();
        let c = partial_crawl(&g, 1.0, 11).unwrap();
        assert_eq!(c.subgraph.node_count(), 100);
        assert_eq!(c.subgraph.edge_count(), g.edge_count());
        let mapped = c.subgraph.apply_permutation(&c.truth).unwrap();
        assert!(mapped.same_edges(&g));
    }

    #[test]
    fn crawl_quota_is_ceiling() {
        let g = generate_scale_free(100, 2, 5).unwrap();
        assert_eq!(partial_crawl(&g, 0.5, 1).unwrap().subgraph.node_count(), 50);
        assert_eq!(
            partial_crawl(&g, 0.501, 1).unwrap().subgraph.node_count(),
            51
        );
        assert_eq!(
            partial_crawl(&g, 0.001, 1).unwrap().subgraph.node_count(),
            1
        );
    }

    #[test]
    fn crawl_rejects_bad_coverage() {
        let g = generate_scale_free(10, 1, 0).unwrap();
        assert!(partial_crawl(&g, 0.0, 0).is_err());
        assert!(partial_crawl(&g, 1.5, 0).is_err());
    }

    #[test]
    fn crawl_truth_is_edge_preserving() {
        let g = generate_scale_free(150, 3, 2).unwrap();
        let c = partial_crawl(&g, 0.6, 3).unwrap();
        assert_eq!(c.truth.len(), c.subgraph.node_count());
        for (u, v) in c.subgraph.edges() {
            let tu = c.truth.get(u).unwrap();
            let tv = c.truth.get(v).unwrap();
            assert!(g.has_edge(tu, tv), "{u}->{v} not an edge under truth");
        }
    }

    #[test]
    fn crawl_overlap_pigeonhole() {
        let g = generate_scale_free(100, 3, 4).unwrap();
        let a = partial_crawl(&g, 0.7, 10).unwrap();
        let b = partial_crawl(&g, 0.7, 20).unwrap();
        let sa: std::collections::HashSet<NodeId> = a.truth.iter().map(|(_, t)| t).collect();
        let overlap = b.truth.iter().filter(|&(_, t)| sa.contains(&t)).count();
        assert!(overlap >= 40, "overlap {overlap}");
    }

    #[test]
    fn crawl_is_deterministic() {
        let g = generate_scale_free(200, 3, 6).unwrap();
        let a = partial_crawl(&g, 0.4, 17).unwrap();
        let b = partial_crawl(&g, 0.4, 17).unwrap();
        assert!(a.subgraph.same_edges(&b.subgraph));
        assert!(a.truth.iter().eq(b.truth.iter()));
    }

    #[test]
    fn obfuscate_round_trip() {
        let g = generate_scale_free(80, 2, 8).unwrap();
        let (obf, back) = obfuscate(&g, 42).unwrap();
        assert!(obf.apply_permutation(&back).unwrap().same_edges(&g));

        let mut din: Vec<usize> = g
            .nodes()
            .iter()
            .map(|&u| g.in_degree(u).unwrap())
            .collect();
        let mut dobf: Vec<usize> = obf
            .nodes()
            .iter()
            .map(|&u| obf.in_degree(u).unwrap())
            .collect();
        din.sort_unstable();
        dobf.sort_unstable();
        assert_eq!(din, dobf);
    }

    #[test]
    fn obfuscate_deterministic() {
        let g = generate_scale_free(80, 2, 8).unwrap();
        let (o1, m1) = obfuscate(&g, 5).unwrap();
        let (o2, m2) = obfuscate(&g, 5).unwrap();
        assert!(o1.same_edges(&o2));
        assert!(m1.iter().eq(m2.iter()));
    }

    /// Hub preservation: the top-20 in-degree hub sets of two independent
    /// 0.7-coverage crawls, pulled back to ground-truth ids, mostly coincide.
    #[test]
    fn hub_preservation_across_crawls() {
        let mut total = 0usize;
        let runs = 10;
        for s in 0..runs as u64 {
            let g = generate_scale_free(2000, 5, 1000 + s).unwrap();
            let a = partial_crawl(&g, 0.7, 2000 + s).unwrap();
            let b = partial_crawl(&g, 0.7, 3000 + s).unwrap();
            let hubs_a: std::collections::HashSet<NodeId> = a
                .subgraph
                .top_k_in_degree(20)
                .unwrap()
                .into_iter()
                .map(|u| a.truth.get(u).unwrap())
                .collect();
            let overlap = b
                .subgraph
                .top_k_in_degree(20)
                .unwrap()
                .into_iter()
                .filter(|&u| hubs_a.contains(&b.truth.get(u).unwrap()))
                .count();
            total += overlap;
        }
        let mean = total as f64 / runs as f64;
        assert!(mean >= 15.0, "mean top-20 hub overlap {mean}");
    }
}
