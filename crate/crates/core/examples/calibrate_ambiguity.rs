// Color-refinement ambiguity analysis of the stubborn planted-copy graphs.
use deanon_core::crawl::{generate_scale_free, obfuscate};
use deanon_core::graph::{DirectedGraph, NodeMapping};
use deanon_core::propagate::{propagate, PropagationConfig};
use std::collections::HashMap;

/// Directed 1-WL color refinement. Returns the number of nodes that share a
/// final color with at least one other node (structurally ambiguous for any
/// method that only sees colors).
fn ambiguous_nodes(g: &DirectedGraph) -> usize {
    let n = g.node_count();
    let mut color: Vec<u64> = (0..n)
        .map(|i| (g.out_at(i).len() as u64) << 32 | g.in_at(i).len() as u64)
        .collect();
    for _ in 0..n.ilog2() as usize + 2 {
        let mut sig: Vec<(u64, Vec<u64>, Vec<u64>)> = (0..n)
            .map(|i| {
                let mut o: Vec<u64> = g
                    .out_at(i)
                    .iter()
                    .map(|&v| color[g.index_of(v).unwrap()])
                    .collect();
                o.sort_unstable();
                let mut inn: Vec<u64> = g
                    .in_at(i)
                    .iter()
                    .map(|&v| color[g.index_of(v).unwrap()])
                    .collect();
                inn.sort_unstable();
                (color[i], o, inn)
            })
            .collect();
        let mut palette: HashMap<(u64, Vec<u64>, Vec<u64>), u64> = HashMap::new();
        for (i, s) in sig.drain(..).enumerate() {
            let next = palette.len() as u64;
            color[i] = *palette.entry(s).or_insert(next);
        }
    }
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &c in &color {
        *counts.entry(c).or_insert(0) += 1;
    }
    (0..n)
        .filter(|&i| counts[&color[i]] >= 2)
        .count()
}

fn main() {
    let cfg = PropagationConfig {
        theta: 0.05,
        max_rounds: 50,
        ..Default::default()
    };
    for s in 0..50u64 {
        let g1 = generate_scale_free(200, 3, 100 + s).unwrap();
        let (g2, back) = obfuscate(&g1, 300 + s).unwrap();
        let pi = back.inverted();
        let order = g1.top_k_in_degree(200).unwrap();
        let nodes: Vec<_> = [0usize, 20, 40, 60, 80].iter().map(|&i| order[i]).collect();
        let seeds =
            NodeMapping::from_pairs(nodes.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        let cov = out.len() as f64 / 200.0;
        if cov < 0.93 {
            let amb = ambiguous_nodes(&g1);
            println!(
                "seed {s}: coverage {cov:.3} ({} mapped), WL-ambiguous nodes {amb}/200",
                out.len()
            );
        }
    }
}
