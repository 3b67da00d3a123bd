// Diagnose the catastrophic-stall graphs in the planted-copy sweep.
use deanon_core::crawl::{generate_scale_free, obfuscate};
use deanon_core::graph::NodeMapping;
use deanon_core::propagate::{diagnose_stall, propagate, PropagationConfig};

fn main() {
    let runs = 50u64;
    let cfg = PropagationConfig {
        theta: 0.05,
        max_rounds: 50,
        ..Default::default()
    };
    let mut worst: Vec<(f64, u64)> = Vec::new();
    for s in 0..runs {
        let g1 = generate_scale_free(200, 3, 100 + s).unwrap();
        let (g2, back) = obfuscate(&g1, 300 + s).unwrap();
        let pi = back.inverted();
        let hubs = g1.top_k_in_degree(5).unwrap();
        let seeds =
            NodeMapping::from_pairs(hubs.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        worst.push((out.len() as f64 / 200.0, s));
    }
    worst.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    println!("worst five: {:?}", &worst[..5]);

    for &(cov, s) in &worst[..3] {
        let g1 = generate_scale_free(200, 3, 100 + s).unwrap();
        let (g2, back) = obfuscate(&g1, 300 + s).unwrap();
        let pi = back.inverted();
        let hubs = g1.top_k_in_degree(5).unwrap();
        let seeds =
            NodeMapping::from_pairs(hubs.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        let diag = diagnose_stall(&g1, &g2, &out, &cfg);
        let hub_degs: Vec<usize> = hubs.iter().map(|&h| g1.in_degree(h).unwrap()).collect();
        println!(
            "seed {s}: cov {cov:.3}, mapped {}, hub in-degs {hub_degs:?}, stall {:?}",
            out.len(),
            diag
        );
    }
}
