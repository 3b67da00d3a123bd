// Scratch calibration for propagation coverage on planted copies.
use deanon_core::crawl::{generate_scale_free, obfuscate};
use deanon_core::graph::NodeMapping;
use deanon_core::propagate::{propagate, PropagationConfig};

fn main() {
    for (n, m, seeds_k, runs) in [(150usize, 3usize, 5usize, 10u64), (200, 3, 5, 50)] {
        let mut worst = f64::INFINITY;
        let mut total = 0.0;
        let mut violations = 0usize;
        for s in 0..runs {
            let g1 = generate_scale_free(n, m, 100 + s).unwrap();
            let (g2, back) = obfuscate(&g1, 200 + s).unwrap();
            let pi = back.inverted();
            let hubs = g1.top_k_in_degree(seeds_k).unwrap();
            let seeds =
                NodeMapping::from_pairs(hubs.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
            let out = propagate(&g1, &g2, &seeds, &PropagationConfig::default()).unwrap();
            for (a, b) in out.iter() {
                if pi.get(a) != Some(b) {
                    violations += 1;
                }
            }
            let cov = out.len() as f64 / n as f64;
            total += cov;
            if cov < worst {
                worst = cov;
            }
        }
        println!(
            "n={n} m={m} runs={runs}: mean coverage {:.3}, worst {:.3}, violations {violations}",
            total / runs as f64,
            worst
        );
    }

    // how far do rounds get? inspect one sluggish case with more rounds
    let g1 = generate_scale_free(150, 3, 100).unwrap();
    let (g2, back) = obfuscate(&g1, 200).unwrap();
    let pi = back.inverted();
    let hubs = g1.top_k_in_degree(5).unwrap();
    let seeds = NodeMapping::from_pairs(hubs.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
    for rounds in [5, 10, 20, 40] {
        let cfg = PropagationConfig {
            max_rounds: rounds,
            ..Default::default()
        };
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        println!("rounds={rounds}: {} of 150", out.len());
    }
    for theta in [0.0, 0.1, 0.3, 0.5] {
        let cfg = PropagationConfig {
            theta,
            ..Default::default()
        };
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        let wrong = out.iter().filter(|&(a, b)| pi.get(a) != Some(b)).count();
        println!("theta={theta}: {} of 150, wrong {wrong}", out.len());
    }
    for bidi in [true, false] {
        let cfg = PropagationConfig {
            bidirectional_check: bidi,
            ..Default::default()
        };
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        let wrong = out.iter().filter(|&(a, b)| pi.get(a) != Some(b)).count();
        println!("bidi={bidi}: {} of 150, wrong {wrong}", out.len());
    }

    // classify why unmapped nodes are stuck at the stalled state
    for theta in [0.5, 0.1, 0.01] {
        let cfg = PropagationConfig {
            theta,
            ..Default::default()
        };
        let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
        let diag = deanon_core::propagate::diagnose_stall(&g1, &g2, &out, &cfg);
        println!("stall breakdown theta={theta} ({} mapped): {:?}", out.len(), diag);
    }

    // structural twin ceiling + coverage with a generous round budget
    for theta in [0.3, 0.1, 0.05] {
        let mut worst = f64::INFINITY;
        let mut total = 0.0;
        let mut violations = 0usize;
        let mut twin_total = 0usize;
        let runs = 50u64;
        for s in 0..runs {
            let g1 = generate_scale_free(200, 3, 100 + s).unwrap();
            // twin classes: identical (out-set, in-set)
            let mut sig: std::collections::HashMap<(Vec<u64>, Vec<u64>), usize> =
                std::collections::HashMap::new();
            for &u in g1.nodes() {
                let o: Vec<u64> = g1.out_neighbors(u).unwrap().iter().map(|n| n.0).collect();
                let i: Vec<u64> = g1.in_neighbors(u).unwrap().iter().map(|n| n.0).collect();
                *sig.entry((o, i)).or_insert(0) += 1;
            }
            twin_total += sig.values().filter(|&&c| c >= 2).map(|&c| c).sum::<usize>();

            let (g2, back) = obfuscate(&g1, 300 + s).unwrap();
            let pi = back.inverted();
            let hubs = g1.top_k_in_degree(5).unwrap();
            let seeds =
                NodeMapping::from_pairs(hubs.iter().map(|&h| (h, pi.get(h).unwrap()))).unwrap();
            let cfg = PropagationConfig {
                theta,
                max_rounds: 50,
                ..Default::default()
            };
            let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
            for (a, b) in out.iter() {
                if pi.get(a) != Some(b) {
                    violations += 1;
                }
            }
            let cov = out.len() as f64 / 200.0;
            total += cov;
            if cov < worst {
                worst = cov;
            }
        }
        println!(
            "theta={theta} rounds=50 n=200: mean cov {:.3}, worst {:.3}, violations {violations}, \
             twin nodes/graph {:.1}",
            total / runs as f64,
            worst,
            twin_total as f64 / runs as f64
        );
    }
}
