// Grid-search seed spreads and propagation knobs for the planted-copy probe.
use deanon_core::crawl::{generate_scale_free, obfuscate};
use deanon_core::graph::NodeMapping;
use deanon_core::propagate::{propagate, PropagationConfig};

fn main() {
    let spreads: Vec<(&str, Vec<usize>)> = vec![
        ("0-20-40-60-80", vec![0, 20, 40, 60, 80]),
        ("0-25-50-75-100", vec![0, 25, 50, 75, 100]),
        ("0-10-25-45-70", vec![0, 10, 25, 45, 70]),
        ("0-1-25-50-75", vec![0, 1, 25, 50, 75]),
        ("0-15-35-60-90", vec![0, 15, 35, 60, 90]),
        ("0-30-60-90-120", vec![0, 30, 60, 90, 120]),
    ];
    for (name, idxs) in &spreads {
        for (theta, cap) in [(0.05, 50), (0.02, 50), (0.05, 100)] {
            let cfg = PropagationConfig {
                theta,
                max_rounds: 50,
                candidate_cap: cap,
                ..Default::default()
            };
            let runs = 50u64;
            let (mut total, mut worst, mut below90, mut violations) =
                (0.0, f64::INFINITY, 0, 0usize);
            for s in 0..runs {
                let g1 = generate_scale_free(200, 3, 100 + s).unwrap();
                let (g2, back) = obfuscate(&g1, 300 + s).unwrap();
                let pi = back.inverted();
                let order = g1.top_k_in_degree(200).unwrap();
                let nodes: Vec<_> = idxs.iter().map(|&i| order[i]).collect();
                let seeds = NodeMapping::from_pairs(
                    nodes.iter().map(|&h| (h, pi.get(h).unwrap())),
                )
                .unwrap();
                let out = propagate(&g1, &g2, &seeds, &cfg).unwrap();
                violations += out.iter().filter(|&(a, b)| pi.get(a) != Some(b)).count();
                let cov = out.len() as f64 / 200.0;
                total += cov;
                if cov < worst {
                    worst = cov;
                }
                if cov < 0.9 {
                    below90 += 1;
                }
            }
            println!(
                "{name} theta={theta} cap={cap}: mean {:.3}, worst {:.3}, below90 {below90}/50, wrong {violations}",
                total / runs as f64,
                worst
            );
        }
    }
}
