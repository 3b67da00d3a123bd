// Scratch calibration runner for annealer acceptance thresholds.
use deanon_core::rng::make_rng;
use deanon_core::seed::*;
use deanon_core::NodeId;
use rand::Rng;
use std::time::Instant;

fn random_matrix(k: usize, rng: &mut impl Rng) -> SeedWeightMatrix {
    let mut w = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                w[i * k + j] = rng.gen::<f64>();
            }
        }
    }
    SeedWeightMatrix::from_raw((0..k as u64).map(NodeId).collect(), w).unwrap()
}

fn reindexed(a: &SeedWeightMatrix, pi: &[usize]) -> SeedWeightMatrix {
    let k = a.k();
    let mut w = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            w[pi[i] * k + pi[j]] = a.get(i, j);
        }
    }
    SeedWeightMatrix::from_raw((0..k as u64).map(NodeId).collect(), w).unwrap()
}

fn random_perm(k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

fn main() {
    // Criterion 1 shape: k=7 random instances vs brute force, with timing.
    let mut rng = make_rng(11);
    let t0 = Instant::now();
    let mut hits = 0;
    for trial in 0..100u64 {
        let a = random_matrix(7, &mut rng);
        let b = random_matrix(7, &mut rng);
        let cfg = AnnealConfig::defaults(&a, &b, 9000 + trial).unwrap();
        let annealed = anneal(&a, &b, &cfg).unwrap();
        let exact = brute_force_match(&a, &b).unwrap();
        if (annealed.cost - exact.cost).abs() <= 1e-9 {
            hits += 1;
        }
    }
    println!(
        "k=7 vs brute force: {hits}/100 optimal, {:.2}s (anneal+brute)",
        t0.elapsed().as_secs_f64()
    );

    // Criterion 2 shape: planted 20x20.
    let mut rng = make_rng(21);
    let t0 = Instant::now();
    let mut hits = 0;
    for trial in 0..100u64 {
        let a = random_matrix(20, &mut rng);
        let pi = random_perm(20, &mut rng);
        let b = reindexed(&a, &pi);
        let cfg = AnnealConfig::defaults(&a, &b, 7000 + trial).unwrap();
        let s = anneal(&a, &b, &cfg).unwrap();
        if s.cost <= 1e-9 {
            hits += 1;
        }
    }
    println!(
        "planted k=20: {hits}/100 zero-cost, {:.2}s",
        t0.elapsed().as_secs_f64()
    );

    // e2e-scale anneal: one k=40 planted instance timing.
    let mut rng = make_rng(31);
    let a = random_matrix(40, &mut rng);
    let pi = random_perm(40, &mut rng);
    let b = reindexed(&a, &pi);
    let t0 = Instant::now();
    let cfg = AnnealConfig::defaults(&a, &b, 1).unwrap();
    let s = anneal(&a, &b, &cfg).unwrap();
    println!(
        "planted k=40: cost {:.3}, {:.2}s",
        s.cost,
        t0.elapsed().as_secs_f64()
    );

    // k=40 non-planted (worst-case runtime: no zero-cost early exit).
    let mut rng = make_rng(41);
    let a = random_matrix(40, &mut rng);
    let b = random_matrix(40, &mut rng);
    let t0 = Instant::now();
    let cfg = AnnealConfig::defaults(&a, &b, 2).unwrap();
    let s = anneal(&a, &b, &cfg).unwrap();
    println!(
        "random k=40: cost {:.3}, {:.2}s",
        s.cost,
        t0.elapsed().as_secs_f64()
    );
}
