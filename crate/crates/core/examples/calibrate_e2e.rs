// Full-pipeline calibration at the synthetic-contest scale.
use deanon_core::pipeline::{run_all, RunConfig, Workdir};
use std::time::Instant;

fn clf_auc_from_report(wd: &Workdir) -> f64 {
    std::fs::read_to_string(wd.path(deanon_core::pipeline::REPORT))
        .unwrap()
        .lines()
        .find(|l| l.starts_with("clf_auc="))
        .and_then(|l| l.trim_start_matches("clf_auc=").parse().ok())
        .unwrap()
}

fn main() {
    let t_all = Instant::now();
    let mut aug = Vec::new();
    let mut plain = Vec::new();
    for master in 1..=5u64 {
        let dir = tempfile::tempdir().unwrap();
        let wd = Workdir::new(dir.path()).unwrap();
        let cfg = RunConfig::from_toml_str(&format!("master_seed = {master}")).unwrap();
        let t = Instant::now();
        match run_all(&cfg, &wd) {
            Ok(r) => {
                let a = clf_auc_from_report(&wd);
                aug.push(a);
                println!(
                    "seed {master} augmented: auc {:.4}, clf_auc {a:.4}, coverage {:.3}, precision {:.4}, label_acc {:.4}, {:.1}s",
                    r.auc,
                    r.coverage,
                    r.mapping_precision,
                    r.deanon_label_accuracy,
                    t.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("seed {master}: FAILED {e}"),
        }

        let dir2 = tempfile::tempdir().unwrap();
        let wd2 = Workdir::new(dir2.path()).unwrap();
        let cfg2 = RunConfig::from_toml_str(&format!(
            "master_seed = {master}\n[combine]\naugment = false"
        ))
        .unwrap();
        match run_all(&cfg2, &wd2) {
            Ok(_) => {
                let a = clf_auc_from_report(&wd2);
                plain.push(a);
                println!("seed {master} plain:     clf_auc {a:.4}");
            }
            Err(e) => println!("seed {master} plain: FAILED {e}"),
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "mean clf_auc augmented {:.4} vs plain {:.4} (delta {:+.4})",
        mean(&aug),
        mean(&plain),
        mean(&aug) - mean(&plain)
    );
    println!("total {:.1}s", t_all.elapsed().as_secs_f64());
}
