//! Scaled position, height and support of the observation at several
//! scales; consecutive scales get closer in KS distance.
//!
//! cargo run --release --example scaling -- [samples] [seed]

use tsrm::montecarlo::{scaling_diagnostics, ExperimentConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let samples: u64 = args.get(1).map_or(20_000, |s| s.parse().expect("samples"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = ExperimentConfig::new(1e2, samples, seed).with_workers(workers);

    let report = scaling_diagnostics(&config, &[1e2, 1e3, 1e4]);
    println!(
        "{:>7} {:>7} {:>7} {:>10} {:>10} {:>10}",
        "A", "N/A", "area/A", "|x|/A^2/3", "max/A^1/3", "sym KS"
    );
    for l in &report.levels {
        println!(
            "{:>7} {:>7.3} {:>7.3} {:>10.4} {:>10.4} {:>10.5}",
            l.a,
            l.mean_steps_over_a.0,
            l.mean_area_over_a.0,
            l.mean_abs_position.0,
            l.mean_height.0,
            l.symmetry.distance
        );
    }
    for p in &report.pairs {
        println!(
            "KS {} vs {}: position {:.5}  height {:.5}  support {:.5}",
            p.a_lo, p.a_hi, p.position.distance, p.height.distance, p.support.distance
        );
    }
}
