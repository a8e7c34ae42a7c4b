//! Position of the walker within its admissible interval, at a geometric
//! number of coins: the jittered rank statistic approaches the uniform law
//! as the scale grows.
//!
//! cargo run --release --example uniformity -- [samples] [seed]

use tsrm::montecarlo::{uniformity_test, ExperimentConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let samples: u64 = args.get(1).map_or(20_000, |s| s.parse().expect("samples"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = ExperimentConfig::new(100.0, samples, seed).with_workers(workers);

    let report = uniformity_test(&config, &[1e2, 1e3, 1e4]);
    println!(
        "{:>8} {:>8} {:>10} {:>10} {:>10}",
        "A", "used", "KS", "KS p", "chi2 p"
    );
    for l in &report.levels {
        println!(
            "{:>8} {:>8} {:>10.5} {:>10.3e} {:>10.3e}",
            l.a, l.used, l.ks.distance, l.ks.p_value, l.chi_square.p_value
        );
    }
    println!("KS strictly decreasing in A: {}", report.decreasing);
    if let Some(m) = report.mirror {
        println!(
            "mirror check KS(U, 1 - U'): {:.5} (p = {:.3})",
            m.distance, m.p_value
        );
    }
}
