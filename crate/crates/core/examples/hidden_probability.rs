//! Probability that the admissible interval is the whole support of the
//! local time: Monte Carlo along a ladder of scales against the exact
//! constant.
//!
//! cargo run --release --example hidden_probability -- [samples] [seed]

use tsrm::analytics;
use tsrm::montecarlo::{hidden_probability_mc, ExperimentConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let samples: u64 = args.get(1).map_or(20_000, |s| s.parse().expect("samples"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = ExperimentConfig::new(1e3, samples, seed).with_workers(workers);

    let exact = analytics::hidden_probability_exact();
    println!(
        "exact: 1 - 9 sqrt(3) G(2/3)^6 / (4 pi^3) = {:.12}",
        exact.closed_form
    );
    println!(
        "       u'(0)^3 + 1                       = {:.12}",
        exact.airy_form
    );

    let report = hidden_probability_mc(&config, &[1e2, 1e3, 1e4]);
    for l in &report.levels {
        println!(
            "A = {:>7}: {:.4} +/- {:.4}{}",
            l.a,
            l.estimate,
            l.std_err,
            if l.small_a { "  (small A)" } else { "" }
        );
    }
    if let Some(e) = report.extrapolated {
        println!("extrapolated from the last two scales (display only): {e:.4}");
    }
}
