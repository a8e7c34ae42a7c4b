//! Run the walk, print its first coin times and write the trace and the
//! final local time (CSV and SVG) to a directory.
//!
//! cargo run --release --example simulate_walk -- [steps] [seed] [out_dir]

use std::fs::File;

use tsrm::export;
use tsrm::rng::{SeedSpec, StreamCoins};
use tsrm::walk;

fn main() -> std::io::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: u64 = args.get(1).map_or(5000, |s| s.parse().expect("steps"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let out = args.get(3).map_or("walk_out".to_string(), |s| s.clone());

    let mut coins = StreamCoins::new(SeedSpec::new(seed).stream("walk"));
    let (trace, state) = walk::run_audited(steps, &mut coins).expect("invariants hold");

    println!(
        "{steps} steps, final position {}, {} coins",
        state.position(),
        state.coin_count()
    );
    println!("first coin times N(k) and heights:");
    for (k, &n) in trace.coin_times.iter().take(10).enumerate() {
        println!(
            "  N({k}) = {n:>4}   H = {:>3}   (N + H)/2 = {}",
            trace.heights[n as usize],
            (n as i64 + trace.heights[n as usize]) / 2
        );
    }
    if let Some((lo, hi)) = state.profile().support() {
        println!("visited edges: [{lo}+1/2, {hi}+1/2]");
    }

    std::fs::create_dir_all(&out)?;
    trace.write_csv(File::create(format!("{out}/trace.csv"))?)?;
    state
        .profile()
        .write_csv(File::create(format!("{out}/local_time.csv"))?)?;
    std::fs::write(format!("{out}/trace.svg"), export::trace_svg(&trace))?;
    std::fs::write(
        format!("{out}/local_time.svg"),
        export::profile_svg(state.profile()),
    )?;
    println!("wrote {out}/trace.csv, local_time.csv and their SVG plots");
    Ok(())
}
