//! The walk as an explorer of the discrete web: both constructions read the
//! same rectangle coins and produce the same path.
//!
//! cargo run --release --example maze_coupling -- [steps] [seed]

use tsrm::rng::{AnchorCoins, SeedSpec};
use tsrm::walk;
use tsrm::web::{explore, LatticePoint, WebStore};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let steps: u64 = args.get(1).map_or(10_000, |s| s.parse().expect("steps"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let key = SeedSpec::new(seed).stream("web");

    let (walked, _) = walk::run_with(steps, &mut AnchorCoins::new(key));
    let (explored, explorer) =
        explore(WebStore::new(key), steps).expect("explorer stays on the lattice");
    assert_eq!(walked, explored);
    println!("{steps} steps: walk and maze explorer agree at every step");
    println!("rectangles revealed: {}", explorer.store.revealed_count());

    // lines of the web through a few forward points
    let mut store = WebStore::new(key);
    for h in [2, 4, 6] {
        let start = LatticePoint::new(0, h);
        let ends: Vec<i64> = (1..=8)
            .map(|e| {
                store
                    .forward_line(start, tsrm::walk::EdgeIndex(e))
                    .expect("forward line")
            })
            .collect();
        println!("forward line from (1/2, {h}): heights {ends:?}");
    }
}
