//! Read the modified local time `f` at a coin time, its admissible
//! interval and internal zeros, and check the hit-time round trip.
//!
//! cargo run --release --example modified_profile -- [coins] [seed]

use tsrm::observables::{self, k_bounds};
use tsrm::rng::{SeedSpec, StreamCoins};
use tsrm::walk::WalkState;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let coins_wanted: u64 = args.get(1).map_or(40, |s| s.parse().expect("coins"));
    let seed: u64 = args.get(2).map_or(3, |s| s.parse().expect("seed"));

    let mut coins = StreamCoins::new(SeedSpec::new(seed).stream("walk"));
    let mut state = WalkState::new();
    for k in [1, coins_wanted / 4, coins_wanted / 2, coins_wanted] {
        state.run_to_coin(k.max(1), &mut coins, u64::MAX);
        let f = observables::modify_state(&state).expect("coin time");
        let interval = f.interval().expect("well formed");
        let (n, kk) = observables::hit_time(&f, state.position()).expect("x in I(f)");
        let (lo, hi) = k_bounds(&f);
        println!(
            "k = {:>3}  N(k) = {:>5}  x = {:>3}",
            state.coin_count(),
            state.step_count(),
            state.position()
        );
        println!(
            "   f on [{}, {}]: {:?}",
            f.m_minus(),
            f.m_plus(),
            f.values()
        );
        println!(
            "   I(f) = {interval} (#I = {}), internal zeros {:?}, area {}",
            interval.len(),
            f.internal_zeros(),
            f.area()
        );
        println!(
            "   hit time (n, k) = ({n}, {kk}); k in [{lo}, {hi}]; weight of E_(x,f) = {}",
            observables::event_weight(&f)
        );
    }
}
