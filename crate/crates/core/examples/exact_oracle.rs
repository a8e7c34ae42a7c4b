//! Exact law of the walk at its first coin times by enumerating every coin
//! sequence, next to the closed-form event weight.
//!
//! cargo run --release --example exact_oracle -- [max_coins]

use num_rational::BigRational;
use tsrm::oracle;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let max_coins: u32 = args.get(1).map_or(8, |s| s.parse().expect("max_coins"));
    let law = oracle::enumerate(max_coins).expect("within the enumeration budget");

    for k in 0..=2 {
        println!("law at k = {k}:");
        for e in law.level(k) {
            println!(
                "   x = {:>2}  f = {:<20}  p = {}",
                e.x,
                e.f.to_string(),
                e.p
            );
        }
    }

    let rows = law.event_table();
    let interior = rows.iter().filter(|r| r.is_interior()).count();
    let interior_ok = rows
        .iter()
        .filter(|r| r.is_interior() && r.p == r.weight)
        .count();
    let web_ok = rows.iter().filter(|r| r.p == r.web).count();
    println!(
        "\n{} events (x, f) with the whole interval resolved within {max_coins} coins",
        rows.len()
    );
    println!("   exact = web line count: {web_ok}/{}", rows.len());
    println!("   exact = (1/2)^((m+ - m-) - O(f)) where f(x) >= 1: {interior_ok}/{interior}");
    println!("   at an end of I(f) with f(x) = 0 the web step is forced, e.g.:");
    for r in rows.iter().filter(|r| !r.is_interior()).take(4) {
        println!(
            "      f = {}  x = {:>2}  exact {}  weight {}",
            r.f, r.x, r.p, r.weight
        );
    }

    let a = BigRational::from_integer(8.into());
    let g = oracle::geometric_joint(&law, &a);
    println!("\nwith q_A geometric, A = 8:");
    for e in g.entries.iter().filter(|e| e.k == 1) {
        println!("   x = {:>2}  f = {}  mass {}", e.x, e.f, e.p);
    }
    println!(
        "   truncation mass beyond {max_coins} coins: {}",
        g.truncation_mass
    );
}
