//! Gamma and Airy identities behind the hidden-burglar constant, as a
//! table of residuals.
//!
//! cargo run --release --example airy_check

use tsrm::analytics;

fn main() {
    let check = analytics::airy_check().expect("tail bound within tolerance");
    print!("{}", check.to_text());
    println!(
        "integration horizon H = {}, tail bound {:.1e}",
        check.quadrature.horizon, check.quadrature.tail_bound
    );
    for h in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let (u, du) = analytics::airy_u(h);
        println!(
            "u({h}) = {:.12}  u'({h}) = {:.12}  v({h}) = {:.12}",
            u.value,
            du.value,
            analytics::v(h)
        );
    }
    if !check.passed() {
        std::process::exit(1);
    }
}
