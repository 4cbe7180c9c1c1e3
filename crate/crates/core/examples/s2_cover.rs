//! Builds the weighted rectangle cover for S_n^2(x, y) and checks it cell by cell.
//!
//!     cargo run --example s2_cover -- 16 6

use symcirc::circuit::from_cover2d;
use symcirc::cover2d::{verify_s2_properties, S2Construction};
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(16) as usize;
    let m = args.next().unwrap_or(6);
    let built = S2Construction::build(n, &factorize(m)?)?;

    println!(
        "N = {}, g = {}, {} initial rectangles",
        built.scheme.base,
        built.scheme.digits,
        built.initial.len()
    );
    println!("polynomial coefficients {:?}", built.poly.coeffs());
    println!("{} weighted rectangles after the transformation", built.cover.len());
    for it in built.cover.items().iter().take(5) {
        println!("  w={} rows={:?} cols={:?}", it.weight, it.rect.rows, it.rect.cols);
    }

    let report = verify_s2_properties(&built.cover);
    println!(
        "cells checked {}, violations {}",
        report.cells_checked,
        report.violations.len()
    );
    let size = from_cover2d(&built.cover).size();
    println!("gate_total {}, products {}", size.gate_total, size.products);
    Ok(())
}
