//! Box cover for S_n^k(x^1, ..., x^k) built from a perfect hash family.
//!
//!     cargo run --example sk_cover -- 12 3 35

use symcirc::coverkd::{ordering_violations, verify_sk_properties, HashStrategy, SkConstruction, VerifyOptions};
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(12) as usize;
    let k = args.next().unwrap_or(3) as usize;
    let m = args.next().unwrap_or(35);
    let built = SkConstruction::build(n, k, &factorize(m)?, 2 * k, HashStrategy::Greedy, 0)?;

    println!("hash family: u = {} rows over {} symbols", built.hash.u(), built.hash.b);
    println!(
        "{} initial boxes, polynomial {:?}",
        built.initial.len(),
        built.poly.coeffs()
    );
    println!("{} weighted boxes", built.cover.len());

    let report = verify_sk_properties(&built.cover, &VerifyOptions::default());
    println!(
        "{:?}: {} tuples, {} violations",
        report.mode,
        report.tuples_checked,
        report.violations.len()
    );
    println!("ordering violations: {}", ordering_violations(&built.cover).len());
    Ok(())
}
