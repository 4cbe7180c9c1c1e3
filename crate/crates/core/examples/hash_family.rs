//! Perfect hash families H(n, k, b) from both strategies.
//!
//!     cargo run --example hash_family -- 40 3 6

use symcirc::coverkd::{build_hash_family, verify_hash_family, HashStrategy};

fn main() -> symcirc::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(40);
    let k = args.next().unwrap_or(3);
    let b = args.next().unwrap_or(2 * k);
    for strategy in [HashStrategy::Greedy, HashStrategy::Randomized] {
        for seed in 0..3 {
            let h = build_hash_family(n, k, b, strategy, seed)?;
            let verdict = verify_hash_family(&h);
            println!(
                "{:<10} seed {seed}: u = {:>3}, {} subsets checked, {} unseparated",
                strategy.as_str(),
                h.u(),
                verdict.subsets_checked,
                verdict.failing.len()
            );
        }
    }
    Ok(())
}
