//! Gate counts of the construction next to the n-1 and C(n,2) baselines.

use symcirc::circuit::{from_cover2d, naive_snk_circuit};
use symcirc::cover2d::S2Construction;
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let modulus = factorize(6)?;
    println!(
        "{:>6} {:>4} {:>6} {:>8} {:>10} {:>8} {:>10}",
        "n", "h", "items", "products", "gate_total", "n-1", "C(n,2)"
    );
    for n in [4usize, 16, 64, 256, 1024] {
        let built = S2Construction::build(n, &modulus)?;
        let size = from_cover2d(&built.cover).size();
        let naive = naive_snk_circuit(n, 2, &modulus)?.size();
        println!(
            "{n:>6} {:>4} {:>6} {:>8} {:>10} {:>8} {:>10}",
            built.initial.len(),
            built.cover.len(),
            size.products,
            size.gate_total,
            n - 1,
            naive.products
        );
    }
    println!("{}", symcirc::cli::ASYMPTOTIC_NOTE);
    Ok(())
}
