//! Identifying the variable groups turns the multilinear S_n^k(x^1, ..., x^k)
//! circuit into one for S_n^k(x), after scaling by (k!)^{-1} mod m.
//!
//!     cargo run --example single_group -- 12 3 35

use symcirc::astrong::{check_astrong, target_coefficients};
use symcirc::circuit::{
    expand_coefficients, from_coverkd, identification_scale, identify_variables_and_scale, DEFAULT_EXPANSION_BUDGET,
};
use symcirc::coverkd::{build_sk_cover, HashStrategy};
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let n = args.next().unwrap_or(12) as usize;
    let k = args.next().unwrap_or(3) as usize;
    let modulus = factorize(args.next().unwrap_or(35))?;

    let scale = identification_scale(k, &modulus)?;
    println!("({k}!)^-1 mod {} = {scale}", modulus.value());
    let cover = build_sk_cover(n, k, &modulus, 2 * k, HashStrategy::Greedy, 0)?;
    let single = identify_variables_and_scale(&from_coverkd(&cover))?;
    println!("{} gates over one group of {n} variables", single.gates.len());
    let expanded = expand_coefficients(&single, DEFAULT_EXPANSION_BUDGET)?;
    let report = check_astrong(&expanded, &target_coefficients(n, k, false, &modulus)?, &modulus)?;
    print!("{}", report.to_lines());

    // m = 6 shares a factor with 2!, so no scale exists
    if let Err(e) = identification_scale(2, &factorize(6)?) {
        println!("m = 6, k = 2: {e}");
    }
    Ok(())
}
