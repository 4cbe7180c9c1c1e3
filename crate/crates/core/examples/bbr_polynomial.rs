//! The symmetric polynomial f with f(0) = 0 and f̂(w) ≢ 0 (mod m) exactly
//! for 1 <= w <= d, each residue being 0 or 1.
//!
//!     cargo run --example bbr_polynomial -- 6 5 15

use symcirc::sympoly::{bbr_construct, choose_exponents};
use symcirc::zmod::factorize;

fn main() -> symcirc::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (m, d, ell) = match args[..] {
        [m, d, ell, ..] => (m, d, ell),
        [m, d] => (m, d, d + 10),
        _ => (6, 5, 15),
    };
    let modulus = factorize(m)?;
    let exps = choose_exponents(&modulus, d);
    let f = bbr_construct(&modulus, d as usize, ell as usize)?;
    println!("m = {modulus}, d = {d}, ell = {ell}");
    println!(
        "exponents a = {:?}, degree bound {}",
        exps.0,
        exps.degree_bound(&modulus)
    );
    println!("coefficients c_0..c_D = {:?}", f.coeffs());
    for (w, v) in f.weight_values().into_iter().enumerate() {
        let residues: Vec<u64> = modulus.prime_powers().map(|q| v % q).collect();
        println!("  f̂({w:>2}) = {v:>3}  residues {residues:?}");
    }
    Ok(())
}
