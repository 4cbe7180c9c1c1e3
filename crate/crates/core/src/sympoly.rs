//! Symmetric multilinear polynomials over `Z_m`, stored in the elementary
//! symmetric basis, and the low-degree polynomial that is nonzero modulo `m`
//! on every nonzero 0/1 point of Hamming weight at most `d`.
//!
//! A symmetric multilinear polynomial `f = Σ c_t e_t` is determined by its
//! values on weights: on a 0/1 point of weight `w` it evaluates to
//! `Σ c_t C(w, t)`. The construction below therefore works entirely in the
//! weight domain and only converts back to coefficients at the end.

use num_bigint::BigUint;

use crate::error::{invalid, Result};
use crate::zmod::{binom_mod, pow_mod, Modulus, PascalRows, ResidueVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPolynomial {
    ell: usize,
    coeffs: Vec<u64>,
    modulus: Modulus,
}

impl SymmetricPolynomial {
    /// Builds `Σ c_t e_t` in `ell` variables. Coefficients are reduced mod `m`
    /// and trailing zeros trimmed.
    pub fn new(ell: usize, coeffs: Vec<u64>, modulus: Modulus) -> Result<Self> {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        if coeffs.len() - 1 > ell {
            return invalid(format!(
                "degree {} exceeds the number of variables {ell}",
                coeffs.len() - 1
            ));
        }
        Ok(SymmetricPolynomial { ell, coeffs, modulus })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `e_t`; zero beyond the degree.
    pub fn coeff(&self, t: usize) -> u64 {
        self.coeffs.get(t).copied().unwrap_or(0)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Value on any 0/1 point of Hamming weight `w`.
    pub fn weight_value(&self, w: usize) -> Result<u64> {
        if w > self.ell {
            return invalid(format!("weight {w} exceeds ell = {}", self.ell));
        }
        let m = self.modulus.value();
        let mut acc = 0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            if c != 0 && t <= w {
                acc = self
                    .modulus
                    .add(acc, self.modulus.mul(c, binom_mod(w as u64, t as u64, m)));
            }
        }
        Ok(acc)
    }

    /// Weight values for `w = 0..=max_w` (clamped to `ell`).
    pub fn weight_values_up_to(&self, max_w: usize) -> Vec<u64> {
        let max_w = max_w.min(self.ell);
        let mut rows = PascalRows::new(self.degree(), self.modulus.value());
        let mut out = Vec::with_capacity(max_w + 1);
        for _ in 0..=max_w {
            let v = rows
                .row()
                .iter()
                .zip(&self.coeffs)
                .fold(0, |acc, (&b, &c)| self.modulus.add(acc, self.modulus.mul(b, c)));
            out.push(v);
            rows.advance();
        }
        out
    }

    /// Weight values for every `w` in `0..=ell`.
    pub fn weight_values(&self) -> Vec<u64> {
        self.weight_values_up_to(self.ell)
    }

    /// The unique symmetric polynomial of degree at most `values.len() - 1`
    /// taking `values[w]` on weight `w`.
    ///
    /// The system `v_w = Σ_{t<=w} c_t C(w,t)` is lower triangular with unit
    /// diagonal, so forward substitution works over any `Z_m`.
    pub fn from_weight_values(values: &[u64], ell: usize, modulus: &Modulus) -> Result<Self> {
        if values.is_empty() {
            return invalid("at least one weight value is required");
        }
        if values.len() - 1 > ell {
            return invalid(format!(
                "{} weight values need at least {} variables, got {ell}",
                values.len(),
                values.len() - 1
            ));
        }
        let mut coeffs: Vec<u64> = Vec::with_capacity(values.len());
        let mut rows = PascalRows::new(values.len() - 1, modulus.value());
        for &v in values {
            let w = coeffs.len();
            let known = coeffs
                .iter()
                .zip(rows.row())
                .fold(0, |acc, (&c, &b)| modulus.add(acc, modulus.mul(c, b)));
            debug_assert_eq!(rows.row()[w], 1 % modulus.value());
            coeffs.push(modulus.sub(modulus.reduce(v), known));
            rows.advance();
        }
        SymmetricPolynomial::new(ell, coeffs, modulus.clone())
    }

    /// Number of multilinear monomials once every `e_t` is expanded.
    pub fn monomial_count(&self) -> BigUint {
        let mut total = BigUint::from(0u32);
        let mut binom = BigUint::from(1u32);
        for t in 0..=self.degree() {
            if t > 0 {
                binom = binom * BigUint::from(self.ell - t + 1) / BigUint::from(t);
            }
            if self.coeffs[t] != 0 {
                total += &binom;
            }
        }
        total
    }
}

/// Modulus-amplifying polynomial
/// `A_e(x) = 1 - (1-x)^e Σ_{j<e} C(e-1+j, j) x^j`, reduced mod `p^e`.
///
/// `A_e` has degree `2e - 1` and maps `0 mod p` to `0 mod p^e` and `1 mod p`
/// to `1 mod p^e`.
pub fn amplify(x: u64, p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    let x = x % q;
    let one_minus = (1 + q - x) % q;
    let mut series = 0u64;
    for j in 0..e as u64 {
        let c = binom_mod(e as u64 - 1 + j, j, q);
        series = (series + c * pow_mod(x, j, q)) % q;
    }
    let prod = (pow_mod(one_minus, e as u64, q) as u128 * series as u128 % q as u128) as u64;
    (1 + q - prod) % q
}

/// Per-prime threshold exponents `a_i`: factor `i` detects `p_i^{a_i} ∤ w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentChoice(pub Vec<u32>);

impl ExponentChoice {
    /// `max_i (2e_i - 1)(p_i^{a_i} - 1)`, the degree bound of the construction.
    pub fn degree_bound(&self, modulus: &Modulus) -> u64 {
        self.0
            .iter()
            .zip(modulus.factors())
            .map(|(&a, f)| (2 * f.exponent as u64 - 1) * (f.prime.pow(a) - 1))
            .max()
            .unwrap_or(0)
    }

    /// `Π p_i^{a_i}`, saturating.
    pub fn detection_range(&self, modulus: &Modulus) -> u64 {
        self.0
            .iter()
            .zip(modulus.factors())
            .fold(1u64, |acc, (&a, f)| acc.saturating_mul(f.prime.saturating_pow(a)))
    }
}

/// Exhaustive search for the exponents with `Π p_i^{a_i} >= d + 1` that
/// minimize the degree bound; ties go to the lexicographically smallest tuple.
pub fn choose_exponents(modulus: &Modulus, d: u64) -> ExponentChoice {
    let factors = modulus.factors();
    let target = d.saturating_add(1);
    // a_i beyond the first power reaching d+1 only raises the bound
    let caps: Vec<u32> = factors
        .iter()
        .map(|f| {
            let mut a = 0;
            let mut pa = 1u64;
            while pa < target {
                pa = pa.saturating_mul(f.prime);
                a += 1;
            }
            a
        })
        .collect();

    let mut best: Option<(u64, Vec<u32>)> = None;
    let mut current = vec![0u32; factors.len()];
    loop {
        let choice = ExponentChoice(current.clone());
        if choice.detection_range(modulus) >= target {
            let bound = choice.degree_bound(modulus);
            // lexicographic enumeration order makes the first minimum the tie-break winner
            if best.as_ref().is_none_or(|(b, _)| bound < *b) {
                best = Some((bound, current.clone()));
            }
        }
        // odometer, last index fastest, yields lexicographic order
        let mut i = factors.len();
        loop {
            if i == 0 {
                return ExponentChoice(best.expect("the all-caps tuple always qualifies").1);
            }
            i -= 1;
            if current[i] < caps[i] {
                current[i] += 1;
                for later in current.iter_mut().skip(i + 1) {
                    *later = 0;
                }
                break;
            }
        }
    }
}

/// Value of the prime-power component on weight `w`:
/// `A_e(1 - Π_{t<a} (1 - C(w, p^t)^{p-1}))` mod `p^e`.
fn component_value(w: u64, p: u64, e: u32, a: u32) -> u64 {
    let q = p.pow(e);
    let mut prod = 1 % q;
    for t in 0..a {
        let b = binom_mod(w, p.pow(t), q);
        let term = (1 + q - pow_mod(b, p - 1, q)) % q;
        prod = (prod as u128 * term as u128 % q as u128) as u64;
    }
    let indicator = (1 + q - prod) % q;
    amplify(indicator, p, e)
}

/// Builds the symmetric polynomial `f` in `ell` variables with
///
/// * `f(0) = 0` and `f(z) ≢ 0 (mod m)` for every `z` of weight `1..=d`;
/// * for every weight, each component `f(z) mod p_i^{e_i}` is 0 or 1.
///
/// Requires at least two distinct primes in `m` and `1 <= d <= ell`.
pub fn bbr_construct(modulus: &Modulus, d: usize, ell: usize) -> Result<SymmetricPolynomial> {
    modulus.require_composite()?;
    if d == 0 {
        return invalid("d must be positive");
    }
    if d > ell {
        return invalid(format!("d = {d} exceeds ell = {ell}"));
    }
    let exponents = choose_exponents(modulus, d as u64);
    let bound = exponents.degree_bound(modulus);
    let top = (bound as usize).min(ell);
    let values: Vec<u64> = (0..=top as u64)
        .map(|w| {
            let rv = ResidueVector(
                modulus
                    .factors()
                    .iter()
                    .zip(&exponents.0)
                    .map(|(f, &a)| component_value(w, f.prime, f.exponent, a))
                    .collect(),
            );
            modulus.crt_combine(&rv)
        })
        .collect::<Result<_>>()?;
    SymmetricPolynomial::from_weight_values(&values, ell, modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::factorize;
    use proptest::prelude::*;

    fn poly(ell: usize, coeffs: &[u64], m: u64) -> SymmetricPolynomial {
        SymmetricPolynomial::new(ell, coeffs.to_vec(), factorize(m).unwrap()).unwrap()
    }

    /// Evaluates `Σ c_t e_t` on an explicit 0/1 vector by summing over subsets.
    fn brute_eval(f: &SymmetricPolynomial, z: &[bool]) -> u64 {
        let m = f.modulus().value();
        let ones = z.iter().filter(|&&b| b).count();
        // e_t(z) is the number of t-subsets of the support
        let mut acc = 0u64;
        for (t, &c) in f.coeffs().iter().enumerate() {
            let mut count = 0u64;
            for mask in 0u64..(1 << ones) {
                if mask.count_ones() as usize == t {
                    count += 1;
                }
            }
            acc = (acc + c * (count % m)) % m;
        }
        acc
    }

    #[test]
    fn weight_value_examples() {
        let f = poly(6, &[0, 1, 2], 6);
        assert_eq!(f.weight_value(3).unwrap(), 3);
        assert_eq!(f.weight_value(5).unwrap(), 1);
        assert_eq!(f.weight_value(0).unwrap(), 0);
        assert_eq!(poly(4, &[5, 1], 6).weight_value(0).unwrap(), 5);
        assert!(f.weight_value(7).is_err());
    }

    #[test]
    fn weight_value_matches_subset_count() {
        let f = poly(8, &[2, 5, 1, 3], 12);
        for w in 0..=8 {
            let z: Vec<bool> = (0..8).map(|i| i < w).collect();
            assert_eq!(f.weight_value(w).unwrap(), brute_eval(&f, &z));
        }
    }

    #[test]
    fn weight_values_table_matches_pointwise() {
        let f = poly(30, &[0, 4, 9, 1, 7], 35);
        let table = f.weight_values();
        assert_eq!(table.len(), 31);
        for (w, &v) in table.iter().enumerate() {
            assert_eq!(v, f.weight_value(w).unwrap());
        }
    }

    #[test]
    fn from_weight_values_examples() {
        let m6 = factorize(6).unwrap();
        let f = SymmetricPolynomial::from_weight_values(&[0, 3], 4, &m6).unwrap();
        assert_eq!(f.coeffs(), &[0, 3]);
        let f = SymmetricPolynomial::from_weight_values(&[0, 1, 4], 6, &m6).unwrap();
        assert_eq!(f.coeffs(), &[0, 1, 2]);
        for (w, v) in [0, 1, 4].iter().enumerate() {
            assert_eq!(f.weight_value(w).unwrap(), *v);
        }
        let f = SymmetricPolynomial::from_weight_values(&[5], 9, &m6).unwrap();
        assert_eq!(f.coeffs(), &[5]);
        assert!(SymmetricPolynomial::from_weight_values(&[0, 1, 2], 1, &m6).is_err());
    }

    #[test]
    fn trimming_and_degree_check() {
        assert_eq!(poly(5, &[0, 1, 0, 0], 6).degree(), 1);
        assert_eq!(poly(5, &[6, 12], 6).coeffs(), &[0]);
        assert!(SymmetricPolynomial::new(1, vec![0, 1, 1], factorize(6).unwrap()).is_err());
    }

    #[test]
    fn amplify_examples() {
        assert_eq!(amplify(5, 3, 1), 2);
        assert_eq!(amplify(1, 2, 2), 1);
        assert_eq!(amplify(2, 2, 2), 0);
        // A_2(x) = 3x^2 - 2x^3 on every residue mod 4
        for x in 0..4u64 {
            let direct = ((3 * x * x) as i64 - (2 * x * x * x) as i64).rem_euclid(4) as u64;
            assert_eq!(amplify(x, 2, 2), direct);
        }
    }

    #[test]
    fn amplify_contract() {
        for p in [2u64, 3, 5] {
            for e in 1..=3u32 {
                let q = p.pow(e);
                for x in 0..q {
                    let y = amplify(x, p, e);
                    if x % p == 0 {
                        assert_eq!(y, 0, "p={p} e={e} x={x}");
                    } else if x % p == 1 {
                        assert_eq!(y, 1 % q, "p={p} e={e} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn lucas_digit_identity_small_primes() {
        for p in [2u64, 3, 5] {
            for w in 0..=200u64 {
                for t in 0..=3u32 {
                    assert_eq!(binom_mod(w, p.pow(t), p), (w / p.pow(t)) % p);
                }
            }
        }
    }

    /// Reference search written independently of `choose_exponents`: every
    /// tuple with entries up to 4, sorted by (bound, tuple).
    fn exponent_oracle(m: u64, d: u64) -> Vec<u32> {
        let modulus = factorize(m).unwrap();
        let r = modulus.num_factors();
        let mut all: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..r {
            all = all
                .into_iter()
                .flat_map(|v| (0..=4u32).map(move |a| [v.clone(), vec![a]].concat()))
                .collect();
        }
        let score = |v: &Vec<u32>| {
            let mut prod = 1u64;
            let mut bound = 0u64;
            for (a, f) in v.iter().zip(modulus.factors()) {
                prod *= f.prime.pow(*a);
                bound = bound.max((2 * f.exponent as u64 - 1) * (f.prime.pow(*a) - 1));
            }
            (prod, bound)
        };
        all.into_iter()
            .filter(|v| score(v).0 > d)
            .min_by(|x, y| score(x).1.cmp(&score(y).1).then(x.cmp(y)))
            .unwrap()
    }

    #[test]
    fn choose_exponents_examples() {
        let m6 = factorize(6).unwrap();
        assert_eq!(choose_exponents(&m6, 5).0, vec![1, 1]);
        assert_eq!(choose_exponents(&m6, 3).0, vec![1, 1]);
        assert_eq!(choose_exponents(&m6, 1).0, vec![1, 0]);
        for m in [6u64, 10, 12, 15, 21, 35, 30] {
            for d in 1..=14u64 {
                assert_eq!(
                    choose_exponents(&factorize(m).unwrap(), d).0,
                    exponent_oracle(m, d),
                    "m={m} d={d}"
                );
            }
        }
    }

    /// Checks both guarantees on the full weight table.
    fn check_bbr(m: u64, d: usize, ell: usize) {
        let modulus = factorize(m).unwrap();
        let f = bbr_construct(&modulus, d, ell).unwrap();
        assert_eq!(f.coeff(0), 0);
        let exps = choose_exponents(&modulus, d as u64);
        assert!(f.degree() as u64 <= exps.degree_bound(&modulus));
        for w in 0..=ell {
            let v = f.weight_value(w).unwrap();
            if w == 0 {
                assert_eq!(v, 0);
            } else if w <= d {
                assert_ne!(v, 0, "m={m} d={d} w={w}");
            }
            let mut some_one = false;
            for q in modulus.prime_powers() {
                assert!(v % q <= 1, "m={m} d={d} w={w} v={v}");
                some_one |= v % q == 1;
            }
            assert!(v == 0 || some_one);
        }
    }

    #[test]
    fn bbr_examples() {
        let m6 = factorize(6).unwrap();
        let f = bbr_construct(&m6, 5, 27).unwrap();
        assert_eq!(f.coeffs(), &[0, 1, 2]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.weight_values_up_to(5), vec![0, 1, 4, 3, 4, 1]);
        check_bbr(6, 5, 27);

        let f = bbr_construct(&m6, 1, 4).unwrap();
        assert_eq!(f.coeffs(), &[0, 3]);
        check_bbr(6, 1, 4);
    }

    #[test]
    fn bbr_errors() {
        let m8 = factorize(8).unwrap();
        assert!(matches!(
            bbr_construct(&m8, 2, 4),
            Err(crate::Error::UnsupportedModulus { .. })
        ));
        let m6 = factorize(6).unwrap();
        assert!(bbr_construct(&m6, 5, 4).is_err());
        assert!(bbr_construct(&m6, 0, 4).is_err());
    }

    #[test]
    fn bbr_contract_exhaustive() {
        for m in [6u64, 10, 15, 21, 12, 30, 36, 45] {
            for d in 1..=40 {
                check_bbr(m, d, d + 10);
            }
        }
    }

    #[test]
    fn bbr_degree_envelope() {
        for m in [6u64, 10, 15, 21, 12] {
            let modulus = factorize(m).unwrap();
            let max_e = modulus
                .factors()
                .iter()
                .map(|f| 2 * f.exponent as u64 - 1)
                .max()
                .unwrap();
            let max_p = modulus.factors().iter().map(|f| f.prime).max().unwrap();
            for d in 1..=40usize {
                let f = bbr_construct(&modulus, d, d + 10).unwrap();
                let root = (1..).find(|s: &u64| s * s > d as u64).unwrap();
                assert!(f.degree() as u64 <= 2 * root * max_e * max_p, "m={m} d={d}");
            }
        }
    }

    #[test]
    fn bbr_truncates_when_ell_is_small() {
        // m = 35, d = ell = 3: the bound exceeds ell
        check_bbr(35, 3, 3);
        check_bbr(77, 2, 2);
    }

    #[test]
    fn monomial_count_examples() {
        assert_eq!(poly(6, &[0, 1, 2], 6).monomial_count(), BigUint::from(21u32));
        assert_eq!(poly(4, &[0, 3], 6).monomial_count(), BigUint::from(4u32));
        assert_eq!(poly(9, &[5], 6).monomial_count(), BigUint::from(1u32));
    }

    proptest! {
        #[test]
        fn weight_roundtrip(
            m in prop::sample::select(vec![6u64, 12, 15, 35]),
            raw in prop::collection::vec(any::<u64>(), 1..=13),
            extra in 0usize..5,
        ) {
            let modulus = factorize(m).unwrap();
            let ell = raw.len() - 1 + extra;
            let f = SymmetricPolynomial::new(ell, raw, modulus.clone()).unwrap();
            let values = f.weight_values_up_to(f.degree());
            let g = SymmetricPolynomial::from_weight_values(&values, ell, &modulus).unwrap();
            prop_assert_eq!(g, f);
        }
    }
}
