//! Exact arithmetic in `Z_m` and its prime-power components.
//!
//! All residues are canonical representatives in `[0, m)`. Moduli are limited
//! to `m <= 2^32`, so a product of two residues always fits in a `u64`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest modulus accepted by [`factorize`].
pub const MAX_MODULUS: u64 = 1 << 32;

/// One component `p^e` of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "{}", self.prime)
        } else {
            write!(f, "{}^{}", self.prime, self.exponent)
        }
    }
}

/// A modulus `m >= 2` together with its prime factorization, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u64,
    factors: Vec<PrimePower>,
}

/// Residues of one integer modulo each prime-power factor of a [`Modulus`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueVector(pub Vec<u64>);

/// Factorizes `m` by trial division.
pub fn factorize(m: u64) -> Result<Modulus> {
    if m < 2 {
        return invalid(format!("modulus must be at least 2, got {m}"));
    }
    if m > MAX_MODULUS {
        return invalid(format!("modulus {m} exceeds 2^32"));
    }
    let mut rest = m;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut exponent = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                exponent += 1;
            }
            factors.push(PrimePower { prime: p, exponent });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(PrimePower {
            prime: rest,
            exponent: 1,
        });
    }
    Ok(Modulus { m, factors })
}

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        factorize(m)
    }

    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// Number of distinct primes `r`.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(PrimePower::value)
    }

    /// Fails with `UnsupportedModulus` unless `m` has at least two distinct prime factors.
    pub fn require_composite(&self) -> Result<()> {
        if self.factors.len() < 2 {
            return Err(Error::UnsupportedModulus {
                m: self.m,
                reason: "needs at least two distinct prime factors".into(),
            });
        }
        Ok(())
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.m
    }

    pub fn reduce_signed(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.m
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.m - b % self.m) % self.m
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn residues(&self, x: u64) -> ResidueVector {
        ResidueVector(self.prime_powers().map(|q| x % q).collect())
    }

    pub fn crt_combine(&self, rv: &ResidueVector) -> Result<u64> {
        crt_combine(rv, self)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.m)?;
        for (i, pp) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{pp}")?;
        }
        Ok(())
    }
}

/// The unique `x` in `[0, m)` congruent to `rv[i]` modulo each prime power.
pub fn crt_combine(rv: &ResidueVector, modulus: &Modulus) -> Result<u64> {
    if rv.0.len() != modulus.factors.len() {
        return invalid(format!(
            "residue vector has {} entries but modulus {} has {} factors",
            rv.0.len(),
            modulus.m,
            modulus.factors.len()
        ));
    }
    let m = modulus.m;
    let mut x = 0u64;
    for (&r, q) in rv.0.iter().zip(modulus.prime_powers()) {
        let cofactor = m / q;
        // cofactor is a unit mod q because the prime powers are coprime
        let inv = mod_inverse(cofactor as i64, q)?;
        let idempotent = modulus.mul(cofactor, inv);
        x = modulus.add(x, modulus.mul(idempotent, r % q));
    }
    Ok(x)
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return invalid(format!("modulus must be at least 2, got {m}"));
    }
    let a = (a as i128).rem_euclid(m as i128);
    let eg = a.extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return Err(Error::NotInvertible {
            a: a as u64,
            m,
            gcd: eg.gcd as u64,
        });
    }
    Ok(eg.x.rem_euclid(m as i128) as u64)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Exponent of the prime `q` in `C(w, t)`, by Legendre's formula.
fn binomial_valuation(w: u64, t: u64, q: u64) -> u64 {
    let mut v = 0;
    let mut qi = q;
    loop {
        v += w / qi - t / qi - (w - t) / qi;
        match qi.checked_mul(q) {
            Some(next) if next <= w => qi = next,
            _ => break,
        }
    }
    v
}

/// `C(w, t) mod m`, computed from the exact prime factorization of the
/// binomial coefficient. No modular division is involved, so the result is
/// correct for every `m`, including ones sharing factors with `w!`.
pub fn binom_mod(w: u64, t: u64, m: u64) -> u64 {
    if t > w {
        return 0;
    }
    if m == 1 {
        return 0;
    }
    let t = t.min(w - t);
    if t == 0 {
        return 1 % m;
    }
    let mut acc = 1 % m;
    for q in primes_up_to(w) {
        let v = binomial_valuation(w, t, q);
        if v > 0 {
            acc = ((acc as u128 * pow_mod(q, v, m) as u128) % m as u128) as u64;
            if acc == 0 {
                break;
            }
        }
    }
    acc
}

/// Pascal rows `C(w, 0..=max_t) mod m` for `w = 0, 1, 2, ...`.
///
/// Used where every weight up to some bound is needed, so each row costs
/// `O(max_t)` instead of a fresh factorization.
#[derive(Debug, Clone)]
pub struct PascalRows {
    m: u64,
    row: Vec<u64>,
    w: u64,
}

impl PascalRows {
    pub fn new(max_t: usize, m: u64) -> Self {
        let mut row = vec![0; max_t + 1];
        row[0] = 1 % m;
        PascalRows { m, row, w: 0 }
    }

    /// Current row, i.e. `C(w, t) mod m` for `t = 0..=max_t`.
    pub fn row(&self) -> &[u64] {
        &self.row
    }

    pub fn weight(&self) -> u64 {
        self.w
    }

    pub fn advance(&mut self) {
        for t in (1..self.row.len()).rev() {
            self.row[t] = (self.row[t] + self.row[t - 1]) % self.m;
        }
        self.w += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn factorial(k: u64) -> u64 {
    (1..=k).product()
}
