//! Coefficient-wise check that one polynomial a-strongly represents another
//! modulo a composite `m`: every coefficient `b_I` agrees with `a_I` modulo at
//! least one prime power `p_j^{e_j}`, and vanishes modulo every prime power
//! where it disagrees.

use std::fmt::Write as _;

use crate::circuit::{distinct_tuples, CoefficientMap, Monomial, VarId, VariableSpace};
use crate::error::{invalid, Error, Result};
use crate::zmod::Modulus;

/// Status of one coefficient modulo one prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorStatus {
    /// `a ≡ b`.
    Agrees,
    /// `a ≢ b` but `b ≡ 0`, which is allowed.
    Vanishes,
    /// `a ≢ b` and `b ≢ 0`.
    Violates,
}

fn factor_statuses(a: u64, b: u64, modulus: &Modulus) -> Vec<FactorStatus> {
    modulus
        .prime_powers()
        .map(|q| {
            if a % q == b % q {
                FactorStatus::Agrees
            } else if b.is_multiple_of(q) {
                FactorStatus::Vanishes
            } else {
                FactorStatus::Violates
            }
        })
        .collect()
}

/// Whether the single coefficient `b` a-strongly represents `a`.
pub fn coefficient_ok(a: u64, b: u64, modulus: &Modulus) -> bool {
    let st = factor_statuses(a, b, modulus);
    st.contains(&FactorStatus::Agrees) && !st.contains(&FactorStatus::Violates)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialWitness {
    pub monomial: Monomial,
    pub target: u64,
    pub actual: u64,
    pub factors: Vec<FactorStatus>,
    /// Index of the first prime power where the coefficients agree.
    pub agreeing_factor: Option<usize>,
}

impl MonomialWitness {
    pub fn is_violation(&self) -> bool {
        self.agreeing_factor.is_none() || self.factors.contains(&FactorStatus::Violates)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AStrongReport {
    pub modulus: Modulus,
    pub vars: VariableSpace,
    pub witnesses: Vec<MonomialWitness>,
}

impl AStrongReport {
    pub fn passed(&self) -> bool {
        !self.witnesses.iter().any(MonomialWitness::is_violation)
    }

    pub fn violations(&self) -> impl Iterator<Item = &MonomialWitness> {
        self.witnesses.iter().filter(|w| w.is_violation())
    }

    /// Verdict line followed by one line per violating monomial.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        let bad: Vec<_> = self.violations().collect();
        let _ = writeln!(
            out,
            "a-strong mod {}: {} ({} monomials, {} violations)",
            self.modulus.value(),
            if bad.is_empty() { "PASS" } else { "FAIL" },
            self.witnesses.len(),
            bad.len()
        );
        for w in bad {
            let name = w
                .monomial
                .iter()
                .map(|&v| self.vars.name(v))
                .collect::<Vec<_>>()
                .join("*");
            let statuses = self
                .modulus
                .factors()
                .iter()
                .zip(&w.factors)
                .map(|(f, s)| format!("{f}:{s:?}"))
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(
                out,
                "violation {name} target={} actual={} [{statuses}]",
                w.target, w.actual
            );
        }
        out
    }
}

/// Coefficient 1 on every square-free degree-`k` monomial.
///
/// Unordered: one group, `C(n, k)` monomials. Ordered: `k` groups, one
/// monomial `x^1_{i_1}⋯x^k_{i_k}` per ordering of each `k`-subset.
pub fn target_coefficients(n: usize, k: usize, ordered: bool, modulus: &Modulus) -> Result<CoefficientMap> {
    if k == 0 || k > n {
        return invalid(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
    }
    let groups = if ordered { k } else { 1 };
    let mut map = CoefficientMap::new(VariableSpace::grouped(n, groups));
    for tuple in distinct_tuples(n, k) {
        if ordered {
            let mono = tuple
                .iter()
                .enumerate()
                .map(|(g, &i)| VarId { group: g, index: i })
                .collect();
            map.add(mono, 1, modulus);
        } else if tuple.windows(2).all(|w| w[0] < w[1]) {
            let mono = tuple.iter().map(|&i| VarId { group: 0, index: i }).collect();
            map.add(mono, 1, modulus);
        }
    }
    Ok(map)
}

/// Checks `actual` against `target` on the union of both supports.
pub fn check_astrong(actual: &CoefficientMap, target: &CoefficientMap, modulus: &Modulus) -> Result<AStrongReport> {
    if actual.vars != target.vars {
        return Err(Error::VariableSpaceMismatch(format!(
            "{:?} vs {:?}",
            actual.vars, target.vars
        )));
    }
    let mut monomials: Vec<&Monomial> = actual.terms().keys().chain(target.terms().keys()).collect();
    monomials.sort();
    monomials.dedup();
    let witnesses = monomials
        .into_iter()
        .map(|mono| {
            let a = target.get(mono);
            let b = actual.get(mono);
            let factors = factor_statuses(a, b, modulus);
            let agreeing_factor = factors.iter().position(|&s| s == FactorStatus::Agrees);
            MonomialWitness {
                monomial: mono.clone(),
                target: a,
                actual: b,
                factors,
                agreeing_factor,
            }
        })
        .collect();
    Ok(AStrongReport {
        modulus: modulus.clone(),
        vars: actual.vars.clone(),
        witnesses,
    })
}
