//! Homogeneous ΣΠΣ circuits over `Z_m`: a sum of products of linear forms
//! without constant terms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cover2d::WeightedRectCover;
use crate::coverkd::WeightedBoxCover;
use crate::error::{invalid, Error, Result};
use crate::zmod::{factorial, gcd, mod_inverse, Modulus};

/// Default cap on the number of monomial terms generated by [`expand_coefficients`].
pub const DEFAULT_EXPANSION_BUDGET: u64 = 10_000_000;

/// Variable `x^group_index`; ordered by `(group, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId {
    pub group: usize,
    /// 1-based.
    pub index: usize,
}

/// `groups.len()` groups of `n` variables each.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableSpace {
    pub n: usize,
    pub groups: Vec<String>,
}

impl VariableSpace {
    /// `x` for one group, `x, y` for two, `x1..xk` beyond that.
    pub fn grouped(n: usize, k: usize) -> Self {
        let groups = match k {
            1 => vec!["x".to_string()],
            2 => vec!["x".to_string(), "y".to_string()],
            _ => (1..=k).map(|g| format!("x{g}")).collect(),
        };
        VariableSpace { n, groups }
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn contains(&self, v: VarId) -> bool {
        v.group < self.groups.len() && (1..=self.n).contains(&v.index)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.groups.len()).flat_map(move |group| (1..=self.n).map(move |index| VarId { group, index }))
    }

    pub fn name(&self, v: VarId) -> String {
        format!("{}_{}", self.groups[v.group], v.index)
    }
}

/// `Σ a_v x_v` with every stored coefficient nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    terms: Vec<(VarId, u64)>,
}

impl LinearForm {
    /// Combines repeated variables, reduces mod `m` and drops zeros.
    pub fn new(terms: impl IntoIterator<Item = (VarId, u64)>, modulus: &Modulus) -> Self {
        let mut map: BTreeMap<VarId, u64> = BTreeMap::new();
        for (v, a) in terms {
            let e = map.entry(v).or_insert(0);
            *e = modulus.add(*e, modulus.reduce(a));
        }
        LinearForm {
            terms: map.into_iter().filter(|&(_, a)| a != 0).collect(),
        }
    }

    /// `Σ_{i ∈ indices} scale · x^group_i`.
    pub fn sum(group: usize, indices: &[usize], scale: u64, modulus: &Modulus) -> Self {
        LinearForm::new(indices.iter().map(|&index| (VarId { group, index }, scale)), modulus)
    }

    pub fn terms(&self) -> &[(VarId, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn scaled(&self, s: u64, modulus: &Modulus) -> Self {
        LinearForm::new(self.terms.iter().map(|&(v, a)| (v, modulus.mul(a, s))), modulus)
    }
}

/// A product of linear forms. `repetition` records how many copies of the
/// underlying cover item the gate stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGate {
    pub forms: Vec<LinearForm>,
    pub repetition: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPiSigmaCircuit {
    pub modulus: Modulus,
    pub vars: VariableSpace,
    pub gates: Vec<ProductGate>,
}

/// Size of a circuit in the usual gate-count sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitSize {
    /// `1 + r + Σ s_i`.
    pub gate_total: u64,
    /// `r`, the number of product gates.
    pub products: u64,
    /// Products counted with their repetition, i.e. the number of complete
    /// bipartite graphs in the graph model.
    pub graph_model_count: u128,
}

impl SigmaPiSigmaCircuit {
    pub fn new(modulus: Modulus, vars: VariableSpace) -> Self {
        SigmaPiSigmaCircuit {
            modulus,
            vars,
            gates: Vec::new(),
        }
    }

    pub fn size(&self) -> CircuitSize {
        let r = self.gates.len() as u64;
        let fan_in: u64 = self.gates.iter().map(|g| g.forms.len() as u64).sum();
        CircuitSize {
            gate_total: 1 + r + fan_in,
            products: r,
            graph_model_count: self.gates.iter().map(|g| g.repetition as u128).sum(),
        }
    }

    pub fn evaluate(&self, assignment: &HashMap<VarId, u64>) -> Result<u64> {
        let md = &self.modulus;
        let mut total = 0;
        for gate in &self.gates {
            let mut prod = 1 % md.value();
            for form in &gate.forms {
                let mut s = 0;
                for &(v, a) in form.terms() {
                    let x = assignment
                        .get(&v)
                        .ok_or_else(|| Error::InvalidArgument(format!("no value for {}", self.vars.name(v))))?;
                    s = md.add(s, md.mul(a, md.reduce(*x)));
                }
                prod = md.mul(prod, s);
            }
            total = md.add(total, prod);
        }
        Ok(total)
    }

    /// True if every gate has one form per group and each form uses only its own group.
    pub fn is_multilinear_across_groups(&self) -> bool {
        let k = self.vars.num_groups();
        self.gates.iter().all(|g| {
            g.forms.len() == k
                && g.forms
                    .iter()
                    .enumerate()
                    .all(|(gi, f)| f.terms().iter().all(|(v, _)| v.group == gi))
        })
    }
}

/// One gate `(w Σ_{i∈I} x_i)(Σ_{j∈J} y_j)` per rectangle.
pub fn from_cover2d(cover: &WeightedRectCover) -> SigmaPiSigmaCircuit {
    let md = cover.modulus();
    let mut c = SigmaPiSigmaCircuit::new(md.clone(), VariableSpace::grouped(cover.n(), 2));
    for it in cover.items() {
        c.gates.push(ProductGate {
            forms: vec![
                LinearForm::sum(0, &it.rect.rows, it.weight, md),
                LinearForm::sum(1, &it.rect.cols, 1, md),
            ],
            repetition: it.weight,
        });
    }
    c
}

/// One gate `(w Σ_{A_1} x^1)(Σ_{A_2} x^2)⋯(Σ_{A_k} x^k)` per box.
pub fn from_coverkd(cover: &WeightedBoxCover) -> SigmaPiSigmaCircuit {
    let md = cover.modulus();
    let mut c = SigmaPiSigmaCircuit::new(md.clone(), VariableSpace::grouped(cover.n(), cover.k()));
    for it in cover.items() {
        let forms = it
            .cell_box
            .parts
            .iter()
            .enumerate()
            .map(|(g, part)| LinearForm::sum(g, part, if g == 0 { it.weight } else { 1 }, md))
            .collect();
        c.gates.push(ProductGate {
            forms,
            repetition: it.weight,
        });
    }
    c
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    if k == 0 || k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for l in i..k {
            cur[l] = cur[l - 1] + 1;
        }
    }
}

/// All orderings of distinct indices: `k`-tuples from `1..=n` without repeats.
pub(crate) fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 1..=n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

/// `S_n^k(x)` gate by gate: `Π_{i∈I} x_i` for every `k`-subset `I`.
pub fn naive_snk_circuit(n: usize, k: usize, modulus: &Modulus) -> Result<SigmaPiSigmaCircuit> {
    if k == 0 || k > n {
        return invalid(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
    }
    let mut c = SigmaPiSigmaCircuit::new(modulus.clone(), VariableSpace::grouped(n, 1));
    for subset in k_subsets(n, k) {
        c.gates.push(ProductGate {
            forms: subset.iter().map(|&i| LinearForm::sum(0, &[i], 1, modulus)).collect(),
            repetition: 1,
        });
    }
    Ok(c)
}

/// `S_n^k(x^1, …, x^k)`: `x^1_{i_1} ⋯ x^k_{i_k}` for every ordering of every `k`-subset.
pub fn naive_ordered_snk_circuit(n: usize, k: usize, modulus: &Modulus) -> Result<SigmaPiSigmaCircuit> {
    if k == 0 || k > n {
        return invalid(format!("need 1 <= k <= n, got n = {n}, k = {k}"));
    }
    let mut c = SigmaPiSigmaCircuit::new(modulus.clone(), VariableSpace::grouped(n, k));
    for tuple in distinct_tuples(n, k) {
        c.gates.push(ProductGate {
            forms: tuple
                .iter()
                .enumerate()
                .map(|(g, &i)| LinearForm::sum(g, &[i], 1, modulus))
                .collect(),
            repetition: 1,
        });
    }
    Ok(c)
}

/// A monomial as a sorted list of variables (repeats allowed).
pub type Monomial = Vec<VarId>;

/// Monomial → nonzero coefficient in `Z_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMap {
    pub vars: VariableSpace,
    terms: BTreeMap<Monomial, u64>,
}

impl CoefficientMap {
    pub fn new(vars: VariableSpace) -> Self {
        CoefficientMap {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `c` to the coefficient of `mono` (sorted internally).
    pub fn add(&mut self, mut mono: Monomial, c: u64, modulus: &Modulus) {
        mono.sort_unstable();
        let c = modulus.reduce(c);
        if c == 0 {
            return;
        }
        let v = modulus.add(self.get(&mono), c);
        if v == 0 {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, v);
        }
    }

    pub fn get(&self, mono: &[VarId]) -> u64 {
        let mut key = mono.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, assignment: &HashMap<VarId, u64>, modulus: &Modulus) -> Result<u64> {
        let mut total = 0;
        for (mono, &c) in &self.terms {
            let mut prod = c;
            for v in mono {
                let x = assignment
                    .get(v)
                    .ok_or_else(|| Error::InvalidArgument(format!("no value for {}", self.vars.name(*v))))?;
                prod = modulus.mul(prod, modulus.reduce(*x));
            }
            total = modulus.add(total, prod);
        }
        Ok(total)
    }

    pub fn monomial_name(&self, mono: &[VarId]) -> String {
        mono.iter().map(|&v| self.vars.name(v)).collect::<Vec<_>>().join("*")
    }
}

/// Distributes every product and sums the results, reducing mod `m`.
///
/// Fails before doing any work on a gate whose expansion would push the total
/// number of generated terms past `budget`.
pub fn expand_coefficients(c: &SigmaPiSigmaCircuit, budget: u64) -> Result<CoefficientMap> {
    let md = &c.modulus;
    let mut acc: HashMap<Monomial, u64> = HashMap::new();
    let mut used = 0u64;
    for (gi, gate) in c.gates.iter().enumerate() {
        let terms = gate
            .forms
            .iter()
            .fold(1u64, |acc, f| acc.saturating_mul(f.terms().len() as u64));
        if used.saturating_add(terms) > budget {
            return Err(Error::ExpansionBudget {
                budget,
                needed: used.saturating_add(terms),
                gates_expanded: gi,
            });
        }
        used += terms;
        let mut partial: Vec<(Monomial, u64)> = vec![(Vec::new(), 1 % md.value())];
        for form in &gate.forms {
            let mut next = Vec::with_capacity(partial.len() * form.terms().len());
            for (mono, coef) in &partial {
                for &(v, a) in form.terms() {
                    let mut m2 = mono.clone();
                    m2.push(v);
                    next.push((m2, md.mul(*coef, a)));
                }
            }
            partial = next;
        }
        for (mut mono, coef) in partial {
            mono.sort_unstable();
            let e = acc.entry(mono).or_insert(0);
            *e = md.add(*e, coef);
        }
    }
    let mut map = CoefficientMap::new(c.vars.clone());
    map.terms = acc.into_iter().filter(|&(_, v)| v != 0).collect();
    Ok(map)
}

/// Scale factor `(k!)^{-1} mod m` used when all `k` groups are identified.
pub fn identification_scale(k: usize, modulus: &Modulus) -> Result<u64> {
    let kf = factorial(k as u64);
    let g = gcd(kf % modulus.value(), modulus.value());
    if g != 1 {
        return Err(Error::NotInvertible {
            a: kf % modulus.value(),
            m: modulus.value(),
            gcd: g,
        });
    }
    mod_inverse(kf as i64, modulus.value())
}

/// Maps every `x^g_i` to `x_i` and multiplies each gate by `(k!)^{-1}`,
/// where `k` is the number of groups. Requires `gcd(m, k!) = 1`.
pub fn identify_variables_and_scale(c: &SigmaPiSigmaCircuit) -> Result<SigmaPiSigmaCircuit> {
    let md = &c.modulus;
    let scale = identification_scale(c.vars.num_groups(), md)?;
    let mut out = SigmaPiSigmaCircuit::new(md.clone(), VariableSpace::grouped(c.vars.n, 1));
    for gate in &c.gates {
        let mut forms: Vec<LinearForm> = gate
            .forms
            .iter()
            .map(|f| {
                LinearForm::new(
                    f.terms().iter().map(|&(v, a)| {
                        (
                            VarId {
                                group: 0,
                                index: v.index,
                            },
                            a,
                        )
                    }),
                    md,
                )
            })
            .collect();
        if forms.iter().any(LinearForm::is_zero) {
            continue;
        }
        if let Some(first) = forms.first_mut() {
            *first = first.scaled(scale, md);
        }
        out.gates.push(ProductGate {
            forms,
            repetition: md.mul(gate.repetition, scale),
        });
    }
    Ok(out)
}

impl fmt::Display for SigmaPiSigmaCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (gi, gate) in self.gates.iter().enumerate() {
            if gi > 0 {
                write!(f, " + ")?;
            }
            for form in &gate.forms {
                write!(f, "(")?;
                for (ti, &(v, a)) in form.terms().iter().enumerate() {
                    if ti > 0 {
                        write!(f, "+")?;
                    }
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "{}", self.vars.name(v))?;
                }
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}
