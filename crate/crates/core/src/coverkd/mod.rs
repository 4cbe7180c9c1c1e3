//! Box covers of the `k`-dimensional monomial tensor of
//! `S_n^k(x^1, …, x^k)`.
//!
//! The initial cover comes from a perfect hash family: for every row `i` and
//! injective `σ: {1..k} → {0..b-1}` the box `R(i, σ)` has parts
//! `A_l = {j : h_{ij} = σ(l)}`. A distinct-index tuple is covered once per
//! row separating it, so between 1 and `u` times; tuples with a repeated index
//! are never covered. The BBR transformation with `d = u` then fixes the
//! multiplicities exactly as in the two-dimensional case.

mod hash;

pub use hash::{
    build_hash_family, build_hash_family_with, verify_hash_family, HashBuildOptions, HashMatrix, HashStrategy,
    HashVerdict,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::astrong::coefficient_ok;
use crate::block::{self, Parts};
use crate::error::{invalid, Result};
use crate::sympoly::{bbr_construct, SymmetricPolynomial};
use crate::zmod::Modulus;

/// Default tuple-count limit for exhaustive verification.
pub const DEFAULT_VERIFY_CAP: u64 = 10_000_000;

/// Product of `k` index sets `A_1 × ⋯ × A_k`, each sorted and 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellBox {
    pub parts: Vec<Vec<usize>>,
}

impl CellBox {
    pub fn new(parts: Vec<Vec<usize>>) -> Self {
        CellBox {
            parts: parts.into_iter().map(block::normalize).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.iter().any(Vec::is_empty)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.parts.len() == tuple.len() && self.parts.iter().zip(tuple).all(|(p, j)| p.binary_search(j).is_ok())
    }

    pub fn intersect(&self, other: &CellBox) -> CellBox {
        CellBox {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| block::sorted_intersection(a, b))
                .collect(),
        }
    }

    pub fn parts_disjoint(&self) -> bool {
        for a in 0..self.parts.len() {
            for b in a + 1..self.parts.len() {
                if !block::sorted_intersection(&self.parts[a], &self.parts[b]).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn to_parts(&self, n: usize) -> Parts {
        self.parts.iter().map(|p| block::to_bitset(n, p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBox {
    pub cell_box: CellBox,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBoxCover {
    n: usize,
    k: usize,
    modulus: Modulus,
    items: Vec<WeightedBox>,
}

impl WeightedBoxCover {
    pub fn new(n: usize, k: usize, modulus: Modulus) -> Self {
        WeightedBoxCover {
            n,
            k,
            modulus,
            items: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn items(&self) -> &[WeightedBox] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends a box; zero weights and empty boxes are dropped.
    pub fn push(&mut self, cell_box: CellBox, weight: u64) -> Result<()> {
        if cell_box.parts.len() != self.k {
            return invalid(format!("box has {} parts, expected {}", cell_box.parts.len(), self.k));
        }
        if cell_box.parts.iter().flatten().any(|&j| j == 0 || j > self.n) {
            return invalid(format!("box index outside 1..={}", self.n));
        }
        let weight = self.modulus.reduce(weight);
        if weight != 0 && !cell_box.is_empty() {
            self.items.push(WeightedBox { cell_box, weight });
        }
        Ok(())
    }

    pub fn set_weight(&mut self, index: usize, weight: u64) {
        self.items[index].weight = self.modulus.reduce(weight);
    }

    pub fn has_unit_weights(&self) -> bool {
        self.items.iter().all(|it| it.weight == 1)
    }

    pub fn repetition_count(&self) -> u128 {
        self.items.iter().map(|it| it.weight as u128).sum()
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.k || tuple.iter().any(|&j| j == 0 || j > self.n) {
            return invalid(format!("tuple {tuple:?} is not in {{1..{}}}^{}", self.n, self.k));
        }
        Ok(())
    }

    /// Weighted number of boxes containing `tuple`, mod `m`.
    pub fn box_multiplicity(&self, tuple: &[usize]) -> Result<u64> {
        self.check_tuple(tuple)?;
        Ok(self
            .items
            .iter()
            .filter(|it| it.cell_box.contains(tuple))
            .fold(0, |acc, it| self.modulus.add(acc, it.weight)))
    }

    /// Dense multiplicities over `{1..n}^k`, indexed by [`Self::tuple_index`].
    pub fn multiplicity_tensor(&self) -> Vec<u64> {
        let size = self.n.pow(self.k as u32);
        let mut acc = vec![0u64; size];
        let mut idx = vec![0usize; self.k];
        for it in &self.items {
            let parts = &it.cell_box.parts;
            // odometer over the product of the parts
            idx.iter_mut().for_each(|v| *v = 0);
            'outer: loop {
                let flat = parts
                    .iter()
                    .zip(&idx)
                    .rev()
                    .fold(0usize, |f, (p, &pos)| f * self.n + (p[pos] - 1));
                acc[flat] += it.weight;
                for l in 0..self.k {
                    idx[l] += 1;
                    if idx[l] < parts[l].len() {
                        continue 'outer;
                    }
                    idx[l] = 0;
                }
                break;
            }
        }
        let m = self.modulus.value();
        acc.iter_mut().for_each(|v| *v %= m);
        acc
    }

    /// Position of `tuple` in [`Self::multiplicity_tensor`]; the first coordinate varies fastest.
    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().rev().fold(0, |f, &j| f * self.n + (j - 1))
    }
}

/// `R(i, σ)` for every row and every injective `σ`, σ in lexicographic
/// order; boxes with an empty part are skipped.
pub fn initial_box_cover(h: &HashMatrix, modulus: &Modulus) -> Result<WeightedBoxCover> {
    if h.rows
        .iter()
        .any(|r| r.len() != h.n || r.iter().any(|&v| v as usize >= h.b))
    {
        return invalid("hash matrix rows must have n entries from 0..b");
    }
    let mut cover = WeightedBoxCover::new(h.n, h.k, modulus.clone());
    for row in &h.rows {
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); h.b];
        for (j, &v) in row.iter().enumerate() {
            classes[v as usize].push(j + 1);
        }
        let mut sigma = Vec::with_capacity(h.k);
        push_injections(&classes, h.k, &mut sigma, &mut cover)?;
    }
    Ok(cover)
}

fn push_injections(
    classes: &[Vec<usize>],
    k: usize,
    sigma: &mut Vec<usize>,
    cover: &mut WeightedBoxCover,
) -> Result<()> {
    if sigma.len() == k {
        let parts = sigma.iter().map(|&v| classes[v].clone()).collect();
        return cover.push(CellBox { parts }, 1);
    }
    for v in 0..classes.len() {
        if !sigma.contains(&v) && !classes[v].is_empty() {
            sigma.push(v);
            push_injections(classes, k, sigma, cover)?;
            sigma.pop();
        }
    }
    Ok(())
}

/// Box analogue of [`crate::cover2d::transform`], intersecting componentwise.
pub fn transform_boxes(cover: &WeightedBoxCover, f: &SymmetricPolynomial) -> Result<WeightedBoxCover> {
    block::check_transform_input(cover.len(), cover.has_unit_weights(), f)?;
    let blocks: Vec<Parts> = cover.items.iter().map(|it| it.cell_box.to_parts(cover.n)).collect();
    let mut out = WeightedBoxCover::new(cover.n, cover.k, cover.modulus.clone());
    for (parts, weight) in block::f_transform(&blocks, f) {
        out.items.push(WeightedBox {
            cell_box: CellBox {
                parts: parts.iter().map(block::to_indices).collect(),
            },
            weight,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Exhaustive when `n^k` is at most this.
    pub cap: u64,
    /// Tuples drawn in sampled mode.
    pub samples: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: DEFAULT_VERIFY_CAP,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleViolation {
    pub tuple: Vec<usize>,
    pub multiplicity: u64,
    /// True if the tuple repeats an index (and so should be 0 mod `m`).
    pub repeated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkReport {
    pub mode: VerifyMode,
    pub tuples_checked: u64,
    pub violations: Vec<TupleViolation>,
}

impl SkReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn has_repeat(tuple: &[usize]) -> bool {
    (0..tuple.len()).any(|a| tuple[a + 1..].contains(&tuple[a]))
}

fn tuple_at(mut flat: usize, n: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let j = flat % n + 1;
            flat /= n;
            j
        })
        .collect()
}

fn judge(tuple: Vec<usize>, d: u64, modulus: &Modulus) -> Option<TupleViolation> {
    let repeated = has_repeat(&tuple);
    let ok = if repeated {
        d == 0
    } else {
        coefficient_ok(1, d, modulus)
    };
    (!ok).then_some(TupleViolation {
        tuple,
        multiplicity: d,
        repeated,
    })
}

/// Repeated-index tuples must vanish mod `m`; distinct-index tuples must
/// a-strongly represent 1.
pub fn verify_sk_properties(cover: &WeightedBoxCover, opts: &VerifyOptions) -> SkReport {
    let (n, k) = (cover.n, cover.k);
    let total = (n as u64).checked_pow(k as u32);
    match total {
        Some(total) if total <= opts.cap => {
            let tensor = cover.multiplicity_tensor();
            let violations = tensor
                .iter()
                .enumerate()
                .filter_map(|(flat, &d)| judge(tuple_at(flat, n, k), d, &cover.modulus))
                .collect();
            SkReport {
                mode: VerifyMode::Exhaustive,
                tuples_checked: total,
                violations,
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut violations = Vec::new();
            for _ in 0..opts.samples {
                let tuple: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=n)).collect();
                let d = cover.box_multiplicity(&tuple).expect("sampled tuple in range");
                if let Some(v) = judge(tuple, d, &cover.modulus) {
                    violations.push(v);
                }
            }
            SkReport {
                mode: VerifyMode::Sampled {
                    samples: opts.samples,
                    seed: opts.seed,
                },
                tuples_checked: opts.samples,
                violations,
            }
        }
    }
}

/// Distinct-index sets (sorted) whose `k!` orderings do not all share one
/// multiplicity. Exhaustive; intended for desk-scale covers.
pub fn ordering_violations(cover: &WeightedBoxCover) -> Vec<Vec<usize>> {
    let tensor = cover.multiplicity_tensor();
    let mut out = Vec::new();
    for tuple in crate::circuit::distinct_tuples(cover.n, cover.k) {
        if !tuple.windows(2).all(|w| w[0] < w[1]) {
            continue;
        }
        let base = tensor[cover.tuple_index(&tuple)];
        let mut perm = tuple.clone();
        let uniform = permutations(&mut perm, 0, &mut |p| tensor[cover.tuple_index(p)] == base);
        if !uniform {
            out.push(tuple);
        }
    }
    out
}

fn permutations(v: &mut Vec<usize>, start: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if start == v.len() {
        return check(v);
    }
    for i in start..v.len() {
        v.swap(start, i);
        let ok = permutations(v, start + 1, check);
        v.swap(start, i);
        if !ok {
            return false;
        }
    }
    true
}

/// Everything produced along the `S_n^k` pipeline.
#[derive(Debug, Clone)]
pub struct SkConstruction {
    pub hash: HashMatrix,
    pub initial: WeightedBoxCover,
    pub poly: SymmetricPolynomial,
    pub cover: WeightedBoxCover,
}

impl SkConstruction {
    /// Hash family, initial boxes, BBR polynomial with `d = u` and `ell` =
    /// number of boxes, then the transformation.
    pub fn build(n: usize, k: usize, modulus: &Modulus, b: usize, strategy: HashStrategy, seed: u64) -> Result<Self> {
        modulus.require_composite()?;
        let hash = build_hash_family(n, k, b, strategy, seed)?;
        let initial = initial_box_cover(&hash, modulus)?;
        if hash.u() > initial.len() {
            return invalid(format!("u = {} exceeds the {} initial boxes", hash.u(), initial.len()));
        }
        let poly = bbr_construct(modulus, hash.u(), initial.len())?;
        let cover = transform_boxes(&initial, &poly)?;
        Ok(SkConstruction {
            hash,
            initial,
            poly,
            cover,
        })
    }
}

pub fn build_sk_cover(
    n: usize,
    k: usize,
    modulus: &Modulus,
    b: usize,
    strategy: HashStrategy,
    seed: u64,
) -> Result<WeightedBoxCover> {
    Ok(SkConstruction::build(n, k, modulus, b, strategy, seed)?.cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::factorize;
    use itertools::Itertools;

    fn hand_matrix() -> HashMatrix {
        HashMatrix {
            n: 4,
            k: 2,
            b: 2,
            rows: vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]],
        }
    }

    #[test]
    fn initial_boxes_from_hand_matrix() {
        let cover = initial_box_cover(&hand_matrix(), &factorize(6).unwrap()).unwrap();
        assert_eq!(cover.len(), 4);
        // row 2, σ = (0, 1)
        assert_eq!(cover.items()[2].cell_box.parts, vec![vec![1, 3], vec![2, 4]]);
        for tuple in (1..=4).cartesian_product(1..=4) {
            let t = [tuple.0, tuple.1];
            let d = cover.box_multiplicity(&t).unwrap();
            if t[0] == t[1] {
                assert_eq!(d, 0);
            } else {
                assert!((1..=2).contains(&d));
            }
        }
    }

    #[test]
    fn box_multiplicity_basics() {
        let md = factorize(6).unwrap();
        let mut cover = WeightedBoxCover::new(5, 3, md);
        assert_eq!(cover.box_multiplicity(&[1, 2, 3]).unwrap(), 0);
        cover.push(CellBox::new(vec![vec![1], vec![2, 4], vec![3]]), 5).unwrap();
        assert_eq!(cover.box_multiplicity(&[1, 4, 3]).unwrap(), 5);
        assert_eq!(cover.box_multiplicity(&[1, 3, 3]).unwrap(), 0);
        assert!(cover.box_multiplicity(&[1, 2]).is_err());
        assert!(cover.box_multiplicity(&[1, 2, 6]).is_err());
        assert!(cover.push(CellBox::new(vec![vec![1], vec![2]]), 1).is_err());
    }

    #[test]
    fn box_intersection_componentwise() {
        let a = CellBox::new(vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
        let b = CellBox::new(vec![vec![2], vec![3, 5], vec![5]]);
        assert_eq!(a.intersect(&b), CellBox::new(vec![vec![2], vec![3], vec![5]]));
    }

    #[test]
    fn tensor_matches_pointwise() {
        let md = factorize(35).unwrap();
        let h = build_hash_family(7, 3, 6, HashStrategy::Greedy, 2).unwrap();
        let cover = initial_box_cover(&h, &md).unwrap();
        let tensor = cover.multiplicity_tensor();
        for t in (0..3).map(|_| 1..=7).multi_cartesian_product() {
            assert_eq!(tensor[cover.tuple_index(&t)], cover.box_multiplicity(&t).unwrap());
        }
    }

    #[test]
    fn initial_cover_counts_separating_rows() {
        let md = factorize(1_000_003 * 2).unwrap();
        let h = build_hash_family(9, 3, 6, HashStrategy::Randomized, 5).unwrap();
        let cover = initial_box_cover(&h, &md).unwrap();
        let perms = 6 * 5 * 4;
        assert!(cover.len() <= h.u() * perms);
        let tensor = cover.multiplicity_tensor();
        for t in (0..3).map(|_| 1..=9).multi_cartesian_product() {
            let d = tensor[cover.tuple_index(&t)];
            let separating = h
                .rows
                .iter()
                .filter(|r| {
                    let v: Vec<u32> = t.iter().map(|&j| r[j - 1]).collect();
                    v.iter().all_unique()
                })
                .count() as u64;
            let repeated = !t.iter().all_unique();
            assert_eq!(d, if repeated { 0 } else { separating });
            if !repeated {
                assert!(d >= 1 && d <= h.u() as u64);
            }
        }
        assert!(cover.items().iter().all(|it| it.cell_box.parts_disjoint()));
    }

    #[test]
    fn transform_multiplicity_k3() {
        let md = factorize(35).unwrap();
        for n in [5usize, 8, 12] {
            let built = SkConstruction::build(n, 3, &md, 6, HashStrategy::Greedy, 11).unwrap();
            let before = built.initial.multiplicity_tensor();
            let after = built.cover.multiplicity_tensor();
            for (flat, &w) in before.iter().enumerate() {
                assert!(w as usize <= built.hash.u());
                assert_eq!(after[flat], built.poly.weight_value(w as usize).unwrap());
            }
            assert!(built.cover.items().iter().all(|it| it.cell_box.parts_disjoint()));
            assert!(verify_sk_properties(&built.cover, &VerifyOptions::default()).passed());
            assert!(ordering_violations(&built.cover).is_empty());
        }
    }

    #[test]
    fn cross_check_against_rectangles_k2() {
        let md = factorize(6).unwrap();
        let built = SkConstruction::build(8, 2, &md, 4, HashStrategy::Greedy, 3).unwrap();
        let report = verify_sk_properties(&built.cover, &VerifyOptions::default());
        assert!(report.passed());
        assert_eq!(report.tuples_checked, 64);
        assert_eq!(report.mode, VerifyMode::Exhaustive);
    }

    #[test]
    fn sampled_mode_reports_seed() {
        let md = factorize(35).unwrap();
        let cover = build_sk_cover(12, 3, &md, 6, HashStrategy::Randomized, 7).unwrap();
        let opts = VerifyOptions {
            cap: 100,
            samples: 500,
            seed: 42,
        };
        let report = verify_sk_properties(&cover, &opts);
        assert_eq!(report.mode, VerifyMode::Sampled { samples: 500, seed: 42 });
        assert_eq!(report.tuples_checked, 500);
        assert!(report.passed());
    }

    #[test]
    fn verifier_flags_repeats_and_bad_values() {
        let md = factorize(6).unwrap();
        let mut cover = WeightedBoxCover::new(3, 2, md);
        cover.push(CellBox::new(vec![vec![1], vec![1]]), 1).unwrap();
        cover.push(CellBox::new(vec![vec![1], vec![2]]), 2).unwrap();
        let report = verify_sk_properties(&cover, &VerifyOptions::default());
        assert!(report.violations.iter().any(|v| v.tuple == vec![1, 1] && v.repeated));
        assert!(report
            .violations
            .iter()
            .any(|v| v.tuple == vec![1, 2] && !v.repeated && v.multiplicity == 2));
    }

    #[test]
    fn sk_errors() {
        assert!(build_sk_cover(6, 2, &factorize(6).unwrap(), 1, HashStrategy::Greedy, 0).is_err());
        assert!(matches!(
            build_sk_cover(6, 2, &factorize(25).unwrap(), 4, HashStrategy::Greedy, 0),
            Err(crate::Error::UnsupportedModulus { .. })
        ));
    }
}
