//! Rectangle covers of the `n × n` monomial matrix of `S_n^2(x, y)`.
//!
//! The initial cover places `(i, j)` in exactly `H_N(i, j)` rectangles, the
//! Hamming distance of the base-`N` digits of `i` and `j`. Transforming it
//! with a BBR polynomial `f` turns every off-diagonal multiplicity into
//! `f(H_N(i, j))`, which is 0/1 modulo each prime power and never 0 mod `m`.

use fixedbitset::FixedBitSet;

use crate::astrong::coefficient_ok;
use crate::block::{self, Parts};
use crate::error::{invalid, Result};
use crate::sympoly::{bbr_construct, SymmetricPolynomial};
use crate::zmod::Modulus;

/// Base-`N` digit layout for the indices `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitScheme {
    pub n: usize,
    /// `N = max(2, ceil(log2 n))`.
    pub base: usize,
    /// `g = ceil(log_N(n + 1))`.
    pub digits: usize,
}

pub fn digit_scheme(n: usize) -> Result<DigitScheme> {
    if n < 2 {
        return invalid(format!("n must be at least 2, got {n}"));
    }
    let log2 = (usize::BITS - (n - 1).leading_zeros()) as usize;
    let base = log2.max(2);
    let mut digits = 0;
    let mut capacity = 1usize;
    while capacity < n + 1 {
        capacity = capacity.saturating_mul(base);
        digits += 1;
    }
    Ok(DigitScheme { n, base, digits })
}

impl DigitScheme {
    /// Digit `t` (1-based, least significant first) of the index value `i`.
    pub fn digit(&self, i: usize, t: usize) -> usize {
        (i / self.base.pow(t as u32 - 1)) % self.base
    }

    pub fn hamming(&self, i: usize, j: usize) -> usize {
        (1..=self.digits)
            .filter(|&t| self.digit(i, t) != self.digit(j, t))
            .count()
    }

    /// Number of initial rectangles before dropping empty ones, `h = gN`.
    pub fn h(&self) -> usize {
        self.digits * self.base
    }
}

/// The product `(Σ_{i∈I} x_i)(Σ_{j∈J} y_j)`, stored as sorted 1-based index lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Rectangle {
            rows: block::normalize(rows),
            cols: block::normalize(cols),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }

    pub fn intersect(&self, other: &Rectangle) -> Rectangle {
        Rectangle {
            rows: block::sorted_intersection(&self.rows, &other.rows),
            cols: block::sorted_intersection(&self.cols, &other.cols),
        }
    }

    /// Number of cells `|I|·|J|`.
    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    fn to_parts(&self, n: usize) -> Parts {
        vec![block::to_bitset(n, &self.rows), block::to_bitset(n, &self.cols)]
    }

    fn from_parts(parts: &[FixedBitSet]) -> Self {
        Rectangle {
            rows: block::to_indices(&parts[0]),
            cols: block::to_indices(&parts[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRect {
    pub rect: Rectangle,
    /// In `1..m`.
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRectCover {
    n: usize,
    modulus: Modulus,
    items: Vec<WeightedRect>,
}

impl WeightedRectCover {
    pub fn new(n: usize, modulus: Modulus) -> Self {
        WeightedRectCover {
            n,
            modulus,
            items: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn items(&self) -> &[WeightedRect] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends a rectangle. The weight is reduced mod `m`; zero-weight and
    /// empty rectangles are dropped. Indices must lie in `1..=n`.
    pub fn push(&mut self, rect: Rectangle, weight: u64) -> Result<()> {
        let out_of_range = |v: &[usize]| v.iter().any(|&i| i == 0 || i > self.n);
        if out_of_range(&rect.rows) || out_of_range(&rect.cols) {
            return invalid(format!("rectangle index outside 1..={}", self.n));
        }
        let weight = self.modulus.reduce(weight);
        if weight != 0 && !rect.is_empty() {
            self.items.push(WeightedRect { rect, weight });
        }
        Ok(())
    }

    /// Mutable access to one weight; a weight of zero is kept as is.
    pub fn set_weight(&mut self, index: usize, weight: u64) {
        self.items[index].weight = self.modulus.reduce(weight);
    }

    /// Weighted number of rectangles containing `(i, j)`, mod `m`.
    pub fn multiplicity(&self, i: usize, j: usize) -> Result<u64> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return invalid(format!("cell ({i}, {j}) outside 1..={}", self.n));
        }
        Ok(self
            .items
            .iter()
            .filter(|it| it.rect.contains(i, j))
            .fold(0, |acc, it| self.modulus.add(acc, it.weight)))
    }

    /// All multiplicities, row-major: entry `(i-1)*n + (j-1)`.
    pub fn multiplicity_matrix(&self) -> Vec<u64> {
        let n = self.n;
        let mut acc = vec![0u64; n * n];
        for it in &self.items {
            for &i in &it.rect.rows {
                let row = &mut acc[(i - 1) * n..i * n];
                for &j in &it.rect.cols {
                    row[j - 1] += it.weight;
                }
            }
        }
        let m = self.modulus.value();
        acc.iter_mut().for_each(|v| *v %= m);
        acc
    }

    pub fn has_unit_weights(&self) -> bool {
        self.items.iter().all(|it| it.weight == 1)
    }

    /// `Σ a_K`, every item counted with its weight as a repetition count.
    pub fn repetition_count(&self) -> u128 {
        self.items.iter().map(|it| it.weight as u128).sum()
    }
}

/// Rectangles `R(I_t^ℓ, J_t^ℓ)` with `I_t^ℓ = {i : i_t = ℓ}` and
/// `J_t^ℓ = {j : j_t ≠ ℓ}`, all of weight 1, empty ones skipped.
pub fn initial_cover(n: usize, modulus: &Modulus) -> Result<WeightedRectCover> {
    let scheme = digit_scheme(n)?;
    let mut cover = WeightedRectCover::new(n, modulus.clone());
    for t in 1..=scheme.digits {
        for ell in 0..scheme.base {
            let (rows, cols): (Vec<usize>, Vec<usize>) = (1..=n).partition(|&i| scheme.digit(i, t) == ell);
            cover.push(Rectangle::new(rows, cols), 1)?;
        }
    }
    Ok(cover)
}

/// Replaces each subset `K` of items with `1 <= |K| <= deg f` by the
/// rectangle `∩_{k∈K} R_k` carrying weight `c_{|K|}`.
pub fn transform(cover: &WeightedRectCover, f: &SymmetricPolynomial) -> Result<WeightedRectCover> {
    block::check_transform_input(cover.len(), cover.has_unit_weights(), f)?;
    let blocks: Vec<Parts> = cover.items.iter().map(|it| it.rect.to_parts(cover.n)).collect();
    let mut out = WeightedRectCover::new(cover.n, cover.modulus.clone());
    for (parts, weight) in block::f_transform(&blocks, f) {
        out.items.push(WeightedRect {
            rect: Rectangle::from_parts(&parts),
            weight,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellFault {
    /// Diagonal cell whose multiplicity is not a multiple of `m`.
    Diagonal,
    /// Off-diagonal cell that is neither 1 nor 0 modulo some prime power, or
    /// is 1 modulo none of them.
    OffDiagonal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellViolation {
    pub i: usize,
    pub j: usize,
    pub multiplicity: u64,
    pub fault: CellFault,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S2Report {
    pub cells_checked: usize,
    pub violations: Vec<CellViolation>,
}

impl S2Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every cell: diagonal multiplicities must vanish mod `m`, and each
/// off-diagonal multiplicity must a-strongly represent the coefficient 1.
pub fn verify_s2_properties(cover: &WeightedRectCover) -> S2Report {
    let n = cover.n;
    let matrix = cover.multiplicity_matrix();
    let mut violations = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let d = matrix[(i - 1) * n + (j - 1)];
            let fault = if i == j {
                (d != 0).then_some(CellFault::Diagonal)
            } else {
                (!coefficient_ok(1, d, &cover.modulus)).then_some(CellFault::OffDiagonal)
            };
            if let Some(fault) = fault {
                violations.push(CellViolation {
                    i,
                    j,
                    multiplicity: d,
                    fault,
                });
            }
        }
    }
    S2Report {
        cells_checked: n * n,
        violations,
    }
}

/// Everything produced along the `S_n^2(x, y)` pipeline.
#[derive(Debug, Clone)]
pub struct S2Construction {
    pub scheme: DigitScheme,
    pub initial: WeightedRectCover,
    pub poly: SymmetricPolynomial,
    pub cover: WeightedRectCover,
}

impl S2Construction {
    /// Initial cover, BBR polynomial with `d = g` and `ell` = number of
    /// initial rectangles, then the transformation.
    pub fn build(n: usize, modulus: &Modulus) -> Result<Self> {
        modulus.require_composite()?;
        let scheme = digit_scheme(n)?;
        let initial = initial_cover(n, modulus)?;
        let poly = bbr_construct(modulus, scheme.digits, initial.len())?;
        let cover = transform(&initial, &poly)?;
        Ok(S2Construction {
            scheme,
            initial,
            poly,
            cover,
        })
    }
}

pub fn build_s2_cover(n: usize, modulus: &Modulus) -> Result<WeightedRectCover> {
    Ok(S2Construction::build(n, modulus)?.cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::factorize;
    use itertools::Itertools;

    fn m(v: u64) -> Modulus {
        factorize(v).unwrap()
    }

    #[test]
    fn digit_scheme_examples() {
        assert_eq!(
            digit_scheme(4).unwrap(),
            DigitScheme {
                n: 4,
                base: 2,
                digits: 3
            }
        );
        assert_eq!(
            digit_scheme(256).unwrap(),
            DigitScheme {
                n: 256,
                base: 8,
                digits: 3
            }
        );
        assert_eq!(
            digit_scheme(2).unwrap(),
            DigitScheme {
                n: 2,
                base: 2,
                digits: 2
            }
        );
        assert_eq!(
            digit_scheme(3).unwrap(),
            DigitScheme {
                n: 3,
                base: 2,
                digits: 2
            }
        );
        assert_eq!(digit_scheme(257).unwrap().base, 9);
        assert!(digit_scheme(1).is_err());
        for n in 2..2000 {
            let s = digit_scheme(n).unwrap();
            assert!(s.base.pow(s.digits as u32) > n);
            assert!(s.base.pow(s.digits as u32 - 1) <= n);
        }
    }

    #[test]
    fn initial_cover_n4() {
        let cover = initial_cover(4, &m(6)).unwrap();
        assert!(cover.len() <= digit_scheme(4).unwrap().h());
        let first = &cover.items()[0].rect;
        assert_eq!(first.rows, vec![2, 4]);
        assert_eq!(first.cols, vec![1, 3]);
        assert_eq!(cover.multiplicity(1, 2).unwrap(), 2);
        for i in 1..=4 {
            assert_eq!(cover.multiplicity(i, i).unwrap(), 0);
        }
        let scheme = digit_scheme(4).unwrap();
        for (i, j) in (1..=4).cartesian_product(1..=4) {
            assert_eq!(cover.multiplicity(i, j).unwrap(), scheme.hamming(i, j) as u64 % 6);
        }
    }

    #[test]
    fn initial_multiplicity_bounds() {
        for n in [2usize, 3, 5, 17, 40] {
            let scheme = digit_scheme(n).unwrap();
            let cover = initial_cover(n, &m(1_000_003 * 2)).unwrap();
            let mat = cover.multiplicity_matrix();
            for (i, j) in (1..=n).cartesian_product(1..=n) {
                let h = mat[(i - 1) * n + j - 1] as usize;
                assert_eq!(h, scheme.hamming(i, j));
                if i != j {
                    assert!((1..=scheme.digits).contains(&h));
                }
            }
        }
    }

    #[test]
    fn multiplicity_basics() {
        let mut cover = WeightedRectCover::new(4, m(6));
        assert_eq!(cover.multiplicity(1, 2).unwrap(), 0);
        cover.push(Rectangle::new(vec![1], vec![2]), 4).unwrap();
        assert_eq!(cover.multiplicity(1, 2).unwrap(), 4);
        assert!(cover.multiplicity(0, 2).is_err());
        assert!(cover.multiplicity(1, 5).is_err());
        assert!(cover.push(Rectangle::new(vec![5], vec![1]), 1).is_err());
        cover.push(Rectangle::new(vec![2], vec![]), 1).unwrap();
        cover.push(Rectangle::new(vec![2], vec![3]), 6).unwrap();
        assert_eq!(cover.len(), 1);
    }

    #[test]
    fn rectangle_intersection() {
        let a = Rectangle::new(vec![1, 2], vec![3, 4]);
        let b = Rectangle::new(vec![2, 3], vec![4]);
        assert_eq!(a.intersect(&b), Rectangle::new(vec![2], vec![4]));
        assert!(a.intersect(&Rectangle::new(vec![4], vec![1])).is_empty());
    }

    #[test]
    fn transform_n4_mod6() {
        let modulus = m(6);
        let initial = initial_cover(4, &modulus).unwrap();
        let f = SymmetricPolynomial::new(initial.len(), vec![0, 1, 2], modulus.clone()).unwrap();
        let out = transform(&initial, &f).unwrap();
        let scheme = digit_scheme(4).unwrap();
        // cell-by-cell count over subsets, independent of the transform
        for (i, j) in (1..=4).cartesian_product(1..=4) {
            let covering = initial.items().iter().filter(|it| it.rect.contains(i, j)).count();
            let mut expected = 0u64;
            for t in 1..=2 {
                expected += f.coeff(t) * (0..covering).combinations(t).count() as u64;
            }
            assert_eq!(out.multiplicity(i, j).unwrap(), expected % 6);
            assert_eq!(out.multiplicity(i, j).unwrap(), f.weight_value(covering).unwrap());
            if scheme.hamming(i, j) == 2 {
                assert_eq!(out.multiplicity(i, j).unwrap(), 4);
            }
            if covering == 0 {
                assert_eq!(out.multiplicity(i, j).unwrap(), 0);
            }
        }
    }

    #[test]
    fn transform_rejects_bad_input() {
        let modulus = m(6);
        let initial = initial_cover(4, &modulus).unwrap();
        let wrong_ell = SymmetricPolynomial::new(3, vec![0, 1], modulus.clone()).unwrap();
        assert!(transform(&initial, &wrong_ell).is_err());
        let constant = SymmetricPolynomial::new(initial.len(), vec![1, 1], modulus.clone()).unwrap();
        assert!(transform(&initial, &constant).is_err());
        let f = SymmetricPolynomial::new(initial.len(), vec![0, 1, 2], modulus.clone()).unwrap();
        let once = transform(&initial, &f).unwrap();
        let f2 = SymmetricPolynomial::new(once.len(), vec![0, 1], modulus).unwrap();
        assert!(transform(&once, &f2).is_err());
    }

    #[test]
    fn verify_examples() {
        let modulus = m(6);
        assert!(verify_s2_properties(&build_s2_cover(16, &modulus).unwrap()).passed());

        let initial = initial_cover(4, &modulus).unwrap();
        let report = verify_s2_properties(&initial);
        assert!(!report.passed());
        let scheme = digit_scheme(4).unwrap();
        for v in &report.violations {
            assert_eq!(scheme.hamming(v.i, v.j), 2);
            assert_eq!(v.multiplicity, 2);
        }

        let mut single = WeightedRectCover::new(4, modulus);
        single.push(Rectangle::new(vec![1], vec![1]), 1).unwrap();
        let report = verify_s2_properties(&single);
        assert!(report
            .violations
            .iter()
            .any(|v| (v.i, v.j) == (1, 1) && v.fault == CellFault::Diagonal));
    }

    #[test]
    fn build_n4_mod6() {
        let modulus = m(6);
        let built = S2Construction::build(4, &modulus).unwrap();
        assert!(verify_s2_properties(&built.cover).passed());
        for (i, j) in (1..=4).cartesian_product(1..=4) {
            let expected = built.poly.weight_value(built.scheme.hamming(i, j)).unwrap();
            assert_eq!(built.cover.multiplicity(i, j).unwrap(), expected);
        }
        for i in 1..=4 {
            for it in built.cover.items() {
                assert!(!it.rect.contains(i, i));
            }
        }
        assert!(matches!(
            S2Construction::build(4, &m(9)),
            Err(crate::Error::UnsupportedModulus { .. })
        ));
        assert!(build_s2_cover(1, &modulus).is_err());
    }

    #[test]
    fn degenerate_small_n() {
        for n in [2usize, 3] {
            for v in [6u64, 15, 12] {
                assert!(
                    verify_s2_properties(&build_s2_cover(n, &m(v)).unwrap()).passed(),
                    "n={n} m={v}"
                );
            }
        }
    }

    #[test]
    fn multiplicity_is_poly_of_hamming_up_to_64() {
        for v in [6u64, 15, 35, 12] {
            let modulus = m(v);
            for n in [2usize, 5, 9, 16, 31, 64] {
                let built = S2Construction::build(n, &modulus).unwrap();
                let initial = built.initial.multiplicity_matrix();
                let after = built.cover.multiplicity_matrix();
                for (i, j) in (1..=n).cartesian_product(1..=n) {
                    let idx = (i - 1) * n + j - 1;
                    let w = initial[idx] as usize;
                    assert_eq!(after[idx], built.poly.weight_value(w).unwrap());
                    assert_eq!(after[idx], after[(j - 1) * n + i - 1]);
                }
                for it in built.cover.items() {
                    assert!(block::sorted_intersection(&it.rect.rows, &it.rect.cols).is_empty());
                }
                // exact count of nonempty intersections with nonzero coefficient
                let rects: Vec<&Rectangle> = built.initial.items().iter().map(|it| &it.rect).collect();
                let mut count = 0usize;
                for t in 1..=built.poly.degree() {
                    if built.poly.coeff(t) == 0 {
                        continue;
                    }
                    for combo in (0..rects.len()).combinations(t) {
                        let r = combo[1..]
                            .iter()
                            .fold(rects[combo[0]].clone(), |acc, &k| acc.intersect(rects[k]));
                        count += usize::from(!r.is_empty());
                    }
                }
                assert_eq!(built.cover.len(), count, "n={n} m={v}");
                assert!(num_bigint::BigUint::from(count) <= built.poly.monomial_count());
            }
        }
    }
}
