//! Products of index sets ("blocks") and the polynomial transformation of a
//! block cover. Rectangles are blocks with two parts, boxes have `k` parts.

use fixedbitset::FixedBitSet;

use crate::error::{invalid, Result};
use crate::sympoly::SymmetricPolynomial;

/// One block as bitsets over `0..=n` (bit 0 unused, indices are 1-based).
pub(crate) type Parts = Vec<FixedBitSet>;

pub(crate) fn to_bitset(n: usize, indices: &[usize]) -> FixedBitSet {
    let mut bs = FixedBitSet::with_capacity(n + 1);
    for &i in indices {
        bs.insert(i);
    }
    bs
}

pub(crate) fn to_indices(bs: &FixedBitSet) -> Vec<usize> {
    bs.ones().collect()
}

/// Sorted, deduplicated copy.
pub(crate) fn normalize(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

pub(crate) fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersects(a: &Parts, b: &Parts) -> bool {
    a.iter().zip(b).all(|(x, y)| !x.is_disjoint(y))
}

fn intersect(a: &Parts, b: &Parts) -> Parts {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut z = x.clone();
            z.intersect_with(y);
            z
        })
        .collect()
}

/// Checks the preconditions shared by the rectangle and box transformations.
pub(crate) fn check_transform_input(items: usize, unit_weights: bool, f: &SymmetricPolynomial) -> Result<()> {
    if !unit_weights {
        return invalid("the transformation expects a cover with unit weights");
    }
    if f.ell() != items {
        return invalid(format!(
            "polynomial has {} variables but the cover has {items} items",
            f.ell()
        ));
    }
    if f.coeff(0) != 0 {
        return invalid("polynomial has a nonzero constant term");
    }
    Ok(())
}

/// Every nonempty intersection `∩_{k∈K} B_k` with `1 <= |K| <= deg f` and
/// `c_{|K|} ≠ 0`, weighted by `c_{|K|}`.
///
/// Subsets are visited in lexicographic order of their sorted index tuples;
/// a branch is abandoned as soon as its running intersection is empty.
pub(crate) fn f_transform(blocks: &[Parts], f: &SymmetricPolynomial) -> Vec<(Parts, u64)> {
    let depth = f.degree();
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    for a in 0..blocks.len() {
        let cur = blocks[a].clone();
        if cur.iter().any(|p| p.is_clear()) {
            continue;
        }
        let candidates: Vec<usize> = if depth > 1 {
            (a + 1..blocks.len())
                .filter(|&b| intersects(&cur, &blocks[b]))
                .collect()
        } else {
            Vec::new()
        };
        descend(blocks, f, cur, 1, &candidates, &mut out);
    }
    out
}

fn descend(
    blocks: &[Parts],
    f: &SymmetricPolynomial,
    cur: Parts,
    size: usize,
    candidates: &[usize],
    out: &mut Vec<(Parts, u64)>,
) {
    let c = f.coeff(size);
    let deeper = size < f.degree();
    if c != 0 {
        out.push((cur.clone(), c));
    }
    if !deeper {
        return;
    }
    for (idx, &b) in candidates.iter().enumerate() {
        let next = intersect(&cur, &blocks[b]);
        let rest: Vec<usize> = if size + 1 < f.degree() {
            candidates[idx + 1..]
                .iter()
                .copied()
                .filter(|&c| intersects(&next, &blocks[c]))
                .collect()
        } else {
            Vec::new()
        };
        descend(blocks, f, next, size + 1, &rest, out);
    }
}
