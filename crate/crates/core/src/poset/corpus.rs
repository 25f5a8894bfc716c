//! Isomorphism classes of small graded posets.
//!
//! Every graded poset on `n` elements arises from one on `n - 1` elements by
//! adjoining a maximal element over a down-set, since deleting a maximal element
//! keeps every remaining interval intact. Classes are deduplicated by a canonical
//! form computed with colour refinement followed by backtracking inside classes.

use std::collections::{BTreeMap, BTreeSet};

use super::GradedPoset;

/// Canonical form: the strict order relation as a bit matrix under the canonical ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode {
    size: usize,
    bits: Vec<u64>,
}

/// Returns the canonical code and the canonical ordering `order[i] = old index`.
pub fn canonical_form(p: &GradedPoset) -> (CanonicalCode, Vec<usize>) {
    let n = p.len();
    let lt = |x: usize, y: usize| x != y && p.leq(x, y);
    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for &(a, b) in p.covers() {
        up[a].push(b);
        down[b].push(a);
    }
    // Label-independent initial colours, refined until stable.
    let mut colour: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let below = (0..n).filter(|&y| lt(y, x)).count();
            let above = (0..n).filter(|&y| lt(x, y)).count();
            let rank = (0..n).filter_map(|y| p.interval_length(y, x)).max().unwrap_or(0);
            vec![below, above, down[x].len(), up[x].len(), rank]
        })
        .collect();
    let mut classes = rank_colours(&colour);
    loop {
        colour = (0..n)
            .map(|x| {
                let mut d: Vec<usize> = down[x].iter().map(|&y| classes[y]).collect();
                let mut u: Vec<usize> = up[x].iter().map(|&y| classes[y]).collect();
                d.sort_unstable();
                u.sort_unstable();
                let mut c = vec![classes[x], usize::MAX];
                c.extend(d);
                c.push(usize::MAX);
                c.extend(u);
                c
            })
            .collect();
        let next = rank_colours(&colour);
        let settled = distinct(&next) == distinct(&classes);
        classes = next;
        if settled {
            break;
        }
    }
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        cells.entry(classes[x]).or_default().push(x);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    let mut best: Option<(CanonicalCode, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(&cells, 0, &mut order, &mut used, &lt, n, &mut best);
    best.expect("at least one ordering")
}

fn rank_colours(colour: &[Vec<usize>]) -> Vec<usize> {
    let sorted: BTreeSet<&Vec<usize>> = colour.iter().collect();
    let pos: BTreeMap<&Vec<usize>, usize> = sorted.into_iter().enumerate().map(|(i, c)| (c, i)).collect();
    colour.iter().map(|c| pos[c]).collect()
}

fn distinct(classes: &[usize]) -> usize {
    classes.iter().collect::<BTreeSet<_>>().len()
}

fn encode(order: &[usize], lt: &impl Fn(usize, usize) -> bool, n: usize) -> CanonicalCode {
    let mut bits = vec![0u64; (n * n).div_ceil(64)];
    for (i, &x) in order.iter().enumerate() {
        for (j, &y) in order.iter().enumerate() {
            if lt(x, y) {
                let k = i * n + j;
                bits[k / 64] |= 1 << (k % 64);
            }
        }
    }
    CanonicalCode { size: n, bits }
}

fn search(
    cells: &[Vec<usize>],
    cell: usize,
    order: &mut Vec<usize>,
    used: &mut [bool],
    lt: &impl Fn(usize, usize) -> bool,
    n: usize,
    best: &mut Option<(CanonicalCode, Vec<usize>)>,
) {
    if order.len() == n {
        let code = encode(order, lt, n);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, order.clone()));
        }
        return;
    }
    let members = &cells[cell];
    let placed = members.iter().filter(|&&x| used[x]).count();
    let next_cell = if placed + 1 == members.len() { cell + 1 } else { cell };
    for &x in members {
        if used[x] {
            continue;
        }
        used[x] = true;
        order.push(x);
        search(cells, next_cell, order, used, lt, n, best);
        order.pop();
        used[x] = false;
    }
}

/// Relabels `p` by its canonical ordering, with labels `"0".."n-1"`.
fn canonical_poset(p: &GradedPoset) -> (CanonicalCode, GradedPoset) {
    let (code, order) = canonical_form(p);
    let mut pos = vec![0; p.len()];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    let covers = p.covers().iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    let labels = (0..p.len()).map(|i| i.to_string()).collect();
    (code, GradedPoset::new(labels, covers).expect("relabelling keeps gradedness"))
}

/// One representative per isomorphism class of graded posets with exactly `n` elements.
pub fn enumerate_exact(n: usize) -> Vec<GradedPoset> {
    levels(n).pop().unwrap_or_default()
}

/// Graded posets with `1 ≤ |P| ≤ max_elements` and, if given, every interval of
/// length at most `max_length`. Ordered by size, then by canonical code.
pub fn enumerate_corpus(max_elements: usize, max_length: Option<usize>) -> Vec<GradedPoset> {
    levels(max_elements)
        .into_iter()
        .flatten()
        .filter(|p| max_length.is_none_or(|l| p.max_length() <= l))
        .collect()
}

fn levels(max: usize) -> Vec<Vec<GradedPoset>> {
    let mut out: Vec<Vec<GradedPoset>> = Vec::new();
    if max == 0 {
        return out;
    }
    out.push(vec![GradedPoset::antichain(1)]);
    for n in 2..=max {
        let mut found: BTreeMap<CanonicalCode, GradedPoset> = BTreeMap::new();
        for parent in &out[n - 2] {
            for ideal in down_sets(parent) {
                let maximal: Vec<usize> = ideal
                    .iter()
                    .copied()
                    .filter(|&x| !ideal.iter().any(|&y| y != x && parent.leq(x, y)))
                    .collect();
                let mut covers = parent.covers().to_vec();
                covers.extend(maximal.into_iter().map(|x| (x, n - 1)));
                let labels = (0..n).map(|i| i.to_string()).collect();
                let Ok(child) = GradedPoset::new(labels, covers) else {
                    continue;
                };
                let (code, canon) = canonical_poset(&child);
                found.entry(code).or_insert(canon);
            }
        }
        out.push(found.into_values().collect());
    }
    out
}

fn down_sets(p: &GradedPoset) -> Vec<Vec<usize>> {
    let n = p.len();
    (0u32..1 << n)
        .filter(|&mask| {
            (0..n).all(|y| mask >> y & 1 == 0 || (0..n).all(|x| !p.leq(x, y) || mask >> x & 1 == 1))
        })
        .map(|mask| (0..n).filter(|&x| mask >> x & 1 == 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_exact(1).len(), 1);
        assert_eq!(enumerate_exact(2).len(), 2);
        // All 5 posets on 3 elements are graded.
        assert_eq!(enumerate_exact(3).len(), 5);
        // A non-graded interval needs maximal chains of lengths 2 and 3, so five elements.
        assert_eq!(enumerate_exact(4).len(), 16);
        // 63 posets on 5 elements, minus the pentagon.
        assert_eq!(enumerate_exact(5).len(), 62);
        assert_eq!(enumerate_corpus(2, None).len(), 3);
        assert_eq!(enumerate_corpus(3, Some(1)).len(), 1 + 2 + 4);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let a = GradedPoset::from_labels(&["x", "y", "z"], &[("x", "y"), ("x", "z")]).unwrap();
        let b = GradedPoset::from_labels(&["p", "q", "r"], &[("q", "p"), ("q", "r")]).unwrap();
        let c = GradedPoset::from_labels(&["p", "q", "r"], &[("p", "q"), ("r", "q")]).unwrap();
        assert_eq!(canonical_form(&a).0, canonical_form(&b).0);
        assert_ne!(canonical_form(&a).0, canonical_form(&c).0);
    }

    #[test]
    fn deterministic() {
        let a: Vec<String> = enumerate_corpus(4, None).iter().map(|p| p.to_json()).collect();
        let b: Vec<String> = enumerate_corpus(4, None).iter().map(|p| p.to_json()).collect();
        assert_eq!(a, b);
    }
}
