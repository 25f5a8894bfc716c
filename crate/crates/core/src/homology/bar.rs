//! The normalized bar complex `Ω_•(A, m)` and cobar complex `Ω^•(C, m)`.

use std::sync::Arc;

use super::{partitions, ComplexSlice, Direction};
use crate::bimodule::{tensor, tensor_power, Bimodule, BimoduleMap};
use crate::error::Result;
use crate::graded::{GradedCoring, GradedRing};
use crate::label::{collect_terms, Combination, Label};
use crate::linalg::FieldSpec;

/// `⊕_{𝒎 ∈ 𝒫_n(m)} X_{m_1} ⊗ ⋯ ⊗ X_{m_n}` over compositions with parts at most `top`.
pub(crate) fn composition_space(component: &dyn Fn(usize) -> Arc<Bimodule>, top: usize, n: usize, m: usize) -> Result<Arc<Bimodule>> {
    let base = component(0).base().clone();
    let mut parts = Vec::new();
    for comp in partitions(n, m) {
        if comp.iter().any(|&p| p > top) {
            continue;
        }
        let mut acc = (*component(comp[0])).clone();
        for &p in &comp[1..] {
            if acc.is_zero() {
                break;
            }
            acc = tensor(&acc, &component(p))?;
        }
        if !acc.is_zero() {
            parts.push(acc);
        }
    }
    let refs: Vec<&Bimodule> = parts.iter().collect();
    Ok(Arc::new(Bimodule::direct_sum(base, &refs)?))
}

fn sign(i: usize, f: FieldSpec) -> crate::Scalar {
    if i % 2 == 0 {
        f.one()
    } else {
        f.neg(&f.one())
    }
}

fn spliced(fs: &[Label], i: usize, width: usize, middle: &[&Label]) -> Label {
    let refs: Vec<&Label> = fs[..i].iter().chain(middle.iter().copied()).chain(fs[i + width..].iter()).collect();
    Label::tensor(&refs)
}

/// `d_n(a_1 ⊗ ⋯ ⊗ a_n) = Σ_i (−1)^{i−1} a_1 ⊗ ⋯ ⊗ a_i a_{i+1} ⊗ ⋯ ⊗ a_n`.
pub(crate) fn bar_differential(a: &GradedRing, l: &Label) -> Combination {
    let f = a.field();
    let fs = l.factors();
    let terms = (0..fs.len().saturating_sub(1)).flat_map(|i| {
        let s = sign(i, f);
        a.mul(&fs[i], &fs[i + 1])
            .into_iter()
            .map(move |(p, x)| (spliced(fs, i, 2, &[&p]), f.mul(&x, &s)))
    });
    collect_terms(terms, f)
}

/// `d^n(c_1 ⊗ ⋯ ⊗ c_n) = Σ_i (−1)^{i−1} c_1 ⊗ ⋯ ⊗ Δ_+(c_i) ⊗ ⋯ ⊗ c_n`.
pub(crate) fn cobar_differential(c: &GradedCoring, l: &Label) -> Combination {
    let f = c.field();
    let fs = l.factors();
    let terms = (0..fs.len()).flat_map(|i| {
        let s = sign(i, f);
        let deg = c.degree_of(&fs[i]).unwrap_or(0);
        (1..deg).flat_map(move |p| {
            let s = s.clone();
            c.split(&fs[i], p)
                .into_iter()
                .map(move |(x, y, v)| (spliced(fs, i, 1, &[&x, &y]), f.mul(&v, &s)))
        })
    });
    collect_terms(terms, f)
}

/// Degrees `1 ..= m` of the weight-`m` bar complex; weight 0 is `R` in degree 0.
pub fn bar_complex_ring(a: &GradedRing, m: usize) -> Result<ComplexSlice> {
    if m == 0 {
        let r = Arc::new(tensor_power(&a.component(1), 0));
        return ComplexSlice::new(Direction::Chain, 0, 0, vec![r], Vec::new());
    }
    let comp = |p: usize| a.component(p);
    let spaces = (1..=m)
        .map(|n| composition_space(&comp, a.top_degree(), n, m))
        .collect::<Result<Vec<_>>>()?;
    let maps = (1..m)
        .map(|i| BimoduleMap::from_fn(spaces[i].clone(), spaces[i - 1].clone(), |l| Ok(bar_differential(a, l))))
        .collect::<Result<Vec<_>>>()?;
    ComplexSlice::new(Direction::Chain, m, 1, spaces, maps)
}

/// Degrees `1 ..= m` of the weight-`m` cobar complex; weight 0 is `R` in degree 0.
pub fn cobar_complex_coring(c: &GradedCoring, m: usize) -> Result<ComplexSlice> {
    if m == 0 {
        let r = Arc::new(tensor_power(&c.component(1), 0));
        return ComplexSlice::new(Direction::Cochain, 0, 0, vec![r], Vec::new());
    }
    let comp = |p: usize| c.component(p);
    let spaces = (1..=m)
        .map(|n| composition_space(&comp, c.top_degree(), n, m))
        .collect::<Result<Vec<_>>>()?;
    let maps = (1..m)
        .map(|i| {
            BimoduleMap::from_fn(spaces[i - 1].clone(), spaces[i].clone(), |l| Ok(cobar_differential(c, l)))
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexSlice::new(Direction::Cochain, m, 1, spaces, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{ext_table, is_exact, tor_table};
    use crate::poset::{incidence_coring, incidence_ring, GradedPoset};

    const Q: FieldSpec = FieldSpec::Rationals;

    fn diamond() -> GradedPoset {
        GradedPoset::from_labels(&["0", "a", "b", "1"], &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]).unwrap()
    }

    fn pbad() -> GradedPoset {
        GradedPoset::from_labels(
            &["0", "a", "b", "c", "d", "1"],
            &[("0", "a"), ("0", "b"), ("a", "c"), ("b", "d"), ("c", "1"), ("d", "1")],
        )
        .unwrap()
    }

    #[test]
    fn diamond_bar_slices() {
        let a = incidence_ring(&diamond(), Q).unwrap();
        let s1 = bar_complex_ring(&a, 1).unwrap();
        assert_eq!(s1.homology_dims().unwrap()[&1], 4);
        let s2 = bar_complex_ring(&a, 2).unwrap();
        let h = s2.homology_dims().unwrap();
        assert_eq!((h[&1], h[&2]), (0, 1));
        let t = tor_table(&a, 4, 4).unwrap();
        assert_eq!(t.diagonal(), vec![4, 4, 1, 0, 0]);
        assert!(t.is_diagonal());
    }

    #[test]
    fn pbad_off_diagonal() {
        let a = incidence_ring(&pbad(), Q).unwrap();
        let h = bar_complex_ring(&a, 3).unwrap().homology_dims().unwrap();
        assert_eq!(h[&2], 1);
        let t = tor_table(&a, 6, 6).unwrap();
        assert_eq!(t.off_diagonal(), vec![(2, 3, 1)]);
        let e = ext_table(&incidence_coring(&pbad(), Q).unwrap(), 6, 6).unwrap();
        assert_eq!(e.off_diagonal(), vec![(2, 3, 1)]);
    }

    #[test]
    fn cobar_examples() {
        let c = incidence_coring(&diamond(), Q).unwrap();
        assert_eq!(cobar_complex_coring(&c, 1).unwrap().homology_dims().unwrap()[&1], 4);
        let h = cobar_complex_coring(&c, 2).unwrap().homology_dims().unwrap();
        assert_eq!((h[&1], h[&2]), (0, 1));
        let anti = incidence_coring(&GradedPoset::antichain(3), Q).unwrap();
        let e = ext_table(&anti, 3, 3).unwrap();
        assert_eq!(e.rows[0], vec![3, 0, 0, 0]);
        assert!(e.rows[1..].iter().flatten().all(|&x| x == 0));
        assert!(is_exact(&cobar_complex_coring(&anti, 2).unwrap()).unwrap().exact);
    }

    #[test]
    fn chains_are_hereditary() {
        let a = incidence_ring(&GradedPoset::chain(4), Q).unwrap();
        let t = tor_table(&a, 6, 6).unwrap();
        assert_eq!(t.rows[1][1], 3);
        assert!(t.rows[2..].iter().flatten().all(|&x| x == 0));
    }
}
