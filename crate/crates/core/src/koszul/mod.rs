//! Almost-Koszul pairs, their Koszul complexes, and the decision procedures.

mod decide;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use decide::{
    decide_koszul_coring, decide_koszul_ring, phi_shriek_coring_check, phi_shriek_ring_check, CriterionResult,
    KoszulVerdict, PhiCheck,
};

use crate::bimodule::{tensor, tensor_map, tensor_power, Bimodule, BimoduleMap};
use crate::error::{Error, Result};
use crate::graded::{
    direct_product, direct_sum_corings, is_strongly_graded_coring, is_strongly_graded_ring, shriek_of_coring,
    shriek_of_ring, split_pair, GradedCoring, GradedRing,
};
use crate::homology::{is_exact, ComplexSlice, Direction};
use crate::label::{collect_terms, Combination, Label};

/// `(A, C, θ)` with `θ : C_1 → A^1` invertible and `μ^{1,1} ∘ (θ⊗θ) ∘ Δ_{1,1} = 0`.
#[derive(Clone, Debug)]
pub struct AlmostKoszulPair {
    ring: GradedRing,
    coring: GradedCoring,
    theta: BimoduleMap,
}

impl AlmostKoszulPair {
    pub fn new(ring: GradedRing, coring: GradedCoring, theta: BimoduleMap) -> Result<Self> {
        if **ring.base() != **coring.base() {
            return Err(Error::BaseMismatch);
        }
        if **theta.source() != *coring.component(1) || **theta.target() != *ring.component(1) {
            return Err(Error::InvalidStructure("θ must map C_1 to A^1".into()));
        }
        if !theta.is_invertible()? {
            return Err(Error::InvalidStructure("θ is not invertible".into()));
        }
        let tt = tensor_map(&theta, &theta)?;
        let composite = ring.mult(1, 1)?.compose(&tt.compose(&coring.comult(1, 1)?)?)?;
        if !composite.is_zero() {
            return Err(Error::InvalidStructure("μ^{1,1}∘(θ⊗θ)∘Δ_{1,1} ≠ 0".into()));
        }
        Ok(AlmostKoszulPair { ring, coring, theta })
    }

    pub fn ring(&self) -> &GradedRing {
        &self.ring
    }

    pub fn coring(&self) -> &GradedCoring {
        &self.coring
    }

    pub fn theta(&self) -> &BimoduleMap {
        &self.theta
    }

    /// `2·max(top A, top C)`: both tensor factors of a weight-`m` Koszul slice
    /// vanish beyond their tops, so every slice above this weight is zero.
    pub fn weight_bound(&self) -> usize {
        2 * self.ring.top_degree().max(self.coring.top_degree())
    }

    /// Whether both structures are known to vanish above their tops.
    pub fn is_complete(&self) -> bool {
        self.ring.is_complete() && self.coring.is_complete()
    }
}

fn identity_theta(c1: Arc<Bimodule>, a1: Arc<Bimodule>) -> Result<BimoduleMap> {
    let f = c1.field();
    BimoduleMap::from_fn(c1, a1, |l| Ok(vec![(l.clone(), f.one())]))
}

/// `(A, A^!)` with `θ` the identity of `A^1`.
pub fn make_pair_shriek_ring(a: &GradedRing) -> Result<AlmostKoszulPair> {
    if let Some(degree) = is_strongly_graded_ring(a)?.degree {
        return Err(Error::NotStronglyGraded { degree });
    }
    let c = shriek_of_ring(a)?;
    let theta = identity_theta(c.component(1), a.component(1))?;
    AlmostKoszulPair::new(a.clone(), c, theta)
}

/// `(C^!, C)` with `θ` the identity of `C_1`.
pub fn make_pair_shriek_coring(c: &GradedCoring) -> Result<AlmostKoszulPair> {
    if let Some(degree) = is_strongly_graded_coring(c)?.degree {
        return Err(Error::NotStronglyGraded { degree });
    }
    let a = shriek_of_coring(c)?;
    let theta = identity_theta(c.component(1), a.component(1))?;
    AlmostKoszulPair::new(a, c.clone(), theta)
}

/// `(A × B, C ⊕ D)` with `θ` acting componentwise.
pub fn pair_product(p: &AlmostKoszulPair, q: &AlmostKoszulPair) -> Result<AlmostKoszulPair> {
    let ring = direct_product(&p.ring, &q.ring)?;
    let coring = direct_sum_corings(&p.coring, &q.coring)?;
    let theta = BimoduleMap::from_fn(coring.component(1), ring.component(1), |l| {
        let image = p.theta.apply_label(l);
        Ok(if image.is_empty() { q.theta.apply_label(l) } else { image })
    })?;
    AlmostKoszulPair::new(ring, coring, theta)
}

/// `Σ a·θ(c_{1,1}) ⊗ c_{2,n−1}` for `a ⊗ c ∈ A^{i} ⊗ C_n`.
fn left_differential(pair: &AlmostKoszulPair, a: &Label, c: &Label, n: usize) -> Combination {
    let f = pair.ring.field();
    let terms = pair.coring.split(c, 1).into_iter().flat_map(|(c1, c2, x)| {
        let prods: Vec<(Label, crate::Scalar)> = pair
            .theta
            .apply_label(&c1)
            .into_iter()
            .flat_map(|(t, y)| pair.ring.mul(a, &t).into_iter().map(move |(p, z)| (p, f.mul(&y, &z))))
            .collect();
        prods
            .into_iter()
            .map(move |(p, y)| (Label::tensor(&[&p, &c2]), f.mul(&x, &y)))
    });
    debug_assert!(n >= 1);
    collect_terms(terms, f)
}

/// `Σ c_{1,n−1} ⊗ θ(c_{2,1})·a` for `c ⊗ a ∈ C_n ⊗ A^{i}`.
fn opposite_differential(pair: &AlmostKoszulPair, c: &Label, a: &Label, n: usize) -> Combination {
    let f = pair.ring.field();
    let terms = pair.coring.split(c, n - 1).into_iter().flat_map(|(c1, c2, x)| {
        let prods: Vec<(Label, crate::Scalar)> = pair
            .theta
            .apply_label(&c2)
            .into_iter()
            .flat_map(|(t, y)| pair.ring.mul(&t, a).into_iter().map(move |(p, z)| (p, f.mul(&y, &z))))
            .collect();
        prods
            .into_iter()
            .map(move |(p, y)| (Label::tensor(&[&c1, &p]), f.mul(&x, &y)))
    });
    collect_terms(terms, f)
}

/// `A^{m−n} ⊗ C_n` for `n = 0..=m`, and the maps `A^{m−n} ⊗ C_n → A^{m−n+1} ⊗ C_{n−1}`.
fn left_cells(pair: &AlmostKoszulPair, m: usize) -> Result<(Vec<Arc<Bimodule>>, Vec<BimoduleMap>)> {
    let spaces: Vec<Arc<Bimodule>> = (0..=m)
        .map(|n| Ok(Arc::new(tensor(&pair.ring.component(m - n), &pair.coring.component(n))?)))
        .collect::<Result<_>>()?;
    let maps = (1..=m)
        .map(|n| {
            let (an, cn) = (pair.ring.component(m - n), pair.coring.component(n));
            BimoduleMap::from_fn(spaces[n].clone(), spaces[n - 1].clone(), |l| {
                let (a, c) = split_pair(l, &an, &cn);
                Ok(left_differential(pair, &a, &c, n))
            })
        })
        .collect::<Result<_>>()?;
    Ok((spaces, maps))
}

/// The augmentation term `R` in degree −1; zero above weight 0.
fn augmentation(pair: &AlmostKoszulPair, m: usize) -> Arc<Bimodule> {
    let r = tensor_power(&pair.ring.component(1), 0);
    Arc::new(if m == 0 { r } else { Bimodule::zero(pair.ring.base().clone()) })
}

fn augmentation_map(source: Arc<Bimodule>, target: Arc<Bimodule>) -> Result<BimoduleMap> {
    let f = source.field();
    BimoduleMap::from_fn(source, target.clone(), |l| {
        Ok(if target.contains_label(l) { vec![(l.clone(), f.one())] } else { Vec::new() })
    })
}

/// `K^l_n(A, C, m) = A^{m−n} ⊗ C_n` for `−1 ≤ n ≤ m`, a chain complex.
pub fn koszul_complex_left(pair: &AlmostKoszulPair, m: usize) -> Result<ComplexSlice> {
    let (cells, maps) = left_cells(pair, m)?;
    let aug = augmentation(pair, m);
    let d0 = augmentation_map(cells[0].clone(), aug.clone())?;
    let spaces = std::iter::once(aug).chain(cells).collect();
    let maps = std::iter::once(d0).chain(maps).collect();
    ComplexSlice::new(Direction::Chain, m, -1, spaces, maps)
}

/// `K^n_r(A, C, m) = A^n ⊗ C_{m−n}` for `−1 ≤ n ≤ m`, a cochain complex with
/// `d_r(a ⊗ c) = Σ a·θ(c_{1,1}) ⊗ c_{2,p−1}`.
pub fn koszul_complex_right(pair: &AlmostKoszulPair, m: usize) -> Result<ComplexSlice> {
    let (mut cells, mut maps) = left_cells(pair, m)?;
    // K_r^n is the left cell with n = m − k, so reverse both lists.
    cells.reverse();
    maps.reverse();
    let aug = augmentation(pair, m);
    let d_minus = augmentation_map(aug.clone(), cells[0].clone())?;
    let spaces = std::iter::once(aug).chain(cells).collect();
    let maps = std::iter::once(d_minus).chain(maps).collect();
    ComplexSlice::new(Direction::Cochain, m, -1, spaces, maps)
}

/// `C_n ⊗ A^{m−n}` with `d(c ⊗ a) = Σ c_{1,n−1} ⊗ θ(c_{2,1})·a`: the Koszul complex
/// of the opposite pair, a chain complex in `−1 ≤ n ≤ m`.
pub fn koszul_complex_opposite(pair: &AlmostKoszulPair, m: usize) -> Result<ComplexSlice> {
    let cells: Vec<Arc<Bimodule>> = (0..=m)
        .map(|n| Ok(Arc::new(tensor(&pair.coring.component(n), &pair.ring.component(m - n))?)))
        .collect::<Result<_>>()?;
    let mut maps = Vec::with_capacity(m + 1);
    let aug = augmentation(pair, m);
    maps.push(augmentation_map(cells[0].clone(), aug.clone())?);
    for n in 1..=m {
        let (cn, an) = (pair.coring.component(n), pair.ring.component(m - n));
        maps.push(BimoduleMap::from_fn(cells[n].clone(), cells[n - 1].clone(), |l| {
            let (c, a) = split_pair(l, &cn, &an);
            Ok(opposite_differential(pair, &c, &a, n))
        })?);
    }
    let spaces = std::iter::once(aug).chain(cells).collect();
    ComplexSlice::new(Direction::Chain, m, -1, spaces, maps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KoszulSide {
    Left,
    Right,
    Opposite,
}

/// Exactness of every slice `1 ≤ m ≤ bound` of one family of Koszul complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairExactness {
    pub koszul: bool,
    /// Smallest weight with a non-exact slice.
    pub witness_weight: Option<usize>,
    pub m_bound_used: usize,
    /// Both structures vanish above their tops, so the sweep decides exactness for all weights.
    pub sound: bool,
    /// Nonzero homology per failing weight: `(m, degree, dim)`.
    pub homology: Vec<(usize, i64, usize)>,
}

/// Sweeps the Koszul complexes of `pair` up to its weight bound and asserts
/// that the slice just above the bound is zero.
pub fn pair_exactness(pair: &AlmostKoszulPair, side: KoszulSide) -> Result<PairExactness> {
    let build = |m: usize| match side {
        KoszulSide::Left => koszul_complex_left(pair, m),
        KoszulSide::Right => koszul_complex_right(pair, m),
        KoszulSide::Opposite => koszul_complex_opposite(pair, m),
    };
    let bound = pair.weight_bound();
    if pair.is_complete() && !build(bound + 1)?.is_zero() {
        return Err(Error::Invariant(format!("Koszul slice at weight {} is nonzero", bound + 1)));
    }
    if !is_exact(&build(0)?)?.exact {
        return Err(Error::Invariant("weight-0 Koszul slice is not exact".into()));
    }
    let results = (1..=bound)
        .into_par_iter()
        .map(|m| Ok((m, is_exact(&build(m)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut homology = Vec::new();
    let mut witness = None;
    for (m, e) in results {
        if !e.exact {
            witness.get_or_insert(m);
            homology.extend(e.homology.into_iter().map(|(n, h)| (m, n, h)));
        }
    }
    Ok(PairExactness {
        koszul: witness.is_none(),
        witness_weight: witness,
        m_bound_used: bound,
        sound: pair.is_complete(),
        homology,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FieldSpec;
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
    fn shriek_pairs() {
        let p = make_pair_shriek_ring(&incidence_ring(&diamond(), Q).unwrap()).unwrap();
        assert_eq!(p.coring().component(2).dim(), 1);
        let anti = make_pair_shriek_ring(&incidence_ring(&GradedPoset::antichain(2), Q).unwrap()).unwrap();
        assert_eq!((anti.ring().top_degree(), anti.coring().top_degree()), (0, 0));
        let ch = make_pair_shriek_ring(&incidence_ring(&GradedPoset::chain(4), Q).unwrap()).unwrap();
        assert_eq!(ch.coring().dims(), vec![4, 3]);
        let cp = make_pair_shriek_coring(&incidence_coring(&diamond(), Q).unwrap()).unwrap();
        assert_eq!(cp.ring().dims(), vec![4, 4, 1]);
    }

    #[test]
    fn weight_zero_and_diamond_slices() {
        let p = make_pair_shriek_ring(&incidence_ring(&diamond(), Q).unwrap()).unwrap();
        for m in 0..=4 {
            assert!(is_exact(&koszul_complex_left(&p, m).unwrap()).unwrap().exact, "m = {m}");
            assert!(is_exact(&koszul_complex_right(&p, m).unwrap()).unwrap().exact, "m = {m}");
            assert!(is_exact(&koszul_complex_opposite(&p, m).unwrap()).unwrap().exact, "m = {m}");
        }
        let s = koszul_complex_left(&p, 2).unwrap();
        let dims: Vec<usize> = s.spaces().iter().map(|b| b.block_dim((0, 3))).collect();
        assert_eq!(dims, vec![0, 1, 2, 1]);
    }

    #[test]
    fn pbad_fails_at_three() {
        let p = make_pair_shriek_ring(&incidence_ring(&pbad(), Q).unwrap()).unwrap();
        let e = pair_exactness(&p, KoszulSide::Left).unwrap();
        assert_eq!((e.koszul, e.witness_weight), (false, Some(3)));
        let o = pair_exactness(&p, KoszulSide::Opposite).unwrap();
        assert!(!o.koszul);
        let c = make_pair_shriek_coring(&incidence_coring(&pbad(), Q).unwrap()).unwrap();
        assert_eq!(pair_exactness(&c, KoszulSide::Right).unwrap().witness_weight, Some(3));
    }

    #[test]
    fn incompatible_theta_is_rejected() {
        let a = incidence_ring(&diamond(), Q).unwrap();
        let c = incidence_coring(&diamond(), Q).unwrap();
        let theta = identity_theta(c.component(1), a.component(1)).unwrap();
        let err = AlmostKoszulPair::new(a, c, theta).unwrap_err();
        assert!(matches!(err, Error::InvalidStructure(_)));
    }

    #[test]
    fn products_of_pairs() {
        let d = make_pair_shriek_ring(&incidence_ring(&diamond(), Q).unwrap()).unwrap();
        let e = GradedPoset::from_labels(&["p", "q"], &[("p", "q")]).unwrap();
        let c = make_pair_shriek_ring(&incidence_ring(&e, Q).unwrap()).unwrap();
        let prod = pair_product(&d, &c).unwrap();
        assert!(pair_exactness(&prod, KoszulSide::Left).unwrap().koszul);
        let b = GradedPoset::from_labels(
            &["q0", "qa", "qb", "qc", "qd", "q1"],
            &[("q0", "qa"), ("q0", "qb"), ("qa", "qc"), ("qb", "qd"), ("qc", "q1"), ("qd", "q1")],
        )
        .unwrap();
        let bad = make_pair_shriek_ring(&incidence_ring(&b, Q).unwrap()).unwrap();
        assert!(!pair_exactness(&pair_product(&d, &bad).unwrap(), KoszulSide::Left).unwrap().koszul);
        assert!(matches!(pair_product(&d, &d), Err(Error::LabelCollision(_))));
    }
}
