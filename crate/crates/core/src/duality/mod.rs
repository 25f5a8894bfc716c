//! Graded left and right duals of finite-support rings and corings, duals of
//! almost-Koszul pairs, and double-dual checks.
//!
//! `R^op` is the same `k^S` (the base is commutative). The dual `^*V` keeps
//! the block of its primal basis vector, and the functional dual to `v` is
//! labeled `Dual(v)`, printed `f[x,y]` for an interval label `e[x,y]`.
//!
//! Left and right duals differ only in which idempotent a functional takes
//! its values in. Over a commutative split base their structure constants
//! coincide; both are built through their own `φ`/`ψ` so the coherence
//! assertions run on each side.

use std::sync::Arc;

use crate::bimodule::{dual_tensor_iso, left_dual, right_dual, Bimodule, BimoduleMap, Side};
use crate::error::{Error, Result};
use crate::graded::{GradedCoring, GradedRing};
use crate::koszul::AlmostKoszulPair;
use crate::label::Label;

fn dual_components(comps: &[Arc<Bimodule>], side: Side) -> Vec<Bimodule> {
    comps[1..]
        .iter()
        .map(|c| match side {
            Side::Left => left_dual(c),
            Side::Right => right_dual(c),
        })
        .collect()
}

fn pair_factors(l: &Label) -> Result<(Label, Label)> {
    match l.factors() {
        [x, y] => Ok((x.clone(), y.clone())),
        _ => Err(Error::Invariant(format!("{l} is not a pair of positive-degree functionals"))),
    }
}

/// `Δ_{p,q} = ψ ∘ ^*μ^{p,q}`, asserting `φ ∘ Δ_{p,q} = ^*μ^{p,q}`.
fn dual_comultiplication(a: &GradedRing, p: usize, q: usize, side: Side) -> Result<BimoduleMap> {
    let transposed = a.mult(p, q)?.transpose_dual();
    let (phi, psi) = dual_tensor_iso(&a.component(p), &a.component(q), side)?;
    let delta = psi.compose(&transposed)?;
    if !phi.compose(&delta)?.same_as(&transposed) {
        return Err(Error::Invariant(format!("φ∘Δ_{{{p},{q}}} differs from the transpose of μ")));
    }
    Ok(delta)
}

/// `μ^{p,q} = ^*Δ_{p,q} ∘ φ`, asserting `ψ ∘ φ = id`.
fn dual_multiplication(c: &GradedCoring, p: usize, q: usize, side: Side) -> Result<BimoduleMap> {
    let transposed = c.comult(p, q)?.transpose_dual();
    let (phi, psi) = dual_tensor_iso(&c.component(p), &c.component(q), side)?;
    if !psi.compose(&phi)?.same_as(&BimoduleMap::identity(phi.source().clone())) {
        return Err(Error::Invariant(format!("ψ∘φ is not the identity in degrees ({p},{q})")));
    }
    transposed.compose(&phi)
}

fn dual_of_ring(a: &GradedRing, side: Side) -> Result<GradedCoring> {
    let top = a.top_degree();
    let mut maps = std::collections::HashMap::new();
    for p in 1..top {
        for q in 1..=top - p {
            maps.insert((p, q), dual_comultiplication(a, p, q, side)?);
        }
    }
    GradedCoring::new(
        a.base().clone(),
        dual_components(a.components(), side),
        |f, p| {
            let n = a.degree_of(f.undual().expect("dual label")).expect("graded label");
            maps[&(p, n - p)]
                .apply_label(f)
                .into_iter()
                .map(|(l, x)| pair_factors(&l).map(|(u, v)| (u, v, x)))
                .collect()
        },
        a.is_complete(),
    )
}

fn dual_of_coring(c: &GradedCoring, side: Side) -> Result<GradedRing> {
    let top = c.top_degree();
    let mut maps = std::collections::HashMap::new();
    for p in 1..top {
        for q in 1..=top - p {
            maps.insert((p, q), dual_multiplication(c, p, q, side)?);
        }
    }
    GradedRing::new(
        c.base().clone(),
        dual_components(c.components(), side),
        |f, g| {
            let p = c.degree_of(f.undual().expect("dual label")).expect("graded label");
            let q = c.degree_of(g.undual().expect("dual label")).expect("graded label");
            Ok(maps[&(p, q)].apply_label(&Label::tensor(&[f, g])))
        },
        c.is_complete(),
    )
}

/// The graded left dual coring `^{*gr}A`, with `Δ_{p,q} = ψ ∘ ^*μ^{p,q}`.
pub fn graded_left_dual_of_ring(a: &GradedRing) -> Result<GradedCoring> {
    dual_of_ring(a, Side::Left)
}

/// The graded left dual ring `^{*gr}C` with the convolution product
/// `(α ∗ β)(c) = Σ α(c_{1,p} β(c_{2,q}))`; the unit is the counit.
pub fn graded_left_dual_of_coring(c: &GradedCoring) -> Result<GradedRing> {
    dual_of_coring(c, Side::Left)
}

/// The graded right dual coring `A^{*gr}`.
pub fn graded_right_dual_of_ring(a: &GradedRing) -> Result<GradedCoring> {
    dual_of_ring(a, Side::Right)
}

/// The graded right dual ring `C^{*gr}`.
pub fn graded_right_dual_of_coring(c: &GradedCoring) -> Result<GradedRing> {
    dual_of_coring(c, Side::Right)
}

/// The dual pair `(^{*gr}C, ^{*gr}A)` with `θ` replaced by its transpose;
/// almost-Koszulity is re-asserted by the pair constructor.
pub fn dual_pair(pair: &AlmostKoszulPair) -> Result<AlmostKoszulPair> {
    let ring = graded_left_dual_of_coring(pair.coring())?;
    let coring = graded_left_dual_of_ring(pair.ring())?;
    let theta = pair
        .theta()
        .transpose_dual()
        .rebased(coring.component(1), ring.component(1), 0)?;
    AlmostKoszulPair::new(ring, coring, theta)
}

fn double_dual_label(l: &Label) -> Label {
    l.dual().dual()
}

/// Whether `(^{*gr}A)^{*gr}` recovers `A` under `a ↦ Dual(Dual(a))`, by exact
/// structure-constant comparison.
pub fn double_dual_check(a: &GradedRing) -> Result<bool> {
    let back = graded_right_dual_of_coring(&graded_left_dual_of_ring(a)?)?;
    Ok(a.same_structure(&back, double_dual_label))
}

/// Coring mirror of [`double_dual_check`].
pub fn double_dual_check_coring(c: &GradedCoring) -> Result<bool> {
    let back = graded_right_dual_of_ring(&graded_left_dual_of_coring(c)?)?;
    Ok(c.same_structure(&back, double_dual_label))
}

/// Whether `dual_pair(dual_pair(pair))` is `pair` up to the double-dual relabeling,
/// including `θ`.
pub fn double_dual_pair_check(pair: &AlmostKoszulPair) -> Result<bool> {
    let back = dual_pair(&dual_pair(pair)?)?;
    let f = pair.ring().field();
    let theta_ok = pair.coring().component(1).basis().all(|(_, c)| {
        let mapped: Vec<(Label, _)> = pair
            .theta()
            .apply_label(c)
            .into_iter()
            .map(|(l, x)| (double_dual_label(&l), x))
            .collect();
        crate::label::collect_terms(back.theta().apply_label(&double_dual_label(c)), f) == mapped
    });
    Ok(theta_ok
        && pair.ring().same_structure(back.ring(), double_dual_label)
        && pair.coring().same_structure(back.coring(), double_dual_label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::BaseRing;
    use crate::koszul::{make_pair_shriek_ring, pair_exactness, KoszulSide};
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

    fn dual_of_atom(l: &Label) -> Label {
        l.dual()
    }

    #[test]
    fn base_ring_duals() {
        let base = BaseRing::new(vec!["x".into(), "y".into()], Q).unwrap();
        let r = GradedRing::new(base.clone(), vec![], |_, _| Ok(vec![]), true).unwrap();
        let d = graded_left_dual_of_ring(&r).unwrap();
        assert_eq!(d.dims(), vec![2]);
        let rr = graded_left_dual_of_coring(&d).unwrap();
        assert!(r.same_structure(&rr, |l| l.clone()));
        assert!(double_dual_check(&r).unwrap());
    }

    #[test]
    fn incidence_duals() {
        for p in [diamond(), pbad(), GradedPoset::chain(4)] {
            let a = incidence_ring(&p, Q).unwrap();
            let c = incidence_coring(&p, Q).unwrap();
            assert!(c.same_structure(&graded_left_dual_of_ring(&a).unwrap(), dual_of_atom));
            assert!(c.same_structure(&graded_right_dual_of_ring(&a).unwrap(), dual_of_atom));
            assert!(a.same_structure(&graded_left_dual_of_coring(&c).unwrap(), dual_of_atom));
            assert!(double_dual_check(&a).unwrap());
            assert!(double_dual_check_coring(&c).unwrap());
        }
    }

    #[test]
    fn convolution_of_interval_functionals() {
        let c = incidence_coring(&GradedPoset::chain(3), Q).unwrap();
        let r = graded_left_dual_of_coring(&c).unwrap();
        let f = |x: &str, y: &str| Label::atom(format!("e[{x},{y}]")).dual();
        assert_eq!(r.mul(&f("0", "1"), &f("1", "2")), vec![(f("0", "2"), Q.one())]);
        assert!(r.mul(&f("1", "2"), &f("0", "1")).is_empty());
    }

    #[test]
    fn dual_pairs() {
        for p in [diamond(), pbad()] {
            let pair = make_pair_shriek_ring(&incidence_ring(&p, Q).unwrap()).unwrap();
            let dual = dual_pair(&pair).unwrap();
            assert!(double_dual_pair_check(&pair).unwrap());
            let before = pair_exactness(&pair, KoszulSide::Left).unwrap();
            let after = pair_exactness(&dual, KoszulSide::Left).unwrap();
            assert_eq!(before.koszul, after.koszul);
        }
    }
}
