//! The Koszulity decisions with every computable criterion cross-checked.
//!
//! For a connected strongly graded `A` the following are computed and must
//! agree: exactness of `K^l(A, A^!)`, diagonality of `T(A)`, bijectivity of
//! `φ^A : A^! → T(A)`, injectivity of the iterated deconcatenation on `T(A)`,
//! and primitives of `T(A)` lying in degree 1. The coring side mirrors this
//! with `K_r(C^!, C)`, `E(C)`, `φ_C : E(C) → C^!`, generation of `E(C)` by
//! `E^1` and indecomposables of `E(C)` lying in degree 1.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::{make_pair_shriek_coring, make_pair_shriek_ring, pair_exactness, KoszulSide, PairExactness};
use crate::bimodule::{Bimodule, BimoduleMap};
use crate::error::{Error, Result};
use crate::graded::{GradedCoring, GradedRing};
use crate::homology::{
    is_cycle, is_quadratic_coring_direct, is_quadratic_direct, quadratic_via_ext, quadratic_via_tor, BarHomology,
    BettiTable, CobarHomology,
};
use crate::label::collect_terms;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub pass: bool,
    pub evidence: Value,
}

fn criterion(id: &str, pass: bool, evidence: Value) -> CriterionResult {
    CriterionResult {
        id: id.to_string(),
        pass,
        evidence,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoszulVerdict {
    pub verdict: bool,
    /// Smallest weight whose Koszul slice is not exact.
    pub witness_weight: Option<usize>,
    pub m_bound_used: usize,
    /// The sweep up to `m_bound_used` decides exactness in every weight.
    pub sound: bool,
    /// Equivalent characterizations; all agree or the decision fails.
    pub criteria: Vec<CriterionResult>,
    /// Checks that are implied by, but not equivalent to, Koszulity.
    pub consistency: Vec<CriterionResult>,
    pub betti: BettiTable,
}

/// `φ` in one homological degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiCheck {
    pub n: usize,
    pub source_dim: usize,
    pub rank: usize,
    /// Total dimension of the homology in degree `n`, over weights up to the bound.
    pub target_total: usize,
    pub bijective: bool,
}

/// `φ^A_n`: the basis of `A^!_n`, embedded in `(A^1)^{(n)}` by `Δ^n`, is a set of
/// `n`-cycles of weight `n`; bijective when their classes form a basis of `T_n`.
fn phi_ring(bar: &BarHomology, shriek: &GradedCoring, n: usize) -> Result<PhiCheck> {
    let classes = bar.classes(n, n)?;
    let slice = bar.slice(n).expect("slice within bound");
    let map = BimoduleMap::from_fn(shriek.component(n), classes.classes().clone(), |c| {
        let x = shriek.iterated(c);
        if !is_cycle(slice, n, &x)? {
            return Err(Error::Invariant(format!("element {c} of A^!_{n} is not a cycle")));
        }
        classes.project(&x)
    })?;
    let (source_dim, rank, target_total) = (shriek.component(n).dim(), map.rank()?, bar.total_dim(n));
    Ok(PhiCheck {
        n,
        source_dim,
        rank,
        target_total,
        bijective: rank == source_dim && rank == target_total,
    })
}

/// `φ_C,n : E^n(C) → C^!_n`, sending the class of `x_1 ⊗ ⋯ ⊗ x_n` to the product of
/// the degree-1 components; classes of weight `m ≠ n` go to zero.
fn phi_coring(cobar: &CobarHomology, shriek: &GradedRing, n: usize) -> Result<PhiCheck> {
    let f = shriek.field();
    let mut parts = Vec::new();
    for m in n..=cobar.m_max() {
        parts.push((**cobar.classes(n, m)?.classes()).clone());
    }
    let refs: Vec<&Bimodule> = parts.iter().collect();
    let source = Arc::new(Bimodule::direct_sum(shriek.base().clone(), &refs)?);
    let diagonal = cobar.classes(n, n)?;
    let map = BimoduleMap::from_fn(source, shriek.component(n), |h| {
        if !diagonal.classes().contains_label(h) {
            return Ok(Vec::new());
        }
        Ok(collect_terms(
            diagonal.representative(h).into_iter().flat_map(|(l, x)| {
                shriek
                    .product_of(l.factors())
                    .into_iter()
                    .map(move |(p, y)| (p, f.mul(&x, &y)))
            }),
            f,
        ))
    })?;
    let (source_dim, rank, target_total) = (cobar.total_dim(n), map.rank()?, shriek.component(n).dim());
    Ok(PhiCheck {
        n,
        source_dim,
        rank,
        target_total,
        bijective: rank == source_dim && rank == target_total,
    })
}

/// `φ^A_n` on its own, computing the bar homology up to `max(n, 2·top)`.
pub fn phi_shriek_ring_check(a: &GradedRing, n: usize) -> Result<PhiCheck> {
    let pair = make_pair_shriek_ring(a)?;
    let bar = BarHomology::new(a, pair.weight_bound().max(n))?;
    phi_ring(&bar, pair.coring(), n)
}

/// `φ_C,n` on its own, computing the cobar cohomology up to `max(n, 2·top)`.
pub fn phi_shriek_coring_check(c: &GradedCoring, n: usize) -> Result<PhiCheck> {
    let pair = make_pair_shriek_coring(c)?;
    let cobar = CobarHomology::new(c, pair.weight_bound().max(n))?;
    phi_coring(&cobar, pair.ring(), n)
}

fn exactness_criterion(ex: &PairExactness) -> CriterionResult {
    criterion(
        "pair_exactness",
        ex.koszul,
        json!({ "witness_weight": ex.witness_weight, "homology": ex.homology }),
    )
}

fn phi_criterion(checks: Vec<PhiCheck>) -> CriterionResult {
    let failing: Vec<PhiCheck> = checks.into_iter().filter(|c| !c.bijective).collect();
    criterion("phi_iso", failing.is_empty(), json!({ "failing": failing }))
}

fn assemble(
    ex: PairExactness,
    criteria: Vec<CriterionResult>,
    consistency: Vec<CriterionResult>,
    betti: BettiTable,
) -> Result<KoszulVerdict> {
    if criteria.iter().any(|c| c.pass != ex.koszul) {
        let summary: Vec<String> = criteria.iter().map(|c| format!("{}={}", c.id, c.pass)).collect();
        return Err(Error::CriteriaDisagreement(summary.join(", ")));
    }
    if let Some(c) = consistency.iter().find(|c| !c.pass) {
        return Err(Error::Invariant(format!("consistency check {} failed: {}", c.id, c.evidence)));
    }
    Ok(KoszulVerdict {
        verdict: ex.koszul,
        witness_weight: ex.witness_weight,
        m_bound_used: ex.m_bound_used,
        sound: ex.sound,
        criteria,
        consistency,
        betti,
    })
}

/// Decides Koszulity of a connected strongly graded ring by exactness of
/// `K^l(A, A^!, m)` for `1 ≤ m ≤ 2·max(top A, top A^!)`.
pub fn decide_koszul_ring(a: &GradedRing) -> Result<KoszulVerdict> {
    let pair = make_pair_shriek_ring(a)?;
    let ex = pair_exactness(&pair, KoszulSide::Left)?;
    let bound = ex.m_bound_used;
    let bar = BarHomology::new(a, bound)?;
    let betti = bar.table();
    let phi = (1..=bound).map(|n| phi_ring(&bar, pair.coring(), n)).collect::<Result<Vec<_>>>()?;
    let graded = bar.strong_grading_failure()?;
    let primitive: Vec<(usize, usize, usize)> = bar
        .primitive_dims()?
        .into_iter()
        .filter(|&((n, _), d)| n >= 2 && d > 0)
        .map(|((n, m), d)| (n, m, d))
        .collect();
    let criteria = vec![
        exactness_criterion(&ex),
        criterion("tor_diagonal", betti.is_diagonal(), json!({ "off_diagonal": betti.off_diagonal() })),
        phi_criterion(phi),
        criterion("t_strongly_graded", graded.is_none(), json!({ "failure": graded })),
        criterion("primitives_degree_one", primitive.is_empty(), json!({ "primitive": primitive })),
    ];
    let via_tor = quadratic_via_tor(a, None)?;
    let direct = is_quadratic_direct(a)?;
    let consistency = vec![
        criterion(
            "quadratic_routes_agree",
            via_tor.quadratic == direct.quadratic,
            json!({ "via_tor": via_tor, "direct": direct }),
        ),
        criterion(
            "koszul_implies_quadratic",
            !ex.koszul || direct.quadratic,
            json!({ "quadratic": direct.quadratic }),
        ),
    ];
    assemble(ex, criteria, consistency, betti)
}

/// Decides Koszulity of a connected strongly graded coring by exactness of
/// `K_r(C^!, C, m)` for `1 ≤ m ≤ 2·max(top C, top C^!)`.
pub fn decide_koszul_coring(c: &GradedCoring) -> Result<KoszulVerdict> {
    let pair = make_pair_shriek_coring(c)?;
    let ex = pair_exactness(&pair, KoszulSide::Right)?;
    let bound = ex.m_bound_used;
    let cobar = CobarHomology::new(c, bound)?;
    let betti = cobar.table();
    let phi = (1..=bound).map(|n| phi_coring(&cobar, pair.ring(), n)).collect::<Result<Vec<_>>>()?;
    let generated = cobar.strong_grading_failure()?;
    let indecomposable: Vec<(usize, usize, usize)> = cobar
        .indecomposable_dims()?
        .into_iter()
        .filter(|&((n, _), d)| n >= 2 && d > 0)
        .map(|((n, m), d)| (n, m, d))
        .collect();
    let criteria = vec![
        exactness_criterion(&ex),
        criterion("ext_diagonal", betti.is_diagonal(), json!({ "off_diagonal": betti.off_diagonal() })),
        phi_criterion(phi),
        criterion("e_strongly_graded", generated.is_none(), json!({ "failure": generated })),
        criterion(
            "indecomposables_degree_one",
            indecomposable.is_empty(),
            json!({ "indecomposable": indecomposable }),
        ),
    ];
    let via_ext = quadratic_via_ext(c, None)?;
    let direct = is_quadratic_coring_direct(c)?;
    let consistency = vec![
        criterion(
            "quadratic_routes_agree",
            via_ext.quadratic == direct.quadratic,
            json!({ "via_ext": via_ext, "direct": direct }),
        ),
        criterion(
            "koszul_implies_quadratic",
            !ex.koszul || direct.quadratic,
            json!({ "quadratic": direct.quadratic }),
        ),
    ];
    assemble(ex, criteria, consistency, betti)
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
    fn diamond_is_koszul_on_both_sides() {
        let v = decide_koszul_ring(&incidence_ring(&diamond(), Q).unwrap()).unwrap();
        assert!(v.verdict && v.sound);
        assert_eq!(v.m_bound_used, 4);
        assert_eq!(v.betti.diagonal(), vec![4, 4, 1, 0, 0]);
        let w = decide_koszul_coring(&incidence_coring(&diamond(), Q).unwrap()).unwrap();
        assert!(w.verdict);
    }

    #[test]
    fn pbad_is_not() {
        let v = decide_koszul_ring(&incidence_ring(&pbad(), Q).unwrap()).unwrap();
        assert_eq!((v.verdict, v.witness_weight), (false, Some(3)));
        assert!(v.criteria.iter().all(|c| !c.pass));
        let w = decide_koszul_coring(&incidence_coring(&pbad(), Q).unwrap()).unwrap();
        assert_eq!((w.verdict, w.witness_weight), (false, Some(3)));
    }

    #[test]
    fn phi_in_low_degrees() {
        let d = incidence_ring(&diamond(), Q).unwrap();
        assert!(phi_shriek_ring_check(&d, 1).unwrap().bijective);
        let p2 = phi_shriek_ring_check(&d, 2).unwrap();
        assert_eq!((p2.source_dim, p2.rank, p2.bijective), (1, 1, true));
        let b = incidence_ring(&pbad(), Q).unwrap();
        let p = phi_shriek_ring_check(&b, 2).unwrap();
        assert_eq!((p.source_dim, p.rank, p.target_total, p.bijective), (0, 0, 1, false));
        let c = incidence_coring(&diamond(), Q).unwrap();
        assert!(phi_shriek_coring_check(&c, 2).unwrap().bijective);
    }

    #[test]
    fn trivial_structures() {
        let v = decide_koszul_ring(&incidence_ring(&GradedPoset::antichain(3), Q).unwrap()).unwrap();
        assert!(v.verdict);
        assert_eq!(v.m_bound_used, 0);
        let w = decide_koszul_coring(&incidence_coring(&GradedPoset::antichain(1), Q).unwrap()).unwrap();
        assert!(w.verdict);
    }
}
