//! Quadraticity through `T_{2,•}` / `E^{2,•}` and directly through the
//! quadratic (co)rings, the two exact-sequence dimension identities, and the
//! map `α_m` from relations to 2-cycles.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::classes::{concatenate, is_cycle, ClassBasis};
use super::{bar_complex_ring, cobar_complex_coring};
use crate::bimodule::{tensor_power, SubBimodule};
use crate::error::{Error, Result};
use crate::graded::{
    is_strongly_graded_coring, is_strongly_graded_ring, tensor_nilpotency, GradedCoring, GradedRing, QuadraticData,
};
use crate::label::{collect_terms, Label};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticityReport {
    pub quadratic: bool,
    /// First weight (Tor/Ext route) or degree (direct route) that fails.
    pub failing: Option<usize>,
    pub checked_up_to: usize,
    /// Whether `checked_up_to` covers every degree that can fail.
    pub sound: bool,
}

fn require_ring(a: &GradedRing) -> Result<()> {
    match is_strongly_graded_ring(a)?.degree {
        Some(degree) => Err(Error::NotStronglyGraded { degree }),
        None => Ok(()),
    }
}

fn require_coring(c: &GradedCoring) -> Result<()> {
    match is_strongly_graded_coring(c)?.degree {
        Some(degree) => Err(Error::NotStronglyGraded { degree }),
        None => Ok(()),
    }
}

fn degree_two(slice: Result<super::ComplexSlice>) -> Result<usize> {
    Ok(slice?.homology_dims()?.get(&2).copied().unwrap_or(0))
}

fn from_row(row: Vec<(usize, usize)>, bound: usize) -> QuadraticityReport {
    let failing = row.into_iter().find(|(_, h)| *h > 0).map(|(m, _)| m);
    QuadraticityReport {
        quadratic: failing.is_none(),
        failing,
        checked_up_to: bound,
        sound: true,
    }
}

/// Quadratic iff `T_{2,m}(A) = 0` for `3 ≤ m ≤ m_max`; the default bound `2·top`
/// is sound because degree-2 bar cells have weight at most `2·top`.
pub fn quadratic_via_tor(a: &GradedRing, m_max: Option<usize>) -> Result<QuadraticityReport> {
    require_ring(a)?;
    let full = 2 * a.top_degree();
    let bound = m_max.unwrap_or(full);
    let row = (3..=bound)
        .into_par_iter()
        .map(|m| Ok((m, degree_two(bar_complex_ring(a, m))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut r = from_row(row, bound);
    r.sound = r.failing.is_some() || bound >= full;
    Ok(r)
}

/// Quadratic iff `E^{2,m}(C) = 0` for `3 ≤ m ≤ m_max`, default `2·top`.
pub fn quadratic_via_ext(c: &GradedCoring, m_max: Option<usize>) -> Result<QuadraticityReport> {
    require_coring(c)?;
    let full = 2 * c.top_degree();
    let bound = m_max.unwrap_or(full);
    let row = (3..=bound)
        .into_par_iter()
        .map(|m| Ok((m, degree_two(cobar_complex_coring(c, m))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut r = from_row(row, bound);
    r.sound = r.failing.is_some() || bound >= full;
    Ok(r)
}

/// Degrees to compare directly: up to the tensor nilpotency of `V`, or `2·top + 1`
/// (flagged unsound) when the block quiver has cycles.
fn direct_bound(v: &crate::Bimodule, top: usize) -> (usize, bool) {
    match tensor_nilpotency(v) {
        Some(n) => (n.max(top).max(2), true),
        None => (2 * top + 1, false),
    }
}

/// `A ≅ ⟨A^1, K_A⟩` with `K_A = Ker μ^{1,1}`: compares `Ker μ_n` with `⟨K_A⟩^n` degreewise.
pub fn is_quadratic_direct(a: &GradedRing) -> Result<QuadraticityReport> {
    require_ring(a)?;
    let v = a.component(1);
    let data = QuadraticData::new(v.clone(), relations_of(a)?)?;
    let (bound, sound) = direct_bound(&v, a.top_degree());
    for n in 2..=bound {
        let kernel = a.mu_n(n)?.kernel()?;
        let ideal = data.ideal_component(n)?;
        let kernel = rebase(kernel, ideal.ambient())?;
        if !kernel.contains(&ideal)? {
            return Err(Error::Invariant(format!("⟨K⟩^{n} escapes Ker μ_{n}")));
        }
        if kernel.dim() != ideal.dim() {
            return Ok(QuadraticityReport {
                quadratic: false,
                failing: Some(n),
                checked_up_to: n,
                sound: true,
            });
        }
    }
    Ok(QuadraticityReport {
        quadratic: true,
        failing: None,
        checked_up_to: bound,
        sound,
    })
}

/// `C ≅ {C_1, Im Δ_{1,1}}`: `Δ^n` is injective by strong grading, so compares
/// `dim C_n` with `dim {C_1, Im Δ_{1,1}}_n` degreewise.
pub fn is_quadratic_coring_direct(c: &GradedCoring) -> Result<QuadraticityReport> {
    require_coring(c)?;
    let v = c.component(1);
    let w = c.comult(1, 1)?.image()?;
    let data = QuadraticData::new(v.clone(), w)?;
    let (bound, sound) = direct_bound(&v, c.top_degree());
    for n in 2..=bound {
        let co = data.coideal_component(n)?;
        let image = rebase(c.delta_n(n)?.image()?, co.ambient())?;
        if !co.contains(&image)? {
            return Err(Error::Invariant(format!("Im Δ^{n} escapes the cogenerated coring")));
        }
        if co.dim() != c.component(n).dim() {
            return Ok(QuadraticityReport {
                quadratic: false,
                failing: Some(n),
                checked_up_to: n,
                sound: true,
            });
        }
    }
    Ok(QuadraticityReport {
        quadratic: true,
        failing: None,
        checked_up_to: bound,
        sound,
    })
}

/// `Ker μ^{1,1}` as a sub-bimodule of `A^1 ⊗ A^1`.
fn relations_of(a: &GradedRing) -> Result<SubBimodule> {
    a.mult(1, 1)?.kernel()
}

/// The same subspace over an equal ambient held in a different allocation.
fn rebase(sub: SubBimodule, ambient: &Arc<crate::Bimodule>) -> Result<SubBimodule> {
    if **sub.ambient() != **ambient {
        return Err(Error::Invariant("ambient spaces differ".into()));
    }
    SubBimodule::new(ambient.clone(), sub.blocks().map(|(k, s)| (k, s.clone())).collect())
}

/// Dimensions in one exact sequence `0 → left → middle → right → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSequenceCheck {
    pub m: usize,
    pub left: usize,
    pub middle: usize,
    pub right: usize,
    pub holds: bool,
}

/// `0 → T_{2,m}(A) → Tor^{A/A^{≥m}}_{2,m} → A^m → 0`.
pub fn verify_tor2_sequence(a: &GradedRing, m: usize) -> Result<ExactSequenceCheck> {
    require_ring(a)?;
    let left = degree_two(bar_complex_ring(a, m))?;
    let middle = degree_two(bar_complex_ring(&a.truncate(m - 1), m))?;
    let right = a.component(m).dim();
    Ok(ExactSequenceCheck {
        m,
        left,
        middle,
        right,
        holds: middle == left + right,
    })
}

/// `0 → C_m → Ext^{2,m}_{C_{<m}} → E^{2,m}(C) → 0`.
pub fn verify_ext2_sequence(c: &GradedCoring, m: usize) -> Result<ExactSequenceCheck> {
    require_coring(c)?;
    let left = c.component(m).dim();
    let middle = degree_two(cobar_complex_coring(&c.truncate(m - 1), m))?;
    let right = degree_two(cobar_complex_coring(c, m))?;
    Ok(ExactSequenceCheck {
        m,
        left,
        middle,
        right,
        holds: middle == left + right,
    })
}

/// Outcome of evaluating `α_m(x) = {μ_𝒎(x)}_{𝒎 ∈ 𝒫_2(m)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaCheck {
    pub m: usize,
    /// `dim Ker μ_m`; each basis vector must map to a 2-cycle.
    pub kernel_dim: usize,
    /// `dim Σ_i V^{(i−1)} ⊗ K_A ⊗ V^{(m−i−1)}`; for `m ≥ 3` each basis vector must
    /// map to a 2-boundary. At `m = 2` the slice has no 3-cells, so `boundaries` is `None`.
    pub sum_dim: usize,
    pub cycles: bool,
    pub boundaries: Option<bool>,
}

/// Checks that `α_m` sends `Ker μ_m` to 2-cycles and the sum of the
/// `V^{(i−1)} ⊗ K_A ⊗ V^{(m−i−1)}` to 2-boundaries of `Ω_•(A, m)`.
pub fn alpha_check(a: &GradedRing, m: usize) -> Result<AlphaCheck> {
    let f = a.field();
    let slice = bar_complex_ring(a, m)?;
    let classes = ClassBasis::new(&slice, 2, "t")?;
    let alpha = |x: &[(Label, crate::Scalar)]| {
        collect_terms(
            x.iter().flat_map(|(l, c)| {
                let fs = l.factors();
                (1..m).flat_map(move |p| {
                    let left = a.product_of(&fs[..p]);
                    let right = a.product_of(&fs[p..]);
                    concatenate(&left, &right, f)
                        .into_iter()
                        .map(move |(t, y)| (t, f.mul(&y, c)))
                })
            }),
            f,
        )
    };
    let kernel = a.mu_n(m)?.kernel()?;
    let mut cycles = true;
    for (_, x) in kernel.vectors() {
        cycles &= is_cycle(&slice, 2, &alpha(&x))?;
    }
    let data = QuadraticData::new(a.component(1), relations_of(a)?)?;
    let sum = data.ideal_component(m)?;
    let mut boundaries = (m >= 3).then_some(true);
    if let Some(b) = boundaries.as_mut() {
        for (_, x) in sum.vectors() {
            let y = alpha(&x);
            *b &= is_cycle(&slice, 2, &y)? && classes.project(&y)?.is_empty();
        }
    }
    debug_assert_eq!(*sum.ambient().as_ref(), tensor_power(&a.component(1), m));
    Ok(AlphaCheck {
        m,
        kernel_dim: kernel.dim(),
        sum_dim: sum.dim(),
        cycles,
        boundaries,
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
    fn quadraticity_routes() {
        let d = incidence_ring(&diamond(), Q).unwrap();
        assert!(quadratic_via_tor(&d, None).unwrap().quadratic);
        assert!(is_quadratic_direct(&d).unwrap().quadratic);
        let p = incidence_ring(&pbad(), Q).unwrap();
        let t = quadratic_via_tor(&p, None).unwrap();
        assert_eq!((t.quadratic, t.failing), (false, Some(3)));
        let direct = is_quadratic_direct(&p).unwrap();
        assert_eq!((direct.quadratic, direct.failing), (false, Some(3)));
        let pc = incidence_coring(&pbad(), Q).unwrap();
        assert_eq!(quadratic_via_ext(&pc, None).unwrap().failing, Some(3));
        assert_eq!(is_quadratic_coring_direct(&pc).unwrap().failing, Some(3));
        let anti = incidence_ring(&GradedPoset::antichain(2), Q).unwrap();
        assert!(is_quadratic_direct(&anti).unwrap().quadratic);
        assert!(quadratic_via_tor(&incidence_ring(&GradedPoset::chain(5), Q).unwrap(), None).unwrap().quadratic);
    }

    #[test]
    fn exact_sequences() {
        let d = incidence_ring(&diamond(), Q).unwrap();
        let s = verify_tor2_sequence(&d, 2).unwrap();
        assert_eq!((s.left, s.middle, s.right, s.holds), (1, 2, 1, true));
        let p = incidence_ring(&pbad(), Q).unwrap();
        let s = verify_tor2_sequence(&p, 3).unwrap();
        assert_eq!((s.left, s.middle, s.right, s.holds), (1, 2, 1, true));
        let pc = incidence_coring(&pbad(), Q).unwrap();
        for m in 2..=6 {
            assert!(verify_ext2_sequence(&pc, m).unwrap().holds, "m = {m}");
            assert!(verify_tor2_sequence(&p, m).unwrap().holds, "m = {m}");
        }
    }

    #[test]
    fn alpha_maps() {
        let p = incidence_ring(&pbad(), Q).unwrap();
        let r = alpha_check(&p, 3).unwrap();
        assert_eq!((r.kernel_dim, r.sum_dim, r.cycles, r.boundaries), (1, 0, true, Some(true)));
        let d = incidence_ring(&diamond(), Q).unwrap();
        let r = alpha_check(&d, 2).unwrap();
        assert_eq!((r.kernel_dim, r.sum_dim, r.cycles, r.boundaries), (1, 1, true, None));
        let cube = GradedPoset::from_labels(
            &["0", "x", "y", "z", "xy", "xz", "yz", "1"],
            &[
                ("0", "x"), ("0", "y"), ("0", "z"),
                ("x", "xy"), ("x", "xz"), ("y", "xy"), ("y", "yz"), ("z", "xz"), ("z", "yz"),
                ("xy", "1"), ("xz", "1"), ("yz", "1"),
            ],
        )
        .unwrap();
        let r = alpha_check(&incidence_ring(&cube, Q).unwrap(), 3).unwrap();
        assert_eq!((r.kernel_dim, r.cycles, r.boundaries), (5, true, Some(true)));
        assert!(r.sum_dim > 0 && r.sum_dim <= r.kernel_dim);
    }
}
