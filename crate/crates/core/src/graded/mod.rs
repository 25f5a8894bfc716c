//! Connected graded rings and corings with finite support, strong grading,
//! primitives, indecomposables, quadratic constructions and products.

mod coring;
mod quadratic;
mod ring;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use coring::{GradedCoring, SplitTerm};
pub use quadratic::{
    quadratic_coring_of, quadratic_ring_of, shriek_of_coring, shriek_of_coring_with_cap, shriek_of_ring,
    shriek_of_ring_with_cap, tensor_nilpotency, QuadraticData,
};
pub use ring::GradedRing;
pub(crate) use ring::split_pair;

use crate::bimodule::{BaseRing, Bimodule, BimoduleMap, BlockKey};
use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg::{self, SparseMatrix};
use serde::Serialize;

/// Outcome of a strong-grading test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongGrading {
    pub holds: bool,
    /// First failing degree.
    pub degree: Option<usize>,
    /// A cokernel vector of `μ_n` (rings) or a kernel vector of `Δ^n` (corings).
    pub witness: Option<Vec<(String, String)>>,
}

impl StrongGrading {
    fn pass() -> Self {
        StrongGrading {
            holds: true,
            degree: None,
            witness: None,
        }
    }
}

fn render(combo: &[(Label, crate::Scalar)]) -> Vec<(String, String)> {
    combo.iter().map(|(l, x)| (l.to_string(), x.to_string())).collect()
}

/// Whether every `μ_n : (A^1)^{(n)} → A^n` is onto, `2 ≤ n ≤ top`.
pub fn is_strongly_graded_ring(a: &GradedRing) -> Result<StrongGrading> {
    let f = a.field();
    for n in 2..=a.top_degree() {
        let mu = a.mu_n(n)?;
        if mu.rank()? == a.component(n).dim() {
            continue;
        }
        let image = mu.image()?;
        for (key, b) in a.component(n).blocks() {
            let e = image.block(key).echelon(f);
            if let Some(i) = (0..b.len()).find(|&i| !e.contains(&[(i, f.one())])) {
                return Ok(StrongGrading {
                    holds: false,
                    degree: Some(n),
                    witness: Some(render(&[(b.labels()[i].clone(), f.one())])),
                });
            }
        }
        return Err(Error::Invariant("rank deficit without a cokernel vector".into()));
    }
    Ok(StrongGrading::pass())
}

/// Whether every `Δ^n : C_n → C_1^{(n)}` is injective, `2 ≤ n ≤ top`.
pub fn is_strongly_graded_coring(c: &GradedCoring) -> Result<StrongGrading> {
    for n in 2..=c.top_degree() {
        let delta = c.delta_n(n)?;
        let kernel = delta.kernel()?;
        if let Some((_, v)) = kernel.vectors().into_iter().next() {
            return Ok(StrongGrading {
                holds: false,
                degree: Some(n),
                witness: Some(render(&v)),
            });
        }
    }
    Ok(StrongGrading::pass())
}

/// Per-block nullity of maps with a common source, stacked into the direct sum of targets.
pub(crate) fn stacked_nullity(maps: &[BimoduleMap], source: &Arc<Bimodule>) -> Result<BTreeMap<BlockKey, usize>> {
    let f = source.field();
    let mut out = BTreeMap::new();
    for (key, b) in source.blocks() {
        let blocks: Vec<SparseMatrix> = maps.iter().map(|m| m.block(key)).collect();
        let refs: Vec<&SparseMatrix> = blocks.iter().collect();
        let stacked = SparseMatrix::vstack(&refs, b.len())?;
        let r = linalg::rank(&stacked, f)?;
        out.insert(key, b.len() - r);
    }
    Ok(out)
}

/// `dim (PC)_n`: the common kernel of all `Δ_{p,q}` with `p + q = n`, `p, q ≥ 1`.
pub fn primitive_dims(c: &GradedCoring) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for n in 1..=c.top_degree() {
        let maps: Vec<BimoduleMap> = (1..n).map(|p| c.comult(p, n - p)).collect::<Result<_>>()?;
        let dims = stacked_nullity(&maps, &c.component(n))?;
        out.insert(n, dims.values().sum());
    }
    Ok(out)
}

/// `dim (QA)_n = dim A^n − rank ⊕_{p+q=n} μ^{p,q}`.
pub fn indecomposable_dims(a: &GradedRing) -> Result<BTreeMap<usize, usize>> {
    let f = a.field();
    let mut out = BTreeMap::new();
    for n in 1..=a.top_degree() {
        let target = a.component(n);
        let maps: Vec<BimoduleMap> = (1..n).map(|p| a.mult(p, n - p)).collect::<Result<_>>()?;
        let mut rank = 0;
        for (key, b) in target.blocks() {
            let blocks: Vec<SparseMatrix> = maps.iter().map(|m| m.block(key)).collect();
            let refs: Vec<&SparseMatrix> = blocks.iter().collect();
            rank += linalg::rank(&SparseMatrix::hstack(&refs, b.len())?, f)?;
        }
        out.insert(n, target.dim() - rank);
    }
    Ok(out)
}

fn product_base(a: &Arc<BaseRing>, b: &Arc<BaseRing>) -> Result<Arc<BaseRing>> {
    a.disjoint_union(b).map_err(|e| match e {
        Error::LabelCollision(l) => Error::LabelCollision(format!("{l} (disjointify the bases first)")),
        other => other,
    })
}

/// `A × B` over `k^{S ⊔ S'}`; no products between the factors.
pub fn direct_product(a: &GradedRing, b: &GradedRing) -> Result<GradedRing> {
    let base = product_base(a.base(), b.base())?;
    let shift = a.base().size() as u32;
    let top = a.top_degree().max(b.top_degree());
    let positive: Vec<Bimodule> = (1..=top)
        .map(|n| {
            let pa = a.component(n).shifted(base.clone(), 0, Label::clone)?;
            let pb = b.component(n).shifted(base.clone(), shift, Label::clone)?;
            Bimodule::direct_sum(base.clone(), &[&pa, &pb])
        })
        .collect::<Result<_>>()?;
    GradedRing::new(
        base,
        positive,
        |x, y| {
            Ok(if a.degree_of(x).is_some() && a.degree_of(y).is_some() {
                a.mul(x, y)
            } else {
                b.mul(x, y)
            })
        },
        a.is_complete() && b.is_complete(),
    )
}

/// `C ⊕ D` over `k^{S ⊔ S'}`.
pub fn direct_sum_corings(c: &GradedCoring, d: &GradedCoring) -> Result<GradedCoring> {
    let base = product_base(c.base(), d.base())?;
    let shift = c.base().size() as u32;
    let top = c.top_degree().max(d.top_degree());
    let positive: Vec<Bimodule> = (1..=top)
        .map(|n| {
            let pc = c.component(n).shifted(base.clone(), 0, Label::clone)?;
            let pd = d.component(n).shifted(base.clone(), shift, Label::clone)?;
            Bimodule::direct_sum(base.clone(), &[&pc, &pd])
        })
        .collect::<Result<_>>()?;
    GradedCoring::new(
        base,
        positive,
        |x, p| {
            Ok(if c.degree_of(x).is_some() {
                c.split(x, p)
            } else {
                d.split(x, p)
            })
        },
        c.is_complete() && d.is_complete(),
    )
}
