//! Finite graded posets, their incidence rings and corings, and the ζ-relations.

mod corpus;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use corpus::{canonical_form, enumerate_corpus, enumerate_exact};

use crate::bimodule::{BaseRing, Bimodule, SubBimodule};
use crate::duality::{graded_left_dual_of_coring, graded_left_dual_of_ring};
use crate::error::{Error, PosetError, Result};
use crate::graded::{direct_product, direct_sum_corings, quadratic_ring_of, shriek_of_coring, GradedCoring, GradedRing, QuadraticData};
use crate::label::Label;
use crate::linalg::FieldSpec;

/// On-disk form: element labels and cover pairs `(lower, upper)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

/// Finite poset whose closed intervals are all graded.
///
/// `length[x][y]` is the common length of the maximal chains of `[x, y]`, or
/// `None` when `x ≰ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoset {
    elements: Vec<String>,
    covers: Vec<(usize, usize)>,
    length: Vec<Vec<Option<usize>>>,
}

/// Parses and validates a JSON poset document.
pub fn parse_poset(document: &str) -> Result<GradedPoset, PosetError> {
    let doc: PosetDocument = serde_json::from_str(document)?;
    GradedPoset::from_document(&doc)
}

impl GradedPoset {
    pub fn from_document(doc: &PosetDocument) -> Result<Self, PosetError> {
        let mut index = HashMap::new();
        for (i, e) in doc.elements.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(PosetError::Duplicate(e.clone()));
            }
        }
        let look = |s: &String| index.get(s.as_str()).copied().ok_or_else(|| PosetError::UnknownElement(s.clone()));
        let covers = doc
            .covers
            .iter()
            .map(|(a, b)| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, PosetError>>()?;
        GradedPoset::new(doc.elements.clone(), covers)
    }

    /// Validates acyclicity and gradedness; covers are the Hasse edges.
    pub fn new(elements: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self, PosetError> {
        let n = elements.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(PosetError::Duplicate(e.clone()));
            }
        }
        let mut covers = covers;
        covers.sort_unstable();
        covers.dedup();
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in &covers {
            if a >= n || b >= n {
                return Err(PosetError::UnknownElement(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(PosetError::Cycle(elements[a].clone()));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|i| indeg[*i] > 0).expect("cycle member");
            return Err(PosetError::Cycle(elements[stuck].clone()));
        }
        // Shortest and longest edge paths from each x, over the topological order.
        let mut length = vec![vec![None; n]; n];
        for x in 0..n {
            let mut short: Vec<Option<usize>> = vec![None; n];
            let mut long: Vec<Option<usize>> = vec![None; n];
            short[x] = Some(0);
            long[x] = Some(0);
            for &u in &order {
                let (Some(s), Some(l)) = (short[u], long[u]) else {
                    continue;
                };
                for &v in &succ[u] {
                    short[v] = Some(short[v].map_or(s + 1, |c| c.min(s + 1)));
                    long[v] = Some(long[v].map_or(l + 1, |c| c.max(l + 1)));
                }
            }
            for y in 0..n {
                if let (Some(s), Some(l)) = (short[y], long[y]) {
                    if s != l {
                        return Err(PosetError::NonGraded {
                            lower: elements[x].clone(),
                            upper: elements[y].clone(),
                            short: s,
                            long: l,
                        });
                    }
                    length[x][y] = Some(s);
                }
            }
        }
        Ok(GradedPoset {
            elements,
            covers,
            length,
        })
    }

    /// Programmatic constructor from labels.
    pub fn from_labels(elements: &[&str], covers: &[(&str, &str)]) -> Result<Self, PosetError> {
        GradedPoset::from_document(&PosetDocument {
            elements: elements.iter().map(|s| s.to_string()).collect(),
            covers: covers.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        })
    }

    pub fn chain(n: usize) -> Self {
        let elements = (0..n).map(|i| i.to_string()).collect();
        GradedPoset::new(elements, (1..n).map(|i| (i - 1, i)).collect()).expect("chains are graded")
    }

    pub fn antichain(n: usize) -> Self {
        GradedPoset::new((0..n).map(|i| i.to_string()).collect(), Vec::new()).expect("antichains are graded")
    }

    pub fn to_document(&self) -> PosetDocument {
        PosetDocument {
            elements: self.elements.clone(),
            covers: self
                .covers
                .iter()
                .map(|&(a, b)| (self.elements[a].clone(), self.elements[b].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.length[x][y].is_some()
    }

    /// Length of `[x, y]`, or `None` when `x ≰ y`.
    pub fn interval_length(&self, x: usize, y: usize) -> Option<usize> {
        self.length[x][y]
    }

    /// Largest interval length `L`.
    pub fn max_length(&self) -> usize {
        self.length.iter().flatten().flatten().copied().max().unwrap_or(0)
    }

    /// Intervals of length `p`, in index order.
    pub fn intervals(&self, p: usize) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.length[x][y] == Some(p))
            .collect()
    }

    /// Elements strictly between `x` and `y`.
    pub fn open_interval(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&z| z != x && z != y && self.leq(x, z) && self.leq(z, y))
            .collect()
    }

    fn base(&self, field: FieldSpec) -> Arc<BaseRing> {
        BaseRing::new(self.elements.clone(), field).expect("element labels are distinct")
    }

    /// Basis label `e[x,y]`.
    pub fn interval_label(&self, x: usize, y: usize) -> Label {
        Label::atom(format!("e[{},{}]", self.elements[x], self.elements[y]))
    }

    fn components(&self, base: &Arc<BaseRing>) -> (Vec<Bimodule>, HashMap<Label, (usize, usize)>) {
        let mut where_ = HashMap::new();
        let comps = (1..=self.max_length())
            .map(|p| {
                let blocks = self.intervals(p).into_iter().map(|(x, y)| {
                    let l = self.interval_label(x, y);
                    where_.insert(l.clone(), (x, y));
                    ((x as u32, y as u32), vec![l])
                });
                Bimodule::new(base.clone(), blocks.collect::<Vec<_>>()).expect("one label per block")
            })
            .collect();
        (comps, where_)
    }

    /// Disjoint union; labels are prefixed with `1:` and `2:` when they collide.
    pub fn disjoint_union(&self, other: &GradedPoset) -> GradedPoset {
        let collide = self.elements.iter().any(|e| other.elements.contains(e));
        let name = |tag: &str, e: &String| if collide { format!("{tag}:{e}") } else { e.clone() };
        let elements = self
            .elements
            .iter()
            .map(|e| name("1", e))
            .chain(other.elements.iter().map(|e| name("2", e)))
            .collect();
        let shift = self.len();
        let covers = self
            .covers
            .iter()
            .copied()
            .chain(other.covers.iter().map(|&(a, b)| (a + shift, b + shift)))
            .collect();
        GradedPoset::new(elements, covers).expect("disjoint union of graded posets is graded")
    }

    fn renamed(&self, f: impl Fn(&String) -> String) -> GradedPoset {
        GradedPoset::new(self.elements.iter().map(f).collect(), self.covers.clone()).expect("renaming keeps gradedness")
    }

    /// Copies of `self` and `other` carrying the labels they receive in
    /// `self.disjoint_union(other)`, so their structures live over disjoint bases.
    pub fn disjointified(&self, other: &GradedPoset) -> (GradedPoset, GradedPoset) {
        let union = self.disjoint_union(other);
        (
            self.renamed(|e| union.elements[self.index_of(e).expect("own element")].clone()),
            other.renamed(|e| union.elements[self.len() + other.index_of(e).expect("own element")].clone()),
        )
    }
}

/// Whether `k^a[P ⊔ Q] = k^a[P] × k^a[Q]` and `k^c[P ⊔ Q] = k^c[P] ⊕ k^c[Q]`
/// exactly, after the same disambiguation of labels that the union applies.
pub fn union_product_check(p: &GradedPoset, q: &GradedPoset, field: FieldSpec) -> Result<bool> {
    let union = p.disjoint_union(q);
    let (p2, q2) = p.disjointified(q);
    let ring = direct_product(&incidence_ring(&p2, field)?, &incidence_ring(&q2, field)?)?;
    let coring = direct_sum_corings(&incidence_coring(&p2, field)?, &incidence_coring(&q2, field)?)?;
    Ok(incidence_ring(&union, field)?.same_structure(&ring, Label::clone)
        && incidence_coring(&union, field)?.same_structure(&coring, Label::clone))
}

/// `k^a[P]`: `A^p` spanned by `e[x,y]` with `l([x,y]) = p`, `e[x,y]·e[y,z] = e[x,z]`.
pub fn incidence_ring(p: &GradedPoset, field: FieldSpec) -> Result<GradedRing> {
    let base = p.base(field);
    let (positive, where_) = p.components(&base);
    GradedRing::new(
        base,
        positive,
        |a, b| {
            let (x, y) = where_[a];
            let (y2, z) = where_[b];
            Ok(if y == y2 {
                vec![(p.interval_label(x, z), field.one())]
            } else {
                Vec::new()
            })
        },
        true,
    )
}

/// `k^c[P]`: `Δ_{i,j}(e[x,y]) = Σ_{z ∈ [x,y], l([x,z]) = i} e[x,z] ⊗ e[z,y]`.
pub fn incidence_coring(p: &GradedPoset, field: FieldSpec) -> Result<GradedCoring> {
    let base = p.base(field);
    let (positive, where_) = p.components(&base);
    GradedCoring::new(
        base,
        positive,
        |c, i| {
            let (x, y) = where_[c];
            Ok((0..p.len())
                .filter(|&z| p.interval_length(x, z) == Some(i) && p.leq(z, y))
                .map(|z| (p.interval_label(x, z), p.interval_label(z, y), field.one()))
                .collect())
        },
        true,
    )
}

/// The relations `ζ_{x,y} = Σ_{z ∈ (x,y)} e[x,z] ⊗ e[z,y]` over all intervals of length 2.
pub fn zeta_relations(p: &GradedPoset) -> Vec<((usize, usize), Vec<(Label, Label)>)> {
    p.intervals(2)
        .into_iter()
        .map(|(x, y)| {
            let terms = p
                .open_interval(x, y)
                .into_iter()
                .map(|z| (p.interval_label(x, z), p.interval_label(z, y)))
                .collect();
            ((x, y), terms)
        })
        .collect()
}

/// `T(V)/I_P` with `V = A^1` and `I_P` generated by the ζ-relations.
///
/// Checked to coincide with the shriek ring of the incidence coring.
pub fn zeta_ring(p: &GradedPoset, field: FieldSpec) -> Result<GradedRing> {
    let base = p.base(field);
    let (positive, _) = p.components(&base);
    let v = Arc::new(positive.into_iter().next().unwrap_or_else(|| Bimodule::zero(base.clone())));
    let vv = Arc::new(crate::bimodule::tensor(&v, &v)?);
    let relations: Vec<Vec<(Label, crate::Scalar)>> = zeta_relations(p)
        .into_iter()
        .map(|(_, terms)| {
            terms
                .into_iter()
                .map(|(a, b)| (Label::tensor(&[&a, &b]), field.one()))
                .collect()
        })
        .collect();
    let w = SubBimodule::span(vv, &relations)?;
    let ring = quadratic_ring_of(&QuadraticData::new(v, w)?, p.max_length().max(1))?;
    let shriek = shriek_of_coring(&incidence_coring(p, field)?)?;
    if !ring.same_structure(&shriek, Label::clone) {
        return Err(Error::Invariant(
            "ζ-presentation differs from the shriek ring of the incidence coring".into(),
        ));
    }
    Ok(ring)
}

/// Whether `χ : e[x,y] ↦ f[x,y]` is an isomorphism of the incidence ring onto
/// the graded left dual of the incidence coring, by exact comparison of
/// structure constants. The incidence coring is checked against the left dual
/// of the incidence ring the same way.
pub fn incidence_duality_check(p: &GradedPoset, field: FieldSpec) -> Result<bool> {
    let ring = incidence_ring(p, field)?;
    let coring = incidence_coring(p, field)?;
    let ring_side = ring.same_structure(&graded_left_dual_of_coring(&coring)?, Label::dual);
    let coring_side = coring.same_structure(&graded_left_dual_of_ring(&ring)?, Label::dual);
    Ok(ring_side && coring_side)
}
