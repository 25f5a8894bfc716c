use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::ring::{check_component_labels, trimmed};
use crate::bimodule::{tensor, tensor_power, BaseRing, Bimodule, BimoduleMap, BlockKey};
use crate::error::{Error, Result};
use crate::label::{collect_terms, Combination, Label};
use crate::linalg::{FieldSpec, Scalar};

/// One term `x ⊗ y` of a comultiplication, with its coefficient.
pub type SplitTerm = (Label, Label, Scalar);

/// Connected graded `R`-coring with finite support; mirror of `GradedRing`.
#[derive(Clone, Debug)]
pub struct GradedCoring {
    base: Arc<BaseRing>,
    components: Vec<Arc<Bimodule>>,
    info: HashMap<Label, (usize, BlockKey)>,
    splits: HashMap<(Label, usize), Vec<SplitTerm>>,
    complete: bool,
}

fn accumulate_splits(terms: impl IntoIterator<Item = SplitTerm>, field: FieldSpec) -> Vec<SplitTerm> {
    let mut acc: BTreeMap<(Label, Label), Scalar> = BTreeMap::new();
    for (a, b, x) in terms {
        let slot = acc.entry((a, b)).or_insert_with(|| field.zero());
        *slot = field.add(slot, &x);
    }
    acc.into_iter()
        .filter(|(_, x)| !field.is_zero(x))
        .map(|((a, b), x)| (a, b, x))
        .collect()
}

impl GradedCoring {
    /// Builds from positive components and `split(c, p) = Δ_{p, n−p}(c)` for
    /// `1 ≤ p < n = deg c`; coassociativity is checked exhaustively.
    pub fn new<F>(base: Arc<BaseRing>, positive: Vec<Bimodule>, mut split: F, complete: bool) -> Result<Self>
    where
        F: FnMut(&Label, usize) -> Result<Vec<SplitTerm>>,
    {
        let info = check_component_labels(&base, &positive)?;
        let components = trimmed(&base, positive);
        let field = base.field();
        let mut splits = HashMap::new();
        for (n, comp) in components.iter().enumerate().skip(2) {
            for ((s, u), cb) in comp.blocks() {
                for c in cb.labels() {
                    for p in 1..n {
                        let terms = accumulate_splits(split(c, p)?, field);
                        for (a, b, _) in &terms {
                            let ok = match (info.get(a), info.get(b)) {
                                (Some((da, (sa, ta))), Some((db, (sb, ub)))) => {
                                    *da == p && *db == n - p && *sa == s && ta == sb && *ub == u
                                }
                                _ => false,
                            };
                            if !ok {
                                return Err(Error::InvalidStructure(format!(
                                    "Δ_{{{p},{}}}({c}) has term {a}⊗{b} outside C_{p}⊗C_{}",
                                    n - p,
                                    n - p
                                )));
                            }
                        }
                        if !terms.is_empty() {
                            splits.insert((c.clone(), p), terms);
                        }
                    }
                }
            }
        }
        let coring = GradedCoring {
            base,
            components,
            info,
            splits,
            complete,
        };
        coring.check_coassociative()?;
        Ok(coring)
    }

    fn check_coassociative(&self) -> Result<()> {
        let f = self.field();
        for (n, comp) in self.components.iter().enumerate().skip(3) {
            for (_, c) in comp.basis() {
                for p in 1..n {
                    for q in 1..n - p {
                        let r = n - p - q;
                        let left = accumulate_triples(
                            self.split(c, p + q).into_iter().flat_map(|(x, z, k)| {
                                self.split(&x, p)
                                    .into_iter()
                                    .map(move |(a, b, k2)| ((a, b, z.clone()), f.mul(&k, &k2)))
                            }),
                            f,
                        );
                        let right = accumulate_triples(
                            self.split(c, p).into_iter().flat_map(|(a, y, k)| {
                                self.split(&y, q)
                                    .into_iter()
                                    .map(move |(b, z, k2)| ((a.clone(), b, z), f.mul(&k, &k2)))
                            }),
                            f,
                        );
                        if left != right {
                            return Err(Error::InvalidStructure(format!(
                                "comultiplication is not coassociative on {c} at ({p},{q},{r})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<BaseRing> {
        &self.base
    }

    pub fn field(&self) -> FieldSpec {
        self.base.field()
    }

    pub fn top_degree(&self) -> usize {
        self.components.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn component(&self, n: usize) -> Arc<Bimodule> {
        self.components
            .get(n)
            .cloned()
            .unwrap_or_else(|| Arc::new(Bimodule::zero(self.base.clone())))
    }

    pub fn components(&self) -> &[Arc<Bimodule>] {
        &self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn degree_of(&self, l: &Label) -> Option<usize> {
        match l {
            Label::Idem(_) => Some(0),
            _ => self.info.get(l).map(|(d, _)| *d),
        }
    }

    pub fn block_of(&self, l: &Label) -> Option<BlockKey> {
        match l {
            Label::Idem(s) => Some((*s, *s)),
            _ => self.info.get(l).map(|(_, k)| *k),
        }
    }

    /// `Δ_{p, n−p}(c)` for `0 ≤ p ≤ n`, including the counit identifications.
    pub fn split(&self, c: &Label, p: usize) -> Vec<SplitTerm> {
        let (Some(n), Some((s, t))) = (self.degree_of(c), self.block_of(c)) else {
            return Vec::new();
        };
        let one = self.field().one();
        if p == 0 {
            vec![(Label::Idem(s), c.clone(), one)]
        } else if p == n {
            vec![(c.clone(), Label::Idem(t), one)]
        } else if p > n {
            Vec::new()
        } else {
            self.splits.get(&(c.clone(), p)).cloned().unwrap_or_default()
        }
    }

    /// `Δ_{p,q} : C_{p+q} → C_p ⊗ C_q`.
    pub fn comult(&self, p: usize, q: usize) -> Result<BimoduleMap> {
        let target = Arc::new(tensor(&self.component(p), &self.component(q))?);
        BimoduleMap::from_fn(self.component(p + q), target, |c| {
            Ok(self
                .split(c, p)
                .into_iter()
                .map(|(a, b, x)| (Label::tensor(&[&a, &b]), x))
                .collect())
        })
    }

    /// Iterated comultiplication `Δ^n(c) ∈ C_1^{(n)}` with `n = deg c`.
    pub fn iterated(&self, c: &Label) -> Combination {
        let f = self.field();
        let n = match self.degree_of(c) {
            Some(n) if n >= 1 => n,
            _ => return Vec::new(),
        };
        if n == 1 {
            return vec![(c.clone(), f.one())];
        }
        collect_terms(
            self.split(c, 1).into_iter().flat_map(|(a, rest, x)| {
                self.iterated(&rest)
                    .into_iter()
                    .map(move |(m, y)| (Label::tensor(&[&a, &m]), f.mul(&x, &y)))
            }),
            f,
        )
    }

    /// `Δ^n : C_n → C_1^{(n)}`.
    pub fn delta_n(&self, n: usize) -> Result<BimoduleMap> {
        let target = Arc::new(tensor_power(&self.component(1), n));
        BimoduleMap::from_fn(self.component(n), target, |c| Ok(self.iterated(c)))
    }

    /// The subcoring `C_{≤n}`.
    pub fn truncate(&self, n: usize) -> GradedCoring {
        let keep = n.min(self.top_degree());
        let mut positive: Vec<Bimodule> = self.components[1..=keep].iter().map(|c| (**c).clone()).collect();
        while positive.last().is_some_and(Bimodule::is_zero) {
            positive.pop();
        }
        GradedCoring {
            base: self.base.clone(),
            components: trimmed(&self.base, positive),
            info: self
                .info
                .iter()
                .filter(|(_, (d, _))| *d <= keep)
                .map(|(l, v)| (l.clone(), *v))
                .collect(),
            splits: self
                .splits
                .iter()
                .filter(|((c, _), _)| self.info[c].0 <= keep)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            complete: true,
        }
    }

    /// Whether `other` has the same components and structure constants after relabeling.
    pub fn same_structure(&self, other: &GradedCoring, relabel: impl Fn(&Label) -> Label) -> bool {
        if *self.base != *other.base || self.dims() != other.dims() {
            return false;
        }
        for (l, (d, k)) in &self.info {
            let m = relabel(l);
            if other.degree_of(&m) != Some(*d) || other.block_of(&m) != Some(*k) {
                return false;
            }
        }
        if self.splits.len() != other.splits.len() {
            return false;
        }
        let f = self.field();
        self.splits.iter().all(|((c, p), terms)| {
            let mapped = accumulate_splits(
                terms.iter().map(|(a, b, x)| (relabel(a), relabel(b), x.clone())),
                f,
            );
            other.split(&relabel(c), *p) == mapped
        })
    }

    pub fn structure_constants(&self) -> Vec<(Label, usize, Vec<SplitTerm>)> {
        let mut out: Vec<_> = self
            .splits
            .iter()
            .map(|((c, p), v)| (c.clone(), *p, v.clone()))
            .collect();
        out.sort();
        out
    }
}

fn accumulate_triples(
    terms: impl Iterator<Item = ((Label, Label, Label), Scalar)>,
    f: FieldSpec,
) -> BTreeMap<(Label, Label, Label), Scalar> {
    let mut acc = BTreeMap::new();
    for (k, x) in terms {
        let slot = acc.entry(k).or_insert_with(|| f.zero());
        *slot = f.add(slot, &x);
    }
    acc.retain(|_, x| !f.is_zero(x));
    acc
}
