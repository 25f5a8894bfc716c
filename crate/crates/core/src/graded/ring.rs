use std::collections::HashMap;
use std::sync::Arc;

use crate::bimodule::{tensor, tensor_power, BaseRing, Bimodule, BimoduleMap, BlockKey};
use crate::error::{Error, Result};
use crate::label::{collect_terms, Combination, Label};
use crate::linalg::{FieldSpec, Scalar};

/// Connected graded `R`-ring with finite support.
///
/// `components[0]` is `R`; trailing zero components are trimmed, so
/// `A^n = 0` exactly for `n > top_degree()`. When `complete` is false the ring
/// is a truncation: degrees beyond the top were not computed.
#[derive(Clone, Debug)]
pub struct GradedRing {
    base: Arc<BaseRing>,
    components: Vec<Arc<Bimodule>>,
    info: HashMap<Label, (usize, BlockKey)>,
    products: HashMap<(Label, Label), Combination>,
    complete: bool,
}

pub(crate) fn check_component_labels(
    base: &Arc<BaseRing>,
    positive: &[Bimodule],
) -> Result<HashMap<Label, (usize, BlockKey)>> {
    let mut info = HashMap::new();
    for (i, comp) in positive.iter().enumerate() {
        crate::bimodule::same_base(base, comp.base())?;
        for (key, l) in comp.basis() {
            if matches!(l, Label::Idem(_) | Label::Tensor(_)) {
                return Err(Error::InvalidStructure(format!(
                    "component label {l} must not be a unit or a tensor"
                )));
            }
            if info.insert(l.clone(), (i + 1, key)).is_some() {
                return Err(Error::LabelCollision(l.to_string()));
            }
        }
    }
    Ok(info)
}

pub(crate) fn trimmed(base: &Arc<BaseRing>, mut positive: Vec<Bimodule>) -> Vec<Arc<Bimodule>> {
    while positive.last().is_some_and(Bimodule::is_zero) {
        positive.pop();
    }
    std::iter::once(Arc::new(Bimodule::regular(base.clone())))
        .chain(positive.into_iter().map(Arc::new))
        .collect()
}

impl GradedRing {
    /// Builds from positive components `A^1, A^2, ...` and products of basis
    /// vectors. `product(a, b)` is only asked for composable pairs whose degrees
    /// sum to at most the top degree; associativity is checked exhaustively.
    pub fn new<F>(base: Arc<BaseRing>, positive: Vec<Bimodule>, mut product: F, complete: bool) -> Result<Self>
    where
        F: FnMut(&Label, &Label) -> Result<Combination>,
    {
        let info = check_component_labels(&base, &positive)?;
        let components = trimmed(&base, positive);
        let field = base.field();
        let top = components.len() - 1;
        let mut products = HashMap::new();
        for p in 1..=top {
            for q in 1..=top - p {
                let target = &components[p + q];
                for ((s, t), ab) in components[p].blocks() {
                    for ((_, u), bb) in components[q].row_blocks(t) {
                        for a in ab.labels() {
                            for b in bb.labels() {
                                let prod = collect_terms(product(a, b)?, field);
                                for (l, _) in &prod {
                                    match target.locate(l) {
                                        Some((k, _)) if k == (s, u) => {}
                                        _ => {
                                            return Err(Error::InvalidStructure(format!(
                                                "product {a}·{b} has term {l} outside A^{}",
                                                p + q
                                            )))
                                        }
                                    }
                                }
                                if !prod.is_empty() {
                                    products.insert((a.clone(), b.clone()), prod);
                                }
                            }
                        }
                    }
                }
            }
        }
        let ring = GradedRing {
            base,
            components,
            info,
            products,
            complete,
        };
        ring.check_associative()?;
        Ok(ring)
    }

    fn check_associative(&self) -> Result<()> {
        let top = self.top_degree();
        for p in 1..=top {
            for q in 1..=top.saturating_sub(p) {
                for r in 1..=top.saturating_sub(p + q) {
                    for ((_, t), ab) in self.components[p].blocks() {
                        for ((_, u), bb) in self.components[q].row_blocks(t) {
                            for (_, cb) in self.components[r].row_blocks(u) {
                                for a in ab.labels() {
                                    for b in bb.labels() {
                                        for c in cb.labels() {
                                            let left = self.mul_combo(&self.mul(a, b), &[(c.clone(), self.field().one())]);
                                            let right = self.mul_combo(&[(a.clone(), self.field().one())], &self.mul(b, c));
                                            if left != right {
                                                return Err(Error::InvalidStructure(format!(
                                                    "multiplication is not associative on {a}, {b}, {c}"
                                                )));
                                            }
                                        }
                                    }
                                }
                            }
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

    /// `A^n`; the zero bimodule beyond the top degree.
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

    /// Degree of a basis label, 0 for idempotents.
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

    /// Product of two basis vectors of any degrees.
    pub fn mul(&self, a: &Label, b: &Label) -> Combination {
        let one = self.field().one();
        match (a, b) {
            (Label::Idem(s), _) => match self.block_of(b) {
                Some((l, _)) if l == *s => vec![(b.clone(), one)],
                _ => Vec::new(),
            },
            (_, Label::Idem(t)) => match self.block_of(a) {
                Some((_, r)) if r == *t => vec![(a.clone(), one)],
                _ => Vec::new(),
            },
            _ => self
                .products
                .get(&(a.clone(), b.clone()))
                .cloned()
                .unwrap_or_default(),
        }
    }

    pub fn mul_combo(&self, x: &[(Label, Scalar)], y: &[(Label, Scalar)]) -> Combination {
        let f = self.field();
        collect_terms(
            x.iter().flat_map(|(a, ca)| {
                y.iter().flat_map(move |(b, cb)| {
                    let c = f.mul(ca, cb);
                    self.mul(a, b).into_iter().map(move |(l, v)| (l, f.mul(&v, &c)))
                })
            }),
            f,
        )
    }

    /// Left-to-right product of basis vectors.
    pub fn product_of(&self, factors: &[Label]) -> Combination {
        let f = self.field();
        let mut acc: Combination = match factors.first() {
            Some(a) => vec![(a.clone(), f.one())],
            None => return Vec::new(),
        };
        for b in &factors[1..] {
            acc = self.mul_combo(&acc, &[(b.clone(), f.one())]);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// `μ^{p,q} : A^p ⊗ A^q → A^{p+q}`.
    pub fn mult(&self, p: usize, q: usize) -> Result<BimoduleMap> {
        let src = Arc::new(tensor(&self.component(p), &self.component(q))?);
        let (cp, cq) = (self.component(p), self.component(q));
        BimoduleMap::from_fn(src.clone(), self.component(p + q), |l| {
            let (a, b) = split_pair(l, &cp, &cq);
            Ok(self.mul(&a, &b))
        })
    }

    /// Iterated multiplication `μ_n : (A^1)^{(n)} → A^n`.
    pub fn mu_n(&self, n: usize) -> Result<BimoduleMap> {
        let src = Arc::new(tensor_power(&self.component(1), n));
        BimoduleMap::from_fn(src, self.component(n), |l| Ok(self.product_of(l.factors())))
    }

    /// The quotient `A / A^{>n}`.
    pub fn truncate(&self, n: usize) -> GradedRing {
        let keep = n.min(self.top_degree());
        let products = self
            .products
            .iter()
            .filter(|((a, b), _)| self.info[a].0 + self.info[b].0 <= keep)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let components: Vec<Arc<Bimodule>> = self.components[..=keep].to_vec();
        let mut positive: Vec<Bimodule> = components[1..].iter().map(|c| (**c).clone()).collect();
        while positive.last().is_some_and(Bimodule::is_zero) {
            positive.pop();
        }
        let info = self
            .info
            .iter()
            .filter(|(_, (d, _))| *d <= keep)
            .map(|(l, v)| (l.clone(), *v))
            .collect();
        GradedRing {
            base: self.base.clone(),
            components: trimmed(&self.base, positive),
            info,
            products,
            complete: true,
        }
    }

    /// Whether `other` has the same components and structure constants after
    /// applying `relabel` to every label of `self`.
    pub fn same_structure(&self, other: &GradedRing, relabel: impl Fn(&Label) -> Label) -> bool {
        if *self.base != *other.base || self.dims() != other.dims() {
            return false;
        }
        for (l, (d, k)) in &self.info {
            let m = relabel(l);
            if other.degree_of(&m) != Some(*d) || other.block_of(&m) != Some(*k) {
                return false;
            }
        }
        if self.products.len() != other.products.len() {
            return false;
        }
        self.products.iter().all(|((a, b), v)| {
            let mapped: Combination = collect_terms(v.iter().map(|(l, x)| (relabel(l), x.clone())), self.field());
            other.mul(&relabel(a), &relabel(b)) == mapped
        })
    }

    /// All structure constants, sorted, for reporting and comparison.
    pub fn structure_constants(&self) -> Vec<(Label, Label, Combination)> {
        let mut out: Vec<_> = self
            .products
            .iter()
            .map(|((a, b), v)| (a.clone(), b.clone(), v.clone()))
            .collect();
        out.sort();
        out
    }
}

/// Splits a basis label of `V ⊗ W` into its two factors.
///
/// Component labels are never tensors, so a positive-degree pair has exactly
/// two factors; a unit factor was dropped and is restored from the block.
pub(crate) fn split_pair(l: &Label, v: &Bimodule, w: &Bimodule) -> (Label, Label) {
    let fs = l.factors();
    match fs.len() {
        2 => (fs[0].clone(), fs[1].clone()),
        1 if v.contains_label(&fs[0]) => {
            let ((_, t), _) = v.locate(&fs[0]).expect("label located");
            (fs[0].clone(), Label::Idem(t))
        }
        1 => {
            let ((s, _), _) = w.locate(&fs[0]).expect("label located");
            (Label::Idem(s), fs[0].clone())
        }
        _ => (l.clone(), l.clone()),
    }
}
