//! Chosen (co)homology classes and the structure they inherit: the coring
//! structure of `T(A)` by deconcatenation and the ring structure of `E(C)` by
//! concatenation.
//!
//! In each block the space is split as `B ⊕ H̃ ⊕ L`, with `B` the boundaries,
//! `H̃` representatives extending `B` to the cycles and `L` a complement of the
//! cycles. The projection `π` reads off `H̃`-coordinates; it kills boundaries,
//! so it descends to homology, and `π ⊗ π` kills boundaries of tensor products.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{bar_complex_ring, cobar_complex_coring, partitions, BettiKind, BettiTable, ComplexSlice};
use crate::bimodule::{tensor, Bimodule, BimoduleMap, BlockKey};
use crate::error::{Error, Result};
use crate::graded::{stacked_nullity, GradedCoring, GradedRing};
use crate::label::{collect_terms, Combination, Label};
use crate::linalg::{self, Echelon, FieldSpec, SparseMatrix, SparseVec};

/// Basis of the homology of one slice in one degree, with representatives.
#[derive(Clone, Debug)]
pub struct ClassBasis {
    degree: usize,
    weight: usize,
    space: Arc<Bimodule>,
    classes: Arc<Bimodule>,
    reps: BTreeMap<BlockKey, Vec<SparseVec>>,
    boundaries: BTreeMap<BlockKey, Vec<SparseVec>>,
    projectors: BTreeMap<BlockKey, (Echelon, Vec<usize>)>,
}

impl ClassBasis {
    /// Classes of `slice` in degree `n`, labelled `{tag}{n},{m}[s,t]#i`.
    pub fn new(slice: &ComplexSlice, n: usize, tag: &str) -> Result<Self> {
        let space = slice
            .space(n as i64)
            .ok_or(Error::MissingRepresentatives {
                degree: n,
                weight: slice.weight(),
            })?
            .clone();
        let f = space.field();
        let base = space.base().clone();
        let (mut reps, mut boundaries, mut projectors) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        let mut blocks = Vec::new();
        for (key, b) in space.blocks() {
            let cycles: Vec<SparseVec> = match slice.outgoing(n as i64) {
                Some(d) => linalg::kernel_basis(&d.block(key), f)?.vectors().to_vec(),
                None => (0..b.len()).map(|i| vec![(i, f.one())]).collect(),
            };
            let bounds: Vec<SparseVec> = match slice.incoming(n as i64) {
                Some(d) => linalg::image_basis(&d.block(key), f)?.vectors().to_vec(),
                None => Vec::new(),
            };
            let mut e = Echelon::new(b.len(), f);
            for v in &bounds {
                e.insert(v);
            }
            let mut gens = Vec::new();
            let mut block_reps = Vec::new();
            for z in cycles {
                let id = e.generators();
                if e.insert(&z).is_some() {
                    gens.push(id);
                    block_reps.push(z);
                }
            }
            for i in 0..b.len() {
                e.insert(&[(i, f.one())]);
            }
            debug_assert_eq!(e.rank(), b.len());
            let labels: Vec<Label> = (0..block_reps.len())
                .map(|i| {
                    Label::atom(format!(
                        "{tag}{n},{}[{},{}]#{i}",
                        slice.weight(),
                        base.name(key.0),
                        base.name(key.1)
                    ))
                })
                .collect();
            if !labels.is_empty() {
                blocks.push((key, labels));
                reps.insert(key, block_reps);
            }
            boundaries.insert(key, bounds);
            projectors.insert(key, (e, gens));
        }
        Ok(ClassBasis {
            degree: n,
            weight: slice.weight(),
            classes: Arc::new(Bimodule::new(base, blocks)?),
            space,
            reps,
            boundaries,
            projectors,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn space(&self) -> &Arc<Bimodule> {
        &self.space
    }

    /// The homology as a bimodule whose basis is the chosen classes.
    pub fn classes(&self) -> &Arc<Bimodule> {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.classes.dim()
    }

    /// The chosen representative of a class, in the labels of the chain space.
    pub fn representative(&self, class: &Label) -> Combination {
        let Some((key, i)) = self.classes.locate(class) else {
            return Vec::new();
        };
        self.space.combination(key, &self.reps[&key][i])
    }

    /// Boundary spanning vectors of one block, in the labels of the chain space.
    pub fn boundaries(&self, key: BlockKey) -> Vec<Combination> {
        self.boundaries
            .get(&key)
            .map(|bs| bs.iter().map(|v| self.space.combination(key, v)).collect())
            .unwrap_or_default()
    }

    /// Class coordinates of a vector of block `key`.
    pub fn project_vector(&self, key: BlockKey, v: &[(usize, crate::Scalar)]) -> SparseVec {
        let Some((e, gens)) = self.projectors.get(&key) else {
            return Vec::new();
        };
        let (rem, combo) = e.reduce(v);
        debug_assert!(rem.is_empty(), "projector spans the block");
        gens.iter()
            .enumerate()
            .filter_map(|(i, g)| {
                combo
                    .binary_search_by_key(g, |(c, _)| *c)
                    .ok()
                    .map(|k| (i, combo[k].1.clone()))
            })
            .collect()
    }

    /// `π` applied to a combination of chain-space labels, possibly spanning blocks.
    pub fn project(&self, combo: &[(Label, crate::Scalar)]) -> Result<Combination> {
        let f = self.space.field();
        let mut by_block: BTreeMap<BlockKey, Vec<(Label, crate::Scalar)>> = BTreeMap::new();
        for (l, x) in combo {
            let (key, _) = self.space.locate(l).ok_or_else(|| {
                Error::Invariant(format!("{l} is not a cell of degree {} weight {}", self.degree, self.weight))
            })?;
            by_block.entry(key).or_default().push((l.clone(), x.clone()));
        }
        let mut out = Vec::new();
        for (key, terms) in by_block {
            let v = self.space.coordinates(key, &terms)?;
            out.extend(self.classes.combination(key, &self.project_vector(key, &v)));
        }
        Ok(collect_terms(out, f))
    }
}

pub(crate) fn is_cycle(slice: &ComplexSlice, n: usize, combo: &[(Label, crate::Scalar)]) -> Result<bool> {
    let Some(d) = slice.outgoing(n as i64) else {
        return Ok(true);
    };
    let space = slice.space(n as i64).expect("degree in range");
    let mut by_block: BTreeMap<BlockKey, Vec<(Label, crate::Scalar)>> = BTreeMap::new();
    for (l, x) in combo {
        let Some((key, _)) = space.locate(l) else {
            return Ok(false);
        };
        by_block.entry(key).or_default().push((l.clone(), x.clone()));
    }
    for (key, terms) in by_block {
        if !d.apply(key, &space.coordinates(key, &terms)?).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ x ⊗ y` of two label combinations, concatenating tensor factors.
pub(crate) fn concatenate(x: &[(Label, crate::Scalar)], y: &[(Label, crate::Scalar)], f: FieldSpec) -> Combination {
    collect_terms(
        x.iter()
            .flat_map(|(a, p)| y.iter().map(move |(b, q)| (Label::tensor(&[a, b]), f.mul(p, q)))),
        f,
    )
}

/// Rank of `⊕ maps` onto their common target, per target block, summed.
fn joint_image_rank(maps: &[BimoduleMap], target: &Bimodule) -> Result<usize> {
    let f = target.field();
    let mut r = 0;
    for (key, b) in target.blocks() {
        let blocks: Vec<SparseMatrix> = maps.iter().map(|m| m.block(key)).collect();
        let refs: Vec<&SparseMatrix> = blocks.iter().collect();
        r += linalg::rank(&SparseMatrix::hstack(&refs, b.len())?, f)?;
    }
    Ok(r)
}

fn build_classes(
    slices: &[ComplexSlice],
    tag: &str,
) -> Result<BTreeMap<(usize, usize), ClassBasis>> {
    let per_weight = slices
        .par_iter()
        .enumerate()
        .skip(1)
        .map(|(m, slice)| {
            let dims = slice.homology_dims()?;
            (1..=m)
                .map(|n| {
                    let cb = ClassBasis::new(slice, n, tag)?;
                    // The representatives and the rank count are independent routes.
                    if cb.dim() != dims.get(&(n as i64)).copied().unwrap_or(0) {
                        return Err(Error::Invariant(format!(
                            "class count differs from homology rank at ({n}, {m})"
                        )));
                    }
                    Ok(((n, m), cb))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_weight.into_iter().flatten().collect())
}

fn table_of(
    kind: BettiKind,
    base_size: usize,
    classes: &BTreeMap<(usize, usize), ClassBasis>,
    n_max: usize,
    m_max: usize,
) -> BettiTable {
    let mut rows = vec![vec![0; m_max + 1]; n_max + 1];
    rows[0][0] = base_size;
    for (&(n, m), cb) in classes {
        if n <= n_max && m <= m_max {
            rows[n][m] = cb.dim();
        }
    }
    BettiTable {
        kind,
        n_max,
        m_max,
        rows,
    }
}

/// Bar homology `T_{n,m}(A)` for `1 ≤ n ≤ m ≤ m_max` with representatives.
pub struct BarHomology<'a> {
    ring: &'a GradedRing,
    m_max: usize,
    slices: Vec<ComplexSlice>,
    classes: BTreeMap<(usize, usize), ClassBasis>,
}

impl<'a> BarHomology<'a> {
    pub fn new(a: &'a GradedRing, m_max: usize) -> Result<Self> {
        let slices = (0..=m_max)
            .into_par_iter()
            .map(|m| bar_complex_ring(a, m))
            .collect::<Result<Vec<_>>>()?;
        let classes = build_classes(&slices, "t")?;
        Ok(BarHomology {
            ring: a,
            m_max,
            slices,
            classes,
        })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn ring(&self) -> &GradedRing {
        self.ring
    }

    pub fn slice(&self, m: usize) -> Option<&ComplexSlice> {
        self.slices.get(m)
    }

    pub fn classes(&self, n: usize, m: usize) -> Result<&ClassBasis> {
        self.classes
            .get(&(n, m))
            .ok_or(Error::MissingRepresentatives { degree: n, weight: m })
    }

    pub fn table(&self) -> BettiTable {
        table_of(BettiKind::Tor, self.ring.base().size(), &self.classes, self.m_max, self.m_max)
    }

    /// `Σ_{m ≤ m_max} T_{n,m}`.
    pub fn total_dim(&self, n: usize) -> usize {
        (n..=self.m_max).filter_map(|m| self.classes.get(&(n, m))).map(ClassBasis::dim).sum()
    }

    /// Weight of a chain-space label: the sum of its factor degrees.
    fn weight_of(&self, factors: &[Label]) -> usize {
        factors.iter().map(|l| self.ring.degree_of(l).unwrap_or(0)).sum()
    }

    /// Induced `Δ_{p, n−p} : T_{n,m} → ⊕_k T_{p,k} ⊗ T_{n−p,m−k}` from deconcatenation.
    pub fn deconcatenation(&self, n: usize, m: usize, p: usize) -> Result<BimoduleMap> {
        let q = n - p;
        let source = self.classes(n, m)?;
        let f = self.ring.field();
        let mut parts = Vec::new();
        for k in p..=m.saturating_sub(q) {
            parts.push(tensor(self.classes(p, k)?.classes(), self.classes(q, m - k)?.classes())?);
        }
        let refs: Vec<&Bimodule> = parts.iter().collect();
        let target = Arc::new(Bimodule::direct_sum(self.ring.base().clone(), &refs)?);
        BimoduleMap::from_fn(source.classes().clone(), target, |h| {
            let mut out = Vec::new();
            for (l, x) in source.representative(h) {
                let fs = l.factors();
                let (left, right) = (&fs[..p], &fs[p..]);
                let k = self.weight_of(left);
                let pl = self.classes(p, k)?.project(&[(tensor_of(left), f.one())])?;
                let pr = self.classes(q, m - k)?.project(&[(tensor_of(right), f.one())])?;
                out.extend(concatenate(&pl, &pr, f).into_iter().map(|(t, y)| (t, f.mul(&x, &y))));
            }
            Ok(collect_terms(out, f))
        })
    }

    /// `Δ^n : T_{n,m} → ⊕_{𝒎} T_{1,m_1} ⊗ ⋯ ⊗ T_{1,m_n}` by full deconcatenation.
    pub fn iterated_deconcatenation(&self, n: usize, m: usize) -> Result<BimoduleMap> {
        let source = self.classes(n, m)?;
        let f = self.ring.field();
        let mut parts = Vec::new();
        for comp in partitions(n, m) {
            let mut acc: Option<Bimodule> = None;
            for &k in &comp {
                let h = self.classes(1, k)?.classes();
                acc = Some(match acc {
                    None => (**h).clone(),
                    Some(a) => tensor(&a, h)?,
                });
            }
            let acc = acc.expect("n ≥ 1 factors");
            if !acc.is_zero() {
                parts.push(acc);
            }
        }
        let refs: Vec<&Bimodule> = parts.iter().collect();
        let target = Arc::new(Bimodule::direct_sum(self.ring.base().clone(), &refs)?);
        BimoduleMap::from_fn(source.classes().clone(), target, |h| {
            let mut out = Vec::new();
            for (l, x) in source.representative(h) {
                let mut acc: Combination = vec![(Label::Idem(0), x.clone())];
                for (i, a) in l.factors().iter().enumerate() {
                    let k = self.ring.degree_of(a).unwrap_or(0);
                    let pa = self.classes(1, k)?.project(&[(a.clone(), f.one())])?;
                    acc = if i == 0 {
                        pa.into_iter().map(|(t, y)| (t, f.mul(&x, &y))).collect()
                    } else {
                        concatenate(&acc, &pa, f)
                    };
                    if acc.is_empty() {
                        break;
                    }
                }
                out.extend(acc);
            }
            Ok(collect_terms(out, f))
        })
    }

    /// Dimension of the primitive classes in each `T_{n,m}`, `n ≥ 1`.
    pub fn primitive_dims(&self) -> Result<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for (&(n, m), cb) in &self.classes {
            let maps = (1..n).map(|p| self.deconcatenation(n, m, p)).collect::<Result<Vec<_>>>()?;
            let dim = stacked_nullity(&maps, cb.classes())?.values().sum();
            out.insert((n, m), dim);
        }
        Ok(out)
    }

    /// First `(n, m)`, `n ≥ 2`, where the iterated deconcatenation is not injective.
    pub fn strong_grading_failure(&self) -> Result<Option<(usize, usize)>> {
        for (&(n, m), cb) in &self.classes {
            if n >= 2 && cb.dim() > 0 && self.iterated_deconcatenation(n, m)?.rank()? < cb.dim() {
                return Ok(Some((n, m)));
            }
        }
        Ok(None)
    }
}

fn tensor_of(factors: &[Label]) -> Label {
    let refs: Vec<&Label> = factors.iter().collect();
    Label::tensor(&refs)
}

/// Cobar cohomology `E^{n,m}(C)` for `1 ≤ n ≤ m ≤ m_max` with representatives.
pub struct CobarHomology<'a> {
    coring: &'a GradedCoring,
    m_max: usize,
    slices: Vec<ComplexSlice>,
    classes: BTreeMap<(usize, usize), ClassBasis>,
}

impl<'a> CobarHomology<'a> {
    pub fn new(c: &'a GradedCoring, m_max: usize) -> Result<Self> {
        let slices = (0..=m_max)
            .into_par_iter()
            .map(|m| cobar_complex_coring(c, m))
            .collect::<Result<Vec<_>>>()?;
        let classes = build_classes(&slices, "e")?;
        Ok(CobarHomology {
            coring: c,
            m_max,
            slices,
            classes,
        })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn coring(&self) -> &GradedCoring {
        self.coring
    }

    pub fn slice(&self, m: usize) -> Option<&ComplexSlice> {
        self.slices.get(m)
    }

    pub fn classes(&self, n: usize, m: usize) -> Result<&ClassBasis> {
        self.classes
            .get(&(n, m))
            .ok_or(Error::MissingRepresentatives { degree: n, weight: m })
    }

    pub fn table(&self) -> BettiTable {
        table_of(BettiKind::Ext, self.coring.base().size(), &self.classes, self.m_max, self.m_max)
    }

    /// `Σ_{m ≤ m_max} E^{n,m}`.
    pub fn total_dim(&self, n: usize) -> usize {
        (n..=self.m_max).filter_map(|m| self.classes.get(&(n, m))).map(ClassBasis::dim).sum()
    }

    /// `E^{n,m} ⊗ E^{n',m'} → E^{n+n',m+m'}` induced by concatenating cocycles.
    ///
    /// Asserts that products of representatives are cocycles and that boundaries
    /// multiply to zero classes on either side.
    pub fn product(&self, n1: usize, m1: usize, n2: usize, m2: usize) -> Result<BimoduleMap> {
        let f = self.coring.field();
        let (x, y) = (self.classes(n1, m1)?, self.classes(n2, m2)?);
        let (n, m) = (n1 + n2, m1 + m2);
        let z = self.classes(n, m)?;
        let slice = &self.slices[m];
        let source = Arc::new(tensor(x.classes(), y.classes())?);
        let map = BimoduleMap::from_fn(source, z.classes().clone(), |h| {
            let fs = h.factors();
            let prod = concatenate(&x.representative(&fs[0]), &y.representative(&fs[1]), f);
            if !is_cycle(slice, n, &prod)? {
                return Err(Error::Invariant(format!("product of cocycles is not a cocycle in E^{{{n},{m}}}")));
            }
            z.project(&prod)
        })?;
        // Boundaries times cocycles, on both sides.
        for ((s, u), _) in x.space().blocks() {
            for ((_, t), _) in y.classes().row_blocks(u) {
                for b in x.boundaries((s, u)) {
                    for i in 0..y.classes().block_dim((u, t)) {
                        let r = y.representative(&y.classes().block_labels((u, t))[i]);
                        if !z.project(&concatenate(&b, &r, f))?.is_empty() {
                            return Err(Error::Invariant(format!("boundary·cocycle survives in E^{{{n},{m}}}")));
                        }
                    }
                }
            }
        }
        for ((s, u), _) in x.classes().blocks() {
            for ((_, t), _) in y.space().row_blocks(u) {
                for b in y.boundaries((u, t)) {
                    for l in x.classes().block_labels((s, u)) {
                        if !z.project(&concatenate(&x.representative(l), &b, f))?.is_empty() {
                            return Err(Error::Invariant(format!("cocycle·boundary survives in E^{{{n},{m}}}")));
                        }
                    }
                }
            }
        }
        Ok(map)
    }

    /// First `(n, m)`, `n ≥ 2`, where `E^1 · E^{n−1} → E^n` misses part of `E^{n,m}`.
    pub fn strong_grading_failure(&self) -> Result<Option<(usize, usize)>> {
        for (&(n, m), cb) in &self.classes {
            if n < 2 || cb.dim() == 0 {
                continue;
            }
            let maps = (1..=m - (n - 1))
                .map(|k| self.product(1, k, n - 1, m - k))
                .collect::<Result<Vec<_>>>()?;
            if joint_image_rank(&maps, cb.classes())? < cb.dim() {
                return Ok(Some((n, m)));
            }
        }
        Ok(None)
    }

    /// `dim (QE)^{n,m}`: classes not reached by products of positive-degree classes.
    pub fn indecomposable_dims(&self) -> Result<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for (&(n, m), cb) in &self.classes {
            let mut maps = Vec::new();
            for p in 1..n {
                for k in p..=m.saturating_sub(n - p) {
                    maps.push(self.product(p, k, n - p, m - k)?);
                }
            }
            out.insert((n, m), cb.dim() - joint_image_rank(&maps, cb.classes())?);
        }
        Ok(out)
    }
}
