//! Bimodules over `R = k^S` as `S×S`-indexed families of based spaces.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::label::Label;
use crate::linalg::{self, accumulate, FieldSpec, Scalar, SparseMatrix, SparseVec, Subspace};

/// Block index `(s, t)`: the summand `e_s · V · e_t`.
pub type BlockKey = (u32, u32);

/// The split commutative semisimple base ring `k^S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseRing {
    labels: Vec<String>,
    field: FieldSpec,
}

impl BaseRing {
    pub fn new(labels: Vec<String>, field: FieldSpec) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(Error::InvalidStructure("base ring needs an idempotent".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::LabelCollision(format!("idempotent {l}")));
            }
        }
        Ok(Arc::new(BaseRing { labels, field }))
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&self, s: u32) -> &str {
        &self.labels[s as usize]
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `k^{S ⊔ S'}`, with the second factor's idempotents shifted by `|S|`.
    pub fn disjoint_union(&self, other: &BaseRing) -> Result<Arc<Self>> {
        if self.field != other.field {
            return Err(Error::BaseMismatch);
        }
        BaseRing::new(
            self.labels.iter().chain(&other.labels).cloned().collect(),
            self.field,
        )
    }
}

pub(crate) fn same_base(a: &Arc<BaseRing>, b: &Arc<BaseRing>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// Ordered basis of one block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockBasis {
    labels: Vec<Label>,
}

impl BlockBasis {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Finite-dimensional `R`-bimodule with globally unique basis labels.
#[derive(Clone, Debug)]
pub struct Bimodule {
    base: Arc<BaseRing>,
    blocks: BTreeMap<BlockKey, BlockBasis>,
    index: HashMap<Label, (BlockKey, usize)>,
}

impl PartialEq for Bimodule {
    fn eq(&self, other: &Self) -> bool {
        *self.base == *other.base && self.blocks == other.blocks
    }
}

impl Eq for Bimodule {}

impl Bimodule {
    /// Labels within a block are sorted; empty blocks are dropped.
    pub fn new<I>(base: Arc<BaseRing>, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BlockKey, Vec<Label>)>,
    {
        let n = base.size() as u32;
        let mut map: BTreeMap<BlockKey, Vec<Label>> = BTreeMap::new();
        for (key, labels) in blocks {
            if key.0 >= n || key.1 >= n {
                return Err(Error::InvalidStructure(format!("block {key:?} outside base")));
            }
            map.entry(key).or_default().extend(labels);
        }
        let mut index = HashMap::new();
        let mut out = BTreeMap::new();
        for (key, mut labels) in map {
            if labels.is_empty() {
                continue;
            }
            labels.sort();
            for (i, l) in labels.iter().enumerate() {
                if index.insert(l.clone(), (key, i)).is_some() {
                    return Err(Error::LabelCollision(l.to_string()));
                }
            }
            out.insert(key, BlockBasis { labels });
        }
        Ok(Bimodule {
            base,
            blocks: out,
            index,
        })
    }

    pub fn zero(base: Arc<BaseRing>) -> Self {
        Bimodule {
            base,
            blocks: BTreeMap::new(),
            index: HashMap::new(),
        }
    }

    /// The regular bimodule `R`: one basis vector `e_s` in each block `(s, s)`.
    pub fn regular(base: Arc<BaseRing>) -> Self {
        let n = base.size() as u32;
        Bimodule::new(base, (0..n).map(|s| ((s, s), vec![Label::Idem(s)])))
            .expect("idempotent labels are distinct")
    }

    pub fn base(&self) -> &Arc<BaseRing> {
        &self.base
    }

    pub fn field(&self) -> FieldSpec {
        self.base.field
    }

    pub fn blocks(&self) -> impl Iterator<Item = (BlockKey, &BlockBasis)> + '_ {
        self.blocks.iter().map(|(k, b)| (*k, b))
    }

    pub fn block(&self, key: BlockKey) -> Option<&BlockBasis> {
        self.blocks.get(&key)
    }

    pub fn block_labels(&self, key: BlockKey) -> &[Label] {
        self.blocks.get(&key).map_or(&[], |b| b.labels.as_slice())
    }

    /// Blocks `(s, u)` for fixed `s`.
    pub fn row_blocks(&self, s: u32) -> impl Iterator<Item = (BlockKey, &BlockBasis)> + '_ {
        self.blocks.range((s, 0)..=(s, u32::MAX)).map(|(k, b)| (*k, b))
    }

    pub fn block_dim(&self, key: BlockKey) -> usize {
        self.blocks.get(&key).map_or(0, BlockBasis::len)
    }

    pub fn dim(&self) -> usize {
        self.blocks.values().map(BlockBasis::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = BlockKey> + '_ {
        self.blocks.keys().copied()
    }

    pub fn basis(&self) -> impl Iterator<Item = (BlockKey, &Label)> + '_ {
        self.blocks
            .iter()
            .flat_map(|(k, b)| b.labels.iter().map(move |l| (*k, l)))
    }

    pub fn locate(&self, label: &Label) -> Option<(BlockKey, usize)> {
        self.index.get(label).copied()
    }

    pub fn contains_label(&self, label: &Label) -> bool {
        self.index.contains_key(label)
    }

    /// Direct sum of bimodules whose labels are disjoint.
    pub fn direct_sum(base: Arc<BaseRing>, parts: &[&Bimodule]) -> Result<Self> {
        for p in parts {
            same_base(&base, &p.base)?;
        }
        Bimodule::new(
            base,
            parts
                .iter()
                .flat_map(|p| p.blocks.iter().map(|(k, b)| (*k, b.labels.clone()))),
        )
    }

    /// Same labels over a larger base, with idempotent indices shifted.
    pub fn shifted(&self, base: Arc<BaseRing>, shift: u32, relabel: impl Fn(&Label) -> Label) -> Result<Self> {
        Bimodule::new(
            base,
            self.blocks.iter().map(|(k, b)| {
                (
                    (k.0 + shift, k.1 + shift),
                    b.labels.iter().map(&relabel).collect(),
                )
            }),
        )
    }

    /// Coordinates of a label combination inside one block.
    pub fn coordinates(&self, key: BlockKey, combo: &[(Label, Scalar)]) -> Result<SparseVec> {
        let f = self.field();
        let mut entries = Vec::with_capacity(combo.len());
        for (l, x) in combo {
            match self.index.get(l) {
                Some((k, i)) if *k == key => entries.push((*i, x.clone())),
                _ => {
                    return Err(Error::MissingLabel {
                        label: l.to_string(),
                        s: key.0,
                        t: key.1,
                    })
                }
            }
        }
        Ok(accumulate(entries, f))
    }

    /// Label combination of a coordinate vector of one block.
    pub fn combination(&self, key: BlockKey, v: &[(usize, Scalar)]) -> Vec<(Label, Scalar)> {
        let labels = self.block_labels(key);
        v.iter().map(|(i, x)| (labels[*i].clone(), x.clone())).collect()
    }
}

/// Iterates `(v, w)` pairs of `V_{s,t} × W_{t,u}` for all `t`, keyed by `(s, u)`.
pub(crate) fn chained_pairs<'a>(
    v: &'a Bimodule,
    w: &'a Bimodule,
) -> impl Iterator<Item = (BlockKey, &'a Label, &'a Label)> + 'a {
    v.blocks().flat_map(move |((s, t), vb)| {
        w.row_blocks(t).flat_map(move |((_, u), wb)| {
            vb.labels
                .iter()
                .flat_map(move |a| wb.labels.iter().map(move |b| ((s, u), a, b)))
        })
    })
}

/// `V ⊗_R W`, blockwise `⊕_t V_{s,t} ⊗ W_{t,u}`.
pub fn tensor(v: &Bimodule, w: &Bimodule) -> Result<Bimodule> {
    same_base(&v.base, &w.base)?;
    let mut blocks: BTreeMap<BlockKey, Vec<Label>> = BTreeMap::new();
    for (key, a, b) in chained_pairs(v, w) {
        blocks.entry(key).or_default().push(Label::tensor(&[a, b]));
    }
    Bimodule::new(v.base.clone(), blocks)
}

/// `V^{(n)}`, with `V^{(0)} = R`.
pub fn tensor_power(v: &Bimodule, n: usize) -> Bimodule {
    match n {
        0 => Bimodule::regular(v.base.clone()),
        _ => {
            let mut acc = v.clone();
            for _ in 1..n {
                acc = tensor(&acc, v).expect("same base");
            }
            acc
        }
    }
}

/// Left dual `^*V = Hom_R(_R V, _R R)`.
///
/// The functional dual to `v ∈ V_{s,t}` takes values in `R e_s`. Under the
/// actions `(r·α)(v) = α(v) r` and `(α·r)(v) = α(v r)` it is fixed by `e_s` on
/// the left and `e_t` on the right, so it is stored in block `(s, t)`.
pub fn left_dual(v: &Bimodule) -> Bimodule {
    Bimodule::new(
        v.base.clone(),
        v.blocks
            .iter()
            .map(|(k, b)| (*k, b.labels.iter().map(Label::dual).collect())),
    )
    .expect("dual labels are distinct")
}

/// Right dual `V^* = Hom_R(V_R, R_R)`; the same block convention as the left dual.
pub fn right_dual(v: &Bimodule) -> Bimodule {
    left_dual(v)
}

/// Which structure a functional is linear for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Value of the functional `alpha` on the basis vector `v`: `(idempotent, coefficient)`.
///
/// A left-linear functional dual to `x ∈ V_{s,t}` sends `x` to `e_s`; a
/// right-linear one sends it to `e_t`.
pub(crate) fn evaluate(space: &Bimodule, alpha: &Label, v: &Label, side: Side) -> Option<(u32, Scalar)> {
    if alpha.undual() != Some(v) {
        return None;
    }
    let ((s, t), _) = space.locate(v)?;
    let idem = match side {
        Side::Left => s,
        Side::Right => t,
    };
    Some((idem, Scalar::from_integer(1.into())))
}

/// Linear map between bimodules, one matrix per block.
#[derive(Clone, Debug)]
pub struct BimoduleMap {
    source: Arc<Bimodule>,
    target: Arc<Bimodule>,
    blocks: BTreeMap<BlockKey, SparseMatrix>,
}

impl BimoduleMap {
    /// Matrices are indexed by source and target block; zero matrices may be omitted.
    pub fn from_blocks(
        source: Arc<Bimodule>,
        target: Arc<Bimodule>,
        blocks: BTreeMap<BlockKey, SparseMatrix>,
    ) -> Result<Self> {
        same_base(&source.base, &target.base)?;
        let mut clean = BTreeMap::new();
        for (k, m) in blocks {
            if m.rows() != target.block_dim(k) || m.cols() != source.block_dim(k) {
                return Err(Error::InvalidStructure(format!(
                    "block {k:?} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.block_dim(k),
                    source.block_dim(k)
                )));
            }
            if !m.is_zero() {
                clean.insert(k, m);
            }
        }
        Ok(BimoduleMap {
            source,
            target,
            blocks: clean,
        })
    }

    /// Map defined on basis labels; images must stay in the same block.
    pub fn from_fn<F>(source: Arc<Bimodule>, target: Arc<Bimodule>, image: F) -> Result<Self>
    where
        F: Fn(&Label) -> Result<Vec<(Label, Scalar)>>,
    {
        same_base(&source.base, &target.base)?;
        let mut blocks = BTreeMap::new();
        for (key, basis) in source.blocks() {
            let mut columns = Vec::with_capacity(basis.len());
            for l in basis.labels() {
                let img = image(l)?;
                columns.push(if img.is_empty() {
                    Vec::new()
                } else {
                    target.coordinates(key, &img)?
                });
            }
            let m = SparseMatrix::from_clean_columns(target.block_dim(key), columns);
            if !m.is_zero() {
                blocks.insert(key, m);
            }
        }
        Ok(BimoduleMap {
            source,
            target,
            blocks,
        })
    }

    pub fn identity(v: Arc<Bimodule>) -> Self {
        let blocks = v
            .blocks()
            .map(|(k, b)| (k, SparseMatrix::identity(b.len())))
            .collect();
        BimoduleMap {
            source: v.clone(),
            target: v,
            blocks,
        }
    }

    pub fn zero(source: Arc<Bimodule>, target: Arc<Bimodule>) -> Self {
        BimoduleMap {
            source,
            target,
            blocks: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &Arc<Bimodule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Bimodule> {
        &self.target
    }

    pub fn field(&self) -> FieldSpec {
        self.source.field()
    }

    /// Matrix of block `key`; all-zero when absent.
    pub fn block(&self, key: BlockKey) -> SparseMatrix {
        self.blocks
            .get(&key)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.target.block_dim(key), self.source.block_dim(key)))
    }

    pub fn stored_blocks(&self) -> impl Iterator<Item = (BlockKey, &SparseMatrix)> + '_ {
        self.blocks.iter().map(|(k, m)| (*k, m))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Image of one basis label.
    pub fn apply_label(&self, l: &Label) -> Vec<(Label, Scalar)> {
        let Some((key, i)) = self.source.locate(l) else {
            return Vec::new();
        };
        match self.blocks.get(&key) {
            Some(m) => self.target.combination(key, m.column(i)),
            None => Vec::new(),
        }
    }

    /// Image of a coordinate vector of block `key`.
    pub fn apply(&self, key: BlockKey, v: &[(usize, Scalar)]) -> SparseVec {
        match self.blocks.get(&key) {
            Some(m) => m.apply(v, self.field()),
            None => Vec::new(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BimoduleMap) -> Result<BimoduleMap> {
        if *inner.target != *self.source {
            return Err(Error::InvalidStructure("composition of incompatible maps".into()));
        }
        let f = self.field();
        let mut blocks = BTreeMap::new();
        for (k, b) in &inner.blocks {
            if let Some(a) = self.blocks.get(k) {
                blocks.insert(*k, a.mul(b, f)?);
            }
        }
        BimoduleMap::from_blocks(inner.source.clone(), self.target.clone(), blocks)
    }

    pub fn add(&self, other: &BimoduleMap) -> Result<BimoduleMap> {
        if *self.source != *other.source || *self.target != *other.target {
            return Err(Error::InvalidStructure("sum of maps with different ends".into()));
        }
        let f = self.field();
        let mut blocks = self.blocks.clone();
        for (k, m) in &other.blocks {
            let sum = match blocks.get(k) {
                Some(a) => a.add(m, f)?,
                None => m.clone(),
            };
            blocks.insert(*k, sum);
        }
        BimoduleMap::from_blocks(self.source.clone(), self.target.clone(), blocks)
    }

    pub fn scale(&self, s: &Scalar) -> BimoduleMap {
        let f = self.field();
        BimoduleMap::from_blocks(
            self.source.clone(),
            self.target.clone(),
            self.blocks.iter().map(|(k, m)| (*k, m.scale(s, f))).collect(),
        )
        .expect("shapes preserved")
    }

    pub fn rank(&self) -> Result<usize> {
        let f = self.field();
        let mut r = 0;
        for m in self.blocks.values() {
            r += linalg::rank(m, f)?;
        }
        Ok(r)
    }

    /// Blockwise kernel; blocks of the source without a stored matrix are fully in the kernel.
    pub fn kernel(&self) -> Result<SubBimodule> {
        let f = self.field();
        let mut blocks = BTreeMap::new();
        for (k, b) in self.source.blocks() {
            let sub = match self.blocks.get(&k) {
                Some(m) => linalg::kernel_basis(m, f)?,
                None => Subspace::full(b.len()),
            };
            blocks.insert(k, sub);
        }
        Ok(SubBimodule {
            ambient: self.source.clone(),
            blocks,
        })
    }

    pub fn image(&self) -> Result<SubBimodule> {
        let f = self.field();
        let mut blocks = BTreeMap::new();
        for (k, b) in self.target.blocks() {
            let sub = match self.blocks.get(&k) {
                Some(m) => linalg::image_basis(m, f)?,
                None => Subspace::zero(b.len()),
            };
            blocks.insert(k, sub);
        }
        Ok(SubBimodule {
            ambient: self.target.clone(),
            blocks,
        })
    }

    /// Whether every block is square and invertible.
    pub fn is_invertible(&self) -> Result<bool> {
        if self.source.blocks().map(|(k, b)| (k, b.len())).collect::<Vec<_>>()
            != self.target.blocks().map(|(k, b)| (k, b.len())).collect::<Vec<_>>()
        {
            return Ok(false);
        }
        Ok(self.rank()? == self.source.dim())
    }

    /// Same matrices between relabeled or re-based copies of source and target.
    pub fn rebased(&self, source: Arc<Bimodule>, target: Arc<Bimodule>, shift: u32) -> Result<BimoduleMap> {
        BimoduleMap::from_blocks(
            source,
            target,
            self.blocks
                .iter()
                .map(|(k, m)| ((k.0 + shift, k.1 + shift), m.clone()))
                .collect(),
        )
    }

    /// The transpose `^*f : ^*W → ^*V` between left duals.
    pub fn transpose_dual(&self) -> BimoduleMap {
        let source = Arc::new(left_dual(&self.target));
        let target = Arc::new(left_dual(&self.source));
        // Dual labels sort like their primal labels, so block bases keep their order.
        BimoduleMap::from_blocks(
            source,
            target,
            self.blocks.iter().map(|(k, m)| (*k, m.transpose())).collect(),
        )
        .expect("transposed shapes match")
    }

    /// Whether both maps have equal ends and equal matrices.
    pub fn same_as(&self, other: &BimoduleMap) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.blocks == other.blocks
    }
}

/// `f ⊗ g`, the Kronecker product along the middle-index sum.
pub fn tensor_map(f: &BimoduleMap, g: &BimoduleMap) -> Result<BimoduleMap> {
    same_base(&f.source.base, &g.source.base)?;
    let field = f.field();
    let source = Arc::new(tensor(&f.source, &g.source)?);
    let target = Arc::new(tensor(&f.target, &g.target)?);
    let mut columns: BTreeMap<BlockKey, Vec<SparseVec>> = source
        .blocks()
        .map(|(k, b)| (k, vec![Vec::new(); b.len()]))
        .collect();
    for (key, a, b) in chained_pairs(&f.source, &g.source) {
        let (_, col) = source.locate(&Label::tensor(&[a, b])).expect("pair is a basis vector");
        let mut entries = Vec::new();
        for (x, cx) in f.apply_label(a) {
            for (y, cy) in g.apply_label(b) {
                let (tk, i) = target
                    .locate(&Label::tensor(&[&x, &y]))
                    .expect("tensor of images lies in the target");
                debug_assert_eq!(tk, key);
                entries.push((i, field.mul(&cx, &cy)));
            }
        }
        columns.get_mut(&key).expect("block exists")[col] = accumulate(entries, field);
    }
    let blocks = columns
        .into_iter()
        .map(|(k, cols)| (k, SparseMatrix::from_clean_columns(target.block_dim(k), cols)))
        .collect();
    BimoduleMap::from_blocks(source, target, blocks)
}

/// The canonical isomorphisms `φ : ^*V ⊗ ^*W → ^*(V⊗W)` and its inverse `ψ`,
/// computed from the evaluation formulas on dual bases.
///
/// Left: `φ(α⊗β)(v⊗w) = α(v β(w))`, `ψ(γ) = Σ_i γ(−⊗w_i) ⊗ ^*w_i`.
/// Right: `φ(α⊗β)(v⊗w) = β(α(v) w)`, `ψ(γ) = Σ_i ^*v_i ⊗ γ(v_i⊗−)`.
pub fn dual_tensor_iso(v: &Bimodule, w: &Bimodule, side: Side) -> Result<(BimoduleMap, BimoduleMap)> {
    same_base(&v.base, &w.base)?;
    let field = v.field();
    let dv = left_dual(v);
    let dw = left_dual(w);
    let vw = tensor(v, w)?;
    let d_tensor = Arc::new(tensor(&dv, &dw)?);
    let d_of_tensor = Arc::new(left_dual(&vw));

    // Value of the functional on v ⊗ w, as a coefficient of the idempotent it lands on.
    let pair_value = |alpha: &Label, beta: &Label, x: &Label, y: &Label| -> Option<Scalar> {
        match side {
            Side::Left => {
                let (e, c1) = evaluate(w, beta, y, Side::Left)?;
                let ((_, right_of_x), _) = v.locate(x)?;
                if right_of_x != e {
                    return None;
                }
                let (_, c2) = evaluate(v, alpha, x, Side::Left)?;
                Some(field.mul(&c1, &c2))
            }
            Side::Right => {
                let (e, c1) = evaluate(v, alpha, x, Side::Right)?;
                let ((left_of_y, _), _) = w.locate(y)?;
                if left_of_y != e {
                    return None;
                }
                let (_, c2) = evaluate(w, beta, y, Side::Right)?;
                Some(field.mul(&c1, &c2))
            }
        }
    };

    let mut phi_cols: BTreeMap<BlockKey, Vec<SparseVec>> = d_tensor
        .blocks()
        .map(|(k, b)| (k, vec![Vec::new(); b.len()]))
        .collect();
    for (key, alpha, beta) in chained_pairs(&dv, &dw) {
        let (_, col) = d_tensor.locate(&Label::tensor(&[alpha, beta])).expect("basis pair");
        let mut entries = Vec::new();
        for (k2, x, y) in chained_pairs(v, w) {
            if k2 != key {
                continue;
            }
            if let Some(c) = pair_value(alpha, beta, x, y) {
                let gamma = Label::tensor(&[x, y]).dual();
                entries.push((d_of_tensor.locate(&gamma).expect("dual basis").1, c));
            }
        }
        phi_cols.get_mut(&key).expect("block")[col] = accumulate(entries, field);
    }
    let phi = BimoduleMap::from_blocks(
        d_tensor.clone(),
        d_of_tensor.clone(),
        phi_cols
            .into_iter()
            .map(|(k, c)| (k, SparseMatrix::from_clean_columns(d_of_tensor.block_dim(k), c)))
            .collect(),
    )?;

    let psi = BimoduleMap::from_fn(d_of_tensor.clone(), d_tensor.clone(), |gamma| {
        let mut out = Vec::new();
        let (key, _) = d_of_tensor.locate(gamma).expect("basis");
        for (k2, x, y) in chained_pairs(v, w) {
            if k2 != key || Label::tensor(&[x, y]).dual() != *gamma {
                continue;
            }
            // γ(x' ⊗ y') is 1 exactly on the pair (x, y) it is dual to.
            out.push((Label::tensor(&[&x.dual(), &y.dual()]), field.one()));
        }
        Ok(out)
    })?;
    Ok((phi, psi))
}

/// A subspace of each block of a bimodule.
#[derive(Clone, Debug)]
pub struct SubBimodule {
    ambient: Arc<Bimodule>,
    blocks: BTreeMap<BlockKey, Subspace>,
}

impl SubBimodule {
    /// Validates shapes; missing blocks are zero.
    pub fn new(ambient: Arc<Bimodule>, blocks: BTreeMap<BlockKey, Subspace>) -> Result<Self> {
        for (k, s) in &blocks {
            if s.ambient_dim() != ambient.block_dim(*k) {
                return Err(Error::InvalidStructure(format!("subspace of block {k:?} has wrong ambient")));
            }
        }
        Ok(SubBimodule { ambient, blocks })
    }

    /// Span of label combinations.
    pub fn span(ambient: Arc<Bimodule>, vectors: &[Vec<(Label, Scalar)>]) -> Result<Self> {
        let f = ambient.field();
        let mut per_block: BTreeMap<BlockKey, Vec<SparseVec>> = BTreeMap::new();
        for v in vectors {
            let Some((first, _)) = v.iter().find(|(_, x)| !x.is_zero()) else {
                continue;
            };
            let (key, _) = ambient.locate(first).ok_or_else(|| Error::MissingLabel {
                label: first.to_string(),
                s: 0,
                t: 0,
            })?;
            per_block.entry(key).or_default().push(ambient.coordinates(key, v)?);
        }
        let mut blocks = BTreeMap::new();
        for (k, vs) in per_block {
            blocks.insert(k, Subspace::span(ambient.block_dim(k), &vs, f)?);
        }
        Ok(SubBimodule { ambient, blocks })
    }

    pub fn zero(ambient: Arc<Bimodule>) -> Self {
        SubBimodule {
            ambient,
            blocks: BTreeMap::new(),
        }
    }

    pub fn full(ambient: Arc<Bimodule>) -> Self {
        let blocks = ambient
            .blocks()
            .map(|(k, b)| (k, Subspace::full(b.len())))
            .collect();
        SubBimodule { ambient, blocks }
    }

    pub fn ambient(&self) -> &Arc<Bimodule> {
        &self.ambient
    }

    pub fn block(&self, key: BlockKey) -> Subspace {
        self.blocks
            .get(&key)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.ambient.block_dim(key)))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (BlockKey, &Subspace)> + '_ {
        self.blocks.iter().map(|(k, s)| (*k, s))
    }

    pub fn dim(&self) -> usize {
        self.blocks.values().map(Subspace::dim).sum()
    }

    pub fn block_dim(&self, key: BlockKey) -> usize {
        self.blocks.get(&key).map_or(0, Subspace::dim)
    }

    /// Basis vectors as label combinations.
    pub fn vectors(&self) -> Vec<(BlockKey, Vec<(Label, Scalar)>)> {
        self.blocks
            .iter()
            .flat_map(|(k, s)| {
                s.vectors()
                    .iter()
                    .map(move |v| (*k, self.ambient.combination(*k, v)))
            })
            .collect()
    }

    pub fn contains(&self, other: &SubBimodule) -> Result<bool> {
        let f = self.ambient.field();
        for (k, s) in &other.blocks {
            if s.dim() > 0 && !self.block(*k).contains_subspace(s, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_span(&self, other: &SubBimodule) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains(other)?)
    }

    pub fn sum(parts: &[SubBimodule]) -> Result<SubBimodule> {
        let ambient = parts
            .first()
            .ok_or_else(|| Error::InvalidStructure("sum of no subspaces".into()))?
            .ambient
            .clone();
        let f = ambient.field();
        let mut blocks = BTreeMap::new();
        for (k, b) in ambient.blocks() {
            let subs: Vec<&Subspace> = parts.iter().filter_map(|p| p.blocks.get(&k)).collect();
            if !subs.is_empty() {
                blocks.insert(k, Subspace::sum(&subs, b.len(), f)?);
            }
        }
        Ok(SubBimodule { ambient, blocks })
    }

    pub fn intersect(parts: &[SubBimodule]) -> Result<SubBimodule> {
        let ambient = parts
            .first()
            .ok_or_else(|| Error::InvalidStructure("intersection of no subspaces".into()))?
            .ambient
            .clone();
        let f = ambient.field();
        let mut blocks = BTreeMap::new();
        for (k, _) in ambient.blocks() {
            let subs: Vec<Subspace> = parts.iter().map(|p| p.block(k)).collect();
            blocks.insert(k, linalg::intersect(&subs, f)?);
        }
        Ok(SubBimodule { ambient, blocks })
    }

    /// `X ⊗ self ⊗ Y` inside `X ⊗ ambient ⊗ Y`, where `left` and `right` are full spaces.
    pub fn sandwich(&self, left: &Bimodule, right: &Bimodule, target: Arc<Bimodule>) -> Result<SubBimodule> {
        let f = self.ambient.field();
        let mut per_block: BTreeMap<BlockKey, Vec<SparseVec>> = BTreeMap::new();
        for (key, s) in &self.blocks {
            for v in s.vectors() {
                let combo = self.ambient.combination(*key, v);
                for ((l, _), lb) in left.blocks().filter(|((_, t), _)| *t == key.0) {
                    for ((_, r), rb) in right.row_blocks(key.1) {
                        for a in lb.labels() {
                            for b in rb.labels() {
                                let img: Vec<(Label, Scalar)> = combo
                                    .iter()
                                    .map(|(x, c)| (Label::tensor(&[a, x, b]), c.clone()))
                                    .collect();
                                per_block
                                    .entry((l, r))
                                    .or_default()
                                    .push(target.coordinates((l, r), &img)?);
                            }
                        }
                    }
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for (k, vs) in per_block {
            blocks.insert(k, Subspace::span(target.block_dim(k), &vs, f)?);
        }
        Ok(SubBimodule {
            ambient: target,
            blocks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: usize) -> Arc<BaseRing> {
        BaseRing::new((0..n).map(|i| i.to_string()).collect(), FieldSpec::Rationals).unwrap()
    }

    fn single(b: &Arc<BaseRing>, key: BlockKey, name: &str) -> Bimodule {
        Bimodule::new(b.clone(), [(key, vec![Label::atom(name)])]).unwrap()
    }

    #[test]
    fn tensor_matches_middle_index() {
        let b = base(3);
        let v = single(&b, (0, 1), "v");
        let w = single(&b, (1, 2), "w");
        let vw = tensor(&v, &w).unwrap();
        assert_eq!(vw.block_dim((0, 2)), 1);
        assert_eq!(vw.dim(), 1);
        let w2 = single(&b, (2, 2), "w");
        assert!(tensor(&v, &w2).unwrap().is_zero());
        let other = base(3);
        let foreign = BaseRing::new(vec!["p".into()], FieldSpec::Rationals).unwrap();
        assert!(tensor(&v, &single(&foreign, (0, 0), "x")).is_err());
        assert!(tensor(&v, &single(&other, (1, 2), "w")).is_ok());
    }

    #[test]
    fn powers_and_units() {
        let b = base(2);
        let v = single(&b, (0, 1), "v");
        let r = tensor_power(&v, 0);
        assert_eq!(r, Bimodule::regular(b.clone()));
        assert_eq!(tensor_power(&v, 1), v);
        assert!(tensor_power(&v, 2).is_zero());
        let rv = tensor(&r, &v).unwrap();
        assert_eq!(rv, v);
    }

    #[test]
    fn duals_and_phi_psi() {
        let b = base(2);
        let v = Bimodule::new(
            b.clone(),
            [((0, 1), vec![Label::atom("a"), Label::atom("b")]), ((1, 1), vec![Label::atom("c")])],
        )
        .unwrap();
        let dv = left_dual(&v);
        assert_eq!(dv.block_dim((0, 1)), 2);
        assert_eq!(left_dual(&Bimodule::zero(b.clone())), Bimodule::zero(b.clone()));
        for side in [Side::Left, Side::Right] {
            let (phi, psi) = dual_tensor_iso(&v, &v, side).unwrap();
            let id1 = BimoduleMap::identity(phi.source().clone());
            let id2 = BimoduleMap::identity(phi.target().clone());
            assert!(phi.compose(&psi).unwrap().same_as(&id2));
            assert!(psi.compose(&phi).unwrap().same_as(&id1));
        }
    }

    #[test]
    fn tensor_map_functorial() {
        let b = base(2);
        let v = Arc::new(
            Bimodule::new(b.clone(), [((0, 1), vec![Label::atom("a"), Label::atom("b")])]).unwrap(),
        );
        let w = Arc::new(single(&b, (1, 1), "c"));
        let f = BimoduleMap::from_blocks(
            v.clone(),
            v.clone(),
            [((0, 1), SparseMatrix::from_dense(&[vec![1, 2], vec![0, 1]]))].into(),
        )
        .unwrap();
        let id = BimoduleMap::identity(w.clone());
        let ff = f.compose(&f).unwrap();
        let lhs = tensor_map(&f, &id).unwrap().compose(&tensor_map(&f, &id).unwrap()).unwrap();
        assert!(lhs.same_as(&tensor_map(&ff, &id).unwrap()));
        let zero = BimoduleMap::zero(w.clone(), w.clone());
        assert!(tensor_map(&f, &zero).unwrap().is_zero());
    }
}
