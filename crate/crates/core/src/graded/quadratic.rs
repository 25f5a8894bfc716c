use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::coring::{GradedCoring, SplitTerm};
use super::ring::GradedRing;
use crate::bimodule::{tensor, tensor_power, Bimodule, BlockKey, SubBimodule};
use crate::error::{Error, Result};
use crate::label::{collect_terms, Combination, Label};
use crate::linalg::{Echelon, FieldSpec};

/// A bimodule `V` with a sub-bimodule `W ⊆ V ⊗ V`.
#[derive(Clone, Debug)]
pub struct QuadraticData {
    v: Arc<Bimodule>,
    w: SubBimodule,
}

impl QuadraticData {
    pub fn new(v: Arc<Bimodule>, w: SubBimodule) -> Result<Self> {
        let vv = tensor(&v, &v)?;
        if **w.ambient() != vv {
            return Err(Error::InvalidStructure("relations must live in V ⊗ V".into()));
        }
        if v.basis().any(|(_, l)| matches!(l, Label::Idem(_) | Label::Tensor(_) | Label::Word(_))) {
            return Err(Error::InvalidStructure("generators must be atomic labels".into()));
        }
        Ok(QuadraticData { v, w })
    }

    pub fn v(&self) -> &Arc<Bimodule> {
        &self.v
    }

    pub fn w(&self) -> &SubBimodule {
        &self.w
    }

    fn field(&self) -> FieldSpec {
        self.v.field()
    }

    /// The pieces `V^{(i−1)} ⊗ W ⊗ V^{(n−i−1)}`, `1 ≤ i ≤ n−1`, inside `V^{(n)}`.
    fn pieces(&self, n: usize, vn: &Arc<Bimodule>) -> Result<Vec<SubBimodule>> {
        (1..n)
            .map(|i| {
                self.w.sandwich(
                    &tensor_power(&self.v, i - 1),
                    &tensor_power(&self.v, n - i - 1),
                    vn.clone(),
                )
            })
            .collect()
    }

    /// `⟨W⟩^n = Σ_i V^{(i−1)} ⊗ W ⊗ V^{(n−i−1)}`.
    pub fn ideal_component(&self, n: usize) -> Result<SubBimodule> {
        let vn = Arc::new(tensor_power(&self.v, n));
        if n < 2 {
            return Ok(SubBimodule::zero(vn));
        }
        SubBimodule::sum(&self.pieces(n, &vn)?)
    }

    /// `{V,W}_n = ⋂_i V^{(i−1)} ⊗ W ⊗ V^{(n−i−1)}`.
    pub fn coideal_component(&self, n: usize) -> Result<SubBimodule> {
        let vn = Arc::new(tensor_power(&self.v, n));
        if n < 2 {
            return Ok(SubBimodule::full(vn));
        }
        SubBimodule::intersect(&self.pieces(n, &vn)?)
    }
}

/// Largest `n` with `V^{(n)} ≠ 0`, or `None` when the block quiver of `V` has a cycle.
pub fn tensor_nilpotency(v: &Bimodule) -> Option<usize> {
    let n = v.base().size();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for ((s, t), _) in v.blocks() {
        succ[s as usize].push(t as usize);
    }
    // Longest path by memoized DFS; state 1 = on stack.
    fn visit(x: usize, succ: &[Vec<usize>], state: &mut [u8], best: &mut [usize]) -> bool {
        match state[x] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        state[x] = 1;
        let mut b = 0;
        for &y in &succ[x] {
            if !visit(y, succ, state, best) {
                return false;
            }
            b = b.max(best[y] + 1);
        }
        best[x] = b;
        state[x] = 2;
        true
    }
    let mut state = vec![0u8; n];
    let mut best = vec![0usize; n];
    for x in 0..n {
        if !visit(x, &succ, &mut state, &mut best) {
            return None;
        }
    }
    best.into_iter().max()
}

fn degree_range(v: &Bimodule, top: usize) -> (usize, bool) {
    match tensor_nilpotency(v) {
        Some(r) if r <= top => (r, true),
        _ => (top, false),
    }
}

fn word(letters: &[Label]) -> Label {
    match letters.len() {
        1 => letters[0].clone(),
        _ => Label::Word(letters.into()),
    }
}

/// `⟨V,W⟩ = T(V)/⟨W⟩` in degrees up to `top`.
///
/// Degree `n` is spanned by the monomials of `V^{(n)}` that are not pivots of the
/// reduced echelon form of `⟨W⟩^n` in label order; products concatenate and
/// reduce to that normal form.
pub fn quadratic_ring_of(data: &QuadraticData, top: usize) -> Result<GradedRing> {
    let f = data.field();
    let base = data.v.base().clone();
    let (last, complete) = degree_range(&data.v, top);
    let mut powers: Vec<Arc<Bimodule>> = vec![Arc::new(tensor_power(&data.v, 0)), data.v.clone()];
    let mut reducers: Vec<BTreeMap<BlockKey, Echelon>> = vec![BTreeMap::new(), BTreeMap::new()];
    let mut positive = vec![(*data.v).clone()];
    for n in 2..=last {
        let ideal = data.ideal_component(n)?;
        let vn = ideal.ambient().clone();
        let mut echelons = BTreeMap::new();
        let mut blocks = Vec::new();
        for (key, basis) in vn.blocks() {
            let e = ideal.block(key).echelon(f);
            let labels = basis
                .labels()
                .iter()
                .enumerate()
                .filter(|(i, _)| !e.is_pivot(*i))
                .map(|(_, l)| word(l.factors()))
                .collect();
            blocks.push((key, labels));
            echelons.insert(key, e);
        }
        positive.push(Bimodule::new(base.clone(), blocks)?);
        powers.push(vn);
        reducers.push(echelons);
    }
    GradedRing::new(
        base,
        positive,
        |a, b| {
            let letters: Vec<Label> = a.letters().iter().chain(b.letters()).cloned().collect();
            let n = letters.len();
            let m = Label::tensor(&letters.iter().collect::<Vec<_>>());
            let (key, idx) = powers[n].locate(&m).expect("monomial of V^(n)");
            let (rem, _) = reducers[n][&key].reduce(&[(idx, f.one())]);
            let labels = powers[n].block_labels(key);
            Ok(rem.into_iter().map(|(i, x)| (word(labels[i].factors()), x)).collect())
        },
        complete,
    )
}

/// `{V,W}` in degrees up to `top`, with deconcatenation as comultiplication.
///
/// Degree `n ≥ 2` is spanned by the reduced echelon basis of `{V,W}_n ⊆ V^{(n)}`;
/// basis vectors are named `{prefix}{n}[s,t]#i`.
pub fn quadratic_coring_of(data: &QuadraticData, top: usize, prefix: &str) -> Result<GradedCoring> {
    let f = data.field();
    let base = data.v.base().clone();
    let (last, complete) = degree_range(&data.v, top);
    let mut embedding: HashMap<Label, Combination> = data
        .v
        .basis()
        .map(|(_, l)| (l.clone(), vec![(l.clone(), f.one())]))
        .collect();
    let mut positive = vec![(*data.v).clone()];
    let mut powers: Vec<Arc<Bimodule>> = vec![Arc::new(tensor_power(&data.v, 0)), data.v.clone()];
    for n in 2..=last {
        let sub = data.coideal_component(n)?;
        let vn = sub.ambient().clone();
        powers.push(vn.clone());
        let mut blocks = Vec::new();
        for (key, space) in sub.blocks() {
            let e = space.echelon(f);
            let mut labels = Vec::new();
            for (i, col) in e.pivot_columns().enumerate() {
                let l = Label::atom(format!(
                    "{prefix}{n}[{},{}]#{i}",
                    base.name(key.0),
                    base.name(key.1)
                ));
                let row = e.pivot_row(col).expect("pivot row");
                embedding.insert(l.clone(), vn.combination(key, row));
                labels.push(l);
            }
            blocks.push((key, labels));
        }
        positive.push(Bimodule::new(base.clone(), blocks)?);
    }
    let comps: Vec<Arc<Bimodule>> = positive.iter().cloned().map(Arc::new).collect();
    let degree: HashMap<Label, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.basis().map(move |(_, l)| (l.clone(), i + 1)))
        .collect();

    // Per (p, q, block): the vectors emb(y) ⊗ emb(z) as generators, in a fixed order.
    let mut cache: HashMap<(usize, BlockKey), (Echelon, Vec<(Label, Label)>)> = HashMap::new();
    let mut split = |c: &Label, p: usize| -> Result<Vec<SplitTerm>> {
        let n = degree[c];
        let q = n - p;
        let (key, _) = comps[n - 1].locate(c).expect("component label");
        let vn = &powers[n];
        if !cache.contains_key(&(p, key)) {
            let mut e = Echelon::new(vn.block_dim(key), f);
            let mut gens = Vec::new();
            for ((_, t), yb) in comps[p - 1].row_blocks(key.0) {
                let Some(zb) = comps[q - 1].block((t, key.1)) else {
                    continue;
                };
                for y in yb.labels() {
                    for z in zb.labels() {
                        let prod = collect_terms(
                            embedding[y].iter().flat_map(|(a, x)| {
                                embedding[z]
                                    .iter()
                                    .map(move |(b, w)| (Label::tensor(&[a, b]), f.mul(x, w)))
                            }),
                            f,
                        );
                        e.insert(&vn.coordinates(key, &prod)?);
                        gens.push((y.clone(), z.clone()));
                    }
                }
            }
            cache.insert((p, key), (e, gens));
        }
        let (e, gens) = &cache[&(p, key)];
        let (rem, coeffs) = e.reduce(&vn.coordinates(key, &embedding[c])?);
        if !rem.is_empty() {
            return Err(Error::Invariant(format!(
                "deconcatenation of {c} leaves C_{p} ⊗ C_{q}"
            )));
        }
        Ok(coeffs
            .into_iter()
            .map(|(g, x)| (gens[g].0.clone(), gens[g].1.clone(), x))
            .collect())
    };
    GradedCoring::new(base, positive, &mut split, complete)
}

/// Degree cap for shriek structures: the nilpotency degree of the generators
/// when their tensor ring is nilpotent, so the result is complete; otherwise
/// `max(2·top, 4)` and the result is a truncation.
fn shriek_cap(v: &Bimodule, top: usize) -> usize {
    tensor_nilpotency(v).unwrap_or((2 * top).max(4))
}

/// `A^! = {A^1, Ker μ^{1,1}}`.
pub fn shriek_of_ring(a: &GradedRing) -> Result<GradedCoring> {
    shriek_of_ring_with_cap(a, shriek_cap(&a.component(1), a.top_degree()))
}

/// `A^!` computed in degrees at most `cap` when `(A^1)^{(n)}` never vanishes.
pub fn shriek_of_ring_with_cap(a: &GradedRing, cap: usize) -> Result<GradedCoring> {
    let kernel = a.mult(1, 1)?.kernel()?;
    let data = QuadraticData::new(a.component(1), kernel)?;
    quadratic_coring_of(&data, cap, "!")
}

/// `C^! = ⟨C_1, Im Δ_{1,1}⟩`.
pub fn shriek_of_coring(c: &GradedCoring) -> Result<GradedRing> {
    shriek_of_coring_with_cap(c, shriek_cap(&c.component(1), c.top_degree()))
}

pub fn shriek_of_coring_with_cap(c: &GradedCoring, cap: usize) -> Result<GradedRing> {
    let image = c.comult(1, 1)?.image()?;
    let data = QuadraticData::new(c.component(1), image)?;
    quadratic_ring_of(&data, cap)
}
