//! Incremental reduced row echelon form with generator tracking.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::field::{FieldSpec, Scalar};
use super::sparse::{accumulate, SparseVec};

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    combo: SparseVec,
}

/// Fully reduced echelon basis of the span of inserted generators.
///
/// Every stored row has leading coefficient 1 at its pivot and no entry in any
/// other pivot column. `combo` expresses the row in terms of generator ids.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    dim: usize,
    pivots: BTreeMap<usize, usize>,
    rows: Vec<Row>,
    generators: usize,
}

impl Echelon {
    pub fn new(dim: usize, field: FieldSpec) -> Self {
        Echelon {
            field,
            dim,
            pivots: BTreeMap::new(),
            rows: Vec::new(),
            generators: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Reduced row with the given pivot.
    pub fn pivot_row(&self, col: usize) -> Option<&[(usize, Scalar)]> {
        self.pivots.get(&col).map(|&r| self.rows[r].vec.as_slice())
    }

    /// Remainder of `v` modulo the span, plus generator coefficients `c` with
    /// `v = remainder + Σ c_g · generator_g`.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> (SparseVec, SparseVec) {
        let f = self.field;
        let hits: Vec<(usize, &Scalar)> = v
            .iter()
            .filter_map(|(c, x)| self.pivots.get(c).map(|&r| (r, x)))
            .collect();
        if hits.is_empty() {
            return (v.to_vec(), Vec::new());
        }
        let rem = accumulate(
            v.iter().cloned().chain(hits.iter().flat_map(|&(r, x)| {
                let nx = f.neg(x);
                self.rows[r].vec.iter().map(move |(c, y)| (*c, f.mul(y, &nx)))
            })),
            f,
        );
        let combo = accumulate(
            hits.iter().flat_map(|&(r, x)| {
                self.rows[r].combo.iter().map(move |(g, y)| (*g, f.mul(y, x)))
            }),
            f,
        );
        (rem, combo)
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Adds a generator; returns its new pivot column when it enlarges the span.
    pub fn insert(&mut self, v: &[(usize, Scalar)]) -> Option<usize> {
        let f = self.field;
        let id = self.generators;
        self.generators += 1;
        let (rem, combo) = self.reduce(v);
        let (lead, lead_val) = rem.first()?.clone();
        let scale = f.inv(&lead_val).expect("nonzero leading entry");
        let combo = accumulate(
            std::iter::once((id, f.one()))
                .chain(combo.into_iter().map(|(g, x)| (g, f.neg(&x))))
                .map(|(g, x)| (g, f.mul(&x, &scale))),
            f,
        );
        let vec: SparseVec = rem.into_iter().map(|(c, x)| (c, f.mul(&x, &scale))).collect();
        for row in &mut self.rows {
            let Ok(k) = row.vec.binary_search_by_key(&lead, |(c, _)| *c) else {
                continue;
            };
            let factor = f.neg(&row.vec[k].1);
            row.vec = accumulate(
                row.vec
                    .iter()
                    .cloned()
                    .chain(vec.iter().map(|(c, x)| (*c, f.mul(x, &factor)))),
                f,
            );
            row.combo = accumulate(
                row.combo
                    .iter()
                    .cloned()
                    .chain(combo.iter().map(|(g, x)| (*g, f.mul(x, &factor)))),
                f,
            );
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(Row { vec, combo });
        Some(lead)
    }

    /// Canonical null-space basis of the matrix whose rows were inserted.
    pub fn null_space(&self) -> Vec<SparseVec> {
        let f = self.field;
        let mut out = Vec::new();
        for free in (0..self.dim).filter(|c| !self.pivots.contains_key(c)) {
            let mut v: SparseVec = vec![(free, f.one())];
            for (&pc, &r) in &self.pivots {
                let row = &self.rows[r].vec;
                if let Ok(k) = row.binary_search_by_key(&free, |(c, _)| *c) {
                    let x = f.neg(&row[k].1);
                    if !x.is_zero() {
                        v.push((pc, x));
                    }
                }
            }
            v.sort_by_key(|(c, _)| *c);
            out.push(v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: i64) -> Scalar {
        Scalar::from_integer(BigInt::from(v))
    }

    #[test]
    fn tracks_coordinates() {
        let f = FieldSpec::Rationals;
        let mut e = Echelon::new(3, f);
        assert_eq!(e.insert(&[(0, q(1)), (1, q(1))]), Some(0));
        assert_eq!(e.insert(&[(1, q(2)), (2, q(2))]), Some(1));
        assert_eq!(e.insert(&[(0, q(1)), (2, q(-1))]), None);
        let v = vec![(0, q(3)), (1, q(5)), (2, q(2))];
        let (rem, combo) = e.reduce(&v);
        assert!(rem.is_empty());
        assert_eq!(combo, vec![(0, q(3)), (1, q(1))]);
        assert_eq!(e.null_space(), vec![vec![(0, q(1)), (1, q(-1)), (2, q(1))]]);
    }
}
