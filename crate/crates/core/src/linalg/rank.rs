//! Rank by sparse elimination with minimal-fill pivoting.
//!
//! Over the rationals every vector is first scaled to integers, then eliminated
//! fraction-free in `i64` with checked arithmetic, falling back to `BigInt` on
//! overflow. Over a prime field residues live in `u64`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::field::{inv_mod, mul_mod, to_residue, FieldSpec, Scalar};
use super::sparse::SparseMatrix;
use crate::error::LinalgError;

type Row<E> = Vec<(usize, E)>;

trait Pivoting {
    type E: Clone;
    /// `target` with column `col` eliminated against `pivot`; `None` on overflow.
    fn combine(&self, target: &Row<Self::E>, pivot: &Row<Self::E>, col: usize) -> Option<Row<Self::E>>;
}

fn entry<E>(row: &Row<E>, col: usize) -> &E {
    let k = row.binary_search_by_key(&col, |(c, _)| *c).expect("column present");
    &row[k].1
}

struct ModP(u64);

impl Pivoting for ModP {
    type E = u64;
    fn combine(&self, target: &Row<u64>, pivot: &Row<u64>, col: usize) -> Option<Row<u64>> {
        let p = self.0;
        let factor = mul_mod(*entry(target, col), inv_mod(*entry(pivot, col), p), p);
        let neg = p - factor;
        merge(
            target,
            pivot,
            Some,
            |q| Some(mul_mod(q, neg, p)),
            |t, q| Some(((t as u128 + mul_mod(q, neg, p) as u128) % p as u128) as u64),
            |x| *x == 0,
        )
    }
}

struct Small;

impl Pivoting for Small {
    type E = i64;
    fn combine(&self, target: &Row<i64>, pivot: &Row<i64>, col: usize) -> Option<Row<i64>> {
        let a = *entry(pivot, col);
        let b = *entry(target, col);
        let g = a.gcd(&b);
        let (a, b) = (a / g, b / g);
        let mut out = merge(
            target,
            pivot,
            |t| t.checked_mul(a),
            |q| q.checked_mul(b)?.checked_neg(),
            |t, q| t.checked_mul(a)?.checked_sub(q.checked_mul(b)?),
            |x| *x == 0,
        )?;
        let content = out.iter().fold(0i64, |g, (_, v)| g.gcd(v));
        if content > 1 {
            for (_, v) in &mut out {
                *v /= content;
            }
        }
        Some(out)
    }
}

struct Big;

impl Pivoting for Big {
    type E = BigInt;
    fn combine(&self, target: &Row<BigInt>, pivot: &Row<BigInt>, col: usize) -> Option<Row<BigInt>> {
        let a = entry(pivot, col);
        let b = entry(target, col);
        let g = a.gcd(b);
        let (a, b) = (a / &g, b / &g);
        let mut out = merge(
            target,
            pivot,
            |t| Some(t * &a),
            |q| Some(-(q * &b)),
            |t, q| Some(t * &a - q * &b),
            |x| x.is_zero(),
        )?;
        let content = out.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
        if content > BigInt::one() {
            for (_, v) in &mut out {
                *v = &*v / &content;
            }
        }
        Some(out)
    }
}

/// Merge of two sorted rows with per-side and shared combinators.
fn merge<E: Clone>(
    t: &Row<E>,
    p: &Row<E>,
    only_t: impl Fn(E) -> Option<E>,
    only_p: impl Fn(E) -> Option<E>,
    both: impl Fn(E, E) -> Option<E>,
    is_zero: impl Fn(&E) -> bool,
) -> Option<Row<E>> {
    let mut out = Vec::with_capacity(t.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < t.len() || j < p.len() {
        let (c, v) = if j == p.len() || (i < t.len() && t[i].0 < p[j].0) {
            i += 1;
            (t[i - 1].0, only_t(t[i - 1].1.clone())?)
        } else if i == t.len() || p[j].0 < t[i].0 {
            j += 1;
            (p[j - 1].0, only_p(p[j - 1].1.clone())?)
        } else {
            i += 1;
            j += 1;
            (t[i - 1].0, both(t[i - 1].1.clone(), p[j - 1].1.clone())?)
        };
        if !is_zero(&v) {
            out.push((c, v));
        }
    }
    Some(out)
}

fn markowitz<P: Pivoting>(piv: &P, mut rows: Vec<Row<P::E>>, ncols: usize) -> Option<usize> {
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    let mut alive: BTreeSet<usize> = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        if !r.is_empty() {
            alive.insert(i);
            for (c, _) in r {
                col_rows[*c].insert(i);
            }
        }
    }
    let mut rank = 0;
    while !alive.is_empty() {
        let r = *alive
            .iter()
            .min_by_key(|&&i| (rows[i].len(), i))
            .expect("nonempty");
        let c = rows[r]
            .iter()
            .map(|(c, _)| *c)
            .min_by_key(|&c| (col_rows[c].len(), c))
            .expect("nonempty row");
        alive.remove(&r);
        for (cc, _) in &rows[r] {
            col_rows[*cc].remove(&r);
        }
        let targets: Vec<usize> = col_rows[c].iter().copied().collect();
        for t in targets {
            let new = piv.combine(&rows[t], &rows[r], c)?;
            for (cc, _) in &rows[t] {
                col_rows[*cc].remove(&t);
            }
            for (cc, _) in &new {
                col_rows[*cc].insert(t);
            }
            if new.is_empty() {
                alive.remove(&t);
            }
            rows[t] = new;
        }
        rank += 1;
    }
    Some(rank)
}

/// Rank of `m` over `field`.
pub fn rank(m: &SparseMatrix, field: FieldSpec) -> Result<usize, LinalgError> {
    if m.is_zero() {
        return Ok(0);
    }
    // Eliminate along the shorter side.
    let (vectors, ncols) = if m.cols() <= m.rows() {
        (m.columns().to_vec(), m.rows())
    } else {
        (m.row_vectors(), m.cols())
    };
    match field {
        FieldSpec::PrimeField(p) => {
            let mut rows = Vec::with_capacity(vectors.len());
            for v in &vectors {
                let mut row = Vec::with_capacity(v.len());
                for (c, x) in v {
                    let r = to_residue(x, p)?;
                    if r != 0 {
                        row.push((*c, r));
                    }
                }
                rows.push(row);
            }
            Ok(markowitz(&ModP(p), rows, ncols).expect("modular elimination cannot overflow"))
        }
        FieldSpec::Rationals => {
            let big: Vec<Row<BigInt>> = vectors.iter().map(|v| integral(v)).collect();
            let small: Option<Vec<Row<i64>>> = big
                .iter()
                .map(|r| r.iter().map(|(c, x)| x.to_i64().map(|v| (*c, v))).collect())
                .collect();
            if let Some(small) = small {
                if let Some(r) = markowitz(&Small, small, ncols) {
                    return Ok(r);
                }
            }
            Ok(markowitz(&Big, big, ncols).expect("bigint elimination cannot overflow"))
        }
    }
}

/// Scales a rational vector to a primitive integer vector.
fn integral(v: &[(usize, Scalar)]) -> Row<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
    let row: Row<BigInt> = v
        .iter()
        .map(|(c, x)| (*c, (x * Scalar::from_integer(l.clone())).to_integer()))
        .collect();
    let g = row.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if g > BigInt::one() {
        row.into_iter().map(|(c, x)| (c, x / &g)).collect()
    } else {
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        let f = FieldSpec::Rationals;
        assert_eq!(rank(&SparseMatrix::zeros(3, 4), f).unwrap(), 0);
        assert_eq!(rank(&SparseMatrix::identity(3), f).unwrap(), 3);
        assert_eq!(rank(&SparseMatrix::from_dense(&[vec![1], vec![1]]), f).unwrap(), 1);
        let m = SparseMatrix::from_dense(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(rank(&m, f).unwrap(), 2);
        assert_eq!(rank(&m, FieldSpec::PrimeField(3)).unwrap(), 1);
        let m = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank(&m, FieldSpec::PrimeField(2)).unwrap(), 1);
        assert_eq!(rank(&m, FieldSpec::PrimeField(5)).unwrap(), 2);
    }

    #[test]
    fn overflow_falls_back() {
        let big = i64::MAX / 3;
        let m = SparseMatrix::from_dense(&[vec![big, big - 1, 1], vec![big - 7, big, 3], vec![5, big - 2, big]]);
        assert_eq!(rank(&m, FieldSpec::Rationals).unwrap(), 3);
    }
}
