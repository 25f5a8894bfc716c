use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::field::{FieldSpec, Scalar};
use crate::error::LinalgError;

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Sums duplicate indices and drops zeros.
pub fn accumulate<I>(entries: I, field: FieldSpec) -> SparseVec
where
    I: IntoIterator<Item = (usize, Scalar)>,
{
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, v) in entries {
        let slot = acc.entry(i).or_insert_with(Scalar::zero);
        *slot = field.add(slot, &v);
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Column-compressed sparse matrix over exact scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i, Scalar::from_integer(1.into()))]).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; zeros are dropped, repeats rejected.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut columns: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::Dimension(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if columns[c].insert(r, v).is_some() {
                return Err(LinalgError::DuplicateEntry { row: r, col: c });
            }
        }
        Ok(SparseMatrix {
            rows,
            cols,
            columns: columns
                .into_iter()
                .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        })
    }

    /// Builds from integer rows; convenient for small literal matrices.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let triplets = rows.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            row.iter()
                .enumerate()
                .map(move |(c, &v)| (r, c, Scalar::from_integer(BigInt::from(v))))
        });
        Self::from_triplets(nrows, ncols, triplets).expect("dense input is well formed")
    }

    /// Builds from columns, each of which is accumulated and cleaned.
    pub fn from_columns(rows: usize, columns: Vec<SparseVec>, field: FieldSpec) -> Result<Self, LinalgError> {
        let cols = columns.len();
        let mut out = Vec::with_capacity(cols);
        for col in columns {
            let col = accumulate(col, field);
            if let Some((r, _)) = col.last() {
                if *r >= rows {
                    return Err(LinalgError::Dimension(format!("row {r} outside {rows}")));
                }
            }
            out.push(col);
        }
        Ok(SparseMatrix {
            rows,
            cols,
            columns: out,
        })
    }

    pub(crate) fn from_clean_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c
            .windows(2)
            .all(|w| w[0].0 < w[1].0)
            && c.iter().all(|(r, v)| *r < rows && !v.is_zero())));
        SparseMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, Scalar)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.columns[c]
            .binary_search_by_key(&r, |(i, _)| *i)
            .map(|k| self.columns[c][k].1.clone())
            .unwrap_or_else(|_| Scalar::zero())
    }

    /// All entries as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// Rows as sparse vectors.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (r, c, v) in self.triplets() {
            rows[r].push((c, v.clone()));
        }
        rows
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: self.row_vectors(),
        }
    }

    pub fn apply(&self, v: &[(usize, Scalar)], field: FieldSpec) -> SparseVec {
        accumulate(
            v.iter().flat_map(|(j, x)| {
                self.columns[*j]
                    .iter()
                    .map(move |(i, a)| (*i, field.mul(a, x)))
            }),
            field,
        )
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix, field: FieldSpec) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other.columns.iter().map(|c| self.apply(c, field)).collect();
        Ok(SparseMatrix::from_clean_columns(self.rows, columns))
    }

    pub fn scale(&self, s: &Scalar, field: FieldSpec) -> SparseMatrix {
        let columns = self
            .columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(i, v)| (*i, field.mul(v, s)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        SparseMatrix::from_clean_columns(self.rows, columns)
    }

    pub fn add(&self, other: &SparseMatrix, field: FieldSpec) -> Result<SparseMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension("cannot add matrices of different shapes".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| accumulate(a.iter().chain(b.iter()).cloned(), field))
            .collect();
        Ok(SparseMatrix::from_clean_columns(self.rows, columns))
    }

    /// Side-by-side concatenation `[a | b | ...]`.
    pub fn hstack(blocks: &[&SparseMatrix], rows: usize) -> Result<SparseMatrix, LinalgError> {
        let mut columns = Vec::new();
        for b in blocks {
            if b.rows != rows {
                return Err(LinalgError::Dimension("hstack row mismatch".into()));
            }
            columns.extend(b.columns.iter().cloned());
        }
        Ok(SparseMatrix::from_clean_columns(rows, columns))
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&SparseMatrix], cols: usize) -> Result<SparseMatrix, LinalgError> {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); cols];
        let mut offset = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::Dimension("vstack column mismatch".into()));
            }
            for (c, col) in b.columns.iter().enumerate() {
                columns[c].extend(col.iter().map(|(r, v)| (r + offset, v.clone())));
            }
            offset += b.rows;
        }
        Ok(SparseMatrix::from_clean_columns(offset, columns))
    }

    /// Kronecker product; column `(j, l)` sits at `j * other.cols + l`.
    pub fn kron(&self, other: &SparseMatrix, field: FieldSpec) -> SparseMatrix {
        let mut columns = Vec::with_capacity(self.cols * other.cols);
        for a in &self.columns {
            for b in &other.columns {
                let mut col: SparseVec = Vec::with_capacity(a.len() * b.len());
                for (i, x) in a {
                    for (k, y) in b {
                        let v = field.mul(x, y);
                        if !v.is_zero() {
                            col.push((i * other.rows + k, v));
                        }
                    }
                }
                columns.push(col);
            }
        }
        SparseMatrix::from_clean_columns(self.rows * other.rows, columns)
    }

    /// Entries reduced into `field`.
    pub fn reduced(&self, field: FieldSpec) -> Result<SparseMatrix, LinalgError> {
        let mut columns = Vec::with_capacity(self.cols);
        for c in &self.columns {
            let mut col = Vec::with_capacity(c.len());
            for (i, v) in c {
                let r = field.reduce(v)?;
                if !r.is_zero() {
                    col.push((*i, r));
                }
            }
            columns.push(col);
        }
        Ok(SparseMatrix::from_clean_columns(self.rows, columns))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::from_integer(BigInt::from(v))
    }

    #[test]
    fn triplets_validate() {
        assert!(SparseMatrix::from_triplets(2, 2, [(0, 0, q(1)), (0, 0, q(2))]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, [(2, 0, q(1))]).is_err());
        let m = SparseMatrix::from_triplets(2, 2, [(0, 1, q(0)), (1, 0, q(3))]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), q(3));
    }

    #[test]
    fn kron_and_product() {
        let f = FieldSpec::Rationals;
        let a = SparseMatrix::from_dense(&[vec![1, 2], vec![0, 1]]);
        let b = SparseMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let k = a.kron(&b, f);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 3), q(2));
        assert_eq!(k.get(1, 2), q(2));
        // (A⊗B)(C⊗D) = AC⊗BD
        let lhs = k.mul(&a.kron(&b, f), f).unwrap();
        let rhs = a.mul(&a, f).unwrap().kron(&b.mul(&b, f).unwrap(), f);
        assert_eq!(lhs, rhs);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn stacking() {
        let a = SparseMatrix::identity(2);
        let h = SparseMatrix::hstack(&[&a, &a], 2).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 4));
        let v = SparseMatrix::vstack(&[&a, &a], 2).unwrap();
        assert_eq!((v.rows(), v.cols()), (4, 2));
        assert_eq!(v.get(3, 1), q(1));
    }
}
