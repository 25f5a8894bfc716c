//! Exact sparse linear algebra over the rationals and prime fields.

pub mod echelon;
pub mod field;
pub mod rank;
pub mod sparse;

pub use echelon::Echelon;
pub use field::{FieldSpec, Scalar};
pub use rank::rank;
pub use sparse::{accumulate, SparseMatrix, SparseVec};

use crate::error::LinalgError;

/// A subspace given by linearly independent basis columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: SparseMatrix,
}

impl Subspace {
    /// Validates independence of the columns.
    pub fn new(basis: SparseMatrix, field: FieldSpec) -> Result<Self, LinalgError> {
        if rank(&basis, field)? != basis.cols() {
            return Err(LinalgError::Dimension("basis columns are dependent".into()));
        }
        Ok(Subspace { basis })
    }

    pub(crate) fn from_independent(basis: SparseMatrix) -> Self {
        Subspace { basis }
    }

    /// Span of arbitrary vectors; keeps the first independent ones.
    pub fn span(ambient_dim: usize, vectors: &[SparseVec], field: FieldSpec) -> Result<Self, LinalgError> {
        let m = SparseMatrix::from_columns(ambient_dim, vectors.to_vec(), field)?;
        image_basis(&m, field)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: SparseMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            basis: SparseMatrix::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &SparseMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> &[SparseVec] {
        self.basis.columns()
    }

    pub fn echelon(&self, field: FieldSpec) -> Echelon {
        let mut e = Echelon::new(self.ambient_dim(), field);
        for v in self.vectors() {
            e.insert(v);
        }
        e
    }

    pub fn contains(&self, v: &[(usize, Scalar)], field: FieldSpec) -> bool {
        self.echelon(field).contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace, field: FieldSpec) -> Result<bool, LinalgError> {
        check_ambient(&[self, other])?;
        let e = self.echelon(field);
        Ok(other.vectors().iter().all(|v| e.contains(v)))
    }

    /// Sum of subspaces of a common ambient space.
    pub fn sum(spaces: &[&Subspace], ambient_dim: usize, field: FieldSpec) -> Result<Self, LinalgError> {
        let blocks: Vec<&SparseMatrix> = spaces.iter().map(|s| &s.basis).collect();
        image_basis(&SparseMatrix::hstack(&blocks, ambient_dim)?, field)
    }
}

fn check_ambient(spaces: &[&Subspace]) -> Result<(), LinalgError> {
    let n = spaces[0].ambient_dim();
    match spaces.iter().find(|s| s.ambient_dim() != n) {
        Some(s) => Err(LinalgError::Dimension(format!(
            "ambient dimensions {n} and {} differ",
            s.ambient_dim()
        ))),
        None => Ok(()),
    }
}

fn reduced_rows(m: &SparseMatrix, field: FieldSpec) -> Result<Echelon, LinalgError> {
    let m = m.reduced(field)?;
    let mut e = Echelon::new(m.cols(), field);
    for row in m.row_vectors() {
        e.insert(&row);
    }
    Ok(e)
}

/// Null space of `m`; the basis is the canonical one read off the reduced echelon form.
pub fn kernel_basis(m: &SparseMatrix, field: FieldSpec) -> Result<Subspace, LinalgError> {
    let e = reduced_rows(m, field)?;
    Ok(Subspace::from_independent(SparseMatrix::from_clean_columns(
        m.cols(),
        e.null_space(),
    )))
}

/// Dimension of the null space computed by reduced echelon form, independent of `rank`.
pub fn nullity(m: &SparseMatrix, field: FieldSpec) -> Result<usize, LinalgError> {
    Ok(m.cols() - reduced_rows(m, field)?.rank())
}

/// Column space of `m`, spanned by the leftmost independent columns of `m` itself.
pub fn image_basis(m: &SparseMatrix, field: FieldSpec) -> Result<Subspace, LinalgError> {
    let m = m.reduced(field)?;
    let mut e = Echelon::new(m.rows(), field);
    let mut keep = Vec::new();
    for col in m.columns() {
        if e.insert(col).is_some() {
            keep.push(col.clone());
        }
    }
    Ok(Subspace::from_independent(SparseMatrix::from_clean_columns(m.rows(), keep)))
}

/// Intersection of subspaces, via null spaces of stacked bases.
pub fn intersect(spaces: &[Subspace], field: FieldSpec) -> Result<Subspace, LinalgError> {
    let first = spaces
        .first()
        .ok_or_else(|| LinalgError::Dimension("intersection of an empty list".into()))?;
    check_ambient(&spaces.iter().collect::<Vec<_>>())?;
    let n = first.ambient_dim();
    let mut acc = first.clone();
    for w in &spaces[1..] {
        if acc.dim() == 0 {
            break;
        }
        let a = acc.dim();
        let neg = w.basis.scale(&field.from_i64(-1), field);
        let stacked = SparseMatrix::hstack(&[&acc.basis, &neg], n)?;
        let kernel = kernel_basis(&stacked, field)?;
        let cols = kernel
            .vectors()
            .iter()
            .map(|v| {
                let x: SparseVec = v.iter().filter(|(i, _)| *i < a).cloned().collect();
                acc.basis.apply(&x, field)
            })
            .collect();
        acc = Subspace::from_independent(SparseMatrix::from_clean_columns(n, cols));
    }
    Ok(acc)
}

/// `dim ambient − dim sub`, after verifying `sub ⊆ ambient`.
pub fn quotient_dim(ambient: &Subspace, sub: &Subspace, field: FieldSpec) -> Result<usize, LinalgError> {
    if !ambient.contains_subspace(sub, field)? {
        return Err(LinalgError::NotContained);
    }
    Ok(ambient.dim() - sub.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn q(v: i64) -> Scalar {
        Scalar::from_integer(BigInt::from(v))
    }

    fn space(cols: &[Vec<i64>]) -> Subspace {
        let n = cols[0].len();
        let rows: Vec<Vec<i64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        Subspace::new(SparseMatrix::from_dense(&rows), Q).unwrap()
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_basis(&SparseMatrix::identity(2), Q).unwrap().dim(), 0);
        let k = kernel_basis(&SparseMatrix::from_dense(&[vec![1, 1]]), Q).unwrap();
        assert_eq!(k.dim(), 1);
        assert_eq!(k.vectors()[0], vec![(0, q(-1)), (1, q(1))]);
        assert_eq!(kernel_basis(&SparseMatrix::zeros(1, 3), Q).unwrap().dim(), 3);
    }

    #[test]
    fn images() {
        assert_eq!(image_basis(&SparseMatrix::zeros(2, 2), Q).unwrap().dim(), 0);
        assert_eq!(image_basis(&SparseMatrix::identity(4), Q).unwrap().dim(), 4);
        let im = image_basis(&SparseMatrix::from_dense(&[vec![1], vec![1]]), Q).unwrap();
        assert_eq!(im.vectors()[0], vec![(0, q(1)), (1, q(1))]);
    }

    #[test]
    fn intersections() {
        let u = space(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(intersect(&[u.clone()], Q).unwrap(), u);
        let l1 = space(&[vec![1, 0]]);
        let l2 = space(&[vec![1, 1]]);
        assert_eq!(intersect(&[l1, l2], Q).unwrap().dim(), 0);
        let a = space(&[vec![1, 0, 0], vec![0, 1, 0]]);
        let b = space(&[vec![0, 1, 0], vec![0, 0, 1]]);
        let i = intersect(&[a, b], Q).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&[(1, q(1))], Q));
        assert!(intersect(&[space(&[vec![1, 0]]), space(&[vec![1, 0, 0]])], Q).is_err());
    }

    #[test]
    fn quotients() {
        let full = Subspace::full(5);
        let sub = space(&[vec![1, 0, 0, 0, 0], vec![0, 1, 1, 0, 0]]);
        assert_eq!(quotient_dim(&full, &sub, Q).unwrap(), 3);
        assert_eq!(quotient_dim(&sub, &sub, Q).unwrap(), 0);
        let amb = space(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(quotient_dim(&amb, &space(&[vec![1, 1]]), Q).unwrap(), 1);
        let line = space(&[vec![1, 0]]);
        assert_eq!(
            quotient_dim(&line, &space(&[vec![0, 1]]), Q),
            Err(LinalgError::NotContained)
        );
    }
}
