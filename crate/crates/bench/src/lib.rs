//! Shared fixtures for the benchmarks.

use koszul_core::linalg::SparseVec;
use koszul_core::{FieldSpec, GradedPoset, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn diamond() -> GradedPoset {
    GradedPoset::from_labels(&["0", "a", "b", "1"], &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
        .expect("diamond is graded")
}

pub fn pbad() -> GradedPoset {
    GradedPoset::from_labels(
        &["0", "a", "b", "c", "d", "1"],
        &[("0", "a"), ("0", "b"), ("a", "c"), ("b", "d"), ("c", "1"), ("d", "1")],
    )
    .expect("P_bad is graded")
}

/// The Boolean lattice on `n` atoms.
pub fn boolean_lattice(n: usize) -> GradedPoset {
    let elements: Vec<String> = (0..1usize << n).map(|s| format!("{s:0n$b}")).collect();
    let covers = (0..1usize << n)
        .flat_map(|s| (0..n).filter(move |i| s & (1 << i) == 0).map(move |i| (s, s | (1 << i))))
        .collect();
    GradedPoset::new(elements, covers).expect("Boolean lattices are graded")
}

/// A random sparse `rows × cols` matrix with entries in `-2..=2`, about `density` nonzero.
pub fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = FieldSpec::Rationals;
    let columns: Vec<SparseVec> = (0..cols)
        .map(|_| {
            let mut col = Vec::new();
            for r in 0..rows {
                if rng.gen_bool(density) {
                    col.push((r, f.from_i64([-2i64, -1, 1, 2][rng.gen_range(0..4)])));
                }
            }
            col
        })
        .collect();
    SparseMatrix::from_columns(rows, columns, f).expect("entries are valid")
}
