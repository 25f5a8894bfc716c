//! Exact Koszulity decisions for connected graded rings and corings over a
//! split semisimple base `R = k^S`, with incidence structures of finite
//! graded posets as the main source of examples.
//!
//! Every homology question reduces to ranks of sparse matrices over `Q` or
//! `F_p`, computed exactly. Each Koszulity verdict is cross-checked against
//! the equivalent characterizations that can be computed in finite weight.

pub mod bimodule;
pub mod duality;
pub mod error;
pub mod graded;
pub mod homology;
pub mod koszul;
pub mod label;
pub mod linalg;
pub mod poset;

pub use bimodule::{BaseRing, Bimodule, BimoduleMap, BlockKey, SubBimodule};
pub use duality::{dual_pair, graded_left_dual_of_coring, graded_left_dual_of_ring};
pub use error::{Error, LinalgError, PosetError, Result};
pub use graded::{GradedCoring, GradedRing, QuadraticData};
pub use homology::{BettiTable, ComplexSlice};
pub use koszul::{decide_koszul_coring, decide_koszul_ring, AlmostKoszulPair, KoszulVerdict};
pub use label::Label;
pub use linalg::{FieldSpec, Scalar, SparseMatrix, Subspace};
pub use poset::{
    enumerate_corpus, incidence_coring, incidence_duality_check, incidence_ring, parse_poset, union_product_check,
    zeta_ring, GradedPoset,
};
