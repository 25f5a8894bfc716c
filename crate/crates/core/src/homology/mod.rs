//! Weight slices of the normalized bar and cobar complexes, Betti tables,
//! (co)homology classes with their induced structure, and quadraticity tests.

mod bar;
mod classes;
mod quadratic;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use bar::{bar_complex_ring, cobar_complex_coring};
pub use classes::{BarHomology, ClassBasis, CobarHomology};
pub(crate) use classes::is_cycle;
pub use quadratic::{
    alpha_check, is_quadratic_coring_direct, is_quadratic_direct, quadratic_via_ext, quadratic_via_tor,
    verify_ext2_sequence, verify_tor2_sequence, AlphaCheck, ExactSequenceCheck, QuadraticityReport,
};

use crate::bimodule::{Bimodule, BimoduleMap, BlockKey};
use crate::error::{Error, Result};
use crate::graded::{GradedCoring, GradedRing};
use crate::linalg;

/// Compositions of `m` into `n` positive parts, in lexicographic order.
pub fn partitions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            if m == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // Each of the remaining n − 1 parts needs at least 1.
        for first in 1..=m.saturating_sub(n - 1) {
            prefix.push(first);
            go(n - 1, m - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::with_capacity(n), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Differentials lower the degree.
    Chain,
    /// Differentials raise the degree.
    Cochain,
}

/// A finite complex of bimodules in consecutive degrees `low ..= low + len − 1`.
///
/// `maps[i]` connects `spaces[i]` and `spaces[i + 1]`, pointing down for chains
/// and up for cochains. `d ∘ d = 0` is verified on construction.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    direction: Direction,
    weight: usize,
    low: i64,
    spaces: Vec<Arc<Bimodule>>,
    maps: Vec<BimoduleMap>,
}

/// Homology of one slice, per degree and in total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exactness {
    pub exact: bool,
    /// Nonzero homology dimensions by degree.
    pub homology: BTreeMap<i64, usize>,
}

impl ComplexSlice {
    pub fn new(
        direction: Direction,
        weight: usize,
        low: i64,
        spaces: Vec<Arc<Bimodule>>,
        maps: Vec<BimoduleMap>,
    ) -> Result<Self> {
        if maps.len() + 1 != spaces.len().max(1) {
            return Err(Error::InvalidStructure(format!(
                "{} spaces need {} maps, got {}",
                spaces.len(),
                spaces.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (i, d) in maps.iter().enumerate() {
            let (src, dst) = match direction {
                Direction::Chain => (&spaces[i + 1], &spaces[i]),
                Direction::Cochain => (&spaces[i], &spaces[i + 1]),
            };
            if **d.source() != **src || **d.target() != **dst {
                return Err(Error::InvalidStructure(format!("differential {i} has the wrong shape")));
            }
        }
        for i in 0..maps.len().saturating_sub(1) {
            let dd = match direction {
                Direction::Chain => maps[i].compose(&maps[i + 1])?,
                Direction::Cochain => maps[i + 1].compose(&maps[i])?,
            };
            if !dd.is_zero() {
                return Err(Error::Invariant(format!(
                    "d∘d ≠ 0 at weight {weight}, degree {}",
                    low + i as i64 + 1
                )));
            }
        }
        Ok(ComplexSlice {
            direction,
            weight,
            low,
            spaces,
            maps,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn low_degree(&self) -> i64 {
        self.low
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.spaces.len()).map(|i| self.low + i as i64)
    }

    pub fn spaces(&self) -> &[Arc<Bimodule>] {
        &self.spaces
    }

    pub fn maps(&self) -> &[BimoduleMap] {
        &self.maps
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().all(|s| s.is_zero())
    }

    fn index(&self, n: i64) -> Option<usize> {
        let i = n.checked_sub(self.low)?;
        (i >= 0 && (i as usize) < self.spaces.len()).then_some(i as usize)
    }

    pub fn space(&self, n: i64) -> Option<&Arc<Bimodule>> {
        self.index(n).map(|i| &self.spaces[i])
    }

    /// The differential with source in degree `n`.
    pub fn outgoing(&self, n: i64) -> Option<&BimoduleMap> {
        let i = self.index(n)?;
        match self.direction {
            Direction::Chain => i.checked_sub(1).map(|j| &self.maps[j]),
            Direction::Cochain => self.maps.get(i),
        }
    }

    /// The differential with target in degree `n`.
    pub fn incoming(&self, n: i64) -> Option<&BimoduleMap> {
        let i = self.index(n)?;
        match self.direction {
            Direction::Chain => self.maps.get(i),
            Direction::Cochain => i.checked_sub(1).map(|j| &self.maps[j]),
        }
    }

    /// Homology dimension per degree and block.
    ///
    /// Each block's cycles are counted by reduced echelon form and its boundaries
    /// by elimination rank; rank + nullity = dim is asserted for every map, then
    /// the Euler characteristic of spaces and homology is compared.
    pub fn homology_blocks(&self) -> Result<BTreeMap<i64, BTreeMap<BlockKey, usize>>> {
        let f = self.spaces.first().map(|s| s.field()).unwrap_or_default();
        let mut out = BTreeMap::new();
        let (mut euler_space, mut euler_h) = (0i64, 0i64);
        for n in self.degrees() {
            let space = self.space(n).expect("degree in range");
            let mut per = BTreeMap::new();
            for (key, b) in space.blocks() {
                let cycles = match self.outgoing(n) {
                    Some(d) => {
                        let m = d.block(key);
                        let z = linalg::nullity(&m, f)?;
                        if z + linalg::rank(&m, f)? != b.len() {
                            return Err(Error::Invariant(format!(
                                "rank–nullity mismatch at weight {}, degree {n}",
                                self.weight
                            )));
                        }
                        z
                    }
                    None => b.len(),
                };
                let bounds = match self.incoming(n) {
                    Some(d) => linalg::rank(&d.block(key), f)?,
                    None => 0,
                };
                let h = cycles.checked_sub(bounds).ok_or_else(|| {
                    Error::Invariant(format!("boundaries exceed cycles at weight {}, degree {n}", self.weight))
                })?;
                if h > 0 {
                    per.insert(key, h);
                }
            }
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            euler_space += sign * space.dim() as i64;
            euler_h += sign * per.values().sum::<usize>() as i64;
            out.insert(n, per);
        }
        if euler_space != euler_h {
            return Err(Error::Invariant(format!(
                "Euler characteristic mismatch at weight {}: {euler_space} vs {euler_h}",
                self.weight
            )));
        }
        Ok(out)
    }

    pub fn homology_dims(&self) -> Result<BTreeMap<i64, usize>> {
        Ok(self
            .homology_blocks()?
            .into_iter()
            .map(|(n, per)| (n, per.values().sum()))
            .collect())
    }
}

/// Whether the slice is exact, with its nonzero homology as evidence.
pub fn is_exact(slice: &ComplexSlice) -> Result<Exactness> {
    let homology: BTreeMap<i64, usize> = slice.homology_dims()?.into_iter().filter(|(_, h)| *h > 0).collect();
    Ok(Exactness {
        exact: homology.is_empty(),
        homology,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BettiKind {
    Tor,
    Ext,
}

/// Bigraded dimensions `rows[n][m]` for `0 ≤ n ≤ n_max`, `0 ≤ m ≤ m_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub kind: BettiKind,
    pub n_max: usize,
    pub m_max: usize,
    pub rows: Vec<Vec<usize>>,
}

impl BettiTable {
    fn from_slices(kind: BettiKind, n_max: usize, m_max: usize, slices: &[BTreeMap<i64, usize>]) -> Result<Self> {
        let mut rows = vec![vec![0; m_max + 1]; n_max + 1];
        for (m, dims) in slices.iter().enumerate() {
            for (&n, &h) in dims {
                if n > m as i64 && h > 0 {
                    return Err(Error::Invariant(format!("homology in degree {n} above weight {m}")));
                }
                if n >= 0 && (n as usize) <= n_max {
                    rows[n as usize][m] = h;
                }
            }
        }
        Ok(BettiTable {
            kind,
            n_max,
            m_max,
            rows,
        })
    }

    pub fn get(&self, n: usize, m: usize) -> usize {
        self.rows.get(n).and_then(|r| r.get(m)).copied().unwrap_or(0)
    }

    pub fn diagonal(&self) -> Vec<usize> {
        (0..=self.n_max.min(self.m_max)).map(|n| self.rows[n][n]).collect()
    }

    /// Nonzero entries with `n ≠ m`.
    pub fn off_diagonal(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (n, row) in self.rows.iter().enumerate() {
            for (m, &h) in row.iter().enumerate() {
                if n != m && h > 0 {
                    out.push((n, m, h));
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal().is_empty()
    }

    /// Rows are homological degrees `n`, columns are weights `m`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n\\m");
        for m in 0..=self.m_max {
            let _ = write!(s, ",{m}");
        }
        s.push('\n');
        for (n, row) in self.rows.iter().enumerate() {
            let _ = write!(s, "{n}");
            for h in row {
                let _ = write!(s, ",{h}");
            }
            s.push('\n');
        }
        s
    }
}

/// `T_{n,m}(A)` for `n ≤ n_max`, `m ≤ m_max`; weights are computed concurrently.
pub fn tor_table(a: &GradedRing, n_max: usize, m_max: usize) -> Result<BettiTable> {
    let slices = (0..=m_max)
        .into_par_iter()
        .map(|m| bar_complex_ring(a, m)?.homology_dims())
        .collect::<Result<Vec<_>>>()?;
    BettiTable::from_slices(BettiKind::Tor, n_max, m_max, &slices)
}

/// `E^{n,m}(C)` for `n ≤ n_max`, `m ≤ m_max`; weights are computed concurrently.
pub fn ext_table(c: &GradedCoring, n_max: usize, m_max: usize) -> Result<BettiTable> {
    let slices = (0..=m_max)
        .into_par_iter()
        .map(|m| cobar_complex_coring(c, m)?.homology_dims())
        .collect::<Result<Vec<_>>>()?;
    BettiTable::from_slices(BettiKind::Ext, n_max, m_max, &slices)
}
