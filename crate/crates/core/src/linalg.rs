//! Sparse exact elimination over a field.
//!
//! Vectors are maps from an ordered key to a coefficient. Each stored row is
//! kept with its pivot (its smallest key) normalized to 1 and with the
//! combination of inserted columns that produced it, so reductions report how
//! a vector is expressed in the original columns.

use std::collections::BTreeMap;

use crate::coeffs::Field;

pub type SparseVec<K, T> = BTreeMap<K, T>;

/// Adds `c·v` into `acc`, dropping cancelled entries.
pub fn axpy<K: Ord + Clone, T: Field>(acc: &mut SparseVec<K, T>, c: &T, v: &SparseVec<K, T>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let val = c.clone() * x.clone();
        match acc.get_mut(k) {
            Some(e) => {
                *e = e.clone() + val;
                if e.is_zero() {
                    acc.remove(k);
                }
            }
            None => {
                acc.insert(k.clone(), val);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Row<K, T> {
    vec: SparseVec<K, T>,
    combo: SparseVec<usize, T>,
}

/// Incremental row echelon form with combination tracking.
#[derive(Clone, Debug)]
pub struct Echelon<K, T> {
    rows: BTreeMap<K, Row<K, T>>,
    ncols: usize,
}

/// Result of reducing a vector: `v = Σ combo[c]·column_c + residual`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<K, T> {
    pub combo: SparseVec<usize, T>,
    pub residual: SparseVec<K, T>,
}

impl<K: Ord + Clone, T: Field> Default for Echelon<K, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone, T: Field> Echelon<K, T> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), ncols: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, v: &SparseVec<K, T>) -> Reduction<K, T> {
        let mut vec = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => vec.keys().find(|k| self.rows.contains_key(*k)).cloned(),
                Some(c) => vec
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.rows.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let row = &self.rows[&k];
            let f = vec[&k].clone();
            axpy(&mut vec, &-f.clone(), &row.vec);
            axpy(&mut combo, &f, &row.combo);
            cursor = Some(k);
        }
        Reduction { combo, residual: vec }
    }

    /// Inserts column `v` with the next column index. Returns the dependency
    /// `v = Σ combo[c]·column_c` when `v` lies in the span of earlier columns.
    pub fn insert(&mut self, v: &SparseVec<K, T>) -> Option<SparseVec<usize, T>> {
        let idx = self.ncols;
        self.ncols += 1;
        let red = self.reduce(v);
        if red.residual.is_empty() {
            return Some(red.combo);
        }
        let (pk, pv) = red.residual.iter().next().map(|(k, x)| (k.clone(), x.clone())).unwrap();
        let inv = T::one() / pv;
        let mut vec = SparseVec::new();
        axpy(&mut vec, &inv, &red.residual);
        // the row is (v - combo)/pivot, expressed in original columns
        let mut combo = SparseVec::new();
        axpy(&mut combo, &-inv.clone(), &red.combo);
        axpy(&mut combo, &inv, &SparseVec::from([(idx, T::one())]));
        self.rows.insert(pk, Row { vec, combo });
        None
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone, T: Field>(vs: &[SparseVec<K, T>]) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v);
    }
    e.rank()
}
