//! Hochschild homology by exact linear algebra, one weight block at a time.
//!
//! Weights are handled as integers scaled by n+1: ε|ε^m has 2m+1-n, 1|ε^m
//! has 2m, u has -2(n+1) and t_j (as a coefficient) has 2j - 2(n+1). The
//! differential b lowers scaled weight by n+1, so every block is finite.

use std::collections::{BTreeMap, BTreeSet};

use crate::bar::{connes_b_word, hoch_b_word, BarWord, Shape, UChain};
use crate::coeffs::{monomials_of_degree, Field, Monomial, TSeries};
use crate::family::{AnFamily, Gen};
use crate::linalg::{axpy, Echelon, SparseVec};
use crate::pairing::splitting_s;
use crate::{Error, Result};

pub fn scaled_word_weight(n: usize, w: BarWord) -> i64 {
    match w.head {
        Gen::Eps => 2 * w.tail as i64 + 1 - n as i64,
        Gen::One => 2 * w.tail as i64,
    }
}

pub fn scaled_monomial_weight(n: usize, m: &[u16]) -> i64 {
    m.iter().enumerate().map(|(j, &e)| e as i64 * (2 * j as i64 - 2 * (n as i64 + 1))).sum()
}

/// Words of a given scaled weight (at most one per head).
pub fn words_of_weight(n: usize, w: i64) -> Vec<BarWord> {
    let mut out = Vec::new();
    let e = w + n as i64 - 1;
    if e >= 0 && e % 2 == 0 {
        out.push(BarWord::eps((e / 2) as usize));
    }
    if w >= 0 && w % 2 == 0 {
        out.push(BarWord::one((w / 2) as usize));
    }
    out
}

type Key = (BarWord, Monomial);

/// The complex CC_*(𝒜_n) ⊗ R/m^N split into weight blocks.
pub struct BlockComplex<T> {
    n: usize,
    monomials: Vec<Monomial>,
    fam: AnFamily<T>,
}

impl<T: Field> BlockComplex<T> {
    /// `order` is N; N = 1 gives the central fiber.
    pub fn new(n: usize, order: u32) -> Result<Self> {
        let fam = AnFamily::new(n, order)?;
        let monomials = (0..order).flat_map(|d| monomials_of_degree(n, d)).collect();
        Ok(BlockComplex { n, monomials, fam })
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn block(&self, w: i64) -> Vec<Key> {
        let mut out = Vec::new();
        for m in &self.monomials {
            for word in words_of_weight(self.n, w - scaled_monomial_weight(self.n, m)) {
                out.push((word, m.clone()));
            }
        }
        out.sort();
        out
    }

    pub fn differential(&self, key: &Key) -> SparseVec<Key, T> {
        let (word, m) = key;
        let mut out = SparseVec::new();
        let tm = TSeries::monomial(self.n, self.fam.cap(), m.clone(), T::one());
        for (w2, c) in hoch_b_word(*word, &self.fam) {
            let prod = c.checked_mul(&tm).expect("shapes agree");
            for (m2, v) in prod.terms() {
                axpy(&mut out, v, &SparseVec::from([((w2, m2.clone()), T::one())]));
            }
        }
        out
    }

    fn rank_from(&self, w: i64) -> usize {
        let mut e = Echelon::new();
        for k in self.block(w) {
            e.insert(&self.differential(&k));
        }
        e.rank()
    }

    /// dim H at scaled weight w.
    pub fn homology_dim(&self, w: i64) -> usize {
        let size = self.block(w).len();
        size - self.rank_from(w) - self.rank_from(w + self.n as i64 + 1)
    }

    /// Basis words of H at weight w, when the homology there is spanned by
    /// single words (checked: the returned words are cycles independent
    /// modulo boundaries and their number equals the dimension).
    pub fn word_basis(&self, w: i64) -> Result<Vec<Key>> {
        let mut e = Echelon::new();
        for k in self.block(w + self.n as i64 + 1) {
            e.insert(&self.differential(&k));
        }
        let mut chosen = Vec::new();
        for k in self.block(w) {
            if !self.differential(&k).is_empty() {
                continue;
            }
            if e.insert(&SparseVec::from([(k.clone(), T::one())])).is_none() {
                chosen.push(k);
            }
        }
        if chosen.len() != self.homology_dim(w) {
            return Err(Error::Internal(format!("homology at weight {w} is not spanned by words")));
        }
        Ok(chosen)
    }
}

/// Result of the central homology computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralHomology {
    pub dim: usize,
    pub basis: Vec<BarWord>,
    pub odd_only: bool,
    pub max_tail: usize,
}

/// HH_*(A_n) over all weight blocks containing words of tail ≤ max_tail.
pub fn central_homology<T: Field>(n: usize, max_tail: usize) -> Result<CentralHomology> {
    let cx = BlockComplex::<T>::new(n, 1)?;
    let mut weights = BTreeSet::new();
    for k in 0..=max_tail {
        weights.insert(scaled_word_weight(n, BarWord::eps(k)));
        weights.insert(scaled_word_weight(n, BarWord::one(k)));
    }
    let mut basis = Vec::new();
    for w in weights {
        basis.extend(cx.word_basis(w)?.into_iter().map(|(word, _)| word));
    }
    basis.sort();
    let odd_only = basis.iter().all(|w| w.is_odd());
    Ok(CentralHomology { dim: basis.len(), basis, odd_only, max_tail })
}

/// Per-weight comparison of HH(𝒜_n ⊗ R/m^N) with a free module of rank n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyHomology {
    pub total_dim: usize,
    pub expected: usize,
    pub mismatches: Vec<(i64, usize, usize)>,
}

pub fn family_homology<T: Field>(n: usize, order: u32) -> Result<FamilyHomology> {
    let cx = BlockComplex::<T>::new(n, order)?;
    let mut expected: BTreeMap<i64, usize> = BTreeMap::new();
    for m in cx.monomials() {
        for j in 0..n {
            let w = scaled_word_weight(n, BarWord::eps(j)) + scaled_monomial_weight(n, m);
            *expected.entry(w).or_default() += 1;
        }
    }
    // every weight reachable from words of moderate length, plus the expected ones
    let mut weights: BTreeSet<i64> = expected.keys().copied().collect();
    for m in cx.monomials() {
        for k in 0..=(2 * n + 2) {
            for word in [BarWord::eps(k), BarWord::one(k)] {
                weights.insert(scaled_word_weight(n, word) + scaled_monomial_weight(n, m));
            }
        }
    }
    let mut total = 0;
    let mut mismatches = Vec::new();
    for w in weights {
        let d = cx.homology_dim(w);
        total += d;
        let e = expected.get(&w).copied().unwrap_or(0);
        if d != e {
            mismatches.push((w, d, e));
        }
    }
    Ok(FamilyHomology { total_dim: total, expected: n * cx.monomials().len(), mismatches })
}

/// Splitting uniqueness data for s_k: the homology dimension in the weight of
/// each higher u-coefficient (must vanish), and an independent lift.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingUniqueness {
    pub k: usize,
    pub ambiguity_dims: Vec<usize>,
    pub lift_matches: bool,
}

/// Solves b·x_{l+1} = -B·x_l from x_0 = ε|ε^k inside the weight blocks and
/// compares with the closed-form splitting.
pub fn splitting_uniqueness<T: Field>(n: usize, k: usize, u_cap: i64) -> Result<SplittingUniqueness> {
    let cx = BlockComplex::<T>::new(n, 1)?;
    let step = 2 * (n as i64 + 1);
    let w0 = scaled_word_weight(n, BarWord::eps(k));
    let zero = vec![0u16; n];
    let mut ambiguity_dims = Vec::new();
    let bar_cap = k + (n + 1) * (u_cap.max(0) as usize + 1);
    let shape = Shape { nvars: n, cap: 1, bar_cap, u_max: u_cap };
    let mut lift = UChain::<T>::with_shape(shape);
    let mut x: SparseVec<Key, T> = SparseVec::from([((BarWord::eps(k), zero.clone()), T::one())]);
    lift.add_term(0, BarWord::eps(k), TSeries::one(n, 1))?;
    for l in 1..=u_cap {
        let w = w0 + l * step;
        ambiguity_dims.push(cx.homology_dim(w));
        let mut rhs = SparseVec::new();
        for ((word, _), c) in &x {
            for (w2, v) in connes_b_word::<T>(*word, n, 1) {
                axpy(&mut rhs, &-(c.clone() * v.constant_term()), &SparseVec::from([((w2, zero.clone()), T::one())]));
            }
        }
        let block = cx.block(w);
        let mut e = Echelon::new();
        for key in &block {
            e.insert(&cx.differential(key));
        }
        let red = e.reduce(&rhs);
        if !red.residual.is_empty() {
            return Err(Error::NotClosed(format!("no lift of s_{k} at u^{l}")));
        }
        x = SparseVec::new();
        for (idx, c) in red.combo {
            x.insert(block[idx].clone(), c);
        }
        for ((word, _), c) in &x {
            lift.add_term(l, *word, TSeries::constant(n, 1, c.clone()))?;
        }
    }
    let s = splitting_s::<T>(k, n, shape)?;
    Ok(SplittingUniqueness { k, ambiguity_dims, lift_matches: s.sub(&lift)?.is_zero() })
}
