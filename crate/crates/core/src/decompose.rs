//! Decomposition of closed classes in a u-window of the central cyclic
//! complex: X = Σ c_{j,m} u^m b_j + (b+uB)W.

use std::collections::BTreeMap;

use crate::bar::{cyclic_d, BarWord, ChainKey, UChain};
use crate::coeffs::{Field, TSeries};
use crate::family::{AnFamily, Gen};
use crate::linalg::{Echelon, SparseVec};
use crate::{Error, Result};

/// Coordinates of a class: (basis index j, u-power m) ↦ coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassCoords<T> {
    pub coords: BTreeMap<(usize, i64), TSeries<T>>,
    pub witness: UChain<T>,
}

impl<T: Field> ClassCoords<T> {
    pub fn coeff(&self, j: usize, m: i64) -> Option<&TSeries<T>> {
        self.coords.get(&(j, m))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coords: Vec<serde_json::Value> = self
            .coords
            .iter()
            .map(|((j, m), s)| serde_json::json!([j, m, s.to_json()]))
            .collect();
        serde_json::json!({ "coords": coords, "witness_terms": self.witness.len() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Column {
    Witness(ChainKey),
    Basis(usize, i64),
}

/// Exact elimination set up once for a basis and a u-window `lo..=hi`.
///
/// The window is the quotient u^{lo}CC[[u]] / u^{hi+1}CC[[u]] of the central
/// complex. Witness columns (b+uB)(a_0|ε^m·u^p) come first, then the basis
/// columns u^m·b_j, so a class's coordinates are read from the basis part of
/// its reduction.
pub struct Decomposer<T> {
    n: usize,
    lo: i64,
    hi: i64,
    bar_cap: usize,
    ech: Echelon<ChainKey, T>,
    columns: Vec<Column>,
}

fn to_sparse<T: Field>(c: &UChain<T>) -> SparseVec<ChainKey, T> {
    c.terms().map(|(k, v)| (*k, v.constant_term())).filter(|(_, v)| !v.is_zero()).collect()
}

impl<T: Field> Decomposer<T> {
    /// `basis[j]` must be t-free with u_max ≥ hi - lo.
    pub fn new(n: usize, basis: &[UChain<T>], lo: i64, hi: i64, bar_cap: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::usage(format!("empty u-window {lo}..={hi}")));
        }
        let fam = AnFamily::<T>::new(n, 1)?;
        // witness images may reach one past the cap; such columns only enter
        // combinations in which the overflow term cancels
        let mut ech = Echelon::new();
        let mut columns = Vec::new();
        for p in lo..=hi {
            for m in 0..=bar_cap {
                for head in [Gen::Eps, Gen::One] {
                    let w = BarWord { head, tail: m };
                    let x = UChain::<T>::basis(w, p, n, 1, bar_cap + 1, hi)?;
                    let v = to_sparse(&cyclic_d(&x, &fam)?);
                    if v.is_empty() {
                        continue;
                    }
                    ech.insert(&v);
                    columns.push(Column::Witness((p, w)));
                }
            }
        }
        for (j, b) in basis.iter().enumerate() {
            if b.terms().any(|(_, c)| c.terms().any(|(m, _)| crate::coeffs::degree(m) > 0)) {
                return Err(Error::usage("basis elements must be t-free"));
            }
            for m in lo..=hi {
                if b.u_max() + m < hi {
                    return Err(Error::truncation(format!(
                        "basis element {j} known through u^{} only, window needs u^{}",
                        b.u_max(),
                        hi - m
                    )));
                }
                let col = b.shift_u(m).u_range(lo, hi);
                if let Some(t) = col.max_tail() {
                    if t > bar_cap {
                        return Err(Error::truncation(format!(
                            "basis column u^{m}·b_{j} has tail {t} beyond bar cap {bar_cap}"
                        )));
                    }
                }
                let v = to_sparse(&col);
                if v.is_empty() || ech.insert(&v).is_some() {
                    return Err(Error::RankDeficient(format!(
                        "u^{m}·b_{j} is not independent modulo boundaries in window {lo}..={hi}"
                    )));
                }
                columns.push(Column::Basis(j, m));
            }
        }
        Ok(Decomposer { n, lo, hi, bar_cap, ech, columns })
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Decomposes `x` (terms above the window are ignored).
    pub fn decompose(&self, x: &UChain<T>) -> Result<ClassCoords<T>> {
        if let Some(p) = x.min_u() {
            if p < self.lo {
                return Err(Error::usage(format!(
                    "class has u^{p} below the window start u^{}",
                    self.lo
                )));
            }
        }
        if x.u_max() < self.hi {
            return Err(Error::truncation(format!(
                "class known through u^{} only, window needs u^{}",
                x.u_max(),
                self.hi
            )));
        }
        let (nvars, cap) = (x.nvars(), x.cap());
        let mut coords: BTreeMap<(usize, i64), TSeries<T>> = BTreeMap::new();
        let mut witness = UChain::zero(nvars, cap, self.bar_cap + 1, self.hi);
        let window = x.u_range(self.lo, self.hi);
        if let Some(t) = window.max_tail() {
            if t > self.bar_cap {
                return Err(Error::truncation(format!("class has tail {t} beyond bar cap {}", self.bar_cap)));
            }
        }
        for (mono, v) in window.by_monomial() {
            let red = self.ech.reduce(&v);
            if !red.residual.is_empty() {
                let (&(p, w), c) = red.residual.iter().next().unwrap();
                return Err(Error::NotClosed(format!(
                    "residual {c}·{w}·u^{p} at t-monomial {mono:?} (n={}, window {}..={}, bar cap {})",
                    self.n, self.lo, self.hi, self.bar_cap
                )));
            }
            for (idx, c) in red.combo {
                let s = TSeries::monomial(nvars, cap, mono.clone(), c);
                match self.columns[idx] {
                    Column::Witness((p, w)) => witness.add_term(p, w, s)?,
                    Column::Basis(j, m) => {
                        let e = coords.entry((j, m)).or_insert_with(|| TSeries::zero(nvars, cap));
                        *e += &s;
                    }
                }
            }
        }
        coords.retain(|_, s| !s.is_zero());
        Ok(ClassCoords { coords, witness })
    }

    /// Σ c_{j,m} u^m b_j restricted to the window.
    pub fn assemble(&self, basis: &[UChain<T>], coords: &BTreeMap<(usize, i64), TSeries<T>>, like: &UChain<T>) -> Result<UChain<T>> {
        let mut out = like.empty_like().truncate_u(self.hi.min(like.u_max()))?;
        for (&(j, m), c) in coords {
            let term = basis[j].shift_u(m).u_range(self.lo, self.hi);
            for (&(p, w), k) in term.terms() {
                out.add_term(p, w, c.scale(&k.constant_term()))?;
            }
        }
        Ok(out)
    }
}
