use std::collections::BTreeMap;
use std::fmt;

use crate::coeffs::{Field, Monomial, TSeries};
use crate::family::Gen;
use crate::{Error, Result};

/// Reduced bar word a_0|ε^{⊗tail} with a_0 ∈ {1, ε}.
///
/// Ordered by (tail, head) so chains sort by (u-power, tail, head).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BarWord {
    pub head: Gen,
    pub tail: usize,
}

impl BarWord {
    pub fn one(tail: usize) -> Self {
        BarWord { head: Gen::One, tail }
    }

    pub fn eps(tail: usize) -> Self {
        BarWord { head: Gen::Eps, tail }
    }

    /// Hochschild parity: 1|ε^k is even, ε|ε^k is odd.
    pub fn is_odd(&self) -> bool {
        self.head == Gen::Eps
    }

    /// The full cyclic sequence (a_0, a_1, ..., a_k).
    pub fn gens(&self) -> Vec<Gen> {
        let mut v = Vec::with_capacity(self.tail + 1);
        v.push(self.head);
        v.extend(std::iter::repeat(Gen::Eps).take(self.tail));
        v
    }
}

impl Ord for BarWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.tail, self.head).cmp(&(other.tail, other.head))
    }
}

impl PartialOrd for BarWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = match self.head {
            Gen::One => "1",
            Gen::Eps => "eps",
        };
        write!(f, "{h}|eps^{}", self.tail)
    }
}

pub type ChainKey = (i64, BarWord);

/// Ambient data of a chain: t-variables, t-order, bar cap and u precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub nvars: usize,
    pub cap: u32,
    pub bar_cap: usize,
    pub u_max: i64,
}

/// Finite combination of (bar word, u-power) with t-series coefficients.
///
/// Coefficients are known exactly for u-powers `<= u_max`; anything above is
/// discarded. Words longer than `bar_cap` are a truncation error.
#[derive(Clone, PartialEq, Eq)]
pub struct UChain<T> {
    nvars: usize,
    cap: u32,
    bar_cap: usize,
    u_max: i64,
    terms: BTreeMap<ChainKey, TSeries<T>>,
}

impl<T: Field> UChain<T> {
    pub fn zero(nvars: usize, cap: u32, bar_cap: usize, u_max: i64) -> Self {
        UChain { nvars, cap, bar_cap, u_max, terms: BTreeMap::new() }
    }

    pub fn with_shape(s: Shape) -> Self {
        Self::zero(s.nvars, s.cap, s.bar_cap, s.u_max)
    }

    pub fn shape(&self) -> Shape {
        Shape { nvars: self.nvars, cap: self.cap, bar_cap: self.bar_cap, u_max: self.u_max }
    }

    /// Same shape, no terms.
    pub fn empty_like(&self) -> Self {
        Self::zero(self.nvars, self.cap, self.bar_cap, self.u_max)
    }

    pub fn basis(word: BarWord, upow: i64, nvars: usize, cap: u32, bar_cap: usize, u_max: i64) -> Result<Self> {
        let mut c = Self::zero(nvars, cap, bar_cap, u_max);
        c.add_term(upow, word, TSeries::one(nvars, cap))?;
        Ok(c)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn bar_cap(&self) -> usize {
        self.bar_cap
    }

    pub fn u_max(&self) -> i64 {
        self.u_max
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChainKey, &TSeries<T>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, upow: i64, word: BarWord) -> TSeries<T> {
        self.terms
            .get(&(upow, word))
            .cloned()
            .unwrap_or_else(|| TSeries::zero(self.nvars, self.cap))
    }

    pub fn min_u(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_u(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn max_tail(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.1.tail).max()
    }

    /// Adds `c · word · u^upow`. Terms above `u_max` are dropped; a nonzero
    /// in-window term longer than `bar_cap` is reported.
    pub fn add_term(&mut self, upow: i64, word: BarWord, c: TSeries<T>) -> Result<()> {
        if c.is_zero() || upow > self.u_max {
            return Ok(());
        }
        if word.tail > self.bar_cap {
            return Err(Error::truncation(format!(
                "word {word} at u^{upow} exceeds bar cap {}",
                self.bar_cap
            )));
        }
        if c.nvars() != self.nvars || c.cap() != self.cap {
            return Err(Error::usage("chain coefficient shape mismatch"));
        }
        match self.terms.entry((upow, word)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.cap != other.cap {
            return Err(Error::usage("chain shape mismatch"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.bar_cap = self.bar_cap.max(other.bar_cap);
        out.set_u_max(self.u_max.min(other.u_max));
        for (&(p, w), c) in &other.terms {
            out.add_term(p, w, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = self.empty_like();
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, v)| (*k, v.scale(c))).collect();
        out
    }

    /// Multiplies every coefficient by a series.
    pub fn mul_series(&self, s: &TSeries<T>) -> Result<Self> {
        let mut out = self.empty_like();
        for (&(p, w), c) in &self.terms {
            out.add_term(p, w, c.checked_mul(s)?)?;
        }
        Ok(out)
    }

    /// Multiplication by u^k; the precision bound moves with it.
    pub fn shift_u(&self, k: i64) -> Self {
        UChain {
            nvars: self.nvars,
            cap: self.cap,
            bar_cap: self.bar_cap,
            u_max: self.u_max + k,
            terms: self.terms.iter().map(|(&(p, w), c)| ((p + k, w), c.clone())).collect(),
        }
    }

    /// Lowers the precision bound, dropping terms above it. Raising it is
    /// refused since that would claim unknown coefficients.
    pub fn truncate_u(&self, u_max: i64) -> Result<Self> {
        if u_max > self.u_max {
            return Err(Error::truncation(format!(
                "cannot raise u precision from {} to {u_max}",
                self.u_max
            )));
        }
        let mut out = self.clone();
        out.set_u_max(u_max);
        Ok(out)
    }

    fn set_u_max(&mut self, u_max: i64) {
        self.u_max = u_max;
        self.terms.retain(|k, _| k.0 <= u_max);
    }

    pub fn with_bar_cap(&self, bar_cap: usize) -> Result<Self> {
        if let Some(t) = self.max_tail() {
            if t > bar_cap {
                return Err(Error::truncation(format!("tail {t} exceeds new bar cap {bar_cap}")));
            }
        }
        let mut out = self.clone();
        out.bar_cap = bar_cap;
        Ok(out)
    }

    /// Keeps only terms whose u-power lies in `lo..=hi`.
    pub fn u_range(&self, lo: i64, hi: i64) -> Self {
        let mut out = self.clone();
        out.terms.retain(|k, _| k.0 >= lo && k.0 <= hi);
        out
    }

    /// The part of t-order exactly `d`.
    pub fn t_homogeneous(&self, d: u32) -> Self {
        self.map_coeffs(|c| c.homogeneous_part(d))
    }

    pub fn t_derivative(&self, i: usize) -> Self {
        self.map_coeffs(|c| c.derivative(i))
    }

    /// Re-truncates coefficients at a smaller t-order (keeps the shape's cap).
    pub fn t_truncate(&self, order: u32) -> Self {
        self.map_coeffs(|c| {
            let mut s = TSeries::zero(c.nvars(), c.cap());
            for (m, v) in c.terms() {
                if crate::coeffs::degree(m) < order {
                    s.add_term(m.clone(), v.clone());
                }
            }
            s
        })
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&TSeries<T>) -> TSeries<T>) -> Self {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(*k, v);
            }
        }
        out
    }

    /// Splits into one scalar chain per t-monomial.
    pub fn by_monomial(&self) -> BTreeMap<Monomial, BTreeMap<ChainKey, T>> {
        let mut out: BTreeMap<Monomial, BTreeMap<ChainKey, T>> = BTreeMap::new();
        for (k, c) in &self.terms {
            for (m, v) in c.terms() {
                out.entry(m.clone()).or_default().insert(*k, v.clone());
            }
        }
        out
    }

    /// Evaluation at t = 0.
    pub fn central(&self) -> Self {
        self.t_homogeneous(0)
    }

    /// Applies a word-level linear map that shifts u-powers by `ushift`.
    /// `f` is evaluated once per distinct word.
    pub fn apply_wordwise(
        &self,
        ushift: i64,
        mut f: impl FnMut(BarWord) -> Result<Vec<(BarWord, TSeries<T>)>>,
    ) -> Result<Self> {
        let mut cache: std::collections::HashMap<BarWord, Vec<(BarWord, TSeries<T>)>> =
            std::collections::HashMap::new();
        let mut out = self.empty_like();
        for (&(p, w), c) in &self.terms {
            if p + ushift > out.u_max {
                continue;
            }
            if !cache.contains_key(&w) {
                cache.insert(w, f(w)?);
            }
            for (w2, k) in &cache[&w] {
                out.add_term(p + ushift, *w2, c.checked_mul(k)?)?;
            }
        }
        Ok(out)
    }

    /// Debug dump: one `head|eps^k u^p : series` line per term.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for ((p, w), c) in &self.terms {
            s.push_str(&format!("{w} u^{p} : {c}\n"));
        }
        s
    }
}

impl<T: fmt::Debug> fmt::Debug for UChain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UChain[bar_cap={}, u_max={}]", self.bar_cap, self.u_max)?;
        for ((p, w), c) in &self.terms {
            writeln!(f, "{w} u^{p} : {c:?}")?;
        }
        Ok(())
    }
}
