use std::collections::BTreeMap;
use std::fmt;

use super::{Field, TSeries};

/// Finite Laurent polynomial in u with series coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct ULaurent<T> {
    nvars: usize,
    cap: u32,
    terms: BTreeMap<i64, TSeries<T>>,
}

impl<T: Field> ULaurent<T> {
    pub fn zero(nvars: usize, cap: u32) -> Self {
        ULaurent { nvars, cap, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, p: i64, c: &TSeries<T>) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .terms
            .entry(p)
            .or_insert_with(|| TSeries::zero(self.nvars, self.cap));
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn coeff(&self, p: i64) -> TSeries<T> {
        self.terms.get(&p).cloned().unwrap_or_else(|| TSeries::zero(self.nvars, self.cap))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &TSeries<T>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// True when only the u^0 coefficient is present.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&p| p == 0)
    }
}

impl<T: Field> fmt::Display for ULaurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("[{c}]*u^{p}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<T: Field> fmt::Debug for ULaurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ULaurent({self})")
    }
}
