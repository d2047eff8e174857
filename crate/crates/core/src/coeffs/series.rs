//! Truncated multivariate power series in the deformation parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::Field;
use crate::{Error, Result};

/// Exponent vector (e_0, ..., e_{n-1}).
pub type Monomial = Vec<u16>;

pub fn degree(m: &[u16]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Power series in `nvars` variables, truncated at total degree `< cap`.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of truncated series.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TSeries<T> {
    nvars: usize,
    cap: u32,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Field> TSeries<T> {
    pub fn zero(nvars: usize, cap: u32) -> Self {
        TSeries { nvars, cap, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, cap: u32, c: T) -> Self {
        let mut s = Self::zero(nvars, cap);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, cap: u32) -> Self {
        Self::constant(nvars, cap, T::one())
    }

    /// The variable t_i.
    pub fn var(nvars: usize, cap: u32, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::monomial(nvars, cap, m, T::one())
    }

    pub fn monomial(nvars: usize, cap: u32, m: Monomial, c: T) -> Self {
        let mut s = Self::zero(nvars, cap);
        s.add_term(m, c);
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, T)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &[u16]) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&vec![0; self.nvars])
    }

    /// Adds `c * t^m`, silently dropping it when `deg m >= cap`.
    pub fn add_term(&mut self, m: Monomial, c: T) {
        assert_eq!(m.len(), self.nvars, "monomial arity mismatch");
        if c.is_zero() || degree(&m) >= self.cap {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars || self.cap != other.cap {
            return Err(Error::usage(format!(
                "series shape mismatch: ({}, cap {}) vs ({}, cap {})",
                self.nvars, self.cap, other.nvars, other.cap
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.nvars, self.cap);
        for (ma, ca) in &self.terms {
            let da = degree(ma);
            for (mb, cb) in &other.terms {
                if da + degree(mb) >= self.cap {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.cap);
        }
        TSeries {
            nvars: self.nvars,
            cap: self.cap,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    /// Multiplication by the single variable t_i.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2[i] += 1;
            out.add_term(m2, c.clone());
        }
        out
    }

    /// Partial derivative with respect to t_i.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            let e = m2[i];
            m2[i] -= 1;
            out.add_term(m2, c.clone() * T::from_int(e as i64));
        }
        out
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        TSeries {
            nvars: self.nvars,
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest total degree present, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| degree(m)).min()
    }

    /// Re-truncates to a smaller cap.
    pub fn truncate(&self, cap: u32) -> Self {
        let cap = cap.min(self.cap);
        TSeries {
            nvars: self.nvars,
            cap,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| degree(m) < cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a linear map on coefficients monomial by monomial.
    pub fn map_monomials(&self, mut f: impl FnMut(&Monomial, &T) -> T) -> Self {
        let mut out = Self::zero(self.nvars, self.cap);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }

    /// Substitutes `t_i -> subs[i]`; every substituted series must have
    /// zero constant term so the result is well defined at truncation.
    pub fn compose(&self, subs: &[TSeries<T>]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::usage("compose: wrong number of substitutions"));
        }
        let (nv, cap) = match subs.first() {
            Some(s) => (s.nvars, s.cap),
            None => return Ok(self.clone()),
        };
        for s in subs {
            if s.nvars != nv || s.cap != cap {
                return Err(Error::usage("compose: substitution shape mismatch"));
            }
            if !s.constant_term().is_zero() {
                return Err(Error::usage("compose: substitution has a constant term"));
            }
        }
        // powers[i][e] = subs[i]^e
        let mut powers: Vec<Vec<TSeries<T>>> = subs.iter().map(|s| vec![TSeries::one(nv, cap), s.clone()]).collect();
        let mut out = TSeries::zero(nv, cap);
        for (m, c) in &self.terms {
            let mut term = TSeries::constant(nv, cap, c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().checked_mul(&subs[i])?;
                    powers[i].push(next);
                }
                term = term.checked_mul(&powers[i][e as usize])?;
                if term.is_zero() {
                    break;
                }
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// Sorted `(exponents, "p/q")` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| serde_json::json!([m, c.to_string()]))
                .collect(),
        )
    }
}

impl<T: Field> fmt::Display for TSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*t{i}")?,
                    _ => write!(f, "*t{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for TSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TSeries[n={}, cap={}]{:?}", self.nvars, self.cap, self.terms)
    }
}

impl<T: Field> Add for &TSeries<T> {
    type Output = TSeries<T>;
    fn add(self, rhs: Self) -> TSeries<T> {
        self.checked_add(rhs).expect("series add")
    }
}

impl<T: Field> Add for TSeries<T> {
    type Output = TSeries<T>;
    fn add(mut self, rhs: Self) -> TSeries<T> {
        self += &rhs;
        self
    }
}

impl<T: Field> AddAssign<&TSeries<T>> for TSeries<T> {
    fn add_assign(&mut self, rhs: &TSeries<T>) {
        self.check_compatible(rhs).expect("series add");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<T: Field> SubAssign<&TSeries<T>> for TSeries<T> {
    fn sub_assign(&mut self, rhs: &TSeries<T>) {
        self.check_compatible(rhs).expect("series sub");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<T: Field> Sub for &TSeries<T> {
    type Output = TSeries<T>;
    fn sub(self, rhs: Self) -> TSeries<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Field> Sub for TSeries<T> {
    type Output = TSeries<T>;
    fn sub(mut self, rhs: Self) -> TSeries<T> {
        self -= &rhs;
        self
    }
}

impl<T: Field> Neg for TSeries<T> {
    type Output = TSeries<T>;
    fn neg(self) -> TSeries<T> {
        self.scale(&-T::one())
    }
}

impl<T: Field> Mul for &TSeries<T> {
    type Output = TSeries<T>;
    fn mul(self, rhs: Self) -> TSeries<T> {
        self.checked_mul(rhs).expect("series mul")
    }
}

impl<T: Field> Mul for TSeries<T> {
    type Output = TSeries<T>;
    fn mul(self, rhs: Self) -> TSeries<T> {
        self.checked_mul(&rhs).expect("series mul")
    }
}

/// All monomials in `nvars` variables of total degree exactly `d`.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left as u16;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u16;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; nvars];
    rec(0, d, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;
    use proptest::prelude::*;

    type S = TSeries<Scalar>;

    fn q(p: i64) -> Scalar {
        Scalar::from_int(p)
    }

    #[test]
    fn difference_of_squares() {
        let one = S::one(2, 3);
        let t0 = S::var(2, 3, 0);
        let a = &one + &t0;
        let b = &one - &t0;
        let expect = &one - &(&t0 * &t0);
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn truncation_drops_high_degree() {
        let t0 = S::var(2, 2, 0);
        let t1 = S::var(2, 2, 1);
        assert!((&t0 * &t1).is_zero());
    }

    #[test]
    fn identity_product() {
        let one = S::one(1, 4);
        let t = S::var(1, 4, 0);
        let a = &(&one + &t) + &(&t * &t);
        assert_eq!(&a * &one, a);
    }

    #[test]
    fn mismatched_shapes_are_usage_errors() {
        let a = S::one(2, 3);
        let b = S::one(2, 4);
        assert!(matches!(a.checked_mul(&b), Err(Error::Usage(_))));
        let c = S::one(3, 3);
        assert!(a.checked_add(&c).is_err());
    }

    #[test]
    fn derivative_and_compose() {
        // f = t0^2 t1, substitute t0 -> -s0 + s1^2, t1 -> s1
        let mut f = S::zero(2, 5);
        f.add_term(vec![2, 1], q(1));
        assert_eq!(f.derivative(0), S::monomial(2, 5, vec![1, 1], q(2)));
        let s0 = S::var(2, 5, 0);
        let s1 = S::var(2, 5, 1);
        let g0 = &(-s0.clone()) + &(&s1 * &s1);
        let h = f.compose(&[g0, s1.clone()]).unwrap();
        // (s0^2 - 2 s0 s1^2 + s1^4) s1 truncated below degree 5
        let mut expect = S::zero(2, 5);
        expect.add_term(vec![2, 1], q(1));
        expect.add_term(vec![1, 3], q(-2));
        assert_eq!(h, expect);
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(1, 4).len(), 1);
        assert_eq!(monomials_of_degree(4, 0), vec![vec![0, 0, 0, 0]]);
    }

    fn arb_series() -> impl Strategy<Value = S> {
        proptest::collection::vec(((0u16..3, 0u16..3), -4i64..5), 0..6).prop_map(|v| {
            let mut s = S::zero(2, 4);
            for ((a, b), c) in v {
                s.add_term(vec![a, b], q(c));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }
    }
}
