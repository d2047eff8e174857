//! The minimal model A_n, its versal deformation, cochains and weights.
//!
//! A_n = span(1, ε) with 1 even, ε odd and 1 a strict unit. The deformation
//! over R = K[[t_0..t_{n-1}]] has μ_k(ε^k) = t_k·1 for k < n and
//! μ_{n+1}(ε^{n+1}) = 1/(n+1)·1; every other μ vanishes apart from the unit.

use std::collections::BTreeMap;

use crate::coeffs::{degree, Field, TSeries};
use crate::{Error, Result};

/// Basis generator of A_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    One,
    Eps,
}

impl Gen {
    /// Unshifted parity: 1 is even, ε is odd.
    pub fn is_odd(self) -> bool {
        matches!(self, Gen::Eps)
    }

    /// Parity after the bar shift.
    pub fn shifted_odd(self) -> bool {
        !self.is_odd()
    }
}

/// Element a·1 + b·ε of A_n ⊗ R.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem<T> {
    pub one: TSeries<T>,
    pub eps: TSeries<T>,
}


impl<T: Field> Elem<T> {
    pub fn zero(nvars: usize, cap: u32) -> Self {
        Elem { one: TSeries::zero(nvars, cap), eps: TSeries::zero(nvars, cap) }
    }

    pub fn unit_multiple(c: TSeries<T>) -> Self {
        let eps = TSeries::zero(c.nvars(), c.cap());
        Elem { one: c, eps }
    }

    pub fn gen(g: Gen, nvars: usize, cap: u32) -> Self {
        let mut e = Self::zero(nvars, cap);
        match g {
            Gen::One => e.one = TSeries::one(nvars, cap),
            Gen::Eps => e.eps = TSeries::one(nvars, cap),
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.one.is_zero() && self.eps.is_zero()
    }

    pub fn component(&self, g: Gen) -> &TSeries<T> {
        match g {
            Gen::One => &self.one,
            Gen::Eps => &self.eps,
        }
    }
}

/// The odd cyclic pairing with ⟨1, ε⟩ = 1.
///
/// ⟨ε, 1⟩ = -1: with the signed right unit μ_2(a, 1) = (-1)^{|a|} a this is
/// the sign under which ⟨μ_k(a_1..a_k), a_{k+1}⟩ is cyclically invariant up
/// to the Koszul sign of the rotation.
pub fn cyclic_pairing<T: Field>(a: &Elem<T>, b: &Elem<T>) -> TSeries<T> {
    &(&a.one * &b.eps) - &(&a.eps * &b.one)
}

/// Parity of a Hochschild cochain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Reduced Hochschild cochain: its value on ε^{⊗k} for each arity k.
/// Inputs containing 1 are sent to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain<T> {
    pub values: BTreeMap<usize, Elem<T>>,
    pub parity: Parity,
}

impl<T: Field> Cochain<T> {
    pub fn zero(parity: Parity) -> Self {
        Cochain { values: BTreeMap::new(), parity }
    }

    pub fn set(&mut self, arity: usize, v: Elem<T>) {
        if v.is_zero() {
            self.values.remove(&arity);
        } else {
            self.values.insert(arity, v);
        }
    }

    pub fn value(&self, arity: usize) -> Option<&Elem<T>> {
        self.values.get(&arity)
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.values.keys().next_back().copied()
    }

    /// Σ c_j·φ_j for series coefficients c_j, where φ_j = [ε^j ↦ 1].
    pub fn from_unit_values(coeffs: impl IntoIterator<Item = (usize, TSeries<T>)>) -> Self {
        let mut c = Cochain::zero(Parity::Even);
        for (k, v) in coeffs {
            c.set(k, Elem::unit_multiple(v));
        }
        c
    }
}

/// The versal family 𝒜_n truncated at t-order `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnFamily<T> {
    n: usize,
    cap: u32,
    mu: Cochain<T>,
}

impl<T: Field> AnFamily<T> {
    pub fn new(n: usize, cap: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("level n must be at least 1"));
        }
        if cap == 0 {
            return Err(Error::usage("t-order must be at least 1"));
        }
        let mut mu = Cochain::zero(Parity::Odd);
        for k in 0..n {
            mu.set(k, Elem::unit_multiple(TSeries::var(n, cap, k)));
        }
        mu.set(
            n + 1,
            Elem::unit_multiple(TSeries::constant(n, cap, T::ratio(1, n as i64 + 1))),
        );
        Ok(AnFamily { n, cap, mu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn structure_maps(&self) -> &Cochain<T> {
        &self.mu
    }

    /// μ_k(ε^{⊗k}).
    pub fn mu(&self, k: usize) -> Elem<T> {
        self.mu.value(k).cloned().unwrap_or_else(|| Elem::zero(self.n, self.cap))
    }

    /// Restriction to the central fiber t = 0, i.e. A_n itself.
    pub fn central_fiber(&self) -> Self {
        let mut mu = Cochain::zero(Parity::Odd);
        for (k, v) in &self.mu.values {
            let zero = vec![0; self.n];
            let one = TSeries::constant(self.n, self.cap, v.one.coeff(&zero));
            let eps = TSeries::constant(self.n, self.cap, v.eps.coeff(&zero));
            mu.set(*k, Elem { one, eps });
        }
        AnFamily { n: self.n, cap: self.cap, mu }
    }

    pub fn is_central(&self) -> bool {
        self.mu
            .values
            .values()
            .all(|v| v.one.terms().chain(v.eps.terms()).all(|(m, _)| degree(m) == 0))
    }

    /// Evaluates μ on a list of generators with the strict-unit rules
    /// μ_2(1, a) = a, μ_2(a, 1) = (-1)^{|a|} a and μ_k(.., 1, ..) = 0 otherwise.
    pub fn eval_mu(&self, inputs: &[Gen]) -> Elem<T> {
        eval_with_unit(inputs, |k| self.mu(k), self.n, self.cap)
    }
}

/// Shared evaluator for structure maps that treat 1 as a strict unit.
pub(crate) fn eval_with_unit<T: Field>(
    inputs: &[Gen],
    on_eps: impl Fn(usize) -> Elem<T>,
    nvars: usize,
    cap: u32,
) -> Elem<T> {
    if inputs.iter().any(|&g| g == Gen::One) {
        if inputs.len() != 2 {
            return Elem::zero(nvars, cap);
        }
        return match (inputs[0], inputs[1]) {
            (Gen::One, x) => Elem::gen(x, nvars, cap),
            (x, Gen::One) => {
                let e = Elem::gen(x, nvars, cap);
                if x.is_odd() {
                    Elem { one: -e.one, eps: -e.eps }
                } else {
                    e
                }
            }
            _ => unreachable!(),
        };
    }
    on_eps(inputs.len())
}

/// KS(∂/∂t_j) = [ε^j ↦ 1].
pub fn ks_map<T: Field>(j: usize, n: usize, cap: u32) -> Result<Cochain<T>> {
    if j >= n {
        return Err(Error::usage(format!("ks_map: direction {j} out of range for n={n}")));
    }
    Ok(Cochain::from_unit_values([(j, TSeries::one(n, cap))]))
}

/// Σ_k (2-k) μ_k, the Kodaira-Spencer class of the weight-rescaling.
pub fn ks_euler_cochain<T: Field>(fam: &AnFamily<T>) -> Cochain<T> {
    let mut c = Cochain::zero(Parity::Even);
    for (k, v) in &fam.mu.values {
        let f = T::from_int(2 - *k as i64);
        c.set(*k, Elem { one: v.one.scale(&f), eps: v.eps.scale(&f) });
    }
    c
}

/// Rational weights for the A_n family.
///
/// Inside μ the parameter t_j carries weight 2 - 2j/(n+1), which makes μ_k of
/// weight 2-k; as a coefficient of a chain, t_j carries the dual weight
/// 2j/(n+1) - 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub n: usize,
}

impl WeightTable {
    pub fn new(n: usize) -> Self {
        WeightTable { n }
    }

    fn np1(&self) -> i64 {
        self.n as i64 + 1
    }

    pub fn eps<T: Field>(&self) -> T {
        T::ratio(self.n as i64 - 1, self.np1())
    }

    pub fn u<T: Field>(&self) -> T {
        T::from_int(-2)
    }

    /// Weight of t_j as a chain coefficient.
    pub fn t_coeff<T: Field>(&self, j: usize) -> T {
        T::ratio(2 * j as i64, self.np1()) - T::from_int(2)
    }

    /// Weight of t_j as it appears inside the structure maps.
    pub fn t_param<T: Field>(&self, j: usize) -> T {
        T::from_int(2) - T::ratio(2 * j as i64, self.np1())
    }

    pub fn word<T: Field>(&self, head: Gen, tail: usize) -> T {
        match head {
            Gen::One => T::ratio(2 * tail as i64, self.np1()),
            Gen::Eps => T::ratio(2 * tail as i64 + 1 - self.n as i64, self.np1()),
        }
    }

    pub fn monomial<T: Field>(&self, m: &[u16]) -> T {
        m.iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &e)| acc + self.t_coeff::<T>(j) * T::from_int(e as i64))
    }

    /// Weight of head|ε^tail · u^upow · t^m.
    pub fn weight_of<T: Field>(&self, head: Gen, tail: usize, upow: i64, m: &[u16]) -> T {
        self.word::<T>(head, tail) + self.u::<T>() * T::from_int(upow) + self.monomial::<T>(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    #[test]
    fn family_n2() {
        let f = AnFamily::<Scalar>::new(2, 3).unwrap();
        assert_eq!(f.mu(0).one, TSeries::var(2, 3, 0));
        assert_eq!(f.mu(1).one, TSeries::var(2, 3, 1));
        assert!(f.mu(2).is_zero());
        assert_eq!(f.mu(3).one, TSeries::constant(2, 3, q(1, 3)));
        assert!(f.mu(4).is_zero());
        for k in 0..5 {
            assert!(f.mu(k).eps.is_zero());
        }
    }

    #[test]
    fn family_n1_and_central_fiber() {
        let f = AnFamily::<Scalar>::new(1, 2).unwrap();
        assert_eq!(f.mu(0).one, TSeries::var(1, 2, 0));
        assert_eq!(f.mu(2).one, TSeries::constant(1, 2, q(1, 2)));
        for n in 1..6 {
            let c = AnFamily::<Scalar>::new(n, 3).unwrap().central_fiber();
            assert!(c.is_central());
            let nonzero: Vec<usize> = c.structure_maps().values.keys().copied().collect();
            assert_eq!(nonzero, vec![n + 1]);
            assert_eq!(c.mu(n + 1).one.constant_term(), q(1, n as i64 + 1));
        }
        assert!(AnFamily::<Scalar>::new(0, 2).is_err());
    }

    #[test]
    fn pairing_values() {
        let one = Elem::<Scalar>::gen(Gen::One, 1, 2);
        let eps = Elem::<Scalar>::gen(Gen::Eps, 1, 2);
        assert_eq!(cyclic_pairing(&one, &eps).constant_term(), q(1, 1));
        assert!(cyclic_pairing(&one, &one).is_zero());
        assert!(cyclic_pairing(&eps, &eps).is_zero());
        let a = Elem {
            one: TSeries::constant(1, 2, q(3, 1)),
            eps: TSeries::constant(1, 2, q(5, 1)),
        };
        assert_eq!(cyclic_pairing(&a, &eps).constant_term(), q(3, 1));
    }

    #[test]
    fn ks_classes() {
        let k0 = ks_map::<Scalar>(0, 3, 2).unwrap();
        assert_eq!(k0.values.keys().copied().collect::<Vec<_>>(), vec![0]);
        let k2 = ks_map::<Scalar>(2, 3, 2).unwrap();
        assert_eq!(k2.value(2).unwrap().one, TSeries::one(3, 2));
        assert!(ks_map::<Scalar>(3, 3, 2).is_err());
    }

    #[test]
    fn euler_cochain() {
        let f = AnFamily::<Scalar>::new(2, 3).unwrap();
        let c = ks_euler_cochain(&f.central_fiber());
        assert_eq!(c.values.len(), 1);
        assert_eq!(c.value(3).unwrap().one.constant_term(), q(-1, 3));
        let f3 = AnFamily::<Scalar>::new(3, 3).unwrap();
        let c3 = ks_euler_cochain(&f3);
        assert!(c3.value(2).is_none());
        assert_eq!(c3.value(1).unwrap().one, TSeries::var(3, 3, 1));
        assert_eq!(c3.value(0).unwrap().one, TSeries::var(3, 3, 0).scale(&q(2, 1)));
        assert_eq!(c3.value(4).unwrap().one.constant_term(), q(-2, 4));
    }

    #[test]
    fn weights() {
        for n in 1..7usize {
            let w = WeightTable::new(n);
            let nn = n as i64;
            let zero = vec![0u16; n];
            assert_eq!(w.weight_of::<Scalar>(Gen::Eps, n - 1, 0, &zero), q(nn - 1, nn + 1));
            assert_eq!(w.weight_of::<Scalar>(Gen::One, 0, 0, &zero), q(0, 1));
            for l in 0..5usize {
                let tail = n - 1 + (n + 1) * l;
                assert_eq!(w.weight_of::<Scalar>(Gen::Eps, tail, l as i64, &zero), q(nn - 1, nn + 1));
            }
        }
    }

    #[test]
    fn structure_maps_have_weight_two_minus_k() {
        for n in 1..7usize {
            let w = WeightTable::new(n);
            let f = AnFamily::<Scalar>::new(n, 2).unwrap();
            for k in f.structure_maps().values.keys().copied() {
                // output 1 has weight 0; the parameter contributes its μ-side weight
                let param = if k < n { w.t_param::<Scalar>(k) } else { q(0, 1) };
                let shift = param - w.eps::<Scalar>() * Scalar::from_int(k as i64);
                assert_eq!(shift, Scalar::from_int(2 - k as i64), "n={n} k={k}");
            }
        }
    }

    /// ⟨μ_k(a_1..a_k), a_{k+1}⟩ picks up exactly the Koszul sign of moving
    /// a_{k+1} to the front, for every word over {1, ε} of length <= n+2.
    #[test]
    fn cyclic_invariance_on_central_fiber() {
        for n in 1..6usize {
            let f = AnFamily::<Scalar>::new(n, 1).unwrap().central_fiber();
            for len in 1..=n + 2 {
                for mask in 0..(1u32 << len) {
                    let w: Vec<Gen> = (0..len)
                        .map(|i| if mask >> i & 1 == 1 { Gen::One } else { Gen::Eps })
                        .collect();
                    let val = |w: &[Gen]| {
                        let (last, init) = w.split_last().unwrap();
                        cyclic_pairing(&f.eval_mu(init), &Elem::gen(*last, n, 1)).constant_term()
                    };
                    let mut rot = vec![w[len - 1]];
                    rot.extend_from_slice(&w[..len - 1]);
                    let moved = w[len - 1].shifted_odd();
                    let rest = w[..len - 1].iter().filter(|g| g.shifted_odd()).count() % 2 == 1;
                    let sign = if moved && rest { q(-1, 1) } else { q(1, 1) };
                    assert_eq!(val(&rot), sign * val(&w), "n={n} word={w:?}");
                }
            }
        }
    }
}
