//! Mukai and higher residue pairings, the coproduct on HH, and the
//! weight-preserving splitting s.

use crate::bar::{BarWord, Shape, UChain};
use crate::coeffs::{coeff_c, Field, TSeries, ULaurent};
use crate::family::{Gen, WeightTable};
use crate::{Error, Result};

/// ⟨ε|ε^i, ε|ε^j⟩ = δ_{i+j=n-1}.
pub fn mukai_words<T: Field>(n: usize, a: BarWord, b: BarWord) -> Result<T> {
    if a.head == Gen::One || b.head == Gen::One {
        return Err(Error::usage(format!(
            "Mukai pairing is defined on ε-head representatives, got {a} and {b}"
        )));
    }
    Ok(if a.tail + b.tail + 1 == n { T::one() } else { T::zero() })
}

/// Bilinear extension of [`mukai_words`] to u-free chains.
pub fn mukai_pairing<T: Field>(n: usize, x: &UChain<T>, y: &UChain<T>) -> Result<TSeries<T>> {
    for c in [x, y] {
        if c.terms().any(|((p, _), _)| *p != 0) {
            return Err(Error::usage("Mukai pairing takes u-free chains"));
        }
    }
    let mut acc = TSeries::zero(x.nvars(), x.cap());
    for ((_, a), ca) in x.terms() {
        for ((_, b), cb) in y.terms() {
            let v: T = mukai_words(n, *a, *b)?;
            if !v.is_zero() {
                acc += &ca.checked_mul(cb)?.scale(&v);
            }
        }
    }
    Ok(acc)
}

/// ⟨αu^i, βu^j⟩ = (-1)^i ⟨α, β⟩ u^{i+j}.
pub fn hres_pairing<T: Field>(n: usize, x: &UChain<T>, y: &UChain<T>) -> Result<ULaurent<T>> {
    let mut out = ULaurent::zero(x.nvars(), x.cap());
    for ((i, a), ca) in x.terms() {
        for ((j, b), cb) in y.terms() {
            let v: T = mukai_words(n, *a, *b)?;
            if v.is_zero() {
                continue;
            }
            let v = if i.rem_euclid(2) == 1 { -v } else { v };
            out.add_term(i + j, &ca.checked_mul(cb)?.scale(&v));
        }
    }
    Ok(out)
}

/// Δ(ε|ε^k) = Σ_{i+j=k} ε|ε^i ⊗ ε|ε^j.
pub fn coproduct(w: BarWord) -> Result<Vec<(BarWord, BarWord)>> {
    if w.head == Gen::One {
        return Err(Error::usage(format!("coproduct is defined on ε-head words, got {w}")));
    }
    Ok((0..=w.tail).map(|i| (BarWord::eps(i), BarWord::eps(w.tail - i))).collect())
}

/// s_j = Σ_l (-1)^l c_{j,l} ε|ε^{j+(n+1)l} u^l through u^{shape.u_max}.
pub fn splitting_s<T: Field>(j: usize, n: usize, shape: Shape) -> Result<UChain<T>> {
    if j >= n {
        return Err(Error::usage(format!("splitting index {j} out of range for n={n}")));
    }
    let mut s = UChain::with_shape(shape);
    for l in 0..=shape.u_max.max(-1) {
        let c: T = coeff_c(j, l as usize, n)?;
        let c = if l % 2 == 1 { -c } else { c };
        let word = BarWord::eps(j + (n + 1) * l as usize);
        s.add_term(l, word, TSeries::constant(shape.nvars, shape.cap, c))?;
    }
    Ok(s)
}

/// The splitting {s_0, .., s_{n-1}} at a fixed precision.
#[derive(Clone, Debug)]
pub struct SplittingBasis<T> {
    pub n: usize,
    pub s: Vec<UChain<T>>,
    pub u_cap: i64,
}

impl<T: Field> SplittingBasis<T> {
    pub fn new(n: usize, shape: Shape) -> Result<Self> {
        let s = (0..n).map(|j| splitting_s(j, n, shape)).collect::<Result<Vec<_>>>()?;
        Ok(SplittingBasis { n, s, u_cap: shape.u_max })
    }

    /// Weight of s_j.
    pub fn weight(&self, j: usize) -> T {
        WeightTable::new(self.n).word(Gen::Eps, j)
    }
}

/// Φ(ε|ε^i) = x^{n-1-i}.
pub fn phi_iso(n: usize, i: usize) -> Result<usize> {
    if i >= n {
        return Err(Error::usage(format!("index {i} out of range for n={n}")));
    }
    Ok(n - 1 - i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::cyclic_d;
    use crate::family::AnFamily;
    use crate::Scalar;

    fn shape(n: usize, u_max: i64) -> Shape {
        Shape { nvars: n, cap: 2, bar_cap: (n + 1) * (u_max.max(0) as usize + 2), u_max }
    }

    fn word(n: usize, w: BarWord, p: i64) -> UChain<Scalar> {
        UChain::basis(w, p, n, 2, 100, 10).unwrap()
    }

    #[test]
    fn mukai_table() {
        for n in 1..9 {
            for i in 0..n {
                for j in 0..n {
                    let v: Scalar = mukai_words(n, BarWord::eps(i), BarWord::eps(j)).unwrap();
                    assert_eq!(v, Scalar::from_int((i + j + 1 == n) as i64));
                }
            }
        }
        assert!(mukai_words::<Scalar>(3, BarWord::one(1), BarWord::eps(1)).is_err());
    }

    #[test]
    fn hres_sign_rule() {
        let n = 3;
        let a = word(n, BarWord::eps(1), 1);
        let b = word(n, BarWord::eps(1), 0);
        let v = hres_pairing(n, &a, &b).unwrap();
        assert_eq!(v.coeff(1).constant_term(), Scalar::from_int(-1));
        let c = word(n, BarWord::eps(1), 2);
        let v = hres_pairing(n, &b, &c).unwrap();
        assert_eq!(v.coeff(2).constant_term(), Scalar::from_int(1));
    }

    #[test]
    fn coproduct_terms() {
        let d = coproduct(BarWord::eps(2)).unwrap();
        assert_eq!(d, vec![
            (BarWord::eps(0), BarWord::eps(2)),
            (BarWord::eps(1), BarWord::eps(1)),
            (BarWord::eps(2), BarWord::eps(0)),
        ]);
        assert_eq!(coproduct(BarWord::eps(0)).unwrap().len(), 1);
        assert!(coproduct(BarWord::one(0)).is_err());
    }

    #[test]
    fn splitting_n2() {
        let s = splitting_s::<Scalar>(1, 2, shape(2, 3)).unwrap();
        let c = |p, m| s.coeff(p, BarWord::eps(m)).constant_term();
        assert_eq!(c(0, 1), Scalar::from_int(1));
        assert_eq!(c(1, 4), Scalar::from_int(-2));
        assert_eq!(c(2, 7), Scalar::from_int(10));
        assert_eq!(c(3, 10), Scalar::from_int(-80));
    }

    #[test]
    fn splitting_closed_and_homogeneous() {
        for n in 1..7 {
            let f = AnFamily::<Scalar>::new(n, 2).unwrap().central_fiber();
            let wt = WeightTable::new(n);
            let b = SplittingBasis::<Scalar>::new(n, shape(n, 6)).unwrap();
            for (j, s) in b.s.iter().enumerate() {
                assert!(cyclic_d(s, &f).unwrap().is_zero(), "n={n} j={j}");
                for ((p, w), _) in s.terms() {
                    let x: Scalar = wt.weight_of(w.head, w.tail, *p, &vec![0; n]);
                    assert_eq!(x, Scalar::ratio(2 * j as i64 + 1 - n as i64, n as i64 + 1));
                }
                for (i, t) in b.s.iter().enumerate() {
                    let h = hres_pairing(n, s, t).unwrap();
                    assert!(h.is_constant());
                    assert_eq!(h.coeff(0).constant_term(), Scalar::from_int((i + j + 1 == n) as i64));
                }
            }
        }
    }

    #[test]
    fn phi_is_an_involution() {
        for n in 1..6 {
            for i in 0..n {
                assert_eq!(phi_iso(n, phi_iso(n, i).unwrap()).unwrap(), i);
            }
        }
        assert!(phi_iso(3, 3).is_err());
    }
}
