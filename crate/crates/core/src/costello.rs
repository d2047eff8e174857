//! Genus-zero three-point and genus-one one-point invariants from the
//! coproduct and the Mukai pairing.

use crate::bar::BarWord;
use crate::coeffs::Field;
use crate::pairing::{coproduct, mukai_words};
use crate::{Error, Result};

fn check_index(n: usize, k: usize) -> Result<()> {
    if k >= n {
        return Err(Error::usage(format!("homology index {k} out of range for n={n}")));
    }
    Ok(())
}

/// ⟨[ε|ε^i], [ε|ε^j], [ε|ε^k]⟩_{0,3}
/// = (1/2) Σ_{Δ(ε|ε^k) = Σ ε|ε^s ⊗ ε|ε^t} (⟨j,s⟩⟨i,t⟩ + ⟨j,t⟩⟨i,s⟩).
pub fn inv_03<T: Field>(n: usize, i: usize, j: usize, k: usize) -> Result<T> {
    for x in [i, j, k] {
        check_index(n, x)?;
    }
    let (ei, ej) = (BarWord::eps(i), BarWord::eps(j));
    let mut acc = T::zero();
    for (s, t) in coproduct(BarWord::eps(k))? {
        let a: T = mukai_words::<T>(n, ej, s)? * mukai_words::<T>(n, ei, t)?;
        let b: T = mukai_words::<T>(n, ej, t)? * mukai_words::<T>(n, ei, s)?;
        acc = acc + a + b;
    }
    Ok(acc * T::ratio(1, 2))
}

/// The order-λ term of the one-insertion expansion of the lift of ε|ε^k.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTerm<T> {
    pub k: usize,
    /// (i, j) with i + j = k, each with coefficient 1/2.
    pub pairs: Vec<((usize, usize), T)>,
    /// Σ_{i+j=k} (1/2)⟨(i+1) ε|ε^{i+n+1}, ε|ε^j⟩.
    pub correction: T,
}

pub fn lambda_expansion<T: Field>(n: usize, k: usize) -> Result<LambdaTerm<T>> {
    check_index(n, k)?;
    let half = T::ratio(1, 2);
    let mut pairs = Vec::new();
    let mut correction = T::zero();
    for (a, b) in coproduct(BarWord::eps(k))? {
        let (i, j) = (a.tail, b.tail);
        pairs.push(((i, j), half.clone()));
        let m: T = mukai_words(n, BarWord::eps(i + n + 1), BarWord::eps(j))?;
        correction = correction + half.clone() * T::from_int(i as i64 + 1) * m;
    }
    Ok(LambdaTerm { k, pairs, correction })
}

/// ⟨[ε|ε^k] u^l⟩_{1,1} for l ∈ {0, 1}.
pub fn inv_11<T: Field>(n: usize, k: usize, l: usize) -> Result<T> {
    check_index(n, k)?;
    match l {
        // the constant term of the λ-coefficient is the Mukai correction
        0 => Ok(lambda_expansion::<T>(n, k)?.correction),
        // (1/24)·(Mukai ∘ coproduct)
        1 => {
            let mut acc = T::zero();
            for (a, b) in coproduct(BarWord::eps(k))? {
                acc = acc + mukai_words::<T>(n, a, b)?;
            }
            Ok(acc * T::ratio(1, 24))
        }
        _ => Err(Error::Unsupported(format!("descendant u^{l}: only l = 0, 1 are computed"))),
    }
}
