use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Exact coefficient field used by every computation.
///
/// Blanket-implemented for anything that behaves like a field: in practice
/// `BigRational` (the crate default) or a fixed-width `Ratio` in tests.
pub trait Field:
    Num + Clone + Neg<Output = Self> + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer not representable in field")
    }

    fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_int(p) / Self::from_int(q)
    }
}

impl<T> Field for T where
    T: Num + Clone + Neg<Output = T> + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// c_{k,l} = prod_{j<l} (k + 1 + j(n+1)), with c_{k,0} = 1.
pub fn coeff_c<T: Field>(k: usize, l: usize, n: usize) -> crate::Result<T> {
    if n == 0 || k >= n {
        return Err(crate::Error::usage(format!(
            "coeff_c: index k={k} out of range for n={n}"
        )));
    }
    let mut acc = T::one();
    for j in 0..l {
        acc = acc * T::from_int((k + 1 + j * (n + 1)) as i64);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    #[test]
    fn c_values() {
        for n in 1..5 {
            assert_eq!(coeff_c::<Scalar>(0, 0, n).unwrap(), Scalar::from_int(1));
            assert_eq!(coeff_c::<Scalar>(n - 1, 1, n).unwrap(), Scalar::from_int(n as i64));
        }
        assert_eq!(coeff_c::<Scalar>(1, 2, 2).unwrap(), Scalar::from_int(10));
        assert!(coeff_c::<Scalar>(3, 1, 3).is_err());
    }

    #[test]
    fn c_recursion() {
        for n in 1..6usize {
            for k in 0..n {
                for l in 0..6usize {
                    let a: Scalar = coeff_c(k, l + 1, n).unwrap();
                    let b: Scalar = coeff_c(k, l, n).unwrap();
                    assert_eq!(a, b * Scalar::from_int((k + 1 + l * (n + 1)) as i64));
                }
            }
        }
    }

    #[test]
    fn ratio_in_lowest_terms() {
        let x = Scalar::ratio(4, -6);
        assert_eq!(x.to_string(), "-2/3");
        assert!(x.denom() > &num_bigint::BigInt::from(0));
    }
}
