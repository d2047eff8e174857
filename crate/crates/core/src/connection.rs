//! The u-direction connection, the Getzler-Gauss-Manin connection, the Euler
//! field and the trivialization exp(-Σ t_i b_i / u).

use std::collections::BTreeMap;

use crate::bar::{
    cap_b11, cap_big_b11, cyclic_d, d_du, gamma_op, lie_derivative, BarWord, UChain,
};
use crate::coeffs::{Field, TSeries};
use crate::decompose::Decomposer;
use crate::family::{ks_euler_cochain, ks_map, AnFamily, Cochain};
use crate::report::CheckReport;
use crate::Result;

/// A derivation Σ_j v_j ∂/∂t_j of R.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseVectorField<T> {
    pub n: usize,
    pub cap: u32,
    pub coeffs: BTreeMap<usize, TSeries<T>>,
}

impl<T: Field> BaseVectorField<T> {
    /// ∂/∂t_j.
    pub fn coordinate(n: usize, cap: u32, j: usize) -> Self {
        BaseVectorField { n, cap, coeffs: BTreeMap::from([(j, TSeries::one(n, cap))]) }
    }

    pub fn apply(&self, f: &TSeries<T>) -> Result<TSeries<T>> {
        let mut acc = TSeries::zero(f.nvars(), f.cap());
        for (&j, v) in &self.coeffs {
            acc += &f.derivative(j).checked_mul(v)?;
        }
        Ok(acc)
    }

    /// KS(v) = Σ_j v_j·φ_j.
    pub fn ks_cochain(&self) -> Cochain<T> {
        Cochain::from_unit_values(self.coeffs.iter().map(|(&j, v)| (j, v.clone())))
    }
}

/// E = Σ_j (1 - j/(n+1)) t_j ∂/∂t_j.
pub fn euler_field<T: Field>(n: usize, cap: u32) -> BaseVectorField<T> {
    let coeffs = (0..n)
        .map(|j| {
            let c = T::one() - T::ratio(j as i64, n as i64 + 1);
            (j, TSeries::var(n, cap, j).scale(&c))
        })
        .collect();
    BaseVectorField { n, cap, coeffs }
}

/// ∂_u + Γ/2u + B^{1|1}(KS_E)/2u + b^{1|1}(KS_E)/2u², where KS_E = Σ(2-k)μ_k.
/// The result is exact through u^{u_max - 2}.
pub fn u_connection<T: Field>(x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    let ks = ks_euler_cochain(fam);
    let half = T::ratio(1, 2);
    let g = gamma_op(x).add(&cap_big_b11(&ks, x)?)?.shift_u(-1).scale(&half);
    let s = cap_b11(&ks, x, fam)?.shift_u(-2).scale(&half);
    d_du(x).add(&g)?.add(&s)
}

/// ∇_{u∂/∂u} = u·u_connection.
pub fn u_connection_u<T: Field>(x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    Ok(u_connection(x, fam)?.shift_u(1))
}

/// ∇_v = v - u^{-1}b^{1|1}(KS(v)) - B^{1|1}(KS(v)).
///
/// The t-derivative loses one order of t-precision: the result is exact for
/// t-degree below cap - 1 and carries no terms of degree cap - 1.
pub fn ggm_connection<T: Field>(v: &BaseVectorField<T>, x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    let cap = x.cap();
    let deriv = x.map_coeffs(|c| v.apply(c).expect("shapes agree")).t_truncate(cap.saturating_sub(1));
    let ks = v.ks_cochain();
    let small = cap_b11(&ks, x, fam)?.shift_u(-1);
    let big = cap_big_b11(&ks, x)?;
    deriv.sub(&small)?.sub(&big)
}

/// Σ_i t_i·b^{1|1}(φ_i)(x) with the central-fiber cap operators.
pub fn cap_sum<T: Field>(x: &UChain<T>, n: usize) -> Result<UChain<T>> {
    let cap = x.cap();
    let central = AnFamily::<T>::new(n, cap)?.central_fiber();
    let mut acc = x.empty_like();
    for i in 0..n {
        let phi = ks_map(i, n, cap)?;
        let term = cap_b11(&phi, x, &central)?.mul_series(&TSeries::var(n, cap, i))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// exp(-Σ_i t_i b_i / u)·x, summed through t-order `order - 1`.
pub fn trivialization_apply<T: Field>(x: &UChain<T>, n: usize, order: u32) -> Result<UChain<T>> {
    let mut term = x.clone();
    let mut acc = x.clone();
    for r in 1..order.max(1) {
        term = cap_sum(&term, n)?.shift_u(-1).scale(&T::ratio(-1, r as i64));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn euler_u<T: Field>(x: &UChain<T>) -> UChain<T> {
    let mut out = x.empty_like();
    for (&(p, w), c) in x.terms() {
        out.add_term(p, w, c.scale(&T::from_int(2 * p))).expect("same shape");
    }
    out
}

/// [2u∂_u + Γ, b+uB] + L_{KS_E} = b+uB on all words with tail ≤ max_tail and
/// u-powers 0 and 1.
pub fn check_u_commutator<T: Field>(fam: &AnFamily<T>, max_tail: usize) -> Result<CheckReport> {
    let n = fam.n();
    let ks = ks_euler_cochain(fam);
    let bar_cap = max_tail + n + 3;
    let a = |y: &UChain<T>| euler_u(y).add(&gamma_op(y));
    let mut failure = None;
    'outer: for k in 0..=max_tail {
        for w in [BarWord::one(k), BarWord::eps(k)] {
            for p in 0..2 {
                let x = UChain::basis(w, p, n, fam.cap(), bar_cap, 4)?;
                let dx = cyclic_d(&x, fam)?;
                let lhs = a(&dx)?.sub(&cyclic_d(&a(&x)?, fam)?)?.add(&lie_derivative(&ks, &x)?)?;
                let diff = lhs.sub(&dx)?;
                if !diff.is_zero() {
                    failure = Some(format!("{w}·u^{p}: residual {}", diff.dump().trim_end()));
                    break 'outer;
                }
            }
        }
    }
    Ok(CheckReport::from_failure(
        "[2u d/du + Gamma + t d/dt, b+uB] = b+uB",
        format!("n={}, t-order<{}, tail<={max_tail}, u^0..u^1", n, fam.cap()),
        failure,
    ))
}

/// Outcome of the good-splitting check.
#[derive(Clone, Debug)]
pub struct GoodSplitting<T> {
    pub report: CheckReport,
    /// ∇_{u∂u}ω = r·ω + (u^{-1} terms), for ω the last basis element.
    pub r: Option<T>,
}

/// Checks that ∇_{u∂u} preserves u^{-1}·span(b_j)[u^{-1}] on u^m b_j for
/// -depth ≤ m ≤ -1, and extracts r for ω = b_{n-1}. The basis must be t-free
/// and known through u^{depth+2}.
pub fn check_good_splitting<T: Field>(basis: &[UChain<T>], n: usize, depth: i64, bar_cap: usize) -> Result<GoodSplitting<T>> {
    let central = AnFamily::<T>::new(n, 1)?;
    let (lo, hi) = (-depth - 1, 1);
    let dec = Decomposer::new(n, basis, lo, hi, bar_cap)?;
    let range = format!("n={n}, u^m·b_j for {}<=m<=-1", -depth);
    let mut failure = None;
    'outer: for (j, b) in basis.iter().enumerate() {
        for m in -depth..=-1 {
            let y = u_connection_u(&b.shift_u(m), &central)?;
            let c = match dec.decompose(&y) {
                Ok(c) => c,
                Err(e) => {
                    failure = Some(format!("u^{m}·b_{j}: {e}"));
                    break 'outer;
                }
            };
            if let Some(((jj, mm), v)) = c.coords.iter().find(|((_, mm), _)| *mm >= 0) {
                failure = Some(format!("u^{m}·b_{j} has coordinate {v} on u^{mm}·b_{jj}"));
                break 'outer;
            }
        }
    }
    let omega = basis.last().expect("non-empty basis");
    let y = u_connection_u(omega, &central)?;
    let mut r = None;
    match dec.decompose(&y) {
        Ok(c) => {
            let stray = c.coords.iter().find(|((jj, mm), _)| *mm > 0 || (*mm == 0 && *jj != n - 1));
            if let Some(((jj, mm), v)) = stray {
                failure.get_or_insert(format!("omega has coordinate {v} on u^{mm}·b_{jj}"));
            } else {
                r = Some(c.coeff(n - 1, 0).map(|s| s.constant_term()).unwrap_or_else(T::zero));
            }
        }
        Err(e) => {
            failure.get_or_insert(format!("omega: {e}"));
        }
    }
    Ok(GoodSplitting { report: CheckReport::from_failure("good splitting, omega-compatible", range, failure), r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::Shape;
    use crate::pairing::SplittingBasis;
    use crate::Scalar;

    #[test]
    fn euler_field_values() {
        let e = euler_field::<Scalar>(2, 4);
        let mut f = TSeries::zero(2, 4);
        f.add_term(vec![1, 1], Scalar::from_int(1));
        let ef = e.apply(&f).unwrap();
        assert_eq!(ef.coeff(&[1, 1]), Scalar::ratio(5, 3));
        assert_eq!(e.coeffs[&1].coeff(&[0, 1]), Scalar::ratio(2, 3));
    }

    #[test]
    fn commutator_identity() {
        for n in 1..5 {
            let f = AnFamily::<Scalar>::new(n, 1).unwrap();
            assert!(check_u_commutator(&f, 3 * (n + 1)).unwrap().passed());
            let f = AnFamily::<Scalar>::new(n, 3).unwrap();
            assert!(check_u_commutator(&f, 2 * (n + 1)).unwrap().passed());
        }
    }

    #[test]
    fn pole_orders() {
        let n = 2;
        let f = AnFamily::<Scalar>::new(n, 1).unwrap();
        let x = UChain::basis(BarWord::eps(5), 0, n, 1, 20, 4).unwrap();
        assert!(u_connection(&x, &f).unwrap().min_u().unwrap() >= -2);
        let v = BaseVectorField::coordinate(n, 1, 1);
        assert!(ggm_connection(&v, &x, &f).unwrap().min_u().unwrap() >= -1);
    }

    #[test]
    fn good_splitting_and_r() {
        for n in 1..5 {
            let depth = 2;
            let bar_cap = (n + 1) * (depth as usize + 5) + n;
            let shape = Shape { nvars: n, cap: 1, bar_cap, u_max: depth + 3 };
            let b = SplittingBasis::<Scalar>::new(n, shape).unwrap();
            let g = check_good_splitting(&b.s, n, depth, bar_cap).unwrap();
            assert!(g.report.passed(), "{}", g.report);
            assert_eq!(g.r.unwrap(), Scalar::ratio(-(n as i64 - 1), 2 * (n as i64 + 1)));
        }
    }

    #[test]
    fn perturbed_splitting_fails() {
        let n = 3;
        let depth = 2;
        let bar_cap = (n + 1) * (depth as usize + 5) + n;
        let shape = Shape { nvars: n, cap: 1, bar_cap, u_max: depth + 4 };
        let b = SplittingBasis::<Scalar>::new(n, shape).unwrap();
        let mut s = b.s.clone();
        s[0] = s[0].add(&s[1].shift_u(1)).unwrap().truncate_u(depth + 3).unwrap();
        let g = check_good_splitting(&s, n, depth, bar_cap).unwrap();
        assert!(!g.report.passed());
    }

    #[test]
    fn trivialization_at_zero_is_identity() {
        let n = 3;
        let x = UChain::<Scalar>::basis(BarWord::eps(2), 0, n, 3, 20, 4).unwrap();
        let tx = trivialization_apply(&x, n, 3).unwrap();
        assert!(tx.central().sub(&x).unwrap().is_zero());
        let a = cap_sum(&x, n).unwrap().shift_u(-1);
        assert!(a.terms().all(|(_, c)| c.order() == Some(1)));
        assert!(a.min_u().unwrap() >= -1);
    }
}
