//! Order-by-order construction of the primitive form ζ of the versal A_n
//! family and its expansion
//!
//!   exp(-Σ t_i b_i / u)·ζ = s_{n-1} + Σ_{k≥1} u^{-k} J_{-k} + (b+uB)(…),
//!
//! with J_{-k} = Σ_j J_{-k}[j]·s_j.
//!
//! Precision bookkeeping: with N = order and U = u_cap, the t-degree k part
//! ζ^{(k)} is kept through u^{U+N-k}, since applying exp(-A), A = Σ t_i b_i/u,
//! to it loses one u-power per t-degree gained. Every order then sees exact
//! data in the window u^{-N}..u^{-1}.

use std::collections::BTreeMap;

use crate::bar::{cyclic_d, BarWord, Shape, UChain};
use crate::coeffs::{monomials_of_degree, Field, TSeries};
use crate::connection::{cap_sum, check_good_splitting};
use crate::decompose::Decomposer;
use crate::family::AnFamily;
use crate::homology::{scaled_monomial_weight, scaled_word_weight};
use crate::pairing::SplittingBasis;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub n: usize,
    /// ζ is computed through t-degree `order`.
    pub order: u32,
    pub u_cap: i64,
    pub bar_cap: Option<usize>,
}

impl SolverConfig {
    /// Defaults: u_cap = order + 2, automatic bar cap.
    pub fn new(n: usize, order: u32) -> Self {
        SolverConfig { n, order, u_cap: order as i64 + 2, bar_cap: None }
    }

    /// (n+1)(N + u_cap + 1) + n.
    pub fn auto_bar_cap(&self) -> usize {
        (self.n + 1) * (self.order as usize + self.u_cap.max(0) as usize + 1) + self.n
    }

    pub fn bar_cap(&self) -> usize {
        self.bar_cap.unwrap_or_else(|| self.auto_bar_cap())
    }
}

#[derive(Clone, Debug)]
pub struct SolverState<T> {
    pub n: usize,
    pub order: u32,
    pub u_cap: i64,
    pub bar_cap: usize,
    /// s_0..s_{n-1} through u^{u_cap+order}, coefficients of t-cap order+1.
    pub basis: SplittingBasis<T>,
    /// ζ through u^{u_cap}.
    pub zeta: UChain<T>,
    /// ζ^{(k)}, each at its working precision u^{u_cap+order-k}.
    pub parts: Vec<UChain<T>>,
    /// depth k ↦ (J_{-k}[0], .., J_{-k}[n-1]).
    pub j_terms: BTreeMap<i64, Vec<TSeries<T>>>,
    /// ∇_{u∂u}ω = r·ω + (u^{-1} terms).
    pub r: T,
}

impl<T: Field> SolverState<T> {
    /// J_{-k}[j], zero when absent.
    pub fn j_coeff(&self, depth: i64, j: usize) -> TSeries<T> {
        self.j_terms
            .get(&depth)
            .map(|v| v[j].clone())
            .unwrap_or_else(|| TSeries::zero(self.n, self.order + 1))
    }

    /// Coefficient cap of every series in the state.
    pub fn t_cap(&self) -> u32 {
        self.order + 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j: serde_json::Map<String, serde_json::Value> = self
            .j_terms
            .iter()
            .map(|(d, v)| {
                let coords: serde_json::Map<String, serde_json::Value> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_zero())
                    .map(|(i, s)| (format!("s_{i}"), s.to_json()))
                    .collect();
                (format!("u^-{d}"), serde_json::Value::Object(coords))
            })
            .collect();
        let zeta: Vec<serde_json::Value> = self
            .zeta
            .terms()
            .map(|((p, w), c)| serde_json::json!({"u": p, "word": w.to_string(), "coeff": c.to_json()}))
            .collect();
        serde_json::json!({
            "n": self.n,
            "order": self.order,
            "u_cap": self.u_cap,
            "bar_cap": self.bar_cap,
            "r": self.r.to_string(),
            "J": j,
            "zeta": zeta,
        })
    }
}

/// Σ_{r=1}^{k} (-1)^r/r!·A^r ζ^{(k-r)}, extending the cached powers of A.
fn known_part<T: Field>(apow: &mut [Vec<UChain<T>>], k: usize, n: usize) -> Result<UChain<T>> {
    let mut y: Option<UChain<T>> = None;
    let mut fact = T::one();
    for r in 1..=k {
        fact = fact * T::from_int(r as i64);
        let j = k - r;
        while apow[j].len() <= r {
            let next = cap_sum(apow[j].last().expect("seeded"), n)?.shift_u(-1);
            apow[j].push(next);
        }
        let sign = if r % 2 == 1 { -T::one() } else { T::one() };
        let term = apow[j][r].scale(&(sign / fact.clone()));
        y = Some(match y {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    Ok(y.expect("k >= 1"))
}

/// Number of weight-homogeneous u^m·s_j·t^α (m ≥ 0, |α| = k) of the weight
/// of ω: the freedom left in ζ^{(k)} once its poles are fixed.
pub fn lift_ambiguity(n: usize, k: u32, u_cap: i64) -> usize {
    let target = scaled_word_weight(n, BarWord::eps(n - 1));
    let step = 2 * (n as i64 + 1);
    let mut count = 0;
    for mono in monomials_of_degree(n, k) {
        let mw = scaled_monomial_weight(n, &mono);
        for j in 0..n {
            for m in 0..=u_cap {
                if scaled_word_weight(n, BarWord::eps(j)) - step * m + mw == target {
                    count += 1;
                }
            }
        }
    }
    count
}

fn check_weight<T: Field>(n: usize, x: &UChain<T>, k: usize) -> Result<()> {
    let target = scaled_word_weight(n, BarWord::eps(n - 1));
    let step = 2 * (n as i64 + 1);
    for (&(p, w), c) in x.terms() {
        for (mono, _) in c.terms() {
            let wt = scaled_word_weight(n, w) - step * p + scaled_monomial_weight(n, mono);
            if wt != target {
                return Err(Error::Internal(format!(
                    "order {k}: term {w}·u^{p}·t^{mono:?} has scaled weight {wt}, expected {target}"
                )));
            }
        }
    }
    Ok(())
}

pub fn solve_primitive_form<T: Field>(cfg: &SolverConfig) -> Result<SolverState<T>> {
    let (n, order) = (cfg.n, cfg.order);
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    if order < 1 {
        return Err(Error::usage("order must be at least 1"));
    }
    if cfg.u_cap < 0 {
        return Err(Error::usage("u_cap must be nonnegative"));
    }
    let big_n = order as i64;
    let u_cap = cfg.u_cap;
    let bar_cap = cfg.bar_cap();
    let cap = order + 1;
    let top = u_cap + big_n;

    let shape = Shape { nvars: n, cap, bar_cap, u_max: top };
    let basis = SplittingBasis::<T>::new(n, shape)?;
    let dec = Decomposer::new(n, &basis.s, -big_n, -1, bar_cap)?;
    let central = AnFamily::<T>::new(n, cap)?.central_fiber();

    let r = {
        let cshape = Shape { nvars: n, cap: 1, bar_cap: bar_cap.max((n + 1) * 6 + n), u_max: 3 };
        let cb = SplittingBasis::<T>::new(n, cshape)?;
        let g = check_good_splitting(&cb.s, n, 1, cshape.bar_cap)?;
        match g.r {
            Some(r) if g.report.passed() => r,
            _ => return Err(Error::Internal(format!("splitting is not good: {}", g.report))),
        }
    };

    let omega = basis.s[n - 1].clone();
    let mut parts = vec![omega.clone()];
    let mut apow: Vec<Vec<UChain<T>>> = vec![vec![omega]];
    let mut j_terms: BTreeMap<i64, Vec<TSeries<T>>> = BTreeMap::new();

    for k in 1..=order as usize {
        let amb = lift_ambiguity(n, k as u32, top);
        if amb != 0 {
            return Err(Error::RankDeficient(format!(
                "t-order {k}: {amb} weight-homogeneous lifts of the weight of s_{} (n={n})",
                n - 1
            )));
        }
        let p_k = top - k as i64;
        let y = known_part(&mut apow, k, n)?;
        let cls = dec.decompose(&y).map_err(|e| match e {
            Error::NotClosed(m) => Error::NotClosed(format!("t-order {k}: {m}")),
            other => other,
        })?;

        let mut z = y.neg().truncate_u(p_k)?.with_bar_cap(bar_cap + 1)?;
        for (&(j, m), c) in &cls.coords {
            let col = basis.s[j].shift_u(m).mul_series(c)?;
            z = z.add(&col.with_bar_cap(bar_cap + 1)?)?;
            let e = j_terms.entry(-m).or_insert_with(|| vec![TSeries::zero(n, cap); n]);
            e[j] += c;
        }
        let mut w_full = UChain::zero(n, cap, bar_cap + 1, p_k);
        for (&(p, word), c) in cls.witness.terms() {
            w_full.add_term(p, word, c.clone())?;
        }
        let dw = cyclic_d(&w_full, &central)?;
        z = z.add(&dw)?.truncate_u(p_k)?;

        if let Some(p) = z.min_u() {
            if p < 0 {
                return Err(Error::Internal(format!("t-order {k}: correction keeps a u^{p} term")));
            }
        }
        if let Some(t) = z.max_tail() {
            if t > bar_cap {
                return Err(Error::truncation(format!(
                    "t-order {k}: correction reaches tail {t}, bar cap is {bar_cap}"
                )));
            }
        }
        let z = z.with_bar_cap(bar_cap)?;
        check_weight(n, &z, k)?;
        apow.push(vec![z.clone()]);
        parts.push(z);
    }
    j_terms.retain(|_, v| v.iter().any(|s| !s.is_zero()));

    let mut zeta = UChain::zero(n, cap, bar_cap, u_cap);
    for z in &parts {
        zeta = zeta.add(&z.truncate_u(u_cap)?)?;
    }
    Ok(SolverState { n, order, u_cap, bar_cap, basis, zeta, parts, j_terms, r })
}

/// τ_k(t) = J_{-1}[n-1-k].
pub fn flat_coordinates<T: Field>(state: &SolverState<T>) -> Vec<TSeries<T>> {
    (0..state.n).map(|k| state.j_coeff(1, state.n - 1 - k)).collect()
}

/// t(τ) by fixed-point iteration of t = -τ + Q(t), Q(t) = τ(t) + t.
pub fn invert_coordinates<T: Field>(tau: &[TSeries<T>]) -> Result<Vec<TSeries<T>>> {
    let n = tau.len();
    let cap = match tau.first() {
        Some(s) => s.cap(),
        None => return Ok(Vec::new()),
    };
    let mut q = Vec::with_capacity(n);
    for (k, s) in tau.iter().enumerate() {
        if !s.constant_term().is_zero() {
            return Err(Error::Internal(format!("tau_{k} has a constant term")));
        }
        let lin = s.homogeneous_part(1);
        let expect = TSeries::var(n, cap, k).scale(&-T::one());
        if cap > 1 && lin != expect {
            return Err(Error::Internal(format!("tau_{k} has linear part {lin}, expected -t_{k}")));
        }
        q.push(s.clone() + TSeries::var(n, cap, k));
    }
    let minus_tau: Vec<TSeries<T>> = (0..n).map(|k| TSeries::var(n, cap, k).scale(&-T::one())).collect();
    let mut t = minus_tau.clone();
    for _ in 0..cap {
        let mut next = Vec::with_capacity(n);
        for k in 0..n {
            next.push(&minus_tau[k] + &q[k].compose(&t)?);
        }
        t = next;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn mono(n: usize, idx: &[usize]) -> Vec<u16> {
        let mut m = vec![0u16; n];
        for &i in idx {
            m[i] += 1;
        }
        m
    }

    #[test]
    fn first_order() {
        for n in 1..5 {
            let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 1)).unwrap();
            for i in 0..n {
                let want = TSeries::var(n, 2, n - 1 - i).scale(&-Scalar::from_int(1));
                assert_eq!(st.j_coeff(1, i), want, "n={n} i={i}");
            }
            assert!(st.j_terms.keys().all(|&d| d == 1));
            assert_eq!(st.r, q(-(n as i64 - 1), 2 * (n as i64 + 1)));
        }
    }

    #[test]
    fn zeta_first_order_closed_form() {
        let n = 3;
        let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 1)).unwrap();
        let z1 = st.parts[1].clone();
        let central = AnFamily::<Scalar>::new(n, 2).unwrap().central_fiber();
        let sn = &st.basis.s[n - 1];
        let mut want = z1.empty_like();
        for i in 0..n {
            let phi = crate::family::ks_map(i, n, 2).unwrap();
            let bi = crate::bar::cap_b11(&phi, sn, &central).unwrap();
            let d = bi.sub(&st.basis.s[n - 1 - i]).unwrap().shift_u(-1);
            want = want.add(&d.mul_series(&TSeries::var(n, 2, i)).unwrap()).unwrap();
        }
        assert!(z1.sub(&want).unwrap().is_zero());
    }

    #[test]
    fn zeta_is_closed_in_the_family() {
        for n in 1..4 {
            let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 3)).unwrap();
            let fam = AnFamily::<Scalar>::new(n, st.t_cap()).unwrap();
            let d = cyclic_d(&st.zeta, &fam).unwrap();
            assert!(d.is_zero(), "n={n}: {}", d.dump());
            assert!(st.zeta.central().sub(&st.basis.s[n - 1].truncate_u(st.u_cap).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn second_and_third_order_displays() {
        for n in 2..6 {
            let ni = n as i64;
            let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 3)).unwrap();
            let cap = st.t_cap();
            let mut j2 = vec![TSeries::zero(n, cap); n];
            let mut j1 = vec![TSeries::zero(n, cap); n];
            for i in 0..n {
                j1[n - 1 - i].add_term(mono(n, &[i]), q(-1, 1));
                for j in 0..n {
                    if i + j <= n - 1 {
                        j2[n - 1 - i - j].add_term(mono(n, &[i, j]), q(1, 2));
                    }
                    if i + j >= n + 1 {
                        j1[2 * n - i - j].add_term(mono(n, &[i, j]), q(2 * j as i64 - ni, 2));
                    }
                    for k in 0..n {
                        let s = i + j + k;
                        if s >= n + 1 && s <= 2 * n {
                            j2[2 * n - s].add_term(mono(n, &[i, j, k]), q(ni - 3 * k as i64, 6));
                        }
                    }
                }
            }
            for l in 0..n {
                let got1 = st.j_coeff(1, l).truncate(3);
                assert_eq!(got1, j1[l].truncate(3), "n={n} J_-1 s_{l}");
                assert_eq!(st.j_coeff(2, l), j2[l], "n={n} J_-2 s_{l}");
            }
        }
    }

    #[test]
    fn flat_coordinates_quadratic() {
        for n in 1..6 {
            let ni = n as i64;
            let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 2)).unwrap();
            let tau = flat_coordinates(&st);
            for k in 0..n {
                let mut want = TSeries::var(n, 3, k).scale(&q(-1, 1));
                if k + 3 <= n {
                    for j in k + 2..n {
                        want.add_term(mono(n, &[n + 1 + k - j, j]), q(2 * j as i64 - ni, 2));
                    }
                }
                assert_eq!(tau[k], want, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn inversion_round_trip() {
        let n = 3;
        let st = solve_primitive_form::<Scalar>(&SolverConfig::new(n, 3)).unwrap();
        let tau = flat_coordinates(&st);
        let t = invert_coordinates(&tau).unwrap();
        for k in 0..n {
            assert_eq!(tau[k].compose(&t).unwrap(), TSeries::var(n, 4, k));
        }
    }

    #[test]
    fn no_ambiguity_in_positive_weight_directions() {
        for n in 1..7 {
            for k in 1..5 {
                assert_eq!(lift_ambiguity(n, k, 10), 0);
            }
        }
        assert_eq!(lift_ambiguity(3, 0, 2), 1);
    }

    #[test]
    fn bad_config() {
        assert!(matches!(solve_primitive_form::<Scalar>(&SolverConfig::new(2, 0)), Err(Error::Usage(_))));
        let mut c = SolverConfig::new(3, 2);
        c.bar_cap = Some(6);
        assert!(matches!(solve_primitive_form::<Scalar>(&c), Err(Error::Truncation(_))));
    }
}
