//! The full battery of identity checks for one (n, order) configuration.

use crate::bar::{cyclic_d, hoch_b, BarWord, Shape, UChain};
use crate::coeffs::{Field, TSeries};
use crate::connection::{check_good_splitting, check_u_commutator};
use crate::costello::{inv_03, inv_11};
use crate::family::AnFamily;
use crate::homology::{central_homology, scaled_word_weight, splitting_uniqueness};
use crate::pairing::{coproduct, hres_pairing, mukai_words, phi_iso, SplittingBasis};
use crate::potential::{
    check_dimension_axiom, check_primitive_axioms, check_reconstruction, check_wdvv, correlator, potential_derivatives,
    PotentialSeries,
};
use crate::report::CheckReport;
use crate::solver::{flat_coordinates, solve_primitive_form, SolverConfig, SolverState};
use crate::Result;

fn first<I: IntoIterator<Item = Option<String>>>(it: I) -> Option<String> {
    it.into_iter().flatten().next()
}

pub fn hh_dimension<T: Field>(n: usize) -> Result<CheckReport> {
    let h = central_homology::<T>(n, 3 * n + 3)?;
    let want: Vec<BarWord> = (0..n).map(BarWord::eps).collect();
    let bad = (h.dim != n || !h.odd_only || h.basis != want).then(|| format!("{h:?}"));
    Ok(CheckReport::from_failure("dim HH = n, odd, basis eps|eps^j", format!("n={n}"), bad))
}

pub fn mukai_table<T: Field>(n: usize) -> Result<CheckReport> {
    let mut bad = None;
    for i in 0..n {
        for j in 0..n {
            let v: T = mukai_words(n, BarWord::eps(i), BarWord::eps(j))?;
            if v != T::from_int((i + j + 1 == n) as i64) {
                bad.get_or_insert(format!("<{i},{j}> = {v}"));
            }
        }
    }
    Ok(CheckReport::from_failure("Mukai pairing = delta_{i+j=n-1}", format!("n={n}"), bad))
}

pub fn coproduct_formula(n: usize) -> Result<CheckReport> {
    let mut bad = None;
    for k in 0..=2 * n {
        let got = coproduct(BarWord::eps(k))?;
        let want: Vec<_> = (0..=k).map(|i| (BarWord::eps(i), BarWord::eps(k - i))).collect();
        if got != want {
            bad.get_or_insert(format!("k={k}: {got:?}"));
        }
    }
    Ok(CheckReport::from_failure("coproduct of eps|eps^k", format!("n={n}, k<=2n"), bad))
}

pub fn splitting<T: Field>(n: usize, u_max: i64) -> Result<CheckReport> {
    let bar_cap = (n + 1) * (u_max.max(0) as usize + 2) + n;
    let shape = Shape { nvars: n, cap: 1, bar_cap, u_max };
    let b = SplittingBasis::<T>::new(n, shape)?;
    let fam = AnFamily::<T>::new(n, 1)?;
    let mut bad = None;
    for (j, s) in b.s.iter().enumerate() {
        if !cyclic_d(s, &fam)?.is_zero() {
            bad.get_or_insert(format!("(b+uB)s_{j} != 0"));
        }
        let w0 = scaled_word_weight(n, BarWord::eps(j));
        if s.terms().any(|((p, w), _)| scaled_word_weight(n, *w) - 2 * (n as i64 + 1) * p != w0) {
            bad.get_or_insert(format!("s_{j} is not weight-homogeneous"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let h = hres_pairing(n, &b.s[i], &b.s[j])?;
            let stray = h.terms().any(|(p, c)| *p != 0 && *p <= u_max && !c.is_zero());
            if stray || h.coeff(0).constant_term() != T::from_int((i + j + 1 == n) as i64) {
                bad.get_or_insert(format!("hres(s_{i}, s_{j}) = {h}"));
            }
        }
    }
    Ok(CheckReport::from_failure(
        "splitting closed, homogeneous, hres = delta",
        format!("n={n}, through u^{u_max}"),
        bad,
    ))
}

pub fn splitting_unique<T: Field>(n: usize, u_cap: i64) -> Result<CheckReport> {
    let mut bad = None;
    for k in 0..n {
        let r = splitting_uniqueness::<T>(n, k, u_cap)?;
        if r.ambiguity_dims.iter().any(|&d| d != 0) || !r.lift_matches {
            bad.get_or_insert(format!("{r:?}"));
        }
    }
    Ok(CheckReport::from_failure("weight-preserving splitting is unique", format!("n={n}, u^1..u^{u_cap}"), bad))
}

pub fn costello_tables<T: Field>(n: usize) -> Result<CheckReport> {
    let mut bad = None;
    for k in 0..n {
        let a: T = inv_11(n, k, 0)?;
        let b: T = inv_11(n, k, 1)?;
        let want = if k + 1 == n { T::ratio(n as i64, 24) } else { T::zero() };
        if !a.is_zero() || b != want {
            bad.get_or_insert(format!("inv_11({k}, .) = {a}, {b}"));
        }
        for i in 0..n {
            for j in 0..n {
                let c: T = inv_03(n, i, j, k)?;
                if c != T::from_int((i + j + k + 2 == 2 * n) as i64) {
                    bad.get_or_insert(format!("inv_03({i},{j},{k}) = {c}"));
                }
            }
        }
    }
    Ok(CheckReport::from_failure("inv_11 = n/24 at k=n-1, l=1; inv_03 = delta", format!("n={n}"), bad))
}

pub fn differentials_square_to_zero<T: Field>(n: usize, order: u32, bar_cap: usize) -> Result<CheckReport> {
    let fam = AnFamily::<T>::new(n, order)?;
    let top = bar_cap.saturating_sub(n + 1);
    let mut bad = None;
    'outer: for k in 0..=top {
        for w in [BarWord::one(k), BarWord::eps(k)] {
            let x = UChain::basis(w, 0, n, order, bar_cap + 2, 2)?;
            if !hoch_b(&hoch_b(&x, &fam)?, &fam)?.is_zero() {
                bad = Some(format!("b^2({w}) != 0"));
                break 'outer;
            }
            if !cyclic_d(&cyclic_d(&x, &fam)?, &fam)?.is_zero() {
                bad = Some(format!("(b+uB)^2({w}) != 0"));
                break 'outer;
            }
        }
    }
    Ok(CheckReport::from_failure("b^2 = 0, (b+uB)^2 = 0 on the family", format!("n={n}, t-order<{order}, tail<={top}"), bad))
}

pub fn good_splitting<T: Field>(n: usize, depth: i64) -> Result<CheckReport> {
    let bar_cap = (n + 1) * (depth.max(0) as usize + 5) + n;
    let shape = Shape { nvars: n, cap: 1, bar_cap, u_max: depth + 3 };
    let b = SplittingBasis::<T>::new(n, shape)?;
    let g = check_good_splitting(&b.s, n, depth, bar_cap)?;
    let want = T::ratio(-(n as i64 - 1), 2 * (n as i64 + 1));
    if g.report.passed() && g.r.as_ref() != Some(&want) {
        return Ok(CheckReport::fail(g.report.identity, g.report.range, format!("r = {:?}", g.r)));
    }
    Ok(g.report)
}

fn mono(n: usize, idx: &[usize]) -> Vec<u16> {
    let mut m = vec![0u16; n];
    for &i in idx {
        m[i] += 1;
    }
    m
}

/// J_{-1} through t-degree 2 and J_{-2} through t-degree 3 in closed form.
pub fn closed_form_j_terms<T: Field>(n: usize, cap: u32) -> (Vec<TSeries<T>>, Vec<TSeries<T>>) {
    let ni = n as i64;
    let mut j1 = vec![TSeries::zero(n, cap); n];
    let mut j2 = vec![TSeries::zero(n, cap); n];
    for i in 0..n {
        j1[n - 1 - i].add_term(mono(n, &[i]), -T::one());
        for j in 0..n {
            if i + j < n {
                j2[n - 1 - i - j].add_term(mono(n, &[i, j]), T::ratio(1, 2));
            }
            if i + j > n {
                j1[2 * n - i - j].add_term(mono(n, &[i, j]), T::ratio(2 * j as i64 - ni, 2));
            }
            for k in 0..n {
                let s = i + j + k;
                if (n + 1..=2 * n).contains(&s) {
                    j2[2 * n - s].add_term(mono(n, &[i, j, k]), T::ratio(ni - 3 * k as i64, 6));
                }
            }
        }
    }
    (j1, j2)
}

pub fn j_terms_closed_form<T: Field>(state: &SolverState<T>) -> CheckReport {
    let n = state.n;
    let (j1, j2) = closed_form_j_terms::<T>(n, state.t_cap());
    let d1 = state.order.min(2) + 1;
    let d2 = state.order.min(3) + 1;
    let bad = first((0..n).map(|l| {
        let a = state.j_coeff(1, l).truncate(d1);
        let b = state.j_coeff(2, l).truncate(d2);
        if a != j1[l].truncate(d1) {
            Some(format!("J_-1[{l}] = {a}"))
        } else if b != j2[l].truncate(d2) {
            Some(format!("J_-2[{l}] = {b}"))
        } else {
            None
        }
    }));
    CheckReport::from_failure(
        "J-terms match the closed forms",
        format!("n={n}, J_-1 to t-degree {}, J_-2 to t-degree {}", d1 - 1, d2 - 1),
        bad,
    )
}

pub fn flat_coordinates_closed_form<T: Field>(state: &SolverState<T>) -> CheckReport {
    let n = state.n;
    let ni = n as i64;
    let tau = flat_coordinates(state);
    let d = state.order.min(2) + 1;
    let bad = first((0..n).map(|k| {
        let mut want = TSeries::var(n, d, k).scale(&-T::one());
        if k + 3 <= n {
            for j in k + 2..n {
                want.add_term(mono(n, &[n + 1 + k - j, j]), T::ratio(2 * j as i64 - ni, 2));
            }
        }
        let got = tau[k].truncate(d);
        (got != want.truncate(d)).then(|| format!("tau_{k} = {got}"))
    }));
    CheckReport::from_failure("flat coordinates", format!("n={n}, through t-degree {}", d - 1), bad)
}

pub fn correlator_values<T: Field>(state: &SolverState<T>, pot: &PotentialSeries<T>) -> Result<CheckReport> {
    let n = state.n;
    let mut bad = None;
    for i in 0..n {
        for j in 0..n {
            let v = correlator(state, pot, &[i, j])?;
            if v != T::from_int((i + j + 1 == n) as i64) {
                bad.get_or_insert(format!("<{i},{j}> = {v}"));
            }
            if state.order < 2 {
                continue;
            }
            for k in 0..n {
                let v = correlator(state, pot, &[i, j, k])?;
                let w: T = inv_03(n, phi_iso(n, i)?, phi_iso(n, j)?, phi_iso(n, k)?)?;
                if v != w {
                    bad.get_or_insert(format!("<{i},{j},{k}> = {v}, inv_03 = {w}"));
                }
            }
        }
    }
    if n >= 2 && state.order >= 3 {
        let v = correlator(state, pot, &[1, 1, n - 1, n - 1])?;
        if v != T::one() {
            bad.get_or_insert(format!("<1,1,n-1,n-1> = {v}"));
        }
    }
    Ok(CheckReport::from_failure("2-point metric, 3-point = inv_03, <1,1,n-1,n-1> = 1", format!("n={n}"), bad))
}

/// Every check for one configuration, in a fixed order.
pub fn verify<T: Field>(cfg: &SolverConfig) -> Result<Vec<CheckReport>> {
    let n = cfg.n;
    let order = cfg.order;
    let mut out = vec![
        hh_dimension::<T>(n)?,
        mukai_table::<T>(n)?,
        coproduct_formula(n)?,
        splitting::<T>(n, cfg.u_cap)?,
        splitting_unique::<T>(n, cfg.u_cap)?,
        costello_tables::<T>(n)?,
    ];
    for cap in [1, order] {
        out.push(check_u_commutator(&AnFamily::<T>::new(n, cap)?, 3 * (n + 1))?);
    }
    out.push(differentials_square_to_zero::<T>(n, order, cfg.bar_cap())?);
    out.push(good_splitting::<T>(n, order as i64)?);

    let state = solve_primitive_form::<T>(cfg)?;
    let pot = potential_derivatives(&state)?;
    out.push(j_terms_closed_form(&state));
    out.push(flat_coordinates_closed_form(&state));
    out.push(correlator_values(&state, &pot)?);
    out.push(CheckReport::from_failure(
        "mixed partials of dF commute",
        format!("n={n}"),
        pot.symmetry_defect().map(|(l, m, d)| format!("({l},{m}): {d}")),
    ));
    out.push(check_dimension_axiom(&pot));
    out.push(check_wdvv(&pot));
    if order >= 3 {
        out.push(check_reconstruction(&pot)?);
    }
    let fam = AnFamily::<T>::new(n, state.t_cap())?;
    out.push(CheckReport::from_failure(
        "zeta is closed in the family",
        format!("n={n}, through u^{}", state.u_cap),
        (!cyclic_d(&state.zeta, &fam)?.is_zero()).then(|| "(b_t+uB)zeta != 0".to_string()),
    ));
    let ax = check_primitive_axioms(&state)?;
    out.extend(ax.all().into_iter().cloned());
    Ok(out)
}
