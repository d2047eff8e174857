//! The genus-zero potential in flat coordinates, correlators, and the
//! Frobenius-manifold and primitive-form checks on a solved state.

use std::collections::BTreeMap;

use crate::bar::{cap_b11, cap_big_b11, UChain};
use crate::coeffs::{degree, monomials_of_degree, Field, Monomial, TSeries};
use crate::connection::{euler_field, ggm_connection, trivialization_apply, u_connection_u, BaseVectorField};
use crate::decompose::Decomposer;
use crate::family::AnFamily;
use crate::linalg::{Echelon, SparseVec};
use crate::pairing::hres_pairing;
use crate::report::CheckReport;
use crate::solver::{flat_coordinates, invert_coordinates, SolverState};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSeries<T> {
    pub n: usize,
    /// τ_k as a series in t.
    pub coords: Vec<TSeries<T>>,
    /// t_k as a series in τ.
    pub inverse: Vec<TSeries<T>>,
    /// ∂F/∂τ_l as a series in τ, exact through degree `order`.
    pub derivs: Vec<TSeries<T>>,
    /// F, exact through degree `order + 1`.
    pub f: TSeries<T>,
}

/// ∂F/∂τ_l = J_{-2}[l] expressed in τ.
pub fn potential_derivatives<T: Field>(state: &SolverState<T>) -> Result<PotentialSeries<T>> {
    let coords = flat_coordinates(state);
    let inverse = invert_coordinates(&coords)?;
    let derivs = (0..state.n)
        .map(|l| state.j_coeff(2, l).compose(&inverse))
        .collect::<Result<Vec<_>>>()?;
    let f = integrate(&derivs, state.t_cap() + 1);
    Ok(PotentialSeries { n: state.n, coords, inverse, derivs, f })
}

/// F = Σ_d (1/d) Σ_l τ_l·(∂F/∂τ_l)_{d-1}, with no constant or linear part.
pub fn integrate<T: Field>(derivs: &[TSeries<T>], cap: u32) -> TSeries<T> {
    let n = derivs.len();
    let mut f = TSeries::zero(n, cap);
    for (l, g) in derivs.iter().enumerate() {
        for (m, c) in g.terms() {
            let d = degree(m) + 1;
            if d < 2 {
                continue;
            }
            let mut m2 = m.clone();
            m2[l] += 1;
            f.add_term(m2, c.clone() / T::from_int(d as i64));
        }
    }
    f
}

fn factorial<T: Field>(k: u16) -> T {
    (1..=k as i64).fold(T::one(), |a, b| a * T::from_int(b))
}

/// ∂^{indices}G at 0.
pub fn derivative_at_zero<T: Field>(g: &TSeries<T>, indices: &[usize]) -> T {
    let mut m = vec![0u16; g.nvars()];
    for &i in indices {
        m[i] += 1;
    }
    let mut c = g.coeff(&m);
    for &e in &m {
        c = c * factorial::<T>(e);
    }
    c
}

impl<T: Field> PotentialSeries<T> {
    /// ∂_{τ_m} derivs[l] - ∂_{τ_l} derivs[m] through degree order - 1, first nonzero.
    pub fn symmetry_defect(&self) -> Option<(usize, usize, TSeries<T>)> {
        for l in 0..self.n {
            for m in l + 1..self.n {
                let d = self.derivs[l].derivative(m) - self.derivs[m].derivative(l);
                if !d.is_zero() {
                    return Some((l, m, d));
                }
            }
        }
        None
    }

    /// Third derivatives F_{abc} = ∂_a∂_b derivs[c], exact through degree cap - 1.
    pub fn third(&self, a: usize, b: usize, c: usize) -> TSeries<T> {
        self.derivs[c].derivative(a).derivative(b)
    }
}

/// u∇_{∂/∂t_i}ζ at t = 0.
fn flat_section_at_zero<T: Field>(state: &SolverState<T>, i: usize, fam: &AnFamily<T>) -> Result<UChain<T>> {
    let v = BaseVectorField::coordinate(state.n, state.t_cap(), i);
    Ok(ggm_connection(&v, &state.zeta, fam)?.shift_u(1).central())
}

/// ⟨u∇_iζ, u∇_jζ⟩_hres at t = 0; must be a constant.
pub fn metric<T: Field>(state: &SolverState<T>) -> Result<Vec<Vec<T>>> {
    let n = state.n;
    let fam = AnFamily::<T>::new(n, state.t_cap())?;
    let sections = (0..n).map(|i| flat_section_at_zero(state, i, &fam)).collect::<Result<Vec<_>>>()?;
    let mut g = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let h = hres_pairing(n, &sections[i], &sections[j])?;
            // the sections are known through u^{u_cap - 1}; lower powers are exact
            if let Some((p, _)) = h.terms().find(|(p, s)| **p != 0 && **p < state.u_cap && !s.is_zero()) {
                return Err(Error::Internal(format!("metric entry ({i},{j}) has a u^{p} term")));
            }
            g[i][j] = h.coeff(0).constant_term();
        }
    }
    Ok(g)
}

/// Correlator ⟨τ_{i_1}, .., τ_{i_m}⟩_0 for 2 ≤ m ≤ order + 1.
pub fn correlator<T: Field>(state: &SolverState<T>, pot: &PotentialSeries<T>, indices: &[usize]) -> Result<T> {
    if let Some(&i) = indices.iter().find(|&&i| i >= state.n) {
        return Err(Error::usage(format!("direction {i} out of range for n={}", state.n)));
    }
    match indices.len() {
        0 | 1 => Err(Error::usage("correlators take at least two insertions")),
        2 => Ok(metric(state)?[indices[0]][indices[1]].clone()),
        m if m as u32 <= state.order + 1 => Ok(derivative_at_zero(&pot.f, indices)),
        m => Err(Error::truncation(format!(
            "{m}-point correlators need order at least {}, state has order {}",
            m - 1,
            state.order
        ))),
    }
}

/// E(F) = (3 - (n-1)/(n+1))·F with E = Σ(1 - j/(n+1))τ_j∂_j, termwise.
pub fn check_dimension_axiom_on<T: Field>(n: usize, f: &TSeries<T>) -> CheckReport {
    let target = T::from_int(3) - T::ratio(n as i64 - 1, n as i64 + 1);
    let mut failure = None;
    for (m, c) in f.terms() {
        let w = m
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (j, &e)| a + T::from_int(e as i64) * T::ratio(n as i64 + 1 - j as i64, n as i64 + 1));
        if w != target {
            failure = Some(format!("term {c}·τ^{m:?} has Euler weight {w}, expected {target}"));
            break;
        }
    }
    CheckReport::from_failure("E(F) = (3 - (n-1)/(n+1)) F", format!("n={n}, F through degree {}", f.cap() - 1), failure)
}

pub fn check_dimension_axiom<T: Field>(pot: &PotentialSeries<T>) -> CheckReport {
    check_dimension_axiom_on(pot.n, &pot.f)
}

/// WDVV residuals Σ_e F_{abe}F_{(n-1-e)cd} - F_{ace}F_{(n-1-e)bd}, through
/// degree `max_deg`. Returns the first nonzero one.
fn wdvv_defect<T: Field>(n: usize, f: &TSeries<T>, max_deg: u32) -> Option<(usize, usize, usize, usize, TSeries<T>)> {
    let cap = max_deg + 1;
    let third = |a: usize, b: usize, c: usize| f.derivative(a).derivative(b).derivative(c).truncate(cap);
    let mut f3: BTreeMap<(usize, usize, usize), TSeries<T>> = BTreeMap::new();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                f3.insert((a, b, c), third(a, b, c));
            }
        }
    }
    let get = |a: usize, b: usize, c: usize| {
        let mut k = [a, b, c];
        k.sort();
        f3[&(k[0], k[1], k[2])].clone()
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = TSeries::zero(n, cap);
                    for e in 0..n {
                        let e2 = n - 1 - e;
                        r += &(&get(a, b, e) * &get(e2, c, d));
                        r -= &(&get(a, c, e) * &get(e2, b, d));
                    }
                    if !r.is_zero() {
                        return Some((a, b, c, d, r));
                    }
                }
            }
        }
    }
    None
}

/// WDVV with metric δ_{i+j=n-1} on a potential known through degree
/// `f.cap() - 1`; checked through degree cap - 4.
pub fn check_wdvv_on<T: Field>(n: usize, f: &TSeries<T>) -> CheckReport {
    let range = format!("n={n}, third derivatives through degree {}", f.cap() as i64 - 4);
    if f.cap() < 4 {
        return CheckReport::pass("WDVV", range);
    }
    let failure = wdvv_defect(n, f, f.cap() - 4)
        .map(|(a, b, c, d, r)| format!("(a,b,c,d)=({a},{b},{c},{d}): residual {r}"));
    CheckReport::from_failure("WDVV", range, failure)
}

pub fn check_wdvv<T: Field>(pot: &PotentialSeries<T>) -> CheckReport {
    check_wdvv_on(pot.n, &pot.f)
}

/// The quartic part of F determined by the cubic part, degree-one WDVV, the
/// dimension axiom and ⟨τ_1, τ_1, τ_{n-1}, τ_{n-1}⟩ = 1. Requires n ≥ 2.
pub fn reconstruct_quartic<T: Field>(n: usize, cubic: &TSeries<T>) -> Result<TSeries<T>> {
    if n < 2 {
        return Err(Error::usage("reconstruction needs n >= 2"));
    }
    let cap = 5;
    let cubic = cubic.homogeneous_part(3).truncate(cap);
    // quartic monomials of Euler weight 3 - (n-1)/(n+1): Σ j·e_j = 2n
    let unknowns: Vec<Monomial> = monomials_of_degree(n, 4)
        .into_iter()
        .filter(|m| m.iter().enumerate().map(|(j, &e)| j * e as usize).sum::<usize>() == 2 * n)
        .collect();
    type Row = (usize, usize, usize, usize, Monomial);
    let norm_row: Row = (usize::MAX, 0, 0, 0, Vec::new());
    let mut anchor = vec![0u16; n];
    anchor[1] += 2;
    anchor[n - 1] += 2;
    let third = |g: &TSeries<T>, a: usize, b: usize, c: usize| g.derivative(a).derivative(b).derivative(c);
    let mut ech: Echelon<Row, T> = Echelon::new();
    for m in &unknowns {
        let g = TSeries::monomial(n, cap, m.clone(), T::one());
        let mut col: SparseVec<Row, T> = SparseVec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut r = TSeries::zero(n, cap);
                        for e in 0..n {
                            let e2 = n - 1 - e;
                            r += &(&third(&cubic, a, b, e) * &third(&g, e2, c, d));
                            r += &(&third(&g, a, b, e) * &third(&cubic, e2, c, d));
                            r -= &(&third(&cubic, a, c, e) * &third(&g, e2, b, d));
                            r -= &(&third(&g, a, c, e) * &third(&cubic, e2, b, d));
                        }
                        for (mm, v) in r.terms() {
                            col.insert((a, b, c, d, mm.clone()), v.clone());
                        }
                    }
                }
            }
        }
        if *m == anchor {
            col.insert(norm_row.clone(), derivative_at_zero(&g, &[1, 1, n - 1, n - 1]));
        }
        if ech.insert(&col).is_some() {
            return Err(Error::RankDeficient(format!("quartic coefficient of τ^{m:?} is not determined")));
        }
    }
    let rhs: SparseVec<Row, T> = SparseVec::from([(norm_row, T::one())]);
    let red = ech.reduce(&rhs);
    if !red.residual.is_empty() {
        return Err(Error::NotClosed("no quartic potential satisfies the constraints".into()));
    }
    let mut out = TSeries::zero(n, cap);
    for (idx, c) in red.combo {
        out.add_term(unknowns[idx].clone(), c);
    }
    Ok(out)
}

/// Compares the solver's quartic part with [`reconstruct_quartic`].
pub fn check_reconstruction<T: Field>(pot: &PotentialSeries<T>) -> Result<CheckReport> {
    let n = pot.n;
    let range = format!("n={n}, quartic part");
    if n < 2 {
        return Ok(CheckReport::pass("quartic part from 2-, 3- and one 4-point value", range));
    }
    if pot.f.cap() < 5 {
        return Err(Error::truncation("reconstruction needs F through degree 4 (order >= 3)"));
    }
    let rec = reconstruct_quartic(n, &pot.f)?;
    let got = pot.f.homogeneous_part(4).truncate(5);
    let diff = &got - &rec;
    let failure = (!diff.is_zero()).then(|| format!("solver minus reconstruction: {diff}"));
    Ok(CheckReport::from_failure("quartic part from 2-, 3- and one 4-point value", range, failure))
}

/// Σ_k u^{c-k}·X_k[p] as a map (u-power, s-index) ↦ series.
type SCoords<T> = BTreeMap<(i64, usize), TSeries<T>>;

/// hres on s-coordinates: ⟨u^a s_p, u^b s_q⟩ = (-1)^a δ_{p+q=n-1} u^{a+b}.
fn hres_s<T: Field>(n: usize, x: &SCoords<T>, y: &SCoords<T>, cap: u32) -> BTreeMap<i64, TSeries<T>> {
    let mut out: BTreeMap<i64, TSeries<T>> = BTreeMap::new();
    for (&(a, p), cx) in x {
        for (&(b, q), cy) in y {
            if p + q + 1 != n {
                continue;
            }
            let mut v = (cx * cy).truncate(cap);
            if a.rem_euclid(2) == 1 {
                v = -v;
            }
            *out.entry(a + b).or_insert_with(|| TSeries::zero(n, cap)) += &v;
        }
    }
    out.retain(|_, s| !s.is_zero());
    out
}

/// The transported class of u^e·∂^{dirs}ζ: Σ_k u^{e-k} ∂^{dirs} J_{-k}.
fn transported<T: Field>(state: &SolverState<T>, e: i64, dirs: &[usize]) -> SCoords<T> {
    let mut out = SCoords::new();
    for (&k, v) in &state.j_terms {
        for (p, s) in v.iter().enumerate() {
            let mut d = s.clone();
            for &i in dirs {
                d = d.derivative(i);
            }
            if !d.is_zero() {
                out.insert((e - k, p), d);
            }
        }
    }
    out
}

/// Results of the four primitive-form axioms.
#[derive(Clone, Debug)]
pub struct AxiomReports {
    pub p1: CheckReport,
    pub p2: CheckReport,
    pub p3: CheckReport,
    pub p4: CheckReport,
}

impl AxiomReports {
    pub fn all(&self) -> [&CheckReport; 4] {
        [&self.p1, &self.p2, &self.p3, &self.p4]
    }
}

fn check_p1<T: Field>(state: &SolverState<T>) -> Result<CheckReport> {
    let n = state.n;
    let range = format!("n={n}, order {}", state.order);
    let fam = AnFamily::<T>::new(n, state.t_cap())?;
    let central_basis: Vec<UChain<T>> = state.basis.s.iter().map(|s| s.central()).collect();
    let dec = Decomposer::new(n, &central_basis, 0, 0, state.bar_cap + 1)?;
    let mut rows: Vec<SparseVec<usize, T>> = Vec::new();
    let mut failure = None;
    for j in 0..n {
        let v = BaseVectorField::coordinate(n, state.t_cap(), j);
        let full = ggm_connection(&v, &state.zeta, &fam)?.shift_u(1);
        if let Some(p) = full.min_u().filter(|&p| p < 0) {
            failure.get_or_insert(format!("u∇_{j}ζ has a u^{p} term"));
        }
        let y = full.central();
        match dec.decompose(&y) {
            Ok(c) => rows.push(c.coords.iter().map(|(&(i, _), s)| (i, s.constant_term())).collect()),
            Err(e) => {
                failure.get_or_insert(format!("u∇_{j}ζ mod u at t=0: {e}"));
            }
        }
    }
    if failure.is_none() {
        for (j, row) in rows.iter().enumerate() {
            let want: SparseVec<usize, T> = SparseVec::from([(n - 1 - j, -T::one())]);
            if *row != want {
                failure = Some(format!("row {j} is {row:?}, expected -1 at s_{}", n - 1 - j));
                break;
            }
        }
        if failure.is_none() && crate::linalg::rank(&rows) != n {
            failure = Some("matrix at t=0 is singular".into());
        }
    }
    Ok(CheckReport::from_failure("P1 primitivity: u∇ζ mod u spans HH", range, failure))
}

fn check_p2_p3<T: Field>(state: &SolverState<T>) -> (CheckReport, CheckReport) {
    let n = state.n;
    let order = state.order;
    let mut f2 = None;
    let mut f3 = None;
    for i in 0..n {
        let xi = transported(state, 1, &[i]);
        for j in 0..n {
            let xj = transported(state, 1, &[j]);
            // ∂ζ is exact through t-degree order-1
            let h = hres_s(n, &xi, &xj, order);
            if let Some((p, s)) = h.iter().find(|(p, _)| **p != 0) {
                f2.get_or_insert(format!("(∂_{i},∂_{j}): u^{p} coefficient {s}"));
            }
            let xij = transported(state, 2, &[i, j]);
            for k in 0..n {
                let xk = transported(state, 1, &[k]);
                let h = hres_s(n, &xij, &xk, order.saturating_sub(1));
                if let Some((p, s)) = h.iter().find(|(p, _)| **p != 0 && **p != 1) {
                    f3.get_or_insert(format!("(∂_{i}∂_{j},∂_{k}): u^{p} coefficient {s}"));
                }
            }
        }
    }
    let r2 = format!("n={n}, t-degree < {order}");
    let r3 = format!("n={n}, t-degree < {}", order.saturating_sub(1));
    (
        CheckReport::from_failure("P2 orthogonality: hres(u∇ζ, u∇ζ) in R", r2, f2),
        CheckReport::from_failure("P3 holonomicity: hres(u∇u∇ζ, u∇ζ) in R + uR", r3, f3),
    )
}

fn check_p4<T: Field>(state: &SolverState<T>) -> Result<CheckReport> {
    let n = state.n;
    let cap = state.t_cap();
    let fam = AnFamily::<T>::new(n, cap)?;
    let e = euler_field::<T>(n, cap);
    let ks = e.ks_cochain();
    let mut x: Option<UChain<T>> = None;
    for z in &state.parts {
        let ez = z.map_coeffs(|c| e.apply(c).expect("shapes agree"));
        let ggm = ez.sub(&cap_b11(&ks, z, &fam)?.shift_u(-1))?.sub(&cap_big_b11(&ks, z)?)?;
        let term = u_connection_u(z, &fam)?.add(&ggm)?.sub(&z.scale(&state.r))?;
        x = Some(match x {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    let x = x.expect("ζ^{(0)} present");
    let tx = trivialization_apply(&x, n, cap)?;
    let lo = -(state.order as i64);
    let hi = tx.u_max().min(1);
    let range = format!("n={n}, t-degree <= {}, u^{lo}..u^{hi}", state.order);
    let dec = Decomposer::new(n, &state.basis.s, lo, hi, state.bar_cap + 1)?;
    let failure = match dec.decompose(&tx.with_bar_cap(state.bar_cap + 1)?) {
        Ok(c) if c.is_zero() => None,
        Ok(c) => {
            let ((j, m), s) = c.coords.iter().next().expect("nonzero");
            Some(format!("coordinate {s} on u^{m}·s_{j}"))
        }
        Err(e) => Some(e.to_string()),
    };
    Ok(CheckReport::from_failure(
        format!("P4 homogeneity: (∇_(u∂u) + ∇_E)ζ = rζ, r = {}", state.r),
        range,
        failure,
    ))
}

pub fn check_primitive_axioms<T: Field>(state: &SolverState<T>) -> Result<AxiomReports> {
    let p1 = check_p1(state)?;
    let (p2, p3) = check_p2_p3(state);
    let p4 = check_p4(state)?;
    Ok(AxiomReports { p1, p2, p3, p4 })
}
