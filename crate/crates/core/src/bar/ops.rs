//! Chain-level operators on reduced cyclic chains.
//!
//! Every operator is built by enumerating placements on a word; nothing is
//! hard-coded from closed forms. Signs follow the shifted Koszul rule with
//! ‖ε‖ = 0 and ‖1‖ = 1. Placements that leave a 1 in a tail slot vanish in the
//! reduced complex.

use crate::bar::{BarWord, UChain};
use crate::coeffs::{Field, TSeries};
use crate::family::{eval_with_unit, AnFamily, Cochain, Elem, Gen};
use crate::Result;

/// Global sign of the cap product b^{1|1}, fixed once for all terms.
///
/// With it, b^{1|1}(φ_i) sends ε|ε^m to ε|ε^{m-i}; this is the convention
/// under which the Cartan relation [b^{1|1}(φ), B] = L_φ holds.
pub const CAP_SIGN: i64 = -1;

type Image<T> = Vec<(BarWord, TSeries<T>)>;

fn parity_count(gs: &[Gen]) -> usize {
    gs.iter().filter(|g| g.shifted_odd()).count()
}

/// Sign of moving the last `o` entries of `seq` to the front.
fn rotation_sign(seq: &[Gen], o: usize) -> bool {
    let split = seq.len() - o;
    parity_count(&seq[split..]) * parity_count(&seq[..split]) % 2 == 1
}

fn signed<T: Field>(s: &TSeries<T>, neg: bool) -> TSeries<T> {
    if neg {
        -s.clone()
    } else {
        s.clone()
    }
}

fn push<T: Field>(out: &mut Image<T>, word: BarWord, c: TSeries<T>) {
    if c.is_zero() {
        return;
    }
    if let Some(e) = out.iter_mut().find(|(w, _)| *w == word) {
        e.1 += &c;
    } else {
        out.push((word, c));
    }
}

fn finish<T: Field>(mut out: Image<T>) -> Image<T> {
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Words of the form a_0|... with a 1 in a tail slot are zero.
fn reduced_word(seq: &[Gen]) -> Option<BarWord> {
    if seq.is_empty() || seq[1..].iter().any(|&g| g == Gen::One) {
        return None;
    }
    Some(BarWord { head: seq[0], tail: seq.len() - 1 })
}

/// Σ over cyclic windows of length j containing a_0: rotate, apply the
/// operation to the first j entries and make its output the new head.
fn b_type_word<T: Field>(
    w: BarWord,
    arities: &[usize],
    eval: &impl Fn(&[Gen]) -> Elem<T>,
) -> Image<T> {
    let seq = w.gens();
    let len = seq.len();
    let mut out = Vec::new();
    for &j in arities {
        if j == 0 || j > len {
            continue;
        }
        for o in 0..j {
            let mut rot: Vec<Gen> = seq[len - o..].to_vec();
            rot.extend_from_slice(&seq[..len - o]);
            let neg = rotation_sign(&seq, o);
            let val = eval(&rot[..j]);
            for g in [Gen::One, Gen::Eps] {
                let c = val.component(g);
                if c.is_zero() {
                    continue;
                }
                let mut res = vec![g];
                res.extend_from_slice(&rot[j..]);
                if let Some(word) = reduced_word(&res) {
                    push(&mut out, word, signed(c, neg));
                }
            }
        }
    }
    finish(out)
}

fn mu_arities<T: Field>(fam: &AnFamily<T>) -> Vec<usize> {
    let mut a: Vec<usize> = fam.structure_maps().values.keys().copied().collect();
    if !a.contains(&2) {
        a.push(2);
    }
    a.sort_unstable();
    a
}

/// Hochschild differential b of the family on one word.
pub fn hoch_b_word<T: Field>(w: BarWord, fam: &AnFamily<T>) -> Image<T> {
    let (n, cap) = (fam.n(), fam.cap());
    let eval = |g: &[Gen]| eval_with_unit(g, |k| fam.mu(k), n, cap);
    b_type_word(w, &mu_arities(fam), &eval)
}

/// Hochschild differential b.
pub fn hoch_b<T: Field>(x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    x.apply_wordwise(0, |w| Ok(hoch_b_word(w, fam)))
}

fn cochain_eval<T: Field>(phi: &Cochain<T>, g: &[Gen], nvars: usize, cap: u32) -> Elem<T> {
    if g.iter().any(|&x| x == Gen::One) {
        return Elem::zero(nvars, cap);
    }
    phi.value(g.len()).cloned().unwrap_or_else(|| Elem::zero(nvars, cap))
}

/// Lie derivative L_ψ: the b-type formula with μ replaced by a reduced ψ.
pub fn lie_derivative<T: Field>(psi: &Cochain<T>, x: &UChain<T>) -> Result<UChain<T>> {
    let (nvars, cap) = (x.nvars(), x.cap());
    let arities: Vec<usize> = psi.values.keys().copied().collect();
    let eval = |g: &[Gen]| cochain_eval(psi, g, nvars, cap);
    x.apply_wordwise(0, |w| Ok(b_type_word(w, &arities, &eval)))
}

/// Connes operator on one word: Σ_r ± 1|a_r|..|a_k|a_0|..|a_{r-1}.
pub fn connes_b_word<T: Field>(w: BarWord, nvars: usize, cap: u32) -> Image<T> {
    let seq = w.gens();
    let len = seq.len();
    let one = TSeries::one(nvars, cap);
    let mut out = Vec::new();
    for o in 1..=len {
        let mut res = vec![Gen::One];
        res.extend_from_slice(&seq[len - o..]);
        res.extend_from_slice(&seq[..len - o]);
        if let Some(word) = reduced_word(&res) {
            push(&mut out, word, signed(&one, rotation_sign(&seq, o)));
        }
    }
    finish(out)
}

/// Connes operator B.
pub fn connes_b<T: Field>(x: &UChain<T>) -> Result<UChain<T>> {
    let (nvars, cap) = (x.nvars(), x.cap());
    x.apply_wordwise(0, |w| Ok(connes_b_word(w, nvars, cap)))
}

/// b + uB.
pub fn cyclic_d<T: Field>(x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    let (nvars, cap) = (x.nvars(), x.cap());
    let ub = x.apply_wordwise(1, |w| Ok(connes_b_word(w, nvars, cap)))?;
    hoch_b(x, fam)?.add(&ub)
}

/// Cap action b^{1|1}(φ) on one word.
///
/// One μ-window contains a_0; the φ-block sits inside it after a_0 and does
/// not contain a_0.
pub fn cap_b11_word<T: Field>(phi: &Cochain<T>, w: BarWord, fam: &AnFamily<T>) -> Image<T> {
    let (n, cap) = (fam.n(), fam.cap());
    let seq = w.gens();
    let len = seq.len();
    let k = w.tail;
    let mut out = Vec::new();
    for big_j in mu_arities(fam) {
        if big_j < 2 {
            continue;
        }
        for (&i, val) in &phi.values {
            // the window consumes big_j - 2 + i tail entries besides φ's output slot
            if big_j - 2 + i > k {
                continue;
            }
            for g_phi in [Gen::One, Gen::Eps] {
                let pc = val.component(g_phi);
                if pc.is_zero() {
                    continue;
                }
                for o in 0..=(big_j - 2) {
                    for p in 0..=(big_j - 2 - o) {
                        let mut rot: Vec<Gen> = seq[len - o..].to_vec();
                        rot.extend_from_slice(&seq[..len - o]);
                        let neg_rot = rotation_sign(&seq, o);
                        // rot = [o moved, a_0, p entries, φ block (i), rest]
                        let phi_start = o + 1 + p;
                        let block = &rot[phi_start..phi_start + i];
                        let neg_phi = g_phi.shifted_odd() && parity_count(&rot[..phi_start]) % 2 == 1;
                        if block.iter().any(|&g| g == Gen::One) {
                            continue;
                        }
                        let after = big_j - 2 - o - p;
                        let mut window: Vec<Gen> = rot[..phi_start].to_vec();
                        window.push(g_phi);
                        window.extend_from_slice(&rot[phi_start + i..phi_start + i + after]);
                        let m = eval_with_unit(&window, |a| fam.mu(a), n, cap);
                        for g in [Gen::One, Gen::Eps] {
                            let c = m.component(g);
                            if c.is_zero() {
                                continue;
                            }
                            let mut res = vec![g];
                            res.extend_from_slice(&rot[phi_start + i + after..]);
                            if let Some(word) = reduced_word(&res) {
                                let neg = neg_rot ^ neg_phi ^ (CAP_SIGN < 0);
                                push(&mut out, word, signed(&(c * pc), neg));
                            }
                        }
                    }
                }
            }
        }
    }
    finish(out)
}

/// Cap action b^{1|1}(φ).
pub fn cap_b11<T: Field>(phi: &Cochain<T>, x: &UChain<T>, fam: &AnFamily<T>) -> Result<UChain<T>> {
    x.apply_wordwise(0, |w| Ok(cap_b11_word(phi, w, fam)))
}

/// Cyclic cap action B^{1|1}(φ) on one word: a Connes rotation behind a new
/// unit head with one φ-block replaced by its output.
pub fn cap_big_b11_word<T: Field>(phi: &Cochain<T>, w: BarWord) -> Image<T> {
    let seq = w.gens();
    let len = seq.len();
    let mut out = Vec::new();
    for o in 1..=len {
        let mut rot: Vec<Gen> = seq[len - o..].to_vec();
        rot.extend_from_slice(&seq[..len - o]);
        let neg_rot = rotation_sign(&seq, o);
        for (&i, val) in &phi.values {
            for start in 0..=(len.saturating_sub(i)) {
                if start + i > len || rot[start..start + i].iter().any(|&g| g == Gen::One) {
                    continue;
                }
                for g_phi in [Gen::One, Gen::Eps] {
                    let pc = val.component(g_phi);
                    if pc.is_zero() {
                        continue;
                    }
                    // φ passes the new head and the entries before its block
                    let before = 1 + parity_count(&rot[..start]);
                    let neg_phi = g_phi.shifted_odd() && before % 2 == 1;
                    let mut res = vec![Gen::One];
                    res.extend_from_slice(&rot[..start]);
                    res.push(g_phi);
                    res.extend_from_slice(&rot[start + i..]);
                    if let Some(word) = reduced_word(&res) {
                        push(&mut out, word, signed(pc, neg_rot ^ neg_phi));
                    }
                }
            }
        }
    }
    finish(out)
}

/// Cyclic cap action B^{1|1}(φ).
pub fn cap_big_b11<T: Field>(phi: &Cochain<T>, x: &UChain<T>) -> Result<UChain<T>> {
    x.apply_wordwise(0, |w| Ok(cap_big_b11_word(phi, w)))
}

/// Γ(a_0|a_1|..|a_k) = -k·a_0|a_1|..|a_k.
pub fn gamma_op<T: Field>(x: &UChain<T>) -> UChain<T> {
    let mut out = x.empty_like();
    for (&(p, w), c) in x.terms() {
        out.add_term(p, w, c.scale(&T::from_int(-(w.tail as i64))))
            .expect("Γ preserves the shape");
    }
    out
}

/// ∂/∂u, termwise.
pub fn d_du<T: Field>(x: &UChain<T>) -> UChain<T> {
    let mut out = x.empty_like().shift_u(-1);
    for (&(p, w), c) in x.terms() {
        out.add_term(p - 1, w, c.scale(&T::from_int(p)))
            .expect("∂_u preserves the shape");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Field;
    use crate::family::ks_map;
    use crate::Scalar;

    fn fam(n: usize, cap: u32) -> AnFamily<Scalar> {
        AnFamily::new(n, cap).unwrap()
    }

    fn word_chain(w: BarWord, n: usize, cap: u32) -> UChain<Scalar> {
        UChain::basis(w, 0, n, cap, 200, 10).unwrap()
    }

    #[test]
    fn central_b_table() {
        for n in 1..6 {
            let f = fam(n, 3).central_fiber();
            for k in 0..3 * n {
                assert!(hoch_b(&word_chain(BarWord::one(k), n, 3), &f).unwrap().is_zero());
                let img = hoch_b(&word_chain(BarWord::eps(k), n, 3), &f).unwrap();
                if k >= n {
                    let expect = word_chain(BarWord::one(k - n), n, 3);
                    assert_eq!(img, expect, "n={n} k={k}");
                } else {
                    assert!(img.is_zero());
                }
            }
        }
    }

    #[test]
    fn family_b_closed_form() {
        // b(ε|ε^m) = Σ_j j·c_j·1|ε^{m+1-j}
        let n = 3;
        let f = fam(n, 3);
        for m in 0..10 {
            let img = hoch_b(&word_chain(BarWord::eps(m), n, 3), &f).unwrap();
            let mut expect = word_chain(BarWord::eps(0), n, 3).empty_like();
            for j in 1..=(n + 1) {
                if j > m + 1 {
                    continue;
                }
                let c = f.mu(j).one.scale(&Scalar::from_int(j as i64));
                expect.add_term(0, BarWord::one(m + 1 - j), c).unwrap();
            }
            assert_eq!(img, expect, "m={m}");
        }
    }

    #[test]
    fn b_squared_and_d_squared() {
        for n in 1..5 {
            let f = fam(n, 3);
            for k in 0..2 * n + 3 {
                for w in [BarWord::one(k), BarWord::eps(k)] {
                    let x = word_chain(w, n, 3);
                    let bb = hoch_b(&hoch_b(&x, &f).unwrap(), &f).unwrap();
                    assert!(bb.is_zero());
                    let dd = cyclic_d(&cyclic_d(&x, &f).unwrap(), &f).unwrap();
                    assert!(dd.is_zero());
                    assert!(connes_b(&connes_b(&x).unwrap()).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn connes_values() {
        let x = word_chain(BarWord::eps(2), 2, 2);
        let img = connes_b(&x).unwrap();
        assert_eq!(img.coeff(0, BarWord::one(3)).constant_term(), Scalar::from_int(3));
        assert_eq!(img.len(), 1);
        assert!(connes_b(&word_chain(BarWord::one(5), 2, 2)).unwrap().is_zero());
    }

    #[test]
    fn cap_on_words() {
        let n = 3;
        let f = fam(n, 2);
        for i in 0..n {
            let phi = ks_map::<Scalar>(i, n, 2).unwrap();
            for m in 0..8 {
                for (w, expect) in [
                    (BarWord::eps(m), BarWord::eps(m.wrapping_sub(i))),
                    (BarWord::one(m), BarWord::one(m.wrapping_sub(i))),
                ] {
                    let img = cap_b11(&phi, &word_chain(w, n, 2), &f).unwrap();
                    if m >= i {
                        assert_eq!(img, word_chain(expect, n, 2));
                    } else {
                        assert!(img.is_zero());
                    }
                }
                assert!(cap_big_b11(&phi, &word_chain(BarWord::eps(m), n, 2)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn cartan_relations() {
        // [b11(φ), B] = L_φ and [b11(φ), b] = 0 for the family cocycles φ_i
        let n = 3;
        let f = fam(n, 3);
        for i in 0..n {
            let phi = ks_map::<Scalar>(i, n, 3).unwrap();
            for k in 0..9 {
                for w in [BarWord::one(k), BarWord::eps(k)] {
                    let x = word_chain(w, n, 3);
                    let cb = |y: &UChain<Scalar>| cap_b11(&phi, y, &f).unwrap();
                    let lhs = cb(&connes_b(&x).unwrap())
                        .sub(&connes_b(&cb(&x)).unwrap())
                        .unwrap();
                    assert_eq!(lhs, lie_derivative(&phi, &x).unwrap(), "{w}");
                    let comm = cb(&hoch_b(&x, &f).unwrap()).sub(&hoch_b(&cb(&x), &f).unwrap()).unwrap();
                    assert!(comm.is_zero(), "{w}");
                }
            }
        }
    }

    #[test]
    fn gamma_values() {
        let g = gamma_op(&word_chain(BarWord::eps(3), 2, 2));
        assert_eq!(g.coeff(0, BarWord::eps(3)).constant_term(), Scalar::from_int(-3));
        assert!(gamma_op(&word_chain(BarWord::eps(0), 2, 2)).is_zero());
    }

    #[test]
    fn overflow_is_reported() {
        let x = UChain::<Scalar>::basis(BarWord::eps(4), 0, 2, 2, 4, 3).unwrap();
        assert!(matches!(connes_b(&x), Err(crate::Error::Truncation(_))));
        // beyond the u window the same term is simply not retained
        let f = fam(2, 2).central_fiber();
        let y = UChain::<Scalar>::basis(BarWord::eps(4), 3, 2, 2, 4, 3).unwrap();
        let d = cyclic_d(&y, &f).unwrap();
        assert_eq!(d.len(), 1);
    }
}
