use proptest::prelude::*;

use catgw_core::bar::{cyclic_d, BarWord, Shape, UChain};
use catgw_core::coeffs::{Field, TSeries};
use catgw_core::decompose::Decomposer;
use catgw_core::family::AnFamily;
use catgw_core::pairing::{hres_pairing, SplittingBasis};
use catgw_core::Scalar;

fn chain(n: usize, cap: u32, bar_cap: usize, u_max: i64, terms: &[(bool, usize, i64, i64, usize)]) -> UChain<Scalar> {
    let mut x = UChain::zero(n, cap, bar_cap, u_max);
    for &(eps, tail, p, c, var) in terms {
        let w = if eps { BarWord::eps(tail) } else { BarWord::one(tail) };
        let mut s = TSeries::constant(n, cap, Scalar::from_int(c));
        if cap > 1 {
            s += &TSeries::var(n, cap, var % n);
        }
        x.add_term(p, w, s).unwrap();
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_differential_squares_to_zero(
        n in 1usize..5,
        terms in prop::collection::vec((any::<bool>(), 0usize..12, 0i64..2, -3i64..4, 0usize..5), 1..6),
    ) {
        let fam = AnFamily::<Scalar>::new(n, 3).unwrap();
        let x = chain(n, 3, 16, 3, &terms);
        let dd = cyclic_d(&cyclic_d(&x, &fam).unwrap(), &fam).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn hres_is_sesquilinear(n in 1usize..6, a in 0i64..3, b in 0i64..3, i in 0usize..6, j in 0usize..6) {
        let (i, j) = (i % n, j % n);
        let shape = Shape { nvars: n, cap: 1, bar_cap: 12 * (n + 1), u_max: 8 };
        let s = SplittingBasis::<Scalar>::new(n, shape).unwrap().s;
        let h = hres_pairing(n, &s[i].shift_u(a).truncate_u(8).unwrap(), &s[j].shift_u(b).truncate_u(8).unwrap()).unwrap();
        let sign = if a % 2 == 1 { -1 } else { 1 };
        let want = Scalar::from_int(sign * (i + j + 1 == n) as i64);
        prop_assert_eq!(h.coeff(a + b).constant_term(), want);
        for (p, c) in h.terms() {
            if *p != a + b && *p <= 8 {
                prop_assert!(c.is_zero());
            }
        }
    }

    #[test]
    fn decomposition_recovers_coordinates(
        n in 1usize..5,
        coords in prop::collection::vec((0usize..5, -2i64..1, -4i64..5), 1..5),
        exact in prop::collection::vec((any::<bool>(), 0usize..10, -2i64..1, -3i64..4, 0usize..1), 0..4),
    ) {
        let bar_cap = 6 * (n + 1) + n;
        let shape = Shape { nvars: n, cap: 1, bar_cap, u_max: 6 };
        let s = SplittingBasis::<Scalar>::new(n, shape).unwrap().s;
        let dec = Decomposer::new(n, &s, -2, 0, bar_cap).unwrap();
        let mut x = UChain::zero(n, 1, bar_cap + 1, 2);
        let mut want = std::collections::BTreeMap::new();
        for &(j, m, c) in &coords {
            let j = j % n;
            x = x.add(&s[j].shift_u(m).scale(&Scalar::from_int(c)).with_bar_cap(bar_cap + 1).unwrap()).unwrap();
            *want.entry((j, m)).or_insert_with(|| Scalar::from_int(0)) += Scalar::from_int(c);
        }
        want.retain(|_, v: &mut Scalar| *v != Scalar::from_int(0));
        let fam = AnFamily::<Scalar>::new(n, 1).unwrap();
        let w = chain(n, 1, bar_cap - 2, 2, &exact);
        x = x.add(&cyclic_d(&w, &fam).unwrap()).unwrap();
        let c = dec.decompose(&x.u_range(-2, 0)).unwrap();
        let got: std::collections::BTreeMap<_, _> = c.coords.iter().map(|(k, v)| (*k, v.constant_term())).collect();
        prop_assert_eq!(got, want);
    }
}
