use arithdyn::algebra::Rat;
use arithdyn::family::Caps;
use arithdyn::p2family::{p2_iterate_symbolic, p2_step, CycPoly, P2Family};
use arithdyn::proj::ProjPointP2;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = P2Family> {
    (3usize..=4)
        .prop_flat_map(|d| {
            let lead = prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)];
            (
                prop::collection::vec(-3i64..=3, d),
                lead.clone(),
                prop::collection::vec(-3i64..=3, d),
                lead,
            )
        })
        .prop_map(|(mut p, cp, mut q, cq)| {
            p.push(cp);
            q.push(cq);
            P2Family::from_ints(&p, &q).unwrap()
        })
}

fn rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Rat::frac(a, b))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn cyc(k: usize) -> impl Strategy<Value = CycPoly> {
    prop::collection::vec(-4i64..=4, k).prop_map(move |cs| {
        cs.iter()
            .enumerate()
            .fold(CycPoly::constant(k, 0), |acc, (i, &c)| acc.add(&CycPoly::constant(k, c).mul(&CycPoly::monomial(k, i as u64))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symbolic_iterates_specialize(fam in family(), a in nonzero_rat(), b in nonzero_rat(), l in rat(), m in rat()) {
        let pair = p2_iterate_symbolic(&fam, &a, &b, 2, &Caps::default()).unwrap();
        let mut pt = ProjPointP2::new(a, b, Rat::one()).unwrap();
        for n in 1..=2 {
            pt = p2_step(&fam, &pt, &l, &m).unwrap();
            let [x, y, z] = pair.specialize(n, &l, &m).unwrap();
            prop_assert_eq!(&pt, &ProjPointP2::new(x, y, z).unwrap());
        }
    }

    #[test]
    fn p2_height_is_functorial(fam in family(), a in rat(), b in rat(), l in rat(), m in rat()) {
        let map = fam.specialize(&l, &m);
        let pt = ProjPointP2::new(a, b, Rat::one()).unwrap();
        let img = map.step(&pt).unwrap();
        let h = map.canonical_height(&pt, 1e-8).unwrap();
        let hf = map.canonical_height(&img, 1e-8).unwrap();
        let d = fam.degree() as f64;
        prop_assert!((hf.value - d * h.value).abs() <= hf.error_radius + d * h.error_radius + 1e-9);
        let (lo, up) = map.height_interval();
        let diff = h.value - pt.weil_height();
        prop_assert!(diff >= lo - h.error_radius && diff <= up + h.error_radius);
    }

    #[test]
    fn quotient_ring_laws((k, x, y, z) in (1usize..=7).prop_flat_map(|k| (Just(k), cyc(k), cyc(k), cyc(k)))) {
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.sub(&x), CycPoly::constant(k, 0));
        prop_assert_eq!(x.cube(), x.mul(&x).mul(&x));
        prop_assert_eq!(CycPoly::monomial(k, k as u64 + 2), CycPoly::monomial(k, 2));
    }
}
