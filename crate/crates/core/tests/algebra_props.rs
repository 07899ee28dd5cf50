mod common;

use arithdyn::algebra::{bezout_certificates, poly_resultant, BinaryForm, Rat, UniPoly};
use proptest::prelude::*;

fn int_poly(max_len: usize, range: i64) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-range..=range, 1..=max_len).prop_map(|cs| UniPoly::from_ints(&cs))
}

fn big_poly() -> impl Strategy<Value = UniPoly> {
    // long enough for the packed multiplication path, with wide mixed-sign coefficients
    (30usize..80, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = common::rng(seed);
        let cs: Vec<Rat> = (0..n).map(|_| common::rand_rat(&mut rng, i64::MAX / 4, 1_000_000)).collect();
        UniPoly::new(cs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_an_evaluation_homomorphism(a in big_poly(), b in big_poly(), x in -5i64..=5) {
        let x = Rat::frac(x, 3);
        prop_assert_eq!((&a * &b).eval(&x), &a.eval(&x) * &b.eval(&x));
    }

    #[test]
    fn product_is_commutative_and_distributive(a in big_poly(), b in big_poly(), c in int_poly(40, 1000)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn coprimality_agrees_with_gcd(a in int_poly(7, 4), b in int_poly(7, 4), g in int_poly(3, 3)) {
        let (a, b) = (&a * &g, &b * &g);
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!(a.is_coprime(&b), a.gcd(&b).is_constant());
    }

    #[test]
    fn resultant_vanishes_exactly_on_common_factors(a in int_poly(6, 5), b in int_poly(6, 5)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let r = poly_resultant(&a, &b).unwrap();
        let common = !a.gcd(&b).is_constant();
        prop_assert_eq!(r.is_zero(), common && a.degree() > Some(0) && b.degree() > Some(0));
    }

    #[test]
    fn certificates_verify(p in prop::collection::vec(-4i64..=4, 4), q in prop::collection::vec(-4i64..=4, 4)) {
        let form = |cs: &[i64]| BinaryForm::new(3, cs.iter().map(|&c| Rat::from_int(c)).collect());
        let (fp, fq) = (form(&p), form(&q));
        match bezout_certificates(&fp, &fq, 3) {
            Ok(c) => {
                prop_assert!(c.verify(&fp, &fq));
                prop_assert!(c.t <= 5);
            }
            Err(_) => prop_assert!(fp.resultant(&fq).is_zero()),
        }
    }

    #[test]
    fn family_certificates_verify_over_polynomials(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = common::random_family(&mut rng, 4);
        let (hp, hq) = fam.homogeneous_forms();
        let cert = fam.certificate().expect("valid families carry certificates");
        prop_assert!(cert.verify(&hp, &hq));
    }
}
