mod common;

use arithdyn::algebra::{Rat, UniPoly};
use arithdyn::family::{check_degree_law, Caps, IterPair};
use arithdyn::heights::{canonical_height, weil_height};
use arithdyn::proj::ProjPointP1;
use proptest::prelude::*;
use rand::Rng;

const SMALL: Caps = Caps { max_degree: 2000, max_bits: 2_000_000 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn degree_law_on_random_families(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = common::random_family(&mut rng, 3);
        let start = common::random_start(&mut rng, &fam);
        let mut pair = IterPair::new(&start);
        match pair.extend_to(&fam, 3, SMALL) {
            Ok(()) | Err(arithdyn::Error::ResourceLimit { .. }) => {}
            Err(e) => panic!("{e}"),
        }
        let rep = check_degree_law(&fam, &pair).unwrap();
        prop_assert!(rep.holds(), "{:?}", rep.violations);
    }

    #[test]
    fn symbolic_levels_specialize_to_iterates(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = common::random_family(&mut rng, 3);
        let start = common::random_start(&mut rng, &fam);
        let mut pair = IterPair::new(&start);
        pair.extend_to(&fam, 3, SMALL).unwrap();
        for _ in 0..3 {
            let lambda = common::rand_rat(&mut rng, 5, 3);
            let map = fam.specialize(&lambda).unwrap();
            let mut pt = start.specialize(&lambda);
            for n in 1..=3 {
                pt = map.homogeneous_step(&pt);
                let (a, b) = pair.level(n).unwrap();
                let want = ProjPointP1::new(a.eval(&lambda), b.eval(&lambda)).unwrap();
                prop_assert_eq!(&pt, &want);
            }
        }
    }

    #[test]
    fn height_is_functorial(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = common::random_family(&mut rng, 3);
        let lambda = common::rand_rat(&mut rng, 4, 2);
        let map = fam.specialize(&lambda).unwrap();
        let x = common::rand_rat(&mut rng, 9, 5);
        let Some(fx) = map.eval(&x) else { return Ok(()); };
        let h = canonical_height(&map, &x, 1e-9).unwrap();
        let hf = canonical_height(&map, &fx, 1e-9).unwrap();
        let d = map.degree() as f64;
        prop_assert!(
            (hf.value - d * h.value).abs() <= hf.error_radius + d * h.error_radius + 1e-9,
            "{hf:?} vs {d} * {h:?}"
        );
    }

    #[test]
    fn height_stays_within_the_interval(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fam = common::random_family(&mut rng, 4);
        let map = fam.specialize(&common::rand_rat(&mut rng, 4, 3)).unwrap();
        let x = common::rand_rat(&mut rng, 50, 20);
        let h = canonical_height(&map, &x, 1e-8).unwrap();
        let (lo, up) = map.height_interval();
        let diff = h.value - weil_height(&x);
        prop_assert!(h.value >= -h.error_radius);
        prop_assert!(diff >= lo - h.error_radius && diff <= up + h.error_radius, "{diff} not in [{lo}, {up}]");
    }

    #[test]
    fn preperiodic_orbits_have_height_zero(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = rng.gen_range(-3i64..=1);
        let map = arithdyn::maps::RationalMap::polynomial(UniPoly::from_ints(&[c, 0, 1])).unwrap();
        let x = Rat::from_int(rng.gen_range(-3..=3));
        let orbit = map.orbit_detect(&ProjPointP1::affine(&x));
        let h = canonical_height(&map, &x, 1e-9).unwrap();
        if orbit.is_preperiodic() {
            prop_assert!(h.is_zero_within_radius(), "{h:?}");
        } else {
            prop_assert!(h.value > h.error_radius, "{h:?}");
        }
    }
}
