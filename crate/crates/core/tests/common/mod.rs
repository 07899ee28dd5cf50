//! Shared generators for the integration suites.
#![allow(dead_code)]

use arithdyn::algebra::{Rat, UniPoly};
use arithdyn::family::{MapFamily, StartPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random integer polynomial in λ of degree at most `deg`.
pub fn rand_poly(rng: &mut ChaCha8Rng, deg: usize, range: i64) -> UniPoly {
    let cs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-range..=range)).collect();
    UniPoly::from_ints(&cs)
}

pub fn rand_poly_upto(rng: &mut ChaCha8Rng, max_deg: usize, range: i64) -> UniPoly {
    let deg = rng.gen_range(0..=max_deg);
    rand_poly(rng, deg, range)
}

fn nonzero(rng: &mut ChaCha8Rng, range: i64) -> i64 {
    loop {
        let c = rng.gen_range(-range..=range);
        if c != 0 {
            return c;
        }
    }
}

/// A valid family with `d ∈ [2, max_d]` and coefficient degrees at most 3: either
/// `P/1`, or `((x + q_0) R + κ) / (x + q_0)` whose resultant is `±κ`.
pub fn random_family(rng: &mut ChaCha8Rng, max_d: usize) -> MapFamily {
    loop {
        let d = rng.gen_range(2..=max_d);
        let rational = d >= 3 && rng.gen_bool(0.4);
        let fam = if rational {
            let q0 = rand_poly(rng, 1, 2);
            let mut r: Vec<UniPoly> = (0..d - 1).map(|_| rand_poly_upto(rng, 2, 2)).collect();
            r.push(UniPoly::from_ints(&[nonzero(rng, 2)]));
            let kappa = UniPoly::from_ints(&[nonzero(rng, 3)]);
            // (x + q0) R + κ
            let mut p = vec![UniPoly::zero(); d + 1];
            for (k, rk) in r.iter().enumerate() {
                p[k + 1] = &p[k + 1] + rk;
                p[k] = &p[k] + &(&q0 * rk);
            }
            p[0] = &p[0] + &kappa;
            MapFamily::new(p, vec![q0, UniPoly::one()])
        } else {
            let mut p: Vec<UniPoly> = (0..d).map(|_| rand_poly_upto(rng, 3, 3)).collect();
            p.push(UniPoly::from_ints(&[nonzero(rng, 3)]));
            MapFamily::new(p, vec![UniPoly::one()])
        };
        if let Ok(f) = fam {
            if f.validate().passed() {
                return f;
            }
        }
    }
}

/// A polynomial start of degree `floor(m) + 1` or `floor(m) + 2`.
pub fn random_start(rng: &mut ChaCha8Rng, fam: &MapFamily) -> StartPoint {
    let m = fam.m();
    let base = m.floor().to_string().parse::<usize>().unwrap() + 1;
    let deg = base + rng.gen_range(0..=1);
    let mut cs: Vec<i64> = (0..deg).map(|_| rng.gen_range(-3..=3)).collect();
    cs.push(nonzero(rng, 2));
    StartPoint::poly(UniPoly::from_ints(&cs))
}

pub fn rand_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    Rat::frac(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}
