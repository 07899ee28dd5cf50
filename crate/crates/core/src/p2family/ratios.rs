//! Two-sided bounds for `M_{n+1}/M_n^d`, `M_n = max(|A_n|_v, |B_n|_v, 1)`, inside and
//! outside the ball `max(|λ|_v, |μ|_v) <= L`.

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::P2Family;
use crate::algebra::Rat;
use crate::error::{Error, Result};
use crate::heights::Place;
use crate::homog::ComplexMap;
use crate::par::par_map;

/// `min(|P(z)|,|Q(z)|) >= δ|z|^d` for `|z| >= L_6`, `max(|P(z)|,|Q(z)|) <= C_15 max(1,|z|)^d`,
/// and the radius beyond which the growth claim is guaranteed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FittedConstants {
    pub delta: f64,
    pub l6: f64,
    pub c15: f64,
    pub l_outside: f64,
}

fn abs_v(x: &Rat, place: Place) -> f64 {
    match place {
        Place::Prime(p) => match x.valuation(p) {
            None => 0.0,
            Some(v) => (p as f64).powi(-v as i32),
        },
        _ => x.abs().to_f64(),
    }
}

fn outside_radius(fam: &P2Family, a: &Rat, b: &Rat, place: Place, delta: f64, l6: f64) -> f64 {
    let d = fam.degree() as i32;
    let (aa, ab) = (abs_v(a, place), abs_v(b, place));
    let pa = abs_v(&fam.eval_p(a), place);
    let qb = abs_v(&fam.eval_q(b), place);
    [
        1.0,
        2.0 * qb / aa,
        2.0 * pa / ab,
        2.0 * l6 / aa.min(ab),
        delta * l6.powi(d - 1) / 2.0,
        2f64.powi(d) / (delta * aa.powi(d - 1)),
        2f64.powi(d) / (delta * ab.powi(d - 1)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Constants from the coefficients. At infinity the split `L_6 = s Σ_{k<d}|p_k| / |c_P|`,
/// `δ = (1 - 1/s) min(|c_P|, |c_Q|)` is chosen over a candidate set of `s` to minimize
/// the outside radius.
pub fn fitted_constants(fam: &P2Family, a: &Rat, b: &Rat, place: Place) -> Result<FittedConstants> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("start coordinates a, b must be nonzero"));
    }
    let d = fam.degree();
    let coeffs = |c: &[Rat]| c.iter().map(|x| abs_v(x, place)).collect::<Vec<f64>>();
    let (p, q) = (coeffs(fam.p()), coeffs(fam.q()));
    match place {
        Place::Arch => {
            let c15 = p.iter().sum::<f64>().max(q.iter().sum::<f64>()) * (1.0 + 1e-12);
            let tail = |c: &[f64]| c[..d].iter().sum::<f64>() / c[d];
            let mut best: Option<FittedConstants> = None;
            for s in [1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0] {
                let l6 = (s * tail(&p)).max(s * tail(&q)).max(1.0);
                // |P(z)| >= |z|^d (|c_P| - Σ|p_k| / |z|) for |z| >= 1
                let delta = (p[d] - p[..d].iter().sum::<f64>() / l6).min(q[d] - q[..d].iter().sum::<f64>() / l6)
                    * (1.0 - 1e-12);
                let l_outside = outside_radius(fam, a, b, place, delta, l6);
                if best.as_ref().is_none_or(|c| l_outside < c.l_outside) {
                    best = Some(FittedConstants { delta, l6, c15, l_outside });
                }
            }
            Ok(best.unwrap())
        }
        Place::Prime(_) => {
            let c15 = p.iter().chain(&q).copied().fold(0.0, f64::max);
            let root = |c: &[f64]| {
                (0..d)
                    .filter(|&k| c[k] > 0.0)
                    .map(|k| (c[k] / c[d]).powf(1.0 / (d - k) as f64))
                    .fold(1.0, f64::max)
            };
            // strictly above every crossover the top term dominates
            let l6 = root(&p).max(root(&q)) * (1.0 + 1e-9);
            let delta = p[d].min(q[d]);
            let l_outside = outside_radius(fam, a, b, place, delta, l6);
            Ok(FittedConstants { delta, l6, c15, l_outside })
        }
        Place::Finite => Err(Error::invalid("ratio bounds need a specific place")),
    }
}

/// Observed extremes of `M_{n+1}/M_n^d` for `1 <= n < n_max` against the proven bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionStats {
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct P2RatioReport {
    pub place: Place,
    pub l: f64,
    pub n_max: usize,
    pub constants: FittedConstants,
    pub inside: RegionStats,
    pub outside: RegionStats,
    /// `M_n^{d-1} >= 2 max(|λ|,|μ|)/δ` checked on every outside sample and level.
    pub claim_checked: usize,
    pub claim_violations: usize,
    pub min_log_m: f64,
}

impl P2RatioReport {
    pub fn passed(&self) -> bool {
        self.inside.violations == 0 && self.outside.violations == 0 && self.claim_violations == 0 && self.min_log_m >= 0.0
    }
}

/// `ln M_n` for `n = 0..=n_max`.
fn log_m_complex(fam: &P2Family, a: &Rat, b: &Rat, lambda: Complex64, mu: Complex64, n_max: usize) -> Vec<f64> {
    let d = fam.degree() as u32;
    let c = |x: &Rat| Complex64::new(x.to_f64(), 0.0);
    let mut f0: Vec<(Vec<u32>, Complex64)> =
        fam.p().iter().enumerate().map(|(k, x)| (vec![k as u32, 0, d - k as u32], c(x))).collect();
    f0.push((vec![0, 1, d - 1], lambda));
    let mut f1: Vec<(Vec<u32>, Complex64)> =
        fam.q().iter().enumerate().map(|(k, x)| (vec![0, k as u32, d - k as u32], c(x))).collect();
    f1.push((vec![1, 0, d - 1], mu));
    let f2 = vec![(vec![0, 0, d], Complex64::new(1.0, 0.0))];
    let map = ComplexMap::new(d, vec![f0, f1, f2]);
    let z = [c(a), c(b), Complex64::new(1.0, 0.0)];
    let m0 = z.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
    let mut w: Vec<Complex64> = z.iter().map(|x| x / m0).collect();
    let mut out = vec![m0.ln()];
    for _ in 0..n_max {
        let img = map.eval(&w);
        let m = img.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
        out.push(d as f64 * out.last().unwrap() + m.ln());
        w = img.iter().map(|x| x / m).collect();
    }
    out
}

fn log_m_padic(fam: &P2Family, a: &Rat, b: &Rat, lambda: &Rat, mu: &Rat, p: u64, n_max: usize) -> Vec<f64> {
    let lnp = (p as f64).ln();
    let (mut x, mut y) = (a.clone(), b.clone());
    let lm = |x: &Rat, y: &Rat| {
        let v = [x, y].iter().filter_map(|t| t.valuation(p)).min().unwrap_or(0).min(0);
        -(v as f64) * lnp
    };
    let mut out = vec![lm(&x, &y)];
    for _ in 0..n_max {
        let nx = &fam.eval_p(&x) + &(lambda * &y);
        let ny = &fam.eval_q(&y) + &(mu * &x);
        x = nx;
        y = ny;
        out.push(lm(&x, &y));
    }
    out
}

enum Sample {
    C(Complex64, Complex64),
    R(Rat, Rat),
}

impl Sample {
    fn radius(&self, place: Place) -> f64 {
        match self {
            Sample::C(l, m) => l.norm().max(m.norm()),
            Sample::R(l, m) => abs_v(l, place).max(abs_v(m, place)),
        }
    }
}

fn sample_arch(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn pow_p(p: u64, k: u32) -> Rat {
    Rat::from(BigInt::from(p).pow(k))
}

fn samples(place: Place, l: f64, l_out: f64, count: usize, seed: u64) -> (Vec<Sample>, Vec<Sample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = vec![];
    let mut outside = vec![];
    match place {
        Place::Prime(p) => {
            let lnp = (p as f64).ln();
            let k_in = (l.ln() / lnp + 1e-9).floor().max(0.0) as u32;
            let k_out = (l_out.ln() / lnp + 1e-9).floor().max(0.0) as u32 + 1;
            let rat = |rng: &mut ChaCha8Rng, k: u32, unit: bool| loop {
                let n: i64 = rng.gen_range(-30..=30);
                if unit && (n == 0 || n % p as i64 == 0) {
                    continue;
                }
                break &Rat::from_int(n) * &pow_p(p, k).recip().unwrap();
            };
            for _ in 0..count {
                let (kl, km) = (rng.gen_range(0..=k_in), rng.gen_range(0..=k_in));
                inside.push(Sample::R(rat(&mut rng, kl, false), rat(&mut rng, km, false)));
            }
            for _ in 0..count {
                let k = rng.gen_range(k_out..=k_out + 2);
                let big = rat(&mut rng, k, true);
                let j = rng.gen_range(0..=k);
                let other = rat(&mut rng, j, false);
                let s = if rng.gen_bool(0.5) { Sample::R(big, other) } else { Sample::R(other, big) };
                outside.push(s);
            }
        }
        _ => {
            for _ in 0..count {
                inside.push(Sample::C(sample_arch(&mut rng, l), sample_arch(&mut rng, l)));
            }
            for _ in 0..count {
                let r = l_out * 100f64.powf(rng.gen_range(0.0..1.0));
                let big = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
                let other = sample_arch(&mut rng, r);
                let s = if rng.gen_bool(0.5) { Sample::C(big, other) } else { Sample::C(other, big) };
                outside.push(s);
            }
        }
    }
    (inside, outside)
}

/// Ratio bounds over `samples` parameters in the ball `max(|λ|,|μ|) <= L` and `samples`
/// beyond `max(L, L_outside)`. Rational samples with exact valuations at a prime; complex
/// samples at infinity.
pub fn p2_ratio_report(
    fam: &P2Family,
    a: &Rat,
    b: &Rat,
    place: Place,
    l: f64,
    sample_count: usize,
    n_max: usize,
    seed: u64,
) -> Result<P2RatioReport> {
    if !(l > 1.0) {
        return Err(Error::invalid("L must exceed 1"));
    }
    if n_max < 2 {
        return Err(Error::invalid("n_max must be at least 2"));
    }
    let k = fitted_constants(fam, a, b, place)?;
    let d = fam.degree() as f64;
    let l_out = l.max(k.l_outside) * (1.0 + 1e-6);
    let (inside, outside) = samples(place, l, l_out, sample_count, seed);
    let run = |s: &Sample| match (s, place) {
        (Sample::C(x, y), _) => log_m_complex(fam, a, b, *x, *y, n_max),
        (Sample::R(x, y), Place::Prime(p)) => log_m_padic(fam, a, b, x, y, p, n_max),
        _ => unreachable!(),
    };
    let in_logs = par_map(&inside, run);
    let out_logs = par_map(&outside, run);

    let l7 = k.l6.max((2.0 * l / k.delta).powf(1.0 / (d - 1.0))) * (1.0 + 1e-9);
    let stats = |logs: &[Vec<f64>], lower: f64, upper: f64| {
        let (mut lo, mut hi, mut bad) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for lm in logs {
            for n in 1..n_max {
                let r = lm[n + 1] - d * lm[n];
                lo = lo.min(r);
                hi = hi.max(r);
                let slack = 1e-9 * (1.0 + lm[n + 1].abs());
                if r < lower.ln() - slack || r > upper.ln() + slack {
                    bad += 1;
                }
            }
        }
        RegionStats {
            samples: logs.len(),
            min_ratio: lo.exp(),
            max_ratio: hi.exp(),
            lower_bound: lower,
            upper_bound: upper,
            violations: bad,
        }
    };
    let inside_stats = stats(&in_logs, (1.0 / l7.powf(d)).min(k.delta / 2.0), k.c15 + l);
    let outside_stats = stats(&out_logs, k.delta / 2.0, k.c15 + k.delta / 2.0);
    let mut claim_checked = 0;
    let mut claim_violations = 0;
    for (s, lm) in outside.iter().zip(&out_logs) {
        let target = (2.0 * s.radius(place) / k.delta).ln();
        for n in 1..=n_max {
            claim_checked += 1;
            if (d - 1.0) * lm[n] < target - 1e-9 * (1.0 + target.abs()) {
                claim_violations += 1;
            }
        }
    }
    let min_log_m = in_logs.iter().chain(&out_logs).flatten().copied().fold(f64::INFINITY, f64::min);
    Ok(P2RatioReport {
        place,
        l,
        n_max,
        constants: k,
        inside: inside_stats,
        outside: outside_stats,
        claim_checked,
        claim_violations,
        min_log_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remark_family_at_infinity() {
        let f = P2Family::remark();
        let (a, b) = (Rat::one(), Rat::from_int(2));
        let rep = p2_ratio_report(&f, &a, &b, Place::Arch, 2.0, 40, 5, 7).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.inside.min_ratio <= rep.inside.max_ratio);
        assert!(rep.outside.min_ratio >= rep.constants.delta / 2.0);
        assert!(rep.min_log_m >= 0.0);
    }

    #[test]
    fn at_a_prime() {
        let f = P2Family::from_ints(&[1, 0, 0, 3], &[0, 2, 0, 1]).unwrap();
        let (a, b) = (Rat::frac(1, 3), Rat::one());
        let rep = p2_ratio_report(&f, &a, &b, Place::Prime(3), 9.0, 30, 5, 11).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.claim_checked > 0);
    }

    #[test]
    fn hundred_outside() {
        let f = P2Family::remark();
        let (a, b) = (Rat::one(), Rat::from_int(2));
        let k = fitted_constants(&f, &a, &b, Place::Arch).unwrap();
        assert!(k.l_outside < 100.0, "{k:?}");
        let lm = log_m_complex(&f, &a, &b, Complex64::new(100.0, 0.0), Complex64::new(0.0, 3.0), 5);
        for n in 1..5 {
            assert!(lm[n + 1] - 3.0 * lm[n] >= (k.delta / 2.0).ln());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let f = P2Family::remark();
        let (a, b) = (Rat::one(), Rat::from_int(2));
        let r1 = p2_ratio_report(&f, &a, &b, Place::Arch, 3.0, 10, 4, 5).unwrap();
        let r2 = p2_ratio_report(&f, &a, &b, Place::Arch, 3.0, 10, 4, 5).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }
}
