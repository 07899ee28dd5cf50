//! Complex root isolation with certified inclusion disks, and exact rational roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{nt, Rat, UniPoly};
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const MAX_ITERS: usize = 2000;

/// A complex number known to lie within `error_radius` of `(re, im)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub error_radius: f64,
}

/// Rounding slack applied to every propagated radius.
fn inflate(x: f64) -> f64 {
    x * (1.0 + 4.0 * EPS) + f64::MIN_POSITIVE
}

impl ComplexApprox {
    pub fn new(re: f64, im: f64, error_radius: f64) -> Self {
        assert!(error_radius.is_finite() && error_radius >= 0.0);
        ComplexApprox { re, im, error_radius }
    }

    pub fn exact(z: Complex64) -> Self {
        Self::new(z.re, z.im, 0.0)
    }

    pub fn from_rat(r: &Rat) -> Self {
        let x = r.to_f64();
        Self::new(x, 0.0, x.abs() * EPS)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_upper(&self) -> f64 {
        inflate(self.center().norm() + self.error_radius)
    }

    pub fn norm_lower(&self) -> f64 {
        (self.center().norm() * (1.0 - 2.0 * EPS) - self.error_radius).max(0.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.center() + o.center();
        Self::new(c.re, c.im, inflate(self.error_radius + o.error_radius + c.norm() * EPS))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.center() - o.center();
        Self::new(c.re, c.im, inflate(self.error_radius + o.error_radius + c.norm() * EPS))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = self.center() * o.center();
        let r = self.center().norm() * o.error_radius
            + o.center().norm() * self.error_radius
            + self.error_radius * o.error_radius
            + 2.0 * c.norm() * EPS;
        Self::new(c.re, c.im, inflate(r))
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.mul(&Self::from_rat(r))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center()).norm() <= self.error_radius
    }

    pub fn disjoint(&self, o: &Self) -> bool {
        (self.center() - o.center()).norm() > inflate(self.error_radius + o.error_radius)
    }
}

/// Evaluation of `p(z)` in the log domain: `(ln|p(z)|, ln(error bound))`, plus the
/// Newton correction `p/p'`.
struct Evaluator {
    a: Vec<Complex64>,
    abs: Vec<f64>,
    n: usize,
}

impl Evaluator {
    fn new(p: &UniPoly) -> Result<Self> {
        let a: Vec<f64> = p.coeffs().iter().map(Rat::to_f64).collect();
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericFailure {
                msg: "coefficients exceed floating range".into(),
                best_radius: f64::INFINITY,
            });
        }
        let n = a.len() - 1;
        Ok(Evaluator {
            abs: a.iter().map(|x| x.abs()).collect(),
            a: a.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            n,
        })
    }

    /// Horner evaluation of `Σ a_k w^k` in order `coeff(order(k))`.
    fn horner(&self, w: Complex64, rev: bool) -> (Complex64, Complex64, f64) {
        let n = self.n;
        let idx = |k: usize| if rev { n - k } else { k };
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        let mut bound = 0.0;
        let wn = w.norm();
        for k in (0..=n).rev() {
            dv = dv * w + v;
            v = v * w + self.a[idx(k)];
            bound = bound * wn + self.abs[idx(k)];
        }
        (v, dv, bound)
    }

    /// `p(z)/p'(z)`.
    fn newton(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            let (v, dv, _) = self.horner(z, false);
            v / dv
        } else {
            let w = z.inv();
            let (q, dq, _) = self.horner(w, true);
            z * q / (q * self.n as f64 - w * dq)
        }
    }

    /// `ln(|p(z)| + rounding bound)`.
    fn ln_abs_upper(&self, z: Complex64) -> f64 {
        let gamma = (4 * self.n + 4) as f64 * EPS;
        if z.norm() <= 1.0 {
            let (v, _, b) = self.horner(z, false);
            (v.norm() + gamma * b).ln()
        } else {
            let (q, _, b) = self.horner(z.inv(), true);
            self.n as f64 * z.norm().ln() + (q.norm() + gamma * b).ln()
        }
    }
}

/// Initial guesses from the upper convex hull of `(k, ln|a_k|)`.
fn newton_polygon_start(abs: &[f64]) -> Vec<Complex64> {
    let pts: Vec<(f64, f64)> = abs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(k, a)| (k as f64, a.ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::new();
    for (seg, w) in hull.windows(2).enumerate() {
        let (k, l) = (w[0].0, w[1].0);
        let m = (l - k) as usize;
        let r = ((w[0].1 - w[1].1) / (l - k)).exp();
        for j in 0..m {
            let theta = std::f64::consts::TAU * j as f64 / m as f64 + 0.4 + 0.7 * seg as f64;
            out.push(Complex64::from_polar(r, theta));
        }
    }
    out
}

/// Aberth iteration followed by certification of pairwise disjoint inclusion disks.
///
/// Requires a squarefree input of degree at least one; the radii are whatever the
/// arithmetic allows.
pub fn isolate_roots(p: &UniPoly) -> Result<Vec<ComplexApprox>> {
    let n = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::precondition("root isolation needs degree >= 1"))?;
    if !p.is_squarefree() {
        return Err(Error::precondition("polynomial is not squarefree"));
    }
    let tz = p.trailing_zeros();
    let mut out = Vec::with_capacity(n);
    if tz == 1 {
        out.push(ComplexApprox::exact(Complex64::zero()));
    }
    let q = UniPoly::new(p.coeffs()[tz..].to_vec());
    if q.deg0() == 0 {
        return Ok(out);
    }
    if q.deg0() == 1 {
        let r = -(&q.coeff(0) / &q.coeff(1));
        out.push(ComplexApprox::from_rat(&r));
        return certify_disjoint(out);
    }
    let ev = Evaluator::new(&q)?;
    let mut z = newton_polygon_start(&ev.abs);
    let m = z.len();
    let mut settled = 0;
    for _ in 0..MAX_ITERS {
        let mut biggest: f64 = 0.0;
        for i in 0..m {
            let nw = ev.newton(z[i]);
            let mut s = Complex64::zero();
            for j in 0..m {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = nw / (Complex64::one() - nw * s);
            if w.is_finite() {
                z[i] -= w;
                biggest = biggest.max(w.norm() / z[i].norm().max(f64::MIN_POSITIVE));
            }
        }
        if biggest < 16.0 * EPS {
            settled += 1;
            if settled >= 3 {
                break;
            }
        }
    }
    let ln_lead = ev.abs[ev.n].ln();
    for i in 0..m {
        let mut ln_prod = 0.0;
        for j in 0..m {
            if j != i {
                ln_prod += (z[i] - z[j]).norm().ln();
            }
        }
        let ln_r = (m as f64).ln() + ev.ln_abs_upper(z[i]) - ln_lead - ln_prod;
        let r = inflate(inflate(ln_r.exp()) + 2.0 * z[i].norm() * EPS);
        out.push(ComplexApprox::new(z[i].re, z[i].im, if r.is_finite() { r } else { f64::MAX }));
    }
    certify_disjoint(out)
}

fn certify_disjoint(roots: Vec<ComplexApprox>) -> Result<Vec<ComplexApprox>> {
    let worst = roots.iter().map(|r| r.error_radius).fold(0.0, f64::max);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if !roots[i].disjoint(&roots[j]) {
                return Err(Error::NumericFailure {
                    msg: "inclusion disks overlap".into(),
                    best_radius: worst,
                });
            }
        }
    }
    Ok(roots)
}

/// All complex roots of a squarefree `p`, each disk of radius at most `target_radius`.
pub fn complex_roots(p: &UniPoly, target_radius: f64) -> Result<Vec<ComplexApprox>> {
    let roots = isolate_roots(p)?;
    let worst = roots.iter().map(|r| r.error_radius).fold(0.0, f64::max);
    if worst > target_radius {
        return Err(Error::NumericFailure {
            msg: format!("inclusion radius {worst:e} above target {target_radius:e}"),
            best_radius: worst,
        });
    }
    Ok(roots)
}

/// Exact value of the homogenized integer form at `a/b` (zero iff `a/b` is a root).
fn eval_homog(c: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    for ci in c.iter().rev() {
        acc = acc * a + ci * &bpow;
        bpow *= b;
    }
    acc
}

const DIVISOR_PAIR_LIMIT: usize = 200_000;

fn roots_by_divisors(c: &[BigInt]) -> Option<Vec<Rat>> {
    let lead = c.last()?.abs().to_u64()?;
    let tail = c[0].abs().to_u64()?;
    let (dl, dt) = (nt::divisors(lead), nt::divisors(tail));
    if dl.len() * dt.len() > DIVISOR_PAIR_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    for &b in &dl {
        for &a in &dt {
            if a.gcd(&b) != 1 {
                continue;
            }
            let (ab, bb) = (BigInt::from(a), BigInt::from(b));
            for s in [ab.clone(), -ab] {
                if eval_homog(c, &s, &bb).is_zero() {
                    out.push(Rat::new(s, bb.clone()).unwrap());
                }
            }
        }
    }
    Some(out)
}

fn sign_at(p: &UniPoly, x: &Rat) -> i32 {
    let v = p.eval(x);
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

/// Rational roots of a squarefree integer polynomial with nonzero constant term,
/// located from the certified complex disks and confirmed exactly.
fn roots_by_isolation(c: &[BigInt]) -> Result<Vec<Rat>> {
    let p = UniPoly::from_bigints(c);
    let lead = Rat::from_big(c.last().unwrap().abs().into());
    let target = (&lead * &Rat::from_int(2)).recip().unwrap();
    let mut out = Vec::new();
    for disk in isolate_roots(&p)? {
        if disk.im.abs() > disk.error_radius {
            continue;
        }
        let (Some(mut lo), Some(mut hi)) = (
            Rat::from_f64(disk.re - disk.error_radius * (1.0 + EPS)),
            Rat::from_f64(disk.re + disk.error_radius * (1.0 + EPS)),
        ) else {
            continue;
        };
        let (mut slo, shi) = (sign_at(&p, &lo), sign_at(&p, &hi));
        if slo == 0 {
            out.push(lo);
            continue;
        }
        if shi == 0 {
            out.push(hi);
            continue;
        }
        if slo == shi {
            continue;
        }
        let mut hit = None;
        while &hi - &lo >= target {
            let mid = &(&lo + &hi) * &Rat::frac(1, 2);
            let sm = sign_at(&p, &mid);
            if sm == 0 {
                hit = Some(mid);
                break;
            }
            if sm == slo {
                lo = mid;
                slo = sm;
            } else {
                hi = mid;
            }
        }
        let cand = match hit {
            Some(h) => Some(h),
            None => {
                let k = (&lo * &lead).floor() + BigInt::one();
                let r = Rat::new(k, lead.numer().clone()).unwrap();
                (r > lo && r < hi && p.eval(&r).is_zero()).then_some(r)
            }
        };
        out.extend(cand);
    }
    Ok(out)
}

/// All rational roots, repeated by multiplicity, ascending.
pub fn rational_roots(p: &UniPoly) -> Result<Vec<Rat>> {
    if p.is_zero() {
        return Err(Error::invalid("rational roots of the zero polynomial"));
    }
    let mut out = vec![Rat::zero(); p.trailing_zeros()];
    let q = UniPoly::new(p.coeffs()[p.trailing_zeros()..].to_vec());
    if q.deg0() > 0 {
        for (f, k) in q.squarefree_decomposition() {
            if f.deg0() == 0 {
                continue;
            }
            let (_, c) = f.integer_primitive();
            let found = match roots_by_divisors(&c) {
                Some(r) => r,
                None => roots_by_isolation(&c)?,
            };
            for r in found {
                out.extend(std::iter::repeat_n(r, k));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn rational_examples() {
        let r = rational_roots(&p(&[0, 0, 0, 2, 1])).unwrap();
        assert_eq!(r, vec![Rat::from_int(-2), Rat::zero(), Rat::zero(), Rat::zero()]);
        assert!(rational_roots(&p(&[1, 0, 1])).unwrap().is_empty());
        assert_eq!(rational_roots(&p(&[0, 1, 1])).unwrap(), vec![Rat::from_int(-1), Rat::zero()]);
        let r = rational_roots(&p(&[-3, 2, 6, -4])).unwrap();
        assert!(r.contains(&Rat::frac(3, 2)));
    }

    #[test]
    fn isolation_path_matches_divisors() {
        // (7x - 3)(x + 5)(x^2 + 1)
        let f = &(&p(&[-3, 7]) * &p(&[5, 1])) * &p(&[1, 0, 1]);
        let (_, c) = f.integer_primitive();
        let mut a = roots_by_isolation(&c).unwrap();
        let mut b = roots_by_divisors(&c).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a, vec![Rat::from_int(-5), Rat::frac(3, 7)]);
    }

    #[test]
    fn complex_examples() {
        let r = complex_roots(&p(&[1, 0, 1]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!((z.re).abs() < 1e-12 && (z.im.abs() - 1.0).abs() < 1e-12);
            assert!(z.error_radius <= 1e-12);
        }
        let r = complex_roots(&p(&[-2, 0, 1]), 1e-12).unwrap();
        let mut xs: Vec<f64> = r.iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[1] - std::f64::consts::SQRT_2).abs() < 1e-12);
        // λ^2 (λ + 1)^2 is not squarefree
        let bad = p(&[0, 0, 1, 2, 1]);
        assert!(matches!(complex_roots(&bad, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn higher_degree_disks_contain_roots() {
        // roots of unity of order 17 and the product (x - k) for k = 1..8
        let mut cs = vec![0i64; 18];
        cs[0] = -1;
        cs[17] = 1;
        let r = complex_roots(&p(&cs), 1e-10).unwrap();
        for z in &r {
            assert!((z.center().norm() - 1.0).abs() < 1e-10 + z.error_radius);
        }
        let roots: Vec<Rat> = (1..=8).map(Rat::from_int).collect();
        let w = UniPoly::from_roots(&roots);
        let r = complex_roots(&w, 1e-6).unwrap();
        for k in 1..=8 {
            let hits = r.iter().filter(|z| z.contains(Complex64::new(k as f64, 0.0))).count();
            assert_eq!(hits, 1);
        }
    }
}
