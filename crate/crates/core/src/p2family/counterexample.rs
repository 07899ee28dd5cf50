//! The pair `c₁ = [0:1:1]`, `c₂ = [1:2:1]` for `[X³ - XZ² + λYZ² : Y³ + μXZ² : Z³]`:
//! both preperiodic along the line `λ = 0, μ = ζ - 8`, yet not simultaneously
//! preperiodic in general.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{p2_orbit_detect, P2Family};
use crate::algebra::{BiPoly, Rat};
use crate::error::{Error, Result};
use crate::proj::ProjPointP2;

/// An element of `Z[t]/(t^k - 1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycPoly {
    c: Vec<BigInt>,
}

impl CycPoly {
    pub fn constant(k: usize, a: i64) -> Self {
        let mut c = vec![BigInt::zero(); k];
        c[0] = BigInt::from(a);
        CycPoly { c }
    }

    /// `t^e`.
    pub fn monomial(k: usize, e: u64) -> Self {
        let mut c = vec![BigInt::zero(); k];
        c[(e % k as u64) as usize] = BigInt::one();
        CycPoly { c }
    }

    pub fn modulus(&self) -> usize {
        self.c.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(BigInt::is_zero)
    }

    /// `Some(e)` when `self = t^e` with `0 <= e < k`.
    pub fn as_monomial(&self) -> Option<usize> {
        let mut hit = None;
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if !x.is_one() || hit.is_some() {
                return None;
            }
            hit = Some(i);
        }
        hit
    }

    pub fn add(&self, o: &CycPoly) -> CycPoly {
        CycPoly { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &CycPoly) -> CycPoly {
        CycPoly { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &CycPoly) -> CycPoly {
        let k = self.c.len();
        let mut c = vec![BigInt::zero(); k];
        for (i, a) in self.c.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.c.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                c[(i + j) % k] += a * b;
            }
        }
        CycPoly { c }
    }

    pub fn cube(&self) -> CycPoly {
        self.mul(self).mul(self)
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| match i {
                0 => a.to_string(),
                1 => format!("{a}*t"),
                _ => format!("{a}*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `f_{0,μ}` on affine coordinates over the quotient ring.
fn step(x: &CycPoly, y: &CycPoly, mu: &CycPoly) -> (CycPoly, CycPoly) {
    (x.cube().sub(x), y.cube().add(&mu.mul(x)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub k: usize,
    /// `f_{0,ζ-8}(c₂) = [0:ζ:1]`.
    pub first_image_ok: bool,
    /// `f^n(c₂) = [0:ζ^{3^{n-1}}:1]` for `1 <= n <= 6`.
    pub orbit_formula_ok: bool,
    /// `ζ`-exponents of the second coordinate along the orbit, `n = 1..=6`.
    pub y_exponents: Vec<u64>,
    /// The orbit of `c₂` over the quotient ring revisits a point.
    pub c2_preperiod: usize,
    pub c2_period: usize,
    /// `c₁` is fixed by `f_{0,μ}` as an identity in `Q[μ]`.
    pub c1_fixed_generic: bool,
    /// Exact rational checks at `ζ = ±1` (those with `ζ^k = 1`).
    pub rational_zeta_ok: bool,
    /// At `(λ,μ) = (0,0)`: `c₁` preperiodic and `c₂` wandering.
    pub origin_split_ok: bool,
    pub passed: bool,
}

const ORBIT_LEVELS: usize = 6;

pub fn p2_counterexample_check(k: usize) -> Result<CounterexampleReport> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let zeta = CycPoly::monomial(k, 1);
    let mu = zeta.sub(&CycPoly::constant(k, 8));
    let (mut x, mut y) = step(&CycPoly::constant(k, 1), &CycPoly::constant(k, 2), &mu);
    let first_image_ok = x.is_zero() && y == zeta;

    let mut orbit_formula_ok = first_image_ok;
    let mut y_exponents = vec![];
    let mut seen: HashMap<(CycPoly, CycPoly), usize> = HashMap::new();
    seen.insert((CycPoly::constant(k, 1), CycPoly::constant(k, 2)), 0);
    let mut cycle = None;
    let mut n = 1;
    loop {
        if n <= ORBIT_LEVELS {
            let e = 3u64.pow(n as u32 - 1) % k as u64;
            y_exponents.push(y.as_monomial().map_or(u64::MAX, |e| e as u64));
            orbit_formula_ok &= x.is_zero() && y == CycPoly::monomial(k, e);
        }
        if cycle.is_none() {
            if let Some(&j) = seen.get(&(x.clone(), y.clone())) {
                cycle = Some((j, n - j));
            } else {
                seen.insert((x.clone(), y.clone()), n);
            }
        }
        if n >= ORBIT_LEVELS && cycle.is_some() {
            break;
        }
        if n > ORBIT_LEVELS + 2 * k + 2 {
            return Err(Error::invariant("orbit of c₂ over the quotient ring did not close"));
        }
        (x, y) = step(&x, &y, &mu);
        n += 1;
    }
    let (c2_preperiod, c2_period) = cycle.unwrap();

    // generic μ: X³ - X = 0 and Y³ + μX = 1 at (0, 1)
    let zero = BiPoly::zero();
    let one = BiPoly::one();
    let gx = zero.pow(3).sub(&zero);
    let gy = one.pow(3).add(&BiPoly::mu().mul(&zero));
    let c1_fixed_generic = gx.is_zero() && gy == one;

    let fam = P2Family::remark();
    let c1 = pt(0, 1, 1);
    let c2 = pt(1, 2, 1);
    let lam = Rat::zero();
    let mut rational_zeta_ok = true;
    for z in [1i64, -1] {
        if z == -1 && k % 2 == 1 {
            continue;
        }
        let mu = Rat::from_int(z - 8);
        rational_zeta_ok &= p2_orbit_detect(&fam, &lam, &mu, &c1).is_preperiodic()
            && p2_orbit_detect(&fam, &lam, &mu, &c2).is_preperiodic();
    }
    let origin_split_ok = p2_orbit_detect(&fam, &lam, &lam, &c1).is_preperiodic()
        && !p2_orbit_detect(&fam, &lam, &lam, &c2).is_preperiodic();

    let passed = first_image_ok && orbit_formula_ok && c1_fixed_generic && rational_zeta_ok && origin_split_ok;
    Ok(CounterexampleReport {
        k,
        first_image_ok,
        orbit_formula_ok,
        y_exponents,
        c2_preperiod,
        c2_period,
        c1_fixed_generic,
        rational_zeta_ok,
        origin_split_ok,
        passed,
    })
}

fn pt(x: i64, y: i64, z: i64) -> ProjPointP2 {
    ProjPointP2::new(Rat::from_int(x), Rat::from_int(y), Rat::from_int(z)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arithmetic() {
        let t = CycPoly::monomial(3, 1);
        assert_eq!(t.cube(), CycPoly::constant(3, 1));
        assert_eq!(t.mul(&t).as_monomial(), Some(2));
        assert_eq!(t.add(&t).as_monomial(), None);
        assert_eq!(t.sub(&CycPoly::constant(3, 8)).to_string(), "-8 + 1*t");
    }

    #[test]
    fn small_k() {
        let r = p2_counterexample_check(1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.y_exponents, vec![0; 6]);
        assert_eq!((r.c2_preperiod, r.c2_period), (1, 1));
        let r = p2_counterexample_check(3).unwrap();
        assert!(r.passed);
        assert_eq!(r.y_exponents, vec![1, 0, 0, 0, 0, 0]);
        let r = p2_counterexample_check(4).unwrap();
        assert!(r.passed);
        assert_eq!(r.y_exponents, vec![1, 3, 1, 3, 1, 3]);
        assert_eq!((r.c2_preperiod, r.c2_period), (1, 2));
    }

    #[test]
    fn up_to_twelve() {
        for k in 1..=12 {
            assert!(p2_counterexample_check(k).unwrap().passed, "k = {k}");
        }
    }
}
