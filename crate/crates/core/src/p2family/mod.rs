//! The two-parameter family `f_{λ,μ}[X:Y:Z] = [P(X,Z) + λYZ^{d-1} : Q(Y,Z) + μXZ^{d-1} : Z^d]`
//! on P² over Q.

mod counterexample;
mod iter;
mod ratios;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::nt::prime_divisors;
use crate::algebra::Rat;
use crate::error::{Error, Result};
use crate::heights::{HeightResult, Place};
use crate::homog::{Form, HomogMap, LocalBounds};
use crate::maps::{orbit_search, OrbitResult};
use crate::proj::ProjPointP2;

pub use counterexample::{p2_counterexample_check, CounterexampleReport, CycPoly};
pub use iter::{p2_iterate_symbolic, p2_theta_check, P2IterPair, ThetaReport, ThetaRow};
pub use ratios::{fitted_constants, p2_ratio_report, FittedConstants, P2RatioReport, RegionStats};

/// `P(X,Z)` and `Q(Y,Z)` stored by their affine coefficients: `p[k]` multiplies
/// `X^k Z^{d-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct P2Family {
    p: Vec<Rat>,
    q: Vec<Rat>,
    d: usize,
}

impl P2Family {
    pub fn new(p: Vec<Rat>, q: Vec<Rat>) -> Result<Self> {
        let trim = |mut v: Vec<Rat>| {
            while v.last().is_some_and(Rat::is_zero) {
                v.pop();
            }
            v
        };
        let (p, q) = (trim(p), trim(q));
        if p.len() != q.len() {
            return Err(Error::invalid(format!(
                "P(X,0) and Q(Y,0) must be nonzero of the same degree (got {} and {})",
                p.len() as i64 - 1,
                q.len() as i64 - 1
            )));
        }
        let d = p.len().saturating_sub(1);
        if d < 3 {
            return Err(Error::invalid(format!("degree {d} is below 3")));
        }
        Ok(P2Family { p, q, d })
    }

    pub fn from_ints(p: &[i64], q: &[i64]) -> Result<Self> {
        let r = |v: &[i64]| v.iter().map(|&c| Rat::from_int(c)).collect();
        Self::new(r(p), r(q))
    }

    /// `P = X³ - XZ²`, `Q = Y³`.
    pub fn remark() -> Self {
        Self::from_ints(&[0, -1, 0, 1], &[0, 0, 0, 1]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> &[Rat] {
        &self.p
    }

    pub fn q(&self) -> &[Rat] {
        &self.q
    }

    pub fn c_p(&self) -> &Rat {
        &self.p[self.d]
    }

    pub fn c_q(&self) -> &Rat {
        &self.q[self.d]
    }

    /// Affine `P(x) = P(x, 1)`.
    pub fn eval_p(&self, x: &Rat) -> Rat {
        horner(&self.p, x)
    }

    pub fn eval_q(&self, y: &Rat) -> Rat {
        horner(&self.q, y)
    }

    pub fn specialize(&self, lambda: &Rat, mu: &Rat) -> P2Map {
        P2Map::new(self.clone(), lambda.clone(), mu.clone())
    }
}

fn horner(c: &[Rat], x: &Rat) -> Rat {
    c.iter().rev().fold(Rat::zero(), |acc, a| &(&acc * x) + a)
}

#[derive(Serialize, Deserialize)]
struct P2Repr {
    #[serde(rename = "P")]
    p: Vec<Rat>,
    #[serde(rename = "Q")]
    q: Vec<Rat>,
}

impl Serialize for P2Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        P2Repr { p: self.p.clone(), q: self.q.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for P2Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = P2Repr::deserialize(d)?;
        P2Family::new(r.p, r.q).map_err(serde::de::Error::custom)
    }
}

/// The member `f_{λ,μ}` as a homogeneous map with its height bounds.
#[derive(Clone, Debug)]
pub struct P2Map {
    fam: P2Family,
    lambda: Rat,
    mu: Rat,
    homog: HomogMap,
    bounds: LocalBounds,
}

impl P2Map {
    fn new(fam: P2Family, lambda: Rat, mu: Rat) -> Self {
        let d = fam.d as u32;
        let mut f0 = vec![];
        let mut f1 = vec![];
        for k in 0..=fam.d {
            let e = d - k as u32;
            if !fam.p[k].is_zero() {
                f0.push((vec![k as u32, 0, e], fam.p[k].clone()));
            }
            if !fam.q[k].is_zero() {
                f1.push((vec![0, k as u32, e], fam.q[k].clone()));
            }
        }
        if !lambda.is_zero() {
            f0.push((vec![0, 1, d - 1], lambda.clone()));
        }
        if !mu.is_zero() {
            f1.push((vec![1, 0, d - 1], mu.clone()));
        }
        let f2 = vec![(vec![0, 0, d], Rat::one())];
        let homog = HomogMap::new(d, vec![Form { terms: f0 }, Form { terms: f1 }, Form { terms: f2 }])
            .expect("forms are homogeneous of degree d");
        let bounds = p2_bounds(&fam, &lambda, &mu, homog.scale());
        P2Map { fam, lambda, mu, homog, bounds }
    }

    pub fn family(&self) -> &P2Family {
        &self.fam
    }

    pub fn lambda(&self) -> &Rat {
        &self.lambda
    }

    pub fn mu(&self) -> &Rat {
        &self.mu
    }

    pub fn homog(&self) -> &HomogMap {
        &self.homog
    }

    pub fn local_bounds(&self) -> &LocalBounds {
        &self.bounds
    }

    /// Primes where the integral model may have bad reduction.
    pub fn bad_places(&self) -> Vec<u64> {
        self.bounds.padic.keys().copied().collect()
    }

    pub fn height_interval(&self) -> (f64, f64) {
        self.bounds.global_interval(self.homog.scale())
    }

    pub fn preperiodic_height_bound(&self) -> f64 {
        self.bounds.c0(self.homog.scale()) / (self.fam.d as f64 - 1.0) * (1.0 + 1e-12) + 1e-12
    }

    pub fn step(&self, pt: &ProjPointP2) -> Result<ProjPointP2> {
        let img = self.homog.eval_int(pt.ints());
        if img.iter().all(BigInt::is_zero) {
            return Err(Error::invariant(format!("{pt} maps to [0:0:0]")));
        }
        ProjPointP2::from_ints(img)
    }

    pub fn orbit_detect(&self, pt: &ProjPointP2) -> OrbitResult<ProjPointP2> {
        let bound = self.preperiodic_height_bound();
        orbit_search(
            pt.clone(),
            bound,
            |q| self.step(q).expect("f_{λ,μ} is a morphism"),
            ProjPointP2::weil_height,
        )
    }

    /// `ĥ` as the sum of escape rates at infinity and the possibly bad primes; good
    /// primes contribute zero on primitive integral coordinates.
    pub fn canonical_height(&self, pt: &ProjPointP2, tol: f64) -> Result<HeightResult> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        let z = pt.coords();
        let share = tol / (1 + self.bounds.padic.len()) as f64;
        let (v, r) = self.homog.arch_escape(&z, self.bounds.arch_lower, self.bounds.arch_upper, share)?;
        let mut parts = vec![(Place::Arch, v, r)];
        for (&p, &e) in &self.bounds.padic {
            let (v, r) = self.homog.padic_escape(&z, p, e, share)?;
            parts.push((Place::Prime(p), v, r));
        }
        Ok(HeightResult::from_parts(parts, true))
    }
}

/// Bounds from the identities `c_P^d X^{d²} = F_0 S + (-1)^d H_0^d F_2` (with
/// `F_0 = c_P X^d + Z H_0`), the analogue for `Y`, and `Z^{d²} = F_2^d`.
fn p2_bounds(fam: &P2Family, lambda: &Rat, mu: &Rat, scale: &Rat) -> LocalBounds {
    let d = fam.d;
    let l1 = |c: &[Rat], extra: &Rat| c.iter().map(|x| x.abs().to_f64()).sum::<f64>() + extra.abs().to_f64();
    let k_of = |c: &[Rat], extra: &Rat| {
        let a = l1(c, extra);
        let top = c[d].abs().to_f64();
        let h = (a - top).max(0.0);
        let mut s = 0.0;
        for j in 1..=d {
            s += binom(d, j) * a.powi(j as i32 - 1) * h.powi((d - j) as i32);
        }
        (s + h.powi(d as i32)) / top.powi(d as i32)
    };
    let k = k_of(&fam.p, lambda).max(k_of(&fam.q, mu)).max(1.0);
    let arch_lower = -(k * (1.0 + 1e-10)).ln();
    let arch_upper = {
        let m = l1(&fam.p, lambda).max(l1(&fam.q, mu)).max(1.0);
        (m * (1.0 + 1e-12)).ln()
    };
    let mut primes = std::collections::BTreeSet::new();
    for r in [scale, fam.c_p(), fam.c_q()] {
        for n in [r.numer(), r.denom()] {
            // factoring failures only affect astronomically large coefficients
            primes.extend(prime_divisors(n).expect("coefficient factorization"));
        }
    }
    let mut padic = BTreeMap::new();
    for p in primes {
        let m = -scale.valuation(p).unwrap();
        let vp = fam.c_p().valuation(p).unwrap();
        let vq = fam.c_q().valuation(p).unwrap();
        let dd = d as i64;
        let e = [dd * vp - dd * m - m.min(0), dd * vq - dd * m - m.min(0), -m, 0]
            .into_iter()
            .max()
            .unwrap();
        padic.insert(p, e as u64);
    }
    LocalBounds { arch_lower, arch_upper, padic }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The exact image `f_{λ,μ}(pt)`.
pub fn p2_step(fam: &P2Family, pt: &ProjPointP2, lambda: &Rat, mu: &Rat) -> Result<ProjPointP2> {
    fam.specialize(lambda, mu).step(pt)
}

pub fn p2_orbit_detect(fam: &P2Family, lambda: &Rat, mu: &Rat, pt: &ProjPointP2) -> OrbitResult<ProjPointP2> {
    fam.specialize(lambda, mu).orbit_detect(pt)
}

/// `ĥ_{f_{λ,μ}}([a:b:1])`.
pub fn p2_canonical_height(
    fam: &P2Family,
    lambda: &Rat,
    mu: &Rat,
    a: &Rat,
    b: &Rat,
    tol: f64,
) -> Result<HeightResult> {
    let pt = ProjPointP2::new(a.clone(), b.clone(), Rat::one())?;
    fam.specialize(lambda, mu).canonical_height(&pt, tol)
}
