//! Rational maps on P¹ over Q: homogeneous iteration, bad places and exact
//! preperiodicity decisions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::nt::prime_divisors;
use crate::algebra::{bezout_certificates, poly_resultant, BezoutCertificate, BinaryForm, Rat, UniPoly};
use crate::error::{Error, Result};
use crate::homog::{Form, HomogMap, LocalBounds};
use crate::proj::ProjPointP1;

/// `x ↦ P(x)/Q(x)` with rational coefficients, `d = max(deg P, deg Q) >= 2` and no
/// common root (including at infinity).
#[derive(Clone, Debug)]
pub struct RationalMap {
    p: UniPoly,
    q: UniPoly,
    d: usize,
    homog: HomogMap,
    cert: BezoutCertificate<Rat>,
    bounds: LocalBounds,
    bad: BTreeSet<u64>,
}

pub(crate) fn form_l1(f: &BinaryForm<Rat>) -> f64 {
    f.coeffs.iter().map(|c| c.abs().to_f64()).sum()
}

/// `-ln max(||S||_1 + ||T||_1, ||U||_1 + ||V||_1)`.
pub(crate) fn cert_arch_lower(c: &BezoutCertificate<Rat>) -> f64 {
    let a = form_l1(&c.s) + form_l1(&c.t_coef);
    let b = form_l1(&c.u) + form_l1(&c.v);
    -(a.max(b) * (1.0 + 1e-12)).ln()
}

impl RationalMap {
    pub fn new(p: UniPoly, q: UniPoly) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::invalid("denominator is zero"));
        }
        let d = p.deg0().max(q.deg0());
        if p.is_zero() || d < 2 {
            return Err(Error::invalid(format!("map degree {d} is below 2")));
        }
        let hp = BinaryForm::homogenize(&p, d);
        let hq = BinaryForm::homogenize(&q, d);
        let cert = bezout_certificates(&hp, &hq, d)
            .map_err(|_| Error::invalid("P and Q share a root; not a morphism"))?;
        let to_form = |f: &BinaryForm<Rat>| Form {
            terms: f
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (vec![i as u32, (d - i) as u32], c.clone()))
                .collect(),
        };
        let homog = HomogMap::new(d as u32, vec![to_form(&hp), to_form(&hq)])?;
        let bad = compute_bad_places(&p, &q)?;
        let scale = homog.scale().clone();
        let mut padic = BTreeMap::new();
        for &pr in &bad {
            // certificate for cF is the certificate for F divided by c
            let e = cert
                .forms()
                .iter()
                .flat_map(|f| f.coeffs.iter())
                .filter(|c| !c.is_zero())
                .map(|c| -(c / &scale).valuation(pr).unwrap())
                .max()
                .unwrap_or(0)
                .max(0) as u64;
            padic.insert(pr, e);
        }
        let bounds = LocalBounds {
            arch_lower: cert_arch_lower(&cert),
            arch_upper: homog.log_l1_upper() + 1e-15,
            padic,
        };
        Ok(RationalMap { p, q, d, homog, cert, bounds, bad })
    }

    pub fn polynomial(p: UniPoly) -> Result<Self> {
        Self::new(p, UniPoly::one())
    }

    pub fn from_ints(p: &[i64], q: &[i64]) -> Result<Self> {
        Self::new(UniPoly::from_ints(p), UniPoly::from_ints(q))
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.p
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn homog(&self) -> &HomogMap {
        &self.homog
    }

    pub fn certificate(&self) -> &BezoutCertificate<Rat> {
        &self.cert
    }

    pub fn local_bounds(&self) -> &LocalBounds {
        &self.bounds
    }

    /// `[lo, up]` with `lo <= h(f(x)) - d h(x) <= up` for all `x ∈ P¹(Q)`.
    pub fn height_interval(&self) -> (f64, f64) {
        self.bounds.global_interval(self.homog.scale())
    }

    pub fn c0(&self) -> f64 {
        self.bounds.c0(self.homog.scale())
    }

    /// Height bound satisfied by every point of a preperiodic orbit.
    pub fn preperiodic_height_bound(&self) -> f64 {
        self.c0() / (self.d as f64 - 1.0) * (1.0 + 1e-12) + 1e-12
    }

    /// `f(x)` for affine `x`, `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let den = self.q.eval(x);
        den.recip().map(|inv| &self.p.eval(x) * &inv)
    }

    pub fn bad_places(&self) -> &BTreeSet<u64> {
        &self.bad
    }

    pub fn homogeneous_step(&self, pt: &ProjPointP1) -> ProjPointP1 {
        let img = self.homog.eval_int(&[pt.x().clone(), pt.y().clone()]);
        let [x, y]: [BigInt; 2] = img.try_into().unwrap();
        ProjPointP1::from_ints(x, y).expect("a morphism never maps to [0:0]")
    }

    pub fn orbit_detect(&self, pt: &ProjPointP1) -> OrbitResult<ProjPointP1> {
        let bound = self.preperiodic_height_bound();
        orbit_search(pt.clone(), bound, |q| self.homogeneous_step(q), ProjPointP1::weil_height)
    }
}

/// Primes dividing `Res(P~, Q~)`, the leading coefficients of `P~, Q~` or the common
/// denominator `D`, where `P~ = D P`, `Q~ = D Q` are integral.
fn compute_bad_places(p: &UniPoly, q: &UniPoly) -> Result<BTreeSet<u64>> {
    let den = p
        .coeffs()
        .iter()
        .chain(q.coeffs())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let dr = Rat::from(den.clone());
    let (pi, qi) = (p.scale(&dr), q.scale(&dr));
    let mut out = prime_divisors(&den)?;
    out.extend(prime_divisors(pi.lead().numer())?);
    out.extend(prime_divisors(qi.lead().numer())?);
    let res = poly_resultant(&pi, &qi)?;
    if res.is_zero() {
        return Err(Error::invalid("P and Q share a root; not a morphism"));
    }
    out.extend(prime_divisors(res.numer())?);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OrbitKind {
    Preperiodic { preperiod: usize, period: usize },
    Wandering { witness_index: usize, height_bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult<P> {
    pub kind: OrbitKind,
    pub orbit_prefix: Vec<P>,
}

impl<P> OrbitResult<P> {
    pub fn is_preperiodic(&self) -> bool {
        matches!(self.kind, OrbitKind::Preperiodic { .. })
    }
}

/// Height-box search: exits the box (wandering) or revisits a point (preperiodic).
pub(crate) fn orbit_search<P: Clone + Eq + std::hash::Hash>(
    start: P,
    bound: f64,
    step: impl Fn(&P) -> P,
    height: impl Fn(&P) -> f64,
) -> OrbitResult<P> {
    let mut seen: HashMap<P, usize> = HashMap::new();
    let mut prefix = Vec::new();
    let mut cur = start;
    loop {
        let i = prefix.len();
        if let Some(&j) = seen.get(&cur) {
            return OrbitResult {
                kind: OrbitKind::Preperiodic { preperiod: j, period: i - j },
                orbit_prefix: prefix,
            };
        }
        if height(&cur) > bound {
            prefix.push(cur);
            return OrbitResult {
                kind: OrbitKind::Wandering { witness_index: i, height_bound: bound },
                orbit_prefix: prefix,
            };
        }
        seen.insert(cur.clone(), i);
        let next = step(&cur);
        prefix.push(cur);
        cur = next;
    }
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    #[serde(rename = "P")]
    p: UniPoly,
    #[serde(rename = "Q", default = "UniPoly::one")]
    q: UniPoly,
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr { p: self.p.clone(), q: self.q.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapRepr::deserialize(d)?;
        RationalMap::new(r.p, r.q).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: i64) -> ProjPointP1 {
        ProjPointP1::affine(&Rat::from_int(n))
    }

    #[test]
    fn steps() {
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        assert_eq!(sq.homogeneous_step(&pt(2)), pt(4));
        let f = RationalMap::from_ints(&[1, 0, 1], &[1]).unwrap();
        assert_eq!(f.homogeneous_step(&ProjPointP1::infinity()), ProjPointP1::infinity());
        let g = RationalMap::from_ints(&[1, 0, 1], &[0, 1]).unwrap();
        assert_eq!(g.homogeneous_step(&pt(0)), ProjPointP1::infinity());
    }

    #[test]
    fn bad_place_examples() {
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        assert!(sq.bad_places().is_empty());
        let f = RationalMap::new(
            UniPoly::new(vec![Rat::frac(1, 3), Rat::zero(), Rat::one()]),
            UniPoly::one(),
        )
        .unwrap();
        assert_eq!(f.bad_places().iter().copied().collect::<Vec<_>>(), vec![3]);
        let g = RationalMap::from_ints(&[0, 0, 1], &[-1, 2]).unwrap();
        assert_eq!(g.bad_places().iter().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn rejects_non_morphisms() {
        assert!(RationalMap::from_ints(&[-1, 0, 1], &[-1, 1]).is_err());
        assert!(RationalMap::from_ints(&[0, 1], &[1]).is_err());
    }

    #[test]
    fn orbit_examples() {
        let f = RationalMap::from_ints(&[-1, 0, 1], &[1]).unwrap();
        let r = f.orbit_detect(&pt(0));
        assert_eq!(r.kind, OrbitKind::Preperiodic { preperiod: 0, period: 2 });
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        assert!(!sq.orbit_detect(&pt(2)).is_preperiodic());
        let g = RationalMap::from_ints(&[-2, 0, 1], &[1]).unwrap();
        assert_eq!(g.orbit_detect(&pt(2)).kind, OrbitKind::Preperiodic { preperiod: 0, period: 1 });
        assert_eq!(g.orbit_detect(&pt(0)).kind, OrbitKind::Preperiodic { preperiod: 2, period: 1 });
    }

    #[test]
    fn height_interval_holds_on_samples() {
        let f = RationalMap::new(
            UniPoly::new(vec![Rat::frac(-3, 2), Rat::from_int(1), Rat::from_int(2)]),
            UniPoly::new(vec![Rat::from_int(5), Rat::frac(7, 3)]),
        )
        .unwrap();
        let (lo, up) = f.height_interval();
        for a in -6..=6i64 {
            for b in 1..=6i64 {
                let x = ProjPointP1::affine(&Rat::frac(a, b));
                let diff = f.homogeneous_step(&x).weil_height() - 2.0 * x.weil_height();
                assert!(lo <= diff && diff <= up, "{x}: {lo} <= {diff} <= {up}");
            }
        }
    }
}
