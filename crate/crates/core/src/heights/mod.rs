//! Weil and canonical heights with per-place breakdowns.

mod alg;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::nt::prime_divisors;
use crate::algebra::{AlgNum, Rat, UniPoly};
use crate::error::{Error, Result};
use crate::maps::RationalMap;
use crate::proj::ProjPointP1;

pub(crate) use alg::{alg_orbit_height, AlgOrbit, DEFAULT_BIT_CAP};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A place of Q. `Finite` aggregates all nonarchimedean places when they are not
/// separated (algebraic inputs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Arch,
    Prime(u64),
    Finite,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Arch => write!(f, "arch"),
            Place::Prime(p) => write!(f, "{p}"),
            Place::Finite => write!(f, "finite"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "arch" | "inf" | "infinity" => Ok(Place::Arch),
            "finite" => Ok(Place::Finite),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::invalid(format!("bad place {t:?}")))?;
                if !num_prime::nt_funcs::is_prime64(p) {
                    return Err(Error::invalid(format!("{p} is not prime")));
                }
                Ok(Place::Prime(p))
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Prime(p) => s.serialize_u64(*p),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(p) => format!("{p}").parse(),
            Raw::S(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightResult {
    pub value: f64,
    pub error_radius: f64,
    pub breakdown: Vec<(Place, f64)>,
    /// False when the radius is a heuristic tail estimate.
    pub certified: bool,
}

impl HeightResult {
    pub(crate) fn from_parts(parts: Vec<(Place, f64, f64)>, certified: bool) -> Self {
        let value: f64 = parts.iter().map(|p| p.1).sum();
        let radius: f64 = parts.iter().map(|p| p.2).sum::<f64>()
            + value.abs() * parts.len() as f64 * f64::EPSILON;
        HeightResult {
            value,
            error_radius: radius,
            breakdown: parts.into_iter().map(|(pl, v, _)| (pl, v)).collect(),
            certified,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.value - self.error_radius, self.value + self.error_radius)
    }

    /// Whether zero lies in the enclosure.
    pub fn is_zero_within_radius(&self) -> bool {
        self.value.abs() <= self.error_radius
    }
}

/// `ln max(|num|, den)`.
pub fn weil_height(x: &Rat) -> f64 {
    ProjPointP1::affine(x).weil_height()
}

fn local_value(
    map: &RationalMap,
    z: &[Rat; 2],
    place: Place,
    tol: f64,
) -> Result<(f64, f64)> {
    let bounds = map.local_bounds();
    match place {
        Place::Arch => map.homog().arch_escape(z, bounds.arch_lower, bounds.arch_upper, tol),
        Place::Prime(p) => match bounds.padic.get(&p) {
            Some(&e) => map.homog().padic_escape(z, p, e, tol),
            None => {
                // good reduction: G_p(z) = ln ||z||_p
                let v = z.iter().filter_map(|c| c.valuation(p)).min().unwrap();
                let val = -(v as f64) * (p as f64).ln();
                Ok((val, val.abs() * 2.0 * f64::EPSILON))
            }
        },
        Place::Finite => Err(Error::invalid("local height needs a specific place")),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tol must be positive"))
    }
}

/// Local canonical height `lim log⁺|f^n(x)|_v / d^n` as `(value, radius)`.
pub fn local_canonical_height(map: &RationalMap, x: &Rat, place: Place, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    local_value(map, &[x.clone(), Rat::one()], place, tol)
}

pub fn canonical_height(map: &RationalMap, x: &Rat, tol: f64) -> Result<HeightResult> {
    check_tol(tol)?;
    let z = [x.clone(), Rat::one()];
    let bad = map.bad_places();
    let share = tol / (1 + bad.len()) as f64;
    let mut parts = vec![];
    let (v, r) = local_value(map, &z, Place::Arch, share)?;
    parts.push((Place::Arch, v, r));
    for &p in bad {
        let (v, r) = local_value(map, &z, Place::Prime(p), share)?;
        parts.push((Place::Prime(p), v, r));
    }
    let den = x.denom().clone();
    match prime_divisors(&den) {
        Ok(primes) => {
            for p in primes.into_iter().filter(|p| !bad.contains(p)) {
                let (v, r) = local_value(map, &z, Place::Prime(p), share)?;
                parts.push((Place::Prime(p), v, r));
            }
        }
        Err(_) => {
            // unfactored denominator: aggregate the good places
            let mut v = Rat::from(den.clone()).ln_abs();
            for &p in bad {
                v -= x.valuation(p).unwrap().min(0).unsigned_abs() as f64 * (p as f64).ln();
            }
            parts.push((Place::Finite, v, v.abs() * 8.0 * f64::EPSILON));
        }
    }
    Ok(HeightResult::from_parts(parts, true))
}

/// Canonical height of a projective point; the primitive integral lift makes every
/// good place contribute zero.
pub fn canonical_height_point(map: &RationalMap, pt: &ProjPointP1, tol: f64) -> Result<HeightResult> {
    if let Some(x) = pt.to_affine() {
        return canonical_height(map, &x, tol);
    }
    check_tol(tol)?;
    let z = pt.coords();
    let bad = map.bad_places();
    let share = tol / (1 + bad.len()) as f64;
    let mut parts = vec![];
    let (v, r) = local_value(map, &z, Place::Arch, share)?;
    parts.push((Place::Arch, v, r));
    for &p in bad {
        let (v, r) = local_value(map, &z, Place::Prime(p), share)?;
        parts.push((Place::Prime(p), v, r));
    }
    Ok(HeightResult::from_parts(parts, true))
}

/// Canonical height averaged over the root set of `α`'s defining polynomial.
pub fn canonical_height_alg(map: &RationalMap, alpha: &AlgNum, tol: f64) -> Result<HeightResult> {
    check_tol(tol)?;
    if let Some(r) = alpha.as_rat() {
        return canonical_height(map, &r, tol);
    }
    let d = map.degree();
    let hp = crate::algebra::BinaryForm::homogenize(map.numerator(), d);
    let hq = crate::algebra::BinaryForm::homogenize(map.denominator(), d);
    let consts = |f: &crate::algebra::BinaryForm<Rat>| -> Vec<UniPoly> {
        f.coeffs.iter().map(|c| UniPoly::constant(c.clone())).collect()
    };
    let (pc, qc) = (consts(&hp), consts(&hq));
    let b = map.local_bounds();
    let (lo, up) = (b.arch_lower, b.arch_upper);
    let bounds = move |_: Complex64| (lo, up);
    alg_orbit_height(&AlgOrbit {
        m: &alpha.defining_poly,
        p: &pc,
        q: &qc,
        a: &UniPoly::x(),
        b: &UniPoly::one(),
        bounds: &bounds,
        tol,
        bit_cap: DEFAULT_BIT_CAP,
    })
}
