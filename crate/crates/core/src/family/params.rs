//! Parameters where the start point is preperiodic.

use serde::Serialize;

use super::iter::{Caps, IterPair};
use super::{MapFamily, StartPoint};
use crate::algebra::{split_factors, AlgNum, Rat, UniPoly};
use crate::error::{Error, Result};

/// `A_n B_m - A_m B_n`, which vanishes exactly where `f^n(c) = f^m(c)`.
pub fn preperiodic_parameter_poly(pair: &IterPair, m: usize, n: usize) -> Result<UniPoly> {
    if m >= n {
        return Err(Error::invalid(format!("need m < n, got m = {m}, n = {n}")));
    }
    let (an, bn) = pair.level(n).ok_or_else(|| Error::invalid(format!("level {n} not cached")))?;
    let (am, bm) = pair.level(m).unwrap();
    let r = &(an * bm) - &(am * bn);
    if r.is_zero() {
        return Err(Error::invariant(format!(
            "A_{n} B_{m} - A_{m} B_{n} vanishes identically: c is preperiodic over the function field"
        )));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParamValue {
    Rational { value: Rat },
    Algebraic { value: AlgNum },
}

impl ParamValue {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            ParamValue::Rational { value } => Some(value),
            ParamValue::Algebraic { .. } => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ParamValue::Rational { .. } => "rational",
            ParamValue::Algebraic { .. } => "algebraic",
        }
    }

    pub fn repr(&self) -> String {
        match self {
            ParamValue::Rational { value } => value.to_string(),
            ParamValue::Algebraic { value } => {
                let z = value.approx();
                format!("root of {} near {:.12}{:+.12}i", value.defining_poly.display_var("l"), z.re, z.im)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamRoot {
    pub value: ParamValue,
    /// First `(m, n)` whose parameter polynomial produced the root.
    pub m: usize,
    pub n: usize,
    /// Rational roots: the specialized orbit was checked exactly.
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Roots of the parameter polynomials for `m <= max_pre`, `m < n <= m + max_per`,
/// deduplicated by exact division.
pub fn find_preperiodic_params(
    fam: &MapFamily,
    start: &StartPoint,
    max_pre: usize,
    max_per: usize,
    caps: Caps,
) -> Result<Vec<ParamRoot>> {
    fam.require_valid()?;
    if max_per == 0 {
        return Ok(Vec::new());
    }
    let mut pair = IterPair::new(start);
    pair.extend_to(fam, max_pre + max_per, caps)?;
    let mut seen = UniPoly::one();
    let mut out = Vec::new();
    for m in 0..=max_pre {
        for n in m + 1..=m + max_per {
            let r = preperiodic_parameter_poly(&pair, m, n)?;
            if r.is_constant() {
                continue;
            }
            let sf = r.squarefree_part().primitive_part();
            let fresh = sf.exact_div(&sf.gcd(&seen)).expect("gcd divides").primitive_part();
            if fresh.is_constant() {
                continue;
            }
            seen = (&seen * &fresh).primitive_part();
            out.extend(roots_of_fresh(fam, start, &fresh, m, n));
        }
    }
    Ok(out)
}

fn roots_of_fresh(fam: &MapFamily, start: &StartPoint, poly: &UniPoly, m: usize, n: usize) -> Vec<ParamRoot> {
    let split = match split_factors(poly) {
        Ok(s) => s,
        Err(e) => {
            return vec![ParamRoot {
                value: ParamValue::Algebraic {
                    value: AlgNum {
                        defining_poly: poly.clone(),
                        isolating_disk: crate::algebra::ComplexApprox::new(0.0, 0.0, f64::INFINITY),
                        claimed_irreducible: false,
                    },
                },
                m,
                n,
                verified: false,
                error: Some(e.to_string()),
            }]
        }
    };
    let mut out = Vec::new();
    for r in &split.rational {
        let (verified, error) = match fam.specialize(r) {
            Ok(map) => {
                let ok = map.orbit_detect(&start.specialize(r)).is_preperiodic();
                (ok, (!ok).then(|| format!("λ = {r} failed the exact orbit check")))
            }
            Err(e) => (false, Some(e.to_string())),
        };
        out.push(ParamRoot { value: ParamValue::Rational { value: r.clone() }, m, n, verified, error });
    }
    let mut alg = |f: &UniPoly, irreducible: bool| match AlgNum::roots_of(f, irreducible) {
        Ok(rs) => out.extend(rs.into_iter().map(|value| ParamRoot {
            value: ParamValue::Algebraic { value },
            m,
            n,
            verified: false,
            error: None,
        })),
        Err(e) => out.push(ParamRoot {
            value: ParamValue::Algebraic {
                value: AlgNum {
                    defining_poly: f.clone(),
                    isolating_disk: crate::algebra::ComplexApprox::new(0.0, 0.0, f64::INFINITY),
                    claimed_irreducible: irreducible,
                },
            },
            m,
            n,
            verified: false,
            error: Some(e.to_string()),
        }),
    };
    for q in &split.quadratics {
        alg(q, true);
    }
    if !split.cofactor.is_constant() {
        alg(&split.cofactor, split.cofactor_irreducible());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    fn gleason_pair(n: usize) -> IterPair {
        let fam = MapFamily::unicritical(2);
        let mut it = IterPair::new(&StartPoint::poly(UniPoly::zero()));
        it.extend_to(&fam, n, Caps::default()).unwrap();
        it
    }

    #[test]
    fn parameter_poly_examples() {
        let it = gleason_pair(3);
        assert_eq!(preperiodic_parameter_poly(&it, 0, 2).unwrap(), l(&[0, 1, 1]));
        assert_eq!(preperiodic_parameter_poly(&it, 2, 3).unwrap(), l(&[0, 0, 0, 2, 1]));
        assert_eq!(preperiodic_parameter_poly(&it, 0, 1).unwrap(), l(&[0, 1]));
        assert!(preperiodic_parameter_poly(&it, 2, 2).is_err());
    }

    #[test]
    fn gleason_rationals() {
        let fam = MapFamily::unicritical(2);
        let roots = find_preperiodic_params(&fam, &StartPoint::poly(UniPoly::zero()), 2, 2, Caps::default()).unwrap();
        let mut rats: Vec<Rat> = roots.iter().filter_map(|r| r.value.as_rat().cloned()).collect();
        rats.sort();
        assert_eq!(rats, vec![Rat::from_int(-2), Rat::from_int(-1), Rat::zero()]);
        assert!(roots.iter().filter(|r| r.value.as_rat().is_some()).all(|r| r.verified));
        assert!(roots.iter().any(|r| r.value.kind() == "algebraic"));
    }

    #[test]
    fn start_one_contains_minus_one() {
        let fam = MapFamily::unicritical(2);
        let roots = find_preperiodic_params(&fam, &StartPoint::poly(UniPoly::one()), 2, 2, Caps::default()).unwrap();
        assert!(roots.iter().any(|r| r.value.as_rat() == Some(&Rat::from_int(-1)) && r.verified));
    }

    #[test]
    fn constant_family_is_empty() {
        let flat = MapFamily::constant(&l(&[0, 0, 1]), &l(&[1])).unwrap();
        let roots = find_preperiodic_params(&flat, &StartPoint::poly(l(&[2])), 2, 2, Caps::default()).unwrap();
        assert!(roots.is_empty());
    }
}
