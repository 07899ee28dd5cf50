//! Algebraic numbers given by a defining polynomial and an isolating disk, and
//! Mahler-measure heights.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::roots::{isolate_roots, rational_roots};
use super::{nt, ComplexApprox, Rat, UniPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgNum {
    pub defining_poly: UniPoly,
    pub isolating_disk: ComplexApprox,
    pub claimed_irreducible: bool,
}

fn disk_contains_disk(outer: &ComplexApprox, inner: &ComplexApprox) -> bool {
    (outer.center() - inner.center()).norm() + inner.error_radius <= outer.error_radius
}

impl AlgNum {
    /// Validates that `disk` isolates exactly one root of the squarefree `poly`.
    pub fn new(poly: &UniPoly, disk: ComplexApprox, claimed_irreducible: bool) -> Result<Self> {
        let poly = normalize_defining(poly)?;
        let roots = isolate_roots(&poly)?;
        let inside = roots.iter().filter(|r| disk_contains_disk(&disk, r)).count();
        let touching = roots.iter().filter(|r| !r.disjoint(&disk)).count();
        if inside != 1 || touching != 1 {
            return Err(Error::invalid(format!(
                "disk {disk:?} does not isolate a single root of {poly}"
            )));
        }
        Ok(AlgNum { defining_poly: poly, isolating_disk: disk, claimed_irreducible })
    }

    pub fn from_rat(r: &Rat) -> Self {
        let poly = UniPoly::new(vec![-r.clone(), Rat::one()]).primitive_part();
        AlgNum {
            defining_poly: poly,
            isolating_disk: ComplexApprox::from_rat(r),
            claimed_irreducible: true,
        }
    }

    /// One entry per complex root of `poly`.
    pub fn roots_of(poly: &UniPoly, claimed_irreducible: bool) -> Result<Vec<AlgNum>> {
        let poly = normalize_defining(poly)?;
        let roots = isolate_roots(&poly)?;
        Ok(roots
            .into_iter()
            .map(|disk| AlgNum { defining_poly: poly.clone(), isolating_disk: disk, claimed_irreducible })
            .collect())
    }

    pub fn degree(&self) -> usize {
        self.defining_poly.deg0()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        (self.degree() == 1)
            .then(|| -(&self.defining_poly.coeff(0) / &self.defining_poly.coeff(1)))
    }

    pub fn approx(&self) -> Complex64 {
        self.isolating_disk.center()
    }

    /// Weil height of the root set of the defining polynomial.
    pub fn weil_height(&self) -> Result<(f64, f64)> {
        mahler_height(&self.defining_poly)
    }
}

fn normalize_defining(poly: &UniPoly) -> Result<UniPoly> {
    if poly.degree().unwrap_or(0) == 0 {
        return Err(Error::invalid("defining polynomial must have degree >= 1"));
    }
    if !poly.is_squarefree() {
        return Err(Error::precondition("defining polynomial is not squarefree"));
    }
    Ok(poly.primitive_part())
}

/// `(1/deg)(ln|lead| + Σ ln⁺|root|)` for a primitive squarefree integer polynomial,
/// with an error radius.
pub fn mahler_height(p: &UniPoly) -> Result<(f64, f64)> {
    let n = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::precondition("Mahler height needs degree >= 1"))?;
    if !p.has_integer_coeffs() || p.primitive_part() != p.clone() && p.primitive_part() != -p {
        return Err(Error::precondition("Mahler height needs a primitive integer polynomial"));
    }
    if !p.is_squarefree() {
        return Err(Error::precondition("Mahler height needs a squarefree polynomial"));
    }
    if n == 1 {
        let (a, b) = (p.coeff(0).abs(), p.coeff(1).abs());
        let v = if a > b { a.ln_abs() } else { b.ln_abs() };
        return Ok((v, v * 4.0 * f64::EPSILON));
    }
    let roots = isolate_roots(p)?;
    let mut sum = p.lead().ln_abs();
    let mut radius = sum.abs() * 2.0 * f64::EPSILON;
    for r in &roots {
        // ln⁺|·| is 1-Lipschitz on C
        sum += r.center().norm().ln().max(0.0);
        radius += r.error_radius + 2.0 * f64::EPSILON * r.center().norm().ln().abs();
    }
    Ok((sum / n as f64, radius / n as f64 * (1.0 + 1e-12)))
}

/// Height of the root multiset of any polynomial of degree >= 1, with multiplicity.
pub fn root_multiset_height(p: &UniPoly) -> Result<(f64, f64)> {
    let n = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::precondition("height of a constant polynomial"))?;
    let mut value = 0.0;
    let mut radius = 0.0;
    for (f, k) in p.squarefree_decomposition() {
        let df = f.deg0();
        if df == 0 {
            continue;
        }
        let (h, r) = mahler_height(&f.primitive_part())?;
        let w = (k * df) as f64 / n as f64;
        value += w * h;
        radius += w * r;
    }
    Ok((value, radius))
}

/// Exact removal of linear and quadratic factors from a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct FactorSplit {
    pub rational: Vec<Rat>,
    pub quadratics: Vec<UniPoly>,
    pub cofactor: UniPoly,
    /// True when the quadratic search was conclusive for every root pair.
    pub complete: bool,
}

impl FactorSplit {
    /// The cofactor is provably irreducible (or constant).
    pub fn cofactor_irreducible(&self) -> bool {
        let d = self.cofactor.deg0();
        d <= 3 || (self.complete && d <= 5)
    }
}

const DIVISOR_LIMIT: usize = 64;

pub fn split_factors(p: &UniPoly) -> Result<FactorSplit> {
    if p.is_zero() {
        return Err(Error::invalid("factor split of zero"));
    }
    let rational = rational_roots(p)?;
    let mut cof = p.primitive_part();
    for r in &rational {
        cof = cof.exact_div(&UniPoly::new(vec![-r.clone(), Rat::one()])).ok_or_else(|| {
            Error::invariant("rational root does not divide")
        })?;
    }
    cof = cof.primitive_part();
    let mut quadratics = Vec::new();
    let mut complete = true;
    if cof.deg0() == 2 {
        quadratics.push(cof.clone());
        cof = UniPoly::one();
    } else if cof.deg0() >= 4 {
        let lead = cof.lead().numer().abs();
        let divs: Vec<u64> = match lead.to_u64() {
            Some(l) => nt::divisors(l),
            None => Vec::new(),
        };
        if divs.is_empty() || divs.len() > DIVISOR_LIMIT {
            complete = false;
        }
        let roots = isolate_roots(&cof)?;
        let mut used = vec![false; roots.len()];
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if used[i] || used[j] || cof.deg0() < 4 {
                    continue;
                }
                let (zi, zj) = (roots[i].center(), roots[j].center());
                let (ri, rj) = (roots[i].error_radius, roots[j].error_radius);
                let s = zi + zj;
                let pr = zi * zj;
                let es = (ri + rj) * (1.0 + 1e-9);
                let ep = (zi.norm() * rj + zj.norm() * ri + ri * rj) * (1.0 + 1e-9);
                if s.im.abs() > es || pr.im.abs() > ep {
                    continue;
                }
                for &a in &divs {
                    let af = a as f64;
                    let (bs, cs) = (-af * s.re, af * pr.re);
                    let conclusive = af * es < 0.5 && af * ep < 0.5 && bs.abs() < 2f64.powi(52) && cs.abs() < 2f64.powi(52);
                    if !conclusive {
                        complete = false;
                    }
                    if (bs - bs.round()).abs() > af * es + 1e-6 || (cs - cs.round()).abs() > af * ep + 1e-6 {
                        continue;
                    }
                    let q = UniPoly::from_bigints(&[
                        BigInt::from(cs.round() as i64),
                        BigInt::from(bs.round() as i64),
                        BigInt::from(a),
                    ]);
                    if let Some(rest) = cof.exact_div(&q) {
                        quadratics.push(q);
                        cof = rest.primitive_part();
                        used[i] = true;
                        used[j] = true;
                        break;
                    }
                }
            }
        }
        if cof.deg0() == 2 {
            quadratics.push(cof.clone());
            cof = UniPoly::one();
        }
    }
    Ok(FactorSplit { rational, quadratics, cofactor: cof, complete })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn mahler_examples() {
        let (h, r) = mahler_height(&p(&[-2, 0, 1])).unwrap();
        assert!((h - 0.5 * 2f64.ln()).abs() <= 1e-12 + r);
        let (h, _) = mahler_height(&p(&[-3, 1])).unwrap();
        assert!((h - 3f64.ln()).abs() < 1e-14);
        assert_eq!(mahler_height(&p(&[0, 1])).unwrap().0, 0.0);
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln() / 2.0;
        assert!((mahler_height(&p(&[-1, -1, 1])).unwrap().0 - golden).abs() < 1e-12);
        assert!(mahler_height(&p(&[-2, 0, 2])).is_err());
    }

    #[test]
    fn multiset_counts_multiplicity() {
        // (x - 2)^2 (x^2 - 2): heights ln 2 twice and (1/2) ln 2 twice
        let f = &p(&[-2, 1]).pow(2) * &p(&[-2, 0, 1]);
        let (h, _) = root_multiset_height(&f).unwrap();
        assert!((h - 0.75 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn isolating_disks() {
        let f = p(&[-2, 0, 1]);
        let a = AlgNum::new(&f, ComplexApprox::new(1.4, 0.0, 0.1), true).unwrap();
        assert_eq!(a.degree(), 2);
        assert!(AlgNum::new(&f, ComplexApprox::new(0.0, 0.0, 2.0), true).is_err());
        let r = AlgNum::from_rat(&Rat::frac(-3, 4));
        assert_eq!(r.defining_poly, p(&[3, 4]));
        assert_eq!(r.as_rat(), Some(Rat::frac(-3, 4)));
        assert_eq!(AlgNum::roots_of(&p(&[1, 0, 1]), true).unwrap().len(), 2);
    }

    #[test]
    fn quadratic_splitting() {
        // (x^2 + 1)(2x^2 - 3)(x - 5)(x^3 - 2)
        let f = &(&(&p(&[1, 0, 1]) * &p(&[-3, 0, 2])) * &p(&[-5, 1])) * &p(&[-2, 0, 0, 1]);
        let s = split_factors(&f).unwrap();
        assert_eq!(s.rational, vec![Rat::from_int(5)]);
        assert_eq!(s.quadratics.len(), 2);
        assert_eq!(s.cofactor, p(&[-2, 0, 0, 1]));
        assert!(s.complete && s.cofactor_irreducible());
        // x^4 - 10x^2 + 1 is irreducible but has no rational or quadratic factor
        let s = split_factors(&p(&[1, 0, -10, 0, 1])).unwrap();
        assert!(s.quadratics.is_empty() && s.cofactor_irreducible());
    }
}
