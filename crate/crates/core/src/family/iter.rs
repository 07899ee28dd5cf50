//! Exact symbolic iteration `(A_n, B_n)` of a start point through a family.

use serde::Serialize;

use super::{MapFamily, StartPoint};
use crate::algebra::{Rat, UniPoly};
use crate::error::{Error, Result};

/// Limits on symbolic growth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Caps {
    pub max_degree: usize,
    pub max_bits: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_degree: 5000, max_bits: 1_000_000 }
    }
}

/// Cached levels `(A_n, B_n)`, with `(A_0, B_0) = (a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterPair {
    start: StartPoint,
    levels: Vec<(UniPoly, UniPoly)>,
}

fn homog_apply(cs: &[UniPoly], pa: &[UniPoly], pb: &[UniPoly]) -> UniPoly {
    let d = pa.len() - 1;
    let mut acc = UniPoly::zero();
    for (k, c) in cs.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &(c * &(&pa[k] * &pb[d - k]));
        }
    }
    acc
}

impl IterPair {
    pub fn new(start: &StartPoint) -> Self {
        IterPair { start: start.clone(), levels: vec![(start.a().clone(), start.b().clone())] }
    }

    pub fn start(&self) -> &StartPoint {
        &self.start
    }

    /// Highest cached level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[(UniPoly, UniPoly)] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Option<&(UniPoly, UniPoly)> {
        self.levels.get(n)
    }

    pub fn extend_to(&mut self, fam: &MapFamily, n: usize, caps: Caps) -> Result<()> {
        let d = fam.d();
        let mut q = fam.q().to_vec();
        q.resize(d + 1, UniPoly::zero());
        let coef_deg = fam.p().iter().chain(&q).map(UniPoly::deg0).max().unwrap_or(0);
        while self.depth() < n {
            let (a, b) = self.levels.last().unwrap();
            let predicted = d * a.deg0().max(b.deg0()) + coef_deg;
            if predicted > caps.max_degree {
                return Err(Error::ResourceLimit {
                    what: format!("level {} would reach degree {predicted} > {}", self.depth() + 1, caps.max_degree),
                    partial: None,
                });
            }
            // next level has about d times the terms, each about d times as wide
            let est = (d * d) as u64 * a.bit_size().max(b.bit_size());
            if est > caps.max_bits {
                return Err(Error::ResourceLimit {
                    what: format!("level {} would need about {est} coefficient bits > {}", self.depth() + 1, caps.max_bits),
                    partial: None,
                });
            }
            let mut pa = vec![UniPoly::one()];
            let mut pb = vec![UniPoly::one()];
            for k in 1..=d {
                pa.push(&pa[k - 1] * a);
                pb.push(&pb[k - 1] * b);
            }
            let na = homog_apply(fam.p(), &pa, &pb);
            let nb = homog_apply(&q, &pa, &pb);
            let bits = na.bit_size() + nb.bit_size();
            if bits > caps.max_bits {
                return Err(Error::ResourceLimit {
                    what: format!("level {} has {bits} coefficient bits > {}", self.depth() + 1, caps.max_bits),
                    partial: None,
                });
            }
            if na.is_zero() && nb.is_zero() {
                return Err(Error::invariant("iterate vanished identically"));
            }
            self.levels.push((na, nb));
        }
        Ok(())
    }
}

pub fn iterate_symbolic(fam: &MapFamily, start: &StartPoint, n: usize, caps: Caps) -> Result<IterPair> {
    fam.require_valid()?;
    let mut it = IterPair::new(start);
    it.extend_to(fam, n, caps)?;
    Ok(it)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeLawRow {
    pub n: usize,
    pub deg_a: usize,
    pub expected_deg_a: i64,
    pub deg_b: usize,
    pub expected_deg_b: i64,
    pub lead_a: Rat,
    pub expected_lead_a: Rat,
    pub coprime: bool,
}

impl DegreeLawRow {
    pub fn holds(&self) -> bool {
        self.deg_a as i64 == self.expected_deg_a
            && self.deg_b as i64 == self.expected_deg_b
            && self.lead_a == self.expected_lead_a
            && self.coprime
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeLawReport {
    pub rows: Vec<DegreeLawRow>,
    pub violations: Vec<usize>,
}

impl DegreeLawReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the degree and leading-coefficient laws on every cached level.
/// Requires `d_c > m`.
pub fn check_degree_law(fam: &MapFamily, pair: &IterPair) -> Result<DegreeLawReport> {
    fam.require_valid()?;
    let start = pair.start();
    let m = fam.m();
    if Rat::from_int(start.d_c()) <= m {
        return Err(Error::HypothesisNotMet(format!(
            "deg c = {} is not above m = {m}; normalize the start first",
            start.d_c()
        )));
    }
    let d = fam.d() as i64;
    let s = fam.s();
    let (da, dc) = (start.d_a() as i64, start.d_c());
    let cp0 = fam.c_p(0).coeff(0);
    let ca = start.a().lead();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (n, (a, b)) in pair.levels().iter().enumerate() {
        let dn = d.pow(n as u32);
        let geo = ((dn - 1) / (d - 1)) as u32;
        let row = DegreeLawRow {
            n,
            deg_a: a.deg0(),
            expected_deg_a: da * dn,
            deg_b: b.deg0(),
            expected_deg_b: da * dn - dc * s.pow(n as u32),
            lead_a: a.lead(),
            expected_lead_a: &cp0.pow(geo) * &ca.pow(dn as u32),
            coprime: a.is_coprime(b),
        };
        if !row.holds() {
            violations.push(n);
        }
        rows.push(row);
    }
    Ok(DegreeLawReport { rows, violations })
}

/// Smallest `k <= cap` with `deg f^k(c) > m`, and `(A_k, B_k)` as the new start.
pub fn normalize_start(fam: &MapFamily, start: &StartPoint, cap: usize, caps: Caps) -> Result<(usize, StartPoint)> {
    let m = fam.m();
    let mut it = IterPair::new(start);
    for k in 0..=cap {
        if k > 0 {
            it.extend_to(fam, k, caps)?;
        }
        let (a, b) = it.level(k).unwrap();
        let deg = if a.is_zero() { i64::MIN } else { a.deg0() as i64 - b.deg0() as i64 };
        if deg > 0 && Rat::from_int(deg) > m {
            return Ok((k, StartPoint::new(a.clone(), b.clone())?));
        }
    }
    Err(Error::DegreeStagnation { cap, threshold: m.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn gleason_levels() {
        let fam = MapFamily::unicritical(2);
        let it = iterate_symbolic(&fam, &StartPoint::poly(UniPoly::zero()), 3, Caps::default()).unwrap();
        assert_eq!(it.level(1).unwrap().0, l(&[0, 1]));
        assert_eq!(it.level(2).unwrap().0, l(&[0, 1, 1]));
        assert_eq!(it.level(3).unwrap().0, l(&[0, 1, 1, 2, 1]));
        assert_eq!(it.level(3).unwrap().1, UniPoly::one());
        let it = iterate_symbolic(&fam, &StartPoint::poly(l(&[0, 1])), 1, Caps::default()).unwrap();
        assert_eq!(it.level(1).unwrap().0, l(&[0, 1, 1]));
    }

    #[test]
    fn degree_law_examples() {
        let fam = MapFamily::unicritical(2);
        let it = iterate_symbolic(&fam, &StartPoint::poly(l(&[0, 1])), 5, Caps::default()).unwrap();
        let rep = check_degree_law(&fam, &it).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.rows[3].deg_a, 8);
        let zero = IterPair::new(&StartPoint::poly(UniPoly::zero()));
        assert!(matches!(check_degree_law(&fam, &zero), Err(Error::HypothesisNotMet(_))));
        let cubic = MapFamily::unicritical(3);
        let it = iterate_symbolic(&cubic, &StartPoint::poly(l(&[0, 1])), 3, Caps::default()).unwrap();
        let rep = check_degree_law(&cubic, &it).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.rows[2].deg_a, 9);
    }

    #[test]
    fn rational_family_degree_law() {
        // (2x^3 + λx + λ) / (x + 1): s = 2, Res = -2
        let fam = MapFamily::new(
            vec![l(&[0, 1]), l(&[0, 1]), UniPoly::zero(), l(&[2])],
            vec![l(&[1]), l(&[1])],
        )
        .unwrap();
        assert!(fam.validate().passed(), "{:?}", fam.validate());
        let start = StartPoint::new(l(&[1, 0, 3]), l(&[0, 1])).unwrap();
        let it = iterate_symbolic(&fam, &start, 3, Caps::default()).unwrap();
        let rep = check_degree_law(&fam, &it).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn normalize_examples() {
        let fam = MapFamily::unicritical(2);
        let caps = Caps::default();
        let (k, s) = normalize_start(&fam, &StartPoint::poly(UniPoly::zero()), 8, caps).unwrap();
        assert_eq!((k, s.a().clone()), (1, l(&[0, 1])));
        assert_eq!(normalize_start(&fam, &StartPoint::poly(l(&[0, 1])), 8, caps).unwrap().0, 0);
        let flat = MapFamily::constant(&l(&[0, 0, 1]), &l(&[1])).unwrap();
        assert!(matches!(
            normalize_start(&flat, &StartPoint::poly(UniPoly::zero()), 8, caps),
            Err(Error::DegreeStagnation { .. })
        ));
    }

    #[test]
    fn caps_are_enforced() {
        let fam = MapFamily::unicritical(2);
        let caps = Caps { max_degree: 100, max_bits: 1_000_000 };
        let err = iterate_symbolic(&fam, &StartPoint::poly(l(&[0, 1])), 10, caps).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }
}
