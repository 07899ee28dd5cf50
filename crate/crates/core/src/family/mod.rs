//! One-parameter families `f_λ = P_λ / Q_λ` with coefficients in `Q[λ]`.

mod experiment;
mod iter;
mod params;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::bezout::BezoutCertificate;
use crate::algebra::resultant::resultant_over_poly;
use crate::algebra::{bezout_certificates, poly_gcd, BinaryForm, Rat, UniPoly};
use crate::error::{Error, Result};
use crate::homog::ComplexMap;
use crate::maps::RationalMap;
use crate::proj::ProjPointP1;

pub use experiment::{
    correlation_experiment, pcf_experiment, ClassificationStatus, CorrelationReport, ExperimentBounds,
    ParamClassification, PcfReport, PcfRow,
};
pub use iter::{check_degree_law, iterate_symbolic, normalize_start, Caps, DegreeLawReport, DegreeLawRow, IterPair};
pub use params::{find_preperiodic_params, preperiodic_parameter_poly, ParamRoot, ParamValue};

/// `P(x) = Σ p[k] x^k`, `Q(x) = Σ q[k] x^k` with `p[k], q[k] ∈ Q[λ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    p: Vec<UniPoly>,
    q: Vec<UniPoly>,
    cert: Option<BezoutCertificate<UniPoly>>,
}

fn trim(mut v: Vec<UniPoly>) -> Vec<UniPoly> {
    while v.last().is_some_and(UniPoly::is_zero) {
        v.pop();
    }
    v
}

fn deg_ratio_max(cs: &[UniPoly], d: usize) -> Rat {
    // coefficient of x^(d - i) against i
    (1..=d)
        .filter(|&i| !cs[d - i].is_zero())
        .map(|i| Rat::frac(cs[d - i].deg0() as i64, i as i64))
        .max()
        .unwrap_or_else(Rat::zero)
}

impl MapFamily {
    /// Builds the family; hypotheses are checked by [`validate_family`].
    pub fn new(p: Vec<UniPoly>, q: Vec<UniPoly>) -> Result<Self> {
        let (p, q) = (trim(p), trim(q));
        if p.is_empty() || q.is_empty() {
            return Err(Error::invalid("P and Q must be nonzero"));
        }
        let mut fam = MapFamily { p, q, cert: None };
        let d = fam.d();
        if d >= 1 {
            let (hp, hq) = fam.homogeneous_forms();
            fam.cert = bezout_certificates(&hp, &hq, d).ok();
        }
        Ok(fam)
    }

    /// A family whose coefficients do not involve `λ`.
    pub fn constant(p: &UniPoly, q: &UniPoly) -> Result<Self> {
        let lift = |f: &UniPoly| f.coeffs().iter().map(|c| UniPoly::constant(c.clone())).collect();
        Self::new(lift(p), lift(q))
    }

    /// `x^d + λ`.
    pub fn unicritical(d: usize) -> Self {
        let mut p = vec![UniPoly::zero(); d + 1];
        p[0] = UniPoly::x();
        p[d] = UniPoly::one();
        Self::new(p, vec![UniPoly::one()]).unwrap()
    }

    pub fn p(&self) -> &[UniPoly] {
        &self.p
    }

    pub fn q(&self) -> &[UniPoly] {
        &self.q
    }

    pub fn d_p(&self) -> usize {
        self.p.len() - 1
    }

    pub fn d_q(&self) -> usize {
        self.q.len() - 1
    }

    pub fn d(&self) -> usize {
        self.d_p().max(self.d_q())
    }

    /// `s = d_P - d_Q`.
    pub fn s(&self) -> i64 {
        self.d_p() as i64 - self.d_q() as i64
    }

    /// `c_{P,i}`: coefficient of `x^(d_P - i)`.
    pub fn c_p(&self, i: usize) -> &UniPoly {
        &self.p[self.d_p() - i]
    }

    pub fn c_q(&self, j: usize) -> &UniPoly {
        &self.q[self.d_q() - j]
    }

    pub fn m1(&self) -> Rat {
        deg_ratio_max(&self.p, self.d_p())
    }

    pub fn m2(&self) -> Rat {
        deg_ratio_max(&self.q, self.d_q())
    }

    pub fn m(&self) -> Rat {
        &self.m1() + &self.m2()
    }

    /// `(P(X, Y), Q(X, Y))`, both homogenized to degree `d`.
    pub fn homogeneous_forms(&self) -> (BinaryForm<UniPoly>, BinaryForm<UniPoly>) {
        let d = self.d();
        let pad = |v: &[UniPoly]| {
            let mut v = v.to_vec();
            v.resize(d + 1, UniPoly::zero());
            BinaryForm::new(d, v)
        };
        (pad(&self.p), pad(&self.q))
    }

    /// Certificate over `Q[λ]`, present when `Res` is a nonzero constant.
    pub fn certificate(&self) -> Option<&BezoutCertificate<UniPoly>> {
        self.cert.as_ref()
    }

    /// `Res_x(P, Q)` as a polynomial in `λ`.
    pub fn resultant(&self) -> Result<UniPoly> {
        resultant_over_poly(&self.p, &self.q)
    }

    pub fn specialize(&self, lambda: &Rat) -> Result<RationalMap> {
        let ev = |v: &[UniPoly]| UniPoly::new(v.iter().map(|c| c.eval(lambda)).collect());
        RationalMap::new(ev(&self.p), ev(&self.q))
    }

    /// `(lower, upper)` archimedean bounds for `f_z` at a complex parameter.
    pub fn arch_bounds_at(&self, z: Complex64) -> Result<(f64, f64)> {
        let cert = self
            .cert
            .as_ref()
            .ok_or_else(|| Error::precondition("family has no certificate over Q[λ]"))?;
        let l1 = |v: &[UniPoly]| v.iter().map(|c| c.eval_c64(z).norm()).sum::<f64>();
        let upper = l1(&self.p).max(l1(&self.q)).ln();
        let a = l1(&cert.s.coeffs) + l1(&cert.t_coef.coeffs);
        let b = l1(&cert.u.coeffs) + l1(&cert.v.coeffs);
        let slack = 1e-9;
        Ok((-(a.max(b)).ln() - slack, upper + slack))
    }

    /// Archimedean escape rate `G_{f_z}(c(z))` at a complex parameter, as `(value, radius)`.
    pub fn arch_escape_at(&self, start: &StartPoint, z: Complex64, tol: f64) -> Result<(f64, f64)> {
        let d = self.d();
        let (lo, up) = self.arch_bounds_at(z)?;
        let form = |v: &[UniPoly]| -> Vec<(Vec<u32>, Complex64)> {
            v.iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32, (d - i) as u32], c.eval_c64(z)))
                .filter(|(_, c)| c.norm() > 0.0)
                .collect()
        };
        let cmap = ComplexMap::new(d as u32, vec![form(&self.p), form(&self.q)]);
        let w = [start.a.eval_c64(z), start.b.eval_c64(z)];
        let norm = w[0].norm().max(w[1].norm());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("start point vanishes at this parameter"));
        }
        cmap.escape(norm.ln(), w.iter().map(|x| x / norm).collect(), lo, up, tol)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_family(self)
    }

    /// `Err` listing the failed conditions, if any.
    pub fn require_valid(&self) -> Result<()> {
        let r = validate_family(self);
        if r.passed() {
            Ok(())
        } else {
            Err(Error::precondition(format!("family fails hypotheses: {}", r.failures().join("; "))))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub constant_leading_coefficients: Check,
    pub constant_resultant: Check,
    /// `Res_x(P, Q)` as a polynomial in `λ`.
    pub resultant: Option<UniPoly>,
    pub degree_gap: Check,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.constant_leading_coefficients.passed && self.constant_resultant.passed && self.degree_gap.passed
    }

    pub fn failures(&self) -> Vec<String> {
        [
            ("leading coefficients", &self.constant_leading_coefficients),
            ("resultant", &self.constant_resultant),
            ("degree gap", &self.degree_gap),
        ]
        .iter()
        .filter(|(_, c)| !c.passed)
        .map(|(n, c)| format!("{n}: {}", c.detail))
        .collect()
    }
}

pub fn validate_family(fam: &MapFamily) -> ValidationReport {
    let (lp, lq) = (fam.c_p(0), fam.c_q(0));
    let lead_ok = lp.is_constant() && lq.is_constant();
    let constant_leading_coefficients = Check {
        passed: lead_ok,
        detail: format!("c_P0 = {}, c_Q0 = {}", lp.display_var("l"), lq.display_var("l")),
    };
    let res = fam.resultant().ok();
    let constant_resultant = match &res {
        Some(r) if r.is_constant() && !r.is_zero() => Check { passed: true, detail: format!("Res = {}", r.display_var("l")) },
        Some(r) => Check { passed: false, detail: format!("Res = {} is not a nonzero constant", r.display_var("l")) },
        None => Check { passed: false, detail: "resultant undefined".into() },
    };
    let gap = fam.s();
    let degree_gap = Check {
        passed: gap >= 2,
        detail: format!("d_P = {}, d_Q = {}, s = {gap}", fam.d_p(), fam.d_q()),
    };
    ValidationReport { constant_leading_coefficients, constant_resultant, resultant: res, degree_gap }
}

/// `c = a / b` with `gcd(a, b) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StartRepr", into = "StartRepr")]
pub struct StartPoint {
    a: UniPoly,
    b: UniPoly,
}

#[derive(Clone, Serialize, Deserialize)]
struct StartRepr {
    a: UniPoly,
    #[serde(default = "UniPoly::one")]
    b: UniPoly,
}

impl TryFrom<StartRepr> for StartPoint {
    type Error = Error;
    fn try_from(r: StartRepr) -> Result<Self> {
        StartPoint::new(r.a, r.b)
    }
}

impl From<StartPoint> for StartRepr {
    fn from(s: StartPoint) -> Self {
        StartRepr { a: s.a, b: s.b }
    }
}

impl StartPoint {
    pub fn new(a: UniPoly, b: UniPoly) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::invalid("start point (0, 0)"));
        }
        let g = poly_gcd(&a, &b)?;
        if !g.is_constant() {
            return Err(Error::invalid(format!("gcd(a, b) = {} is not 1", g.display_var("l"))));
        }
        Ok(StartPoint { a, b })
    }

    pub fn poly(a: UniPoly) -> Self {
        StartPoint { a, b: UniPoly::one() }
    }

    pub fn constant(c: &Rat) -> Self {
        StartPoint::new(UniPoly::constant(c.numer().clone().into()), UniPoly::constant(c.denom().clone().into()))
            .unwrap()
    }

    pub fn a(&self) -> &UniPoly {
        &self.a
    }

    pub fn b(&self) -> &UniPoly {
        &self.b
    }

    pub fn d_a(&self) -> usize {
        self.a.deg0()
    }

    pub fn d_b(&self) -> usize {
        self.b.deg0()
    }

    pub fn d_c(&self) -> i64 {
        self.d_a() as i64 - self.d_b() as i64
    }

    /// `[a(λ) : b(λ)]`.
    pub fn specialize(&self, lambda: &Rat) -> ProjPointP1 {
        ProjPointP1::new(self.a.eval(lambda), self.b.eval(lambda)).expect("coprime a, b never vanish together")
    }
}

/// `{"P": [...], "Q": [...], "start": {"a": [...], "b": [...]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(rename = "P")]
    pub p: Vec<UniPoly>,
    #[serde(rename = "Q", default = "one_poly_vec")]
    pub q: Vec<UniPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartPoint>,
}

fn one_poly_vec() -> Vec<UniPoly> {
    vec![UniPoly::one()]
}

impl FamilySpec {
    pub fn family(&self) -> Result<MapFamily> {
        MapFamily::new(self.p.clone(), self.q.clone())
    }

    pub fn from_family(fam: &MapFamily, start: Option<StartPoint>) -> Self {
        FamilySpec { p: fam.p.clone(), q: fam.q.clone(), start }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn validation_examples() {
        let fam = MapFamily::unicritical(2);
        let r = validate_family(&fam);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.resultant.unwrap(), UniPoly::one());
        let f2 = MapFamily::new(vec![l(&[0, 1]), UniPoly::zero(), l(&[1])], vec![UniPoly::zero(), l(&[1])]).unwrap();
        let r2 = validate_family(&f2);
        assert!(!r2.degree_gap.passed && !r2.passed());
        let f3 = MapFamily::new(vec![l(&[1]), UniPoly::zero(), l(&[0, 1])], vec![l(&[1])]).unwrap();
        assert!(!validate_family(&f3).constant_leading_coefficients.passed);
    }

    #[test]
    fn m_values() {
        let fam = MapFamily::unicritical(2);
        assert_eq!(fam.m(), Rat::frac(1, 2));
        assert_eq!(MapFamily::unicritical(3).m(), Rat::frac(1, 3));
        let c = fam.certificate().unwrap();
        assert_eq!(c.s.coeffs[0], UniPoly::one());
    }

    #[test]
    fn escape_at_complex_parameters() {
        let fam = MapFamily::unicritical(2);
        let c = StartPoint::constant(&Rat::zero());
        // λ = -1: bounded critical orbit
        let (g, r) = fam.arch_escape_at(&c, Complex64::new(-1.0, 0.0), 1e-6).unwrap();
        assert!(g.abs() <= r + 1e-6, "{g} {r}");
        // large λ: G(0) = G(λ)/2 ≈ ln|λ|/2
        let (g, r) = fam.arch_escape_at(&c, Complex64::new(0.0, 1e6), 1e-8).unwrap();
        assert!((g - 0.5 * 1e6f64.ln()).abs() < 1e-6 + r, "{g} {r}");
    }

    #[test]
    fn spec_json_roundtrip() {
        let js = r#"{"P": [["0","1"], [], ["1"]], "Q": [["1"]], "start": {"a": ["0"], "b": ["1"]}}"#;
        let spec: FamilySpec = serde_json::from_str(js).unwrap();
        assert_eq!(spec.family().unwrap(), MapFamily::unicritical(2));
        let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back.start, spec.start);
        assert!(serde_json::from_str::<StartPoint>(r#"{"a": [0, 1], "b": [0, 1]}"#).is_err());
    }
}
