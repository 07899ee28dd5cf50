//! Correlation experiments: where one start point is preperiodic, classify another.

use std::collections::HashMap;

use serde::Serialize;

use super::iter::{Caps, IterPair};
use super::params::{find_preperiodic_params, preperiodic_parameter_poly, ParamRoot, ParamValue};
use super::{MapFamily, StartPoint};
use crate::algebra::roots::isolate_roots;
use crate::algebra::{rational_roots, AlgNum, Rat, UniPoly};
use crate::error::{Error, Result};
use crate::heights::{alg_orbit_height, canonical_height_point, AlgOrbit, DEFAULT_BIT_CAP};
use crate::par::par_map;

/// Ratio of estimate to radius below which an algebraic classification is withheld.
pub const UNDECIDED_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentBounds {
    pub max_pre: usize,
    pub max_per: usize,
    pub tol: f64,
    pub caps: Caps,
}

impl Default for ExperimentBounds {
    fn default() -> Self {
        ExperimentBounds { max_pre: 2, max_per: 2, tol: 1e-6, caps: Caps::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassificationStatus {
    Preperiodic,
    Wandering,
    NumericUndecided { estimate: f64 },
}

impl ClassificationStatus {
    pub fn label(&self) -> &'static str {
        match self {
            ClassificationStatus::Preperiodic => "preperiodic",
            ClassificationStatus::Wandering => "wandering",
            ClassificationStatus::NumericUndecided { .. } => "numeric_undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamClassification {
    pub lambda: ParamValue,
    pub status_1: ClassificationStatus,
    pub status_2: ClassificationStatus,
    pub hhat_2_estimate: Option<f64>,
    pub error_radius: Option<f64>,
    /// How `status_2` was decided, or why it could not be.
    pub note: String,
}

/// One CSV line of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub lambda_repr: String,
    pub kind: String,
    pub status_1: String,
    pub status_2: String,
    pub hhat_2_estimate: String,
    pub error_radius: String,
}

impl ParamClassification {
    pub fn coincides(&self) -> bool {
        self.status_1 == self.status_2
    }

    pub fn csv_row(&self) -> CsvRow {
        let f = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        CsvRow {
            lambda_repr: self.lambda.repr(),
            kind: self.lambda.kind().into(),
            status_1: self.status_1.label().into(),
            status_2: self.status_2.label().into(),
            hhat_2_estimate: f(self.hhat_2_estimate),
            error_radius: f(self.error_radius),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub rows: Vec<ParamClassification>,
    pub coincidences: usize,
    pub separations: usize,
    pub undecided: usize,
}

impl CorrelationReport {
    fn from_rows(rows: Vec<ParamClassification>) -> Self {
        let undecided = rows
            .iter()
            .filter(|r| matches!(r.status_2, ClassificationStatus::NumericUndecided { .. }))
            .count();
        let coincidences = rows.iter().filter(|r| r.coincides()).count();
        let separations = rows.len() - coincidences - undecided;
        CorrelationReport { rows, coincidences, separations, undecided }
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows.iter().map(ParamClassification::csv_row).collect()
    }
}

/// Squarefree product of all parameter polynomials of `(fam, start)` within the bounds.
fn parameter_product(fam: &MapFamily, start: &StartPoint, b: &ExperimentBounds) -> Result<UniPoly> {
    let mut pair = IterPair::new(start);
    pair.extend_to(fam, b.max_pre + b.max_per, b.caps)?;
    let mut acc = UniPoly::one();
    for m in 0..=b.max_pre {
        for n in m + 1..=m + b.max_per {
            let r = preperiodic_parameter_poly(&pair, m, n)?;
            let sf = r.squarefree_part().primitive_part();
            let fresh = sf.exact_div(&sf.gcd(&acc)).expect("gcd divides");
            acc = (&acc * &fresh).primitive_part();
        }
    }
    Ok(acc)
}

fn classify_rational(fam2: &MapFamily, c2: &StartPoint, lambda: &Rat, tol: f64) -> Decision {
    let map = match fam2.specialize(lambda) {
        Ok(m) => m,
        Err(e) => return (ClassificationStatus::NumericUndecided { estimate: f64::NAN }, None, None, e.to_string()),
    };
    let pt = c2.specialize(lambda);
    let status = if map.orbit_detect(&pt).is_preperiodic() {
        ClassificationStatus::Preperiodic
    } else {
        ClassificationStatus::Wandering
    };
    let (h, r) = match canonical_height_point(&map, &pt, tol) {
        Ok(h) => (Some(h.value), Some(h.error_radius)),
        Err(_) => (None, None),
    };
    (status, h, r, "exact orbit decision".into())
}

type Decision = (ClassificationStatus, Option<f64>, Option<f64>, String);

/// Part of the defining polynomial not already known to be preperiodic for the second pair.
fn residual_poly(alpha: &AlgNum, product2: Option<&UniPoly>) -> (UniPoly, Option<UniPoly>) {
    let m = alpha.defining_poly.clone();
    if let Some(prod) = product2 {
        let g = m.gcd(prod);
        if !g.is_constant() {
            let rest = m.exact_div(&g).expect("gcd divides").primitive_part();
            return (rest, Some(g));
        }
    }
    (m, None)
}

/// Height of the second start point averaged over the roots of `m`.
fn conjugate_height(fam2: &MapFamily, c2: &StartPoint, m: &UniPoly, tol: f64) -> Decision {
    if m.is_constant() {
        return (ClassificationStatus::Preperiodic, Some(0.0), Some(0.0), "all conjugates preperiodic".into());
    }
    let (hp, hq) = fam2.homogeneous_forms();
    let bounds = |z| fam2.arch_bounds_at(z).unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let res = alg_orbit_height(&AlgOrbit {
        m,
        p: &hp.coeffs,
        q: &hq.coeffs,
        a: c2.a(),
        b: c2.b(),
        bounds: &bounds,
        tol,
        bit_cap: DEFAULT_BIT_CAP,
    });
    match res {
        Ok(h) => {
            let status = if h.value > UNDECIDED_FACTOR * h.error_radius.max(tol) {
                ClassificationStatus::Wandering
            } else {
                ClassificationStatus::NumericUndecided { estimate: h.value }
            };
            (status, Some(h.value), Some(h.error_radius), "conjugate-averaged height estimate".into())
        }
        Err(Error::ResourceLimit { what, partial }) => (
            ClassificationStatus::NumericUndecided { estimate: partial.unwrap_or(f64::NAN) },
            partial,
            Some(f64::INFINITY),
            what,
        ),
        Err(e) => (ClassificationStatus::NumericUndecided { estimate: f64::NAN }, None, None, e.to_string()),
    }
}

fn classify(
    root: &ParamRoot,
    fam2: &MapFamily,
    c2: &StartPoint,
    product2: Option<&UniPoly>,
    heights: &HashMap<UniPoly, Decision>,
    tol: f64,
) -> ParamClassification {
    let undecided = |msg: String| (ClassificationStatus::NumericUndecided { estimate: f64::NAN }, None, None, msg);
    let (status_2, h, r, note) = if let Some(e) = &root.error {
        undecided(e.clone())
    } else {
        match &root.value {
            ParamValue::Rational { value } => classify_rational(fam2, c2, value, tol),
            ParamValue::Algebraic { value } => {
                let (rest, common) = residual_poly(value, product2);
                let exact = common.is_some_and(|g| {
                    isolate_roots(&g).is_ok_and(|rs| {
                        rs.iter().any(|r| value.isolating_disk.contains(r.center()) && r.error_radius <= value.isolating_disk.error_radius)
                    })
                });
                if exact {
                    (ClassificationStatus::Preperiodic, Some(0.0), Some(0.0), "root of a parameter polynomial of the second pair".into())
                } else {
                    heights.get(&rest).cloned().unwrap_or_else(|| undecided("height not computed".into()))
                }
            }
        }
    };
    ParamClassification {
        lambda: root.value.clone(),
        status_1: ClassificationStatus::Preperiodic,
        status_2,
        hhat_2_estimate: h,
        error_radius: r,
        note,
    }
}

/// For every parameter where `c1` is preperiodic for `fam1`, classifies `c2` under `fam2`.
pub fn correlation_experiment(
    fam1: &MapFamily,
    c1: &StartPoint,
    fam2: &MapFamily,
    c2: &StartPoint,
    bounds: &ExperimentBounds,
) -> Result<CorrelationReport> {
    fam1.require_valid()?;
    fam2.require_valid()?;
    let roots = find_preperiodic_params(fam1, c1, bounds.max_pre, bounds.max_per, bounds.caps)?;
    let product2 = parameter_product(fam2, c2, bounds).ok();
    let mut polys: Vec<UniPoly> = roots
        .iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| match &r.value {
            ParamValue::Algebraic { value } => Some(residual_poly(value, product2.as_ref()).0),
            ParamValue::Rational { .. } => None,
        })
        .collect();
    polys.sort_by_key(|p| p.to_string());
    polys.dedup();
    let hs = par_map(&polys, |m| conjugate_height(fam2, c2, m, bounds.tol));
    let heights: HashMap<UniPoly, Decision> = polys.into_iter().zip(hs).collect();
    let rows = par_map(&roots, |r| classify(r, fam2, c2, product2.as_ref(), &heights, bounds.tol));
    Ok(CorrelationReport::from_rows(rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcfRow {
    pub critical_f: Rat,
    pub critical_g: Rat,
    pub report: Option<CorrelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcfReport {
    pub rows: Vec<PcfRow>,
    /// Inputs skipped because a critical point is irrational.
    pub unsupported: Vec<String>,
}

fn critical_points(f: &UniPoly) -> Result<Vec<Rat>> {
    let df = f.derivative();
    let mut roots = rational_roots(&df)?;
    if roots.len() != df.deg0() {
        return Err(Error::Unsupported(format!("{} has irrational critical points", f.display_var("z"))));
    }
    roots.dedup();
    Ok(roots)
}

/// `f(z) + x(t)` as a family over `Q[t]`.
fn shifted_family(f: &UniPoly, x: &UniPoly) -> Result<MapFamily> {
    let mut p: Vec<UniPoly> = f.coeffs().iter().map(|c| UniPoly::constant(c.clone())).collect();
    p[0] = &p[0] + x;
    MapFamily::new(p, vec![UniPoly::one()])
}

/// Correlates critical orbits of `f(z) + x(t)` and `g(z) + y(t)`.
pub fn pcf_experiment(
    f: &UniPoly,
    g: &UniPoly,
    x_of_t: &UniPoly,
    y_of_t: &UniPoly,
    bounds: &ExperimentBounds,
) -> Result<PcfReport> {
    if f.deg0() < 2 || g.deg0() < 2 {
        return Err(Error::invalid("f and g need degree >= 2"));
    }
    let fam_f = shifted_family(f, x_of_t)?;
    let fam_g = shifted_family(g, y_of_t)?;
    let mut unsupported = Vec::new();
    let crit = |p: &UniPoly, unsupported: &mut Vec<String>| match critical_points(p) {
        Ok(c) => c,
        Err(e) => {
            unsupported.push(e.to_string());
            Vec::new()
        }
    };
    let cf = crit(f, &mut unsupported);
    let cg = crit(g, &mut unsupported);
    let mut rows = Vec::new();
    for a in &cf {
        for b in &cg {
            let r = correlation_experiment(&fam_f, &StartPoint::constant(a), &fam_g, &StartPoint::constant(b), bounds);
            let (report, error) = match r {
                Ok(rep) => (Some(rep), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(PcfRow { critical_f: a.clone(), critical_g: b.clone(), report, error });
        }
    }
    Ok(PcfReport { rows, unsupported })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn identical_pairs_coincide() {
        let fam = MapFamily::unicritical(2);
        let c = StartPoint::poly(UniPoly::zero());
        let rep = correlation_experiment(&fam, &c, &fam, &c, &ExperimentBounds::default()).unwrap();
        assert!(!rep.rows.is_empty());
        assert_eq!(rep.coincidences, rep.rows.len(), "{rep:#?}");
    }

    #[test]
    fn start_two_separates_at_minus_one() {
        let fam = MapFamily::unicritical(2);
        let rep = correlation_experiment(
            &fam,
            &StartPoint::poly(UniPoly::zero()),
            &fam,
            &StartPoint::poly(l(&[2])),
            &ExperimentBounds::default(),
        )
        .unwrap();
        let row = rep.rows.iter().find(|r| r.lambda.as_rat() == Some(&Rat::from_int(-1))).unwrap();
        assert_eq!(row.status_2, ClassificationStatus::Wandering);
        assert!(rep.separations > 0);
    }

    #[test]
    fn pcf_examples() {
        let b = ExperimentBounds::default();
        let t = l(&[0, 1]);
        let rep = pcf_experiment(&l(&[0, 0, 1]), &l(&[0, 0, 0, 1]), &t, &t, &b).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let corr = rep.rows[0].report.as_ref().unwrap();
        let zero = corr.rows.iter().find(|r| r.lambda.as_rat() == Some(&Rat::zero())).unwrap();
        assert!(zero.coincides());
        let rep = pcf_experiment(&l(&[0, -3, 0, 1]), &l(&[0, 0, 1]), &t, &t, &b).unwrap();
        assert_eq!(rep.rows.len(), 2);
        let irr = pcf_experiment(&l(&[0, -2, 0, 1]), &l(&[0, 0, 1]), &t, &t, &b).unwrap();
        assert!(irr.rows.is_empty() && irr.unsupported.len() == 1);
    }
}
