//! Metric sequences `||·||_{v,n}` on the pulled-back bundle, their ratio and
//! convergence statistics, and the function-field height and specialization law.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexApprox, Rat};
use crate::error::{Error, Result};
use crate::family::{normalize_start, Caps, MapFamily, StartPoint};
use crate::heights::{canonical_height_point, weil_height, Place};
use crate::homog::ComplexMap;
use crate::par::par_map;

/// Default search depth for [`normalize_start`] inside this module.
pub const NORMALIZE_CAP: usize = 12;
const SAMPLE_SEED: u64 = 0x5eed;

/// A parameter value: rational, complex, or the point at infinity `η`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricPoint {
    Rational(Rat),
    Complex(ComplexApprox),
    Eta,
}

impl fmt::Display for MetricPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricPoint::Rational(r) => write!(f, "{r}"),
            MetricPoint::Complex(z) => write!(f, "{}{:+}i", z.re, z.im),
            MetricPoint::Eta => write!(f, "eta"),
        }
    }
}

impl FromStr for MetricPoint {
    type Err = Error;

    /// `eta`, a rational `p/q`, or a complex number `re,im`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "eta" {
            return Ok(MetricPoint::Eta);
        }
        if let Some((re, im)) = s.split_once(',') {
            let bad = || Error::invalid(format!("cannot parse complex {s:?}"));
            let re: f64 = re.trim().parse().map_err(|_| bad())?;
            let im: f64 = im.trim().parse().map_err(|_| bad())?;
            return Ok(MetricPoint::Complex(ComplexApprox::new(re, im, 0.0)));
        }
        Ok(MetricPoint::Rational(s.parse()?))
    }
}

/// Per-level logs of `M_n = max(|A_n|, |B_n|)` and the norm used by the metric.
struct LevelLogs {
    /// `ln max(|A_n|_v, |B_n|_v)`.
    sup: Vec<f64>,
    /// The metric's normalizing norm: Euclidean at `arch`, sup otherwise.
    metric: Vec<f64>,
    /// Exact `min(v_p(A_n), v_p(B_n))` at a prime.
    vals: Option<Vec<i64>>,
}

fn specialized_forms(fam: &MapFamily, z: Complex64) -> ComplexMap {
    let d = fam.d();
    let (hp, hq) = fam.homogeneous_forms();
    let forms = [hp, hq]
        .iter()
        .map(|f| {
            f.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (vec![i as u32, (d - i) as u32], c.eval_c64(z)))
                .collect()
        })
        .collect();
    ComplexMap::new(d as u32, forms)
}

fn complex_logs(fam: &MapFamily, start: &StartPoint, z: Complex64, n: usize) -> Result<LevelLogs> {
    let cmap = specialized_forms(fam, z);
    let mut w = [start.a().eval_c64(z), start.b().eval_c64(z)];
    let mut ln_m = w[0].norm().max(w[1].norm()).ln();
    if !ln_m.is_finite() {
        return Err(Error::invalid("start point vanishes or overflows at λ"));
    }
    let d = fam.d() as f64;
    let mut sup = Vec::with_capacity(n + 1);
    let mut metric = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let m = w[0].norm().max(w[1].norm());
        let wn = [w[0] / m, w[1] / m];
        sup.push(ln_m);
        metric.push(ln_m + (wn[0].norm_sqr() + wn[1].norm_sqr()).sqrt().ln());
        if k == n {
            break;
        }
        let img = cmap.eval(&wn);
        let mi = img[0].norm().max(img[1].norm());
        if !(mi > 0.0) || !mi.is_finite() {
            return Err(Error::NumericFailure { msg: "orbit degenerated in floating point".into(), best_radius: f64::INFINITY });
        }
        ln_m = d * ln_m + mi.ln();
        w = [img[0], img[1]];
    }
    Ok(LevelLogs { sup, metric, vals: None })
}

fn rational_logs(fam: &MapFamily, start: &StartPoint, lambda: &Rat, place: Place, n: usize, caps: Caps) -> Result<LevelLogs> {
    let map = fam.specialize(lambda)?;
    let mut z = vec![start.a().eval(lambda), start.b().eval(lambda)];
    let mut sup = Vec::new();
    let mut metric = Vec::new();
    let mut vals = Vec::new();
    for k in 0..=n {
        let ln_sup = z.iter().filter(|c| !c.is_zero()).map(Rat::ln_abs).fold(f64::NEG_INFINITY, f64::max);
        match place {
            Place::Prime(p) => {
                let v = z.iter().filter_map(|c| c.valuation(p)).min().unwrap();
                vals.push(v);
                let l = -(v as f64) * (p as f64).ln();
                sup.push(l);
                metric.push(l);
            }
            _ => {
                let ratio2: f64 = z
                    .iter()
                    .map(|c| if c.is_zero() { 0.0 } else { (2.0 * (c.ln_abs() - ln_sup)).exp() })
                    .sum();
                sup.push(ln_sup);
                metric.push(ln_sup + 0.5 * ratio2.ln());
            }
        }
        if k == n {
            break;
        }
        z = map.homog().eval(&z);
        let bits: u64 = z.iter().map(|c| c.numer().bits() + c.denom().bits()).sum();
        if bits > caps.max_bits {
            return Err(Error::ResourceLimit { what: format!("level {} needs {bits} bits", k + 1), partial: None });
        }
    }
    Ok(LevelLogs { sup, metric, vals: matches!(place, Place::Prime(_)).then_some(vals) })
}

fn level_logs(fam: &MapFamily, start: &StartPoint, lambda: &MetricPoint, place: Place, n: usize) -> Result<LevelLogs> {
    match (lambda, place) {
        (_, Place::Finite) => Err(Error::invalid("metric needs a specific place")),
        (MetricPoint::Rational(r), _) => rational_logs(fam, start, r, place, n, Caps::default()),
        (MetricPoint::Complex(z), Place::Arch) => complex_logs(fam, start, z.center(), n),
        (MetricPoint::Complex(_), Place::Prime(_)) => Err(Error::invalid("a prime place needs a rational λ")),
        (MetricPoint::Eta, _) => Err(Error::invalid("η has no finite orbit data")),
    }
}

fn abs_v(x: &Rat, place: Place) -> f64 {
    match place {
        Place::Prime(p) => match x.valuation(p) {
            Some(v) => (-(v as f64) * (p as f64).ln()).exp(),
            None => 0.0,
        },
        _ => x.abs().to_f64(),
    }
}

/// `||u0 t0 + u1 t1||_{v,n}(λ)`.
pub fn metric_eval(
    fam: &MapFamily,
    start: &StartPoint,
    u0: &Rat,
    u1: &Rat,
    lambda: &MetricPoint,
    place: Place,
    n: usize,
) -> Result<f64> {
    if u0.is_zero() && u1.is_zero() {
        return Err(Error::invalid("section (0, 0)"));
    }
    let d = fam.d() as f64;
    let dn = d.powi(n as i32);
    match lambda {
        MetricPoint::Eta => {
            if let Place::Finite = place {
                return Err(Error::invalid("metric needs a specific place"));
            }
            let cp0 = fam.c_p(0).coeff(0);
            let e = (dn - 1.0) / (dn * (d - 1.0));
            let lc = abs_v(&cp0, place).ln();
            Ok((abs_v(u0, place).ln() - e * lc).exp())
        }
        MetricPoint::Rational(r) => {
            let s = &(u0 * &start.a().eval(r)) + &(u1 * &start.b().eval(r));
            if s.is_zero() {
                return Ok(0.0);
            }
            let logs = level_logs(fam, start, lambda, place, n)?;
            let ln_s = abs_v(&s, place).ln();
            let ln_s = if let Place::Prime(p) = place {
                -(s.valuation(p).unwrap() as f64) * (p as f64).ln()
            } else {
                s.ln_abs().max(ln_s)
            };
            Ok((ln_s - logs.metric[n] / dn).exp())
        }
        MetricPoint::Complex(z) => {
            if let Place::Prime(_) = place {
                return Err(Error::invalid("a prime place needs a rational λ"));
            }
            let c = z.center();
            let s = u0.to_f64() * start.a().eval_c64(c) + u1.to_f64() * start.b().eval_c64(c);
            if s.norm() == 0.0 {
                return Ok(0.0);
            }
            let logs = level_logs(fam, start, lambda, place, n)?;
            Ok((s.norm().ln() - logs.metric[n] / dn).exp())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// `|λ|_v <= L`.
    #[serde(rename = "U_L")]
    U(f64),
    /// `|λ|_v > L`, i.e. `|u|_v < 1/L` for the uniformizer `u = 1/λ` at `η`.
    #[serde(rename = "V_L")]
    V(f64),
}

impl Region {
    pub fn l(&self) -> f64 {
        match *self {
            Region::U(l) | Region::V(l) => l,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Region::U(_) => "U_L",
            Region::V(_) => "V_L",
        }
    }
}

/// Deterministic samples from a region: complex at `arch`, rational at a prime.
pub fn sample_region(region: Region, place: Place, count: usize) -> Result<Vec<MetricPoint>> {
    let l = region.l();
    if !(l > 0.0) {
        return Err(Error::invalid("L must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut out = Vec::with_capacity(count);
    match place {
        Place::Arch => {
            for _ in 0..count {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = rng.gen_range(0.0f64..1.0).sqrt();
                let z = match region {
                    Region::U(l) => Complex64::from_polar(l * r, theta),
                    Region::V(l) => Complex64::from_polar(1.0 / (l * r.max(1e-3)), theta),
                };
                out.push(MetricPoint::Complex(ComplexApprox::exact(z)));
            }
        }
        Place::Prime(p) => {
            let lnp = (p as f64).ln();
            let mut guard = 0;
            while out.len() < count {
                guard += 1;
                if guard > 1000 * count.max(1) {
                    return Err(Error::invalid("could not sample the region"));
                }
                let a: i64 = rng.gen_range(-60..=60);
                let b: i64 = rng.gen_range(1..=60);
                let mut x = Rat::frac(a, b);
                if let Region::V(l) = region {
                    // push |x|_p above L
                    if x.is_zero() {
                        continue;
                    }
                    let k = (l.ln() / lnp).floor() as i64 + 1 + x.valuation(p).unwrap();
                    if k > 0 {
                        x = &x * &Rat::new(1.into(), num_bigint::BigInt::from(p).pow(k as u32)).unwrap();
                    }
                    if abs_v(&x, place) <= l {
                        continue;
                    }
                } else if abs_v(&x, place) > l {
                    continue;
                }
                out.push(MetricPoint::Rational(x));
            }
        }
        Place::Finite => return Err(Error::invalid("sampling needs a specific place")),
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub region: String,
    pub l: f64,
    pub place: Place,
    /// Shift `k` applied by [`normalize_start`].
    pub start_shift: usize,
    pub samples: Vec<String>,
    /// Observed range of `M_{n+1} / M_n^d` over the samples.
    pub per_n: Vec<RatioRow>,
    pub c1: f64,
    pub c2: f64,
    pub skipped: Vec<String>,
}

/// Observed two-sided constants in `C1 M_n^d <= M_{n+1} <= C2 M_n^d`.
pub fn ratio_bounds_report(
    fam: &MapFamily,
    start: &StartPoint,
    place: Place,
    region: Region,
    sample_size: usize,
    n_max: usize,
) -> Result<RatioReport> {
    fam.require_valid()?;
    let (k, start) = normalize_start(fam, start, NORMALIZE_CAP, Caps::default())?;
    let samples = sample_region(region, place, sample_size)?;
    let d = fam.d() as f64;
    let logs = par_map(&samples, |s| level_logs(fam, &start, s, place, n_max));
    let mut per_n: Vec<RatioRow> =
        (0..n_max).map(|n| RatioRow { n, min: f64::INFINITY, max: f64::NEG_INFINITY }).collect();
    let mut skipped = Vec::new();
    for (s, l) in samples.iter().zip(&logs) {
        match l {
            Ok(l) => {
                for (n, row) in per_n.iter_mut().enumerate() {
                    let r = (l.sup[n + 1] - d * l.sup[n]).exp();
                    row.min = row.min.min(r);
                    row.max = row.max.max(r);
                }
            }
            Err(e) => skipped.push(format!("{s}: {e}")),
        }
    }
    let c1 = per_n.iter().map(|r| r.min).fold(f64::INFINITY, f64::min);
    let c2 = per_n.iter().map(|r| r.max).fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioReport {
        region: region.name().into(),
        l: region.l(),
        place,
        start_shift: k,
        samples: samples.iter().map(ToString::to_string).collect(),
        per_n,
        c1,
        c2,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `sup |d^-(n+1) ln N_{n+1} - d^-n ln N_n|` over the sample.
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub place: Place,
    pub per_n: Vec<ConvergenceRow>,
    /// Smallest `C11` with `sup_n <= C11 / d^(n+1)` for every row.
    pub c11: f64,
    /// First level after which the sup sequence is nonincreasing.
    pub burn_in: usize,
    pub decays: bool,
    /// Geometric mean of `sup_{n+1} / sup_n` past burn-in (`None` when a sup is 0).
    pub decay_ratio: Option<f64>,
    pub skipped: Vec<String>,
}

fn level_difference(l: &LevelLogs, n: usize, d: usize, place: Place) -> f64 {
    if let (Some(v), Place::Prime(p)) = (&l.vals, place) {
        let dn = num_bigint::BigInt::from(d).pow(n as u32);
        let a = Rat::new(v[n + 1].into(), &dn * d).unwrap();
        let b = Rat::new(v[n].into(), dn).unwrap();
        return (&a - &b).abs().to_f64() * (p as f64).ln();
    }
    let df = d as f64;
    (l.metric[n + 1] / df.powi(n as i32 + 1) - l.metric[n] / df.powi(n as i32)).abs()
}

pub fn convergence_report(
    fam: &MapFamily,
    start: &StartPoint,
    place: Place,
    sample: &[MetricPoint],
    n_max: usize,
) -> Result<ConvergenceReport> {
    fam.require_valid()?;
    if n_max == 0 {
        return Ok(ConvergenceReport {
            place,
            per_n: Vec::new(),
            c11: 0.0,
            burn_in: 0,
            decays: true,
            decay_ratio: None,
            skipped: Vec::new(),
        });
    }
    let (_, start) = normalize_start(fam, start, NORMALIZE_CAP, Caps::default())?;
    let d = fam.d();
    let logs = par_map(sample, |s| level_logs(fam, &start, s, place, n_max));
    let mut sups = vec![0.0f64; n_max];
    let mut skipped = Vec::new();
    for (s, l) in sample.iter().zip(&logs) {
        match l {
            Ok(l) => {
                for (n, sup) in sups.iter_mut().enumerate() {
                    *sup = sup.max(level_difference(l, n, d, place));
                }
            }
            Err(e) => skipped.push(format!("{s}: {e}")),
        }
    }
    let df = d as f64;
    let c11 = sups.iter().enumerate().map(|(n, s)| s * df.powi(n as i32 + 1)).fold(0.0, f64::max);
    let mut burn_in = n_max - 1;
    while burn_in > 0 && sups[burn_in] <= sups[burn_in - 1] * (1.0 + 1e-9) {
        burn_in -= 1;
    }
    let tail = &sups[burn_in..];
    let decays = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let decay_ratio = if tail.len() >= 2 && tail.iter().all(|&s| s > 0.0) {
        Some((tail[tail.len() - 1] / tail[0]).powf(1.0 / (tail.len() - 1) as f64))
    } else {
        None
    };
    Ok(ConvergenceReport {
        place,
        per_n: sups.into_iter().enumerate().map(|(n, sup)| ConvergenceRow { n, sup }).collect(),
        c11,
        burn_in,
        decays,
        decay_ratio,
        skipped,
    })
}

/// `ĥ_f(c) = lim max(deg A_n, deg B_n) / d^n`, exact.
pub fn ff_canonical_height(fam: &MapFamily, start: &StartPoint) -> Result<Rat> {
    fam.require_valid()?;
    let (k, s) = normalize_start(fam, start, NORMALIZE_CAP, Caps::default())?;
    let dk = num_bigint::BigInt::from(fam.d()).pow(k as u32);
    Rat::new(s.d_a().into(), dk)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecializationRow {
    pub lambda: Rat,
    pub hhat: f64,
    pub hhat_radius: f64,
    pub weil: f64,
    /// `ĥ_f(c) h(λ)`.
    pub predicted: f64,
    pub error: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecializationReport {
    pub hhat_ff: Rat,
    pub rows: Vec<SpecializationRow>,
    pub sup_error: f64,
    /// Mean of `ĥ / (ĥ_f(c) h(λ))` over the top quarter of samples by `h(λ)`.
    pub tail_ratio: Option<f64>,
    pub skipped: Vec<(Rat, String)>,
}

fn specialized_height(fam: &MapFamily, start: &StartPoint, lambda: &Rat, tol: f64) -> Result<(f64, f64)> {
    if start.b().eval(lambda).is_zero() {
        return Err(Error::invalid("λ is a pole of c"));
    }
    let map = fam.specialize(lambda)?;
    let h = canonical_height_point(&map, &start.specialize(lambda), tol)?;
    Ok((h.value, h.error_radius))
}

pub fn specialization_check(
    fam: &MapFamily,
    start: &StartPoint,
    lambdas: &[Rat],
    tol: f64,
) -> Result<SpecializationReport> {
    let hff = ff_canonical_height(fam, start)?;
    let hf = hff.to_f64();
    let results = par_map(lambdas, |l| specialized_height(fam, start, l, tol));
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (l, r) in lambdas.iter().zip(results) {
        match r {
            Ok((h, rad)) => {
                let w = weil_height(l);
                let predicted = hf * w;
                rows.push(SpecializationRow {
                    lambda: l.clone(),
                    hhat: h,
                    hhat_radius: rad,
                    weil: w,
                    predicted,
                    error: (h - predicted).abs(),
                    ratio: (predicted > 0.0).then(|| h / predicted),
                });
            }
            Err(e) => skipped.push((l.clone(), e.to_string())),
        }
    }
    let sup_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let mut by_height: Vec<&SpecializationRow> = rows.iter().filter(|r| r.ratio.is_some()).collect();
    by_height.sort_by(|a, b| a.weil.total_cmp(&b.weil));
    let top = &by_height[by_height.len() - by_height.len().div_ceil(4)..];
    let tail_ratio = (!top.is_empty()).then(|| top.iter().map(|r| r.ratio.unwrap()).sum::<f64>() / top.len() as f64);
    Ok(SpecializationReport { hhat_ff: hff, rows, sup_error, tail_ratio, skipped })
}

/// `(ĥ_{f_λ}(c(λ)) / ĥ_f(c), ĥ_{f_λ}(f_λ^k(c(λ))) / ĥ_f(f^k(c)))`.
pub fn height_ratio_invariance(fam: &MapFamily, start: &StartPoint, lambda: &Rat, k: usize, tol: f64) -> Result<(f64, f64)> {
    let hff = ff_canonical_height(fam, start)?;
    if hff.is_zero() {
        return Err(Error::UndefinedRatio("ĥ_f(c) = 0".into()));
    }
    let map = fam.specialize(lambda)?;
    let pt = start.specialize(lambda);
    let mut img = pt.clone();
    for _ in 0..k {
        img = map.homogeneous_step(&img);
    }
    let h0 = canonical_height_point(&map, &pt, tol)?.value;
    let hk = canonical_height_point(&map, &img, tol)?.value;
    let hf = hff.to_f64();
    let dk = (fam.d() as f64).powi(k as i32);
    Ok((h0 / hf, hk / (dk * hf)))
}

/// Integer samples `±1, …, ±n`.
pub fn symmetric_integers(n: i64) -> Vec<Rat> {
    (1..=n).flat_map(|k| [Rat::from_int(k), Rat::from_int(-k)]).collect()
}
