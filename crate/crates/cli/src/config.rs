//! Experiment configuration: one JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use arithdyn::algebra::{Rat, UniPoly};
use arithdyn::family::{Caps, ExperimentBounds, FamilySpec, MapFamily, StartPoint};
use arithdyn::heights::Place;
use arithdyn::maps::RationalMap;
use arithdyn::metrics::Region;
use arithdyn::p2family::P2Family;
use arithdyn::proj::{ProjPointP1, ProjPointP2};
use clap::Args;
use serde::{Deserialize, Deserializer};

use crate::expr;
use crate::CliError;

/// Either an expression such as `x^2 + l` or inline JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Input(pub String);

impl FromStr for Input {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Input(s.to_string()))
    }
}

impl<'de> Deserialize<'de> for Input {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Input(s),
            v => Input(v.to_string()),
        })
    }
}

impl Input {
    fn json(&self) -> Option<&str> {
        let t = self.0.trim_start();
        (t.starts_with('{') || t.starts_with('[')).then_some(t)
    }
}

fn cfg_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

/// Every tunable of every subcommand. Flags win over the config file.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Family in x and l, e.g. "x^2 + l" or "(x^2 + l)/(x + 1)", or JSON {"P", "Q", "start"}
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub family: Option<Input>,
    /// Start point in l, e.g. "0", "l", "1/(l + 1)", or JSON {"a", "b"}
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub start: Option<Input>,
    /// Second family (correlate)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub family2: Option<Input>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub start2: Option<Input>,
    /// Map in x for orbit/height, e.g. "x^2 - 2", or JSON {"P", "Q"}
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub map: Option<Input>,
    /// Rational, "inf", or "a:b:c" on P²
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// P² family as "P(x), Q(x)", e.g. "x^3 - x, x^3", or JSON {"P", "Q"}
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p2: Option<Input>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<Rat>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<Rat>,
    /// Start coordinates [a:b:1] for the P² family
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<Rat>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<Rat>,
    #[arg(long, global = true)]
    pub max_pre: Option<usize>,
    #[arg(long, global = true)]
    pub max_per: Option<usize>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub sample_size: Option<usize>,
    /// Region radius L
    #[arg(long, global = true)]
    pub l: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    #[arg(long, global = true)]
    pub max_bits: Option<u64>,
    /// "arch" or a prime
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub place: Option<String>,
    /// "U" (|λ| <= L) or "V" (|λ| > L)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Specialize over λ in {±1, …, ±range}
    #[arg(long, global = true)]
    pub range: Option<i64>,
    /// Plot center "re,im"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long, global = true)]
    pub width: Option<f64>,
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// pcf: polynomials f, g in x and the shifts x(t), y(t)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long = "x-of-t", global = true, allow_hyphen_values = true)]
    #[serde(rename = "x_of_t")]
    pub x_of_t: Option<String>,
    #[arg(long = "y-of-t", global = true, allow_hyphen_values = true)]
    #[serde(rename = "y_of_t")]
    pub y_of_t: Option<String>,
    /// Root-of-unity order for the P² counterexample
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($a:ident, $b:ident; $($f:ident),*) => {
        Params { $($f: $a.$f.or($b.$f)),* }
    };
}

impl Params {
    pub fn load(path: &Path) -> Result<Params, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(&path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| cfg_err(&path.display().to_string(), e))
    }

    /// `self` where set, `base` otherwise.
    pub fn over(self, base: Params) -> Params {
        let a = self;
        let b = base;
        overlay!(a, b; family, start, family2, start2, map, point, p2, lambda, mu, a, b,
            max_pre, max_per, n_max, sample_size, l, tol, max_degree, max_bits, place, region,
            range, center, width, resolution, f, g, x_of_t, y_of_t, k, out, seed, threads)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("n_max", self.n_max),
            ("sample_size", self.sample_size),
            ("resolution", self.resolution),
            ("max_degree", self.max_degree),
            ("k", self.k),
            ("threads", self.threads),
        ];
        for (name, v) in positive {
            if v == Some(0) {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        for (name, v) in [("tol", self.tol), ("l", self.l), ("width", self.width)] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(CliError::Config(format!("{name} must be positive")));
                }
            }
        }
        if self.range.is_some_and(|r| r < 1) {
            return Err(CliError::Config("range must be positive".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-6)
    }

    pub fn n_max(&self, default: usize) -> usize {
        self.n_max.unwrap_or(default)
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size.unwrap_or(64)
    }

    pub fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps { max_degree: self.max_degree.unwrap_or(d.max_degree), max_bits: self.max_bits.unwrap_or(d.max_bits) }
    }

    pub fn bounds(&self) -> ExperimentBounds {
        let d = ExperimentBounds::default();
        ExperimentBounds {
            max_pre: self.max_pre.unwrap_or(d.max_pre),
            max_per: self.max_per.unwrap_or(d.max_per),
            tol: self.tol.unwrap_or(d.tol),
            caps: self.caps(),
        }
    }

    pub fn place(&self) -> Result<Place, CliError> {
        self.place.as_deref().unwrap_or("arch").parse().map_err(|e| cfg_err("place", e))
    }

    pub fn region(&self) -> Result<Region, CliError> {
        let l = self.l.unwrap_or(4.0);
        match self.region.as_deref().unwrap_or("U") {
            "U" | "u" | "U_L" => Ok(Region::U(l)),
            "V" | "v" | "V_L" => Ok(Region::V(l)),
            r => Err(CliError::Config(format!("region must be U or V, got {r:?}"))),
        }
    }

    fn spec(input: &Input, what: &str) -> Result<FamilySpec, CliError> {
        if let Some(j) = input.json() {
            return serde_json::from_str(j).map_err(|e| cfg_err(what, e));
        }
        let f = expr::parse(&input.0).map_err(|e| cfg_err(what, e))?;
        Ok(FamilySpec { p: f.num.x_coeffs(), q: f.den.x_coeffs(), start: None })
    }

    fn family_of(&self, fam: &Option<Input>, start: &Option<Input>, which: &str) -> Result<(MapFamily, Option<StartPoint>), CliError> {
        let input = fam.as_ref().ok_or_else(|| CliError::Config(format!("missing --{which}")))?;
        let spec = Self::spec(input, which)?;
        let fam = spec.family().map_err(|e| cfg_err(which, e))?;
        let start = match start {
            Some(s) => Some(parse_start(s)?),
            None => spec.start,
        };
        Ok((fam, start))
    }

    /// The family as given, without requiring validity.
    pub fn raw_family(&self) -> Result<MapFamily, CliError> {
        Ok(self.family_of(&self.family, &None, "family")?.0)
    }

    pub fn family(&self) -> Result<(MapFamily, StartPoint), CliError> {
        let (fam, start) = self.family_of(&self.family, &self.start, "family")?;
        Ok((fam, start.ok_or_else(|| CliError::Config("missing --start".into()))?))
    }

    pub fn family2(&self) -> Result<(MapFamily, StartPoint), CliError> {
        let (fam, start) = self.family_of(&self.family2, &self.start2, "family2")?;
        Ok((fam, start.ok_or_else(|| CliError::Config("missing --start2".into()))?))
    }

    pub fn map(&self) -> Result<RationalMap, CliError> {
        let input = self.map.as_ref().ok_or_else(|| CliError::Config("missing --map".into()))?;
        if let Some(j) = input.json() {
            return serde_json::from_str(j).map_err(|e| cfg_err("map", e));
        }
        let f = expr::parse(&input.0).map_err(|e| cfg_err("map", e))?;
        if f.num.uses_param() || f.den.uses_param() {
            return Err(CliError::Config("map: use a family for expressions in l".into()));
        }
        RationalMap::new(f.num.univariate(), f.den.univariate()).map_err(|e| cfg_err("map", e))
    }

    pub fn point_p1(&self) -> Result<ProjPointP1, CliError> {
        let s = self.point.as_deref().ok_or_else(|| CliError::Config("missing --point".into()))?;
        match s.trim() {
            "inf" | "infinity" => Ok(ProjPointP1::infinity()),
            t => Ok(ProjPointP1::affine(&t.parse().map_err(|e| cfg_err("point", e))?)),
        }
    }

    pub fn point_p2(&self) -> Result<ProjPointP2, CliError> {
        let s = self.point.as_deref().ok_or_else(|| CliError::Config("missing --point".into()))?;
        let cs: Vec<&str> = s.split(':').collect();
        if cs.len() != 3 {
            return Err(CliError::Config(format!("point: expected a:b:c, got {s:?}")));
        }
        let r = |t: &str| t.parse::<Rat>().map_err(|e| cfg_err("point", e));
        ProjPointP2::new(r(cs[0])?, r(cs[1])?, r(cs[2])?).map_err(|e| cfg_err("point", e))
    }

    pub fn p2(&self) -> Result<P2Family, CliError> {
        let Some(input) = &self.p2 else {
            return Ok(P2Family::remark());
        };
        if let Some(j) = input.json() {
            return serde_json::from_str(j).map_err(|e| cfg_err("p2", e));
        }
        let (p, q) = input
            .0
            .split_once(',')
            .ok_or_else(|| CliError::Config("p2: expected \"P(x), Q(x)\"".into()))?;
        let one = |s: &str| -> Result<Vec<Rat>, CliError> {
            let f = expr::parse(s).map_err(|e| cfg_err("p2", e))?;
            if f.num.uses_param() || f.den.as_constant().is_none() {
                return Err(CliError::Config("p2: P and Q must be polynomials in x".into()));
            }
            Ok(f.num.univariate().coeffs().to_vec())
        };
        P2Family::new(one(p)?, one(q)?).map_err(|e| cfg_err("p2", e))
    }

    pub fn lambda_mu(&self) -> (Rat, Rat) {
        (self.lambda.clone().unwrap_or_else(Rat::zero), self.mu.clone().unwrap_or_else(Rat::zero))
    }

    /// Defaults to the second Remark point `[1:2:1]`.
    pub fn a_b(&self) -> (Rat, Rat) {
        (self.a.clone().unwrap_or_else(Rat::one), self.b.clone().unwrap_or_else(|| Rat::from_int(2)))
    }

    pub fn center(&self) -> Result<(f64, f64), CliError> {
        let s = self.center.as_deref().unwrap_or("0,0");
        let bad = || CliError::Config(format!("center: expected \"re,im\", got {s:?}"));
        let (re, im) = s.split_once(',').ok_or_else(bad)?;
        Ok((re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
    }

    pub fn univariate(&self, s: &Option<String>, name: &str, default: Option<&str>) -> Result<UniPoly, CliError> {
        let text = s.as_deref().or(default).ok_or_else(|| CliError::Config(format!("missing --{name}")))?;
        let f = expr::parse(text).map_err(|e| cfg_err(name, e))?;
        if f.den.as_constant().is_none() || (f.num.uses_param() && f.num.deg_x() > 0) {
            return Err(CliError::Config(format!("{name}: expected a polynomial in one variable")));
        }
        Ok(f.num.univariate())
    }
}

fn parse_start(s: &Input) -> Result<StartPoint, CliError> {
    if let Some(j) = s.json() {
        return serde_json::from_str(j).map_err(|e| cfg_err("start", e));
    }
    let f = expr::parse(&s.0).map_err(|e| cfg_err("start", e))?;
    if f.num.deg_x() > 0 || f.den.deg_x() > 0 {
        return Err(CliError::Config("start: expected an expression in l only".into()));
    }
    StartPoint::new(f.num.univariate(), f.den.univariate()).map_err(|e| cfg_err("start", e))
}
