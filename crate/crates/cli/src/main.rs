mod config;
mod expr;
mod plot;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use arithdyn::family::{
    check_degree_law, correlation_experiment, find_preperiodic_params, pcf_experiment, IterPair,
};
use arithdyn::heights::canonical_height_point;
use arithdyn::metrics::{convergence_report, ratio_bounds_report, sample_region, specialization_check, symmetric_integers};
use arithdyn::p2family::{p2_counterexample_check, p2_iterate_symbolic, p2_ratio_report, p2_theta_check};
use arithdyn::Error;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use config::Params;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("partial output: {0}")]
    Partial(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Validation(_) => "validation",
            CliError::Core(e) => match e {
                Error::InvalidArgument(_) => "invalid_argument",
                Error::Precondition(_) => "precondition",
                Error::NoCertificate(_) => "no_certificate",
                Error::NumericFailure { .. } => "numeric_failure",
                Error::ResourceLimit { .. } => "resource_limit",
                Error::HypothesisNotMet(_) => "hypothesis_not_met",
                Error::DegreeStagnation { .. } => "degree_stagnation",
                Error::InvariantViolation(_) => "invariant_violation",
                Error::Unsupported(_) => "unsupported",
                Error::UndefinedRatio(_) => "undefined_ratio",
            },
            CliError::Partial(_) => "resource_limit",
            CliError::Io(_) => "io",
            CliError::Check(_) => "invariant_violation",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Validation(_) => 2,
            CliError::Core(Error::ResourceLimit { .. } | Error::NumericFailure { .. }) | CliError::Partial(_) => 3,
            CliError::Core(Error::InvariantViolation(_)) | CliError::Check(_) => 4,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "arithdyn", version, about = "Exact iteration, canonical heights and parameter experiments for rational maps")]
struct Cli {
    /// JSON file with any of the flag fields; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the family hypotheses
    Validate,
    /// Orbit of --point under --map until it repeats or leaves the height box
    Orbit,
    /// Canonical height of --point under --map
    Height,
    /// Symbolic iterates (A_n, B_n) of the start point and the degree law
    FamilyIterate,
    /// Parameters where the start point is preperiodic
    FindParams,
    /// Classify the second start point at parameters where the first is preperiodic
    Correlate,
    /// Correlate critical orbits of f(z) + x(t) and g(z) + y(t)
    Pcf,
    /// Ratio bounds and convergence of the metric sequence at one place
    MetricsReport,
    /// Specialized heights against the function-field height
    Specialize,
    /// The two-parameter family on P²
    P2 {
        #[command(subcommand)]
        cmd: P2Cmd,
    },
    /// Grayscale PGM of the archimedean escape rate over a window of complex parameters
    Plot,
}

#[derive(Subcommand)]
enum P2Cmd {
    Step,
    Iterate,
    Height,
    Ratios,
    Counterexample,
}

/// Writes `<name>.json` (and `<name>.csv`) under `--out`, or prints the JSON.
struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn json<T: Serialize>(&self, name: &str, v: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(v).map_err(std::io::Error::from)? + "\n";
        match &self.dir {
            Some(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(format!("{name}.json")), text)?;
            }
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<()> {
        let Some(d) = &self.dir else { return Ok(()) };
        fs::create_dir_all(d)?;
        let mut w = csv::Writer::from_path(d.join(format!("{name}.csv"))).map_err(std::io::Error::from)?;
        for r in rows {
            w.serialize(r).map_err(std::io::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One root of `find-params`, flat so the CSV and JSON carry the same fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRow {
    pub lambda: String,
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub verified: bool,
    pub error: String,
}

#[derive(Serialize, Deserialize)]
struct MetricsRow {
    n: usize,
    ratio_min: Option<f64>,
    ratio_max: Option<f64>,
    sup: Option<f64>,
}

#[derive(Serialize)]
struct Level<'a> {
    n: usize,
    deg_a: usize,
    deg_b: usize,
    a: &'a arithdyn::algebra::UniPoly,
    b: &'a arithdyn::algebra::UniPoly,
}

fn run(cmd: &Cmd, p: &Params) -> Result<()> {
    let sink = Sink { dir: p.out.clone() };
    match cmd {
        Cmd::Validate => {
            let fam = p.raw_family()?;
            let report = fam.validate();
            sink.json("validate", &report)?;
            if !report.passed() {
                return Err(CliError::Validation(report.failures().join("; ")));
            }
        }
        Cmd::Orbit => {
            let map = p.map()?;
            let pt = p.point_p1()?;
            sink.json("orbit", &map.orbit_detect(&pt))?;
        }
        Cmd::Height => {
            let map = p.map()?;
            let pt = p.point_p1()?;
            sink.json("height", &canonical_height_point(&map, &pt, p.tol())?)?;
        }
        Cmd::FamilyIterate => {
            let (fam, start) = p.family()?;
            fam.require_valid()?;
            let mut pair = IterPair::new(&start);
            let stop = pair.extend_to(&fam, p.n_max(4), p.caps()).err();
            let levels: Vec<Level> = pair
                .levels()
                .iter()
                .enumerate()
                .map(|(n, (a, b))| Level { n, deg_a: a.deg0(), deg_b: b.deg0(), a, b })
                .collect();
            let law = check_degree_law(&fam, &pair).ok();
            #[derive(Serialize)]
            struct Out<'a> {
                levels: Vec<Level<'a>>,
                degree_law: Option<arithdyn::family::DegreeLawReport>,
                truncated: Option<String>,
            }
            let truncated = stop.as_ref().map(|e| e.to_string());
            sink.json("family_iterate", &Out { levels, degree_law: law, truncated })?;
            match stop {
                Some(Error::ResourceLimit { what, .. }) => return Err(CliError::Partial(what)),
                Some(e) => return Err(e.into()),
                None => {}
            }
        }
        Cmd::FindParams => {
            let (fam, start) = p.family()?;
            let b = p.bounds();
            let roots = find_preperiodic_params(&fam, &start, b.max_pre, b.max_per, b.caps)?;
            let rows: Vec<ParamRow> = roots
                .iter()
                .map(|r| ParamRow {
                    lambda: r.value.repr(),
                    kind: r.value.kind().into(),
                    m: r.m,
                    n: r.n,
                    verified: r.verified,
                    error: r.error.clone().unwrap_or_default(),
                })
                .collect();
            sink.csv("find_params", &rows)?;
            sink.json("find_params", &rows)?;
        }
        Cmd::Correlate => {
            let (f1, c1) = p.family()?;
            let (f2, c2) = p.family2()?;
            let rep = correlation_experiment(&f1, &c1, &f2, &c2, &p.bounds())?;
            sink.csv("correlate", &rep.csv_rows())?;
            sink.json("correlate", &rep)?;
        }
        Cmd::Pcf => {
            let f = p.univariate(&p.f, "f", None)?;
            let g = p.univariate(&p.g, "g", None)?;
            let x = p.univariate(&p.x_of_t, "x-of-t", Some("t"))?;
            let y = p.univariate(&p.y_of_t, "y-of-t", Some("t"))?;
            sink.json("pcf", &pcf_experiment(&f, &g, &x, &y, &p.bounds())?)?;
        }
        Cmd::MetricsReport => {
            let (fam, start) = p.family()?;
            let place = p.place()?;
            let region = p.region()?;
            let n_max = p.n_max(8);
            let ratios = ratio_bounds_report(&fam, &start, place, region, p.sample_size(), n_max)?;
            let sample = sample_region(region, place, p.sample_size())?;
            let conv = convergence_report(&fam, &start, place, &sample, n_max)?;
            let finite = |x: f64| x.is_finite().then_some(x);
            let rows: Vec<MetricsRow> = (0..n_max)
                .map(|n| MetricsRow {
                    n,
                    ratio_min: ratios.per_n.get(n).and_then(|r| finite(r.min)),
                    ratio_max: ratios.per_n.get(n).and_then(|r| finite(r.max)),
                    sup: conv.per_n.get(n).map(|r| r.sup),
                })
                .collect();
            #[derive(Serialize)]
            struct Out {
                ratios: arithdyn::metrics::RatioReport,
                convergence: arithdyn::metrics::ConvergenceReport,
            }
            sink.csv("metrics", &rows)?;
            sink.json("metrics", &Out { ratios, convergence: conv })?;
        }
        Cmd::Specialize => {
            let (fam, start) = p.family()?;
            let lambdas = symmetric_integers(p.range.unwrap_or(10));
            let rep = specialization_check(&fam, &start, &lambdas, p.tol())?;
            sink.csv("specialize", &rep.rows)?;
            sink.json("specialize", &rep)?;
        }
        Cmd::P2 { cmd } => run_p2(cmd, p, &sink)?,
        Cmd::Plot => {
            let (fam, start) = p.family()?;
            fam.require_valid()?;
            let (re, im) = p.center()?;
            let window = plot::Window { center_re: re, center_im: im, width: p.width.unwrap_or(4.0) };
            let grid = plot::compute(&fam, &start, window, p.resolution.unwrap_or(64), p.tol.unwrap_or(1e-4));
            let dir = p.out.clone().unwrap_or_else(|| PathBuf::from("."));
            plot::emit(&grid, &dir, "plot", p.seed())?;
        }
    }
    Ok(())
}

fn run_p2(cmd: &P2Cmd, p: &Params, sink: &Sink) -> Result<()> {
    match cmd {
        P2Cmd::Step => {
            let (l, m) = p.lambda_mu();
            let map = p.p2()?.specialize(&l, &m);
            sink.json("p2_step", &map.step(&p.point_p2()?)?)?;
        }
        P2Cmd::Iterate => {
            let fam = p.p2()?;
            let (a, b) = p.a_b();
            let n = p.n_max(3);
            let caps = p.caps();
            let mut pair = p2_iterate_symbolic(&fam, &a, &b, n, &caps)?;
            let theta = p2_theta_check(&fam, &mut pair, n, &caps)?;
            #[derive(Serialize)]
            struct Out {
                theta: arithdyn::p2family::ThetaReport,
                passed: bool,
            }
            let passed = theta.passed();
            sink.json("p2_iterate", &Out { theta, passed })?;
            if !passed {
                return Err(CliError::Check("top forms disagree with the closed form".into()));
            }
        }
        P2Cmd::Height => {
            let (l, m) = p.lambda_mu();
            let map = p.p2()?.specialize(&l, &m);
            sink.json("p2_height", &map.canonical_height(&p.point_p2()?, p.tol())?)?;
        }
        P2Cmd::Ratios => {
            let fam = p.p2()?;
            let (a, b) = p.a_b();
            let place = p.place()?;
            let rep = p2_ratio_report(&fam, &a, &b, place, p.l.unwrap_or(4.0), p.sample_size(), p.n_max(5), p.seed())?;
            sink.json("p2_ratios", &rep)?;
        }
        P2Cmd::Counterexample => {
            let rep = p2_counterexample_check(p.k.unwrap_or(3))?;
            sink.json("p2_counterexample", &rep)?;
            if !rep.passed {
                return Err(CliError::Check(format!("counterexample check failed for k = {}", rep.k)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let base = match &cli.config {
            Some(path) => Params::load(path)?,
            None => Params::default(),
        };
        let params = cli.params.clone().over(base);
        params.validate()?;
        if let Some(n) = params.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("threads: {e}")))?;
        }
        run(&cli.cmd, &params)
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{diag}");
            ExitCode::from(e.exit_code())
        }
    }
}
