//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use arithdyn::algebra::{ln_biguint, BinaryForm, Rat, UniPoly};
use arithdyn::family::{
    check_degree_law, find_preperiodic_params, Caps, IterPair, MapFamily, StartPoint,
};
use arithdyn::heights::{canonical_height, weil_height, Place};
use arithdyn::maps::RationalMap;
use arithdyn::metrics::{convergence_report, ff_canonical_height, sample_region, specialization_check, symmetric_integers, Region};
use arithdyn::p2family::{p2_counterexample_check, p2_iterate_symbolic, p2_orbit_detect, P2Family};
use arithdyn::proj::{ProjPointP1, ProjPointP2};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

const SEED: u64 = 20_241_014;

struct Outcome {
    pass: bool,
    detail: String,
    /// Deterministic record of everything the criterion computed.
    artifact: String,
}

fn outcome(pass: bool, detail: String, artifact: String) -> Outcome {
    Outcome { pass, detail, artifact }
}

// ---------------------------------------------------------------- 1 + 2

fn corpus(seed: u64) -> Vec<(MapFamily, StartPoint)> {
    let mut rng = common::rng(seed);
    (0..24)
        .map(|_| {
            let fam = common::random_family(&mut rng, 5);
            let start = common::random_start(&mut rng, &fam);
            (fam, start)
        })
        .collect()
}

/// Larger than the library default; still keeps every level under a few seconds.
const DEGREE_LAW_CAPS: Caps = Caps { max_degree: 20_000, max_bits: 40_000_000 };

fn degree_law(seed: u64) -> Outcome {
    let mut full = 0;
    let mut truncated = vec![];
    let mut failures = vec![];
    let mut art = String::new();
    let fams = corpus(seed);
    for (i, (fam, start)) in fams.iter().enumerate() {
        assert!(Rat::from_int(start.d_c()) > fam.m());
        let mut pair = IterPair::new(start);
        let reached = match pair.extend_to(fam, 6, DEGREE_LAW_CAPS) {
            Ok(()) => {
                full += 1;
                6
            }
            Err(arithdyn::Error::ResourceLimit { .. }) => {
                truncated.push(pair.depth());
                pair.depth()
            }
            Err(e) => {
                failures.push(format!("family {i}: {e}"));
                continue;
            }
        };
        match check_degree_law(fam, &pair) {
            Ok(rep) if rep.holds() => {}
            Ok(rep) => failures.push(format!("family {i}: violations at {:?}", rep.violations)),
            Err(e) => failures.push(format!("family {i}: {e}")),
        }
        art.push_str(&format!("{i} d={} reached={reached}\n", fam.d()));
    }
    let min_reached = truncated.iter().copied().min().unwrap_or(6);
    let pass = failures.is_empty() && fams.len() >= 20 && min_reached >= 2;
    let detail = format!(
        "{} families (d ≤ 5), {full} exact through n = 6, {} stopped at the size caps (deepest level ≥ {min_reached}){}",
        fams.len(),
        truncated.len(),
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    outcome(pass, detail, art)
}

/// `(i, j, k)` ↦ coefficient of `X^i Y^j λ^k`.
type Tri = BTreeMap<(usize, usize, usize), Rat>;

fn tri(f: &BinaryForm<UniPoly>) -> Tri {
    let mut out = Tri::new();
    for (i, c) in f.coeffs.iter().enumerate() {
        for (k, a) in c.coeffs().iter().enumerate() {
            if !a.is_zero() {
                out.insert((i, f.deg - i, k), a.clone());
            }
        }
    }
    out
}

fn tri_mul_add(acc: &mut Tri, a: &Tri, b: &Tri) {
    for (ka, va) in a {
        for (kb, vb) in b {
            let key = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
            let e = acc.entry(key).or_insert_with(Rat::zero);
            *e = &*e + &(va * vb);
        }
    }
    acc.retain(|_, v| !v.is_zero());
}

fn bezout_suite(seed: u64) -> Outcome {
    let fams = corpus(seed);
    let mut bad = vec![];
    let mut art = String::new();
    for (i, (fam, _)) in fams.iter().enumerate() {
        let Some(cert) = fam.certificate() else {
            bad.push(format!("family {i}: no certificate"));
            continue;
        };
        let (p, q) = fam.homogeneous_forms();
        let (tp, tq) = (tri(&p), tri(&q));
        let mut lhs1 = Tri::new();
        tri_mul_add(&mut lhs1, &tri(&cert.s), &tp);
        tri_mul_add(&mut lhs1, &tri(&cert.t_coef), &tq);
        let mut lhs2 = Tri::new();
        tri_mul_add(&mut lhs2, &tri(&cert.u), &tp);
        tri_mul_add(&mut lhs2, &tri(&cert.v), &tq);
        let want1: Tri = [((cert.t, 0, 0), Rat::one())].into_iter().collect();
        let want2: Tri = [((0, cert.t, 0), Rat::one())].into_iter().collect();
        if lhs1 != want1 || lhs2 != want2 {
            bad.push(format!("family {i}: identity fails at t = {}", cert.t));
        }
        art.push_str(&format!("{i} t={}\n", cert.t));
    }
    outcome(bad.is_empty(), format!("{} certificate pairs expanded exactly{}", fams.len(), join_fail(&bad)), art)
}

fn join_fail(v: &[String]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!("; {}", v.join("; "))
    }
}

// ---------------------------------------------------------------- 3

/// Integer roots of `f^n(0) - f^m(0)` for `x² + λ`, from direct expansion over Z.
fn gleason_oracle(max_pre: usize, max_per: usize) -> BTreeSet<i64> {
    let mut orbit: Vec<Vec<BigInt>> = vec![vec![]];
    for _ in 0..max_pre + max_per {
        let a = orbit.last().unwrap();
        let mut sq = vec![BigInt::zero(); (2 * a.len()).max(2)];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in a.iter().enumerate() {
                sq[i + j] += x * y;
            }
        }
        sq[1] += 1;
        while sq.last().is_some_and(Zero::is_zero) {
            sq.pop();
        }
        orbit.push(sq);
    }
    let mut roots = BTreeSet::new();
    for m in 0..=max_pre {
        for n in m + 1..=m + max_per {
            let mut g = orbit[n].clone();
            g.resize(g.len().max(orbit[m].len()), BigInt::zero());
            for (k, c) in orbit[m].iter().enumerate() {
                g[k] -= c;
            }
            let shift = g.iter().take_while(|c| c.is_zero()).count();
            if shift > 0 {
                roots.insert(0);
            }
            let g = &g[shift..];
            let c0 = g[0].abs();
            // monic: integer roots divide the constant term and are bounded by 1 + max|c|
            let cauchy: BigInt = BigInt::from(1) + g.iter().map(|c| c.abs()).max().unwrap();
            let bound: i64 = cauchy.min(c0.clone()).to_string().parse().expect("root bound fits in i64");
            assert!(bound <= 10_000_000, "root search bound {bound} too large");
            for r in 1..=bound {
                if !(&c0 % BigInt::from(r)).is_zero() {
                    continue;
                }
                for s in [r, -r] {
                    let v = g.iter().rev().fold(BigInt::zero(), |acc, c| acc * s + c);
                    if v.is_zero() {
                        roots.insert(s);
                    }
                }
            }
        }
    }
    roots
}

fn gleason() -> Outcome {
    let fam = MapFamily::unicritical(2);
    let start = StartPoint::constant(&Rat::zero());
    let roots = match find_preperiodic_params(&fam, &start, 3, 3, Caps::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string(), String::new()),
    };
    let rational: BTreeSet<Rat> = roots.iter().filter_map(|r| r.value.as_rat().cloned()).collect();
    let want: BTreeSet<Rat> = [0, -1, -2].into_iter().map(Rat::from_int).collect();
    let verified = roots.iter().filter(|r| r.value.as_rat().is_some()).all(|r| {
        let x = r.value.as_rat().unwrap();
        r.verified && fam.specialize(x).unwrap().orbit_detect(&ProjPointP1::affine(&Rat::zero())).is_preperiodic()
    });
    let oracle: BTreeSet<Rat> = gleason_oracle(3, 3).into_iter().map(Rat::from_int).collect();
    let pass = rational == want && verified && oracle == want;
    let art = format!("{rational:?} {} roots total", roots.len());
    outcome(
        pass,
        format!("rational parameters {rational:?}, orbit-verified {verified}, brute-force oracle {oracle:?}"),
        art,
    )
}

// ---------------------------------------------------------------- 4

fn heights(seed: u64) -> Outcome {
    let mut rng = common::rng(seed ^ 4);
    let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
    let mut worst = 0.0f64;
    let mut art = String::new();
    for _ in 0..100 {
        let x = Rat::frac(rng.gen_range(-10_000..=10_000), rng.gen_range(1..=10_000));
        let h = canonical_height(&sq, &x, 1e-10).unwrap();
        worst = worst.max((h.value - weil_height(&x)).abs());
        art.push_str(&format!("{x} {:.12e}\n", h.value));
    }
    // x² + 2 at 2 against h(v_20)/2^20
    let f = RationalMap::from_ints(&[2, 0, 1], &[1]).unwrap();
    let mut v = BigInt::from(2);
    for _ in 0..20 {
        v = &v * &v + 2;
    }
    let naive = ln_biguint(v.magnitude()) / 2f64.powi(20);
    let h2 = canonical_height(&f, &Rat::from_int(2), 1e-10).unwrap();
    let naive_err = (h2.value - naive).abs();
    let pre = [
        (RationalMap::from_ints(&[-2, 0, 1], &[1]).unwrap(), vec![0, 2, -2, -1, 1]),
        (RationalMap::from_ints(&[-1, 0, 1], &[1]).unwrap(), vec![0, -1, 1]),
        (RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap(), vec![0, 1, -1]),
    ];
    let mut pre_ok = true;
    for (m, xs) in &pre {
        for &x in xs {
            let h = canonical_height(m, &Rat::from_int(x), 1e-10).unwrap();
            pre_ok &= h.value.abs() <= h.error_radius;
        }
    }
    art.push_str(&format!("{:.12e}\n", h2.value));
    let pass = worst <= 1e-9 && naive_err <= 1e-6 && pre_ok;
    outcome(
        pass,
        format!(
            "max |ĥ_x²(x) - h(x)| = {worst:.1e} over 100 rationals; |ĥ_{{x²+2}}(2) - h(v_20)/2^20| = {naive_err:.1e}; preperiodic inputs within radius: {pre_ok}"
        ),
        art,
    )
}

// ---------------------------------------------------------------- 5

fn orbit_soundness(seed: u64) -> Outcome {
    let mut rng = common::rng(seed ^ 5);
    let mut cases = 0;
    let mut pre = 0;
    let mut disagreements = vec![];
    let mut art = String::new();
    while cases < 200 {
        let d = rng.gen_range(2..=3);
        let p: Vec<i64> = (0..=d).map(|k| if k == d { 1 } else { rng.gen_range(-2..=2) }).collect();
        let rational = rng.gen_bool(0.3);
        let q: Vec<i64> = if rational { vec![rng.gen_range(1..=3), rng.gen_range(-1..=1)] } else { vec![1] };
        let Ok(map) = RationalMap::from_ints(&p, &q) else { continue };
        let x = Rat::frac(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        let pt = ProjPointP1::affine(&x);
        let orbit = map.orbit_detect(&pt);
        let h = match arithdyn::heights::canonical_height_point(&map, &pt, 1e-10) {
            Ok(h) => h,
            Err(e) => {
                disagreements.push(format!("{p:?}/{q:?} at {x}: {e}"));
                cases += 1;
                continue;
            }
        };
        let zero = h.value.abs() <= h.error_radius;
        let positive = h.value > 10.0 * h.error_radius;
        let ok = if orbit.is_preperiodic() { zero } else { positive };
        if orbit.is_preperiodic() {
            pre += 1;
        }
        if !ok {
            disagreements.push(format!("{p:?}/{q:?} at {x}: preperiodic={} ĥ={:e}±{:e}", orbit.is_preperiodic(), h.value, h.error_radius));
        }
        art.push_str(&format!("{p:?} {q:?} {x} {} {:.10e}\n", orbit.is_preperiodic(), h.value));
        cases += 1;
    }
    outcome(
        disagreements.is_empty(),
        format!("{cases} cases ({pre} preperiodic), {} disagreements{}", disagreements.len(), join_fail(&disagreements)),
        art,
    )
}

// ---------------------------------------------------------------- 6

/// Least-squares slope of `ln sup_n` against `n`, exponentiated.
fn fitted_ratio(sups: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = sups.iter().map(|&(n, s)| (n as f64, s.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (num / den).exp()
}

fn metric_convergence() -> Outcome {
    let fam = MapFamily::unicritical(2);
    let c = StartPoint::poly(UniPoly::from_ints(&[0, 1]));
    let mut sample = sample_region(Region::U(4.0), Place::Arch, 400).unwrap();
    sample.extend(sample_region(Region::U(100.0), Place::Arch, 20).unwrap());
    let rep = convergence_report(&fam, &c, Place::Arch, &sample, 12).unwrap();
    let tail: Vec<(usize, f64)> = rep.per_n.iter().filter(|r| r.n >= 3).map(|r| (r.n, r.sup)).collect();
    let ratio = fitted_ratio(&tail);
    let geometric = (0.4..=0.6).contains(&ratio) && rep.skipped.is_empty();
    let good = sample_region(Region::U(9.0), Place::Prime(3), 20).unwrap();
    let good_rep = convergence_report(&fam, &c, Place::Prime(3), &good, 8).unwrap();
    let exact_zero = good_rep.per_n.len() == 8 && good_rep.per_n.iter().all(|r| r.sup == 0.0) && good_rep.skipped.is_empty();
    let art = serde_json::to_string(&(&rep, &good_rep)).unwrap();
    outcome(
        geometric && exact_zero,
        format!(
            "archimedean sup differences: fitted ratio {ratio:.4} for n ≥ 3 (target [0.4, 0.6]); at p = 3 all sups exactly 0 for n < 8: {exact_zero}"
        ),
        art,
    )
}

// ---------------------------------------------------------------- 7

/// Mann–Kendall `S` and its null standard deviation (no ties correction).
fn mann_kendall(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (xs[j] - xs[i]).signum() * ((xs[j] - xs[i]).abs() > 1e-12) as i32 as f64;
        }
    }
    let nf = n as f64;
    (s, (nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0).sqrt())
}

fn specialization() -> Outcome {
    let fam = MapFamily::unicritical(2);
    let c = StartPoint::poly(UniPoly::from_ints(&[0, 1]));
    let hff = ff_canonical_height(&fam, &c).unwrap();
    let rep = specialization_check(&fam, &c, &symmetric_integers(50), 1e-10).unwrap();
    // doubling windows of |λ|: [1,2), [2,4), ..., [32, 64)
    let mut windows: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for r in &rep.rows {
        let a = r.lambda.abs().floor().to_string().parse::<u64>().unwrap();
        windows.entry(63 - a.leading_zeros()).or_default().push(r.error);
    }
    let means: Vec<f64> = windows.values().map(|v| v.iter().sum::<f64>() / v.len() as f64).collect();
    let (s, sd) = mann_kendall(&means);
    let pass = hff == Rat::one() && rep.skipped.is_empty() && rep.rows.len() == 100 && s <= sd;
    let art = serde_json::to_string(&rep).unwrap();
    outcome(
        pass,
        format!(
            "ĥ_f(c) = {hff}; window means of |ĥ - h(λ)| {:?}; Mann–Kendall S = {s} (noise sd {sd:.2}); sup error {:.4}",
            means.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            rep.sup_error
        ),
        art,
    )
}

// ---------------------------------------------------------------- 8

fn p2_suite() -> Outcome {
    let mut art = String::new();
    let mut ce_ok = true;
    for k in 1..=12 {
        let r = p2_counterexample_check(k).unwrap();
        ce_ok &= r.passed;
        art.push_str(&serde_json::to_string(&r).unwrap());
    }
    let fam = P2Family::remark();
    let deg_ok = match p2_iterate_symbolic(&fam, &Rat::one(), &Rat::from_int(2), 4, &Caps::default()) {
        Ok(pair) => (1..=4).all(|n| {
            let (a, b) = pair.level(n).unwrap();
            let want = Some(3u32.pow(n as u32 - 1));
            a.total_degree() == want && b.total_degree() == want
        }),
        Err(_) => false,
    };
    let z = Rat::zero();
    let c1 = ProjPointP2::new(z.clone(), Rat::one(), Rat::one()).unwrap();
    let c2 = ProjPointP2::new(Rat::one(), Rat::from_int(2), Rat::one()).unwrap();
    let r1 = p2_orbit_detect(&fam, &z, &z, &c1);
    let r2 = p2_orbit_detect(&fam, &z, &z, &c2);
    let split = r1.is_preperiodic() && !r2.is_preperiodic();
    art.push_str(&serde_json::to_string(&(&r1.kind, &r2.kind)).unwrap());
    outcome(
        ce_ok && deg_ok && split,
        format!(
            "quotient-ring checks k = 1..12: {ce_ok}; deg A_n = deg B_n = 3^(n-1) for n ≤ 4: {deg_ok}; at (0,0) [0:1:1] preperiodic and [1:2:1] wandering: {split}"
        ),
        art,
    )
}

// ---------------------------------------------------------------- driver

type Suite<'a> = (&'a str, Box<dyn Fn() -> Outcome>);

fn main() {
    let limits = [60u64, 30, 10, 30, 120, 60, 60, 60];
    let suites: Vec<Suite> = vec![
        ("degree law", Box::new(|| degree_law(SEED))),
        ("bezout certificates", Box::new(|| bezout_suite(SEED))),
        ("gleason exactness", Box::new(gleason)),
        ("canonical heights", Box::new(|| heights(SEED))),
        ("orbit soundness", Box::new(|| orbit_soundness(SEED))),
        ("metric convergence", Box::new(metric_convergence)),
        ("specialization", Box::new(specialization)),
        ("P² suite", Box::new(p2_suite)),
    ];
    let mut all = true;
    let mut artifacts = vec![];
    for (i, ((name, run), limit)) in suites.iter().zip(limits).enumerate() {
        let t = Instant::now();
        let o = run();
        let el = t.elapsed();
        let in_time = el <= Duration::from_secs(limit);
        let pass = o.pass && in_time;
        all &= pass;
        println!(
            "[{}] criterion {} ({name}): {} [{:.2} s, limit {limit} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            el.as_secs_f64()
        );
        artifacts.push(o.artifact);
    }
    let t = Instant::now();
    let again: Vec<String> = suites.iter().map(|(_, run)| run().artifact).collect();
    let same = again == artifacts;
    all &= same;
    println!(
        "[{}] criterion 9 (determinism): second run of suites 1-8 with seed {SEED} gives byte-identical artifacts ({} bytes) [{:.2} s]",
        if same { "PASS" } else { "FAIL" },
        artifacts.iter().map(String::len).sum::<usize>(),
        t.elapsed().as_secs_f64()
    );
    if !all {
        std::process::exit(1);
    }
}
