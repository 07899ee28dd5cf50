//! Canonical heights at algebraic points: the archimedean part from a complex escape
//! rate at every conjugate, the nonarchimedean part from the content of the norm
//! polynomial `N(x B_n - A_n)`, computed exactly in `Q[t]/(m)`.

use num_complex::Complex64;

use super::{HeightResult, Place};
use crate::algebra::linalg::det_bareiss;
use crate::algebra::roots::isolate_roots;
use crate::algebra::{Rat, UniPoly};
use crate::error::{Error, Result};
use crate::homog::ComplexMap;

pub(crate) const DEFAULT_BIT_CAP: u64 = 1_000_000;
const MAX_LEVELS: usize = 64;

pub(crate) struct AlgOrbit<'a> {
    /// Squarefree defining polynomial of the conjugate set.
    pub m: &'a UniPoly,
    /// `p[i]`, `q[i]`: coefficients of `X^i Y^(d-i)`, as polynomials in `t`.
    pub p: &'a [UniPoly],
    pub q: &'a [UniPoly],
    pub a: &'a UniPoly,
    pub b: &'a UniPoly,
    /// Archimedean `(lower, upper)` for the map specialized at a conjugate.
    pub bounds: &'a dyn Fn(Complex64) -> (f64, f64),
    pub tol: f64,
    pub bit_cap: u64,
}

fn reduce(f: &UniPoly, m: &UniPoly) -> UniPoly {
    f.rem(m).expect("modulus is nonzero")
}

fn mul_mod(f: &UniPoly, g: &UniPoly, m: &UniPoly) -> UniPoly {
    reduce(&(f * g), m)
}

/// Positive rational with `(a, b) / content` primitive integral.
fn pair_content(a: &UniPoly, b: &UniPoly) -> Rat {
    let mut all = a.coeffs().to_vec();
    all.extend_from_slice(b.coeffs());
    UniPoly::new(all).integer_primitive().0.abs()
}

/// `det(x M_b - M_a)` for multiplication matrices modulo the monic `m`.
fn norm_poly(a: &UniPoly, b: &UniPoly, m: &UniPoly) -> UniPoly {
    let n = m.deg0();
    let mut mat = vec![vec![UniPoly::zero(); n]; n];
    let mut basis = UniPoly::one();
    for j in 0..n {
        let ca = mul_mod(a, &basis, m);
        let cb = mul_mod(b, &basis, m);
        for (i, row) in mat.iter_mut().enumerate() {
            row[j] = UniPoly::new(vec![-ca.coeff(i), cb.coeff(i)]);
        }
        basis = basis.shift(1);
    }
    det_bareiss(&mat)
}

fn arch_part(o: &AlgOrbit, d: usize, tol: f64) -> Result<(f64, f64)> {
    let roots = isolate_roots(o.m)?;
    let mut sum = 0.0;
    let mut rad = 0.0;
    for r in &roots {
        let z = r.center();
        let forms = [o.p, o.q]
            .iter()
            .map(|cs| {
                cs.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (vec![i as u32, (d - i) as u32], c.eval_c64(z)))
                    .collect()
            })
            .collect();
        let cmap = ComplexMap::new(d as u32, forms);
        let w = [o.a.eval_c64(z), o.b.eval_c64(z)];
        let norm = w[0].norm().max(w[1].norm());
        if !(norm > 0.0) {
            return Err(Error::invalid("start point vanishes at a conjugate"));
        }
        let (lo, up) = (o.bounds)(z);
        let (v, e) = cmap.escape(norm.ln(), w.iter().map(|x| x / norm).collect(), lo - 1e-9, up + 1e-9, tol)?;
        sum += v;
        rad += e;
    }
    Ok((sum, rad))
}

pub(crate) fn alg_orbit_height(o: &AlgOrbit) -> Result<HeightResult> {
    let deg_m = o.m.degree().filter(|&k| k >= 1).ok_or_else(|| Error::invalid("defining polynomial of degree 0"))?;
    if !o.m.is_squarefree() {
        return Err(Error::precondition("defining polynomial is not squarefree"));
    }
    let d = o.p.len().max(o.q.len()) - 1;
    if d < 2 {
        return Err(Error::invalid("map degree below 2"));
    }
    let dd = deg_m as f64;
    let df = d as f64;
    let m = o.m.monic();
    let pc: Vec<UniPoly> = o.p.iter().map(|c| reduce(c, &m)).collect();
    let qc: Vec<UniPoly> = o.q.iter().map(|c| reduce(c, &m)).collect();

    let (arch, arch_rad) = arch_part(o, d, o.tol / 2.0)?;

    let mut a = reduce(o.a, &m);
    let mut b = reduce(o.b, &m);
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("start point vanishes on the conjugate set"));
    }
    let k0 = pair_content(&a, &b);
    let inv = k0.recip().unwrap();
    a = a.scale(&inv);
    b = b.scale(&inv);
    // t_acc = ln|sigma_n| / d^n with F^n(a, b) = sigma_n (A_n, B_n)
    let mut t_acc = k0.ln_abs();
    let mut weight = 1.0;
    let mut prev: Option<f64> = None;
    let mut prev_delta = f64::INFINITY;
    let mut best = (f64::NAN, f64::INFINITY);
    for n in 0..MAX_LEVELS {
        let r = norm_poly(&a, &b, &m);
        let c = r.integer_primitive().0.abs();
        let v = -c.ln_abs() * weight - dd * t_acc;
        let delta = prev.map_or(f64::INFINITY, |p| (v - p).abs());
        let radius = delta.max(prev_delta / df) * df / (df - 1.0);
        best = (v, radius);
        if n >= 2 && radius <= o.tol / 2.0 {
            let res = HeightResult::from_parts(
                vec![(Place::Arch, arch / dd, arch_rad / dd), (Place::Finite, v / dd, radius / dd)],
                false,
            );
            return Ok(res);
        }
        if a.bit_size() + b.bit_size() > o.bit_cap {
            break;
        }
        prev = Some(v);
        prev_delta = delta;
        // exact step (A, B) -> F(A, B) / kappa
        let mut pa = vec![UniPoly::one()];
        let mut pb = vec![UniPoly::one()];
        for i in 1..=d {
            pa.push(mul_mod(&pa[i - 1], &a, &m));
            pb.push(mul_mod(&pb[i - 1], &b, &m));
        }
        let apply = |cs: &[UniPoly]| {
            let mut acc = UniPoly::zero();
            for (i, c) in cs.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(c * &mul_mod(&pa[i], &pb[d - i], &m));
                }
            }
            reduce(&acc, &m)
        };
        let (na, nb) = (apply(&pc), apply(&qc));
        if na.is_zero() && nb.is_zero() {
            return Err(Error::invariant("orbit reached (0, 0) on the conjugate set"));
        }
        let kappa = pair_content(&na, &nb);
        let inv = kappa.recip().unwrap();
        a = na.scale(&inv);
        b = nb.scale(&inv);
        weight /= df;
        t_acc += kappa.ln_abs() * weight;
    }
    let partial = (arch + best.0) / dd;
    Err(Error::ResourceLimit {
        what: format!(
            "coefficient size cap {} bits reached with tail estimate {:.3e}",
            o.bit_cap,
            best.1 / dd
        ),
        partial: Some(partial),
    })
}

#[cfg(test)]
mod tests {
    use crate::algebra::{AlgNum, Rat, UniPoly};
    use crate::heights::{canonical_height, canonical_height_alg};
    use crate::maps::RationalMap;

    fn first_root(cs: &[i64]) -> AlgNum {
        AlgNum::roots_of(&UniPoly::from_ints(cs), true).unwrap().remove(0)
    }

    #[test]
    fn power_map_matches_weil() {
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        let h = canonical_height_alg(&sq, &first_root(&[-2, 0, 1]), 1e-9).unwrap();
        assert!((h.value - 0.5 * 2f64.ln()).abs() < 1e-8, "{h:?}");
        let h = canonical_height_alg(&sq, &first_root(&[-1, -1, 1]), 1e-9).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((h.value - 0.5 * phi.ln()).abs() < 1e-8, "{h:?}");
        assert!(!h.certified);
    }

    #[test]
    fn rational_nonarch_part() {
        // degree-2 conjugate set with a denominator: roots of 4t^2 - 2, i.e. ±1/sqrt 2
        let sq = RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap();
        let h = canonical_height_alg(&sq, &first_root(&[-1, 0, 2]), 1e-9).unwrap();
        assert!((h.value - 0.5 * 2f64.ln()).abs() < 1e-8, "{h:?}");
    }

    #[test]
    fn rational_input_dispatches() {
        let f = RationalMap::from_ints(&[2, 0, 1], &[1]).unwrap();
        let x = Rat::from_int(2);
        let a = canonical_height_alg(&f, &AlgNum::from_rat(&x), 1e-9).unwrap();
        let b = canonical_height(&f, &x, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quadratic_point_functoriality() {
        // the golden ratio is a repelling fixed point of x^2 - 1
        let f = RationalMap::from_ints(&[-1, 0, 1], &[1]).unwrap();
        let h = canonical_height_alg(&f, &first_root(&[-1, -1, 1]), 1e-9).unwrap();
        assert!(h.is_zero_within_radius() && h.error_radius < 0.05, "{h:?}");
        // x^2 + 1 moves it off to infinity
        let g = RationalMap::from_ints(&[1, 0, 1], &[1]).unwrap();
        let h = canonical_height_alg(&g, &first_root(&[-1, -1, 1]), 1e-9).unwrap();
        assert!(h.value - h.error_radius > 0.0, "{h:?}");
    }

    #[test]
    fn bad_reduction_matches_rational_image() {
        // f(±sqrt 2) = 7/3, so ĥ(sqrt 2) = ĥ(7/3) / 2
        let f = RationalMap::new(
            UniPoly::new(vec![Rat::frac(1, 3), Rat::zero(), Rat::one()]),
            UniPoly::one(),
        )
        .unwrap();
        let h = canonical_height_alg(&f, &first_root(&[-2, 0, 1]), 1e-9).unwrap();
        let img = canonical_height(&f, &Rat::frac(7, 3), 1e-10).unwrap();
        assert!((h.value - img.value / 2.0).abs() < 1e-8, "{} vs {}", h.value, img.value / 2.0);
    }
}
