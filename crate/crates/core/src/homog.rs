//! Homogeneous polynomial maps on projective space over Q and their local
//! escape rates `G_v(z) = lim d^-n log ||F^n(z)||_v`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::Rat;
use crate::error::{Error, Result};

/// A homogeneous form as `(exponents, coefficient)` terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub terms: Vec<(Vec<u32>, Rat)>,
}

impl Form {
    pub fn eval(&self, z: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (zi, &k) in z.iter().zip(e) {
                if k > 0 {
                    t *= &zi.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs().to_f64()).sum()
    }
}

/// Exact integer coefficients of the primitive rescaling.
#[derive(Clone, Debug)]
struct IntForm {
    terms: Vec<(Vec<u32>, BigInt)>,
}

impl IntForm {
    fn eval(&self, z: &[BigInt], modulus: Option<&BigInt>) -> BigInt {
        let maxdeg = self.terms.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0);
        let pows: Vec<Vec<BigInt>> = z
            .iter()
            .map(|zi| {
                let mut v = vec![BigInt::one()];
                for _ in 0..maxdeg {
                    let mut nx = v.last().unwrap() * zi;
                    if let Some(m) = modulus {
                        nx = nx.mod_floor(m);
                    }
                    v.push(nx);
                }
                v
            })
            .collect();
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                t *= &pows[i][k as usize];
                if let Some(m) = modulus {
                    t = t.mod_floor(m);
                }
            }
            acc += t;
        }
        match modulus {
            Some(m) => acc.mod_floor(m),
            None => acc,
        }
    }
}

/// Homogeneous map with complex coefficients, used for archimedean escape rates.
#[derive(Clone, Debug)]
pub struct ComplexMap {
    deg: u32,
    forms: Vec<Vec<(Vec<u32>, Complex64)>>,
    l1: Vec<f64>,
}

impl ComplexMap {
    pub fn new(deg: u32, forms: Vec<Vec<(Vec<u32>, Complex64)>>) -> Self {
        let l1 = forms.iter().map(|f| f.iter().map(|(_, c)| c.norm()).sum()).collect();
        ComplexMap { deg, forms, l1 }
    }

    pub fn eval(&self, w: &[Complex64]) -> Vec<Complex64> {
        self.forms
            .iter()
            .map(|f| {
                f.iter()
                    .map(|(e, c)| e.iter().zip(w).fold(*c, |acc, (&k, x)| acc * x.powu(k)))
                    .sum()
            })
            .collect()
    }

    /// `ln max_i ||F_i||_1`, an upper bound for `ln||F(w)|| - d ln||w||`.
    pub fn log_l1_upper(&self) -> f64 {
        self.l1.iter().copied().fold(0.0, f64::max).ln()
    }

    /// `G(z) = ln||z|| + Σ_k ln||F(w_k)|| / d^(k+1)` along the normalized orbit of
    /// `w_0 = z/||z||`, given `ln||z||`. `lower <= ln||F(w)|| <= upper` for `||w|| = 1`.
    pub fn escape(
        &self,
        ln_norm: f64,
        w0: Vec<Complex64>,
        lower: f64,
        upper: f64,
        tol: f64,
    ) -> Result<(f64, f64)> {
        if self.deg < 2 {
            return Err(Error::invalid("escape rate needs degree >= 2"));
        }
        if !(tol > 0.0) || !(lower <= upper) {
            return Err(Error::invalid("escape rate needs tol > 0 and lower <= upper"));
        }
        let d = self.deg as f64;
        let c_v = lower.abs().max(upper.abs()).max(1e-300);
        let steps = ((c_v / ((d - 1.0) * tol * 0.25)).ln() / d.ln()).ceil().max(1.0) as usize;
        let terms = self.forms.iter().map(Vec::len).max().unwrap_or(1);
        let gamma = 4.0 * (self.deg as usize + terms + 4) as f64 * f64::EPSILON;
        let l1max = self.l1.iter().copied().fold(0.0, f64::max);
        let err = gamma * l1max;
        let (lf, k) = lipschitz(self.deg, l1max, lower);
        let mut w = w0;
        let mut sum = ln_norm;
        let mut ledger = ln_norm.abs() * f64::EPSILON;
        let mut weight = 1.0 / d;
        // distance between the computed and the true normalized orbit
        let mut drift = 0.0;
        for _ in 0..steps {
            if drift > LIP_RANGE / d {
                break;
            }
            let img = self.eval(&w);
            let m = img.iter().fold(0.0f64, |a, x| a.max(x.norm()));
            let mut term = m.ln();
            let mut step_err = if m > 2.0 * err { 2.0 * err / m } else { upper - lower };
            if !term.is_finite() || term < lower || term > upper {
                term = if term.is_finite() { term.clamp(lower, upper) } else { 0.5 * (lower + upper) };
                step_err = step_err.max(upper - lower);
            }
            step_err += lf * drift * (-lower).exp();
            sum += weight * term;
            ledger += weight * (step_err + term.abs() * f64::EPSILON);
            if m > 0.0 && m.is_finite() {
                w = img.iter().map(|x| x / m).collect();
            }
            drift = k * drift + 2.0 * err * (-lower).exp() + 4.0 * f64::EPSILON;
            weight /= d;
        }
        let tail_scale = weight * d / (d - 1.0);
        sum += 0.5 * (lower + upper) * tail_scale;
        let half = 0.5 * (upper - lower) * tail_scale;
        let radius = (half + ledger) * (1.0 + 1e-12) + sum.abs() * 4.0 * f64::EPSILON;
        Ok((sum, radius))
    }
}

/// Perturbations up to `LIP_RANGE / d` of a unit vector stay in the region where
/// `(1 + η)^(d-1) <= 1.02`.
const LIP_RANGE: f64 = 0.01;

/// `(L_F, K)`: `||F(w') - F(w)|| <= L_F ||w' - w||` near the unit sphere, and `K` bounds the
/// same for the normalized map `w ↦ F(w)/||F(w)||` given `||F(w)|| >= e^lower`.
fn lipschitz(deg: u32, l1max: f64, lower: f64) -> (f64, f64) {
    let lf = deg as f64 * l1max * 1.02;
    (lf, 2.0 * lf * (-lower).exp())
}

/// `F = (F_0, …, F_n)`, all forms of degree `deg` in `n + 1` variables.
#[derive(Clone, Debug)]
pub struct HomogMap {
    dim: usize,
    deg: u32,
    forms: Vec<Form>,
    /// `scale * F` has coprime integer coefficients.
    scale: Rat,
    int_forms: Vec<IntForm>,
    complex: ComplexMap,
}

impl HomogMap {
    pub fn new(deg: u32, forms: Vec<Form>) -> Result<Self> {
        let dim = forms.len();
        if dim < 2 || deg < 1 {
            return Err(Error::invalid("need at least two forms of positive degree"));
        }
        for f in &forms {
            for (e, c) in &f.terms {
                if e.len() != dim || e.iter().sum::<u32>() != deg {
                    return Err(Error::invalid("form is not homogeneous of the map degree"));
                }
                if c.is_zero() {
                    return Err(Error::invalid("stored zero coefficient"));
                }
            }
        }
        let all: Vec<&Rat> = forms.iter().flat_map(|f| f.terms.iter().map(|(_, c)| c)).collect();
        if all.is_empty() {
            return Err(Error::invalid("zero map"));
        }
        let den = all.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = all.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&den / c.denom()))));
        let scale = Rat::new(den, num)?;
        let int_forms = forms
            .iter()
            .map(|f| IntForm {
                terms: f.terms.iter().map(|(e, c)| (e.clone(), (c * &scale).numer().clone())).collect(),
            })
            .collect();
        let complex = ComplexMap::new(
            deg,
            forms
                .iter()
                .map(|f| f.terms.iter().map(|(e, c)| (e.clone(), Complex64::new(c.to_f64(), 0.0))).collect())
                .collect(),
        );
        Ok(HomogMap { dim, deg, forms, scale, int_forms, complex })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// The rational `c` with `c F` primitive integral.
    pub fn scale(&self) -> &Rat {
        &self.scale
    }

    pub fn eval(&self, z: &[Rat]) -> Vec<Rat> {
        self.forms.iter().map(|f| f.eval(z)).collect()
    }

    /// `(c F)(z)` on integers.
    pub fn eval_int(&self, z: &[BigInt]) -> Vec<BigInt> {
        self.int_forms.iter().map(|f| f.eval(z, None)).collect()
    }

    pub fn complex_map(&self) -> &ComplexMap {
        &self.complex
    }

    /// `ln max_i ||F_i||_1`.
    pub fn log_l1_upper(&self) -> f64 {
        self.complex.log_l1_upper()
    }

    /// Archimedean escape rate with enclosure radius. `lower <= ln||F(w)|| - d ln||w|| <= upper`
    /// must hold for all `w`.
    pub fn arch_escape(&self, z: &[Rat], lower: f64, upper: f64, tol: f64) -> Result<(f64, f64)> {
        if self.deg < 2 {
            return Err(Error::invalid("escape rate needs degree >= 2"));
        }
        if !(tol > 0.0) || !(lower <= upper) {
            return Err(Error::invalid("escape rate needs tol > 0 and lower <= upper"));
        }
        let (ln_norm, _) = normalized_f64(z)?;
        let d = self.deg as f64;
        let c_v = lower.abs().max(upper.abs()).max(1e-300);
        let steps = ((c_v / ((d - 1.0) * tol * 0.25)).ln() / d.ln()).ceil().max(1.0) as usize;
        let l1max = self.complex.l1.iter().copied().fold(0.0, f64::max);
        let (lf, k) = lipschitz(self.deg, l1max, lower);
        let gain = lf * (-lower).exp();
        // fixed-point width: rounding noise, amplified by K per step, stays below tol
        let bits = 64.0 + steps as f64 * k.max(2.0).log2() + (gain.max(1.0) * steps as f64 / tol).log2().max(0.0);
        let prec = bits.ceil() as u64;
        let (_, lift) = primitive_lift(z, 2)?;
        let mut w = lift;
        let (snum, sden) = (self.scale.numer().abs(), self.scale.denom().clone());
        let mut sum = ln_norm;
        let mut ledger = ln_norm.abs() * f64::EPSILON;
        let mut weight = 1.0 / d;
        let mut drift = 0.0;
        for _ in 0..steps {
            if drift > LIP_RANGE / d {
                break;
            }
            let img = self.eval_int(&w);
            let m = img.iter().map(BigInt::abs).max().unwrap();
            let wn = w.iter().map(BigInt::abs).max().unwrap();
            let mut term = if m.is_zero() {
                f64::NEG_INFINITY
            } else {
                ln_ratio(&(&m * &sden), &(&wn.pow(self.deg) * &snum))
            };
            let mut step_err = gain * drift + 8.0 * f64::EPSILON * (1.0 + term.abs());
            if !term.is_finite() || term < lower - 1e-12 || term > upper + 1e-12 {
                return Err(Error::invariant(format!(
                    "ln||F(w)|| = {term} outside the certified range [{lower}, {upper}]"
                )));
            }
            if term < lower || term > upper {
                term = term.clamp(lower, upper);
                step_err += 1e-12;
            }
            sum += weight * term;
            ledger += weight * step_err;
            let shift = m.bits().saturating_sub(prec);
            w = img.iter().map(|x| round_shift(x, shift)).collect();
            let rounding = if shift > 0 { 4.0 * (-(prec as f64 - 1.0)).exp2() } else { 0.0 };
            drift = k * drift + rounding;
            weight /= d;
        }
        let tail_scale = weight * d / (d - 1.0);
        sum += 0.5 * (lower + upper) * tail_scale;
        let half = 0.5 * (upper - lower) * tail_scale;
        let radius = (half + ledger) * (1.0 + 1e-12) + sum.abs() * 4.0 * f64::EPSILON;
        Ok((sum, radius))
    }

    /// p-adic escape rate. `e_p` bounds `v_p` of `(cF)(z)` for primitive integral `z`.
    pub fn padic_escape(&self, z: &[Rat], p: u64, e_p: u64, tol: f64) -> Result<(f64, f64)> {
        let lnp = (p as f64).ln();
        let d = self.deg as f64;
        let (alpha_val, prim) = primitive_lift(z, p)?;
        // G_F = G_cF + v_p(c) log p / (d - 1); G(z) = G(z~) - log|alpha|_p
        let shift = (alpha_val as f64
            + self.scale.valuation(p).unwrap() as f64 / (d - 1.0))
            * lnp;
        if e_p == 0 {
            return Ok((shift, shift.abs() * 4.0 * f64::EPSILON));
        }
        let steps = ((e_p as f64 * lnp / ((d - 1.0) * tol)).ln() / d.ln()).ceil().max(1.0) as usize;
        let pb = BigInt::from(p);
        let mut k_prec = e_p as usize * (steps + 1) + 1;
        let mut modulus = pb.pow(k_prec as u32);
        let mut w: Vec<BigInt> = prim.iter().map(|x| x.mod_floor(&modulus)).collect();
        let mut acc = 0.0;
        let mut weight = 1.0 / d;
        for _ in 0..steps {
            let img: Vec<BigInt> = self.int_forms.iter().map(|f| f.eval(&w, Some(&modulus))).collect();
            let e = img
                .iter()
                .map(|x| if x.is_zero() { k_prec as u64 } else { valuation_big(x, &pb) })
                .min()
                .unwrap();
            if e > e_p {
                return Err(Error::invariant(format!(
                    "valuation {e} exceeds certified bound {e_p} at p = {p}"
                )));
            }
            acc += weight * e as f64;
            k_prec -= e as usize;
            let div = pb.pow(e as u32);
            modulus = pb.pow(k_prec as u32);
            w = img.iter().map(|x| (x / &div).mod_floor(&modulus)).collect();
            weight /= d;
        }
        let tail = e_p as f64 * weight * d / (d - 1.0);
        let value = shift - lnp * (acc + 0.5 * tail);
        let radius = lnp * 0.5 * tail * (1.0 + 1e-12) + value.abs() * 8.0 * f64::EPSILON;
        Ok((value, radius))
    }
}

/// Per-place bounds on `ln||F(z)||_v - d ln||z||_v`, in a form shared by the
/// P¹ and P² maps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalBounds {
    pub arch_lower: f64,
    pub arch_upper: f64,
    /// Bound `E_p` on `v_p((cF)(z))` for primitive integral `z`, at each prime where
    /// `F` may have bad reduction.
    pub padic: BTreeMap<u64, u64>,
}

impl LocalBounds {
    /// `[lo, up]` containing `h(F(x)) - d h(x)` for every point, given the scale `c`.
    pub fn global_interval(&self, scale: &Rat) -> (f64, f64) {
        let mut lo = self.arch_lower;
        let mut up = self.arch_upper;
        for (&p, &e) in &self.padic {
            let v = scale.valuation(p).unwrap() as f64;
            let lnp = (p as f64).ln();
            lo += (v - e as f64) * lnp;
            up += v * lnp;
        }
        let slack = 1e-12 * (1.0 + lo.abs() + up.abs());
        (lo - slack, up + slack)
    }

    /// `C_0 = max(|lo|, |up|)`.
    pub fn c0(&self, scale: &Rat) -> f64 {
        let (lo, up) = self.global_interval(scale);
        lo.abs().max(up.abs())
    }
}

fn valuation_big(x: &BigInt, p: &BigInt) -> u64 {
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % p).is_zero() {
        x /= p;
        v += 1;
    }
    v
}

/// `ln(a / b)` for positive integers of similar size.
fn ln_ratio(a: &BigInt, b: &BigInt) -> f64 {
    let shift = a.bits().max(b.bits()).saturating_sub(900);
    let top = |x: &BigInt| (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    (top(a) / top(b)).ln()
}

/// `x / 2^shift` rounded to nearest.
fn round_shift(x: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (shift - 1);
    (x + half) >> shift
}

/// Coprime integer coordinates `z~ = alpha z`; returns `(v_p(alpha), z~)`.
pub fn primitive_lift(z: &[Rat], p: u64) -> Result<(i64, Vec<BigInt>)> {
    if z.iter().all(Rat::is_zero) {
        return Err(Error::invalid("the zero vector is not a projective point"));
    }
    let den = z.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = z.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let alpha = Rat::new(den, g.clone())?;
    let prim = ints.iter().map(|c| c / &g).collect();
    Ok((alpha.valuation(p).unwrap(), prim))
}

/// `(ln ||z||_inf, z / ||z||_inf)` computed exactly before rounding.
fn normalized_f64(z: &[Rat]) -> Result<(f64, Vec<f64>)> {
    let m = z
        .iter()
        .map(Rat::abs)
        .max()
        .filter(|m| !m.is_zero())
        .ok_or_else(|| Error::invalid("the zero vector is not a projective point"))?;
    let inv = m.recip().unwrap();
    Ok((m.ln_abs(), z.iter().map(|c| (c * &inv).to_f64()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_map(c: i64) -> HomogMap {
        // (X^2 + c Y^2, Y^2)
        let mut f0 = vec![(vec![2, 0], Rat::one())];
        if c != 0 {
            f0.push((vec![0, 2], Rat::from_int(c)));
        }
        HomogMap::new(2, vec![Form { terms: f0 }, Form { terms: vec![(vec![0, 2], Rat::one())] }]).unwrap()
    }

    #[test]
    fn power_map_escape_is_log_norm() {
        let f = square_map(0);
        let z = [Rat::frac(3, 2), Rat::one()];
        let (g, r) = f.arch_escape(&z, 0.0, 0.0, 1e-12).unwrap();
        assert!((g - 1.5f64.ln()).abs() <= r + 1e-15);
    }

    #[test]
    fn padic_escape_at_denominator() {
        // F = (X^2 + Y^2/2, Y^2): scaled map (2X^2 + Y^2, 2Y^2)
        let f = HomogMap::new(
            2,
            vec![
                Form { terms: vec![(vec![2, 0], Rat::one()), (vec![0, 2], Rat::frac(1, 2))] },
                Form { terms: vec![(vec![0, 2], Rat::one())] },
            ],
        )
        .unwrap();
        assert_eq!(f.scale(), &Rat::from_int(2));
        let out = f.eval_int(&[BigInt::from(1), BigInt::from(1)]);
        assert_eq!(out, vec![BigInt::from(3), BigInt::from(2)]);
        // x = 0: orbit 0 -> 1/2 -> 3/4 -> 17/16 ..., v_2(x_n) = -2^(n-1)
        let (g, r) = f.padic_escape(&[Rat::zero(), Rat::one()], 2, 1, 1e-10).unwrap();
        assert!((g - 0.5 * 2f64.ln()).abs() <= r + 1e-12, "{g} {r}");
        assert!(r < 1e-10);
    }
}
