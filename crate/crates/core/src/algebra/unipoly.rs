//! Dense univariate polynomials over `Q`, coefficients in ascending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;
use crate::error::{Error, Result};

/// A polynomial `c_0 + c_1 t + ... + c_n t^n` with `c_n != 0` (empty for zero).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn from_bigints(cs: &[BigInt]) -> Self {
        Self::new(cs.iter().cloned().map(Rat::from_int).collect())
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots(roots: &[Rat]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::new(vec![-r, Rat::one()])
        })
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> Self {
        match self.lead().recip() {
            Some(l) => self.scale(&l),
            None => Self::zero(),
        }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rat::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs: v }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rat::from_int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self(g(t))`.
    pub fn compose(&self, g: &UniPoly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division over `Q`.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::invalid("polynomial division by zero"))?;
        let inv_lead = divisor.lead().recip().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] * &inv_lead;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i - dd + j] -= &(&q * dc);
                }
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// Quotient when the division is exact, `None` otherwise.
    pub fn exact_div(&self, divisor: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(divisor).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &UniPoly) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd; `gcd(0, 0)` is the zero polynomial.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    /// `gcd(self, other)` is a nonzero constant. A prime not dividing either leading
    /// coefficient can only raise the gcd degree, so one constant gcd mod p settles it.
    pub fn is_coprime(&self, other: &UniPoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.gcd(other).is_constant();
        }
        if self.is_constant() || other.is_constant() {
            return true;
        }
        let (_, a) = self.integer_primitive();
        let (_, b) = other.integer_primitive();
        let mut p = 1u64 << 62;
        for _ in 0..4 {
            p = num_prime::nt_funcs::prev_prime(&p, None).expect("a prime below 2^62");
            let big = BigInt::from(p);
            let red = |v: &[BigInt]| -> Vec<u64> {
                v.iter().map(|c| u64::try_from(c.mod_floor(&big)).unwrap()).collect()
            };
            let (ra, rb) = (red(&a), red(&b));
            if *ra.last().unwrap() == 0 || *rb.last().unwrap() == 0 {
                continue;
            }
            if gcd_mod_p_degree(ra, rb, p) == 0 {
                return true;
            }
        }
        self.gcd(other).is_constant()
    }

    /// Extended gcd: `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn ext_gcd(&self, other: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().recip() {
            Some(l) => (r0.scale(&l), s0.scale(&l), t0.scale(&l)),
            None => (r0, s0, t0),
        }
    }

    /// `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Yun's algorithm: monic squarefree `s_k` with `p = lead * prod s_k^k`.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = fp.exact_div(&a).unwrap();
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.exact_div(&a).unwrap();
            c = d.exact_div(&a).unwrap();
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// `(c, P)` with `self = c * P`, `P` integral, primitive and with positive lead.
    pub fn integer_primitive(&self) -> (Rat, Vec<BigInt>) {
        if self.is_zero() {
            return (Rat::zero(), Vec::new());
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rat::new(g, den).unwrap(), prim)
    }

    pub fn primitive_part(&self) -> UniPoly {
        Self::from_bigints(&self.integer_primitive().1)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(Rat::is_integer)
    }

    /// Total bits of all numerators and denominators.
    pub fn bit_size(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits() + c.denom().bits())
            .sum()
    }

    /// Max absolute coefficient as `f64`.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn l1_norm_f64(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64()).sum()
    }

    pub fn display_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = if i > 0 && c.is_one() {
                mono
            } else if i > 0 && (-c).is_one() {
                format!("-{mono}")
            } else if i > 0 {
                format!("{c}*{mono}")
            } else {
                c.to_string()
            };
            parts.push(cs);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Degree of `gcd(a, b)` over `F_p`; inputs have nonzero leading entries.
fn gcd_mod_p_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().unwrap(), inv, p);
            let off = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + p - mul_mod(f, c, p)) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

const KRONECKER_MIN: usize = 24;

fn schoolbook_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Packs coefficients into `Σ c_i 2^{64 w i}`.
fn kronecker_pack(v: &[BigInt], w: usize) -> BigInt {
    let mut pos = vec![0u64; v.len() * w];
    let mut neg = vec![0u64; v.len() * w];
    for (i, c) in v.iter().enumerate() {
        let dst = if c.is_negative() { &mut neg } else { &mut pos };
        for (j, x) in c.magnitude().iter_u64_digits().enumerate() {
            dst[i * w + j] = x;
        }
    }
    let from = |d: Vec<u64>| BigInt::from_biguint(num_bigint::Sign::Plus, num_bigint::BigUint::from_slice(&to_u32(&d)));
    from(pos) - from(neg)
}

fn to_u32(d: &[u64]) -> Vec<u32> {
    d.iter().flat_map(|&x| [x as u32, (x >> 32) as u32]).collect()
}

/// Product through one big-integer multiplication; slots are wide enough that
/// balanced base-`2^{64w}` digits recover the coefficients.
fn kronecker_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let bits = |v: &[BigInt]| v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let need = bits(a) + bits(b) + (64 - (a.len().min(b.len()) as u64).leading_zeros() as u64) + 2;
    let w = need.div_ceil(64) as usize;
    let prod = &kronecker_pack(a, w) * &kronecker_pack(b, w);
    let n = a.len() + b.len() - 1;
    let negative = prod.is_negative();
    let digits: Vec<u64> = prod.magnitude().iter_u64_digits().collect();
    let half = BigInt::one() << (64 * w - 1);
    let full = BigInt::one() << (64 * w);
    let mut out = Vec::with_capacity(n);
    let mut carry = BigInt::zero();
    for i in 0..n {
        let lo = (i * w).min(digits.len());
        let hi = ((i + 1) * w).min(digits.len());
        let chunk = BigInt::from_biguint(num_bigint::Sign::Plus, num_bigint::BigUint::from_slice(&to_u32(&digits[lo..hi])));
        let mut x = chunk + &carry;
        if x >= half {
            x -= &full;
            carry = BigInt::one();
        } else {
            carry = BigInt::zero();
        }
        out.push(if negative { -x } else { x });
    }
    out
}

/// Multiply two dense vectors of rationals through a common-denominator integer convolution.
fn mul_coeffs(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let da = a.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let db = b.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ia: Vec<BigInt> = a.iter().map(|c| c.numer() * (&da / c.denom())).collect();
    let ib: Vec<BigInt> = b.iter().map(|c| c.numer() * (&db / c.denom())).collect();
    let out = if ia.len().min(ib.len()) >= KRONECKER_MIN {
        kronecker_mul(&ia, &ib)
    } else {
        schoolbook_mul(&ia, &ib)
    };
    let den = da * db;
    if den.is_one() {
        out.into_iter().map(Rat::from_int).collect()
    } else {
        out.into_iter()
            .map(|n| Rat::new(n, den.clone()).unwrap())
            .collect()
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::new(mul_coeffs(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_var("x"))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({:?})", self.coeffs)
    }
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<Rat>::deserialize(d).map(UniPoly::new)
    }
}
