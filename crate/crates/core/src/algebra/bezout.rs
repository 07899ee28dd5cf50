//! Binary forms and Bezout certificates `S P + T Q = X^t`, `U P + V Q = Y^t`.

use serde::{Deserialize, Serialize};

use super::linalg;
use super::resultant::resultant_sylvester;
use super::ring::{Field, RatFunc, Ring};
use super::{Rat, UniPoly};
use crate::error::{Error, Result};

/// Coefficient rings for which certificates can be solved in the fraction field.
pub trait CertCoeff: Ring {
    type Frac: Field;
    fn embed(&self) -> Self::Frac;
    fn extract(f: &Self::Frac) -> Option<Self>;

    /// Solutions of `A x = b_k` with entries in `Self`, if they exist.
    fn solve_in_ring(a: &[Vec<Self>], rhs: &[Vec<Self>]) -> Option<Vec<Vec<Self>>> {
        let emb = |m: &[Vec<Self>]| -> Vec<Vec<Self::Frac>> { m.iter().map(|r| r.iter().map(Self::embed).collect()).collect() };
        let sol = linalg::solve(&emb(a), &emb(rhs))?;
        sol.iter().map(|v| v.iter().map(Self::extract).collect()).collect()
    }
}

impl CertCoeff for Rat {
    type Frac = Rat;
    fn embed(&self) -> Rat {
        self.clone()
    }
    fn extract(f: &Rat) -> Option<Rat> {
        Some(f.clone())
    }
}

impl CertCoeff for UniPoly {
    type Frac = RatFunc;
    fn embed(&self) -> RatFunc {
        RatFunc::from_poly(self.clone())
    }
    fn extract(f: &RatFunc) -> Option<UniPoly> {
        f.as_poly()
    }

    fn solve_in_ring(a: &[Vec<UniPoly>], rhs: &[Vec<UniPoly>]) -> Option<Vec<Vec<UniPoly>>> {
        let (den, num) = linalg::solve_fraction_free(a, rhs)?;
        num.iter().map(|v| v.iter().map(|x| x.exact_div(&den)).collect()).collect()
    }
}

/// Homogeneous form `Σ c_i X^i Y^(deg-i)`; `coeffs[i]` multiplies `X^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryForm<R> {
    pub deg: usize,
    pub coeffs: Vec<R>,
}

impl<R: Ring> BinaryForm<R> {
    pub fn new(deg: usize, mut coeffs: Vec<R>) -> Self {
        assert!(coeffs.len() <= deg + 1, "too many coefficients for degree {deg}");
        coeffs.resize(deg + 1, R::zero());
        BinaryForm { deg, coeffs }
    }

    pub fn zero(deg: usize) -> Self {
        Self::new(deg, Vec::new())
    }

    /// `X^i Y^(deg-i)`.
    pub fn monomial(deg: usize, i: usize) -> Self {
        let mut c = vec![R::zero(); deg + 1];
        c[i] = R::one();
        BinaryForm { deg, coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.deg, rhs.deg);
        let c = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add(b)).collect();
        BinaryForm { deg: self.deg, coeffs: c }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut c = vec![R::zero(); self.deg + rhs.deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        BinaryForm { deg: self.deg + rhs.deg, coeffs: c }
    }

    /// Resultant with formal degrees.
    pub fn resultant(&self, rhs: &Self) -> R {
        resultant_sylvester(&self.coeffs, self.deg, &rhs.coeffs, rhs.deg)
    }
}

impl BinaryForm<Rat> {
    /// Homogenizes `p(x)` to degree `deg` (`deg >= deg p`).
    pub fn homogenize(p: &UniPoly, deg: usize) -> Self {
        Self::new(deg, p.coeffs().to_vec())
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut ypow = Rat::one();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &(c * &ypow);
            ypow = &ypow * y;
        }
        acc
    }
}

/// A verified pair of certificates at exponent `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BezoutCertificate<R> {
    pub t: usize,
    pub s: BinaryForm<R>,
    pub t_coef: BinaryForm<R>,
    pub u: BinaryForm<R>,
    pub v: BinaryForm<R>,
}

impl<R: Ring> BezoutCertificate<R> {
    /// Exact check of both identities.
    pub fn verify(&self, p: &BinaryForm<R>, q: &BinaryForm<R>) -> bool {
        let lhs1 = self.s.mul(p).add(&self.t_coef.mul(q));
        let lhs2 = self.u.mul(p).add(&self.v.mul(q));
        lhs1 == BinaryForm::monomial(self.t, self.t) && lhs2 == BinaryForm::monomial(self.t, 0)
    }

    pub fn forms(&self) -> [&BinaryForm<R>; 4] {
        [&self.s, &self.t_coef, &self.u, &self.v]
    }
}

/// Certificates at exactly exponent `t`, or `None` if the linear system has no
/// solution with coefficients in `R`.
pub fn certificates_at<R: CertCoeff>(
    p: &BinaryForm<R>,
    q: &BinaryForm<R>,
    t: usize,
) -> Option<BezoutCertificate<R>> {
    if t < p.deg.max(q.deg) {
        return None;
    }
    let (ds, dt) = (t - p.deg, t - q.deg);
    let cols = ds + 1 + dt + 1;
    let mut a = vec![vec![R::zero(); cols]; t + 1];
    for k in 0..=ds {
        for (i, c) in p.coeffs.iter().enumerate() {
            a[i + k][k] = c.clone();
        }
    }
    for k in 0..=dt {
        for (i, c) in q.coeffs.iter().enumerate() {
            a[i + k][ds + 1 + k] = c.clone();
        }
    }
    let mut x_t = vec![R::zero(); t + 1];
    x_t[t] = R::one();
    let mut y_t = vec![R::zero(); t + 1];
    y_t[0] = R::one();
    let sol = R::solve_in_ring(&a, &[x_t, y_t])?;
    let (first, second) = (&sol[0], &sol[1]);
    let cert = BezoutCertificate {
        t,
        s: BinaryForm::new(ds, first[..=ds].to_vec()),
        t_coef: BinaryForm::new(dt, first[ds + 1..].to_vec()),
        u: BinaryForm::new(ds, second[..=ds].to_vec()),
        v: BinaryForm::new(dt, second[ds + 1..].to_vec()),
    };
    cert.verify(p, q).then_some(cert)
}

/// Certificates at the smallest exponent `>= t` for which they exist.
///
/// A nonzero resultant guarantees a solution at `t = deg P + deg Q - 1`.
pub fn bezout_certificates<R: CertCoeff>(
    p: &BinaryForm<R>,
    q: &BinaryForm<R>,
    t: usize,
) -> Result<BezoutCertificate<R>> {
    if p.is_zero() || q.is_zero() || p.resultant(q).is_zero() {
        return Err(Error::NoCertificate("resultant vanishes".into()));
    }
    let top = (p.deg + q.deg).saturating_sub(1).max(p.deg.max(q.deg));
    let start = t.max(p.deg.max(q.deg));
    for tt in start..=top.max(start) {
        if let Some(c) = certificates_at(p, q, tt) {
            return Ok(c);
        }
    }
    Err(Error::NoCertificate(format!("no certificate for t in {start}..={top}")))
}
