//! Resultants, gcds and the Sylvester matrix.

use super::ring::Ring;
use super::{linalg, Rat, UniPoly};
use crate::error::{Error, Result};

/// Monic gcd. Errors when both inputs are zero.
pub fn poly_gcd(p: &UniPoly, q: &UniPoly) -> Result<UniPoly> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::invalid("gcd of two zero polynomials"));
    }
    Ok(p.gcd(q))
}

/// `Res(p, q)` by the subresultant pseudo-remainder sequence on primitive integer parts.
pub fn poly_resultant(p: &UniPoly, q: &UniPoly) -> Result<Rat> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::invalid("resultant with the zero polynomial"));
    }
    let (da, db) = (p.deg0(), q.deg0());
    let (ca, pa) = p.integer_primitive();
    let (cb, pb) = q.integer_primitive();
    let scale = &ca.pow(db as u32) * &cb.pow(da as u32);
    let r = subresultant(UniPoly::from_bigints(&pa), UniPoly::from_bigints(&pb));
    Ok(&scale * &r)
}

fn prem(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let delta = a.deg0() + 1 - b.deg0();
    let l = b.lead().pow(delta as u32);
    a.scale(&l).rem(b).expect("nonzero divisor")
}

fn subresultant(mut a: UniPoly, mut b: UniPoly) -> Rat {
    let mut s = Rat::one();
    if a.deg0() < b.deg0() {
        std::mem::swap(&mut a, &mut b);
        if a.deg0() % 2 == 1 && b.deg0() % 2 == 1 {
            s = -s;
        }
    }
    let mut g = Rat::one();
    let mut h = Rat::one();
    while b.deg0() > 0 {
        let delta = a.deg0() - b.deg0();
        if a.deg0() % 2 == 1 && b.deg0() % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let div = &g * &h.pow(delta as u32);
        b = r.scale(&div.recip().unwrap());
        if b.is_zero() {
            return Rat::zero();
        }
        g = a.lead();
        // h <- h^(1-delta) g^delta
        h = if delta == 0 {
            h
        } else {
            &g.pow(delta as u32) / &h.pow(delta as u32 - 1)
        };
    }
    let da = a.deg0() as u32;
    let lb = b.lead();
    let hh = if da == 0 {
        Rat::one()
    } else {
        &lb.pow(da) / &h.pow(da - 1)
    };
    &s * &hh
}

/// Sylvester matrix of coefficient lists (ascending) with formal degrees `m`, `n`.
pub fn sylvester<R: Ring>(p: &[R], m: usize, q: &[R], n: usize) -> Vec<Vec<R>> {
    let size = m + n;
    let at = |v: &[R], i: usize| v.get(i).cloned().unwrap_or_else(R::zero);
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![R::zero(); size];
        for k in 0..=m {
            row[i + k] = at(p, m - k);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![R::zero(); size];
        for k in 0..=n {
            row[i + k] = at(q, n - k);
        }
        rows.push(row);
    }
    rows
}

/// Resultant over any integral domain via the Sylvester determinant.
pub fn resultant_sylvester<R: Ring>(p: &[R], m: usize, q: &[R], n: usize) -> R {
    if m == 0 && n == 0 {
        return R::one();
    }
    linalg::det_bareiss(&sylvester(p, m, q, n))
}

/// `Res_x(P, Q)` where `P`, `Q` have coefficients in `Q[λ]` (ascending in `x`).
pub fn resultant_over_poly(p: &[UniPoly], q: &[UniPoly]) -> Result<UniPoly> {
    let trim = |v: &[UniPoly]| {
        let mut v = v.to_vec();
        while v.last().is_some_and(UniPoly::is_zero) {
            v.pop();
        }
        v
    };
    let (p, q) = (trim(p), trim(q));
    if p.is_empty() || q.is_empty() {
        return Err(Error::invalid("resultant with the zero polynomial"));
    }
    Ok(resultant_sylvester(&p, p.len() - 1, &q, q.len() - 1))
}
