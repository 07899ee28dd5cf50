//! Minimal algebraic traits so determinants and linear solves can be shared
//! between `Q`, `Q[λ]` and `Q(λ)`.

use super::{Rat, UniPoly};

pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact (Bareiss). Panics otherwise.
    fn div_exact(&self, rhs: &Self) -> Self;
}

pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        self / rhs
    }
}

impl Field for Rat {
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
}

impl Ring for UniPoly {
    fn zero() -> Self {
        UniPoly::zero()
    }
    fn one() -> Self {
        UniPoly::one()
    }
    fn is_zero(&self) -> bool {
        UniPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self.exact_div(rhs).expect("inexact polynomial division")
    }
}

/// Rational functions `num/den` over `Q`, kept with coprime parts and monic denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: UniPoly::one() };
        }
        let g = num.gcd(&den);
        let mut num = num.exact_div(&g).expect("gcd divides");
        let mut den = den.exact_div(&g).expect("gcd divides");
        let lc = den.lead();
        num = num.scale(&lc.recip().unwrap());
        den = den.monic();
        RatFunc { num, den }
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc { num: p, den: UniPoly::one() }
    }

    /// The polynomial value, when the denominator is constant.
    pub fn as_poly(&self) -> Option<UniPoly> {
        if self.den.degree() == Some(0) {
            Some(self.num.scale(&self.den.lead().recip().unwrap()))
        } else {
            None
        }
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(UniPoly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(UniPoly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
    fn neg(&self) -> Self {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self.div(rhs).expect("division by zero")
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }
}
