//! Canonical representatives of rational points on P¹ and P².

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::Rat;
use crate::error::{Error, Result};

/// Coprime integers, last nonzero coordinate positive.
fn canonical(coords: &[Rat]) -> Result<Vec<BigInt>> {
    if coords.iter().all(Rat::is_zero) {
        return Err(Error::invalid("all coordinates are zero"));
    }
    let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if ints.iter().rev().find(|c| !c.is_zero()).unwrap().is_negative() {
        g = -g;
    }
    Ok(ints.into_iter().map(|c| c / &g).collect())
}

fn canonical_ints(coords: Vec<BigInt>) -> Result<Vec<BigInt>> {
    let r: Vec<Rat> = coords.into_iter().map(Rat::from).collect();
    canonical(&r)
}

fn ln_max_abs(v: &[BigInt]) -> f64 {
    let m = v.iter().map(|x| x.abs()).max().unwrap();
    Rat::from(m).ln_abs()
}

/// `[X : Y]` with coprime integer coordinates, `Y >= 0`, and `X = 1` when `Y = 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[Rat; 2]", into = "[Rat; 2]")]
pub struct ProjPointP1 {
    x: BigInt,
    y: BigInt,
}

impl ProjPointP1 {
    pub fn new(x: Rat, y: Rat) -> Result<Self> {
        let c = canonical(&[x, y])?;
        Self::from_canonical(c)
    }

    fn from_canonical(mut c: Vec<BigInt>) -> Result<Self> {
        let y = c.pop().unwrap();
        let x = c.pop().unwrap();
        Ok(ProjPointP1 { x, y })
    }

    pub fn from_ints(x: BigInt, y: BigInt) -> Result<Self> {
        Self::from_canonical(canonical_ints(vec![x, y])?)
    }

    pub fn affine(x: &Rat) -> Self {
        ProjPointP1 { x: x.numer().clone(), y: x.denom().clone() }
    }

    pub fn infinity() -> Self {
        ProjPointP1 { x: BigInt::one(), y: BigInt::zero() }
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    pub fn to_affine(&self) -> Option<Rat> {
        (!self.y.is_zero()).then(|| Rat::new(self.x.clone(), self.y.clone()).unwrap())
    }

    pub fn coords(&self) -> [Rat; 2] {
        [Rat::from(self.x.clone()), Rat::from(self.y.clone())]
    }

    /// `ln max(|X|, |Y|)`.
    pub fn weil_height(&self) -> f64 {
        ln_max_abs(&[self.x.clone(), self.y.clone()])
    }
}

impl TryFrom<[Rat; 2]> for ProjPointP1 {
    type Error = Error;
    fn try_from(v: [Rat; 2]) -> Result<Self> {
        let [x, y] = v;
        Self::new(x, y)
    }
}

impl From<ProjPointP1> for [Rat; 2] {
    fn from(p: ProjPointP1) -> Self {
        p.coords()
    }
}

impl fmt::Display for ProjPointP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.x, self.y)
    }
}

impl fmt::Debug for ProjPointP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `[X : Y : Z]` with coprime integer coordinates and last nonzero coordinate positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[Rat; 3]", into = "[Rat; 3]")]
pub struct ProjPointP2 {
    c: [BigInt; 3],
}

impl ProjPointP2 {
    pub fn new(x: Rat, y: Rat, z: Rat) -> Result<Self> {
        Self::from_canonical(canonical(&[x, y, z])?)
    }

    pub fn from_ints(v: Vec<BigInt>) -> Result<Self> {
        Self::from_canonical(canonical_ints(v)?)
    }

    fn from_canonical(c: Vec<BigInt>) -> Result<Self> {
        let c: [BigInt; 3] = c.try_into().map_err(|_| Error::invalid("need three coordinates"))?;
        Ok(ProjPointP2 { c })
    }

    pub fn ints(&self) -> &[BigInt; 3] {
        &self.c
    }

    pub fn coords(&self) -> [Rat; 3] {
        self.c.clone().map(Rat::from)
    }

    pub fn weil_height(&self) -> f64 {
        ln_max_abs(&self.c)
    }
}

impl TryFrom<[Rat; 3]> for ProjPointP2 {
    type Error = Error;
    fn try_from(v: [Rat; 3]) -> Result<Self> {
        let [x, y, z] = v;
        Self::new(x, y, z)
    }
}

impl From<ProjPointP2> for [Rat; 3] {
    fn from(p: ProjPointP2) -> Self {
        p.coords()
    }
}

impl fmt::Display for ProjPointP2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}:{}]", self.c[0], self.c[1], self.c[2])
    }
}

impl fmt::Debug for ProjPointP2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
