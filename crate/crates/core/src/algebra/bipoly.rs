//! Sparse polynomials in `(λ, μ)` over Q.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;

/// Map from exponent pair `(i, j)` of `λ^i μ^j` to a nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn lambda() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn mu() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(it: I) -> Self {
        let mut p = BiPoly::zero();
        for (k, c) in it {
            p.add_term(k, &c);
        }
        p
    }

    fn add_term(&mut self, k: (u32, u32), c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    /// The homogeneous part of top total degree.
    pub fn top_form(&self) -> BiPoly {
        match self.total_degree() {
            None => BiPoly::zero(),
            Some(t) => BiPoly {
                terms: self
                    .terms
                    .iter()
                    .filter(|((i, j), _)| i + j == t)
                    .map(|(k, c)| (*k, c.clone()))
                    .collect(),
            },
        }
    }

    pub fn scale(&self, c: &Rat) -> BiPoly {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn add(&self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn sub(&self, rhs: &BiPoly) -> BiPoly {
        self.add(&rhs.scale(&Rat::from_int(-1)))
    }

    pub fn mul(&self, rhs: &BiPoly) -> BiPoly {
        let mut acc: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &rhs.terms {
                let e = acc.entry((i + k, j + l)).or_insert_with(Rat::zero);
                *e += &(a * b);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        BiPoly { terms: acc }
    }

    pub fn pow(&self, e: u32) -> BiPoly {
        let mut result = BiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn eval(&self, lam: &Rat, mu: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for ((i, j), c) in &self.terms {
            acc += &(&(c * &lam.pow(*i)) * &mu.pow(*j));
        }
        acc
    }

    /// Evaluates `Σ c_i X^i` at `X = self` (univariate Horner substitution).
    pub fn substitute_into(&self, coeffs: &[Rat]) -> BiPoly {
        let mut acc = BiPoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).add(&BiPoly::constant(c.clone()));
        }
        acc
    }

    pub fn bit_size(&self) -> u64 {
        self.terms.values().map(|c| c.numer().bits() + c.denom().bits()).sum()
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|((i, j), c)| {
                let mut s = c.to_string();
                if *i > 0 {
                    s.push_str(&format!("*l^{i}"));
                }
                if *j > 0 {
                    s.push_str(&format!("*m^{j}"));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(u32, u32, &Rat)> = self.terms.iter().map(|((i, j), c)| (*i, *j, c)).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<(u32, u32, Rat)> = Vec::deserialize(d)?;
        let mut p = BiPoly::zero();
        for (i, j, c) in v {
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficient stored"));
            }
            p.add_term((i, j), &c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let l = BiPoly::lambda();
        let m = BiPoly::mu();
        let s = l.add(&m);
        let sq = s.pow(2);
        assert_eq!(sq.coeff(1, 1), Rat::from_int(2));
        assert_eq!(sq.total_degree(), Some(2));
        assert!(s.sub(&l).sub(&m).is_zero());
        assert_eq!(sq.eval(&Rat::from_int(2), &Rat::from_int(3)), Rat::from_int(25));
    }

    #[test]
    fn json_triples() {
        let p = BiPoly::from_terms([((0, 0), Rat::frac(1, 2)), ((2, 1), Rat::from_int(-3))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[0,0,"1/2"],[2,1,"-3"]]"#);
        let back: BiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<BiPoly>(r#"[[0,0,"0"]]"#).is_err());
    }

    #[test]
    fn top_form_and_substitution() {
        // (λ + 1)^2 - 1 = λ^2 + 2λ
        let x = BiPoly::lambda().add(&BiPoly::one());
        let r = x.substitute_into(&[Rat::from_int(-1), Rat::zero(), Rat::one()]);
        assert_eq!(r, BiPoly::from_terms([((2, 0), Rat::one()), ((1, 0), Rat::from_int(2))]));
        assert_eq!(r.top_form(), BiPoly::monomial(Rat::one(), 2, 0));
    }
}
