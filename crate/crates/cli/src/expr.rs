//! Text input: maps and families as `x^2 + l`, `(x^2 - 1)/(x + l)`, `3/2*x^3`.
//!
//! `x` (or `z`, `X`) is the dynamical variable, `l` (or `t`, `lambda`) the parameter.

use std::collections::BTreeMap;

use arithdyn::algebra::{Rat, UniPoly};
use num_bigint::BigUint;

/// Sparse polynomial in `(x, l)`, keyed by `(deg_x, deg_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(BTreeMap<(u32, u32), Rat>);

impl Poly {
    fn constant(c: Rat) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0), c);
        }
        Poly(m)
    }

    fn monomial(ex: u32, el: u32) -> Self {
        Poly(BTreeMap::from([((ex, el), Rat::one())]))
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            let v = m.entry(*k).or_insert_with(Rat::zero);
            *v += c;
            if v.is_zero() {
                m.remove(k);
            }
        }
        Poly(m)
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(k, c)| (*k, -c)).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut acc = Poly(BTreeMap::new());
        for (&(a, b), c) in &self.0 {
            let term = Poly(o.0.iter().map(|(&(x, y), d)| ((a + x, b + y), c * d)).collect());
            acc = acc.add(&term);
        }
        acc
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.0.len() {
            0 => Some(Rat::zero()),
            1 => self.0.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn scale(&self, c: &Rat) -> Poly {
        Poly(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    pub fn deg_x(&self) -> u32 {
        self.0.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn uses_param(&self) -> bool {
        self.0.keys().any(|k| k.1 > 0)
    }

    /// Coefficients in `x`, each a polynomial in `l`.
    pub fn x_coeffs(&self) -> Vec<UniPoly> {
        let dx = self.deg_x() as usize;
        let dl = self.0.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut out = vec![vec![Rat::zero(); dl + 1]; dx + 1];
        for (&(a, b), c) in &self.0 {
            out[a as usize][b as usize] = c.clone();
        }
        out.into_iter().map(UniPoly::new).collect()
    }

    /// Coefficients as a polynomial in one variable, which must be `x` alone or `l` alone.
    pub fn univariate(&self) -> UniPoly {
        let dx = self.deg_x() as usize;
        let dl = self.0.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut out = vec![Rat::zero(); dx.max(dl) + 1];
        for (&(a, b), c) in &self.0 {
            out[(a + b) as usize] = c.clone();
        }
        UniPoly::new(out)
    }
}

/// `num / den` with `den` not identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Fraction {
    pub num: Poly,
    pub den: Poly,
}

impl Fraction {
    fn poly(p: Poly) -> Self {
        Fraction { num: p, den: Poly::constant(Rat::one()) }
    }

    fn add(&self, o: &Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction { num: self.num.add(&o.num), den: self.den.clone() };
        }
        Fraction { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }
    }

    fn mul(&self, o: &Fraction) -> Fraction {
        Fraction { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    fn div(&self, o: &Fraction) -> Result<Fraction, String> {
        if o.num.0.is_empty() {
            return Err("division by zero".into());
        }
        Ok(Fraction { num: self.num.mul(&o.den), den: self.den.mul(&o.num) })
    }

    fn pow(&self, e: u32) -> Fraction {
        let mut acc = Fraction::poly(Poly::constant(Rat::one()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Moves a constant denominator into the numerator.
    fn normalized(self) -> Fraction {
        match self.den.as_constant() {
            Some(c) if !c.is_one() => {
                let inv = c.recip().expect("nonzero denominator");
                Fraction::poly(self.num.scale(&inv))
            }
            _ => self,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(usize, usize),
    X,
    L,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let t = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let j = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(j, i));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let j = i;
                while i < b.len() && b[i].is_ascii_alphabetic() {
                    i += 1;
                }
                match &s[j..i] {
                    "x" | "X" | "z" => out.push(Tok::X),
                    "l" | "t" | "lambda" => out.push(Tok::L),
                    w => return Err(format!("unknown variable {w:?}")),
                }
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::Open,
            b')' => Tok::Close,
            _ if s[i..].starts_with('λ') => {
                i += 'λ'.len_utf8();
                out.push(Tok::L);
                continue;
            }
            _ => return Err(format!("unexpected character at byte {i} in {s:?}")),
        };
        out.push(t);
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Fraction, String> {
        let mut acc = self.term()?;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = self.peek() {
            self.pos += 1;
            let mut rhs = self.term()?;
            if t == Tok::Minus {
                rhs.num = rhs.num.neg();
            }
            acc = acc.add(&rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Fraction, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                // implicit product: `2x`, `l(x+1)`
                Some(Tok::Num(..) | Tok::X | Tok::L | Tok::Open) => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Fraction, String> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let mut f = self.unary()?;
                f.num = f.num.neg();
                Ok(f)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Fraction, String> {
        let base = self.atom()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        match self.next() {
            Some(Tok::Num(a, b)) => {
                let e: u32 = self.src[a..b].parse().map_err(|_| "exponent too large".to_string())?;
                if e > 4096 {
                    return Err("exponent too large".into());
                }
                Ok(base.pow(e))
            }
            _ => Err("expected a nonnegative integer exponent".into()),
        }
    }

    fn atom(&mut self) -> Result<Fraction, String> {
        match self.next() {
            Some(Tok::Num(a, b)) => {
                let n: BigUint = self.src[a..b].parse().map_err(|e| format!("{e}"))?;
                Ok(Fraction::poly(Poly::constant(Rat::from_int(num_bigint::BigInt::from(n)))))
            }
            Some(Tok::X) => Ok(Fraction::poly(Poly::monomial(1, 0))),
            Some(Tok::L) => Ok(Fraction::poly(Poly::monomial(0, 1))),
            Some(Tok::Open) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::Close) => Ok(e),
                    _ => Err("unbalanced parentheses".into()),
                }
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

pub fn parse(s: &str) -> Result<Fraction, String> {
    let mut p = Parser { src: s, toks: lex(s)?, pos: 0 };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in {s:?}"));
    }
    Ok(f.normalized())
}
