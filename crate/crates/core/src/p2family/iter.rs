//! Symbolic iteration `A_{n+1} = P(A_n) + λB_n`, `B_{n+1} = Q(B_n) + μA_n` over Q[λ, μ].

use serde::Serialize;

use super::P2Family;
use crate::algebra::{BiPoly, Rat};
use crate::error::{Error, Result};
use crate::family::Caps;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct P2IterPair {
    a: Rat,
    b: Rat,
    levels: Vec<(BiPoly, BiPoly)>,
}

fn expected_degree(d: usize, n: usize) -> Option<u64> {
    (n >= 1).then(|| (d as u64).pow(n as u32 - 1))
}

impl P2IterPair {
    pub fn new(a: Rat, b: Rat) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::invalid("start coordinates a, b must be nonzero"));
        }
        let levels = vec![(BiPoly::constant(a.clone()), BiPoly::constant(b.clone()))];
        Ok(P2IterPair { a, b, levels })
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Option<&(BiPoly, BiPoly)> {
        self.levels.get(n)
    }

    pub fn levels(&self) -> &[(BiPoly, BiPoly)] {
        &self.levels
    }

    pub fn extend_to(&mut self, fam: &P2Family, n: usize, caps: &Caps) -> Result<()> {
        while self.depth() < n {
            let next = self.depth() + 1;
            let want = expected_degree(fam.degree(), next).unwrap();
            if want > caps.max_degree as u64 {
                return Err(Error::ResourceLimit {
                    what: format!("level {next} would reach degree {want} > {}", caps.max_degree),
                    partial: None,
                });
            }
            let (an, bn) = self.levels.last().unwrap();
            let a1 = an.substitute_into(fam.p()).add(&BiPoly::lambda().mul(bn));
            let b1 = bn.substitute_into(fam.q()).add(&BiPoly::mu().mul(an));
            for (name, f) in [("A", &a1), ("B", &b1)] {
                let got = f.total_degree().map(u64::from);
                if got != Some(want) {
                    return Err(Error::invariant(format!(
                        "deg {name}_{next} = {got:?}, expected {want}"
                    )));
                }
            }
            let bits = a1.bit_size() + b1.bit_size();
            if bits > caps.max_bits {
                return Err(Error::ResourceLimit {
                    what: format!("level {next} has {bits} coefficient bits > {}", caps.max_bits),
                    partial: None,
                });
            }
            self.levels.push((a1, b1));
        }
        Ok(())
    }

    /// `[A_n(λ,μ) : B_n(λ,μ) : 1]` at a rational parameter.
    pub fn specialize(&self, n: usize, lambda: &Rat, mu: &Rat) -> Option<[Rat; 3]> {
        let (a, b) = self.levels.get(n)?;
        Some([a.eval(lambda, mu), b.eval(lambda, mu), Rat::one()])
    }
}

/// Levels `0..=n` of the pair started at `[a:b:1]`.
pub fn p2_iterate_symbolic(fam: &P2Family, a: &Rat, b: &Rat, n: usize, caps: &Caps) -> Result<P2IterPair> {
    let mut pair = P2IterPair::new(a.clone(), b.clone())?;
    pair.extend_to(fam, n, caps)?;
    Ok(pair)
}

/// Per-level comparison of the `t₂ = 0` restrictions of `Ã_n, B̃_n`, i.e. the top forms
/// of `A_n, B_n`, against closed forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaRow {
    pub n: usize,
    pub degree: u64,
    /// Top forms as computed.
    pub top_a: BiPoly,
    pub top_b: BiPoly,
    /// `c_P^{(D-1)/(d-1)} b^D t₀^D` and `c_Q^{(D-1)/(d-1)} a^D t₁^D` with `D = d^{n-1}`.
    pub derived_holds: bool,
    /// `c_P^{(d^n-1)/(d-1)} t₀^D` and `c_Q^{(d^n-1)/(d-1)} t₁^D`.
    pub stated_holds: bool,
    /// The two restrictions have no common zero on `t₂ = 0`.
    pub morphism_at_infinity: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaReport {
    pub rows: Vec<ThetaRow>,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.derived_holds && r.morphism_at_infinity)
    }
}

/// Checks levels `1..=n` (extending the cache if needed). A failure of the derived
/// closed form is an invariant violation.
pub fn p2_theta_check(fam: &P2Family, pair: &mut P2IterPair, n: usize, caps: &Caps) -> Result<ThetaReport> {
    pair.extend_to(fam, n, caps)?;
    let d = fam.degree() as u64;
    let mut rows = vec![];
    for k in 1..=n {
        let big_d = d.pow(k as u32 - 1);
        let e_derived = ((big_d - 1) / (d - 1)) as u32;
        let e_stated = ((d.pow(k as u32) - 1) / (d - 1)) as u32;
        let dd = big_d as u32;
        let (a, b) = &pair.levels[k];
        let top_a = a.top_form();
        let top_b = b.top_form();
        let want_a = BiPoly::monomial(&fam.c_p().pow(e_derived) * &pair.b.pow(dd), dd, 0);
        let want_b = BiPoly::monomial(&fam.c_q().pow(e_derived) * &pair.a.pow(dd), 0, dd);
        let derived_holds = top_a == want_a && top_b == want_b;
        if !derived_holds {
            return Err(Error::invariant(format!(
                "top forms at level {k}: {top_a}, {top_b}; expected {want_a}, {want_b}"
            )));
        }
        let stated_holds = top_a == BiPoly::monomial(fam.c_p().pow(e_stated), dd, 0)
            && top_b == BiPoly::monomial(fam.c_q().pow(e_stated), 0, dd);
        // pure powers t₀^D, t₁^D with nonzero coefficients meet only at t₀ = t₁ = 0
        let morphism_at_infinity = !top_a.coeff(dd, 0).is_zero() && !top_b.coeff(0, dd).is_zero();
        rows.push(ThetaRow { n: k, degree: big_d, top_a, top_b, derived_holds, stated_holds, morphism_at_infinity });
    }
    Ok(ThetaReport { rows })
}
