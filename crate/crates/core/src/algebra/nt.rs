//! Integer factorization helpers over `num-prime`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_prime::nt_funcs;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Distinct prime divisors of `n` (empty for `n = 0, ±1`).
pub fn prime_divisors(n: &BigInt) -> Result<BTreeSet<u64>> {
    let m: BigUint = n.magnitude().clone();
    let mut out = BTreeSet::new();
    if m <= BigUint::from(1u32) {
        return Ok(out);
    }
    if let Some(small) = m.to_u64() {
        out.extend(nt_funcs::factorize64(small).into_keys());
        return Ok(out);
    }
    let (found, rest) = nt_funcs::factors(m, None);
    if let Some(rest) = rest {
        return Err(Error::Unsupported(format!(
            "could not factor cofactor(s) {}",
            rest.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    for p in found.into_keys() {
        out.insert(
            p.to_u64()
                .ok_or_else(|| Error::Unsupported(format!("prime {p} exceeds 64 bits")))?,
        );
    }
    Ok(out)
}

/// All positive divisors of `n > 0`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0);
    let mut ds = vec![1u64];
    for (p, e) in nt_funcs::factorize64(n) {
        let cur = ds.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        let ps: Vec<u64> = prime_divisors(&BigInt::from(-360)).unwrap().into_iter().collect();
        assert_eq!(ps, vec![2, 3, 5]);
        assert!(prime_divisors(&BigInt::from(1)).unwrap().is_empty());
    }

    #[test]
    fn beyond_u64() {
        let n = BigInt::from(1u64 << 40) * BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let ps: Vec<u64> = prime_divisors(&n).unwrap().into_iter().collect();
        assert_eq!(ps, vec![2, 998_244_353, 1_000_000_007]);
    }
}
