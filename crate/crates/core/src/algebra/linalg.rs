//! Exact dense linear algebra over the crate's rings.

use super::ring::{Field, Ring};
use super::{Rat, UniPoly};

/// Fraction-free (Bareiss) determinant over an integral domain.
pub fn det_bareiss<R: Ring>(matrix: &[Vec<R>]) -> R {
    let n = matrix.len();
    if n == 0 {
        return R::one();
    }
    let mut m: Vec<Vec<R>> = matrix.to_vec();
    let mut sign_flip = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return R::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        d.neg()
    } else {
        d
    }
}

/// Solves `A x = b` for one or more right-hand sides by Gauss-Jordan elimination.
///
/// Returns `None` when some system is inconsistent; free variables are set to zero.
pub fn solve<F: Field>(a: &[Vec<F>], rhs: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let nrhs = rhs.len();
    let mut m: Vec<Vec<F>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend(rhs.iter().map(|b| b[i].clone()));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv()?;
        for j in col..cols + nrhs {
            m[row][j] = m[row][j].mul(&inv);
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..cols + nrhs {
                    let v = m[i][j].sub(&f.mul(&m[row][j]));
                    m[i][j] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    for r in m.iter().skip(row) {
        if (cols..cols + nrhs).any(|j| !r[j].is_zero()) {
            return None;
        }
    }
    let mut out = vec![vec![F::zero(); cols]; nrhs];
    for (r, &c) in pivots.iter().enumerate() {
        for (k, x) in out.iter_mut().enumerate() {
            x[c] = m[r][cols + k].clone();
        }
    }
    Some(out)
}

/// Fraction-free Gauss-Jordan over an integral domain.
///
/// Returns `(D, N)` with `A (N_k / D) = b_k` for every right-hand side, or `None` when
/// some system is inconsistent. Entries stay minors of the augmented matrix, so every
/// division is exact.
pub fn solve_fraction_free<R: Ring>(a: &[Vec<R>], rhs: &[Vec<R>]) -> Option<(R, Vec<Vec<R>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let nrhs = rhs.len();
    let mut m: Vec<Vec<R>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.extend(rhs.iter().map(|b| b[i].clone()));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prev = R::one();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let piv = m[row][col].clone();
        for i in 0..rows {
            if i == row {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..cols + nrhs {
                if j == col {
                    continue;
                }
                let v = m[i][j].mul(&piv).sub(&f.mul(&m[row][j]));
                m[i][j] = if v.is_zero() { v } else { v.div_exact(&prev) };
            }
            m[i][col] = R::zero();
        }
        pivots.push(col);
        prev = piv;
        row += 1;
    }
    for r in m.iter().skip(row) {
        if (cols..cols + nrhs).any(|j| !r[j].is_zero()) {
            return None;
        }
    }
    let mut out = vec![vec![R::zero(); cols]; nrhs];
    for (r, &c) in pivots.iter().enumerate() {
        for (k, x) in out.iter_mut().enumerate() {
            x[c] = m[r][cols + k].clone();
        }
    }
    Some((prev, out))
}

/// Characteristic polynomial `det(xI - M)` via reduction to Hessenberg form.
pub fn charpoly(matrix: &[Vec<Rat>]) -> UniPoly {
    let n = matrix.len();
    let mut h: Vec<Vec<Rat>> = matrix.to_vec();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| !h[i][j].is_zero()) else {
            continue;
        };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let piv = h[j + 1][j].clone();
        for k in j + 2..n {
            if h[k][j].is_zero() {
                continue;
            }
            let u = &h[k][j] / &piv;
            for c in 0..n {
                let v = &h[j + 1][c] * &u;
                h[k][c] -= &v;
            }
            for row in h.iter_mut() {
                let v = &row[k] * &u;
                row[j + 1] += &v;
            }
        }
    }
    let x = UniPoly::x();
    let mut p: Vec<UniPoly> = vec![UniPoly::one()];
    for m in 1..=n {
        let mut pm = &(&x - &UniPoly::constant(h[m - 1][m - 1].clone())) * &p[m - 1];
        let mut t = Rat::one();
        for i in 1..m {
            t = &t * &h[m - i][m - i - 1];
            if t.is_zero() {
                break;
            }
            let c = &t * &h[m - i - 1][m - 1];
            if !c.is_zero() {
                pm = &pm - &p[m - i - 1].scale(&c);
            }
        }
        p.push(pm);
    }
    p.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_free_matches_field_solve() {
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 7) as i64 - 3
        };
        for shape in [(3, 3), (4, 3), (3, 5), (5, 5), (6, 4)] {
            for _ in 0..20 {
                let a: Vec<Vec<Rat>> = (0..shape.0)
                    .map(|_| (0..shape.1).map(|_| Rat::from_int(next())).collect())
                    .collect();
                let b: Vec<Vec<Rat>> = (0..2).map(|_| (0..shape.0).map(|_| Rat::from_int(next())).collect()).collect();
                let field = solve(&a, &b);
                let ff = solve_fraction_free(&a, &b).map(|(d, n)| {
                    n.into_iter().map(|v| v.into_iter().map(|x| &x / &d).collect::<Vec<_>>()).collect::<Vec<_>>()
                });
                assert_eq!(field, ff);
            }
        }
    }

    fn rm(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rat::from_int(v)).collect())
            .collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m = rm(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // 2(3*-2-20) +1(1*-2-0) = -52 - 2
        assert_eq!(det_bareiss(&m), Rat::from_int(-54));
        let z = rm(&[&[0, 1], &[1, 0]]);
        assert_eq!(det_bareiss(&z), Rat::from_int(-1));
    }

    #[test]
    fn solve_square_and_inconsistent() {
        let a = rm(&[&[1, 1], &[1, -1]]);
        let b = vec![vec![Rat::from_int(3), Rat::from_int(1)]];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x[0], vec![Rat::from_int(2), Rat::from_int(1)]);
        let a = rm(&[&[1, 1], &[2, 2]]);
        let b = vec![vec![Rat::from_int(1), Rat::from_int(3)]];
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn charpoly_against_determinant() {
        let m = rm(&[&[1, 2, 0, 3], &[0, -1, 4, 1], &[2, 0, 1, 1], &[1, 1, 1, 0]]);
        let cp = charpoly(&m);
        // cross-check at several points with det(tI - M)
        for t in -3..=3 {
            let tm: Vec<Vec<Rat>> = (0..4)
                .map(|i| {
                    (0..4)
                        .map(|j| {
                            let d = if i == j { Rat::from_int(t) } else { Rat::zero() };
                            &d - &m[i][j]
                        })
                        .collect()
                })
                .collect();
            assert_eq!(cp.eval(&Rat::from_int(t)), det_bareiss(&tm));
        }
        assert_eq!(cp.degree(), Some(4));
    }
}
