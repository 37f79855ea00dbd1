//! Small exact linear algebra over the rationals: Gaussian elimination for
//! solving, rank computation, and matrix inversion.  Everything here works
//! on dense `Vec<Vec<Rat>>` matrices; sizes stay in the dozens.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pi::Rat;

pub type RatMatrix = Vec<Vec<Rat>>;

/// Row-reduce `m` in place, returning the pivot column of each pivot row.
fn row_reduce(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone().recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in 0..cols {
                    let sub = &m[r][c2] * &f;
                    m[i][c2] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(matrix: &RatMatrix) -> usize {
    let mut m = matrix.clone();
    row_reduce(&mut m).len()
}

/// Solve `A x = b` exactly.  Returns `None` when the system is inconsistent;
/// free variables (underdetermined systems) are set to zero.
pub fn solve(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    // inconsistent iff a pivot lands in the augmented column
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, c) in pivots.iter().enumerate() {
        x[*c] = m[r][cols].clone();
    }
    Some(x)
}

/// Exact inverse of a square matrix.
pub fn invert(a: &RatMatrix) -> Result<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            r
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, c)| *c != i) {
        return Err(Error::SingularMatrix);
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Rat::zero(); m]; n];
    for i in 0..n {
        for (t, row_b) in b.iter().enumerate() {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                let add = &a[i][t] * &row_b[j];
                out[i][j] += add;
            }
        }
    }
    out
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &RatMatrix) -> RatMatrix {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn determinant(a: &RatMatrix) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].clone().recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in c..n {
                    let sub = &m[c][c2] * &f;
                    m[i][c2] -= sub;
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::rat_int;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        rows.iter()
            .map(|r| r.iter().map(|x| rat_int(*x)).collect())
            .collect()
    }

    #[test]
    fn solve_and_rank() {
        let a = m(&[&[1, 2], &[3, 5]]);
        let b = vec![rat_int(5), rat_int(13)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(2)]);
        assert_eq!(rank(&a), 2);

        let singular = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&singular), 1);
        assert!(solve(&singular, &[rat_int(1), rat_int(3)]).is_none());
    }

    #[test]
    fn invert_roundtrip() {
        let a = m(&[&[2, 1, 0], &[1, 1, 1], &[0, 3, 1]]);
        let inv = invert(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(invert(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn determinant_values() {
        assert_eq!(determinant(&m(&[&[2, 0], &[0, 3]])), rat_int(6));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), rat_int(0));
    }
}
