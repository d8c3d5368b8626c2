//! Dense exact linear algebra over [`Rational`] and [`BigInt`].
//!
//! Matrices are small (dimension at most a dozen), so everything here is
//! plain Gaussian elimination without pivoting heuristics beyond "first
//! nonzero entry".

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Reduces `m` to row echelon form in place and returns the pivot columns.
pub(crate) fn row_echelon(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    row_echelon(&mut m).len()
}

/// Rank of the affine hull of `points` (number of affinely independent
/// directions). Returns `None` for an empty list.
pub(crate) fn affine_rank(points: &[Vec<Rational>]) -> Option<usize> {
    let (base, rest) = points.split_first()?;
    let diffs: Vec<Vec<Rational>> = rest
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(&diffs))
}

/// Solves `a x = b` for square nonsingular `a`; `None` when singular.
pub(crate) fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_echelon(&mut aug);
    if pivots.len() != n || pivots.last() == Some(&n) {
        return None;
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// A nonzero vector spanning the kernel of `m`, assuming that kernel is
/// one-dimensional. `None` otherwise.
pub(crate) fn kernel_line(m: &[Vec<Rational>], cols: usize) -> Option<Vec<Rational>> {
    let mut e = m.to_vec();
    let pivots = row_echelon(&mut e);
    if pivots.len() + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -e[r][free].clone();
    }
    Some(v)
}

pub(crate) fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..n {
                let delta = &f * &m[c][j];
                m[i][j] -= delta;
            }
        }
    }
    det
}

/// Inverse of a square matrix, `None` if singular.
pub(crate) fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = row_echelon(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Scales a rational vector by a positive factor so that it becomes an
/// integer vector with content 1. The zero vector maps to itself.
pub(crate) fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive_bigint(ints)
}

pub(crate) fn primitive_bigint(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

pub(crate) fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().cloned().map(Rational::from_integer).collect()
}

pub(crate) fn abs_det_over_factorial(m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    determinant(m).abs() / Rational::from_integer(fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x, 1)).collect())
            .collect()
    }

    #[test]
    fn determinant_and_inverse_agree() {
        let a = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(determinant(a.clone()), q(18, 1));
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: Rational = (0..3).map(|k| &a[i][k] * &inv[k][j]).sum();
                assert_eq!(s, if i == j { q(1, 1) } else { q(0, 1) });
            }
        }
    }

    #[test]
    fn singular_systems_are_detected() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(solve_square(&a, &[q(1, 1), q(2, 1)]).is_none());
        assert!(inverse(&a).is_none());
        assert_eq!(rank(&a), 1);
        let k = kernel_line(&a, 2).unwrap();
        assert_eq!(k, vec![q(-2, 1), q(1, 1)]);
    }

    #[test]
    fn primitive_scaling_keeps_direction() {
        let v = vec![q(1, 2), q(-3, 4), q(0, 1)];
        let p = primitive_integer(&v);
        assert_eq!(p, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
    }
}
