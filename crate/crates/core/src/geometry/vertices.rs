//! Vertex enumeration for bounded H-polytopes.
//!
//! Two exact routes share one contract: an active-set search over all
//! `dim`-subsets of the rows (small inputs), and the double description
//! method on the homogenized cone (everything else). Both reject inputs
//! whose recession cone is nontrivial.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg;
use super::{AffineForm, GeometryError, Rational};

/// Inputs up to this dimension and row count use the active-set search.
pub const ACTIVE_SET_MAX_DIM: usize = 6;
pub const ACTIVE_SET_MAX_ROWS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexMethod {
    Auto,
    ActiveSet,
    DoubleDescription,
}

/// Vertices of `{x : row(x) >= 0 for all rows}` in lexicographic order.
///
/// Rows must already be normalized and of length `dim`.
pub fn vertices(
    dim: usize,
    rows: &[AffineForm],
    method: VertexMethod,
) -> Result<Vec<Vec<Rational>>, GeometryError> {
    if dim == 0 {
        let feasible = rows.iter().all(|r| !r.constant.is_negative());
        return Ok(if feasible { vec![Vec::new()] } else { Vec::new() });
    }
    let method = match method {
        VertexMethod::Auto if dim <= ACTIVE_SET_MAX_DIM && rows.len() <= ACTIVE_SET_MAX_ROWS => {
            VertexMethod::ActiveSet
        }
        VertexMethod::Auto => VertexMethod::DoubleDescription,
        m => m,
    };
    let coeffs: Vec<Vec<Rational>> = rows.iter().map(|r| r.coefficients.clone()).collect();
    if linalg::rank(&coeffs) < dim {
        return Err(GeometryError::UnboundedInput);
    }
    match method {
        VertexMethod::ActiveSet => active_set(dim, rows, &coeffs),
        _ => double_description(dim, rows),
    }
}

fn active_set(
    dim: usize,
    rows: &[AffineForm],
    coeffs: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>, GeometryError> {
    // The recession cone {d : A d >= 0} is pointed here; it is nontrivial
    // iff it has an extreme ray, cut out by dim - 1 independent tight rows.
    for subset in (0..rows.len()).combinations(dim - 1) {
        let sub: Vec<Vec<Rational>> = subset.iter().map(|&i| coeffs[i].clone()).collect();
        let Some(d) = linalg::kernel_line(&sub, dim) else {
            continue;
        };
        let signs: Vec<Rational> = coeffs
            .iter()
            .map(|c| c.iter().zip(&d).map(|(a, b)| a * b).sum())
            .collect();
        if signs.iter().all(|s| !s.is_negative()) || signs.iter().all(|s| !s.is_positive()) {
            return Err(GeometryError::UnboundedInput);
        }
    }

    let mut found = BTreeSet::new();
    for subset in (0..rows.len()).combinations(dim) {
        let a: Vec<Vec<Rational>> = subset.iter().map(|&i| coeffs[i].clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| -rows[i].constant.clone()).collect();
        let Some(x) = linalg::solve_square(&a, &b) else {
            continue;
        };
        if rows.iter().all(|r| r.is_satisfied_by(&x)) {
            found.insert(x);
        }
    }
    Ok(found.into_iter().collect())
}

struct Ray {
    v: Vec<BigInt>,
    zeros: FixedBitSet,
}

fn double_description(
    dim: usize,
    rows: &[AffineForm],
) -> Result<Vec<Vec<Rational>>, GeometryError> {
    // Homogenize: (x, t) with row(x) * t >= 0 and t >= 0.
    let mut hom: Vec<Vec<BigInt>> = rows.iter().map(AffineForm::integer_row).collect();
    let mut t_row = vec![BigInt::zero(); dim + 1];
    t_row[dim] = BigInt::from(1);
    hom.push(t_row);
    let rays = extreme_rays(&hom, dim + 1);

    let mut found = BTreeSet::new();
    for r in &rays {
        let t = &r[dim];
        if t.is_zero() {
            return Err(GeometryError::UnboundedInput);
        }
        let x: Vec<Rational> = r[..dim]
            .iter()
            .map(|c| Rational::new(c.clone(), t.clone()))
            .collect();
        found.insert(x);
    }
    Ok(found.into_iter().collect())
}

/// Extreme rays of the pointed cone `{y in R^d : <row, y> >= 0}`, computed by
/// the double description method. The rows must have rank `d`.
pub(crate) fn extreme_rays(hom: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    let m = hom.len();

    // Greedy basis of d independent rows, preferring later rows.
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    for i in (0..m).rev() {
        chosen.push(linalg::to_rational(&hom[i]));
        if linalg::rank(&chosen) == chosen.len() {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    assert_eq!(basis.len(), d, "cone rows must have full rank");
    let inv = linalg::inverse(&chosen).expect("basis rows are independent");

    let mut processed = FixedBitSet::with_capacity(m);
    for &i in &basis {
        processed.insert(i);
    }
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let col: Vec<Rational> = inv.iter().map(|r| r[j].clone()).collect();
            let v = linalg::primitive_integer(&col);
            let mut zeros = FixedBitSet::with_capacity(m);
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(bi);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    for i in 0..m {
        if processed.contains(i) {
            continue;
        }
        let row = &hom[i];
        let vals: Vec<BigInt> = rays.iter().map(|r| linalg::dot_int(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[n].zeros);
                if common.count_ones(..) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != n)
                    .all(|k| !common.is_subset(&rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(rn, rp)| &vals[p] * rn - &vals[n] * rp)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                created.push(Ray {
                    v: linalg::primitive_bigint(v),
                    zeros,
                });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                r.zeros.insert(i);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
        processed.insert(i);
    }
    rays.into_iter().map(|r| r.v).collect()
}
