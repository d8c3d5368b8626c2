//! Integral points on the universal torsor
//! `a1 a9 + a2 a8 + a3 a4^2 a5^3 a7 = 0` over the integers, their images on
//! the surface, and the torsor-side count of integral points.
//!
//! Normalized points have `a1, a2 >= 1` and `a3 = a4 = a5 = 1`; each integral
//! point of the surface has exactly two normalized preimages, hence the
//! factor 1/2 in every count.

use std::fmt;
use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::Rational;
use crate::surface::{integer_bound, CountMethod, CountResult, GroundRing, ProjectivePoint, SurfaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorsorError {
    #[error("torsor equation violated: a1a9 + a2a8 + a3a4^2a5^3a7 = {0}")]
    EquationViolated(i128),
    #[error("a{0} is not a unit")]
    NonUnitMiddle(usize),
    #[error("coprimality broken for a{0}, a{1}")]
    CoprimalityBroken(usize, usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Pairs among `a1, a2, a8, a9` that are not joined in the Dynkin diagram
/// (edges are 1-9, 2-8, 8-9) and must therefore be coprime.
const NON_ADJACENT: [(usize, usize); 3] = [(1, 2), (1, 8), (2, 9)];

/// A point `(a1, ..., a9)` with the torsor equation holding and `a3, ..., a7` units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorsorPoint {
    a: [i64; 9],
}

impl TorsorPoint {
    /// Checks the equation and the unit conditions; coprimality is then confirmed.
    pub fn validate(a: [i64; 9]) -> Result<Self, TorsorError> {
        let w = |i: usize| a[i - 1] as i128;
        let value = w(1) * w(9) + w(2) * w(8) + w(3) * w(4) * w(4) * w(5) * w(5) * w(5) * w(7);
        if value != 0 {
            return Err(TorsorError::EquationViolated(value));
        }
        if let Some(i) = (3..=7).find(|&i| a[i - 1].abs() != 1) {
            return Err(TorsorError::NonUnitMiddle(i));
        }
        // a1a9 + a2a8 is a unit, so both terms are coprime.
        if Integer::gcd(&(w(1) * w(9)), &(w(2) * w(8))) != 1 {
            return Err(TorsorError::CoprimalityBroken(1, 2));
        }
        for (i, j) in NON_ADJACENT {
            if Integer::gcd(&a[i - 1], &a[j - 1]) != 1 {
                return Err(TorsorError::CoprimalityBroken(i, j));
            }
        }
        Ok(Self { a })
    }

    pub fn coords(&self) -> &[i64; 9] {
        &self.a
    }

    /// `a_i`, `1 <= i <= 9`.
    pub fn get(&self, i: usize) -> i64 {
        self.a[i - 1]
    }

    pub fn is_normalized(&self) -> bool {
        self.get(1) >= 1 && self.get(2) >= 1 && self.a[2..5] == [1, 1, 1]
    }
}

impl fmt::Display for TorsorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// The image
/// `(a2a3a4a5a6a7a8 : a1^2a2^2a3^2a4a6^3 : a1a2a3^2a4^2a5^2a6^2a7 : a1a3a4a5a6a7a9 : a7a8a9)`.
pub fn map_to_surface(t: &TorsorPoint) -> ProjectivePoint<i64> {
    let a = |i| t.get(i);
    let coords = [
        a(2) * a(3) * a(4) * a(5) * a(6) * a(7) * a(8),
        a(1) * a(1) * a(2) * a(2) * a(3) * a(3) * a(4) * a(6) * a(6) * a(6),
        a(1) * a(2) * a(3) * a(3) * a(4) * a(4) * a(5) * a(5) * a(6) * a(6) * a(7),
        a(1) * a(3) * a(4) * a(5) * a(6) * a(7) * a(9),
        a(7) * a(8) * a(9),
    ];
    ProjectivePoint::new(coords).expect("a2a8 and a1a9 cannot both vanish")
}

/// `max(|a2a8|, |a1a2a3a4a5a6|, |a1a9|)`.
pub fn lifted_height(t: &TorsorPoint) -> u64 {
    let a = |i| t.get(i);
    (a(2) * a(8))
        .unsigned_abs()
        .max((a(1) * a(2) * a(3) * a(4) * a(5) * a(6)).unsigned_abs())
        .max((a(1) * a(9)).unsigned_abs())
}

/// Every normalized torsor point with lifted height at most `bmax`, in
/// lexicographic order of `(a1, a2, a6, a7, a8)`.
pub fn normalized_points(bmax: u64) -> Vec<TorsorPoint> {
    let b = bmax as i64;
    let mut out = Vec::new();
    for a1 in 1..=b {
        for a2 in 1..=b / a1 {
            for a6 in [-1i64, 1] {
                for a7 in [-1i64, 1] {
                    let m = b / a2;
                    for a8 in -m..=m {
                        let num = -(a2 * a8 + a7);
                        if num % a1 == 0 && (num / a1 * a1).abs() <= b {
                            let a = [a1, a2, 1, 1, 1, a6, a7, a8, num / a1];
                            out.push(TorsorPoint::validate(a).expect("constructed on the torsor"));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Halved count of normalized points of each exact lifted height, looping
/// over `a6`, `a7` and `a8` directly.
pub fn torsor_naive_histogram(bmax: u64) -> Vec<u64> {
    let b = bmax as i64;
    let raw = (1..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut hist, a1| {
                for a2 in 1..=b / a1 {
                    let m = b / a2;
                    for _a6 in [-1i64, 1] {
                        for a7 in [-1i64, 1] {
                            for a8 in -m..=m {
                                let num = -(a2 * a8 + a7);
                                if num % a1 == 0 {
                                    let h = (a2 * a8).abs().max(a1 * a2).max(num.abs());
                                    if h <= b {
                                        hist[h as usize] += 1;
                                    }
                                }
                            }
                        }
                    }
                }
                hist
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], add_histograms);
    raw.into_iter()
        .map(|c| {
            debug_assert!(c % 2 == 0);
            c / 2
        })
        .collect()
}

fn add_histograms(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// `a^{-1} mod m` for coprime `a, m`, `m >= 1`.
fn inverse_mod(a: i64, m: i64) -> Option<i64> {
    let e = Integer::extended_gcd(&a.rem_euclid(m), &m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// The admissible interval for `a8` when `a7 = 1`: `|a2a8| <= B` and `|a2a8 + 1| <= B`.
fn a8_interval(a2: i64, b: i64) -> (i64, i64) {
    let lo = (-b / a2).max(Integer::div_ceil(&(-b - 1), &a2));
    let hi = (b / a2).min(Integer::div_floor(&(b - 1), &a2));
    (lo, hi)
}

/// Number of `x` in `[lo, hi]` with `x = r mod m`.
fn count_in_class(lo: i64, hi: i64, r: i64, m: i64) -> u64 {
    if lo > hi {
        return 0;
    }
    let first = lo + (r - lo).rem_euclid(m);
    if first > hi {
        0
    } else {
        ((hi - first) / m + 1) as u64
    }
}

/// The residue class of `a8` for the pair `(a1, a2)` with `a7 = 1`, if any.
fn a8_class(a1: i64, a2: i64) -> Option<i64> {
    if a1 == 1 {
        return Some(0);
    }
    inverse_mod(a2, a1).map(|inv| (-inv).rem_euclid(a1))
}

/// Same histogram as [`torsor_naive_histogram`], visiting only the residue
/// class of `a8` and using the sign symmetry `(a7, a8, a9) -> -(a7, a8, a9)`.
pub fn torsor_fast_histogram(bmax: u64) -> Vec<u64> {
    let b = bmax as i64;
    (1..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut hist, a1| {
                for a2 in 1..=b / a1 {
                    let Some(r) = a8_class(a1, a2) else { continue };
                    let (lo, hi) = a8_interval(a2, b);
                    if lo > hi {
                        continue;
                    }
                    let mut a8 = lo + (r - lo).rem_euclid(a1);
                    while a8 <= hi {
                        let a9 = -(a2 * a8 + 1) / a1;
                        let h = (a2 * a8).abs().max(a1 * a2).max((a1 * a9).abs());
                        // two signs of a7, two of a6, halved.
                        hist[h as usize] += 2;
                        a8 += a1;
                    }
                }
                hist
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], add_histograms)
}

/// `N(B)` by the closed-form count of the residue class in each interval.
fn fast_count(b: i64) -> u64 {
    let per_a1 = |a1: i64| -> u64 {
        let mut total = 0;
        for a2 in 1..=b / a1 {
            if let Some(r) = a8_class(a1, a2) {
                let (lo, hi) = a8_interval(a2, b);
                total += count_in_class(lo, hi, r, a1);
            }
        }
        total
    };
    // Large a1 have few a2; batch them so that tasks stay coarse.
    let s: u64 = (1..b as usize + 1).into_par_iter().with_min_len(64).map(|a1| per_a1(a1 as i64)).sum();
    2 * s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsorMethod {
    Naive,
    Fast,
}

/// `N(B)` counted on the torsor.
pub fn torsor_count(bound: &Rational, method: TorsorMethod) -> Result<CountResult, TorsorError> {
    let start = Instant::now();
    let b = integer_bound(bound)?;
    let (count, method) = match method {
        TorsorMethod::Naive => (torsor_naive_histogram(b).iter().sum(), CountMethod::TorsorNaive),
        TorsorMethod::Fast => (fast_count(b as i64), CountMethod::TorsorFast),
    };
    Ok(CountResult {
        bound: bound.clone(),
        count,
        ring: GroundRing::RationalIntegers,
        method,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
