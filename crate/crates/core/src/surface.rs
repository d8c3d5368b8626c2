//! Points on the quartic surface
//! `x0 x3 - x2 x4 = 0`, `x0 x1 + x1 x3 + x2^2 = 0` in `P^4`
//! over the integers, the Gaussian integers and prime fields.
//!
//! Integral points are those off the line `L = {x0 = x2 = x3 = 0}` whose
//! coordinates `(x0, x2, x3)` generate the unit ideal.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{serde_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("point is not on the surface")]
    NotOnSurface,
    #[error("point lies on the boundary line L")]
    OnBoundary,
    #[error("x0, x2, x3 all vanish")]
    DegenerateCoordinates,
    #[error("height bound must be positive")]
    NonpositiveBound,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("all coordinates are zero")]
    ZeroVector,
    #[error("operation not available over {0}")]
    UnsupportedRing(GroundRing),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundRing {
    RationalIntegers,
    GaussianIntegers,
    PrimeField(u64),
}

impl GroundRing {
    pub fn prime_field(p: u64) -> Result<Self, SurfaceError> {
        if primal::is_prime(p) {
            Ok(Self::PrimeField(p))
        } else {
            Err(SurfaceError::NotPrime(p))
        }
    }
}

impl fmt::Display for GroundRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RationalIntegers => f.write_str("Z"),
            Self::GaussianIntegers => f.write_str("Z[i]"),
            Self::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

// ---- rings ------------------------------------------------------------------------

pub trait Ring:
    Copy
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// The zero of the ring `self` lives in.
    fn zero_like(self) -> Self;
    fn is_zero(self) -> bool;
    /// The canonical primitive representative of the projective point, or
    /// `None` for the zero vector.
    fn canonical(coords: [Self; 5]) -> Option<[Self; 5]>;
}

/// A Euclidean ring of integers with an absolute value `|.|_v` at its
/// archimedean place (the square of the modulus at a complex place).
pub trait NumberRing: Ring {
    /// A greatest common divisor, in canonical associate form.
    fn gcd(self, other: Self) -> Self;
    fn abs_v(self) -> u128;
    fn div_exact(self, d: Self) -> Option<Self>;
    fn is_unit(self) -> bool {
        self.abs_v() == 1
    }
}

impl Ring for i64 {
    fn zero_like(self) -> Self {
        0
    }

    fn is_zero(self) -> bool {
        self == 0
    }

    fn canonical(mut c: [Self; 5]) -> Option<[Self; 5]> {
        let g = c.iter().fold(0i64, |g, &x| Integer::gcd(&g, &x));
        if g == 0 {
            return None;
        }
        let first = *c.iter().find(|x| **x != 0)?;
        let g = if first < 0 { -g } else { g };
        for x in &mut c {
            *x /= g;
        }
        Some(c)
    }
}

impl NumberRing for i64 {
    fn gcd(self, other: Self) -> Self {
        Integer::gcd(&self, &other)
    }

    fn abs_v(self) -> u128 {
        self.unsigned_abs() as u128
    }

    fn div_exact(self, d: Self) -> Option<Self> {
        (d != 0 && self % d == 0).then(|| self / d)
    }
}

/// An element `re + im i` of the Gaussian integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gaussian {
    pub re: i64,
    pub im: i64,
}

impl Gaussian {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };
    pub const UNITS: [Self; 4] = [Self::ONE, Self::I, Self { re: -1, im: 0 }, Self { re: 0, im: -1 }];

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn norm(self) -> u128 {
        (self.re as i128 * self.re as i128 + self.im as i128 * self.im as i128) as u128
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// In the half-open first quadrant `re > 0, im >= 0`.
    pub fn is_normalized(self) -> bool {
        self.re > 0 && self.im >= 0
    }

    /// The unit `u` with `u * self` in the half-open first quadrant.
    fn normalizing_unit(self) -> Self {
        Self::UNITS
            .into_iter()
            .find(|&u| (u * self).is_normalized())
            .unwrap_or(Self::ONE)
    }

    /// Associate in the half-open first quadrant (zero stays zero).
    pub fn normalized(self) -> Self {
        self.normalizing_unit() * self
    }

    fn rounded_quotient(self, d: Self) -> Self {
        let n = d.norm() as i128;
        let t = self * d.conj();
        let round = |x: i64| -> i64 { (2 * x as i128 + n).div_euclid(2 * n) as i64 };
        Self::new(round(t.re), round(t.im))
    }
}

impl Add for Gaussian {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Gaussian {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Gaussian {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for Gaussian {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}i"),
            (r, i) if i < 0 => write!(f, "{r}{i}i"),
            (r, i) => write!(f, "{r}+{i}i"),
        }
    }
}

impl Ring for Gaussian {
    fn zero_like(self) -> Self {
        Self::ZERO
    }

    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    fn canonical(mut c: [Self; 5]) -> Option<[Self; 5]> {
        let g = c.iter().fold(Self::ZERO, |g, &x| NumberRing::gcd(g, x));
        if g.is_zero() {
            return None;
        }
        for x in &mut c {
            *x = x.div_exact(g).expect("gcd divides");
        }
        let u = c.iter().find(|x| !x.is_zero())?.normalizing_unit();
        Some(c.map(|x| u * x))
    }
}

impl NumberRing for Gaussian {
    fn gcd(self, other: Self) -> Self {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a - a.rounded_quotient(b) * b;
            a = b;
            b = r;
        }
        a.normalized()
    }

    fn abs_v(self) -> u128 {
        self.norm()
    }

    fn div_exact(self, d: Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm() as i128;
        let t = self * d.conj();
        let (re, im) = (t.re as i128, t.im as i128);
        (re % n == 0 && im % n == 0).then(|| Self::new((re / n) as i64, (im / n) as i64))
    }
}

/// An element of the prime field `F_p`; the modulus travels with the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Self {
        Self {
            value: value.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn inverse(self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        let (mut base, mut e, mut acc) = (self.value, self.modulus - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.modulus;
            }
            base = base * base % self.modulus;
            e >>= 1;
        }
        Some(Self { value: acc, ..self })
    }
}

impl Add for Fp {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: (self.value + o.value) % self.modulus,
            ..self
        }
    }
}

impl Sub for Fp {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            value: (self.value + self.modulus - o.value) % self.modulus,
            ..self
        }
    }
}

impl Mul for Fp {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            value: self.value * o.value % self.modulus,
            ..self
        }
    }
}

impl Neg for Fp {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: (self.modulus - self.value) % self.modulus,
            ..self
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

impl Ring for Fp {
    fn zero_like(self) -> Self {
        Self { value: 0, ..self }
    }

    fn is_zero(self) -> bool {
        self.value == 0
    }

    fn canonical(c: [Self; 5]) -> Option<[Self; 5]> {
        let inv = c.iter().find(|x| !x.is_zero())?.inverse()?;
        Some(c.map(|x| x * inv))
    }
}

// ---- points ---------------------------------------------------------------------------

/// A point of `P^4`, stored as its canonical primitive representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint<R: Ring> {
    coords: [R; 5],
}

impl<R: Ring> ProjectivePoint<R> {
    pub fn new(coords: [R; 5]) -> Result<Self, SurfaceError> {
        R::canonical(coords).map(|coords| Self { coords }).ok_or(SurfaceError::ZeroVector)
    }

    pub fn coords(&self) -> &[R; 5] {
        &self.coords
    }
}

impl<R: Ring> fmt::Display for ProjectivePoint<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coords;
        write!(f, "{}:{}:{}:{}:{}", c[0], c[1], c[2], c[3], c[4])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Line {
    /// `x0 = x2 = x3 = 0`, through both singular points.
    L,
    /// `x1 = x2 = x3 = 0`.
    LPrime,
    /// `x0 = x1 = x2 = 0`.
    LDoublePrime,
}

/// Both defining equations vanish at `coords`.
pub fn equations_vanish<R: Ring>(c: &[R; 5]) -> bool {
    (c[0] * c[3] - c[2] * c[4]).is_zero() && (c[0] * c[1] + c[1] * c[3] + c[2] * c[2]).is_zero()
}

pub fn on_surface<R: Ring>(pt: &ProjectivePoint<R>) -> bool {
    equations_vanish(&pt.coords)
}

fn lines_through<R: Ring>(c: &[R; 5]) -> Vec<Line> {
    let z = |i: usize| c[i].is_zero();
    let mut out = Vec::new();
    if z(0) && z(2) && z(3) {
        out.push(Line::L);
    }
    if z(1) && z(2) && z(3) {
        out.push(Line::LPrime);
    }
    if z(0) && z(1) && z(2) {
        out.push(Line::LDoublePrime);
    }
    out
}

/// The lines `L, L', L''` that contain the point.
pub fn on_lines<R: Ring>(pt: &ProjectivePoint<R>) -> Result<Vec<Line>, SurfaceError> {
    if !on_surface(pt) {
        return Err(SurfaceError::NotOnSurface);
    }
    Ok(lines_through(&pt.coords))
}

pub fn is_integral<R: NumberRing>(pt: &ProjectivePoint<R>) -> Result<bool, SurfaceError> {
    if !on_surface(pt) {
        return Err(SurfaceError::NotOnSurface);
    }
    let c = &pt.coords;
    if lines_through(c).contains(&Line::L) {
        return Err(SurfaceError::OnBoundary);
    }
    Ok(c[0].gcd(c[2]).gcd(c[3]).is_unit())
}

/// `max |x_i|_v / |gcd(x0, x2, x3)|_v` over `i in {0, 2, 3}`.
pub fn height<R: NumberRing>(pt: &ProjectivePoint<R>) -> Result<Rational, SurfaceError> {
    height_of(&pt.coords)
}

/// [`height`] on an arbitrary (not necessarily primitive) representative.
pub fn height_of<R: NumberRing>(c: &[R; 5]) -> Result<Rational, SurfaceError> {
    let g = c[0].gcd(c[2]).gcd(c[3]);
    if g.is_zero() {
        return Err(SurfaceError::DegenerateCoordinates);
    }
    let m = [c[0], c[2], c[3]].iter().map(|x| x.abs_v()).max().unwrap_or(0);
    Ok(Rational::new(BigInt::from(m), BigInt::from(g.abs_v())))
}

// ---- counting --------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    DirectTripleLoop,
    DirectDivisor,
    TorsorNaive,
    TorsorFast,
}

impl CountMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DirectTripleLoop => "direct-triple-loop",
            Self::DirectDivisor => "direct-divisor",
            Self::TorsorNaive => "torsor-naive",
            Self::TorsorFast => "torsor-fast",
        }
    }
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CountMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Self::DirectTripleLoop, Self::DirectDivisor, Self::TorsorNaive, Self::TorsorFast]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown count method {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountResult {
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub count: u64,
    pub ring: GroundRing,
    pub method: CountMethod,
    pub elapsed: f64,
}

/// Largest integer height admitted by the bound; heights of integral points are integers.
pub fn integer_bound(bound: &Rational) -> Result<u64, SurfaceError> {
    if !bound.is_positive() {
        return Err(SurfaceError::NonpositiveBound);
    }
    Ok(bound.floor().to_integer().to_u64().unwrap_or(u64::MAX))
}

/// Cumulative sums: entry `b` counts heights `<= b`.
pub fn cumulative(histogram: &[u64]) -> Vec<u64> {
    histogram
        .iter()
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect()
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Number of integral points over `Z` of each exact height `0..=bmax`, by
/// the transparent loop over `(x0, x2, x3)`.
pub fn z_triple_loop_histogram(bmax: u64) -> Vec<u64> {
    let b = bmax as i64;
    (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut hist, x0| {
                for x3 in -b..=b {
                    let s = x0 + x3;
                    if s == 0 {
                        continue;
                    }
                    let p = x0 * x3;
                    // x2 > 0 picks one of the two sign representatives.
                    for x2 in 1..=b {
                        if (x2 * x2) % s == 0 && p % x2 == 0 && Integer::gcd(&Integer::gcd(&x0, &x2), &x3) == 1 {
                            hist[x0.abs().max(x2).max(x3.abs()) as usize] += 1;
                        }
                    }
                }
                hist
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], merge)
}

/// The solution set of the counting problem written out by the divisor method.
///
/// A prime dividing `s = x0 + x3` divides `x2` (from `s | x2^2`) and then one
/// of `x0, x3` (from `x2 | x0 x3`), hence all three; so integrality forces
/// `s = +-1`. Then `x3 = s - x0`, `gcd(x0, x3) = 1` and `x2` runs over the
/// divisors of `x0 x3`, or over everything when `x0 x3 = 0`.
fn z_divisor_fold<F: Fn(&mut Vec<u64>, i64, i64, i64) + Sync>(bmax: u64, visit: F) -> Vec<u64> {
    let b = bmax as i64;
    let sieve = primal::Sieve::new((bmax as usize).max(2) + 1);
    (-b..=b)
        .into_par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut acc, x0| {
                for s in [1i64, -1] {
                    let x3 = s - x0;
                    if x3.abs() > b {
                        continue;
                    }
                    if x0 == 0 || x3 == 0 {
                        for x2 in 1..=b {
                            visit(&mut acc, x0, x2, x3);
                        }
                        continue;
                    }
                    let d0 = divisors(&sieve, x0.unsigned_abs(), bmax);
                    let d3 = divisors(&sieve, x3.unsigned_abs(), bmax);
                    for &u in &d0 {
                        for &v in &d3 {
                            if u * v <= bmax {
                                visit(&mut acc, x0, (u * v) as i64, x3);
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], merge)
}

/// Positive divisors of `n` not exceeding `cap`, ascending.
fn divisors(sieve: &primal::Sieve, n: u64, cap: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    if n > 1 {
        let factors = sieve.factor(n as usize).expect("sieve covers n");
        for (p, e) in factors {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p as u64;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
    }
    out.retain(|&d| d <= cap);
    out.sort_unstable();
    out
}

/// Same histogram as [`z_triple_loop_histogram`], by divisor enumeration.
pub fn z_divisor_histogram(bmax: u64) -> Vec<u64> {
    z_divisor_fold(bmax, |hist, x0, x2, x3| {
        hist[x0.abs().max(x2).max(x3.abs()) as usize] += 1;
    })
}

/// A counted integral point over `Z` with its height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntegralPoint {
    pub point: ProjectivePoint<i64>,
    pub height: u64,
}

impl fmt::Display for IntegralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.point, self.height)
    }
}

/// Recovers `x1 = -x2^2 / (x0 + x3)` and `x4 = x0 x3 / x2`.
fn complete_z(x0: i64, x2: i64, x3: i64) -> [i64; 5] {
    [x0, -(x2 * x2) / (x0 + x3), x2, x3, x0 * x3 / x2]
}

/// Every integral point over `Z` of height at most `bmax`, sorted by height
/// and then by canonical coordinates.
pub fn z_points(bmax: u64) -> Vec<IntegralPoint> {
    let b = bmax as i64;
    let sieve = primal::Sieve::new((bmax as usize).max(2) + 1);
    let mut pts: Vec<IntegralPoint> = (-b..=b)
        .into_par_iter()
        .flat_map_iter(|x0| {
            let mut local = Vec::new();
            for s in [1i64, -1] {
                let x3 = s - x0;
                if x3.abs() > b {
                    continue;
                }
                let x2s: Vec<i64> = if x0 == 0 || x3 == 0 {
                    (1..=b).collect()
                } else {
                    let d0 = divisors(&sieve, x0.unsigned_abs(), bmax);
                    let d3 = divisors(&sieve, x3.unsigned_abs(), bmax);
                    d0.iter()
                        .flat_map(|u| d3.iter().map(move |v| u * v))
                        .filter(|&d| d <= bmax)
                        .map(|d| d as i64)
                        .collect()
                };
                for x2 in x2s {
                    let point = ProjectivePoint::new(complete_z(x0, x2, x3)).expect("x2 != 0");
                    local.push(IntegralPoint {
                        point,
                        height: x0.unsigned_abs().max(x2 as u64).max(x3.unsigned_abs()),
                    });
                }
            }
            local
        })
        .collect();
    pts.sort_by_key(|p| (p.height, *p.point.coords()));
    pts
}

// ---- Gaussian integers ----------------------------------------------------------------

/// Gaussian integers of norm `<= bmax`, grouped by norm.
fn gaussian_ball(bmax: u64) -> Vec<Gaussian> {
    let r = (bmax as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for re in -r..=r {
        for im in -r..=r {
            let z = Gaussian::new(re, im);
            if z.norm() <= bmax as u128 {
                out.push(z);
            }
        }
    }
    out
}

/// Histogram of integral points over `Z[i]` by exact height, by the loop over
/// `(x0, x2, x3)` with `x2` in the half-open first quadrant.
pub fn gaussian_triple_loop_histogram(bmax: u64) -> Vec<u64> {
    let ball = gaussian_ball(bmax);
    let x2s: Vec<Gaussian> = ball.iter().copied().filter(|z| z.is_normalized()).collect();
    ball.par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut hist, &x0| {
                for &x3 in &ball {
                    let s = x0 + x3;
                    if s.is_zero() {
                        continue;
                    }
                    let p = x0 * x3;
                    for &x2 in &x2s {
                        if (x2 * x2).div_exact(s).is_some()
                            && p.div_exact(x2).is_some()
                            && x0.gcd(x2).gcd(x3).is_unit()
                        {
                            let h = x0.norm().max(x2.norm()).max(x3.norm());
                            hist[h as usize] += 1;
                        }
                    }
                }
                hist
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], merge)
}

/// Same histogram by divisor enumeration: `x0 + x3` is a unit and `x2` runs
/// over the normalized divisors of `x0 x3` (everything when `x0 x3 = 0`).
pub fn gaussian_divisor_histogram(bmax: u64) -> Vec<u64> {
    let ball = gaussian_ball(bmax);
    let mut by_norm: Vec<Vec<Gaussian>> = vec![Vec::new(); bmax as usize + 1];
    for z in &ball {
        if z.is_normalized() {
            by_norm[z.norm() as usize].push(*z);
        }
    }
    let all: Vec<Gaussian> = by_norm.iter().flatten().copied().collect();
    let sieve = primal::Sieve::new((bmax as usize).max(2) + 1);
    ball.par_iter()
        .fold(
            || vec![0u64; bmax as usize + 1],
            |mut hist, &x0| {
                for u in Gaussian::UNITS {
                    let x3 = u - x0;
                    if x3.norm() > bmax as u128 {
                        continue;
                    }
                    let base = x0.norm().max(x3.norm());
                    let p = x0 * x3;
                    if p.is_zero() {
                        for x2 in &all {
                            hist[base.max(x2.norm()) as usize] += 1;
                        }
                        continue;
                    }
                    let n0 = divisors(&sieve, x0.norm() as u64, bmax);
                    let n3 = divisors(&sieve, x3.norm() as u64, bmax);
                    let mut norms: Vec<u64> =
                        n0.iter().flat_map(|a| n3.iter().map(move |b| a * b)).filter(|&n| n <= bmax).collect();
                    norms.sort_unstable();
                    norms.dedup();
                    for n in norms {
                        for &x2 in &by_norm[n as usize] {
                            if p.div_exact(x2).is_some() {
                                hist[base.max(n as u128) as usize] += 1;
                            }
                        }
                    }
                }
                hist
            },
        )
        .reduce(|| vec![0u64; bmax as usize + 1], merge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectMethod {
    TripleLoop,
    Divisor,
}

/// `N(B)`: integral points off the three lines with height at most `bound`.
pub fn direct_count(bound: &Rational, ring: GroundRing) -> Result<CountResult, SurfaceError> {
    direct_count_with(bound, ring, DirectMethod::Divisor)
}

pub fn direct_count_with(
    bound: &Rational,
    ring: GroundRing,
    method: DirectMethod,
) -> Result<CountResult, SurfaceError> {
    let start = Instant::now();
    let b = integer_bound(bound)?;
    let hist = match (ring, method) {
        (GroundRing::RationalIntegers, DirectMethod::TripleLoop) => z_triple_loop_histogram(b),
        (GroundRing::RationalIntegers, DirectMethod::Divisor) => z_divisor_histogram(b),
        (GroundRing::GaussianIntegers, DirectMethod::TripleLoop) => gaussian_triple_loop_histogram(b),
        (GroundRing::GaussianIntegers, DirectMethod::Divisor) => gaussian_divisor_histogram(b),
        (r @ GroundRing::PrimeField(_), _) => return Err(SurfaceError::UnsupportedRing(r)),
    };
    Ok(CountResult {
        bound: bound.clone(),
        count: hist.iter().sum(),
        ring,
        method: match method {
            DirectMethod::TripleLoop => CountMethod::DirectTripleLoop,
            DirectMethod::Divisor => CountMethod::DirectDivisor,
        },
        elapsed: start.elapsed().as_secs_f64(),
    })
}

// ---- prime fields -----------------------------------------------------------------------

/// Canonical representatives of all points of `P^4(F_p)`.
pub fn projective_space_mod_p(p: u64) -> Result<Vec<ProjectivePoint<Fp>>, SurfaceError> {
    GroundRing::prime_field(p)?;
    let mut out = Vec::new();
    for lead in 0..5 {
        let free = 4 - lead;
        for k in 0..p.pow(free as u32) {
            let mut c = [Fp::new(0, p); 5];
            c[lead] = Fp::new(1, p);
            let mut k = k;
            for slot in c.iter_mut().skip(lead + 1) {
                *slot = Fp::new((k % p) as i64, p);
                k /= p;
            }
            out.push(ProjectivePoint { coords: c });
        }
    }
    Ok(out)
}

/// Points of the surface over `F_p`.
pub fn surface_points_mod_p(p: u64) -> Result<Vec<ProjectivePoint<Fp>>, SurfaceError> {
    Ok(projective_space_mod_p(p)?.into_iter().filter(on_surface).collect())
}

/// `#{x in P^4(F_p) : x on the surface, x not on L}`.
pub fn count_mod_p(p: u64) -> Result<u64, SurfaceError> {
    Ok(surface_points_mod_p(p)?
        .iter()
        .filter(|pt| !lines_through(pt.coords()).contains(&Line::L))
        .count() as u64)
}

/// `#L(F_p)` among the surface points.
pub fn count_line_mod_p(p: u64) -> Result<u64, SurfaceError> {
    Ok(surface_points_mod_p(p)?
        .iter()
        .filter(|pt| lines_through(pt.coords()).contains(&Line::L))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_lists() {
        let s = primal::Sieve::new(100);
        assert_eq!(divisors(&s, 12, 100), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&s, 12, 5), vec![1, 2, 3, 4]);
        assert_eq!(divisors(&s, 1, 5), vec![1]);
    }

    #[test]
    fn gaussian_gcd_and_division() {
        let a = Gaussian::new(3, 4);
        let b = Gaussian::new(1, 2);
        assert_eq!((a * b).div_exact(b), Some(a));
        assert_eq!(NumberRing::gcd(a * b, b * Gaussian::new(7, 0)), b.normalized());
        assert_eq!(Gaussian::new(2, 0).div_exact(Gaussian::new(1, 1)), Some(Gaussian::new(1, -1)));
        assert_eq!(Gaussian::new(3, 0).div_exact(Gaussian::new(1, 1)), None);
    }

    #[test]
    fn fp_inverse() {
        for p in [2u64, 3, 5, 7, 13] {
            for v in 1..p as i64 {
                let x = Fp::new(v, p);
                assert_eq!((x * x.inverse().unwrap()).value(), 1);
            }
        }
    }
}
