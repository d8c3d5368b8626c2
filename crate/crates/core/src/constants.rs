//! Number-field invariants and the predicted leading constant
//! `c = alpha * rho_K / |Delta_K| * prod_{v | inf} omega_v * prod_p omega_p`
//! of `N(B) ~ c B (log B)^(2 + 2q)`.
//!
//! Real outputs carry a relative error bound; the bounds are conservative
//! (first order in the unit roundoff) rather than tight.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::serde_rational;
use crate::geometry::Rational;
use crate::jigsaw::{alpha_closed_form, UnitRank};

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantsError {
    #[error("invalid field invariants: {0}")]
    InvalidInvariants(String),
    #[error("unsupported field {0}: supply zeta2 or a quadratic discriminant")]
    UnsupportedField(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

/// A double together with a bound on its relative error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tracked {
    pub value: f64,
    pub rel_error: f64,
}

impl Tracked {
    /// A value correctly rounded from an exact real.
    pub fn rounded(value: f64) -> Self {
        Self { value, rel_error: EPS / 2.0 }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, rel_error: 0.0 }
    }

    pub fn abs_error(&self) -> f64 {
        self.value.abs() * self.rel_error
    }

    pub fn recip(self) -> Self {
        Self {
            value: 1.0 / self.value,
            rel_error: self.rel_error + EPS,
        }
    }

    pub fn sqrt(self) -> Self {
        Self {
            value: self.value.sqrt(),
            rel_error: self.rel_error / 2.0 + EPS,
        }
    }

    pub fn powi(self, n: u32) -> Self {
        Self {
            value: self.value.powi(n as i32),
            rel_error: n as f64 * (self.rel_error + EPS),
        }
    }
}

impl std::ops::Mul for Tracked {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            value: self.value * o.value,
            rel_error: self.rel_error + o.rel_error + EPS,
        }
    }
}

impl std::ops::Div for Tracked {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self {
            value: self.value / o.value,
            rel_error: self.rel_error + o.rel_error + EPS,
        }
    }
}

/// Invariants of a number field `K`, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldInvariants {
    pub label: String,
    pub r1: u32,
    pub r2: u32,
    pub abs_disc: u64,
    pub regulator: f64,
    pub class_number: u64,
    pub mu: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_disc: Option<i64>,
}

impl FieldInvariants {
    pub fn rationals() -> Self {
        Self {
            label: "Q".into(),
            r1: 1,
            r2: 0,
            abs_disc: 1,
            regulator: 1.0,
            class_number: 1,
            mu: 2,
            zeta2: None,
            quad_disc: None,
        }
    }

    pub fn gaussian() -> Self {
        Self {
            label: "Q(i)".into(),
            r1: 0,
            r2: 1,
            abs_disc: 4,
            mu: 4,
            quad_disc: Some(-4),
            ..Self::rationals()
        }
    }

    pub fn eisenstein() -> Self {
        Self {
            label: "Q(sqrt(-3))".into(),
            r1: 0,
            r2: 1,
            abs_disc: 3,
            mu: 6,
            quad_disc: Some(-3),
            ..Self::rationals()
        }
    }

    pub fn real_quadratic_sqrt2() -> Self {
        Self {
            label: "Q(sqrt(2))".into(),
            r1: 2,
            r2: 0,
            abs_disc: 8,
            regulator: (1.0 + 2f64.sqrt()).ln(),
            mu: 2,
            quad_disc: Some(8),
            ..Self::rationals()
        }
    }

    /// The built-in table, looked up by label.
    pub fn builtin(label: &str) -> Option<Self> {
        [Self::rationals(), Self::gaussian(), Self::eisenstein(), Self::real_quadratic_sqrt2()]
            .into_iter()
            .find(|f| f.label.eq_ignore_ascii_case(label))
    }

    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }

    /// Unit rank `r1 + r2 - 1`.
    pub fn unit_rank(&self) -> Result<UnitRank, ConstantsError> {
        (self.r1 + self.r2)
            .checked_sub(1)
            .map(UnitRank::new)
            .ok_or_else(|| ConstantsError::InvalidInvariants("r1 + r2 must be at least 1".into()))
    }

    pub fn validate(&self) -> Result<(), ConstantsError> {
        let bad = |m: &str| Err(ConstantsError::InvalidInvariants(format!("{}: {m}", self.label)));
        self.unit_rank()?;
        if self.abs_disc == 0 {
            return bad("abs_disc must be positive");
        }
        if !(self.regulator.is_finite() && self.regulator > 0.0) {
            return bad("regulator must be positive");
        }
        if self.class_number == 0 {
            return bad("class_number must be positive");
        }
        if self.mu == 0 || !self.mu.is_multiple_of(2) {
            return bad("mu must be a positive even integer");
        }
        if let Some(z) = self.zeta2 {
            if !(z.is_finite() && z > 1.0) {
                return bad("zeta2 must exceed 1");
            }
        }
        if let Some(d) = self.quad_disc {
            if self.degree() != 2 || d.unsigned_abs() != self.abs_disc || (d < 0) != (self.r2 == 1) || !is_fundamental_discriminant(d) {
                return bad("quad_disc inconsistent with signature and discriminant");
            }
        }
        Ok(())
    }
}

/// `2^r1 (2 pi)^r2 R_K h_K / (|mu_K| sqrt|Delta_K|)`, the residue at 1 of `zeta_K`.
pub fn rho_k(inv: &FieldInvariants) -> Result<Tracked, ConstantsError> {
    inv.validate()?;
    let two_pi = Tracked::rounded(2.0 * PI);
    let num = Tracked::exact(2f64.powi(inv.r1 as i32))
        * two_pi.powi(inv.r2)
        * Tracked::rounded(inv.regulator)
        * Tracked::exact(inv.class_number as f64);
    let den = Tracked::exact(inv.mu as f64) * Tracked::exact(inv.abs_disc as f64).sqrt();
    Ok(num / den)
}

/// `4^r1 (4 pi^2)^r2`.
pub fn omega_arch(inv: &FieldInvariants) -> Tracked {
    Tracked::exact(4f64.powi(inv.r1 as i32)) * Tracked::rounded(4.0 * PI * PI).powi(inv.r2)
}

/// Kronecker symbol `(d / n)` for `n >= 1`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut result = 1;
    let v = n.trailing_zeros();
    let mut n = (n >> v) as i64;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    let mut a = d.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `psi'(x) = sum_{k >= 0} 1/(x + k)^2` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let t = 1.0 / (x * x);
    // Asymptotic series with Bernoulli numbers up to B_14.
    let series = 1.0
        + 1.0 / (2.0 * x)
        + t
            * (1.0 / 6.0
                + t * (-1.0 / 30.0 + t * (1.0 / 42.0 + t * (-1.0 / 30.0 + t * (5.0 / 66.0 + t * (-691.0 / 2730.0 + t * 7.0 / 6.0))))));
    acc + series / x
}

/// `L(2, chi_D)` for the Kronecker character of a fundamental discriminant.
pub fn l_two(d: i64) -> Tracked {
    let m = d.unsigned_abs();
    let mut sum = 0.0;
    let mut mass = 0.0;
    for a in 1..=m {
        let c = kronecker(d, a);
        if c != 0 {
            let t = trigamma(a as f64 / m as f64);
            sum += c as f64 * t;
            mass += t;
        }
    }
    let value = sum / (m * m) as f64;
    // Cancellation in the signed sum dominates the error.
    Tracked {
        value,
        rel_error: 16.0 * EPS * (m as f64) * mass / (sum.abs() + f64::MIN_POSITIVE) + 1e-15,
    }
}

/// `zeta(2) = pi^2 / 6`.
pub fn zeta_two() -> Tracked {
    Tracked::rounded(PI * PI / 6.0)
}

/// `zeta_K(2)`: exact for `Q`, `zeta(2) L(2, chi_D)` for quadratic fields,
/// otherwise the supplied value.
pub fn dedekind_zeta_two(inv: &FieldInvariants) -> Result<Tracked, ConstantsError> {
    if let Some(z) = inv.zeta2 {
        return Ok(Tracked { value: z, rel_error: EPS });
    }
    if inv.degree() == 1 {
        return Ok(zeta_two());
    }
    match inv.quad_disc {
        Some(d) if inv.degree() == 2 => Ok(zeta_two() * l_two(d)),
        _ => Err(ConstantsError::UnsupportedField(inv.label.clone())),
    }
}

/// `prod_{N p <= bound} (1 - N p^-2)` with a bracket for the full product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EulerProduct {
    pub prime_bound: u64,
    pub value: f64,
    /// Bound on the floating-point error of `value`.
    pub rounding_error: f64,
    /// The infinite product lies in `[value * (1 - tail), value]`, up to rounding.
    pub tail: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Neumaier-compensated sum.
struct CompensatedSum {
    sum: f64,
    carry: f64,
    mass: f64,
    terms: u64,
}

impl CompensatedSum {
    fn new() -> Self {
        Self { sum: 0.0, carry: 0.0, mass: 0.0, terms: 0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
        self.mass += x.abs();
        self.terms += 1;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// Each term is within one ulp of the true logarithm; compensation keeps
    /// the summation error at `2 eps * mass` up to second order.
    fn error(&self) -> f64 {
        3.0 * EPS * self.mass + EPS * self.value().abs()
    }
}

/// The truncated Euler product of `omega_p = 1 - N p^-2` over prime ideals
/// of norm at most `prime_bound`.
///
/// For `Q` the tail `prod_{p > X}` lies in `[1 - 1/X, 1]`; for quadratic
/// fields at most two prime ideals have a given norm, giving `[1 - 2/X, 1]`.
/// Terms may be summed in any order; the error bound covers any order.
pub fn finite_density_product(inv: &FieldInvariants, prime_bound: u64) -> Result<EulerProduct, ConstantsError> {
    if prime_bound < 2 {
        return Err(ConstantsError::OutOfRange("prime bound must be at least 2".into()));
    }
    inv.validate()?;
    let quad = match (inv.degree(), inv.quad_disc) {
        (1, _) => None,
        (2, Some(d)) => Some(d),
        _ => return Err(ConstantsError::UnsupportedField(inv.label.clone())),
    };
    let sieve = primal::Sieve::new(prime_bound as usize);
    let mut acc = CompensatedSum::new();
    let log_factor = |q: f64| (-1.0 / (q * q)).ln_1p();
    for p in sieve.primes_from(2).take_while(|&p| p as u64 <= prime_bound) {
        let pf = p as f64;
        match quad.map(|d| kronecker(d, p as u64)) {
            None | Some(0) => acc.add(log_factor(pf)),
            Some(1) => {
                acc.add(log_factor(pf));
                acc.add(log_factor(pf));
            }
            Some(_) => {
                if (p as u64).checked_mul(p as u64).is_some_and(|n| n <= prime_bound) {
                    acc.add(log_factor(pf * pf));
                }
            }
        }
    }
    let log = acc.value();
    let value = log.exp();
    let rounding_error = value * (acc.error() + 2.0 * EPS);
    let tail = if quad.is_some() { 2.0 } else { 1.0 } / prime_bound as f64;
    Ok(EulerProduct {
        prime_bound,
        value,
        rounding_error,
        tail,
        lower: (value - rounding_error) * (1.0 - tail),
        upper: value + rounding_error,
    })
}

/// Symbolic form `coefficient * pi^k * R_K^e / sqrt(|Delta|)^s / L(2, chi_D)^l`.
#[derive(Clone, Debug, PartialEq)]
struct Symbolic {
    coefficient: Rational,
    pi_power: i32,
    regulator: bool,
    sqrt_disc: Option<u64>,
    l_value: Option<i64>,
    zeta2: bool,
}

impl fmt::Display for Symbolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = vec![self.coefficient.numer().to_string()];
        match self.pi_power {
            0 => {}
            1 => num.push("pi".into()),
            k if k > 0 => num.push(format!("pi^{k}")),
            _ => {}
        }
        if self.regulator {
            num.push("R_K".into());
        }
        let mut den = Vec::new();
        if !self.coefficient.denom().eq(&1.into()) {
            den.push(self.coefficient.denom().to_string());
        }
        match self.pi_power {
            -1 => den.push("pi".into()),
            k if k < -1 => den.push(format!("pi^{}", -k)),
            _ => {}
        }
        if let Some(d) = self.sqrt_disc {
            den.push(format!("sqrt({d})"));
        }
        if let Some(d) = self.l_value {
            den.push(format!("L(2,chi_{d})"));
        }
        if self.zeta2 {
            den.push("zeta_K(2)".into());
        }
        let num = if num.len() > 1 && num[0] == "1" { num[1..].join("*") } else { num.join("*") };
        match den.len() {
            0 => f.write_str(&num),
            1 => write!(f, "{num}/{}", den[0]),
            _ => write!(f, "{num}/({})", den.join("*")),
        }
    }
}

fn symbolic_constant(inv: &FieldInvariants, alpha: &Rational) -> Symbolic {
    let int = |n: u64| Rational::from_integer(n.into());
    // alpha * 2^r1 (2pi)^r2 R h / (mu sqrt|D|) / |D| * 4^r1 (4 pi^2)^r2 / zeta_K(2)
    let mut coefficient = alpha.clone() * int(2u64.pow(inv.r1 + inv.r2)) * int(inv.class_number)
        / int(inv.mu)
        / int(inv.abs_disc)
        * int(4u64.pow(inv.r1 + inv.r2));
    let mut pi_power = 3 * inv.r2 as i32;
    let root = (inv.abs_disc as f64).sqrt().round() as u64;
    let sqrt_disc = if root * root == inv.abs_disc {
        coefficient /= int(root);
        None
    } else {
        Some(inv.abs_disc)
    };
    let (l_value, zeta2) = match (inv.zeta2, inv.degree(), inv.quad_disc) {
        (None, 1, _) => {
            coefficient *= int(6);
            pi_power -= 2;
            (None, false)
        }
        (None, 2, Some(d)) => {
            coefficient *= int(6);
            pi_power -= 2;
            (Some(d), false)
        }
        _ => (None, true),
    };
    Symbolic {
        coefficient,
        pi_power,
        regulator: inv.regulator != 1.0,
        sqrt_disc,
        l_value,
        zeta2,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantBreakdown {
    pub label: String,
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    pub rho: Tracked,
    pub arch_product: Tracked,
    pub finite_product: Tracked,
    pub c: Tracked,
    pub log_exponent: u32,
    /// `rk Pic U + #{v | inf} = 2q + 3`.
    pub b: u32,
    pub symbolic_c: String,
}

impl ConstantBreakdown {
    pub fn alpha_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.alpha).unwrap_or(f64::NAN)
    }
}

pub fn leading_constant(inv: &FieldInvariants) -> Result<ConstantBreakdown, ConstantsError> {
    inv.validate()?;
    let q = inv.unit_rank()?;
    let alpha = alpha_closed_form(q);
    let alpha_f = Tracked::rounded(num_traits::ToPrimitive::to_f64(&alpha).unwrap_or(f64::NAN));
    let rho = rho_k(inv)?;
    let arch_product = omega_arch(inv);
    let finite_product = dedekind_zeta_two(inv)?.recip();
    let c = alpha_f * rho / Tracked::exact(inv.abs_disc as f64) * arch_product * finite_product;
    Ok(ConstantBreakdown {
        label: inv.label.clone(),
        symbolic_c: symbolic_constant(inv, &alpha).to_string(),
        alpha,
        rho,
        arch_product,
        finite_product,
        c,
        log_exponent: 2 + 2 * q.get(),
        b: q.ambient_dimension() as u32,
    })
}

/// `c B (log B)^(2 + 2q)` for `B > 1`.
pub fn predicted_count(inv: &FieldInvariants, bound: f64) -> Result<f64, ConstantsError> {
    if !(bound > 1.0 && bound.is_finite()) {
        return Err(ConstantsError::OutOfRange(format!("bound {bound} must exceed 1")));
    }
    let k = leading_constant(inv)?;
    Ok(k.c.value * bound * bound.ln().powi(k.log_exponent as i32))
}

/// Fundamental discriminant check, used when reading user data.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    let squarefree = |n: i64| {
        let n = n.unsigned_abs();
        (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k * k))
    };
    match d.rem_euclid(4) {
        1 => d != 1 && squarefree(d),
        0 => matches!((d / 4).rem_euclid(4), 2 | 3) && squarefree(d / 4),
        _ => false,
    }
}
