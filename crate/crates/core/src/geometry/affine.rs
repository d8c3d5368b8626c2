use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg;
use super::Rational;

/// The inequality `<coefficients, x> + constant >= 0`.
///
/// Both `x >= ...` and `x <= ...` forms are accepted by the constructors and
/// stored in this single orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl AffineForm {
    /// `<coefficients, x> + constant >= 0`.
    pub fn geq(coefficients: Vec<Rational>, constant: Rational) -> Self {
        Self {
            coefficients,
            constant,
        }
    }

    /// `<coefficients, x> <= bound`.
    pub fn leq(coefficients: Vec<Rational>, bound: Rational) -> Self {
        Self {
            coefficients: coefficients.into_iter().map(|c| -c).collect(),
            constant: bound,
        }
    }

    /// Integer convenience constructor for `<coefficients, x> + constant >= 0`.
    pub fn geq_int(coefficients: &[i64], constant: i64) -> Self {
        Self::geq(
            coefficients.iter().map(|&c| Rational::from_integer(c.into())).collect(),
            Rational::from_integer(constant.into()),
        )
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (c, v) in self.coefficients.iter().zip(x) {
            if !c.is_zero() {
                acc += c * v;
            }
        }
        acc
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        !self.evaluate(x).is_negative()
    }

    /// Positive rescaling to integer coefficients and constant with content 1.
    pub fn normalized(&self) -> Self {
        let mut all = self.coefficients.clone();
        all.push(self.constant.clone());
        let mut ints = linalg::primitive_integer(&all);
        let constant = ints.pop().unwrap_or_else(BigInt::zero);
        Self {
            coefficients: linalg::to_rational(&ints),
            constant: Rational::from_integer(constant),
        }
    }

    /// The row `(coefficients, constant)` as integers, assuming the form is
    /// already normalized.
    pub(crate) fn integer_row(&self) -> Vec<BigInt> {
        debug_assert!(self.coefficients.iter().all(|c| c.is_integer()));
        self.coefficients
            .iter()
            .chain(std::iter::once(&self.constant))
            .map(|c| c.to_integer())
            .collect()
    }
}
