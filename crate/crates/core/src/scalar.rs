//! Scalar and ring abstractions shared by the whole series tower.
//!
//! Every coefficient ring in the crate is generic over a base field `Q`
//! implementing [`Scalar`]. The intended instantiation is the exact
//! arbitrary-precision [`crate::Rational`]; machine rationals such as
//! `Ratio<i64>` also satisfy the bound but may overflow on deep recursions.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{NumAssignRef, NumRef, Signed};

/// Exact base field of the tower.
pub trait Scalar:
    NumRef + NumAssignRef + Signed + Clone + PartialEq + Debug + Display + FromStr + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

impl Scalar for Ratio<BigInt> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }
}

impl Scalar for Ratio<i64> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n)
    }
}

/// Additive and multiplicative structure without distinguished elements.
///
/// Series whose shape depends on runtime data (number of variables,
/// truncation windows) implement only this part; matrices over them still
/// multiply.
pub trait Arith: Clone + Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

/// Commutative ring with unit. `is_zero` is equality to zero within the
/// value's known precision.
pub trait Ring: Arith + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(n: i64) -> Self;
}

/// A ring that is an algebra over `EpsLaurent<Q>` and carries the
/// derivation ∂_X. Implemented by symbolic differential polynomials and by
/// concrete X-jets, which lets the resolvent run on either.
pub trait DiffAlgebra<Q: Scalar>: Ring {
    fn from_eps(c: crate::EpsLaurent<Q>) -> Self;
    fn scale(&self, c: &crate::EpsLaurent<Q>) -> Self;
    fn derive(&self) -> Self;
}

impl<Q: Scalar> Arith for Q {
    fn add(&self, other: &Self) -> Self {
        self.clone() + other
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
}

impl<Q: Scalar> Ring for Q {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn from_int(n: i64) -> Self {
        Q::from_i64(n)
    }
}

/// Sum of an iterator of ring elements.
pub fn sum<R: Ring>(items: impl IntoIterator<Item = R>) -> R {
    items.into_iter().fold(R::zero(), |acc, x| acc.add(&x))
}
