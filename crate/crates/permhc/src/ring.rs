//! Minimal commutative-ring abstraction so the reference counters run over
//! field elements, truncated series and big integers alike.

use crate::field::{FieldCtx, FieldElem};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub trait Ring {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl Ring for FieldCtx {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldCtx::zero(self)
    }

    fn one(&self) -> FieldElem {
        FieldCtx::one(self)
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::add(self, a, b)
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::sub(self, a, b)
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldCtx::neg(self, a)
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldCtx::mul(self, a, b)
    }

    fn is_zero(&self, a: &FieldElem) -> bool {
        FieldCtx::is_zero(self, a)
    }
}

/// The ring of arbitrary-precision integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntRing;

impl Ring for IntRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}
