//! Field-context traits shared by every coefficient domain in the crate.
//!
//! Elements are plain data; all arithmetic goes through a context value that
//! knows the characteristic, the modulus of `F_q` and, for towers, the
//! defining polynomials. Contexts are cheap to clone (they hold an `Arc`).

use std::fmt::Debug;

use thiserror::Error;

use crate::fields::Fq;
use crate::fields::Poly;

/// Errors raised by field arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    /// Inversion failed in a quotient ring whose defining polynomial is reducible.
    #[error("{element} is a zero divisor: it is annihilated by {annihilator}")]
    ZeroDivisor { element: String, annihilator: String },
    #[error("invalid field: {0}")]
    InvalidField(String),
}

/// A commutative field (or, for unverified towers, a commutative ring whose
/// inversion may fail with [`FieldError::ZeroDivisor`]).
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + Debug + PartialEq {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    /// Image of an integer under `Z -> F`.
    fn from_int(&self, n: i64) -> Self::Elem;
    fn characteristic(&self) -> u32;
    /// Human-readable form, parseable by the manifest expression grammar.
    fn format(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// A field of characteristic `p` containing `F_q`, with the `q`-power
/// Frobenius `x -> x^q` available as a ring endomorphism.
pub trait FrobeniusField: Field {
    fn q(&self) -> u64;

    /// `x^(q^i)`.
    fn frobenius(&self, a: &Self::Elem, i: u32) -> Self::Elem;
}

/// A field containing the rational function field `F_q(T)`.
#[allow(clippy::wrong_self_convention)]
pub trait FunctionField: FrobeniusField {
    fn fq(&self) -> &crate::fields::FiniteField;

    /// The transcendental `T`.
    fn t(&self) -> Self::Elem {
        self.from_poly(&Poly::monomial(self.fq().one(), 1))
    }

    fn from_poly(&self, a: &Poly) -> Self::Elem;

    fn from_fq(&self, c: Fq) -> Self::Elem {
        self.from_poly(&Poly::constant(c))
    }
}
