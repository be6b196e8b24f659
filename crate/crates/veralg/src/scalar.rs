//! The coefficient abstraction shared by the free-magma layer.
//!
//! Algebra elements are generic over their scalars so the same machinery
//! runs with concrete field elements (grid checks, CLI evaluation) and with
//! polynomials in formal parameters (axiom derivations, scaling laws).

use crate::exactfield::FieldElement;
use std::fmt::{Debug, Display};
use std::hash::Hash;

pub trait Scalar: Clone + PartialEq + Eq + Hash + Debug + Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Embed a concrete field element.
    fn from_field(x: &FieldElement) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_field(&FieldElement::from_int(n))
    }
}

impl Scalar for FieldElement {
    fn zero() -> Self {
        FieldElement::zero()
    }
    fn one() -> Self {
        FieldElement::one()
    }
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        FieldElement::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        FieldElement::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        FieldElement::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        FieldElement::neg(self)
    }
    fn from_field(x: &FieldElement) -> Self {
        x.clone()
    }
}
