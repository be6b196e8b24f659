//! Exact scalar arithmetic over the rationals and real quadratic extensions.
//!
//! Every scalar is an element `a + b*sqrt(d)` with `a`, `b` exact rationals
//! and `d` a fixed square-free integer (`d > 1`).  Plain rationals are the
//! special case `b = 0`, for which the stored `d` is irrelevant and kept at
//! zero.  All arithmetic is exact; there is no floating point anywhere.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// Which coefficient field we are working over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// The rational numbers.
    Rationals,
    /// The real quadratic field `Q(sqrt(d))`, `d` square-free and `> 1`.
    Quadratic { d: i64 },
}

impl FieldSpec {
    pub fn quadratic(d: i64) -> Result<FieldSpec, FieldError> {
        if d <= 1 || !is_square_free(d) {
            return Err(FieldError::BadDiscriminant(d));
        }
        Ok(FieldSpec::Quadratic { d })
    }

    /// The automorphisms of the field fixing `Q`: just the identity for `Q`
    /// itself, and additionally conjugation `sqrt(d) -> -sqrt(d)` for a
    /// quadratic field.
    pub fn automorphisms(&self) -> Vec<FieldAutomorphism> {
        match self {
            FieldSpec::Rationals => vec![FieldAutomorphism::Identity],
            FieldSpec::Quadratic { .. } => {
                vec![FieldAutomorphism::Identity, FieldAutomorphism::Conjugation]
            }
        }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        match self {
            FieldSpec::Rationals => x.b.is_zero(),
            FieldSpec::Quadratic { d } => x.b.is_zero() || x.d == *d,
        }
    }
}

fn is_square_free(d: i64) -> bool {
    let mut n = d;
    let mut p = 2i64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

/// A field automorphism over `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldAutomorphism {
    Identity,
    Conjugation,
}

impl FieldAutomorphism {
    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        match self {
            FieldAutomorphism::Identity => x.clone(),
            FieldAutomorphism::Conjugation => FieldElement {
                a: x.a.clone(),
                b: -x.b.clone(),
                d: x.d,
            },
        }
    }

    pub fn compose(&self, other: &FieldAutomorphism) -> FieldAutomorphism {
        use FieldAutomorphism::*;
        match (self, other) {
            (Identity, x) | (x, Identity) => *x,
            (Conjugation, Conjugation) => Identity,
        }
    }

    pub fn inverse(&self) -> FieldAutomorphism {
        // Both automorphisms are involutions.
        *self
    }

    pub fn name(&self) -> &'static str {
        match self {
            FieldAutomorphism::Identity => "identity",
            FieldAutomorphism::Conjugation => "conjugation",
        }
    }

    pub fn from_name(s: &str) -> Result<FieldAutomorphism, FieldError> {
        match s {
            "identity" => Ok(FieldAutomorphism::Identity),
            "conjugation" => Ok(FieldAutomorphism::Conjugation),
            _ => Err(FieldError::BadAutomorphism(s.to_string())),
        }
    }
}

impl fmt::Display for FieldAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("discriminant {0} is not square-free and > 1")]
    BadDiscriminant(i64),
    #[error("unknown field automorphism `{0}`")]
    BadAutomorphism(String),
    #[error("cannot parse `{0}` as a field element")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixing elements of Q(sqrt({0})) and Q(sqrt({1}))")]
    MixedFields(i64, i64),
}

/// An element `a + b*sqrt(d)`.  When `b = 0` the element is rational and
/// `d = 0` by convention, so rationals from different contexts compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    a: BigRational,
    b: BigRational,
    d: i64,
}

impl FieldElement {
    pub fn from_rational(a: BigRational) -> FieldElement {
        FieldElement {
            a,
            b: BigRational::zero(),
            d: 0,
        }
    }

    pub fn from_int(n: i64) -> FieldElement {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> FieldElement {
        assert!(q != 0, "zero denominator");
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn quadratic(a: BigRational, b: BigRational, d: i64) -> FieldElement {
        let mut x = FieldElement { a, b, d };
        x.normalize();
        x
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: i64) -> FieldElement {
        FieldElement {
            a: BigRational::zero(),
            b: BigRational::one(),
            d,
        }
    }

    fn normalize(&mut self) {
        if self.b.is_zero() {
            self.d = 0;
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn zero() -> FieldElement {
        Self::from_int(0)
    }

    pub fn one() -> FieldElement {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Common discriminant of two operands, or an error if they genuinely
    /// live in different quadratic fields.
    fn join_d(&self, rhs: &FieldElement) -> Result<i64, FieldError> {
        match (self.b.is_zero(), rhs.b.is_zero()) {
            (true, true) => Ok(0),
            (true, false) => Ok(rhs.d),
            (false, true) => Ok(self.d),
            (false, false) => {
                if self.d == rhs.d {
                    Ok(self.d)
                } else {
                    Err(FieldError::MixedFields(self.d, rhs.d))
                }
            }
        }
    }

    pub fn add(&self, rhs: &FieldElement) -> FieldElement {
        let d = self.join_d(rhs).expect("mixed quadratic fields");
        FieldElement::quadratic(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }

    pub fn sub(&self, rhs: &FieldElement) -> FieldElement {
        let d = self.join_d(rhs).expect("mixed quadratic fields");
        FieldElement::quadratic(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d,
        }
    }

    pub fn mul(&self, rhs: &FieldElement) -> FieldElement {
        let d = self.join_d(rhs).expect("mixed quadratic fields");
        let dd = BigRational::from_integer(BigInt::from(d));
        // (a1 + b1 r)(a2 + b2 r) = a1 a2 + d b1 b2 + (a1 b2 + b1 a2) r
        FieldElement::quadratic(
            &self.a * &rhs.a + dd * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(FieldElement::from_rational(self.a.recip()));
        }
        // 1/(a + b r) = (a - b r) / (a^2 - d b^2); the norm is nonzero
        // because d is not a rational square.
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - dd * &self.b * &self.b;
        assert!(!norm.is_zero(), "nonzero element with zero norm");
        Ok(FieldElement::quadratic(
            &self.a / &norm,
            -&self.b / &norm,
            self.d,
        ))
    }

    pub fn div(&self, rhs: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, n: u32) -> FieldElement {
        let mut acc = FieldElement::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parse the canonical text form: `p/q` (with `/q` elided when `q = 1`)
    /// or `[p/q, r/s]` for `p/q + (r/s)*sqrt(d)`.  The discriminant for the
    /// bracket form comes from `spec`.
    pub fn parse(s: &str, spec: &FieldSpec) -> Result<FieldElement, FieldError> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix('[') {
            let body = body
                .strip_suffix(']')
                .ok_or_else(|| FieldError::Parse(s.to_string()))?;
            let mut parts = body.splitn(2, ',');
            let a = parse_rational(parts.next().unwrap_or(""))
                .ok_or_else(|| FieldError::Parse(s.to_string()))?;
            let b = parse_rational(parts.next().unwrap_or(""))
                .ok_or_else(|| FieldError::Parse(s.to_string()))?;
            let d = match spec {
                FieldSpec::Quadratic { d } => *d,
                FieldSpec::Rationals => {
                    if b.is_zero() {
                        0
                    } else {
                        return Err(FieldError::Parse(format!(
                            "`{s}` has a radical part but the field is the rationals"
                        )));
                    }
                }
            };
            Ok(FieldElement::quadratic(a, b, d))
        } else {
            parse_rational(s)
                .map(FieldElement::from_rational)
                .ok_or_else(|| FieldError::Parse(s.to_string()))
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

fn fmt_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            f.write_str(&fmt_rational(&self.a))
        } else {
            write!(f, "[{}, {}]", fmt_rational(&self.a), fmt_rational(&self.b))
        }
    }
}

impl FieldElement {
    /// True if the element is a negative rational (used only for rendering
    /// `+ -c` as `- c` in expression output).
    pub fn is_negative_rational(&self) -> bool {
        self.b.is_zero() && self.a.is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, q_: i64) -> FieldElement {
        FieldElement::ratio(p, q_)
    }

    fn s2(a: (i64, i64), b: (i64, i64)) -> FieldElement {
        FieldElement::quadratic(
            BigRational::new(BigInt::from(a.0), BigInt::from(a.1)),
            BigRational::new(BigInt::from(b.0), BigInt::from(b.1)),
            2,
        )
    }

    #[test]
    fn quadratic_arithmetic() {
        let r = FieldElement::sqrt_d(2);
        assert_eq!(r.mul(&r), FieldElement::from_int(2));
        let x = s2((1, 1), (1, 1)); // 1 + sqrt 2
        let y = x.inv().unwrap(); // -1 + sqrt 2
        assert_eq!(x.mul(&y), FieldElement::one());
        assert_eq!(y, s2((-1, 1), (1, 1)));
    }

    #[test]
    fn conjugation_is_a_field_automorphism() {
        let c = FieldAutomorphism::Conjugation;
        let x = s2((2, 3), (-1, 2));
        let y = s2((5, 1), (1, 7));
        assert_eq!(c.apply(&x.mul(&y)), c.apply(&x).mul(&c.apply(&y)));
        assert_eq!(c.apply(&x.add(&y)), c.apply(&x).add(&c.apply(&y)));
        assert_eq!(c.apply(&c.apply(&x)), x);
        assert_eq!(c.apply(&q(3, 4)), q(3, 4));
    }

    #[test]
    fn text_round_trip() {
        let spec = FieldSpec::quadratic(2).unwrap();
        for x in [
            q(0, 1),
            q(-5, 3),
            q(7, 1),
            s2((1, 2), (-3, 4)),
            s2((0, 1), (1, 1)),
        ] {
            let text = x.to_string();
            let back = FieldElement::parse(&text, &spec).unwrap();
            assert_eq!(back, x, "round trip through `{text}`");
        }
        assert_eq!(
            FieldElement::parse("[1/2, -3/4]", &spec).unwrap(),
            s2((1, 2), (-3, 4))
        );
        assert_eq!(FieldElement::parse(" -4/6 ", &spec).unwrap(), q(-2, 3));
    }

    #[test]
    fn parse_rejects_garbage() {
        let spec = FieldSpec::Rationals;
        for bad in ["", "x", "1/0", "[1,2", "[1, 2]", "1/2/3"] {
            assert!(
                FieldElement::parse(bad, &spec).is_err(),
                "`{bad}` should not parse"
            );
        }
        assert!(FieldSpec::quadratic(4).is_err());
        assert!(FieldSpec::quadratic(12).is_err());
        assert!(FieldSpec::quadratic(1).is_err());
        assert!(FieldSpec::quadratic(3).is_ok());
    }
}
