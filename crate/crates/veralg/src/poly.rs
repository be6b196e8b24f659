//! Multivariate polynomials over the exact coefficient field.
//!
//! Variables are plain interned names ("a", "alpha12", ...).  These
//! polynomials carry the formal parameters that appear in scalar-word
//! coefficient functions, in the general word-system solver, and in formal
//! scaling checks.  Constant polynomials double as plain field elements, so
//! a single code path handles both concrete and symbolic computations.

use crate::exactfield::{FieldAutomorphism, FieldElement, FieldSpec};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// A power product of named variables; the empty product is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarPow(pub BTreeMap<String, u32>);

impl VarPow {
    fn one() -> VarPow {
        VarPow::default()
    }

    fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, rhs: &VarPow) -> VarPow {
        let mut out = self.0.clone();
        for (v, e) in &rhs.0 {
            *out.entry(v.clone()).or_insert(0) += e;
        }
        VarPow(out)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.values().sum()
    }
}

impl fmt::Display for VarPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with `FieldElement` coefficients; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<VarPow, FieldElement>,
}

impl Poly {
    pub fn constant(c: FieldElement) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(VarPow::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(FieldElement::from_int(n))
    }

    pub fn var(name: &str) -> Poly {
        let mut pow = BTreeMap::new();
        pow.insert(name.to_string(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(VarPow(pow), FieldElement::one());
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarPow, &FieldElement)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.terms.is_empty() {
            return Some(FieldElement::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&VarPow::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert(&mut self, pow: VarPow, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(pow) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        let mut out = Poly::default();
        for (pow, k) in &self.terms {
            out.insert(pow.clone(), k.mul(c));
        }
        out
    }

    /// Substitute `value` for every occurrence of variable `name`.
    pub fn subst(&self, name: &str, value: &Poly) -> Poly {
        let mut out = Poly::default();
        for (pow, c) in &self.terms {
            let mut rest = pow.clone();
            let e = rest.0.remove(name).unwrap_or(0);
            let mut term = Poly::constant(c.clone());
            for _ in 0..e {
                term = term.mul(value);
            }
            let base = Poly {
                terms: [(rest, FieldElement::one())].into_iter().collect(),
            };
            out = out.add(&term.mul(&base));
        }
        out
    }

    /// Substitute several variables at once.
    pub fn subst_all(&self, map: &BTreeMap<String, Poly>) -> Poly {
        let mut out = self.clone();
        for (name, value) in map {
            out = out.subst(name, value);
        }
        out
    }

    /// Apply a field automorphism to every coefficient.
    pub fn map_coeffs(&self, phi: &FieldAutomorphism) -> Poly {
        let mut out = Poly::default();
        for (pow, c) in &self.terms {
            out.insert(pow.clone(), phi.apply(c));
        }
        out
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, name: &str) -> u32 {
        self.terms
            .keys()
            .map(|p| p.0.get(name).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// All variable names that occur.
    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .terms
            .keys()
            .flat_map(|p| p.0.keys().cloned())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Collect the polynomial as a linear form `sum coeff_i * u_i + rest`
    /// over the given set of variables.  Returns `None` if any term has
    /// joint degree >= 2 in those variables.
    pub fn as_linear_in<'a>(
        &self,
        vars: &[&'a str],
    ) -> Option<(BTreeMap<&'a str, Poly>, Poly)> {
        let mut coeffs: BTreeMap<&str, Poly> = BTreeMap::new();
        let mut rest = Poly::default();
        for (pow, c) in &self.terms {
            let mut hit: Option<&str> = None;
            let mut joint = 0;
            for v in vars {
                let e = pow.0.get(*v).copied().unwrap_or(0);
                joint += e;
                if e > 0 {
                    hit = Some(v);
                }
            }
            if joint == 0 {
                rest.insert(pow.clone(), c.clone());
            } else if joint == 1 {
                let v = hit.unwrap();
                let mut stripped = pow.clone();
                stripped.0.remove(v);
                coeffs
                    .entry(v)
                    .or_default()
                    .insert(stripped, c.clone());
            } else {
                return None;
            }
        }
        Some((coeffs, rest))
    }

    /// Evaluate with concrete values for every variable; errors if a
    /// variable is missing from the assignment.
    pub fn eval(&self, env: &BTreeMap<String, FieldElement>) -> Option<FieldElement> {
        let mut acc = FieldElement::zero();
        for (pow, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in &pow.0 {
                let val = env.get(v)?;
                term = term.mul(&val.pow(*e));
            }
            acc = acc.add(&term);
        }
        Some(acc)
    }

    /// Parse a polynomial in the variables listed, e.g. `a^2 - a` or
    /// `[0, 1]*a^3 + 2`.  Scalars use the field-element text form.
    pub fn parse(s: &str, spec: &FieldSpec, vars: &[&str]) -> Result<Poly, String> {
        parse::poly(s, spec, vars)
    }
}

impl Scalar for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::int(1)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (pow, c) in &rhs.terms {
            out.insert(pow.clone(), c.clone());
        }
        out
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Poly::default();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &rhs.terms {
                out.insert(p1.mul(p2), c1.mul(c2));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        let mut out = Poly::default();
        for (pow, c) in &self.terms {
            out.insert(pow.clone(), c.neg());
        }
        out
    }
    fn from_field(x: &FieldElement) -> Self {
        Poly::constant(x.clone())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest-degree terms first reads more naturally for univariate
        // coefficient functions like `a^2 - a`.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|(p1, _), (p2, _)| {
            (p2.total_degree(), *p2).cmp(&(p1.total_degree(), *p1))
        });
        for (i, (pow, c)) in items.into_iter().enumerate() {
            let (lead, body) = if c.is_negative_rational() {
                ("-", c.neg())
            } else {
                ("+", c.clone())
            };
            if i == 0 {
                if lead == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {lead} ")?;
            }
            if pow.is_one() {
                write!(f, "{body}")?;
            } else if body.is_one() {
                write!(f, "{pow}")?;
            } else {
                write!(f, "{body}*{pow}")?;
            }
        }
        Ok(())
    }
}

mod parse {
    use super::*;

    pub fn poly(s: &str, spec: &FieldSpec, vars: &[&str]) -> Result<Poly, String> {
        let mut p = P {
            src: s,
            pos: 0,
            spec,
            vars,
        };
        p.skip_ws();
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(format!("trailing input at byte {} in `{s}`", p.pos));
        }
        Ok(out)
    }

    struct P<'a> {
        src: &'a str,
        pos: usize,
        spec: &'a FieldSpec,
        vars: &'a [&'a str],
    }

    impl<'a> P<'a> {
        fn rest(&self) -> &'a str {
            &self.src[self.pos..]
        }

        fn skip_ws(&mut self) {
            while self.rest().starts_with(char::is_whitespace) {
                self.pos += 1;
            }
        }

        fn eat(&mut self, c: char) -> bool {
            self.skip_ws();
            if self.rest().starts_with(c) {
                self.pos += c.len_utf8();
                true
            } else {
                false
            }
        }

        fn expr(&mut self) -> Result<Poly, String> {
            let mut acc = if self.eat('-') {
                self.term()?.neg()
            } else {
                self.term()?
            };
            loop {
                if self.eat('+') {
                    acc = acc.add(&self.term()?);
                } else if self.eat('-') {
                    acc = acc.sub(&self.term()?);
                } else {
                    return Ok(acc);
                }
            }
        }

        fn term(&mut self) -> Result<Poly, String> {
            let mut acc = self.factor()?;
            while self.eat('*') {
                acc = acc.mul(&self.factor()?);
            }
            Ok(acc)
        }

        fn factor(&mut self) -> Result<Poly, String> {
            self.skip_ws();
            let rest = self.rest();
            if rest.starts_with('(') {
                self.eat('(');
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(format!("missing `)` at byte {}", self.pos));
                }
                return self.maybe_pow(inner);
            }
            if rest.starts_with('[') {
                let end = rest
                    .find(']')
                    .ok_or_else(|| format!("missing `]` in `{}`", self.src))?;
                let tok = &rest[..=end];
                self.pos += end + 1;
                let c = FieldElement::parse(tok, self.spec).map_err(|e| e.to_string())?;
                return Ok(Poly::constant(c));
            }
            // Variable names first (longest match), then numeric literals.
            let mut names: Vec<&str> = self.vars.to_vec();
            names.sort_by_key(|n| std::cmp::Reverse(n.len()));
            for name in names {
                if rest.starts_with(name) {
                    let after = &rest[name.len()..];
                    let boundary = after
                        .chars()
                        .next()
                        .map_or(true, |c| !c.is_alphanumeric() && c != '_');
                    if boundary || after.starts_with('^') {
                        self.pos += name.len();
                        return self.maybe_pow(Poly::var(name));
                    }
                }
            }
            let len = rest
                .char_indices()
                .take_while(|(_, c)| c.is_ascii_digit() || *c == '/')
                .map(|(i, c)| i + c.len_utf8())
                .last()
                .unwrap_or(0);
            if len == 0 {
                return Err(format!("expected a factor at byte {}", self.pos));
            }
            let tok = &rest[..len];
            self.pos += len;
            let c = FieldElement::parse(tok, self.spec).map_err(|e| e.to_string())?;
            Ok(Poly::constant(c))
        }

        fn maybe_pow(&mut self, base: Poly) -> Result<Poly, String> {
            if !self.eat('^') {
                return Ok(base);
            }
            self.skip_ws();
            let rest = self.rest();
            let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
            if len == 0 {
                return Err(format!("expected an exponent at byte {}", self.pos));
            }
            let e: u32 = rest[..len].parse().map_err(|_| "bad exponent".to_string())?;
            self.pos += len;
            let mut acc = Poly::int(1);
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            Ok(acc)
        }
    }
}
