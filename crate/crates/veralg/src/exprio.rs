//! Text and document I/O: the expression grammar, canonical formatting, and
//! (further down) the JSON word-system / parameter documents.
//!
//! Grammar:
//!   expr   := term (('+' | '-') term)*
//!   term   := factor ('*' factor)*
//!   factor := scalar | generator | '(' expr ')'
//! `*` is left-associative.  A scalar operand turns `*` into scalar action;
//! scalar factors fold together.  Scalars are written `p/q` or `[p/q, r/s]`.

use crate::exactfield::{FieldElement, FieldSpec};
use crate::freemagma::AlgebraElement;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {0}: {1}")]
    Syntax(usize, String),
    #[error("generator x{0} exceeds the generator count {1}")]
    GeneratorRange(u32, u32),
    #[error("a nonzero scalar with no generator is not an algebra element")]
    BareScalar,
}

/// Outcome of a parse: the element plus any lint warnings (currently only
/// the unparenthesized-association lint).
pub struct Parsed {
    pub element: AlgebraElement<FieldElement>,
    pub warnings: Vec<String>,
}

pub fn parse_expression(
    text: &str,
    generator_count: u32,
    field: &FieldSpec,
) -> Result<Parsed, ExprError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        gens: generator_count,
        field,
        warnings: Vec::new(),
    };
    p.skip_ws();
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ExprError::Syntax(p.pos, "trailing input".into()));
    }
    let element = match v {
        Operand::Element(e) => e,
        Operand::Scalar(c) => {
            if c.is_zero() {
                AlgebraElement::zero(generator_count)
            } else {
                return Err(ExprError::BareScalar);
            }
        }
    };
    Ok(Parsed {
        element,
        warnings: p.warnings,
    })
}

/// A factor chain evaluates to either a folded scalar or an element.
enum Operand {
    Scalar(FieldElement),
    Element(AlgebraElement<FieldElement>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    gens: u32,
    field: &'a FieldSpec,
    warnings: Vec<String>,
}

impl<'a> Parser<'a> {
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

    fn expr(&mut self) -> Result<Operand, ExprError> {
        let mut acc = self.term()?;
        loop {
            let sub = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Ok(acc);
            };
            let rhs = self.term()?;
            acc = add_values(acc, rhs, sub, self.gens)?;
        }
    }

    fn term(&mut self) -> Result<Operand, ExprError> {
        let mut acc = self.factor()?;
        let mut element_factors = matches!(acc, Operand::Element(_)) as u32;
        while self.eat('*') {
            let rhs = self.factor()?;
            element_factors += matches!(rhs, Operand::Element(_)) as u32;
            acc = mul_values(acc, rhs);
        }
        if element_factors >= 3 {
            self.warnings.push(format!(
                "term with {element_factors} unparenthesized factors near byte {}: \
                 '*' is nonassociative, interpreted left-associatively",
                self.pos
            ));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Operand, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        if rest.starts_with('(') {
            self.eat('(');
            let inner = self.expr()?;
            if !self.eat(')') {
                return Err(ExprError::Syntax(self.pos, "missing `)`".into()));
            }
            return Ok(inner);
        }
        if rest.starts_with('[') {
            let end = rest
                .find(']')
                .ok_or_else(|| ExprError::Syntax(start, "missing `]`".into()))?;
            let tok = &rest[..=end];
            self.pos += end + 1;
            let c = FieldElement::parse(tok, self.field)
                .map_err(|e| ExprError::Syntax(start, e.to_string()))?;
            return Ok(Operand::Scalar(c));
        }
        // Generator: x<digits>
        if let Some(after) = rest.strip_prefix('x') {
            let len = after.chars().take_while(|c| c.is_ascii_digit()).count();
            if len > 0 {
                let idx: u32 = after[..len]
                    .parse()
                    .map_err(|_| ExprError::Syntax(start, "bad generator index".into()))?;
                if idx == 0 {
                    return Err(ExprError::Syntax(start, "generators start at x1".into()));
                }
                if idx > self.gens {
                    return Err(ExprError::GeneratorRange(idx, self.gens));
                }
                self.pos += 1 + len;
                return Ok(Operand::Element(AlgebraElement::generator(idx, self.gens)));
            }
        }
        // Rational literal (optionally signed).
        let mut len = 0;
        let bytes = rest.as_bytes();
        if len < bytes.len() && (bytes[len] == b'-' || bytes[len] == b'+') {
            len += 1;
        }
        let digits_start = len;
        while len < bytes.len() && (bytes[len].is_ascii_digit() || bytes[len] == b'/') {
            len += 1;
        }
        if len == digits_start {
            return Err(ExprError::Syntax(
                start,
                "expected a scalar, generator, or `(`".into(),
            ));
        }
        let tok = &rest[..len];
        self.pos += len;
        let c = FieldElement::parse(tok, self.field)
            .map_err(|e| ExprError::Syntax(start, e.to_string()))?;
        Ok(Operand::Scalar(c))
    }
}

fn add_values(a: Operand, b: Operand, sub: bool, gens: u32) -> Result<Operand, ExprError> {
    let to_elem = |v: Operand| -> Result<AlgebraElement<FieldElement>, ExprError> {
        match v {
            Operand::Element(e) => Ok(e),
            Operand::Scalar(c) if c.is_zero() => Ok(AlgebraElement::zero(gens)),
            Operand::Scalar(_) => Err(ExprError::BareScalar),
        }
    };
    let ea = to_elem(a)?;
    let eb = to_elem(b)?;
    Ok(Operand::Element(if sub { ea.sub(&eb) } else { ea.add(&eb) }))
}

fn mul_values(a: Operand, b: Operand) -> Operand {
    match (a, b) {
        (Operand::Scalar(x), Operand::Scalar(y)) => Operand::Scalar(x.mul(&y)),
        (Operand::Scalar(x), Operand::Element(e)) | (Operand::Element(e), Operand::Scalar(x)) => {
            Operand::Element(e.scale(&x))
        }
        (Operand::Element(e1), Operand::Element(e2)) => Operand::Element(e1.product(&e2)),
    }
}

/// Canonical rendering; `parse_expression(format_expression(e)) = e`.
pub fn format_expression(e: &AlgebraElement<FieldElement>) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let (negative, body) = if c.is_negative_rational() {
            (true, c.neg())
        } else {
            (false, c.clone())
        };
        if i == 0 {
            if negative {
                // No unary minus in the grammar: keep the sign inside the
                // scalar literal, so the coefficient 1 is not elided here.
                out.push_str(&format!("{}*{}", c, m.render_parenthesized()));
                continue;
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if body.is_one() {
            out.push_str(&m.render());
        } else {
            out.push_str(&format!("{}*{}", body, m.render_parenthesized()));
        }
    }
    out
}

/// Debug-quality rendering for arbitrary scalars (parameter polynomials get
/// parenthesized); the round-trip contract only covers field scalars.
pub fn format_generic<S: Scalar>(e: &AlgebraElement<S>) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in e.terms() {
        let cs = c.to_string();
        if c == &S::one() {
            parts.push(m.render());
        } else if cs.contains(' ') && !cs.starts_with('[') {
            parts.push(format!("({cs})*{}", m.render_parenthesized()));
        } else {
            parts.push(format!("{cs}*{}", m.render_parenthesized()));
        }
    }
    parts.join(" + ")
}


// ---------------------------------------------------------------------------
// JSON documents.

use crate::autgroup::{
    params_to_wordsystem, AutError, ParamsKind, Side, StronglyStableParams,
};
use crate::exactfield::FieldAutomorphism;
use crate::freemagma::MagmaMonomial;
use crate::poly::Poly;
use crate::relfree::Variety;
use crate::verbal::{PElem, ScalarWordFamily, VerbalError, WordSystem};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocError {
    #[error("schema violation at {path}: {detail}")]
    Schema { path: String, detail: String },
    #[error("invariant violation: {constraint}: {detail}")]
    Constraint { constraint: String, detail: String },
}

fn schema(path: &str, detail: impl std::fmt::Display) -> DocError {
    DocError::Schema {
        path: path.to_string(),
        detail: detail.to_string(),
    }
}

impl From<AutError> for DocError {
    fn from(e: AutError) -> DocError {
        match e {
            AutError::Constraint { constraint, detail } => {
                DocError::Constraint { constraint, detail }
            }
            other => DocError::Constraint {
                constraint: "valid parameters".into(),
                detail: other.to_string(),
            },
        }
    }
}

impl From<VerbalError> for DocError {
    fn from(e: VerbalError) -> DocError {
        match e {
            VerbalError::Invariant { constraint, detail } => {
                DocError::Constraint { constraint, detail }
            }
            other => DocError::Constraint {
                constraint: "valid word system".into(),
                detail: other.to_string(),
            },
        }
    }
}

fn get_str<'a>(doc: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, DocError> {
    doc.get(key)
        .ok_or_else(|| schema(path, "missing required field"))?
        .as_str()
        .ok_or_else(|| schema(path, "expected a string"))
}

fn parse_variety(doc: &Map<String, Value>) -> Result<Variety, DocError> {
    let name = get_str(doc, "variety", "variety")?;
    Variety::from_cli_name(name).map_err(|e| schema("variety", e))
}

/// Field spec from the optional "field" member; rationals when absent.
fn parse_field(doc: &Map<String, Value>) -> Result<FieldSpec, DocError> {
    let Some(v) = doc.get("field") else {
        return Ok(FieldSpec::Rationals);
    };
    let obj = v
        .as_object()
        .ok_or_else(|| schema("field", "expected an object {\"kind\", [\"d\"]}"))?;
    match get_str(obj, "kind", "field.kind")? {
        "rationals" => Ok(FieldSpec::Rationals),
        "quadratic" => {
            let d = obj
                .get("d")
                .and_then(Value::as_i64)
                .ok_or_else(|| schema("field.d", "expected an integer"))?;
            FieldSpec::quadratic(d).map_err(|e| schema("field.d", e))
        }
        other => Err(schema("field.kind", format!("unknown field kind `{other}`"))),
    }
}

fn parse_phi(doc: &Map<String, Value>, field: FieldSpec) -> Result<FieldAutomorphism, DocError> {
    match doc.get("phi").and_then(Value::as_str) {
        None | Some("identity") => Ok(FieldAutomorphism::Identity),
        Some("conjugation") => {
            if field == FieldSpec::Rationals {
                Err(DocError::Constraint {
                    constraint: "phi compatible with field".into(),
                    detail: "conjugation needs a quadratic field".into(),
                })
            } else {
                Ok(FieldAutomorphism::Conjugation)
            }
        }
        Some(other) => Err(schema("phi", format!("unknown automorphism `{other}`"))),
    }
}

fn phi_name(phi: FieldAutomorphism) -> &'static str {
    match phi {
        FieldAutomorphism::Identity => "identity",
        FieldAutomorphism::Conjugation => "conjugation",
    }
}

fn field_json(field: FieldSpec) -> Value {
    match field {
        FieldSpec::Rationals => json!({"kind": "rationals"}),
        FieldSpec::Quadratic { d } => json!({"kind": "quadratic", "d": d}),
    }
}

fn parse_scalar_entry(
    doc: &Map<String, Value>,
    key: &str,
    field: &FieldSpec,
) -> Result<FieldElement, DocError> {
    let s = get_str(doc, key, key)?;
    FieldElement::parse(s, field).map_err(|e| schema(key, e))
}

/// Parameter document: flat scalars plus variety / field / phi.
pub fn load_params(doc: &Value) -> Result<StronglyStableParams, DocError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| schema("$", "expected a JSON object"))?;
    let variety = parse_variety(obj)?;
    let field = parse_field(obj)?;
    let phi = parse_phi(obj, field)?;
    let kind = match (variety.cli_name().as_str(), variety.nilpotency_degree()) {
        (_, Some(3)) => ParamsKind::Nilp3 {
            gamma12: parse_scalar_entry(obj, "gamma12", &field)?,
            alpha12: parse_scalar_entry(obj, "alpha12", &field)?,
            alpha21: parse_scalar_entry(obj, "alpha21", &field)?,
        },
        (_, Some(4)) => ParamsKind::Nilp4 {
            gamma12: parse_scalar_entry(obj, "gamma12", &field)?,
            gamma1_22: parse_scalar_entry(obj, "gamma1_22", &field)?,
            gamma11_2: parse_scalar_entry(obj, "gamma11_2", &field)?,
            alpha12: parse_scalar_entry(obj, "alpha12", &field)?,
            alpha21: parse_scalar_entry(obj, "alpha21", &field)?,
        },
        (_, Some(n)) => {
            return Err(schema(
                "variety",
                format!("no parameter document form for nilpotency degree {n}"),
            ))
        }
        ("free" | "power-associative", _) => ParamsKind::TwoAlpha {
            alpha12: parse_scalar_entry(obj, "alpha12", &field)?,
            alpha21: parse_scalar_entry(obj, "alpha21", &field)?,
        },
        ("alternative", _) => ParamsKind::Alternative {
            alpha: parse_scalar_entry(obj, "alpha", &field)?,
            side: match get_str(obj, "side", "side")? {
                "straight" => Side::Straight,
                "reversed" => Side::Reversed,
                other => return Err(schema("side", format!("unknown side `{other}`"))),
            },
        },
        _ => ParamsKind::OneAlpha {
            alpha12: parse_scalar_entry(obj, "alpha12", &field)?,
        },
    };
    let p = StronglyStableParams {
        variety,
        field,
        phi,
        kind,
    };
    p.validate()?;
    Ok(p)
}

pub fn save_params(p: &StronglyStableParams) -> Value {
    let mut obj = Map::new();
    obj.insert("variety".into(), json!(p.variety.cli_name()));
    obj.insert("field".into(), field_json(p.field));
    obj.insert("phi".into(), json!(phi_name(p.phi)));
    match &p.kind {
        ParamsKind::Nilp3 {
            gamma12,
            alpha12,
            alpha21,
        } => {
            obj.insert("gamma12".into(), json!(gamma12.to_string()));
            obj.insert("alpha12".into(), json!(alpha12.to_string()));
            obj.insert("alpha21".into(), json!(alpha21.to_string()));
        }
        ParamsKind::Nilp4 {
            gamma12,
            gamma1_22,
            gamma11_2,
            alpha12,
            alpha21,
        } => {
            obj.insert("gamma12".into(), json!(gamma12.to_string()));
            obj.insert("gamma1_22".into(), json!(gamma1_22.to_string()));
            obj.insert("gamma11_2".into(), json!(gamma11_2.to_string()));
            obj.insert("alpha12".into(), json!(alpha12.to_string()));
            obj.insert("alpha21".into(), json!(alpha21.to_string()));
        }
        ParamsKind::TwoAlpha { alpha12, alpha21 } => {
            obj.insert("alpha12".into(), json!(alpha12.to_string()));
            obj.insert("alpha21".into(), json!(alpha21.to_string()));
        }
        ParamsKind::OneAlpha { alpha12 } => {
            obj.insert("alpha12".into(), json!(alpha12.to_string()));
        }
        ParamsKind::Alternative { alpha, side } => {
            obj.insert("alpha".into(), json!(alpha.to_string()));
            obj.insert("side".into(), json!(side.name()));
        }
    }
    Value::Object(obj)
}

/// Word-system document: either the explicit schema (w_plus / w_dot /
/// scalar_family as expressions) or the parameter shorthand
/// {"params3": {...}} / {"params4": {...}}.
pub fn load_wordsystem(doc: &Value) -> Result<WordSystem, DocError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| schema("$", "expected a JSON object"))?;
    for (short, want) in [("params3", 3), ("params4", 4)] {
        if let Some(v) = obj.get(short) {
            let inner = v
                .as_object()
                .ok_or_else(|| schema(short, "expected an object"))?;
            let mut flat = inner.clone();
            for key in ["variety", "field", "phi"] {
                if let Some(x) = obj.get(key) {
                    flat.entry(key.to_string()).or_insert(x.clone());
                }
            }
            flat.entry("variety".to_string())
                .or_insert(json!(format!("nilpotent{want}")));
            let p = load_params(&Value::Object(flat))?;
            if p.variety.nilpotency_degree() != Some(want) {
                return Err(schema(
                    short,
                    format!("shorthand requires nilpotency degree {want}"),
                ));
            }
            return Ok(params_to_wordsystem(&p)?);
        }
    }

    let variety = parse_variety(obj)?;
    let field = parse_field(obj)?;
    let phi = parse_phi(obj, field)?;
    let word = |key: &str| -> Result<PElem, DocError> {
        let text = get_str(obj, key, key)?;
        let parsed = parse_expression(text, 2, &field).map_err(|e| schema(key, e))?;
        Ok(parsed.element.map_scalars(|c| Poly::constant(c.clone())))
    };
    let w_plus = word("w_plus")?;
    let w_dot = word("w_dot")?;

    let fam = obj
        .get("scalar_family")
        .ok_or_else(|| schema("scalar_family", "missing required field"))?
        .as_object()
        .ok_or_else(|| schema("scalar_family", "expected an object"))?;
    let mut coefficients: BTreeMap<MagmaMonomial, Poly> = BTreeMap::new();
    for (key, value) in fam {
        let path = format!("scalar_family.{key}");
        let parsed = parse_expression(key, 1, &field).map_err(|e| schema(&path, e))?;
        let mut terms = parsed.element.terms();
        let mono = match (terms.next(), terms.next()) {
            (Some((m, c)), None) if c.is_one() => m.clone(),
            _ => return Err(schema(&path, "key must be a single monomial")),
        };
        let text = value
            .as_str()
            .ok_or_else(|| schema(&path, "expected a polynomial string"))?;
        let poly = Poly::parse(text, &field, &["a"]).map_err(|e| schema(&path, e))?;
        coefficients.insert(mono, poly);
    }

    let w = WordSystem {
        variety,
        field,
        scalar_family: ScalarWordFamily { phi, coefficients },
        w_plus,
        w_dot,
    };
    // Shape invariants are checked before anything is computed with the
    // system; a violated constraint is reported by name.
    let report = w.check_op1()?;
    if !report.verdict {
        let witness = &report.witnesses[0];
        return Err(DocError::Constraint {
            constraint: witness.axiom.clone(),
            detail: witness.residual.clone(),
        });
    }
    Ok(w)
}

pub fn save_wordsystem(w: &WordSystem) -> Result<Value, DocError> {
    let concrete = |e: &PElem, path: &str| -> Result<String, DocError> {
        let mut out = AlgebraElement::zero(e.generator_count());
        for (m, c) in e.terms() {
            let c = c.as_constant().ok_or_else(|| {
                schema(path, "cannot serialize a word with formal parameters")
            })?;
            out = out.add(&AlgebraElement::term(c, m, e.generator_count()));
        }
        Ok(format_expression(&out))
    };
    let mut fam = Map::new();
    for (m, poly) in &w.scalar_family.coefficients {
        fam.insert(m.render(), json!(poly.to_string()));
    }
    Ok(json!({
        "variety": w.variety.cli_name(),
        "field": field_json(w.field),
        "phi": phi_name(w.scalar_family.phi),
        "w_plus": concrete(&w.w_plus, "w_plus")?,
        "w_dot": concrete(&w.w_dot, "w_dot")?,
        "scalar_family": Value::Object(fam),
    }))
}

#[cfg(test)]
mod doc_tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn explicit_identity_document() {
        let doc = json!({
            "variety": "nilpotent3",
            "field": {"kind": "rationals"},
            "phi": "identity",
            "w_plus": "x1 + x2",
            "w_dot": "x1*x2",
            "scalar_family": {"x1": "a"},
        });
        let w = load_wordsystem(&doc).unwrap();
        assert_eq!(w, WordSystem::identity(Variety::nilpotent(3), FieldSpec::Rationals));
        let back = save_wordsystem(&w).unwrap();
        assert_eq!(load_wordsystem(&back).unwrap(), w);
    }

    #[test]
    fn degenerate_alphas_rejected_by_name() {
        let doc = json!({
            "variety": "nilpotent3",
            "w_plus": "x1 + x2",
            "w_dot": "x1*x2 + x2*x1",
            "scalar_family": {"x1": "a"},
        });
        match load_wordsystem(&doc) {
            Err(DocError::Constraint { constraint, .. }) => {
                assert_eq!(constraint, "alpha12 != ±alpha21")
            }
            other => panic!("expected a named constraint violation, got {other:?}"),
        }
        let doc = json!({
            "variety": "nilpotent3",
            "phi": "identity",
            "gamma12": "0",
            "alpha12": "1",
            "alpha21": "1",
        });
        match load_params(&doc) {
            Err(DocError::Constraint { constraint, .. }) => {
                assert_eq!(constraint, "alpha12 != ±alpha21")
            }
            other => panic!("expected a named constraint violation, got {other:?}"),
        }
    }

    #[test]
    fn shorthand_and_param_round_trips() {
        let doc = json!({
            "variety": "nilpotent3",
            "field": {"kind": "quadratic", "d": 2},
            "phi": "conjugation",
            "params3": {"gamma12": "1/2", "alpha12": "[0, 1]", "alpha21": "-2"},
        });
        let w = load_wordsystem(&doc).unwrap();
        let p = crate::autgroup::params_from_wordsystem(&w).unwrap();
        assert_eq!(p.phi, FieldAutomorphism::Conjugation);
        let saved = save_params(&p);
        let p2 = load_params(&saved).unwrap();
        assert_eq!(p, p2);
        // Saving the instantiated system and loading it again gives the
        // same system.
        let saved_w = save_wordsystem(&w).unwrap();
        assert_eq!(load_wordsystem(&saved_w).unwrap(), w);
    }

    #[test]
    fn schema_violations_carry_field_paths() {
        let bad = json!({"variety": "nilpotent3", "w_plus": 7});
        match load_wordsystem(&bad) {
            Err(DocError::Schema { path, .. }) => assert_eq!(path, "w_plus"),
            other => panic!("{other:?}"),
        }
        let bad = json!({
            "variety": "nilpotent3",
            "w_plus": "x1 + x2",
            "w_dot": "x1*x2",
            "scalar_family": {"x1 + x2": "a"},
        });
        match load_wordsystem(&bad) {
            Err(DocError::Schema { path, .. }) => assert_eq!(path, "scalar_family.x1 + x2"),
            other => panic!("{other:?}"),
        }
        let bad = json!({"variety": "septonion"});
        assert!(matches!(
            load_params(&bad),
            Err(DocError::Schema { path, .. }) if path == "variety"
        ));
    }
}
