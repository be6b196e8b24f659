//! Word systems W = {w₀, w_λ, w₊, w·} and their verbal (star) operations on
//! relatively free algebras; the generator-fixing maps σ_F; Op1/Op2
//! verification; the words ↔ bijection correspondence; and the inner
//! criterion solver (does a single element p make c_F(f) = p(f) natural?).
//!
//! Words are stored with parameter-polynomial coefficients so the same code
//! runs on concrete grid points and on formal families (e.g. the solver's
//! closed forms with α₁₂, γ₁₂ as indeterminates).

use crate::exactfield::{FieldAutomorphism, FieldElement, FieldSpec};
use crate::freemagma::{AlgebraElement, MagmaMonomial};
use crate::poly::Poly;
use crate::relfree::{invert_matrix, rank, RelfreeError, Variety};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub type Elem = AlgebraElement<FieldElement>;
pub type PElem = AlgebraElement<Poly>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerbalError {
    #[error(transparent)]
    Relfree(#[from] RelfreeError),
    #[error("star operation arity mismatch: {op} expects {expect} arguments, got {got}")]
    Arity {
        op: &'static str,
        expect: usize,
        got: usize,
    },
    #[error("word system invariant violated: {constraint}: {detail}")]
    Invariant { constraint: String, detail: String },
    #[error("scalar-family fit failure: {0}")]
    FitFailure(String),
}

fn invariant(constraint: &str, detail: impl fmt::Display) -> VerbalError {
    VerbalError::Invariant {
        constraint: constraint.to_string(),
        detail: detail.to_string(),
    }
}

/// The λ-indexed word family w_λ(x) = Σ_m p_m(a)·m with a = φ(λ).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarWordFamily {
    pub phi: FieldAutomorphism,
    /// 1-generator monomial -> coefficient polynomial in the variable `a`.
    pub coefficients: BTreeMap<MagmaMonomial, Poly>,
}

impl ScalarWordFamily {
    /// The family of the identity system: w_λ(x) = a·x.
    pub fn linear(phi: FieldAutomorphism) -> ScalarWordFamily {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(MagmaMonomial::generator(1), Poly::var("a"));
        ScalarWordFamily { phi, coefficients }
    }

    /// w_λ as an element with the given polynomial substituted for `a`.
    pub fn word_at(&self, a_value: &Poly) -> PElem {
        let mut out = PElem::zero(1);
        for (m, p) in &self.coefficients {
            out = out.add(&PElem::term(p.subst("a", a_value), m, 1));
        }
        out
    }
}

/// A full word system over a variety.
#[derive(Clone, Debug, PartialEq)]
pub struct WordSystem {
    pub variety: Variety,
    pub field: FieldSpec,
    pub scalar_family: ScalarWordFamily,
    pub w_plus: PElem,
    pub w_dot: PElem,
}

/// Scalar argument to the λ∗ operation: a concrete field element λ, or a
/// formal polynomial standing for φ(λ) directly.
#[derive(Clone, Debug)]
pub enum ScalarArg {
    Concrete(FieldElement),
    Formal(Poly),
}

#[derive(Clone, Debug)]
pub enum StarOp {
    Zero,
    Scalar(ScalarArg),
    Plus,
    Dot,
}

/// One Op1/Op2/inner verdict with witnesses for failures.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub condition: Condition,
    pub verdict: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Op1,
    Op2Axioms,
    Op2Iso,
    B1,
    B2,
    Inner,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Op1 => "op1",
            Condition::Op2Axioms => "op2_axioms",
            Condition::Op2Iso => "op2_iso",
            Condition::B1 => "b1",
            Condition::B2 => "b2",
            Condition::Inner => "inner",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub axiom: String,
    pub generator_count: u32,
    pub residual: String,
}

impl CheckReport {
    fn pass(condition: Condition) -> CheckReport {
        CheckReport {
            condition,
            verdict: true,
            witnesses: Vec::new(),
        }
    }

    fn fail(condition: Condition, witnesses: Vec<Witness>) -> CheckReport {
        assert!(!witnesses.is_empty(), "failures must carry a witness");
        CheckReport {
            condition,
            verdict: false,
            witnesses,
        }
    }
}

/// Outcome of the inner criterion.
#[derive(Clone, Debug, PartialEq)]
pub enum InnerOutcome {
    /// Coefficients of p over the 1-generator reduced basis: c_F(f) = p(f).
    Certificate(Elem),
    Infeasible { witness: String },
}

impl WordSystem {
    /// The identity word system of a variety.
    pub fn identity(variety: Variety, field: FieldSpec) -> WordSystem {
        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        WordSystem {
            variety,
            field,
            scalar_family: ScalarWordFamily::linear(FieldAutomorphism::Identity),
            w_plus: x1.add(&x2),
            w_dot: x1.product(&x2),
        }
    }

    pub fn phi(&self) -> FieldAutomorphism {
        self.scalar_family.phi
    }

    /// The degree-2 coefficients (α₁₂, α₂₁) of w· in normal form.
    pub fn alpha(&self) -> Result<(Poly, Poly), VerbalError> {
        let nf = self.variety.normal_form(&self.w_dot)?;
        let m12 = MagmaMonomial::product(
            &MagmaMonomial::generator(1),
            &MagmaMonomial::generator(2),
        );
        let m21 = MagmaMonomial::product(
            &MagmaMonomial::generator(2),
            &MagmaMonomial::generator(1),
        );
        Ok((nf.coefficient(&m12), nf.coefficient(&m21)))
    }

    /// Op1 shape checks: every word lies in the relatively free algebra on
    /// the right number of generators (normal-form fixed point), w₀ = 0,
    /// the leaf coefficient of w_λ is exactly `a`, w₊ ≡ x1+x2 and
    /// w· ≡ α₁₂x1x2 + α₂₁x2x1 below degree 3, and α₁₂ ≠ ±α₂₁.
    pub fn check_op1(&self) -> Result<CheckReport, VerbalError> {
        let mut witnesses = Vec::new();
        let nf_plus = self.variety.normal_form(&self.w_plus)?;
        if nf_plus != self.w_plus {
            witnesses.push(Witness {
                axiom: "w_plus in normal form".into(),
                generator_count: 2,
                residual: self.w_plus.sub(&nf_plus).to_string(),
            });
        }
        let nf_dot = self.variety.normal_form(&self.w_dot)?;
        if nf_dot != self.w_dot {
            witnesses.push(Witness {
                axiom: "w_dot in normal form".into(),
                generator_count: 2,
                residual: self.w_dot.sub(&nf_dot).to_string(),
            });
        }
        // w0 = the λ=0 instance must vanish.
        let w0 = self
            .variety
            .normal_form(&self.scalar_family.word_at(&Poly::zero()))?;
        if !w0.is_zero() {
            witnesses.push(Witness {
                axiom: "w_zero = 0".into(),
                generator_count: 1,
                residual: w0.to_string(),
            });
        }
        let leaf = MagmaMonomial::generator(1);
        let leaf_coeff = self
            .scalar_family
            .coefficients
            .get(&leaf)
            .cloned()
            .unwrap_or_default();
        if leaf_coeff != Poly::var("a") {
            witnesses.push(Witness {
                axiom: "w_lambda leaf coefficient is a".into(),
                generator_count: 1,
                residual: leaf_coeff.to_string(),
            });
        }
        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        let lin = nf_plus.truncate(2).sub(&x1.add(&x2));
        if !lin.is_zero() {
            witnesses.push(Witness {
                axiom: "w_plus = x1 + x2 below degree 2".into(),
                generator_count: 2,
                residual: lin.to_string(),
            });
        }
        if !nf_dot.truncate(2).is_zero() {
            witnesses.push(Witness {
                axiom: "w_dot has no degree-1 part".into(),
                generator_count: 2,
                residual: nf_dot.truncate(2).to_string(),
            });
        }
        let (a12, a21) = self.alpha()?;
        if a12 == a21 || a12 == a21.neg() {
            witnesses.push(Witness {
                axiom: "alpha12 != ±alpha21".into(),
                generator_count: 2,
                residual: format!("alpha12 = {a12}, alpha21 = {a21}"),
            });
        }
        Ok(if witnesses.is_empty() {
            CheckReport::pass(Condition::Op1)
        } else {
            CheckReport::fail(Condition::Op1, witnesses)
        })
    }

    /// Apply one verbal operation to arguments in normal form.
    pub fn star_apply(&self, op: &StarOp, args: &[PElem]) -> Result<PElem, VerbalError> {
        let arity = |expect: usize, op: &'static str| -> Result<(), VerbalError> {
            if args.len() != expect {
                Err(VerbalError::Arity {
                    op,
                    expect,
                    got: args.len(),
                })
            } else {
                Ok(())
            }
        };
        match op {
            StarOp::Zero => {
                arity(0, "zero")?;
                Ok(PElem::zero(1))
            }
            StarOp::Plus => {
                arity(2, "plus")?;
                let cap = self.variety.working_cap();
                let raw = self
                    .w_plus
                    .substitute_truncated(&[args[0].clone(), args[1].clone()], cap);
                Ok(self.variety.normal_form(&raw)?)
            }
            StarOp::Dot => {
                arity(2, "dot")?;
                let cap = self.variety.working_cap();
                let raw = self
                    .w_dot
                    .substitute_truncated(&[args[0].clone(), args[1].clone()], cap);
                Ok(self.variety.normal_form(&raw)?)
            }
            StarOp::Scalar(lambda) => {
                arity(1, "scalar")?;
                let a_value = match lambda {
                    ScalarArg::Concrete(l) => {
                        Poly::constant(self.scalar_family.phi.apply(l))
                    }
                    ScalarArg::Formal(p) => p.clone(),
                };
                let word = self.scalar_family.word_at(&a_value);
                let cap = self.variety.working_cap();
                let raw = word.substitute_truncated(&[args[0].clone()], cap);
                Ok(self.variety.normal_form(&raw)?)
            }
        }
    }

    fn star_plus(&self, a: &PElem, b: &PElem) -> Result<PElem, VerbalError> {
        self.star_apply(&StarOp::Plus, &[a.clone(), b.clone()])
    }

    fn star_dot(&self, a: &PElem, b: &PElem) -> Result<PElem, VerbalError> {
        self.star_apply(&StarOp::Dot, &[a.clone(), b.clone()])
    }

    fn star_scalar(&self, l: ScalarArg, a: &PElem) -> Result<PElem, VerbalError> {
        self.star_apply(&StarOp::Scalar(l), &[a.clone()])
    }

    /// σ_F: the unique generator-fixing homomorphism F → F*_W, computed by
    /// structural recursion.  Coefficients of `e` must be field constants.
    pub fn sigma_eval(&self, e: &Elem) -> Result<Elem, VerbalError> {
        let lifted = e.map_scalars(|c| Poly::constant(c.clone()));
        let image = self.sigma_eval_poly(&lifted)?;
        Ok(image.map_scalars(|p| {
            p.as_constant()
                .expect("concrete word system must give constant coefficients")
        }))
    }

    pub fn sigma_eval_poly(&self, e: &PElem) -> Result<PElem, VerbalError> {
        let g = e.generator_count();
        let mut memo: HashMap<MagmaMonomial, PElem> = HashMap::new();
        let mut acc: Option<PElem> = None;
        // Terms are visited in canonical term order; ⊥ folds left.
        for (m, c) in e.terms() {
            let image = self.star_mono(m, g, &mut memo)?;
            let c = c
                .as_constant()
                .ok_or_else(|| invariant("sigma_eval", "coefficients must be constants"))?;
            let scaled = if c.is_one() {
                image
            } else {
                self.star_scalar(ScalarArg::Concrete(c), &image)?
            };
            acc = Some(match acc {
                None => scaled,
                Some(prev) => self.star_plus(&prev, &scaled)?,
            });
        }
        Ok(acc.unwrap_or_else(|| PElem::zero(g)))
    }

    fn star_mono(
        &self,
        m: &MagmaMonomial,
        g: u32,
        memo: &mut HashMap<MagmaMonomial, PElem>,
    ) -> Result<PElem, VerbalError> {
        if let Some(e) = memo.get(m) {
            return Ok(e.clone());
        }
        let out = if let Some(i) = m.as_generator() {
            PElem::generator(i, g)
        } else {
            let (l, r) = m.as_product().unwrap();
            let li = self.star_mono(l, g, memo)?;
            let ri = self.star_mono(r, g, memo)?;
            self.star_dot(&li, &ri)?
        };
        memo.insert(m.clone(), out.clone());
        Ok(out)
    }

    /// Check every algebra axiom of the variety in F*_W.  λ-dependent
    /// axioms run with formal indeterminates a = φ(λ), b = φ(μ) plus
    /// concrete spot checks.
    pub fn check_op2_axioms(&self, generator_cap: u32) -> Result<CheckReport, VerbalError> {
        let witnesses: Vec<Witness> = self
            .op2_residuals(generator_cap)?
            .into_iter()
            .filter(|(_, _, r)| !r.is_zero())
            .map(|(axiom, generator_count, r)| Witness {
                axiom,
                generator_count,
                residual: r.to_string(),
            })
            .collect();
        Ok(if witnesses.is_empty() {
            CheckReport::pass(Condition::Op2Axioms)
        } else {
            CheckReport::fail(Condition::Op2Axioms, witnesses)
        })
    }

    /// The normal-form residual of every Op2 axiom (zero when the axiom
    /// holds).  The general-word-system solver consumes these with unknown
    /// coefficients in the words.
    pub fn op2_residuals(
        &self,
        generator_cap: u32,
    ) -> Result<Vec<(String, u32, PElem)>, VerbalError> {
        assert!((1..=3).contains(&generator_cap));
        let g = generator_cap.max(2);
        let x = |i: u32| PElem::generator(i, g);
        let zero = PElem::zero(g);
        let a = || ScalarArg::Formal(Poly::var("a"));
        let b = || ScalarArg::Formal(Poly::var("b"));
        let mut out: Vec<(String, u32, PElem)> = Vec::new();
        let mut check =
            |name: &str, gens: u32, residual: Result<PElem, VerbalError>| -> Result<(), VerbalError> {
                let r = residual?;
                let r = self.variety.normal_form(&r)?;
                out.push((name.to_string(), gens, r));
                Ok(())
            };

        // Module axioms of the signature.
        check("plus_commutative", 2, {
            (|| Ok(self.star_plus(&x(1), &x(2))?.sub(&self.star_plus(&x(2), &x(1))?)))()
        })?;
        if g >= 3 {
            check("plus_associative", 3, {
                (|| {
                    let lhs = self.star_plus(&self.star_plus(&x(1), &x(2))?, &x(3))?;
                    let rhs = self.star_plus(&x(1), &self.star_plus(&x(2), &x(3))?)?;
                    Ok(lhs.sub(&rhs))
                })()
            })?;
        } else {
            check("plus_associative", 2, {
                (|| {
                    let lhs = self.star_plus(&self.star_plus(&x(1), &x(2))?, &x(2))?;
                    let rhs = self.star_plus(&x(1), &self.star_plus(&x(2), &x(2))?)?;
                    Ok(lhs.sub(&rhs))
                })()
            })?;
        }
        check("plus_zero_right", 1, {
            (|| Ok(self.star_plus(&x(1), &zero)?.sub(&x(1))))()
        })?;
        check("plus_zero_left", 1, {
            (|| Ok(self.star_plus(&zero, &x(1))?.sub(&x(1))))()
        })?;
        check("plus_additive_inverse", 1, {
            (|| {
                let minus = self.star_scalar(
                    ScalarArg::Concrete(FieldElement::from_int(-1)),
                    &x(1),
                )?;
                self.star_plus(&x(1), &minus)
            })()
        })?;
        check("dot_zero_right", 1, {
            (|| self.star_dot(&x(1), &zero))()
        })?;
        check("dot_zero_left", 1, {
            (|| self.star_dot(&zero, &x(1)))()
        })?;
        let g3 = if g >= 3 { 3 } else { 2 };
        let y3 = if g >= 3 { x(3) } else { x(2) };
        check("distributive_right", g3, {
            (|| {
                let lhs = self.star_dot(&self.star_plus(&x(1), &x(2))?, &y3)?;
                let rhs =
                    self.star_plus(&self.star_dot(&x(1), &y3)?, &self.star_dot(&x(2), &y3)?)?;
                Ok(lhs.sub(&rhs))
            })()
        })?;
        check("distributive_left", g3, {
            (|| {
                let lhs = self.star_dot(&x(1), &self.star_plus(&x(2), &y3)?)?;
                let rhs =
                    self.star_plus(&self.star_dot(&x(1), &x(2))?, &self.star_dot(&x(1), &y3)?)?;
                Ok(lhs.sub(&rhs))
            })()
        })?;

        // Scalar axioms with formal a = φ(λ), b = φ(μ); φ(λμ) → ab and
        // φ(λ+μ) → a+b.
        check("scalar_one", 1, {
            (|| Ok(self.star_scalar(ScalarArg::Formal(Poly::int(1)), &x(1))?.sub(&x(1))))()
        })?;
        check("scalar_zero", 1, {
            (|| self.star_scalar(ScalarArg::Formal(Poly::zero()), &x(1)))()
        })?;
        check("scalar_product", 1, {
            (|| {
                let ab = Poly::var("a").mul(&Poly::var("b"));
                let lhs = self.star_scalar(ScalarArg::Formal(ab), &x(1))?;
                let rhs = self.star_scalar(a(), &self.star_scalar(b(), &x(1))?)?;
                Ok(lhs.sub(&rhs))
            })()
        })?;
        check("scalar_sum", 1, {
            (|| {
                let apb = Poly::var("a").add(&Poly::var("b"));
                let lhs = self.star_scalar(ScalarArg::Formal(apb), &x(1))?;
                let rhs = self.star_plus(
                    &self.star_scalar(a(), &x(1))?,
                    &self.star_scalar(b(), &x(1))?,
                )?;
                Ok(lhs.sub(&rhs))
            })()
        })?;
        check("scalar_plus_distributive", 2, {
            (|| {
                let lhs = self.star_scalar(a(), &self.star_plus(&x(1), &x(2))?)?;
                let rhs = self.star_plus(
                    &self.star_scalar(a(), &x(1))?,
                    &self.star_scalar(a(), &x(2))?,
                )?;
                Ok(lhs.sub(&rhs))
            })()
        })?;
        check("scalar_dot_left", 2, {
            (|| {
                let lhs = self.star_scalar(a(), &self.star_dot(&x(1), &x(2))?)?;
                let rhs = self.star_dot(&self.star_scalar(a(), &x(1))?, &x(2))?;
                Ok(lhs.sub(&rhs))
            })()
        })?;
        check("scalar_dot_right", 2, {
            (|| {
                let lhs = self.star_scalar(a(), &self.star_dot(&x(1), &x(2))?)?;
                let rhs = self.star_dot(&x(1), &self.star_scalar(a(), &x(2))?)?;
                Ok(lhs.sub(&rhs))
            })()
        })?;

        // Concrete spot checks of the λ-dependent axioms.
        let mut samples = vec![
            FieldElement::from_int(0),
            FieldElement::from_int(1),
            FieldElement::from_int(2),
        ];
        if let FieldSpec::Quadratic { d } = self.field {
            samples.push(FieldElement::one().add(&FieldElement::sqrt_d(d)));
        }
        for l in &samples {
            for m in &samples {
                check(
                    &format!("scalar_product at λ={l}, μ={m}"),
                    1,
                    (|| {
                        let lhs =
                            self.star_scalar(ScalarArg::Concrete(l.mul(m)), &x(1))?;
                        let rhs = self.star_scalar(
                            ScalarArg::Concrete(l.clone()),
                            &self.star_scalar(ScalarArg::Concrete(m.clone()), &x(1))?,
                        )?;
                        Ok(lhs.sub(&rhs))
                    })(),
                )?;
                check(
                    &format!("scalar_sum at λ={l}, μ={m}"),
                    1,
                    (|| {
                        let lhs =
                            self.star_scalar(ScalarArg::Concrete(l.add(m)), &x(1))?;
                        let rhs = self.star_plus(
                            &self.star_scalar(ScalarArg::Concrete(l.clone()), &x(1))?,
                            &self.star_scalar(ScalarArg::Concrete(m.clone()), &x(1))?,
                        )?;
                        Ok(lhs.sub(&rhs))
                    })(),
                )?;
            }
        }

        // Variety-specific axioms: evaluate the defining identities in F*_W
        // (σ of the identity must vanish).
        for id in self.variety.defining_identities() {
            let name = format!("variety identity {id}");
            let gens = id.generator_count();
            check(&name, gens, {
                let lifted = id.map_scalars(|c| Poly::constant(c.clone()));
                self.sigma_eval_poly(&lifted)
            })?;
        }
        if let Some(n) = self.variety.nilpotency_degree() {
            let vars = n.min(3);
            for m in crate::freemagma::enumerate_monomials(vars, n) {
                check(
                    &format!("nilpotency at {m}"),
                    vars,
                    self.star_mono_cloneable(&m, vars),
                )?;
            }
        }

        Ok(out)
    }

    fn star_mono_cloneable(&self, m: &MagmaMonomial, g: u32) -> Result<PElem, VerbalError> {
        let mut memo = HashMap::new();
        self.star_mono(m, g, &mut memo)
    }

    /// σ_F on an element with symbolic coefficients: each coefficient c
    /// becomes φ(c) (applied to its field constants) and acts through the
    /// formal scalar operation.  This is the engine behind symbolic
    /// composition of word systems.
    pub fn star_evaluate(&self, e: &PElem) -> Result<PElem, VerbalError> {
        let g = e.generator_count();
        let mut memo: HashMap<MagmaMonomial, PElem> = HashMap::new();
        let mut acc: Option<PElem> = None;
        for (m, c) in e.terms() {
            let image = self.star_mono(m, g, &mut memo)?;
            let c = c.map_coeffs(&self.phi());
            let scaled = if c == Poly::one() {
                image
            } else {
                self.star_scalar(ScalarArg::Formal(c), &image)?
            };
            acc = Some(match acc {
                None => scaled,
                Some(prev) => self.star_plus(&prev, &scaled)?,
            });
        }
        Ok(acc.unwrap_or_else(|| PElem::zero(g)))
    }

    /// σ_F on the reduced basis of the relatively free algebra on `g`
    /// generators: exact invertibility of the matrix plus filtration
    /// preservation σ(F^i) ⊆ F^i.
    pub fn check_sigma_iso(&self, g: u32) -> Result<CheckReport, VerbalError> {
        let basis = self.iso_basis(g)?;
        let mut witnesses = Vec::new();
        let images: Vec<Elem> = basis
            .iter()
            .map(|m| self.sigma_eval(&Elem::term(FieldElement::one(), m, g)))
            .collect::<Result<_, _>>()?;
        // Filtration: the image of a degree-i monomial has no terms of
        // degree < i.
        for (m, img) in basis.iter().zip(&images) {
            let low = img.truncate(m.degree());
            if !low.is_zero() {
                witnesses.push(Witness {
                    axiom: format!("filtration: sigma({m}) has terms below degree {}", m.degree()),
                    generator_count: g,
                    residual: low.to_string(),
                });
            }
        }
        let index: HashMap<MagmaMonomial, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let n = basis.len();
        let mut matrix = vec![vec![FieldElement::zero(); n]; n];
        for (j, img) in images.iter().enumerate() {
            for (m, c) in img.terms() {
                let i = *index
                    .get(m)
                    .expect("sigma image must stay in the reduced basis");
                matrix[i][j] = c.clone();
            }
        }
        if invert_matrix(&matrix).is_none() {
            witnesses.push(Witness {
                axiom: format!("sigma matrix on {n} basis monomials is singular"),
                generator_count: g,
                residual: String::new(),
            });
        }
        Ok(if witnesses.is_empty() {
            CheckReport::pass(Condition::Op2Iso)
        } else {
            CheckReport::fail(Condition::Op2Iso, witnesses)
        })
    }

    fn iso_basis(&self, g: u32) -> Result<Vec<MagmaMonomial>, VerbalError> {
        // Nilpotent varieties: the whole (finite) reduced basis.  Classical
        // varieties: degrees <= 3 — enough to see every degree-2 defect and
        // keep the exact elimination small.
        let top = match self.variety.nilpotency_degree() {
            Some(n) => n - 1,
            None => 3,
        };
        let mut out = Vec::new();
        for d in 1..=top {
            out.extend(self.variety.reduced_monomials_of_degree(g, d)?);
        }
        Ok(out)
    }

    /// Criterion-7 style check: σ of the basis of F^i spans F^i exactly.
    pub fn filtration_spans(&self, g: u32, i: u32) -> Result<bool, VerbalError> {
        let basis = self.iso_basis(g)?;
        let high: Vec<&MagmaMonomial> = basis.iter().filter(|m| m.degree() >= i).collect();
        let index: HashMap<MagmaMonomial, usize> = high
            .iter()
            .enumerate()
            .map(|(k, m)| ((*m).clone(), k))
            .collect();
        let mut rows = Vec::new();
        for m in &high {
            let img = self.sigma_eval(&Elem::term(FieldElement::one(), m, g))?;
            let mut row = vec![FieldElement::zero(); high.len()];
            for (mm, c) in img.terms() {
                match index.get(mm) {
                    Some(&k) => row[k] = c.clone(),
                    None => return Ok(false), // image left F^i
                }
            }
            rows.push(row);
        }
        Ok(rank(rows) == high.len())
    }

    /// B2: σ fixes the generators.
    pub fn check_b2(&self, g: u32) -> Result<CheckReport, VerbalError> {
        let mut witnesses = Vec::new();
        for i in 1..=g {
            let xi = Elem::generator(i, g);
            let img = self.sigma_eval(&xi)?;
            if img != xi {
                witnesses.push(Witness {
                    axiom: format!("sigma(x{i}) = x{i}"),
                    generator_count: g,
                    residual: img.sub(&xi).to_string(),
                });
            }
        }
        Ok(if witnesses.is_empty() {
            CheckReport::pass(Condition::B2)
        } else {
            CheckReport::fail(Condition::B2, witnesses)
        })
    }

    /// Inner criterion: find p with p(f1+f2) = p(f1) ⊥ p(f2),
    /// p(f1 f2) = p(f1) × p(f2), p(λf) = λ ∗ p(f); c_F(f) = p(f) is then the
    /// natural isomorphism of Criterion 1.
    pub fn inner_solve(&self) -> Result<InnerOutcome, VerbalError> {
        let cap = match self.variety.nilpotency_degree() {
            Some(n) => n - 1,
            None => 2,
        };
        let mut ansatz_basis = Vec::new();
        for d in 1..=cap {
            ansatz_basis.extend(self.variety.reduced_monomials_of_degree(1, d)?);
        }
        let cvars: Vec<String> = (1..=ansatz_basis.len())
            .map(|k| format!("c{k}"))
            .collect();
        let cvar_refs: Vec<&str> = cvars.iter().map(|s| s.as_str()).collect();

        // p(e) = Σ c_k · m_k(e), in normal form.
        let apply_p = |e: &PElem| -> Result<PElem, VerbalError> {
            let mut out = PElem::zero(e.generator_count());
            for (k, m) in ansatz_basis.iter().enumerate() {
                let mk = PElem::term(Poly::one(), m, 1);
                let image = mk.substitute(&[e.clone()]);
                out = out.add(&image.scale(&Poly::var(&cvars[k])));
            }
            Ok(self.variety.normal_form(&out)?)
        };

        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        let mut equations: Vec<(String, Poly)> = Vec::new();
        let mut push_eq = |name: &str, residual: PElem| {
            for (m, c) in residual.terms() {
                // Split each monomial coefficient by powers of a.
                let mut by_a: BTreeMap<u32, Poly> = BTreeMap::new();
                for (pow, k) in c.terms() {
                    let mut rest = pow.clone();
                    let e = rest.0.remove("a").unwrap_or(0);
                    let mut term = Poly::default();
                    term = term.add(&poly_from_parts(rest, k.clone()));
                    by_a
                        .entry(e)
                        .and_modify(|p| *p = p.add(&term))
                        .or_insert(term);
                }
                for (e, p) in by_a {
                    if !p.is_zero() {
                        equations.push((format!("{name} @ {m} a^{e}"), p));
                    }
                }
            }
        };

        let add_res = self
            .variety
            .normal_form(&apply_p(&x1.add(&x2))?.sub(&self.star_plus(&apply_p(&x1)?, &apply_p(&x2)?)?))?;
        push_eq("p(f1+f2) = p(f1) ⊥ p(f2)", add_res);
        let prod = self.variety.normal_form(&x1.product(&x2))?;
        let mul_res = self
            .variety
            .normal_form(&apply_p(&prod)?.sub(&self.star_dot(&apply_p(&x1)?, &apply_p(&x2)?)?))?;
        push_eq("p(f1 f2) = p(f1) × p(f2)", mul_res);

        let x = PElem::generator(1, 1);
        if self.phi() == FieldAutomorphism::Identity {
            // Formal λ (φ = id lets λ and φ(λ) share the indeterminate a).
            let lam = x.scale(&Poly::var("a"));
            let res = self.variety.normal_form(
                &apply_p(&lam)?.sub(&self.star_scalar(ScalarArg::Formal(Poly::var("a")), &apply_p(&x)?)?),
            )?;
            push_eq("p(λf) = λ ∗ p(f) (formal λ)", res);
        }
        let mut samples = vec![
            FieldElement::from_int(0),
            FieldElement::from_int(2),
            FieldElement::from_int(3),
            FieldElement::from_int(-1),
        ];
        if let FieldSpec::Quadratic { d } = self.field {
            samples.push(FieldElement::one().add(&FieldElement::sqrt_d(d)));
        }
        for l in samples {
            let lam = x.scale(&Poly::constant(l.clone()));
            let res = self.variety.normal_form(&apply_p(&lam)?.sub(
                &self.star_scalar(ScalarArg::Concrete(l.clone()), &apply_p(&x)?)?,
            ))?;
            push_eq(&format!("p(λf) = λ ∗ p(f) at λ={l}"), res);
        }

        // Stage 0: the linear coefficient.  The degree-2 block of the
        // product equation reads c1·x1x2 = c1²·w_dot, so c1 = α₁₂⁻¹ — and
        // c1 must be nonzero for p to be invertible.
        let (a12, a21) = self.alpha()?;
        let a12 = a12
            .as_constant()
            .ok_or_else(|| invariant("inner_solve", "word system must be concrete"))?;
        let a21 = a21
            .as_constant()
            .ok_or_else(|| invariant("inner_solve", "word system must be concrete"))?;
        let _ = a21;
        let mut solution: BTreeMap<String, FieldElement> = BTreeMap::new();
        if ansatz_basis.first().and_then(|m| m.as_generator()) != Some(1) {
            return Err(invariant("inner_solve", "missing degree-1 basis monomial"));
        }
        match a12.inv() {
            Ok(inv) => {
                solution.insert("c1".to_string(), inv);
            }
            Err(_) => {
                return Ok(InnerOutcome::Infeasible {
                    witness: "degree-2 block: c1 = c1²·α₁₂ with α₁₂ = 0 forces c1 = 0 \
                              (p not invertible)"
                        .to_string(),
                });
            }
        }

        // Substitute and iterate: solve any equation that pins a single
        // remaining unknown with a constant coefficient.
        let substitute =
            |eqs: &mut Vec<(String, Poly)>, var: &str, value: &FieldElement| {
                for (_, p) in eqs.iter_mut() {
                    *p = p.subst(var, &Poly::constant(value.clone()));
                }
            };
        let mut eqs = equations;
        for (v, val) in &solution {
            substitute(&mut eqs, v, val);
        }
        loop {
            let mut progressed = false;
            for i in 0..eqs.len() {
                let p = eqs[i].1.clone();
                if p.is_zero() {
                    continue;
                }
                let Some((coeffs, rest)) = p.as_linear_in(&cvar_refs) else {
                    // Quadratic residue in the unknowns: with c1 pinned this
                    // signals an unsatisfiable branch — report it.
                    return Ok(InnerOutcome::Infeasible {
                        witness: format!("{}: {}", eqs[i].0, p),
                    });
                };
                let unsolved: Vec<(&str, &Poly)> = coeffs
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(v, c)| (*v, c))
                    .collect();
                if unsolved.is_empty() {
                    // No unknowns left: the equation must already hold.
                    return Ok(InnerOutcome::Infeasible {
                        witness: format!("{}: {} = 0 is violated", eqs[i].0, p),
                    });
                }
                if unsolved.len() == 1 {
                    let (v, c) = unsolved[0];
                    let (Some(cval), Some(rval)) = (c.as_constant(), rest.as_constant())
                    else {
                        continue;
                    };
                    if cval.is_zero() {
                        continue;
                    }
                    let value = rval.neg().div(&cval).unwrap();
                    let name = v.to_string();
                    substitute(&mut eqs, &name, &value);
                    solution.insert(name, value);
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        // Unconstrained coefficients can be anything; pick 0.
        for v in &cvars {
            solution.entry(v.clone()).or_insert_with(FieldElement::zero);
        }
        // Final consistency pass.
        for (name, p) in &eqs {
            let mut q = p.clone();
            for (v, val) in &solution {
                q = q.subst(v, &Poly::constant(val.clone()));
            }
            if !q.is_zero() {
                return Ok(InnerOutcome::Infeasible {
                    witness: format!("{name}: residual {q}"),
                });
            }
        }
        let mut p_elem = Elem::zero(1);
        for (k, m) in ansatz_basis.iter().enumerate() {
            let c = solution.get(&cvars[k]).unwrap().clone();
            p_elem = p_elem.add(&Elem::term(c, m, 1));
        }
        Ok(InnerOutcome::Certificate(p_elem))
    }
}

fn poly_from_parts(pow: crate::poly::VarPow, c: FieldElement) -> Poly {
    let mut p = Poly::constant(c);
    for (v, e) in pow.0 {
        for _ in 0..e {
            p = p.mul(&Poly::var(&v));
        }
    }
    p
}

/// Word system of the composite automorphism "apply `first`, then
/// `second`": every word of `first` is σ-evaluated in the star operations
/// of `second` with coefficients twisted by φ of `second`.  Exact, and
/// valid with formal parameter coefficients.
pub fn compose_systems(
    first: &WordSystem,
    second: &WordSystem,
) -> Result<WordSystem, VerbalError> {
    assert_eq!(first.variety, second.variety, "composition needs one variety");
    assert_eq!(first.field, second.field, "composition needs one field");
    let w_plus = second.star_evaluate(&first.w_plus)?;
    let w_dot = second.star_evaluate(&first.w_dot)?;
    // w_λ of the composite: in w¹_λ the indeterminate a stands for φ¹(λ);
    // after the φ² twist it stands for φ²φ¹(λ) = φ³(λ), which is exactly
    // the composite's scalar indeterminate.
    let word1 = first.scalar_family.word_at(&Poly::var("a"));
    let composed = second.star_evaluate(&word1)?;
    let mut coefficients = BTreeMap::new();
    for (m, c) in composed.terms() {
        coefficients.insert(m.clone(), c.clone());
    }
    Ok(WordSystem {
        variety: first.variety.clone(),
        field: first.field,
        scalar_family: ScalarWordFamily {
            phi: second.phi().compose(&first.phi()),
            coefficients,
        },
        w_plus,
        w_dot,
    })
}

/// Read a word system off a generator-fixing bijection: w₊ = σ(x1+x2),
/// w· = σ(x1x2), and the scalar family by polynomial interpolation of
/// σ(λx) in a = φ(λ).
pub fn words_from_bijection(
    sigma: &dyn Fn(&Elem) -> Elem,
    variety: &Variety,
    field: &FieldSpec,
) -> Result<WordSystem, VerbalError> {
    let x1 = Elem::generator(1, 2);
    let x2 = Elem::generator(2, 2);
    for (i, xi) in [(1u32, &x1), (2, &x2)] {
        let img = sigma(xi);
        if &img != xi {
            return Err(invariant(
                "generator-fixing",
                format!("sigma(x{i}) = {img}"),
            ));
        }
    }
    let w_plus = variety.normal_form(&sigma(&x1.add(&x2)))?;
    let w_dot = variety.normal_form(&sigma(&variety.normal_form(&x1.product(&x2))?))?;

    // Determine φ from σ(λ₀·x) for an irrational probe when available.
    let x = Elem::generator(1, 1);
    let leaf = MagmaMonomial::generator(1);
    let phi = match field {
        FieldSpec::Rationals => FieldAutomorphism::Identity,
        FieldSpec::Quadratic { d } => {
            let probe = FieldElement::one().add(&FieldElement::sqrt_d(*d));
            let coeff = sigma(&x.scale(&probe)).coefficient(&leaf);
            if coeff == probe {
                FieldAutomorphism::Identity
            } else if coeff == FieldAutomorphism::Conjugation.apply(&probe) {
                FieldAutomorphism::Conjugation
            } else {
                return Err(VerbalError::FitFailure(format!(
                    "leaf coefficient {coeff} of sigma(λx) is not φ(λ) for any field \
                     automorphism"
                )));
            }
        }
    };

    // Interpolate each coefficient polynomial through integer samples
    // (φ fixes integers, so a = λ there), then verify on an extra point.
    let cap = match variety.nilpotency_degree() {
        Some(n) => n - 1,
        None => 2,
    };
    let sample_count = cap + 1;
    let samples: Vec<FieldElement> = (0..=sample_count as i64)
        .map(FieldElement::from_int)
        .collect();
    let mut images: Vec<Elem> = Vec::new();
    for l in &samples {
        images.push(variety.normal_form(&sigma(&x.scale(l)))?);
    }
    let mut monomials: Vec<MagmaMonomial> = Vec::new();
    for img in &images {
        for (m, _) in img.terms() {
            if !monomials.contains(m) {
                monomials.push(m.clone());
            }
        }
    }
    monomials.sort();
    let mut coefficients = BTreeMap::new();
    for m in &monomials {
        let points: Vec<(FieldElement, FieldElement)> = samples
            .iter()
            .zip(&images)
            .map(|(l, img)| (l.clone(), img.coefficient(m)))
            .collect();
        let poly = lagrange_fit(&points);
        coefficients.insert(m.clone(), poly);
    }
    let family = ScalarWordFamily { phi, coefficients };
    // Verification pass on points outside the interpolation set.
    let mut checks = vec![FieldElement::from_int((sample_count + 2) as i64)];
    if let FieldSpec::Quadratic { d } = field {
        checks.push(FieldElement::one().add(&FieldElement::sqrt_d(*d)));
    }
    for l in checks {
        let expect = variety.normal_form(&sigma(&x.scale(&l)))?;
        let a_val = Poly::constant(phi.apply(&l));
        let got = family
            .word_at(&a_val)
            .map_scalars(|p| p.as_constant().expect("constant"));
        let got = variety.normal_form(&got)?;
        if got != expect {
            return Err(VerbalError::FitFailure(format!(
                "σ(λx) at λ={l} disagrees with the fitted family: {got} vs {expect}"
            )));
        }
    }
    Ok(WordSystem {
        variety: variety.clone(),
        field: *field,
        scalar_family: family,
        w_plus: w_plus.map_scalars(|c| Poly::constant(c.clone())),
        w_dot: w_dot.map_scalars(|c| Poly::constant(c.clone())),
    })
}

/// Lagrange interpolation through exact points with distinct abscissae.
fn lagrange_fit(points: &[(FieldElement, FieldElement)]) -> Poly {
    let a = Poly::var("a");
    let mut total = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut term = Poly::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = xi.sub(xj).inv().expect("distinct sample points");
            let factor = a.sub(&Poly::constant(xj.clone())).scale(&denom);
            term = term.mul(&factor);
        }
        total = total.add(&term);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    fn ratio(p: i64, q: i64) -> FieldElement {
        FieldElement::ratio(p, q)
    }

    /// The nilpotency-3 word system with parameters (φ, γ, α₁₂, α₂₁).
    fn nilp3_system(
        field: FieldSpec,
        phi: FieldAutomorphism,
        gamma: FieldElement,
        a12: FieldElement,
        a21: FieldElement,
    ) -> WordSystem {
        let variety = Variety::nilpotent(3);
        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        let x12 = x1.product(&x2);
        let x21 = x2.product(&x1);
        let g = Poly::constant(gamma.clone());
        let w_plus = x1.add(&x2).add(&x12.add(&x21).scale(&g));
        let w_dot = x12
            .scale(&Poly::constant(a12))
            .add(&x21.scale(&Poly::constant(a21)));
        let mut coefficients = BTreeMap::new();
        let a = Poly::var("a");
        coefficients.insert(MagmaMonomial::generator(1), a.clone());
        let sq = a.mul(&a).sub(&a).mul(&g);
        let x = MagmaMonomial::generator(1);
        coefficients.insert(MagmaMonomial::product(&x, &x), sq);
        WordSystem {
            variety,
            field,
            scalar_family: ScalarWordFamily { phi, coefficients },
            w_plus,
            w_dot,
        }
    }

    fn felem(terms: &[(i64, &str)], g: u32, spec: &FieldSpec) -> Elem {
        let mut out = Elem::zero(g);
        for (c, txt) in terms {
            let parsed = crate::exprio::parse_expression(txt, g, spec).unwrap();
            out = out.add(&parsed.element.scale(&fe(*c)));
        }
        out
    }

    #[test]
    fn star_plus_closed_form() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(1),
            fe(0),
        );
        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        let got = w.star_plus(&x1, &x2).unwrap();
        let expect = felem(
            &[(1, "x1"), (1, "x2"), (1, "x1*x2"), (1, "x2*x1")],
            2,
            &FieldSpec::Rationals,
        );
        assert_eq!(got.map_scalars(|p| p.as_constant().unwrap()), expect);
    }

    #[test]
    fn star_scalar_closed_form() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(1),
            fe(0),
        );
        let x = PElem::generator(1, 1);
        let got = w
            .star_scalar(ScalarArg::Concrete(fe(2)), &x)
            .unwrap()
            .map_scalars(|p| p.as_constant().unwrap());
        let expect = felem(&[(2, "x1"), (2, "x1*x1")], 1, &FieldSpec::Rationals);
        assert_eq!(got, expect);
    }

    #[test]
    fn sigma_on_product() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(0),
            fe(2),
            fe(1),
        );
        let x1 = Elem::generator(1, 2);
        let x2 = Elem::generator(2, 2);
        let got = w.sigma_eval(&x1.product(&x2)).unwrap();
        let expect = felem(&[(2, "x1*x2"), (1, "x2*x1")], 2, &FieldSpec::Rationals);
        assert_eq!(got, expect);
    }

    #[test]
    fn op1_rejects_equal_alphas() {
        for (a12, a21, ok) in [(1, 0, true), (2, 1, true), (1, 1, false), (1, -1, false)] {
            let w = nilp3_system(
                FieldSpec::Rationals,
                FieldAutomorphism::Identity,
                fe(1),
                fe(a12),
                fe(a21),
            );
            let report = w.check_op1().unwrap();
            assert_eq!(report.verdict, ok, "alpha = ({a12}, {a21})");
            if !ok {
                assert!(report
                    .witnesses
                    .iter()
                    .any(|w| w.axiom == "alpha12 != ±alpha21"));
            }
        }
    }

    #[test]
    fn op2_axioms_hold_concretely() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            ratio(-1, 2),
            fe(2),
            fe(1),
        );
        let report = w.check_op2_axioms(3).unwrap();
        assert!(report.verdict, "{:?}", report.witnesses);
    }

    #[test]
    fn op2_axioms_hold_formally_in_parameters() {
        // Replace the concrete parameters by indeterminates: the axioms hold
        // identically in (g, u, v).
        let mut w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(1),
            fe(0),
        );
        let x1 = PElem::generator(1, 2);
        let x2 = PElem::generator(2, 2);
        let x12 = x1.product(&x2);
        let x21 = x2.product(&x1);
        let g = Poly::var("g");
        w.w_plus = x1.add(&x2).add(&x12.add(&x21).scale(&g));
        w.w_dot = x12.scale(&Poly::var("u")).add(&x21.scale(&Poly::var("v")));
        let a = Poly::var("a");
        let sq = a.mul(&a).sub(&a).mul(&g);
        let x = MagmaMonomial::generator(1);
        w.scalar_family
            .coefficients
            .insert(MagmaMonomial::product(&x, &x), sq);
        let report = w.check_op2_axioms(3).unwrap();
        assert!(report.verdict, "{:?}", report.witnesses);
    }

    #[test]
    fn op2_axioms_catch_bad_scalar_family() {
        let mut w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(1),
            fe(0),
        );
        // Break the square coefficient: a² instead of a²−a.
        let a = Poly::var("a");
        let x = MagmaMonomial::generator(1);
        w.scalar_family
            .coefficients
            .insert(MagmaMonomial::product(&x, &x), a.mul(&a));
        let report = w.check_op2_axioms(2).unwrap();
        assert!(!report.verdict);
    }

    #[test]
    fn sigma_iso_and_b2() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(2),
            fe(1),
        );
        assert!(w.check_sigma_iso(2).unwrap().verdict);
        assert!(w.check_b2(2).unwrap().verdict);
        assert!(w.filtration_spans(2, 1).unwrap());
        assert!(w.filtration_spans(2, 2).unwrap());
    }

    #[test]
    fn identity_system_passes_everywhere() {
        for variety in [
            Variety::free(),
            Variety::commutative(),
            Variety::anticommutative(Vec::new()),
            Variety::nilpotent(4),
        ] {
            let w = WordSystem::identity(variety, FieldSpec::Rationals);
            assert!(w.check_op1().unwrap().verdict);
            assert!(w.check_op2_axioms(2).unwrap().verdict);
            assert!(w.check_sigma_iso(2).unwrap().verdict);
        }
    }

    #[test]
    fn inner_certificate_matches_closed_form() {
        // α₂₁ = 0 and φ = id: inner, with p(f) = α₁₂⁻¹ f + α₁₂⁻² γ f².
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(2),
            fe(0),
        );
        match w.inner_solve().unwrap() {
            InnerOutcome::Certificate(p) => {
                let x = MagmaMonomial::generator(1);
                let xx = MagmaMonomial::product(&x, &x);
                assert_eq!(p.coefficient(&x), ratio(1, 2));
                assert_eq!(p.coefficient(&xx), ratio(1, 4));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn inner_infeasible_when_alpha21_nonzero() {
        let w = nilp3_system(
            FieldSpec::Rationals,
            FieldAutomorphism::Identity,
            fe(1),
            fe(2),
            fe(1),
        );
        assert!(matches!(
            w.inner_solve().unwrap(),
            InnerOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn inner_infeasible_under_conjugation() {
        let field = FieldSpec::quadratic(2).unwrap();
        let w = nilp3_system(
            field,
            FieldAutomorphism::Conjugation,
            fe(0),
            fe(1),
            fe(0),
        );
        assert!(matches!(
            w.inner_solve().unwrap(),
            InnerOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn bijection_round_trip() {
        let field = FieldSpec::quadratic(2).unwrap();
        let w = nilp3_system(
            field,
            FieldAutomorphism::Conjugation,
            ratio(-1, 2),
            fe(2),
            fe(1),
        );
        let wc = w.clone();
        let sigma = move |e: &Elem| wc.sigma_eval(e).unwrap();
        let got = words_from_bijection(&sigma, &w.variety, &field).unwrap();
        assert_eq!(got.w_plus, w.w_plus);
        assert_eq!(got.w_dot, w.w_dot);
        assert_eq!(got.scalar_family.phi, w.scalar_family.phi);
        for (m, p) in &w.scalar_family.coefficients {
            let q = got.scalar_family.coefficients.get(m).cloned().unwrap_or_default();
            assert_eq!(&q, p, "family coefficient at {m}");
        }
    }
}
