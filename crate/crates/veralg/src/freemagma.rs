//! The absolutely free (nonassociative) algebra on generators x1, x2, ….
//!
//! A `MagmaMonomial` is a binary tree whose leaves are generator indices; an
//! `AlgebraElement` is a finite linear combination of monomials.  Monomials
//! are interned in a session-global table, so equality and hashing are
//! pointer-cheap; the ordering used everywhere (display, matrices, folds) is
//! structural and therefore stable across runs.

use crate::scalar::Scalar;
use once_cell::sync::Lazy;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// A bracketed product of generators, e.g. `(x1*(x2*x1))`.
#[derive(Clone)]
pub struct MagmaMonomial(Arc<MonoData>);

struct MonoData {
    node: Node,
    id: u64,
    degree: u32,
    /// Generator multiplicities, indexed by generator index − 1, trimmed to
    /// the largest generator that occurs.
    multidegree: Vec<u32>,
}

enum Node {
    Leaf(u32),
    Product(MagmaMonomial, MagmaMonomial),
}

#[derive(PartialEq, Eq, Hash)]
enum InternKey {
    Leaf(u32),
    Product(u64, u64),
}

static INTERN: Lazy<Mutex<HashMap<InternKey, MagmaMonomial>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl MagmaMonomial {
    /// The generator `x{i}` (1-based).
    pub fn generator(i: u32) -> MagmaMonomial {
        assert!(i >= 1, "generators are numbered from 1");
        let mut table = INTERN.lock().unwrap();
        if let Some(m) = table.get(&InternKey::Leaf(i)) {
            return m.clone();
        }
        let id = table.len() as u64;
        let m = MagmaMonomial(Arc::new(MonoData {
            node: Node::Leaf(i),
            id,
            degree: 1,
            multidegree: {
                let mut v = vec![0; i as usize];
                v[i as usize - 1] = 1;
                v
            },
        }));
        table.insert(InternKey::Leaf(i), m.clone());
        m
    }

    pub fn product(l: &MagmaMonomial, r: &MagmaMonomial) -> MagmaMonomial {
        let key = InternKey::Product(l.0.id, r.0.id);
        let mut table = INTERN.lock().unwrap();
        if let Some(m) = table.get(&key) {
            return m.clone();
        }
        let mut multidegree = l.0.multidegree.clone();
        if multidegree.len() < r.0.multidegree.len() {
            multidegree.resize(r.0.multidegree.len(), 0);
        }
        for (i, e) in r.0.multidegree.iter().enumerate() {
            multidegree[i] += e;
        }
        let id = table.len() as u64;
        let m = MagmaMonomial(Arc::new(MonoData {
            node: Node::Product(l.clone(), r.clone()),
            id,
            degree: l.0.degree + r.0.degree,
            multidegree,
        }));
        table.insert(key, m.clone());
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// Multiplicity of generator `i` (1-based).
    pub fn multiplicity(&self, i: u32) -> u32 {
        self.0
            .multidegree
            .get(i as usize - 1)
            .copied()
            .unwrap_or(0)
    }

    /// The multidegree padded/truncated to `g` slots.  Panics if the
    /// monomial uses a generator beyond `g`.
    pub fn multidegree(&self, g: u32) -> Vec<u32> {
        assert!(
            self.0.multidegree.len() <= g as usize,
            "monomial uses a generator beyond x{g}"
        );
        let mut v = self.0.multidegree.clone();
        v.resize(g as usize, 0);
        v
    }

    pub fn max_generator(&self) -> u32 {
        self.0.multidegree.len() as u32
    }

    pub fn as_product(&self) -> Option<(&MagmaMonomial, &MagmaMonomial)> {
        match &self.0.node {
            Node::Leaf(_) => None,
            Node::Product(l, r) => Some((l, r)),
        }
    }

    pub fn as_generator(&self) -> Option<u32> {
        match &self.0.node {
            Node::Leaf(i) => Some(*i),
            Node::Product(..) => None,
        }
    }

    /// Render without outer parentheses: `x1`, `x1*x2`, `(x1*x2)*x1`.
    pub fn render(&self) -> String {
        match &self.0.node {
            Node::Leaf(i) => format!("x{i}"),
            Node::Product(l, r) => format!("{}*{}", l.render_inner(), r.render_inner()),
        }
    }

    /// Render with parentheses whenever the monomial is a product, for use
    /// after a `coefficient*` prefix.
    pub fn render_parenthesized(&self) -> String {
        self.render_inner()
    }

    fn render_inner(&self) -> String {
        match &self.0.node {
            Node::Leaf(i) => format!("x{i}"),
            Node::Product(..) => format!("({})", self.render()),
        }
    }

    /// Preorder key: internal nodes sort before leaves, leaves by index.
    fn preorder(&self, out: &mut Vec<u32>) {
        match &self.0.node {
            Node::Leaf(i) => out.push(*i),
            Node::Product(l, r) => {
                out.push(0); // node marker, sorts before every leaf
                l.preorder(out);
                r.preorder(out);
            }
        }
    }
}

impl PartialEq for MagmaMonomial {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for MagmaMonomial {}

impl std::hash::Hash for MagmaMonomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl Ord for MagmaMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0.id == other.0.id {
            return Ordering::Equal;
        }
        match self.0.degree.cmp(&other.0.degree) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.preorder(&mut a);
        other.preorder(&mut b);
        a.cmp(&b)
    }
}

impl PartialOrd for MagmaMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MagmaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for MagmaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A finite linear combination of monomials with scalars in `S`, tagged
/// with the number of generators in scope (so the zero element still knows
/// which algebra it lives in).
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement<S: Scalar> {
    gens: u32,
    terms: BTreeMap<MagmaMonomial, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(gens: u32) -> Self {
        AlgebraElement {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(i: u32, gens: u32) -> Self {
        Self::term(S::one(), &MagmaMonomial::generator(i), gens)
    }

    pub fn term(c: S, m: &MagmaMonomial, gens: u32) -> Self {
        assert!(
            m.max_generator() <= gens,
            "monomial {m} uses a generator beyond x{gens}"
        );
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m.clone(), c);
        }
        AlgebraElement { gens, terms }
    }

    pub fn generator_count(&self) -> u32 {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MagmaMonomial, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &MagmaMonomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, m: MagmaMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        assert!(
            m.max_generator() <= self.gens,
            "monomial {m} uses a generator beyond x{}",
            self.gens
        );
        match self.terms.entry(m) {
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

    fn join_gens(&self, rhs: &Self) -> u32 {
        self.gens.max(rhs.gens)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = AlgebraElement {
            gens: self.join_gens(rhs),
            terms: self.terms.clone(),
        };
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, k) in &self.terms {
            out.insert(m.clone(), k.mul(c));
        }
        out
    }

    /// The bilinear product extending the tree product of monomials.
    pub fn product(&self, rhs: &Self) -> Self {
        let mut out = AlgebraElement::zero(self.join_gens(rhs));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert(MagmaMonomial::product(m1, m2), c1.mul(c2));
            }
        }
        out
    }

    /// `sum_i c_i * e_i`.
    pub fn linear_combine(items: &[(S, AlgebraElement<S>)], gens: u32) -> Self {
        let mut out = AlgebraElement::zero(gens);
        for (c, e) in items {
            out = out.add(&e.scale(c));
        }
        out
    }

    /// Substitute `images[i-1]` for generator `x{i}` (the unique algebra
    /// endomorphism extending that assignment).
    pub fn substitute(&self, images: &[AlgebraElement<S>]) -> Self {
        let gens = images
            .iter()
            .map(|e| e.gens)
            .max()
            .unwrap_or(1)
            .max(1);
        let mut memo: HashMap<MagmaMonomial, AlgebraElement<S>> = HashMap::new();
        let mut out = AlgebraElement::zero(gens);
        for (m, c) in &self.terms {
            let image = subst_mono(m, images, gens, &mut memo);
            out = out.add(&image.scale(c));
        }
        out
    }

    /// `substitute` computed modulo F^(cap+1): every intermediate product
    /// is truncated, which keeps symbolic coefficients from blowing up in
    /// graded quotients.
    pub fn substitute_truncated(&self, images: &[AlgebraElement<S>], cap: u32) -> Self {
        let gens = images
            .iter()
            .map(|e| e.gens)
            .max()
            .unwrap_or(1)
            .max(1);
        let mut memo: HashMap<MagmaMonomial, AlgebraElement<S>> = HashMap::new();
        let mut out = AlgebraElement::zero(gens);
        for (m, c) in &self.terms {
            let image = subst_mono_capped(m, images, gens, cap, &mut memo);
            out = out.add(&image.scale(c));
        }
        out
    }

    /// The part of total degree exactly `n`.
    pub fn graded_component(&self, n: u32) -> Self {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, c) in &self.terms {
            if m.degree() == n {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// The part of multidegree exactly `mu` (indexed from generator 1).
    pub fn multigraded_component(&self, mu: &[u32]) -> Self {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, c) in &self.terms {
            if m.multidegree(self.gens) == mu {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Drop every term of degree >= `n` (the quotient map modulo the
    /// filtration ideal F^n).
    pub fn truncate(&self, n: u32) -> Self {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, c) in &self.terms {
            if m.degree() < n {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// The distinct multidegrees among the terms.
    pub fn multidegrees(&self) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self
            .terms
            .keys()
            .map(|m| m.multidegree(self.gens))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Map scalars into another scalar type.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AlgebraElement<T> {
        let mut out = AlgebraElement::zero(self.gens);
        for (m, c) in &self.terms {
            out.insert(m.clone(), f(c));
        }
        out
    }

    /// Reinterpret with a (weakly larger) generator count.
    pub fn with_gens(&self, gens: u32) -> Self {
        let mut out = self.clone();
        assert!(
            out.terms.keys().all(|m| m.max_generator() <= gens),
            "element uses a generator beyond x{gens}"
        );
        out.gens = gens;
        out
    }
}

fn subst_mono<S: Scalar>(
    m: &MagmaMonomial,
    images: &[AlgebraElement<S>],
    gens: u32,
    memo: &mut HashMap<MagmaMonomial, AlgebraElement<S>>,
) -> AlgebraElement<S> {
    if let Some(e) = memo.get(m) {
        return e.clone();
    }
    let out = match (&m.as_generator(), m.as_product()) {
        (Some(i), _) => images
            .get(*i as usize - 1)
            .unwrap_or_else(|| panic!("no image supplied for x{i}"))
            .clone()
            .with_gens(gens),
        (None, Some((l, r))) => {
            let li = subst_mono(l, images, gens, memo);
            let ri = subst_mono(r, images, gens, memo);
            li.product(&ri)
        }
        _ => unreachable!(),
    };
    memo.insert(m.clone(), out.clone());
    out
}

fn subst_mono_capped<S: Scalar>(
    m: &MagmaMonomial,
    images: &[AlgebraElement<S>],
    gens: u32,
    cap: u32,
    memo: &mut HashMap<MagmaMonomial, AlgebraElement<S>>,
) -> AlgebraElement<S> {
    if let Some(e) = memo.get(m) {
        return e.clone();
    }
    let out = match (&m.as_generator(), m.as_product()) {
        (Some(i), _) => images
            .get(*i as usize - 1)
            .unwrap_or_else(|| panic!("no image supplied for x{i}"))
            .clone()
            .with_gens(gens)
            .truncate(cap + 1),
        (None, Some((l, r))) => {
            let li = subst_mono_capped(l, images, gens, cap, memo);
            let ri = subst_mono_capped(r, images, gens, cap, memo);
            li.product(&ri).truncate(cap + 1)
        }
        _ => unreachable!(),
    };
    memo.insert(m.clone(), out.clone());
    out
}

impl<S: Scalar> fmt::Display for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::exprio::format_generic(self))
    }
}

impl<S: Scalar> fmt::Debug for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All monomials of multidegree `mu` (1-based generator slots), in term
/// order.
pub fn enumerate_monomials_multidegree(mu: &[u32]) -> Vec<MagmaMonomial> {
    let total: u32 = mu.iter().sum();
    let mut out = Vec::new();
    if total == 0 {
        return out;
    }
    if total == 1 {
        let i = mu.iter().position(|&e| e == 1).unwrap() as u32 + 1;
        return vec![MagmaMonomial::generator(i)];
    }
    for left in proper_sub_multidegrees(mu) {
        let right: Vec<u32> = mu.iter().zip(&left).map(|(a, b)| a - b).collect();
        for l in enumerate_monomials_multidegree(&left) {
            for r in enumerate_monomials_multidegree(&right) {
                out.push(MagmaMonomial::product(&l, &r));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Nonzero multidegrees strictly below `mu` componentwise-or-equal.
fn proper_sub_multidegrees(mu: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &e in mu {
        let mut next = Vec::new();
        for prefix in &out {
            for k in 0..=e {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    let total: u32 = mu.iter().sum();
    out.retain(|v| {
        let s: u32 = v.iter().sum();
        s > 0 && s < total
    });
    out
}

/// All monomials of total degree `n` in generators x1..xg, in term order.
pub fn enumerate_monomials(g: u32, n: u32) -> Vec<MagmaMonomial> {
    let mut out = Vec::new();
    for mu in compositions(n, g) {
        out.extend(enumerate_monomials_multidegree(&mu));
    }
    out.sort();
    out
}

/// All ways to write `n` as an ordered sum of `g` nonnegative parts.
pub fn compositions(n: u32, g: u32) -> Vec<Vec<u32>> {
    if g == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, g - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldElement;

    type Elem = AlgebraElement<FieldElement>;

    fn xg(i: u32) -> Elem {
        Elem::generator(i, 3)
    }

    fn catalan(n: u32) -> u64 {
        // C_0 = 1, C_{k+1} = sum C_i C_{k-i}
        let mut c = vec![1u64];
        for k in 0..n as usize {
            let next: u64 = (0..=k).map(|i| c[i] * c[k - i]).sum();
            c.push(next);
        }
        c[n as usize]
    }

    fn factorial(n: u32) -> u64 {
        (1..=n as u64).product::<u64>().max(1)
    }

    #[test]
    fn monomial_counts_match_catalan_multinomial() {
        for g in 1..=3u32 {
            for n in 1..=5u32 {
                let count = enumerate_monomials(g, n).len() as u64;
                let expect: u64 = compositions(n, g)
                    .iter()
                    .map(|mu| {
                        let multinomial =
                            factorial(n) / mu.iter().map(|&e| factorial(e)).product::<u64>();
                        catalan(n - 1) * multinomial
                    })
                    .sum();
                assert_eq!(count, expect, "g={g} n={n}");
            }
        }
    }

    #[test]
    fn term_order_and_rendering() {
        let ms = enumerate_monomials_multidegree(&[1, 1]);
        assert_eq!(
            ms.iter().map(|m| m.render()).collect::<Vec<_>>(),
            ["x1*x2", "x2*x1"]
        );
        let e = xg(2).product(&xg(1)).add(&xg(1).product(&xg(2)));
        assert_eq!(e.to_string(), "x1*x2 + x2*x1");
        let m = MagmaMonomial::product(
            &MagmaMonomial::product(
                &MagmaMonomial::generator(1),
                &MagmaMonomial::generator(2),
            ),
            &MagmaMonomial::generator(1),
        );
        assert_eq!(m.render(), "(x1*x2)*x1");
        // Left-combed trees come before right-combed ones of equal degree.
        let left = MagmaMonomial::product(
            &MagmaMonomial::product(
                &MagmaMonomial::generator(1),
                &MagmaMonomial::generator(1),
            ),
            &MagmaMonomial::generator(2),
        );
        let right = MagmaMonomial::product(
            &MagmaMonomial::generator(1),
            &MagmaMonomial::product(
                &MagmaMonomial::generator(1),
                &MagmaMonomial::generator(2),
            ),
        );
        assert!(left < right);
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let u = xg(1).product(&xg(2)).add(&xg(3));
        let v = xg(2).product(&xg(2));
        let images = [
            xg(2).add(&xg(1)),
            xg(1).product(&xg(3)),
            xg(1).scale(&FieldElement::ratio(1, 2)),
        ];
        let lhs = u.product(&v).substitute(&images);
        let rhs = u.substitute(&images).product(&v.substitute(&images));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn grading_and_truncation() {
        let e = xg(1)
            .add(&xg(1).product(&xg(2)))
            .add(&xg(1).product(&xg(1).product(&xg(2))));
        assert_eq!(e.graded_component(2), xg(1).product(&xg(2)));
        assert_eq!(e.truncate(3), xg(1).add(&xg(1).product(&xg(2))));
        assert_eq!(e.multigraded_component(&[1, 0, 0]), xg(1));
        assert_eq!(e.max_degree(), 3);
    }

    #[test]
    fn interning_gives_cheap_equality() {
        let a = MagmaMonomial::product(
            &MagmaMonomial::generator(1),
            &MagmaMonomial::generator(2),
        );
        let b = MagmaMonomial::product(
            &MagmaMonomial::generator(1),
            &MagmaMonomial::generator(2),
        );
        assert!(Arc::ptr_eq(&a.0, &b.0));
    }
}
