//! Normal-form arithmetic on the dense *-subalgebra spanned by the
//! monomials `u_a sᵖ s*^q u_b`.
//!
//! A monomial is canonical when `a` is the canonical representative of
//! `a·φᵖ(G)`; the residual factor is pushed through `sᵖ s*^q` into `b`.
//! Products of canonical monomials are again single monomials (or zero),
//! so elements are finite maps from canonical monomials to coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::group::{EndoContext, GroupElement};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    U(GroupElement),
    S,
    Sstar,
}

/// `u[c,…]`, `s` or `s*`, in the expression syntax.
impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::U(g) => write!(f, "u{g}"),
            Letter::S => write!(f, "s"),
            Letter::Sstar => write!(f, "s*"),
        }
    }
}

/// Letters separated by spaces; the empty word prints as `1`.
pub fn format_word(word: &[Letter]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

/// `u_a sᵖ s*^q u_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub a: GroupElement,
    pub p: u32,
    pub q: u32,
    pub b: GroupElement,
}

impl Monomial {
    /// Gauge degree `p − q`.
    pub fn degree(&self) -> i64 {
        self.p as i64 - self.q as i64
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.q.cmp(&other.q))
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{} s^{} s*^{} u{}", self.a, self.p, self.q, self.b)
    }
}

/// Finite linear combination of canonical monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Coeff>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn from_monomial(m: Monomial, c: Coeff) -> Self {
        let mut x = AlgebraElement::zero();
        x.push(m, c);
        x
    }

    /// Structurally empty. Use [`Algebra::is_zero`] for equality in the algebra.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn push(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.push(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(&Coeff::int(-1))
    }

    pub fn scale(&self, k: &Coeff) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (m, c) in self.terms() {
            out.push(m.clone(), c * k);
        }
        out
    }

    /// Terms grouped by gauge degree.
    pub fn degree_components(&self) -> BTreeMap<i64, AlgebraElement> {
        let mut out: BTreeMap<i64, AlgebraElement> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.degree()).or_default().push(m.clone(), c.clone());
        }
        out
    }
}

impl FromIterator<(Monomial, Coeff)> for AlgebraElement {
    fn from_iter<I: IntoIterator<Item = (Monomial, Coeff)>>(iter: I) -> Self {
        let mut out = AlgebraElement::zero();
        for (m, c) in iter {
            out.push(m, c);
        }
        out
    }
}

/// Deterministic text form `c * u[a] s^p s*^q u[b] + …`, parsed back by
/// [`crate::expr`].
impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_real() && c.re().is_negative();
            let magnitude = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude} * {m}")?;
            }
        }
        Ok(())
    }
}

/// Arithmetic in the algebra attached to a fixed context.
#[derive(Clone, Copy, Debug)]
pub struct Algebra<'c> {
    ctx: &'c EndoContext,
}

impl<'c> Algebra<'c> {
    pub fn new(ctx: &'c EndoContext) -> Self {
        Algebra { ctx }
    }

    pub fn ctx(&self) -> &'c EndoContext {
        self.ctx
    }

    /// Canonical form of `u_a sᵖ s*^q u_b`.
    ///
    /// With `a = â + φᵖ(c)`: `u_a sᵖ s*^q u_b = u_â sᵖ s*^q u_{φ^q(c) + b}`.
    /// For surjective `φ` the relation forces `ss* = 1`, so `min(p, q)` is
    /// cancelled first.
    pub fn canonical(&self, a: &GroupElement, p: u32, q: u32, b: &GroupElement) -> Monomial {
        let ctx = self.ctx;
        let (p, q) = if ctx.is_index_one() {
            let k = p.min(q);
            (p - k, q - k)
        } else {
            (p, q)
        };
        let rep = ctx.coset_rep(a, p);
        let c = ctx
            .preimage(&ctx.sub(a, &rep), p)
            .expect("a - rep(a) lies in the image lattice");
        let b = ctx.add(&ctx.apply_endo(&c, q), b);
        Monomial { a: rep, p, q, b }
    }

    pub fn monomial(&self, a: &GroupElement, p: u32, q: u32, b: &GroupElement) -> AlgebraElement {
        AlgebraElement::from_monomial(self.canonical(a, p, q, b), Coeff::one())
    }

    pub fn one(&self) -> AlgebraElement {
        let e = self.ctx.zero();
        self.monomial(&e, 0, 0, &e)
    }

    pub fn scalar(&self, c: Coeff) -> AlgebraElement {
        self.one().scale(&c)
    }

    pub fn u(&self, g: &GroupElement) -> AlgebraElement {
        let e = self.ctx.zero();
        self.monomial(&e, 0, 0, g)
    }

    pub fn s(&self) -> AlgebraElement {
        let e = self.ctx.zero();
        self.monomial(&e, 1, 0, &e)
    }

    pub fn s_star(&self) -> AlgebraElement {
        let e = self.ctx.zero();
        self.monomial(&e, 0, 1, &e)
    }

    /// `u_g sᵏ s*ᵏ u_{-g}`, the projection onto `g + φᵏ(G)`.
    pub fn projection_monomial(&self, g: &GroupElement, k: u32) -> Monomial {
        self.canonical(g, k, k, &self.ctx.neg(g))
    }

    pub fn projection(&self, g: &GroupElement, k: u32) -> AlgebraElement {
        AlgebraElement::from_monomial(self.projection_monomial(g, k), Coeff::one())
    }

    pub fn letter(&self, l: &Letter) -> AlgebraElement {
        match l {
            Letter::U(g) => self.u(g),
            Letter::S => self.s(),
            Letter::Sstar => self.s_star(),
        }
    }

    pub fn from_word(&self, word: &[Letter]) -> AlgebraElement {
        word.iter().fold(self.one(), |acc, l| self.mul(&acc, &self.letter(l)))
    }

    /// Closed-form product of canonical monomials:
    /// `s*^q u_k s^r` is `u_{φ^{-q}(k)} s^{r-q}` or `s*^{q-r} u_{φ^{-r}(k)}`
    /// when `k ∈ φ^{min(q,r)}(G)`, and `0` otherwise.
    pub fn mul_monomial(&self, x: &Monomial, y: &Monomial) -> Option<Monomial> {
        let ctx = self.ctx;
        let k = ctx.add(&x.b, &y.a);
        if x.q <= y.p {
            let e = ctx.preimage(&k, x.q)?;
            let a = ctx.add(&x.a, &ctx.apply_endo(&e, x.p));
            Some(self.canonical(&a, x.p + y.p - x.q, y.q, &y.b))
        } else {
            let e = ctx.preimage(&k, y.p)?;
            let b = ctx.add(&ctx.apply_endo(&e, y.q), &y.b);
            Some(self.canonical(&x.a, x.p, x.q - y.p + y.q, &b))
        }
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                if let Some(m) = self.mul_monomial(mx, my) {
                    out.push(m, cx * cy);
                }
            }
        }
        out
    }

    pub fn mul_all(&self, factors: &[&AlgebraElement]) -> AlgebraElement {
        factors.iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    pub fn pow(&self, x: &AlgebraElement, k: u32) -> AlgebraElement {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    pub fn adjoint_monomial(&self, m: &Monomial) -> Monomial {
        let ctx = self.ctx;
        self.canonical(&ctx.neg(&m.b), m.q, m.p, &ctx.neg(&m.a))
    }

    pub fn adjoint(&self, x: &AlgebraElement) -> AlgebraElement {
        x.terms().map(|(m, c)| (self.adjoint_monomial(m), c.conj())).collect()
    }

    /// `m` rewritten at `p + levels, q + levels` through the level-`levels`
    /// partition of unity.
    pub fn raise_monomial(&self, m: &Monomial, levels: u32) -> Result<AlgebraElement> {
        if levels == 0 || self.ctx.is_index_one() {
            return Ok(AlgebraElement::from_monomial(m.clone(), Coeff::one()));
        }
        let ctx = self.ctx;
        let mut out = AlgebraElement::zero();
        for g in ctx.transversal(levels)? {
            let a = ctx.add(&m.a, &ctx.apply_endo(&g, m.p));
            let b = ctx.sub(&m.b, &ctx.apply_endo(&g, m.q));
            out.push(self.canonical(&a, m.p + levels, m.q + levels, &b), Coeff::one());
        }
        Ok(out)
    }

    pub fn raise_level(&self, m: &Monomial) -> Result<AlgebraElement> {
        self.raise_monomial(m, 1)
    }

    fn raise_element(&self, x: &AlgebraElement, target_q: impl Fn(&Monomial) -> u32) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero();
        for (m, c) in x.terms() {
            let lift = target_q(m) - m.q;
            if lift == 0 {
                out.push(m.clone(), c.clone());
                continue;
            }
            for (r, _) in self.raise_monomial(m, lift)?.terms() {
                out.push(r.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Every gauge-degree component raised to the largest `q` it contains.
    /// Canonical monomials sharing `(p, q)` are linearly independent, so the
    /// result is zero exactly when `x` is.
    pub fn normal_form(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let mut top: BTreeMap<i64, u32> = BTreeMap::new();
        for (m, _) in x.terms() {
            let e = top.entry(m.degree()).or_insert(0);
            *e = (*e).max(m.q);
        }
        self.raise_element(x, |m| top[&m.degree()])
    }

    pub fn is_zero(&self, x: &AlgebraElement) -> Result<bool> {
        Ok(self.normal_form(x)?.is_empty())
    }

    pub fn equals(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<bool> {
        self.is_zero(&x.sub(y))
    }

    /// `p = q` and `a + b = e`.
    pub fn is_diagonal(&self, m: &Monomial) -> bool {
        m.p == m.q && self.ctx.add(&m.a, &m.b).is_zero()
    }

    pub fn is_diagonal_element(&self, x: &AlgebraElement) -> bool {
        x.terms().all(|(m, _)| self.is_diagonal(m))
    }

    /// Conditional expectation onto the diagonal: keeps exactly the
    /// monomials whose enveloping-group element is trivial.
    pub fn expectation(&self, x: &AlgebraElement) -> AlgebraElement {
        x.terms()
            .filter(|(m, _)| self.is_diagonal(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    /// A diagonal element as a function on the level-`N` atoms, `N` the
    /// deepest level present. Atoms not listed carry the value zero.
    pub fn diagonal_atoms(&self, x: &AlgebraElement) -> Result<(u32, BTreeMap<GroupElement, Coeff>)> {
        if !self.is_diagonal_element(x) {
            return Err(Error::NotDiagonal);
        }
        let level = x.terms().map(|(m, _)| m.p).max().unwrap_or(0);
        let raised = self.raise_element(x, |_| level)?;
        let atoms = raised.terms().map(|(m, c)| (m.a.clone(), c.clone())).collect();
        Ok((level, atoms))
    }

    /// `‖x‖²` for diagonal `x`: the largest squared modulus over atoms.
    pub fn diagonal_norm_sq(&self, x: &AlgebraElement) -> Result<BigRational> {
        let (_, atoms) = self.diagonal_atoms(x)?;
        Ok(atoms.values().map(|c| c.norm_sq()).fold(BigRational::zero(), |a, b| if b > a { b } else { a }))
    }
}
