//! Text syntax for elements, `S̄` elements, points and cylinders.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' nat]
//! atom   := number | 'i' | u[c,…] | 's' | 's*' | qterm(n,h,g,k,h',m) | '(' expr ')' ['*']
//! number := int ['/' int] ['i']
//! ```
//!
//! `s*` (no space) is the adjoint of `s`, and `(x)*` (no space) is the
//! adjoint of `x`; a spaced `*` is multiplication. Group arguments are
//! integers in rank one and `[c1,…,cd]` in general. `#` starts a comment.
//!
//! Semidirect elements are written `((g,i),n)` for `(φ^{-i}(g), n)`, points
//! `g@N`, and cylinders `V[m]{i,j,…}` with positions in `transversal(m)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::coeff::Coeff;
use crate::dynamics::{Cylinder, Dynamics, ProfinitePoint, SemidirectElement};
use crate::error::{Error, Result};
use crate::group::{EndoContext, GroupElement};
use crate::oracle::FiniteVector;
use crate::ortho::QTerm;
use crate::word::{Algebra, AlgebraElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Scalar(Coeff),
    U(Vec<BigInt>),
    S,
    SStar,
    QTerm { n: u32, h: Vec<BigInt>, g: Vec<BigInt>, k: u32, h_prime: Vec<BigInt>, m: u32 },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Adjoint(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Imag,
    Ident(String),
    Sym(char),
    /// `*` glued to the preceding `s` or `)`.
    Star,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Lexer> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
            toks.push((Tok::Int(digits.parse().expect("digits")), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
            if word == "i" {
                toks.push((Tok::Imag, pos));
            } else {
                toks.push((Tok::Ident(word), pos));
            }
            continue;
        }
        if c == '*' {
            let glued = matches!(toks.last(), Some((Tok::Ident(w), p)) if w == "s" && p + 1 == pos)
                || matches!(toks.last(), Some((Tok::Sym(')'), p)) if p + 1 == pos);
            toks.push((if glued { Tok::Star } else { Tok::Sym('*') }, pos));
            i += 1;
            continue;
        }
        if "+-/^()[]{},@".contains(c) {
            toks.push((Tok::Sym(c), pos));
            i += 1;
            continue;
        }
        return Err(Error::parse(pos, format!("unexpected character `{c}`")));
    }
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser { toks: lex(src)?.toks, at: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("expected `{c}`")))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at < self.toks.len() {
            return Err(Error::parse(self.pos(), "unexpected trailing input"));
        }
        Ok(())
    }

    fn int(&mut self) -> Result<BigInt> {
        let neg = self.eat('-');
        match self.bump() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            _ => {
                self.at -= 1;
                Err(Error::parse(self.pos(), "expected an integer"))
            }
        }
    }

    fn nat(&mut self) -> Result<u32> {
        let pos = self.pos();
        let v = self.int()?;
        v.to_u32().ok_or_else(|| Error::parse(pos, "expected a natural number"))
    }

    fn i64(&mut self) -> Result<i64> {
        let pos = self.pos();
        self.int()?.to_i64().ok_or_else(|| Error::parse(pos, "integer out of range"))
    }

    /// `c` or `[c1,…,cd]`.
    fn group_arg(&mut self) -> Result<Vec<BigInt>> {
        if self.eat('[') {
            let mut out = vec![self.int()?];
            while self.eat(',') {
                out.push(self.int()?);
            }
            self.expect(']')?;
            Ok(out)
        } else {
            Ok(vec![self.int()?])
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') { Expr::Neg(Box::new(self.term()?)) } else { self.term()? };
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_) | Tok::Imag | Tok::Ident(_) | Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') || self.starts_factor() {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let atom = self.atom()?;
        if self.eat('^') {
            let k = self.nat()?;
            return Ok(Expr::Pow(Box::new(atom), k));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(num)) => {
                let mut value = BigRational::from_integer(num);
                if self.eat('/') {
                    let dpos = self.pos();
                    let den = self.int()?;
                    if den.is_zero() {
                        return Err(Error::parse(dpos, "zero denominator"));
                    }
                    value /= BigRational::from_integer(den);
                }
                if self.peek() == Some(&Tok::Imag) {
                    self.at += 1;
                    return Ok(Expr::Scalar(Coeff::new(BigRational::zero(), value)));
                }
                Ok(Expr::Scalar(Coeff::real(value)))
            }
            Some(Tok::Imag) => Ok(Expr::Scalar(Coeff::new(BigRational::zero(), BigRational::one()))),
            Some(Tok::Ident(w)) => match w.as_str() {
                "u" => {
                    if self.peek() != Some(&Tok::Sym('[')) {
                        return Err(Error::parse(self.pos(), "expected `[` after `u`"));
                    }
                    Ok(Expr::U(self.group_arg()?))
                }
                "s" => {
                    if self.peek() == Some(&Tok::Star) {
                        self.at += 1;
                        Ok(Expr::SStar)
                    } else {
                        Ok(Expr::S)
                    }
                }
                "qterm" => {
                    self.expect('(')?;
                    let n = self.nat()?;
                    self.expect(',')?;
                    let h = self.group_arg()?;
                    self.expect(',')?;
                    let g = self.group_arg()?;
                    self.expect(',')?;
                    let k = self.nat()?;
                    self.expect(',')?;
                    let h_prime = self.group_arg()?;
                    self.expect(',')?;
                    let m = self.nat()?;
                    self.expect(')')?;
                    Ok(Expr::QTerm { n, h, g, k, h_prime, m })
                }
                other => Err(Error::parse(pos, format!("unknown name `{other}`"))),
            },
            Some(Tok::Sym('(')) => {
                let inner = self.expr()?;
                self.expect(')')?;
                if self.peek() == Some(&Tok::Star) {
                    self.at += 1;
                    return Ok(Expr::Adjoint(Box::new(inner)));
                }
                Ok(inner)
            }
            Some(_) => Err(Error::parse(pos, "expected an operand")),
            None => Err(Error::parse(pos, "unexpected end of input")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser::new(src)?;
    if p.toks.is_empty() {
        return Err(Error::parse(0, "empty expression"));
    }
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

fn group(ctx: &EndoContext, coords: &[BigInt]) -> Result<GroupElement> {
    if coords.len() != ctx.rank() {
        return Err(Error::DimensionMismatch { expected: ctx.rank(), got: coords.len() });
    }
    Ok(ctx.element_big(coords.to_vec()))
}

impl Expr {
    pub fn eval(&self, alg: &Algebra) -> Result<AlgebraElement> {
        let ctx = alg.ctx();
        Ok(match self {
            Expr::Scalar(c) => alg.scalar(c.clone()),
            Expr::U(g) => alg.u(&group(ctx, g)?),
            Expr::S => alg.s(),
            Expr::SStar => alg.s_star(),
            Expr::QTerm { .. } => alg.qterm_element(&self.qterm(ctx, Coeff::one())?.expect("qterm")),
            Expr::Add(a, b) => a.eval(alg)?.add(&b.eval(alg)?),
            Expr::Sub(a, b) => a.eval(alg)?.sub(&b.eval(alg)?),
            Expr::Neg(a) => a.eval(alg)?.neg(),
            Expr::Mul(a, b) => alg.mul(&a.eval(alg)?, &b.eval(alg)?),
            Expr::Pow(a, k) => alg.pow(&a.eval(alg)?, *k),
            Expr::Adjoint(a) => alg.adjoint(&a.eval(alg)?),
        })
    }

    fn qterm(&self, ctx: &EndoContext, coeff: Coeff) -> Result<Option<QTerm>> {
        let Expr::QTerm { n, h, g, k, h_prime, m } = self else {
            return Ok(None);
        };
        Ok(Some(QTerm {
            coeff,
            n: *n,
            h: group(ctx, h)?,
            fg: group(ctx, g)?,
            fk: *k,
            h_prime: group(ctx, h_prime)?,
            m: *m,
        }))
    }

    /// The terms of a signed sum of `c · qterm(…)`, if the expression has
    /// exactly that shape.
    pub fn qterms(&self, ctx: &EndoContext) -> Result<Option<Vec<QTerm>>> {
        let mut out = Vec::new();
        if self.collect_qterms(ctx, Coeff::one(), &mut out)? {
            Ok(Some(out))
        } else {
            Ok(None)
        }
    }

    fn collect_qterms(&self, ctx: &EndoContext, sign: Coeff, out: &mut Vec<QTerm>) -> Result<bool> {
        match self {
            Expr::Add(a, b) => Ok(a.collect_qterms(ctx, sign.clone(), out)? && b.collect_qterms(ctx, sign, out)?),
            Expr::Sub(a, b) => Ok(a.collect_qterms(ctx, sign.clone(), out)? && b.collect_qterms(ctx, -sign, out)?),
            Expr::Neg(a) => a.collect_qterms(ctx, -sign, out),
            Expr::QTerm { .. } => {
                out.extend(self.qterm(ctx, sign)?);
                Ok(true)
            }
            Expr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
                (Expr::Scalar(c), q @ Expr::QTerm { .. }) => {
                    out.extend(q.qterm(ctx, &sign * c)?);
                    Ok(true)
                }
                _ => Ok(false),
            },
            _ => Ok(false),
        }
    }

    /// The literal operator on `ℓ²(G)` applied to `ξ_x`, evaluated straight
    /// from the syntax tree without any rewriting.
    pub fn act_literal(&self, ctx: &EndoContext, v: &FiniteVector) -> Result<FiniteVector> {
        Ok(match self {
            Expr::Scalar(c) => scale(v, c),
            Expr::U(g) => {
                let g = group(ctx, g)?;
                map_basis(v, |x| Some(ctx.add(&g, x)))
            }
            Expr::S => map_basis(v, |x| Some(ctx.apply_endo(x, 1))),
            Expr::SStar => map_basis(v, |x| ctx.preimage(x, 1)),
            Expr::QTerm { n, h, g, k, h_prime, m } => {
                let neg = |c: &Vec<BigInt>| c.iter().map(|x| -x).collect::<Vec<_>>();
                let word = [
                    vec![Expr::SStar; *n as usize],
                    vec![Expr::U(neg(h)), Expr::U(g.clone())],
                    vec![Expr::S; *k as usize],
                    vec![Expr::SStar; *k as usize],
                    vec![Expr::U(neg(g)), Expr::U(h_prime.clone())],
                    vec![Expr::S; *m as usize],
                ]
                .concat();
                word.iter().rev().try_fold(v.clone(), |acc, l| l.act_literal(ctx, &acc))?
            }
            Expr::Add(a, b) => add(&a.act_literal(ctx, v)?, &b.act_literal(ctx, v)?),
            Expr::Sub(a, b) => add(&a.act_literal(ctx, v)?, &scale(&b.act_literal(ctx, v)?, &Coeff::int(-1))),
            Expr::Neg(a) => scale(&a.act_literal(ctx, v)?, &Coeff::int(-1)),
            Expr::Mul(a, b) => a.act_literal(ctx, &b.act_literal(ctx, v)?)?,
            Expr::Pow(a, k) => (0..*k).try_fold(v.clone(), |acc, _| a.act_literal(ctx, &acc))?,
            Expr::Adjoint(a) => a.adjoint_tree().act_literal(ctx, v)?,
        })
    }

    /// `(ab)* = b*a*`, `u_g* = u_{-g}`, `s** = s`, scalars conjugated.
    fn adjoint_tree(&self) -> Expr {
        match self {
            Expr::Scalar(c) => Expr::Scalar(c.conj()),
            Expr::U(g) => Expr::U(g.iter().map(|x| -x).collect()),
            Expr::S => Expr::SStar,
            Expr::SStar => Expr::S,
            Expr::QTerm { n, h, g, k, h_prime, m } => {
                Expr::QTerm { n: *m, h: h_prime.clone(), g: g.clone(), k: *k, h_prime: h.clone(), m: *n }
            }
            Expr::Add(a, b) => Expr::Add(Box::new(a.adjoint_tree()), Box::new(b.adjoint_tree())),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.adjoint_tree()), Box::new(b.adjoint_tree())),
            Expr::Neg(a) => Expr::Neg(Box::new(a.adjoint_tree())),
            Expr::Mul(a, b) => Expr::Mul(Box::new(b.adjoint_tree()), Box::new(a.adjoint_tree())),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.adjoint_tree()), *k),
            Expr::Adjoint(a) => a.as_ref().clone(),
        }
    }
}

fn scale(v: &FiniteVector, c: &Coeff) -> FiniteVector {
    let mut out = FiniteVector::zero();
    for (x, d) in v.support() {
        out.push(x.clone(), d * c);
    }
    out
}

fn add(a: &FiniteVector, b: &FiniteVector) -> FiniteVector {
    let mut out = a.clone();
    for (x, d) in b.support() {
        out.push(x.clone(), d.clone());
    }
    out
}

fn map_basis(v: &FiniteVector, f: impl Fn(&GroupElement) -> Option<GroupElement>) -> FiniteVector {
    let mut out = FiniteVector::zero();
    for (x, c) in v.support() {
        if let Some(y) = f(x) {
            out.push(y, c.clone());
        }
    }
    out
}

pub fn parse_element(alg: &Algebra, src: &str) -> Result<AlgebraElement> {
    parse(src)?.eval(alg)
}

/// `((g,i),n)`.
pub fn parse_semidirect(d: &Dynamics, src: &str) -> Result<SemidirectElement> {
    let mut p = Parser::new(src)?;
    p.expect('(')?;
    p.expect('(')?;
    let g = p.group_arg()?;
    p.expect(',')?;
    let i = p.nat()?;
    p.expect(')')?;
    p.expect(',')?;
    let n = p.i64()?;
    p.expect(')')?;
    p.finish()?;
    Ok(d.element(&group(d.ctx(), &g)?, i, n))
}

/// `g@N`.
pub fn parse_point(d: &Dynamics, src: &str) -> Result<ProfinitePoint> {
    let mut p = Parser::new(src)?;
    let g = p.group_arg()?;
    p.expect('@')?;
    let depth = p.nat()?;
    p.finish()?;
    Ok(d.point(&group(d.ctx(), &g)?, depth))
}

/// `V[m]{i,j,…}`.
pub fn parse_cylinder(d: &Dynamics, src: &str) -> Result<Cylinder> {
    let mut p = Parser::new(src)?;
    match p.bump() {
        Some(Tok::Ident(w)) if w == "V" => {}
        _ => return Err(Error::parse(0, "expected `V[m]{…}`")),
    }
    p.expect('[')?;
    let level = p.nat()?;
    p.expect(']')?;
    p.expect('{')?;
    let mut idx = vec![p.int()?];
    while p.eat(',') {
        idx.push(p.int()?);
    }
    p.expect('}')?;
    p.finish()?;
    d.cylinder_from_indices(level, &idx)
}

pub fn parse_group(ctx: &EndoContext, src: &str) -> Result<GroupElement> {
    let mut p = Parser::new(src)?;
    let g = p.group_arg()?;
    p.finish()?;
    group(ctx, &g)
}
