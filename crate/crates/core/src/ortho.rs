//! Orthogonalizing projections for elements of `span(Q)`.
//!
//! An element is a sum of terms `c · s*ⁿ u_{-h} f u_{h'} sᵐ` with `f` a
//! projection `u_g sᵏ s*ᵏ u_{-g}`. After refining every `f` to a common
//! level `M` we get classes `g_1, …, g_N`; companions `h_i ≡ g_i` mod
//! `φᴹ(G)` and an exponent `p` give projections
//! `f_i = u_{h_i} sᵖ s*ᵖ u_{-h_i}` that compress every critical term to zero.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::group::{EndoContext, GroupElement};
use crate::word::{Algebra, AlgebraElement, Monomial};

pub const DEFAULT_COMPANION_BUDGET: usize = 64;

/// `coeff · s*ⁿ u_{-h} (u_{fg} s^{fk} s*^{fk} u_{-fg}) u_{h'} sᵐ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTerm {
    pub coeff: Coeff,
    pub n: u32,
    pub h: GroupElement,
    pub fg: GroupElement,
    pub fk: u32,
    pub h_prime: GroupElement,
    pub m: u32,
}

impl QTerm {
    pub fn is_critical(&self, ctx: &EndoContext) -> bool {
        self.n != self.m || !ctx.sub(&self.h, &self.h_prime).is_zero()
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.coeff.is_one() {
            write!(f, "{} ", self.coeff)?;
        }
        write!(
            f,
            "qterm({},{},{},{},{},{})",
            self.n,
            bare(&self.h),
            bare(&self.fg),
            self.fk,
            bare(&self.h_prime),
            self.m
        )
    }
}

fn bare(g: &GroupElement) -> String {
    if g.rank() == 1 {
        g.coords()[0].to_string()
    } else {
        g.to_string()
    }
}

impl<'c> Algebra<'c> {
    pub fn qterm_element(&self, t: &QTerm) -> AlgebraElement {
        let ctx = self.ctx();
        let e = ctx.zero();
        let left = self.monomial(&e, 0, t.n, &ctx.neg(&t.h));
        let right = self.monomial(&t.h_prime, t.m, 0, &e);
        self.mul_all(&[&left, &self.projection(&t.fg, t.fk), &right]).scale(&t.coeff)
    }

    pub fn qterms_element(&self, terms: &[QTerm]) -> AlgebraElement {
        terms.iter().fold(AlgebraElement::zero(), |acc, t| acc.add(&self.qterm_element(t)))
    }

    /// A monomial as a single term. For `p ≥ q` the projection sits at level
    /// `p`: `u_a sᵖ s*^q u_b = (u_a sᵖ s*ᵖ u_{-a}) u_{a+φ^{p-q}(b)} s^{p-q}`;
    /// the other case is the adjoint of this one.
    pub fn monomial_qterm(&self, mono: &Monomial, coeff: Coeff) -> QTerm {
        let ctx = self.ctx();
        let e = ctx.zero();
        if mono.p >= mono.q {
            let d = mono.p - mono.q;
            QTerm {
                coeff,
                n: 0,
                h: e,
                fg: mono.a.clone(),
                fk: mono.p,
                h_prime: ctx.add(&mono.a, &ctx.apply_endo(&mono.b, d)),
                m: d,
            }
        } else {
            let t = self.monomial_qterm(&self.adjoint_monomial(mono), Coeff::one());
            QTerm { coeff, n: t.m, h: t.h_prime, fg: t.fg, fk: t.fk, h_prime: t.h, m: t.n }
        }
    }

    pub fn to_qform(&self, x: &AlgebraElement) -> Vec<QTerm> {
        x.terms().map(|(m, c)| self.monomial_qterm(m, c.clone())).collect()
    }
}

/// Valuation data of `φᵐ(-h_i) - h' + h + φⁿ(h_i)` for one critical term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalExponent {
    pub quantity: GroupElement,
    pub valuation: u32,
    pub exponent: u32,
}

/// The least `p` with `φᵐ(-h_i) - h' + h + φⁿ(h_i) ∉ φᵖ(G)`.
pub fn critical_exponent(ctx: &EndoContext, t: &QTerm, companion: &GroupElement) -> Result<CriticalExponent> {
    let quantity = ctx.add(
        &ctx.sub(&ctx.apply_endo(&ctx.neg(companion), t.m), &t.h_prime),
        &ctx.add(&t.h, &ctx.apply_endo(companion, t.n)),
    );
    if quantity.is_zero() {
        return Err(Error::CompanionRetry);
    }
    let v = ctx.valuation(&quantity)?;
    if v.saturated {
        return Err(Error::SaturatedValuation(v.value));
    }
    Ok(CriticalExponent { quantity, valuation: v.value, exponent: v.value + 1 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Companion {
    pub g: GroupElement,
    pub h: GroupElement,
    /// `h = g + φᴹ(w)`.
    pub w: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermExponent {
    pub term: usize,
    pub m: u32,
    pub n: u32,
    pub h: GroupElement,
    pub h_prime: GroupElement,
    /// Maximum over all companions.
    pub exponent: u32,
    /// The first companion attaining it, with its critical data.
    pub witness: GroupElement,
    pub quantity: GroupElement,
    pub valuation: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoResult {
    pub level: u32,
    pub companions: Vec<Companion>,
    pub per_term_exponents: Vec<TermExponent>,
    pub p: u32,
    pub projections: Vec<Monomial>,
}

impl OrthoResult {
    pub fn count(&self) -> usize {
        self.companions.len()
    }

    /// Smallest exponent the construction allows.
    pub fn minimal_p(&self) -> u32 {
        self.per_term_exponents.iter().map(|t| t.exponent).fold(self.level + 1, u32::max)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiVerdicts {
    /// `f_i f_j = 0` for `i ≠ j`.
    pub orthogonal: bool,
    /// `v_i = u_{h_i} sᵖ` is an isometry with `v_i v_i* = f_i`.
    pub equivalent_to_one: bool,
    /// `‖Σ f_i ε(y) f_i‖ = ‖ε(y)‖`.
    pub norm_preserved: bool,
    /// `f_i y f_i = f_i ε(y) f_i ∈ ℂ f_i`.
    pub compression_scalar: bool,
}

impl LiVerdicts {
    pub fn all(&self) -> bool {
        self.orthogonal && self.equivalent_to_one && self.norm_preserved && self.compression_scalar
    }
}

/// Serialized in the order `M, N, companions, per_term_exponents, p, verdicts`.
#[derive(Clone, Debug, Serialize)]
pub struct OrthoReport {
    #[serde(rename = "M")]
    pub level: u32,
    #[serde(rename = "N")]
    pub count: usize,
    pub companions: Vec<Companion>,
    pub per_term_exponents: Vec<TermExponent>,
    pub p: u32,
    pub verdicts: LiVerdicts,
}

#[derive(Clone, Copy, Debug)]
pub struct Orthogonalizer<'c> {
    alg: Algebra<'c>,
    budget: usize,
}

impl<'c> Orthogonalizer<'c> {
    pub fn new(ctx: &'c EndoContext) -> Self {
        Orthogonalizer { alg: Algebra::new(ctx), budget: DEFAULT_COMPANION_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn algebra(&self) -> Algebra<'c> {
        self.alg
    }

    /// `M = max fk` and the level-`M` classes refining all projections.
    pub fn common_level(&self, y: &[QTerm]) -> Result<(u32, Vec<GroupElement>)> {
        let ctx = self.alg.ctx();
        if y.is_empty() {
            return Err(Error::Precondition("empty presentation".into()));
        }
        let level = y.iter().map(|t| t.fk).max().unwrap_or(0);
        let mut classes = BTreeSet::new();
        for t in y {
            for r in ctx.transversal(level - t.fk)? {
                let g = ctx.add(&t.fg, &ctx.apply_endo(&r, t.fk));
                classes.insert(ctx.coset_rep(&g, level));
            }
        }
        Ok((level, classes.into_iter().collect()))
    }

    /// Companions searched as `g + φᴹ(w)` over the ball order, keeping the
    /// first candidate minimizing the worst critical exponent.
    pub fn build(&self, y: &[QTerm]) -> Result<OrthoResult> {
        let ctx = self.alg.ctx();
        let (level, classes) = self.common_level(y)?;
        let critical: Vec<(usize, &QTerm)> = y.iter().enumerate().filter(|(_, t)| t.is_critical(ctx)).collect();
        let floor = level + 1;
        let candidates = ctx.enumerate_ball(self.budget);

        let mut companions = Vec::with_capacity(classes.len());
        let mut table: Vec<Vec<CriticalExponent>> = Vec::with_capacity(classes.len());
        for g in &classes {
            let mut best: Option<(u32, Companion, Vec<CriticalExponent>)> = None;
            for w in &candidates {
                let h = ctx.add(g, &ctx.apply_endo(w, level));
                let data: Result<Vec<_>> = critical.iter().map(|(_, t)| critical_exponent(ctx, t, &h)).collect();
                let data = match data {
                    Ok(d) => d,
                    Err(Error::CompanionRetry | Error::SaturatedValuation(_)) => continue,
                    Err(e) => return Err(e),
                };
                let worst = data.iter().map(|c| c.exponent).max().unwrap_or(0);
                if best.as_ref().is_none_or(|(b, _, _)| worst < *b) {
                    best = Some((worst, Companion { g: g.clone(), h, w: w.clone() }, data));
                }
                if worst <= floor {
                    break;
                }
            }
            let (_, c, data) = best.ok_or(Error::CompanionExhausted(self.budget))?;
            companions.push(c);
            table.push(data);
        }

        Ok(self.assemble(y, level, &classes, companions, table))
    }

    /// Caller-chosen companions, one per level-`M` class in the order of
    /// [`Self::common_level`]; each `h` must lie in the class of its `g`.
    pub fn build_with_companions(&self, y: &[QTerm], hs: &[GroupElement]) -> Result<OrthoResult> {
        let ctx = self.alg.ctx();
        let (level, classes) = self.common_level(y)?;
        if hs.len() != classes.len() {
            return Err(Error::Precondition(format!("expected {} companions, got {}", classes.len(), hs.len())));
        }
        let mut companions = Vec::with_capacity(classes.len());
        let mut table = Vec::with_capacity(classes.len());
        for (g, h) in classes.iter().zip(hs) {
            let w = ctx
                .preimage(&ctx.sub(h, g), level)
                .ok_or_else(|| Error::Precondition(format!("companion {h} is not in the class of {g}")))?;
            let row = y
                .iter()
                .filter(|t| t.is_critical(ctx))
                .map(|t| critical_exponent(ctx, t, h))
                .collect::<Result<Vec<_>>>()?;
            companions.push(Companion { g: g.clone(), h: h.clone(), w });
            table.push(row);
        }
        Ok(self.assemble(y, level, &classes, companions, table))
    }

    /// Per-term maxima over the companion table. Ties go to the class of the
    /// term's own projection, then to the first class.
    fn assemble(
        &self,
        y: &[QTerm],
        level: u32,
        classes: &[GroupElement],
        companions: Vec<Companion>,
        table: Vec<Vec<CriticalExponent>>,
    ) -> OrthoResult {
        let ctx = self.alg.ctx();
        let critical: Vec<(usize, &QTerm)> = y.iter().enumerate().filter(|(_, t)| t.is_critical(ctx)).collect();
        let per_term_exponents = critical
            .iter()
            .enumerate()
            .map(|(k, (term, t))| {
                let own = (t.fk == level).then(|| ctx.coset_rep(&t.fg, level));
                let rank = |i: usize| (table[i][k].exponent, own.as_ref() == Some(&classes[i]));
                let i = (0..table.len())
                    .fold(None::<usize>, |acc, i| match acc {
                        Some(b) if rank(b) >= rank(i) => acc,
                        _ => Some(i),
                    })
                    .expect("at least one class");
                let top = &table[i][k];
                TermExponent {
                    term: *term,
                    m: t.m,
                    n: t.n,
                    h: t.h.clone(),
                    h_prime: t.h_prime.clone(),
                    exponent: top.exponent,
                    witness: companions[i].h.clone(),
                    quantity: top.quantity.clone(),
                    valuation: top.valuation,
                }
            })
            .collect();

        let result = OrthoResult { level, companions, per_term_exponents, p: 0, projections: Vec::new() };
        let p = result.minimal_p();
        self.with_exponent(result, p)
    }

    /// The same companions with the exponent forced to `p`.
    pub fn with_exponent(&self, r: OrthoResult, p: u32) -> OrthoResult {
        let projections = r.companions.iter().map(|c| self.alg.projection_monomial(&c.h, p)).collect();
        OrthoResult { p, projections, ..r }
    }

    pub fn verify_li(&self, y: &[QTerm], r: &OrthoResult) -> Result<LiVerdicts> {
        let alg = self.alg;
        let ctx = alg.ctx();
        let y_elem = alg.qterms_element(y);
        let eps = alg.expectation(&alg.normal_form(&y_elem)?);
        let fs: Vec<AlgebraElement> =
            r.projections.iter().map(|m| AlgebraElement::from_monomial(m.clone(), Coeff::one())).collect();

        let mut orthogonal = true;
        for (i, fi) in fs.iter().enumerate() {
            for fj in &fs[i + 1..] {
                orthogonal &= alg.is_zero(&alg.mul(fi, fj))?;
            }
        }

        let mut equivalent_to_one = true;
        for (c, fi) in r.companions.iter().zip(&fs) {
            let v = alg.monomial(&c.h, r.p, 0, &ctx.zero());
            let vs = alg.adjoint(&v);
            equivalent_to_one &= alg.equals(&alg.mul(&vs, &v), &alg.one())?;
            equivalent_to_one &= alg.equals(&alg.mul(&v, &vs), fi)?;
        }

        let compressed = fs
            .iter()
            .fold(AlgebraElement::zero(), |acc, f| acc.add(&alg.mul_all(&[f, &eps, f])));
        let norm_preserved = alg.diagonal_norm_sq(&alg.normal_form(&compressed)?)? == alg.diagonal_norm_sq(&eps)?;

        let mut compression_scalar = true;
        for f in &fs {
            let fyf = alg.mul_all(&[f, &y_elem, f]);
            let fef = alg.mul_all(&[f, &eps, f]);
            compression_scalar &= alg.equals(&fyf, &fef)? && self.scalar_multiple(&fyf, f)?.is_some();
        }

        Ok(LiVerdicts { orthogonal, equivalent_to_one, norm_preserved, compression_scalar })
    }

    /// `λ` with `x = λ f`, if any.
    pub fn scalar_multiple(&self, x: &AlgebraElement, f: &AlgebraElement) -> Result<Option<Coeff>> {
        let alg = self.alg;
        let nf = alg.normal_form(x)?;
        let Some((_, c)) = nf.terms().next() else {
            return Ok(Some(Coeff::zero()));
        };
        let c = c.clone();
        Ok(alg.equals(&nf, &f.scale(&c))?.then_some(c))
    }

    pub fn report(&self, y: &[QTerm], r: &OrthoResult) -> Result<OrthoReport> {
        Ok(OrthoReport {
            level: r.level,
            count: r.count(),
            companions: r.companions.clone(),
            per_term_exponents: r.per_term_exponents.clone(),
            p: r.p,
            verdicts: self.verify_li(y, r)?,
        })
    }
}

/// Nonnegative atoms of `1 - Σ f_i`: the projections sit below the unit.
pub fn below_unit(alg: &Algebra, projections: &[Monomial]) -> Result<bool> {
    let sum = projections
        .iter()
        .fold(AlgebraElement::zero(), |acc, m| acc.add(&AlgebraElement::from_monomial(m.clone(), Coeff::one())));
    let rest = alg.normal_form(&alg.one().sub(&sum))?;
    let (_, atoms) = alg.diagonal_atoms(&rest)?;
    Ok(atoms.values().all(|c| c.is_real() && !c.re().is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EndoConfig;

    fn triple() -> EndoContext {
        EndoContext::new(EndoConfig::scalar(3)).unwrap()
    }

    fn qt(ctx: &EndoContext, c: i64, n: u32, h: i64, fg: i64, fk: u32, hp: i64, m: u32) -> QTerm {
        let g = |v| ctx.element(&[v]);
        QTerm { coeff: Coeff::int(c), n, h: g(h), fg: g(fg), fk, h_prime: g(hp), m }
    }

    fn example(ctx: &EndoContext) -> Vec<QTerm> {
        vec![
            qt(ctx, 2, 2, -30, 5, 4, 2187, 1),
            qt(ctx, -4, 7, 0, 10, 4, -5, 9),
            qt(ctx, 1, 8, 0, 20, 4, 0, 8),
        ]
    }

    #[test]
    fn critical_exponent_examples() {
        let ctx = triple();
        let y = example(&ctx);
        let c = critical_exponent(&ctx, &y[0], &ctx.element(&[86])).unwrap();
        assert_eq!(c, CriticalExponent { quantity: ctx.element(&[-1701]), valuation: 5, exponent: 6 });
        let c = critical_exponent(&ctx, &y[1], &ctx.element(&[91])).unwrap();
        assert_eq!((c.quantity, c.exponent), (ctx.element(&[-1592131]), 1));
        let t = qt(&ctx, 1, 2, 4, 0, 0, 1, 2);
        let c = critical_exponent(&ctx, &t, &ctx.element(&[17])).unwrap();
        assert_eq!((c.quantity, c.exponent), (ctx.element(&[3]), 2));
        let t = qt(&ctx, 1, 1, 0, 0, 0, 2, 0);
        assert_eq!(critical_exponent(&ctx, &t, &ctx.element(&[1])), Err(Error::CompanionRetry));
    }

    #[test]
    fn builds_example_exponents() {
        let ctx = triple();
        let y = example(&ctx);
        let o = Orthogonalizer::new(&ctx);
        let r = o.build(&y).unwrap();
        assert_eq!((r.level, r.count(), r.p), (4, 3, 6));
        assert_eq!(r.companions[0].h, ctx.element(&[86]));
        let exps: Vec<u32> = r.per_term_exponents.iter().map(|t| t.exponent).collect();
        assert_eq!(exps, vec![6, 1]);
        assert_eq!(r.per_term_exponents[0].quantity, ctx.element(&[-1701]));
        for c in &r.companions {
            assert!(ctx.contains(&ctx.sub(&c.h, &c.g), 4));
        }
        assert!(o.verify_li(&y, &r).unwrap().all());
        assert!(below_unit(&o.algebra(), &r.projections).unwrap());
        let bigger = o.with_exponent(r, 7);
        assert!(o.verify_li(&y, &bigger).unwrap().all());
    }

    #[test]
    fn chosen_companions_report_own_class() {
        let ctx = triple();
        let y = example(&ctx);
        let o = Orthogonalizer::new(&ctx);
        let hs: Vec<GroupElement> = [86, 91, 101].iter().map(|&v| ctx.element(&[v])).collect();
        let r = o.build_with_companions(&y, &hs).unwrap();
        assert_eq!(r.p, 6);
        let t = &r.per_term_exponents;
        assert_eq!((t[0].witness.clone(), t[0].quantity.clone(), t[0].valuation), (hs[0].clone(), ctx.element(&[-1701]), 5));
        assert_eq!((t[1].witness.clone(), t[1].quantity.clone(), t[1].exponent), (hs[1].clone(), ctx.element(&[-1592131]), 1));
        assert!(o.verify_li(&y, &r).unwrap().all());
        let wrong = vec![ctx.element(&[86]), ctx.element(&[11]), ctx.element(&[101])];
        assert!(matches!(o.build_with_companions(&y, &wrong), Err(Error::Precondition(_))));
    }

    #[test]
    fn common_level_refines() {
        let ctx = triple();
        let o = Orthogonalizer::new(&ctx);
        assert_eq!(o.common_level(&[qt(&ctx, 1, 0, 0, 4, 2, 0, 0)]).unwrap(), (2, vec![ctx.element(&[4])]));
        let (m, classes) = o.common_level(&[qt(&ctx, 1, 0, 0, 1, 1, 0, 0), qt(&ctx, 1, 0, 0, 0, 2, 0, 0)]).unwrap();
        assert_eq!(m, 2);
        let reps: Vec<i64> = vec![0, 1, 4, 7];
        assert_eq!(classes, reps.iter().map(|&v| ctx.element(&[v])).collect::<Vec<_>>());
    }

    #[test]
    fn unit_needs_one_projection() {
        let ctx = triple();
        let o = Orthogonalizer::new(&ctx);
        let y = vec![qt(&ctx, 1, 0, 0, 0, 0, 0, 0)];
        let r = o.build(&y).unwrap();
        assert_eq!((r.count(), r.p), (1, 1));
        let alg = o.algebra();
        let ss = alg.mul(&alg.s(), &alg.s_star());
        assert_eq!(AlgebraElement::from_monomial(r.projections[0].clone(), Coeff::one()), ss);
        assert!(o.verify_li(&y, &r).unwrap().all());
        let f = AlgebraElement::from_monomial(r.projections[0].clone(), Coeff::one());
        assert_eq!(o.scalar_multiple(&alg.mul(&f, &f), &f).unwrap(), Some(Coeff::one()));
    }

    #[test]
    fn undersized_exponent_breaks_compression() {
        // z*z for z = 1 + u_3 s
        let ctx = triple();
        let o = Orthogonalizer::new(&ctx);
        let alg = o.algebra();
        let z = alg.one().add(&alg.mul(&alg.u(&ctx.element(&[3])), &alg.s()));
        let y = alg.to_qform(&alg.mul(&alg.adjoint(&z), &z));
        assert!(alg.equals(&alg.qterms_element(&y), &alg.mul(&alg.adjoint(&z), &z)).unwrap());
        let r = o.build(&y).unwrap();
        assert_eq!(r.p, 2);
        assert!(o.verify_li(&y, &r).unwrap().all());
        let small = o.with_exponent(r, 1);
        assert!(!o.verify_li(&y, &small).unwrap().compression_scalar);
    }

    #[test]
    fn qform_round_trip() {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let g = |v| ctx.element(&[v]);
        for (a, p, q, b) in [(4, 2, 0, -3), (1, 0, 3, 7), (2, 1, 1, 5), (0, 0, 0, 0)] {
            let x = alg.monomial(&g(a), p, q, &g(b));
            assert_eq!(alg.qterms_element(&alg.to_qform(&x)), x);
        }
    }
}
