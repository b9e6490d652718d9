//! The enveloping group `S̄ = 𝔾 ⋊ ℤ` of `S = G ⋊_φ ℕ`, depth-truncated points
//! of the inverse limit `G̃ = lim G/φⁿ(G)`, and the partial action of `S̄`
//! on `G̃`:
//!
//! ```text
//! G̃_{(g_i,n)} = { x : x_n ≡ g_i  mod φⁿ(G) }
//! ϖ_{(g_i,n)}(x)_m = g_i + φⁿ(x_{m-n})  mod φᵐ(G)
//! ```
//!
//! `𝔾` is the direct limit of `G →φ G →φ …`; `(g, i)` stands for `φ^{-i}(g)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::group::{CosetHandle, EndoContext, GroupElement};
use crate::ortho::QTerm;
use crate::word::{Algebra, AlgebraElement};

/// `φ^{-depth}(g) ∈ 𝔾`, canonical when `depth = 0` or `g ∉ φ(G)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LimitElement {
    pub g: GroupElement,
    pub depth: u32,
}

impl LimitElement {
    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    /// Lies in `G ⊆ 𝔾`.
    pub fn is_integral(&self) -> bool {
        self.depth == 0
    }
}

/// `(a, n) ∈ 𝔾 ⋊ ℤ` with `(a, n)(b, m) = (a + φ̄ⁿ(b), n + m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemidirectElement {
    pub a: LimitElement,
    pub n: i64,
}

impl SemidirectElement {
    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.n == 0
    }
}

fn bare(g: &GroupElement) -> String {
    if g.rank() == 1 {
        g.coords()[0].to_string()
    } else {
        g.to_string()
    }
}

impl fmt::Display for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", bare(&self.g), self.depth)
    }
}

/// `((g,i),n)`.
impl fmt::Display for SemidirectElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.n)
    }
}

impl Serialize for SemidirectElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The truncation `(x_m φᵐ(G))_{m ≤ depth}` of a point of `G̃`, stored as one
/// level-`depth` representative; the coarser entries are its reductions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProfinitePoint {
    pub depth: u32,
    pub rep: GroupElement,
}

impl fmt::Display for ProfinitePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", bare(&self.rep), self.depth)
    }
}

impl Serialize for ProfinitePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `V_m^C`: points whose level-`m` entry lies in one of `classes`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    pub level: u32,
    /// Distinct, ordered by transversal position.
    pub classes: Vec<CosetHandle>,
}

impl Cylinder {
    pub fn reps(&self) -> impl Iterator<Item = &GroupElement> {
        self.classes.iter().map(|c| &c.rep)
    }
}

/// `V[m]{i,j,…}` with class positions in `transversal(m)`.
impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.classes.iter().map(|c| c.rep_index.to_string()).collect();
        write!(f, "V[{}]{{{}}}", self.level, idx.join(","))
    }
}

impl Serialize for Cylinder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainStatus {
    Empty,
    Full,
    Cylinder(Cylinder),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum FreenessVerdict {
    /// `ϖ_t(point)` and `point` differ at `level`.
    Witness { point: ProfinitePoint, level: u32 },
    /// The cylinder misses the domain of `ϖ_t`.
    DomainEmpty,
    /// Every candidate stayed fixed up to `max_depth`.
    Inconclusive { max_depth: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OreWitness {
    pub l1: SemidirectElement,
    pub l2: SemidirectElement,
    pub common: SemidirectElement,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub samples: usize,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.r1 && self.r2 && self.r3
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceEntry {
    pub term: String,
    pub group_element: SemidirectElement,
    pub retained: bool,
    pub consistent: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Dynamics<'c> {
    ctx: &'c EndoContext,
}

impl<'c> Dynamics<'c> {
    pub fn new(ctx: &'c EndoContext) -> Self {
        Dynamics { ctx }
    }

    pub fn ctx(&self) -> &'c EndoContext {
        self.ctx
    }

    // ---- 𝔾 ------------------------------------------------------------------

    pub fn limit(&self, g: &GroupElement, depth: u32) -> LimitElement {
        let ctx = self.ctx;
        let (mut g, mut depth) = (ctx.add(g, &ctx.zero()), depth);
        while depth > 0 {
            match ctx.preimage(&g, 1) {
                Some(h) => {
                    g = h;
                    depth -= 1;
                }
                None => break,
            }
        }
        LimitElement { g, depth }
    }

    pub fn embed(&self, g: &GroupElement) -> LimitElement {
        self.limit(g, 0)
    }

    /// `x` written at depth `k ≥ x.depth`.
    fn lift(&self, x: &LimitElement, k: u32) -> GroupElement {
        self.ctx.apply_endo(&x.g, k - x.depth)
    }

    pub fn limit_add(&self, x: &LimitElement, y: &LimitElement) -> LimitElement {
        let k = x.depth.max(y.depth);
        self.limit(&self.ctx.add(&self.lift(x, k), &self.lift(y, k)), k)
    }

    pub fn limit_neg(&self, x: &LimitElement) -> LimitElement {
        LimitElement { g: self.ctx.neg(&x.g), depth: x.depth }
    }

    /// `φ̄ⁿ`, an automorphism of `𝔾` for every `n ∈ ℤ`.
    pub fn phi_bar(&self, x: &LimitElement, n: i64) -> LimitElement {
        if n >= 0 {
            self.limit(&self.ctx.apply_endo(&x.g, n as u32), x.depth)
        } else {
            self.limit(&x.g, x.depth + n.unsigned_abs() as u32)
        }
    }

    // ---- S̄ ------------------------------------------------------------------

    pub fn element(&self, g: &GroupElement, depth: u32, n: i64) -> SemidirectElement {
        SemidirectElement { a: self.limit(g, depth), n }
    }

    pub fn identity(&self) -> SemidirectElement {
        self.element(&self.ctx.zero(), 0, 0)
    }

    pub fn mul(&self, x: &SemidirectElement, y: &SemidirectElement) -> SemidirectElement {
        SemidirectElement { a: self.limit_add(&x.a, &self.phi_bar(&y.a, x.n)), n: x.n + y.n }
    }

    pub fn mul_all(&self, xs: &[SemidirectElement]) -> SemidirectElement {
        xs.iter().fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    /// `(a, n)⁻¹ = (-φ̄^{-n}(a), -n)`.
    pub fn inverse(&self, x: &SemidirectElement) -> SemidirectElement {
        SemidirectElement { a: self.limit_neg(&self.phi_bar(&x.a, -x.n)), n: -x.n }
    }

    fn in_semigroup(&self, x: &SemidirectElement) -> bool {
        x.a.is_integral() && x.n >= 0
    }

    /// `l1·s1 = l2·s2 = (e, n1 + n2)` with `l1 = (-φ^{n2}(g1), n2)` and
    /// `l2 = (-φ^{n1}(g2), n1)`.
    pub fn ore_witness(&self, s1: &SemidirectElement, s2: &SemidirectElement) -> Result<OreWitness> {
        if !self.in_semigroup(s1) || !self.in_semigroup(s2) {
            return Err(Error::Precondition("Ore witnesses need elements of G ⋊ ℕ".into()));
        }
        let ctx = self.ctx;
        let l1 = self.element(&ctx.neg(&ctx.apply_endo(&s1.a.g, s2.n as u32)), 0, s2.n);
        let l2 = self.element(&ctx.neg(&ctx.apply_endo(&s2.a.g, s1.n as u32)), 0, s1.n);
        let common = self.element(&ctx.zero(), 0, s1.n + s2.n);
        debug_assert_eq!(self.mul(&l1, s1), common);
        debug_assert_eq!(self.mul(&l2, s2), common);
        Ok(OreWitness { l1, l2, common })
    }

    // ---- points and cylinders -----------------------------------------------

    pub fn point(&self, g: &GroupElement, depth: u32) -> ProfinitePoint {
        ProfinitePoint { depth, rep: self.ctx.coset_rep(g, depth) }
    }

    /// Level-`m` entry `x_m` (`e` for `m ≤ 0`).
    pub fn entry(&self, x: &ProfinitePoint, m: i64) -> Result<GroupElement> {
        if m <= 0 {
            return Ok(self.ctx.zero());
        }
        let m = m as u32;
        if m > x.depth {
            return Err(Error::DepthExhausted { needed: m as i64, available: x.depth });
        }
        Ok(self.ctx.coset_rep(&x.rep, m))
    }

    pub fn truncate(&self, x: &ProfinitePoint, depth: u32) -> ProfinitePoint {
        self.point(&x.rep, depth.min(x.depth))
    }

    pub fn cylinder(&self, level: u32, reps: &[GroupElement]) -> Result<Cylinder> {
        let ctx = self.ctx;
        let mut classes: Vec<CosetHandle> = reps.iter().map(|g| ctx.coset_of(g, level)).collect::<Result<_>>()?;
        classes.sort();
        classes.dedup();
        if classes.is_empty() {
            return Err(Error::Precondition("a cylinder needs at least one class".into()));
        }
        Ok(Cylinder { level, classes })
    }

    pub fn cylinder_from_indices(&self, level: u32, indices: &[BigInt]) -> Result<Cylinder> {
        let reps: Vec<GroupElement> = indices
            .iter()
            .map(|i| {
                self.ctx
                    .rep_at(level, i)
                    .ok_or_else(|| Error::Precondition(format!("class index {i} out of range at level {level}")))
            })
            .collect::<Result<_>>()?;
        self.cylinder(level, &reps)
    }

    /// The same set described at a finer level.
    pub fn refine(&self, c: &Cylinder, level: u32) -> Result<Cylinder> {
        if level <= c.level {
            return Ok(c.clone());
        }
        let ctx = self.ctx;
        let lifts = ctx.transversal(level - c.level)?;
        let mut reps = Vec::with_capacity(c.classes.len() * lifts.len());
        for r in c.reps() {
            for t in &lifts {
                reps.push(ctx.add(r, &ctx.apply_endo(t, c.level)));
            }
        }
        self.cylinder(level, &reps)
    }

    pub fn intersect(&self, a: &Cylinder, b: &Cylinder) -> Result<Option<Cylinder>> {
        let level = a.level.max(b.level);
        let (a, b) = (self.refine(a, level)?, self.refine(b, level)?);
        let keep: BTreeSet<&CosetHandle> = b.classes.iter().collect();
        let classes: Vec<CosetHandle> = a.classes.into_iter().filter(|c| keep.contains(c)).collect();
        Ok((!classes.is_empty()).then_some(Cylinder { level, classes }))
    }

    pub fn cylinder_contains(&self, c: &Cylinder, x: &ProfinitePoint) -> Result<bool> {
        let e = self.entry(x, c.level as i64)?;
        Ok(c.classes.iter().any(|h| h.rep == e))
    }

    /// `G̃_t` in closed form. For `n ≥ 0` the condition `x_n ≡ g_i` forces
    /// `g_i ∈ G`; for `n < 0` the entry `x_n` is `e` and the condition is
    /// `g_i ∈ φ̄ⁿ(G)`, i.e. `i ≤ |n|`.
    pub fn domain_status(&self, t: &SemidirectElement) -> Result<DomainStatus> {
        let ctx = self.ctx;
        if t.n >= 0 {
            if !t.a.is_integral() {
                return Ok(DomainStatus::Empty);
            }
            let n = t.n as u32;
            if n == 0 || ctx.is_index_one() {
                return Ok(DomainStatus::Full);
            }
            Ok(DomainStatus::Cylinder(self.cylinder(n, std::slice::from_ref(&t.a.g))?))
        } else if t.a.depth as u64 <= t.n.unsigned_abs() {
            Ok(DomainStatus::Full)
        } else {
            Ok(DomainStatus::Empty)
        }
    }

    /// `x ∈ G̃_t`.
    pub fn in_domain(&self, t: &SemidirectElement, x: &ProfinitePoint) -> Result<bool> {
        match self.domain_status(t)? {
            DomainStatus::Empty => Ok(false),
            DomainStatus::Full => Ok(true),
            DomainStatus::Cylinder(c) => self.cylinder_contains(&c, x),
        }
    }

    /// `ϖ_t(x)` for `x ∈ G̃_{t⁻¹}`. Negative `n` consumes `|n|` levels of
    /// precision; the output never claims more than the input determines.
    pub fn apply_partial(&self, t: &SemidirectElement, x: &ProfinitePoint) -> Result<ProfinitePoint> {
        if !self.in_domain(&self.inverse(t), x)? {
            return Err(Error::OutOfDomain);
        }
        let ctx = self.ctx;
        if t.n >= 0 {
            let out = ctx.add(&t.a.g, &ctx.apply_endo(&x.rep, t.n as u32));
            Ok(self.point(&out, x.depth))
        } else {
            let k = t.n.unsigned_abs() as u32;
            if x.depth < k {
                return Err(Error::DepthExhausted { needed: k as i64, available: x.depth });
            }
            let shifted = ctx.add(&self.lift(&t.a, k), &x.rep);
            let out = ctx.preimage(&shifted, k).expect("x lies in the domain");
            Ok(self.point(&out, x.depth - k))
        }
    }

    /// `ϖ_t` on an embedded group element, computed exactly in `G`.
    pub fn act_on_group(&self, t: &SemidirectElement, u: &GroupElement) -> Option<GroupElement> {
        let ctx = self.ctx;
        if t.n >= 0 {
            t.a.is_integral().then(|| ctx.add(&t.a.g, &ctx.apply_endo(u, t.n as u32)))
        } else {
            let k = t.n.unsigned_abs() as u32;
            if t.a.depth > k {
                return None;
            }
            ctx.preimage(&ctx.add(&self.lift(&t.a, k), u), k)
        }
    }

    /// `w ∈ ρ(x) = {(x_n + φ̄ⁿ(h), n) : n ∈ ℤ, h ∈ G}`.
    pub fn xi_contains(&self, x: &ProfinitePoint, w: &SemidirectElement) -> Result<bool> {
        if w.n < 0 {
            return Ok(w.a.depth as u64 <= w.n.unsigned_abs());
        }
        let x_n = self.entry(x, w.n)?;
        Ok(w.a.is_integral() && self.ctx.contains(&self.ctx.sub(&w.a.g, &x_n), w.n as u32))
    }

    /// Checks the three spectrum conditions on `ρ(x)` for sampled members
    /// `g = (x_m + φ̄ᵐ(k), m)` with `-bound ≤ m`, translates `h`, and levels
    /// kept within the depth of `x`.
    pub fn spectrum_check(&self, x: &ProfinitePoint, bound: u32) -> Result<SpectrumReport> {
        let ctx = self.ctx;
        let mut report = SpectrumReport { r1: true, r2: true, r3: true, samples: 0 };
        let shifts = ctx.enumerate_ball(3);
        let depth = x.depth as i64;
        for m in -(bound as i64)..=depth {
            for k in &shifts {
                let base = self.entry(x, m)?;
                let g = SemidirectElement {
                    a: self.limit_add(&self.embed(&base), &self.phi_bar(&self.embed(k), m)),
                    n: m,
                };
                debug_assert!(self.xi_contains(x, &g)?);
                report.samples += 1;
                for h in &shifts {
                    report.r1 &= self.xi_contains(x, &self.mul(&g, &self.element(h, 0, 0)))?;
                }
                for n in 1..=bound as i64 {
                    report.r2 &= self.xi_contains(x, &self.mul(&g, &self.element(&ctx.zero(), 0, -n)))?;
                }
                for n in 1..=(depth - m).min(bound as i64) {
                    let hits = ctx
                        .transversal(n as u32)?
                        .iter()
                        .map(|h| self.xi_contains(x, &self.mul(&g, &self.element(h, 0, n))))
                        .collect::<Result<Vec<bool>>>()?;
                    report.r3 &= hits.iter().filter(|b| **b).count() == 1;
                }
            }
        }
        Ok(report)
    }

    /// A point of `c` moved by `ϖ_t`, searched over class representatives of
    /// `c ∩ G̃_{t⁻¹}` at its own level and one level finer.
    pub fn freeness_witness(&self, t: &SemidirectElement, c: &Cylinder) -> Result<FreenessVerdict> {
        if t.is_identity() {
            return Err(Error::Precondition("the identity fixes every point".into()));
        }
        let ctx = self.ctx;
        let region = match self.domain_status(&self.inverse(t))? {
            DomainStatus::Empty => return Ok(FreenessVerdict::DomainEmpty),
            DomainStatus::Full => Some(c.clone()),
            DomainStatus::Cylinder(d) => self.intersect(c, &d)?,
        };
        let Some(region) = region else {
            return Ok(FreenessVerdict::DomainEmpty);
        };
        let loss = if t.n < 0 { t.n.unsigned_abs() as u32 } else { 0 };
        let finer = self.refine(&region, region.level + 1)?;
        let candidates = region.reps().chain(finer.reps());
        for u in candidates {
            let Some(image) = self.act_on_group(t, u) else { continue };
            let moved = ctx.sub(&image, u);
            if moved.is_zero() {
                continue;
            }
            let v = ctx.valuation(&moved)?;
            if v.saturated {
                continue;
            }
            let level = v.value + 1;
            let point = self.point(u, (level + loss).max(finer.level));
            let out = self.apply_partial(t, &point)?;
            debug_assert!(self.cylinder_contains(c, &point)?);
            if self.entry(&out, level as i64)? != self.entry(&point, level as i64)? {
                return Ok(FreenessVerdict::Witness { point, level });
            }
        }
        Ok(FreenessVerdict::Inconclusive { max_depth: ctx.max_depth() })
    }

    /// `((u - x_k, 0), 0)` with `u` the first class of `c` and `k = c.level`.
    pub fn orbit_mover(&self, x: &ProfinitePoint, c: &Cylinder) -> Result<SemidirectElement> {
        let x_k = self.entry(x, c.level as i64)?;
        let u = &c.classes[0].rep;
        Ok(self.element(&self.ctx.sub(u, &x_k), 0, 0))
    }

    // ---- the partial representation -----------------------------------------

    /// `π((g_i, n)) = s*ʲ u_{φ^{j-i}(g)} s^{n+j}` with `j = max(i, |n|)`.
    pub fn pi(&self, alg: &Algebra, t: &SemidirectElement) -> AlgebraElement {
        let j = (t.a.depth as u64).max(t.n.unsigned_abs()) as u32;
        let g = self.lift(&t.a, j);
        let e = self.ctx.zero();
        let left = alg.monomial(&e, 0, j, &g);
        let right = alg.monomial(&e, (t.n + j as i64) as u32, 0, &e);
        alg.mul(&left, &right)
    }

    /// The `S̄` element of `s*ⁿ u_{-h} u_g sᵏ s*ᵏ u_{-g} u_{h'} sᵐ`, the
    /// product of the images of its letters.
    pub fn qterm_group_element(&self, t: &QTerm) -> SemidirectElement {
        let ctx = self.ctx;
        let e = ctx.zero();
        let k = t.fk as i64;
        self.mul_all(&[
            self.element(&e, 0, -(t.n as i64)),
            self.element(&ctx.neg(&t.h), 0, 0),
            self.element(&t.fg, 0, 0),
            self.element(&e, 0, k),
            self.element(&e, 0, -k),
            self.element(&ctx.neg(&t.fg), 0, 0),
            self.element(&t.h_prime, 0, 0),
            self.element(&e, 0, t.m as i64),
        ])
    }

    /// For each term: the expectation keeps it exactly when its `S̄` element
    /// is the identity.
    pub fn expectation_correspondence(&self, alg: &Algebra, terms: &[QTerm]) -> Result<Vec<CorrespondenceEntry>> {
        terms
            .iter()
            .map(|t| {
                let x = alg.qterm_element(t);
                let group_element = self.qterm_group_element(t);
                let retained = group_element.is_identity();
                let expected = if retained { x.clone() } else { AlgebraElement::zero() };
                let consistent = alg.equals(&alg.expectation(&x), &expected)?;
                let term = QTerm { coeff: Coeff::one(), ..t.clone() }.to_string();
                Ok(CorrespondenceEntry { term, group_element, retained, consistent })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EndoConfig;

    fn triple() -> EndoContext {
        EndoContext::new(EndoConfig::scalar(3)).unwrap()
    }

    #[test]
    fn limit_arithmetic() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        assert_eq!(d.limit(&g(9), 3), LimitElement { g: g(1), depth: 1 });
        let third = d.limit(&g(1), 1);
        let sum = d.limit_add(&third, &d.limit(&g(2), 1));
        assert_eq!(sum, d.embed(&g(1)));
        assert_eq!(d.phi_bar(&third, 1), d.embed(&g(1)));
        assert_eq!(d.phi_bar(&d.embed(&g(1)), -2), d.limit(&g(1), 2));
    }

    #[test]
    fn semidirect_group_laws() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let x = d.element(&g(4), 2, -3);
        let y = d.element(&g(-5), 0, 2);
        assert!(d.mul(&x, &d.inverse(&x)).is_identity());
        assert!(d.mul(&d.inverse(&y), &y).is_identity());
        let z = d.element(&g(7), 1, 1);
        assert_eq!(d.mul(&d.mul(&x, &y), &z), d.mul(&x, &d.mul(&y, &z)));
    }

    #[test]
    fn ore_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let w = d.ore_witness(&d.element(&g(1), 0, 1), &d.element(&g(2), 0, 2)).unwrap();
        assert_eq!(w.l1, d.element(&g(-9), 0, 2));
        assert_eq!(w.l2, d.element(&g(-6), 0, 1));
        assert_eq!(w.common, d.element(&g(0), 0, 3));
        let s = d.element(&g(5), 0, 1);
        let w = d.ore_witness(&s, &s).unwrap();
        assert_eq!(w.l1, w.l2);
        assert!(d.ore_witness(&d.element(&g(1), 0, -1), &s).is_err());
    }

    #[test]
    fn domain_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        assert_eq!(d.domain_status(&d.element(&g(1), 0, 0)).unwrap(), DomainStatus::Full);
        let c = d.cylinder(1, &[g(1)]).unwrap();
        assert_eq!(d.domain_status(&d.element(&g(1), 0, 1)).unwrap(), DomainStatus::Cylinder(c));
        assert_eq!(d.domain_status(&d.element(&g(1), 1, 0)).unwrap(), DomainStatus::Empty);
        assert_eq!(d.domain_status(&d.element(&g(1), 2, -2)).unwrap(), DomainStatus::Full);
        assert_eq!(d.domain_status(&d.element(&g(1), 3, -2)).unwrap(), DomainStatus::Empty);
    }

    #[test]
    fn partial_action_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let zero = d.point(&g(0), 3);
        assert_eq!(d.apply_partial(&d.element(&g(1), 0, 1), &zero).unwrap(), d.point(&g(1), 3));
        assert_eq!(d.apply_partial(&d.identity(), &zero).unwrap(), zero);
        let out = d.apply_partial(&d.element(&g(2), 0, 0), &d.point(&g(0), 2)).unwrap();
        assert_eq!((d.entry(&out, 1).unwrap(), d.entry(&out, 2).unwrap()), (g(2), g(2)));
        // ϖ_{(0,-1)} needs x_1 = 0
        let t = d.element(&g(0), 0, -1);
        assert_eq!(d.apply_partial(&t, &d.point(&g(1), 3)), Err(Error::OutOfDomain));
        assert_eq!(d.apply_partial(&t, &d.point(&g(6), 3)).unwrap(), d.point(&g(2), 2));
    }

    #[test]
    fn spectrum_membership() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let zero = d.point(&g(0), 4);
        assert!(d.xi_contains(&zero, &d.identity()).unwrap());
        assert!(d.xi_contains(&zero, &d.element(&g(5), 0, 0)).unwrap());
        assert!(!d.xi_contains(&zero, &d.element(&g(1), 0, 1)).unwrap());
        let e = d.identity();
        let hits: Vec<GroupElement> = ctx
            .transversal(2)
            .unwrap()
            .into_iter()
            .filter(|h| d.xi_contains(&zero, &d.mul(&e, &d.element(h, 0, 2))).unwrap())
            .collect();
        assert_eq!(hits, vec![g(0)]);
        assert!(d.spectrum_check(&zero, 3).unwrap().passed());
    }

    #[test]
    fn freeness_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let c = d.cylinder(2, &[g(4)]).unwrap();
        match d.freeness_witness(&d.element(&g(1), 0, 0), &c).unwrap() {
            FreenessVerdict::Witness { level, .. } => assert_eq!(level, 1),
            other => panic!("{other:?}"),
        }
        let c = d.cylinder(1, &[g(0), g(1)]).unwrap();
        match d.freeness_witness(&d.element(&g(0), 0, 1), &c).unwrap() {
            FreenessVerdict::Witness { point, level } => {
                assert_eq!((point.rep.clone(), level), (g(1), 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(d.freeness_witness(&d.identity(), &c).is_err());
        assert_eq!(d.freeness_witness(&d.element(&g(1), 1, 0), &c).unwrap(), FreenessVerdict::DomainEmpty);
    }

    #[test]
    fn identity_map_is_not_free() {
        let ctx = EndoContext::new(EndoConfig::scalar(1).with_max_depth(8)).unwrap();
        let d = Dynamics::new(&ctx);
        let c = d.cylinder(0, &[ctx.zero()]).unwrap();
        let v = d.freeness_witness(&d.element(&ctx.zero(), 0, 1), &c).unwrap();
        assert_eq!(v, FreenessVerdict::Inconclusive { max_depth: 8 });
    }

    #[test]
    fn orbit_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let x = d.point(&g(0), 3);
        let c = d.cylinder(2, &[g(5)]).unwrap();
        let t = d.orbit_mover(&x, &c).unwrap();
        assert_eq!(t, d.element(&g(5), 0, 0));
        assert!(d.cylinder_contains(&c, &d.apply_partial(&t, &x).unwrap()).unwrap());
        let own = d.cylinder(2, &[g(0), g(4)]).unwrap();
        assert!(d.orbit_mover(&x, &own).unwrap().is_identity());

        let ctx2 = EndoContext::new(EndoConfig::from_rows(&[&[2, 0], &[0, 2]])).unwrap();
        let d2 = Dynamics::new(&ctx2);
        let c = d2.cylinder(1, &[ctx2.element(&[1, 1])]).unwrap();
        let t = d2.orbit_mover(&d2.point(&ctx2.zero(), 1), &c).unwrap();
        assert_eq!(t, d2.element(&ctx2.element(&[1, 1]), 0, 0));
    }

    #[test]
    fn pi_examples() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let alg = Algebra::new(&ctx);
        let g = |v| ctx.element(&[v]);
        assert_eq!(d.pi(&alg, &d.identity()), alg.one());
        assert_eq!(d.pi(&alg, &d.element(&g(2), 0, 1)), alg.mul(&alg.u(&g(2)), &alg.s()));
        assert_eq!(d.pi(&alg, &d.element(&g(0), 0, -1)), alg.s_star());
        let lifted = d.element(&g(9), 2, 0);
        assert_eq!(d.pi(&alg, &lifted), alg.u(&g(1)));
    }

    #[test]
    fn expectation_pattern() {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let alg = Algebra::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let q = |n, h, fg, fk, hp, m| QTerm { coeff: Coeff::one(), n, h: g(h), fg: g(fg), fk, h_prime: g(hp), m };
        let kept = q(2, -5, 5, 4, -5, 2);
        let entries = d.expectation_correspondence(&alg, &[kept, q(1, 0, 0, 0, 0, 2), q(1, 1, 0, 1, 4, 1)]).unwrap();
        let pattern: Vec<(bool, bool)> = entries.iter().map(|e| (e.retained, e.consistent)).collect();
        assert_eq!(pattern, vec![(true, true), (false, true), (false, true)]);
    }
}
