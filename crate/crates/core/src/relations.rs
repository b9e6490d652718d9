//! Sampled verification of the defining relations, their consequences,
//! and the partial-representation relations of `π : S̄ → 𝕌[φ]`.

use serde::Serialize;

use crate::dynamics::{Dynamics, SemidirectElement};
use crate::error::Result;
use crate::group::{EndoContext, GroupElement};
use crate::word::{Algebra, AlgebraElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationBounds {
    /// Group elements drawn from the start of the ball enumeration.
    pub elements: usize,
    /// Largest power of `s` in the defining relations and in `ℛ₂`, `ℛ₃`.
    pub max_power: u32,
    /// Group elements used for `S̄` samples.
    pub semidirect_elements: usize,
    /// Largest `|n|` and depth for `S̄` samples.
    pub semidirect_range: u32,
}

impl Default for RelationBounds {
    fn default() -> Self {
        RelationBounds { elements: 21, max_power: 3, semidirect_elements: 5, semidirect_range: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationVerdict {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
}

impl RelationVerdict {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationsReport {
    pub verdicts: Vec<RelationVerdict>,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed())
    }

    pub fn get(&self, name: &str) -> Option<&RelationVerdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    failed: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, failed: 0 }
    }

    fn record(&mut self, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
        }
    }

    fn finish(self) -> RelationVerdict {
        RelationVerdict { name: self.name, checked: self.checked, failed: self.failed }
    }
}

pub struct RelationChecker<'c> {
    ctx: &'c EndoContext,
    alg: Algebra<'c>,
    dyn_: Dynamics<'c>,
    bounds: RelationBounds,
}

impl<'c> RelationChecker<'c> {
    pub fn new(ctx: &'c EndoContext, bounds: RelationBounds) -> Self {
        RelationChecker { ctx, alg: Algebra::new(ctx), dyn_: Dynamics::new(ctx), bounds }
    }

    fn s_pow(&self, n: u32) -> AlgebraElement {
        let e = self.ctx.zero();
        self.alg.monomial(&e, n, 0, &e)
    }

    fn s_star_pow(&self, n: u32) -> AlgebraElement {
        let e = self.ctx.zero();
        self.alg.monomial(&e, 0, n, &e)
    }

    fn eq(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<bool> {
        self.alg.equals(x, y)
    }

    /// The generator relations, the merged relation `u_g sⁿ u_h sᵐ = u_{g+φⁿ(h)} s^{n+m}`,
    /// `u_g s* = s* u_{φ(g)}`, `u_{φ(g)} ss* = ss* u_{φ(g)}` and the projection products.
    pub fn defining(&self) -> Result<Vec<RelationVerdict>> {
        let (ctx, alg) = (self.ctx, &self.alg);
        let els = ctx.enumerate_ball(self.bounds.elements);
        let mut unitary = Tally::new("def.i");
        let mut covariance = Tally::new("def.ii");
        let mut partition = Tally::new("def.iii");
        let mut merged = Tally::new("merged");
        let mut adjoint = Tally::new("adjoint");
        let mut projections = Tally::new("projection-products");

        let (s, ss) = (alg.s(), alg.s_star());
        let sss = alg.mul(&s, &ss);
        for g in &els {
            let ug = alg.u(g);
            unitary.record(self.eq(&alg.mul(&ug, &alg.u(&ctx.neg(g))), &alg.one())?);
            let phig = alg.u(&ctx.apply_endo(g, 1));
            covariance.record(self.eq(&alg.mul(&s, &ug), &alg.mul(&phig, &s))?);
            adjoint.record(self.eq(&alg.mul(&ug, &ss), &alg.mul(&ss, &phig))?);
            adjoint.record(self.eq(&alg.mul(&phig, &sss), &alg.mul(&sss, &phig))?);
            for h in &els {
                unitary.record(self.eq(&alg.mul(&ug, &alg.u(h)), &alg.u(&ctx.add(g, h)))?);
                for n in 0..=self.bounds.max_power {
                    for m in 0..=self.bounds.max_power {
                        let lhs = alg.mul_all(&[&ug, &self.s_pow(n), &alg.u(h), &self.s_pow(m)]);
                        let rhs = alg.mul(&alg.u(&ctx.add(g, &ctx.apply_endo(h, n))), &self.s_pow(n + m));
                        merged.record(self.eq(&lhs, &rhs)?);
                    }
                }
            }
        }

        for n in 1..=self.bounds.max_power {
            let e = |g: &GroupElement, k: u32| {
                alg.mul_all(&[&alg.u(g), &self.s_pow(k), &self.s_star_pow(k), &alg.u(&ctx.neg(g))])
            };
            let sum = ctx.transversal(n)?.iter().fold(AlgebraElement::zero(), |acc, g| acc.add(&e(g, n)));
            partition.record(self.eq(&sum, &alg.one())?);
            for g in els.iter().take(9) {
                for h in els.iter().take(9) {
                    let same = ctx.contains(&ctx.sub(h, g), n);
                    let expect = if same { e(g, n) } else { AlgebraElement::zero() };
                    projections.record(self.eq(&alg.mul(&e(g, n), &e(h, n)), &expect)?);
                    for m in 0..n {
                        let meets = ctx
                            .transversal(n - m)?
                            .iter()
                            .any(|k| ctx.contains(&ctx.sub(&ctx.add(h, &ctx.apply_endo(k, m)), g), n));
                        let expect = if meets { e(g, n) } else { AlgebraElement::zero() };
                        projections.record(self.eq(&alg.mul(&e(g, n), &e(h, m)), &expect)?);
                    }
                }
            }
        }
        Ok(vec![
            unitary.finish(),
            covariance.finish(),
            partition.finish(),
            merged.finish(),
            adjoint.finish(),
            projections.finish(),
        ])
    }

    fn semidirect_samples(&self) -> Vec<SemidirectElement> {
        let els = self.ctx.enumerate_ball(self.bounds.semidirect_elements);
        let r = self.bounds.semidirect_range as i64;
        let mut out = Vec::new();
        for g in &els {
            for depth in 0..=self.bounds.semidirect_range {
                for n in -r..=r {
                    let t = self.dyn_.element(g, depth, n);
                    if !out.contains(&t) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// PR1–PR3 and `ℛ₁`–`ℛ₃` for `π`, plus the round trips of `Φ` and `Ψ`.
    pub fn partial_representation(&self) -> Result<Vec<RelationVerdict>> {
        let (ctx, alg, d) = (self.ctx, &self.alg, &self.dyn_);
        let pi = |t: &SemidirectElement| d.pi(alg, t);
        let mut pr1 = Tally::new("PR1");
        let mut pr2 = Tally::new("PR2");
        let mut pr3 = Tally::new("PR3");
        let mut r1 = Tally::new("R1");
        let mut r2 = Tally::new("R2");
        let mut r3 = Tally::new("R3");
        let mut phi_psi = Tally::new("Phi.Psi");
        let mut psi_phi = Tally::new("Psi.Phi");
        let mut lift = Tally::new("pi.lift");

        pr1.record(self.eq(&pi(&d.identity()), &alg.one())?);
        let samples = self.semidirect_samples();
        for t in &samples {
            let pit = pi(t);
            pr2.record(self.eq(&pi(&d.inverse(t)), &alg.adjoint(&pit))?);
            for r in &samples {
                let rinv = pi(&d.inverse(r));
                let lhs = alg.mul_all(&[&pit, &pi(r), &rinv]);
                let rhs = alg.mul(&pi(&d.mul(t, r)), &rinv);
                pr3.record(self.eq(&lhs, &rhs)?);
            }

            // Ψ∘Φ: (e,-j)(φ^{j-i}(g),0)(e,n+j) = (g_i,n) in S̄, and the factors map
            // back to π(t) under Φ
            let j = (t.a.depth as i64).max(t.n.abs());
            let g = ctx.apply_endo(&t.a.g, (j - t.a.depth as i64) as u32);
            let e = ctx.zero();
            let factors = [d.element(&e, 0, -j), d.element(&g, 0, 0), d.element(&e, 0, t.n + j)];
            psi_phi.record(d.mul_all(&factors) == *t);
            let images: Vec<AlgebraElement> = factors.iter().map(pi).collect();
            psi_phi.record(self.eq(&alg.mul_all(&images.iter().collect::<Vec<_>>()), &pit)?);

            // π does not depend on the lift used to write t
            for extra in 1..=2u32 {
                let k = j as u32 + extra;
                let gk = ctx.apply_endo(&t.a.g, k - t.a.depth);
                let alt = alg.mul_all(&[&self.s_star_pow(k), &alg.u(&gk), &self.s_pow((t.n + k as i64) as u32)]);
                lift.record(self.eq(&alt, &pit)?);
            }
        }

        for g in ctx.enumerate_ball(self.bounds.elements) {
            let t = d.element(&g, 0, 0);
            r1.record(self.eq(&alg.mul(&pi(&t), &pi(&d.inverse(&t))), &alg.one())?);
            phi_psi.record(self.eq(&pi(&t), &alg.u(&g))?);
        }
        for n in 1..=self.bounds.max_power {
            let t = d.element(&ctx.zero(), 0, -(n as i64));
            r2.record(self.eq(&alg.mul(&pi(&t), &pi(&d.inverse(&t))), &alg.one())?);
            let sum = ctx.transversal(n)?.iter().fold(AlgebraElement::zero(), |acc, g| {
                let t = d.element(g, 0, n as i64);
                acc.add(&alg.mul(&pi(&t), &pi(&d.inverse(&t))))
            });
            r3.record(self.eq(&sum, &alg.one())?);
            let e = ctx.zero();
            phi_psi.record(self.eq(&pi(&d.element(&e, 0, n as i64)), &self.s_pow(n))?);
            phi_psi.record(self.eq(&pi(&d.element(&e, 0, -(n as i64))), &self.s_star_pow(n))?);
        }

        Ok(vec![
            pr1.finish(),
            pr2.finish(),
            pr3.finish(),
            r1.finish(),
            r2.finish(),
            r3.finish(),
            phi_psi.finish(),
            psi_phi.finish(),
            lift.finish(),
        ])
    }

    pub fn run(&self) -> Result<RelationsReport> {
        let mut verdicts = self.defining()?;
        verdicts.extend(self.partial_representation()?);
        Ok(RelationsReport { verdicts })
    }
}

/// `Σ_{g ∈ G/φⁿ(G)} u_g sⁿ s*ⁿ u_{-g}`.
pub fn partition_of_unity(alg: &Algebra, n: u32) -> Result<AlgebraElement> {
    let ctx = alg.ctx();
    Ok(ctx
        .transversal(n)?
        .iter()
        .fold(AlgebraElement::zero(), |acc, g| acc.add(&alg.projection(g, n))))
}
