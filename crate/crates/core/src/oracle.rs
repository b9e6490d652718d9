//! The representation on `ℓ²(G)`: `U_g ξ_h = ξ_{g+h}`, `S ξ_h = ξ_{φ(h)}`.
//!
//! Every monomial sends basis vectors to basis vectors or to zero, so the
//! action on finitely supported vectors is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::coeff::Coeff;
use crate::group::{EndoContext, GroupElement};
use crate::word::{AlgebraElement, Letter, Monomial};

pub const DEFAULT_WINDOW_RADIUS: i64 = 20;

/// Finitely supported vector; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteVector(BTreeMap<GroupElement, Coeff>);

impl FiniteVector {
    pub fn zero() -> Self {
        FiniteVector::default()
    }

    pub fn basis(x: GroupElement) -> Self {
        let mut v = FiniteVector::zero();
        v.push(x, Coeff::one());
        v
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&GroupElement, &Coeff)> {
        self.0.iter()
    }

    pub fn get(&self, x: &GroupElement) -> Coeff {
        self.0.get(x).cloned().unwrap_or_default()
    }

    pub fn push(&mut self, x: GroupElement, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(x).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct L2Oracle<'c> {
    ctx: &'c EndoContext,
}

impl<'c> L2Oracle<'c> {
    pub fn new(ctx: &'c EndoContext) -> Self {
        L2Oracle { ctx }
    }

    /// `u_a sᵖ s*^q u_b ξ_x`: with `y = b + x`, the target is
    /// `a + φᵖ(φ^{-q}(y))` when `y ∈ φ^q(G)`.
    pub fn act_monomial(&self, m: &Monomial, x: &GroupElement) -> Option<GroupElement> {
        let ctx = self.ctx;
        let y = ctx.add(&m.b, x);
        let z = ctx.preimage(&y, m.q)?;
        Some(ctx.add(&m.a, &ctx.apply_endo(&z, m.p)))
    }

    pub fn act(&self, x: &AlgebraElement, point: &GroupElement) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for (m, c) in x.terms() {
            if let Some(t) = self.act_monomial(m, point) {
                out.push(t, c.clone());
            }
        }
        out
    }

    pub fn act_vector(&self, x: &AlgebraElement, v: &FiniteVector) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for (p, c) in v.support() {
            for (t, d) in self.act(x, p).support() {
                out.push(t.clone(), c * d);
            }
        }
        out
    }

    /// Action of the literal operator product, letters applied right to left.
    pub fn act_word(&self, word: &[Letter], point: &GroupElement) -> Option<GroupElement> {
        let ctx = self.ctx;
        word.iter().rev().try_fold(point.clone(), |x, l| match l {
            Letter::U(g) => Some(ctx.add(g, &x)),
            Letter::S => Some(ctx.apply_endo(&x, 1)),
            Letter::Sstar => ctx.preimage(&x, 1),
        })
    }

    pub fn equal_on_window(&self, x: &AlgebraElement, y: &AlgebraElement, window: &[GroupElement]) -> bool {
        window.iter().all(|p| self.act(x, p) == self.act(y, p))
    }

    /// Does `x` act on every window point exactly as the literal word?
    pub fn matches_word(&self, x: &AlgebraElement, word: &[Letter], window: &[GroupElement]) -> bool {
        window.iter().all(|p| {
            let literal = self.act_word(word, p).map(FiniteVector::basis).unwrap_or_default();
            self.act(x, p) == literal
        })
    }

    /// Canonical points `x` with every coordinate in `[-radius, radius]`.
    pub fn window(&self, radius: i64) -> Vec<GroupElement> {
        let ctx = self.ctx;
        let mut points = vec![Vec::<BigInt>::new()];
        for _ in 0..ctx.rank() {
            points = points
                .into_iter()
                .flat_map(|p| {
                    (-radius..=radius).map(move |c| {
                        let mut q = p.clone();
                        q.push(BigInt::from(c));
                        q
                    })
                })
                .collect();
        }
        let mut out: Vec<GroupElement> = points.into_iter().map(|p| ctx.element_big(p)).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// A word of length at most `max_len` over `u_g` (coordinates in
/// `[-radius, radius]`), `s` and `s*`.
pub fn random_word<R: Rng>(rng: &mut R, ctx: &EndoContext, max_len: usize, radius: i64) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => Letter::U(ctx.element(&(0..ctx.rank()).map(|_| rng.gen_range(-radius..=radius)).collect::<Vec<_>>())),
            1 => Letter::S,
            _ => Letter::Sstar,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EndoConfig;
    use crate::word::Algebra;

    fn triple() -> EndoContext {
        EndoContext::new(EndoConfig::scalar(3)).unwrap()
    }

    #[test]
    fn monomial_action_examples() {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let mono = |x: &AlgebraElement| x.terms().next().unwrap().0.clone();
        assert_eq!(o.act_monomial(&mono(&alg.u(&g(1))), &g(0)), Some(g(1)));
        assert_eq!(o.act_monomial(&mono(&alg.s()), &g(2)), Some(g(6)));
        assert_eq!(o.act_monomial(&mono(&alg.s_star()), &g(1)), None);
    }

    #[test]
    fn element_action_examples() {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let g = |v| ctx.element(&[v]);
        let partition = (0..3).fold(AlgebraElement::zero(), |acc, r| acc.add(&alg.projection(&g(r), 1)));
        assert_eq!(o.act(&partition, &g(7)), FiniteVector::basis(g(7)));
        assert!(o.act(&AlgebraElement::zero(), &g(4)).is_empty());

        let x = alg.mul(&alg.u(&g(1)), &alg.s()).sub(&alg.mul(&alg.s(), &alg.u(&g(3))));
        let mut expected = FiniteVector::basis(g(16));
        expected.push(g(24), Coeff::int(-1));
        assert_eq!(o.act(&x, &g(5)), expected);
    }

    #[test]
    fn window_equalities() {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let window = o.window(DEFAULT_WINDOW_RADIUS);
        assert_eq!(window.len(), 41);
        let ss = alg.mul(&alg.s_star(), &alg.s());
        assert!(o.equal_on_window(&ss, &alg.one(), &window));
        let ss = alg.mul(&alg.s(), &alg.s_star());
        assert!(!o.equal_on_window(&ss, &alg.one(), &[ctx.element(&[1])]));
    }

    #[test]
    fn word_action_matches() {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let w = vec![Letter::Sstar, Letter::U(ctx.element(&[3])), Letter::S, Letter::Sstar];
        assert!(o.matches_word(&alg.from_word(&w), &w, &o.window(10)));
    }

    #[test]
    fn torsion_window_is_deduplicated() {
        let ctx = EndoContext::new(EndoConfig::from_rows(&[&[3]]).with_moduli(&[5])).unwrap();
        assert_eq!(L2Oracle::new(&ctx).window(4).len(), 5);
    }
}
