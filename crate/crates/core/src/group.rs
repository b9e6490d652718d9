//! The group `G = Z^d / L` (with `L` generated by the cyclic moduli), the
//! endomorphism `φ` given by an integer matrix, the quotients `G/φⁿ(G)`
//! and the valuation filtration.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::config::EndoConfig;
use crate::error::{Error, Result};
use crate::lattice::{self, ColumnHnf, IntMatrix};

/// Element of `G` in additive coordinates, reduced modulo the cyclic factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub Vec<BigInt>);

impl GroupElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Sup-norm of the coordinates.
    pub fn sup_norm(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A coset `x·φⁿ(G)` identified by its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CosetHandle {
    pub level: u32,
    /// Position of `rep` in `transversal(level)`.
    #[serde(serialize_with = "crate::ser::display")]
    pub rep_index: BigInt,
    pub rep: GroupElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Valuation {
    pub value: u32,
    /// `value` hit `max_depth`; the true valuation may be larger.
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PurityVerdict {
    PureUpToDepth(u32),
    /// A nonzero element lying in every `φⁿ(G)`.
    NotPure(GroupElement),
    /// A sample saturated the depth bound without a periodicity certificate.
    Inconclusive(GroupElement),
}

struct Level {
    power: IntMatrix,
    hnf: ColumnHnf,
}

pub struct EndoContext {
    config: EndoConfig,
    /// One entry per coordinate, `0` for a free factor.
    moduli: Vec<BigInt>,
    index: BigInt,
    levels: RwLock<Vec<Arc<Level>>>,
}

impl fmt::Debug for EndoContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndoContext")
            .field("matrix", &self.config.matrix)
            .field("moduli", &self.moduli)
            .field("index", &self.index)
            .finish()
    }
}

impl EndoContext {
    pub fn new(config: EndoConfig) -> Result<Self> {
        let d = config.rank;
        if config.matrix.len() != d || config.matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Config(format!("matrix must be {d}x{d}")));
        }
        let moduli = config.moduli.clone().unwrap_or_else(|| vec![BigInt::zero(); d]);
        if moduli.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: moduli.len() });
        }
        let mut ctx = EndoContext {
            config,
            moduli,
            index: BigInt::one(),
            levels: RwLock::new(Vec::new()),
        };

        // A must map the relation lattice L into itself.
        for (j, m) in ctx.moduli.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let image: Vec<BigInt> = ctx.config.matrix.iter().map(|row| &row[j] * m).collect();
            if !ctx.in_relations(&image) {
                return Err(Error::NotWellDefined);
            }
        }

        let level1 = ctx.build_level(1)?;
        // Injectivity: every y with A·y ∈ L must itself lie in L.
        for ker in level1.hnf.kernel() {
            let y = &ker[..d];
            if !ctx.in_relations(y) {
                return Err(Error::NotInjective(GroupElement(ctx.reduce_coords(y.to_vec())).to_string()));
            }
        }
        ctx.index = level1.hnf.index();
        let level0 = ctx.build_level(0)?;
        *ctx.levels.get_mut().unwrap() = vec![Arc::new(level0), Arc::new(level1)];
        Ok(ctx)
    }

    pub fn config(&self) -> &EndoConfig {
        &self.config
    }

    pub fn rank(&self) -> usize {
        self.config.rank
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.config.matrix
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn is_free(&self) -> bool {
        self.moduli.iter().all(|m| m.is_zero())
    }

    pub fn max_depth(&self) -> u32 {
        self.config.max_depth
    }

    pub fn enum_cap(&self) -> usize {
        self.config.enum_cap
    }

    pub fn declared_pure(&self) -> bool {
        self.config.declared_pure
    }

    /// `|G/φ(G)|`.
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    /// `φ` is surjective, so `ss* = 1` in the algebra.
    pub fn is_index_one(&self) -> bool {
        self.index.is_one()
    }

    fn in_relations(&self, v: &[BigInt]) -> bool {
        v.iter().zip(&self.moduli).all(|(c, m)| if m.is_zero() { c.is_zero() } else { c.mod_floor(m).is_zero() })
    }

    fn reduce_coords(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (c, m) in v.iter_mut().zip(&self.moduli) {
            if !m.is_zero() {
                *c = c.mod_floor(m);
            }
        }
        v
    }

    fn hnf_for(&self, power: &IntMatrix) -> Option<ColumnHnf> {
        let mut gens = power.clone();
        for (j, m) in self.moduli.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (i, row) in gens.iter_mut().enumerate() {
                row.push(if i == j { m.clone() } else { BigInt::zero() });
            }
        }
        ColumnHnf::new(&gens)
    }

    fn build_level(&self, n: u32) -> Result<Level> {
        let mut power = lattice::identity(self.rank());
        for _ in 0..n {
            power = lattice::mat_mul(&self.config.matrix, &power);
        }
        let hnf = self.hnf_for(&power).ok_or(Error::InfiniteCokernel)?;
        Ok(Level { power, hnf })
    }

    fn level(&self, n: u32) -> Arc<Level> {
        {
            let levels = self.levels.read().unwrap();
            if let Some(l) = levels.get(n as usize) {
                return l.clone();
            }
        }
        let mut levels = self.levels.write().unwrap();
        while levels.len() <= n as usize {
            let next = levels.len() as u32;
            let prev = levels.last().expect("levels 0 and 1 are built at construction");
            let power = lattice::mat_mul(&self.config.matrix, &prev.power);
            // full rank at level 1 implies full rank at every level
            let hnf = self.hnf_for(&power).unwrap_or_else(|| panic!("level {next} lost full rank"));
            levels.push(Arc::new(Level { power, hnf }));
        }
        levels[n as usize].clone()
    }

    // ---- elements -------------------------------------------------------

    pub fn element(&self, coords: &[i64]) -> GroupElement {
        self.element_big(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn element_big(&self, coords: Vec<BigInt>) -> GroupElement {
        assert_eq!(coords.len(), self.rank(), "element rank mismatch");
        GroupElement(self.reduce_coords(coords))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.rank()])
    }

    pub fn basis(&self, i: usize) -> GroupElement {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[i] = BigInt::one();
        GroupElement(self.reduce_coords(v))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(self.reduce_coords(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(self.reduce_coords(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect()))
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(self.reduce_coords(x.0.iter().map(|a| -a).collect()))
    }

    pub fn scale(&self, k: &BigInt, x: &GroupElement) -> GroupElement {
        GroupElement(self.reduce_coords(x.0.iter().map(|a| a * k).collect()))
    }

    // ---- endomorphism ---------------------------------------------------

    /// `φⁿ(x) = Aⁿx`.
    pub fn apply_endo(&self, x: &GroupElement, n: u32) -> GroupElement {
        if n == 0 || x.is_zero() {
            return x.clone();
        }
        let level = self.level(n);
        GroupElement(self.reduce_coords(lattice::mat_vec(&level.power, &x.0)))
    }

    /// The unique `y` with `φⁿ(y) = x`, if any.
    pub fn preimage(&self, x: &GroupElement, n: u32) -> Option<GroupElement> {
        if n == 0 {
            return Some(x.clone());
        }
        let level = self.level(n);
        let combo = level.hnf.certificate(&x.0)?;
        Some(GroupElement(self.reduce_coords(combo[..self.rank()].to_vec())))
    }

    /// `x ∈ φⁿ(G)`.
    pub fn contains(&self, x: &GroupElement, n: u32) -> bool {
        n == 0 || self.level(n).hnf.solve(&x.0).is_some()
    }

    /// `|G/φⁿ(G)|`.
    pub fn quotient_size(&self, n: u32) -> BigInt {
        self.level(n).hnf.index()
    }

    fn check_cap(&self, n: u32) -> Result<BigInt> {
        let size = self.quotient_size(n);
        if size > BigInt::from(self.enum_cap()) {
            return Err(Error::CapExceeded { level: n, size: size.to_string(), cap: self.enum_cap() });
        }
        Ok(size)
    }

    /// Canonical representative of `x·φⁿ(G)`: the coordinatewise residue in
    /// the box cut out by the Hermite diagonal of the image lattice.
    pub fn coset_rep(&self, x: &GroupElement, n: u32) -> GroupElement {
        if n == 0 {
            return self.zero();
        }
        GroupElement(self.level(n).hnf.reduce(&x.0))
    }

    /// Position of a canonical representative in `transversal(n)`.
    pub fn rep_index(&self, rep: &GroupElement, n: u32) -> BigInt {
        let diag = self.level(n).hnf.diagonal();
        rep.0.iter().zip(&diag).fold(BigInt::zero(), |acc, (c, h)| acc * h + c)
    }

    /// The representative sitting at position `idx` of `transversal(n)`.
    pub fn rep_at(&self, n: u32, idx: &BigInt) -> Option<GroupElement> {
        let diag = self.level(n).hnf.diagonal();
        if idx.is_negative() || idx >= &diag.iter().product::<BigInt>() {
            return None;
        }
        let mut rest = idx.clone();
        let mut coords = vec![BigInt::zero(); diag.len()];
        for i in (0..diag.len()).rev() {
            let (q, r) = rest.div_mod_floor(&diag[i]);
            coords[i] = r;
            rest = q;
        }
        Some(GroupElement(coords))
    }

    pub fn coset_of(&self, x: &GroupElement, n: u32) -> Result<CosetHandle> {
        self.check_cap(n)?;
        let rep = self.coset_rep(x, n);
        Ok(CosetHandle { level: n, rep_index: self.rep_index(&rep, n), rep })
    }

    /// Canonical coset representatives of `G/φⁿ(G)`, lexicographically ordered.
    pub fn transversal(&self, n: u32) -> Result<Vec<GroupElement>> {
        let size = self.check_cap(n)?.to_usize().expect("bounded by cap");
        let diag = self.level(n).hnf.diagonal();
        let mut out = Vec::with_capacity(size);
        let mut cur = vec![BigInt::zero(); diag.len()];
        loop {
            out.push(GroupElement(cur.clone()));
            let mut i = diag.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < diag[i] {
                    break;
                }
                cur[i] = BigInt::zero();
            }
        }
    }

    // ---- filtration -----------------------------------------------------

    /// Largest `p ≤ max_depth` with `x ∈ φᵖ(G)`.
    pub fn valuation(&self, x: &GroupElement) -> Result<Valuation> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let max = self.max_depth();
        let mut p = 0;
        let mut cur = x.clone();
        while p < max {
            match self.preimage(&cur, 1) {
                Some(y) => {
                    cur = y;
                    p += 1;
                }
                None => break,
            }
        }
        Ok(Valuation { value: p, saturated: p == max })
    }

    pub fn purity_check(&self, extras: &[GroupElement]) -> PurityVerdict {
        let mut samples: Vec<GroupElement> = Vec::new();
        if let Ok(t) = self.transversal(1) {
            samples.extend(t);
        }
        samples.extend((0..self.rank()).map(|i| self.basis(i)));
        samples.extend(extras.iter().cloned());
        samples.retain(|x| !x.is_zero());
        samples.dedup();

        let mut undecided = None;
        for x in &samples {
            if self.is_index_one() {
                // φ(G) = G, so every nonzero element lies in every φⁿ(G)
                return PurityVerdict::NotPure(x.clone());
            }
            let v = self.valuation(x).expect("nonzero sample");
            if !v.saturated {
                continue;
            }
            // x = φᵏ(x) puts x in every φⁿ(G)
            let periodic = (1..=self.max_depth()).any(|k| &self.apply_endo(x, k) == x);
            if periodic {
                return PurityVerdict::NotPure(x.clone());
            }
            undecided.get_or_insert_with(|| x.clone());
        }
        match undecided {
            Some(x) => PurityVerdict::Inconclusive(x),
            None => PurityVerdict::PureUpToDepth(self.max_depth()),
        }
    }

    /// Deterministic enumeration of `G` for searches: by increasing sup-norm,
    /// then coordinatewise with `c` before `-c`. Stops after `count` distinct
    /// canonical elements (or when a finite group is exhausted).
    pub fn enumerate_ball(&self, count: usize) -> Vec<GroupElement> {
        let d = self.rank();
        let bound = if self.is_free() {
            None
        } else {
            Some(self.moduli.iter().map(|m| if m.is_zero() { i64::MAX } else { m.to_i64().unwrap_or(i64::MAX) }).max().unwrap())
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let key = |c: i64| (c.abs(), c < 0);
        let mut radius = 0i64;
        while out.len() < count {
            if let Some(b) = bound {
                if radius > b {
                    break;
                }
            }
            let mut shell: Vec<Vec<i64>> = Vec::new();
            let mut cur = vec![-radius; d];
            loop {
                if cur.iter().any(|c| c.abs() == radius) {
                    shell.push(cur.clone());
                }
                let mut i = d;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    if cur[i] < radius {
                        cur[i] += 1;
                        done = false;
                        break;
                    }
                    cur[i] = -radius;
                }
                if done {
                    break;
                }
            }
            shell.sort_by(|a, b| a.iter().map(|&c| key(c)).cmp(b.iter().map(|&c| key(c))));
            for v in shell {
                let g = self.element(&v);
                if seen.insert(g.clone()) {
                    out.push(g);
                    if out.len() == count {
                        break;
                    }
                }
            }
            radius += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple() -> EndoContext {
        EndoContext::new(EndoConfig::scalar(3)).unwrap()
    }

    fn gaussian() -> EndoContext {
        EndoContext::new(EndoConfig::from_rows(&[&[1, 1], &[-1, 1]])).unwrap()
    }

    #[test]
    fn apply_endo_examples() {
        let ctx = triple();
        assert_eq!(ctx.apply_endo(&ctx.element(&[7]), 5), ctx.element(&[1701]));
        assert_eq!(ctx.apply_endo(&ctx.element(&[7]), 0), ctx.element(&[7]));
        let g = gaussian();
        assert_eq!(g.apply_endo(&g.element(&[1, 0]), 2), g.element(&[0, -2]));
    }

    #[test]
    fn preimage_examples() {
        let ctx = triple();
        assert_eq!(ctx.preimage(&ctx.element(&[-1701]), 5), Some(ctx.element(&[-7])));
        assert_eq!(ctx.preimage(&ctx.zero(), 4), Some(ctx.zero()));
        assert_eq!(ctx.preimage(&ctx.element(&[1]), 1), None);
    }

    #[test]
    fn transversal_examples() {
        let ctx = triple();
        let t2: Vec<_> = (0..9).map(|i| ctx.element(&[i])).collect();
        assert_eq!(ctx.transversal(2).unwrap(), t2);
        assert_eq!(ctx.transversal(0).unwrap(), vec![ctx.zero()]);
        let g = gaussian();
        let t1 = g.transversal(1).unwrap();
        assert_eq!(t1.len(), 2);
        assert!(!g.contains(&g.sub(&t1[0], &t1[1]), 1));
    }

    #[test]
    fn coset_of_examples() {
        let ctx = triple();
        let h = ctx.coset_of(&ctx.element(&[2187]), 7).unwrap();
        assert_eq!(h.rep, ctx.zero());
        assert_eq!(h.rep_index, BigInt::zero());
        assert_eq!(ctx.coset_of(&ctx.element(&[12]), 0).unwrap().rep, ctx.zero());
        let h = ctx.coset_of(&ctx.element(&[86]), 4).unwrap();
        assert_eq!(h.rep, ctx.element(&[5]));
        assert_eq!(ctx.rep_at(4, &h.rep_index), Some(h.rep.clone()));
    }

    #[test]
    fn valuation_examples() {
        let ctx = triple();
        assert_eq!(ctx.valuation(&ctx.element(&[-1701])).unwrap().value, 5);
        assert_eq!(ctx.valuation(&ctx.element(&[-1592131])).unwrap().value, 0);
        assert_eq!(ctx.valuation(&ctx.element(&[81])).unwrap().value, 4);
        assert_eq!(ctx.valuation(&ctx.zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn purity_examples() {
        assert_eq!(triple().purity_check(&[]), PurityVerdict::PureUpToDepth(24));
        let id = EndoContext::new(EndoConfig::scalar(1)).unwrap();
        assert_eq!(id.purity_check(&[]), PurityVerdict::NotPure(id.element(&[1])));
        let dyadic = EndoContext::new(EndoConfig::from_rows(&[&[2, 0], &[0, 2]])).unwrap();
        assert!(matches!(dyadic.purity_check(&[]), PurityVerdict::PureUpToDepth(_)));
        let half = EndoContext::new(EndoConfig::from_rows(&[&[2, 0], &[0, 1]])).unwrap();
        assert_eq!(half.purity_check(&[]), PurityVerdict::NotPure(half.basis(1)));
    }

    #[test]
    fn rejects_degenerate_matrices() {
        assert_eq!(EndoContext::new(EndoConfig::scalar(0)).unwrap_err(), Error::InfiniteCokernel);
        // 2x on Z/4 has kernel {0, 2}
        let err = EndoContext::new(EndoConfig::scalar(2).with_moduli(&[4])).unwrap_err();
        assert!(matches!(err, Error::NotInjective(_)));
        // 2x on Z/5 is an automorphism
        let ctx = EndoContext::new(EndoConfig::scalar(2).with_moduli(&[5])).unwrap();
        assert!(ctx.is_index_one());
        assert_eq!(ctx.preimage(&ctx.element(&[1]), 1), Some(ctx.element(&[3])));
        // swapping the coordinates of Z × Z/2 is not well defined
        let swap = EndoConfig::from_rows(&[&[0, 1], &[1, 0]]).with_moduli(&[0, 2]);
        assert_eq!(EndoContext::new(swap).unwrap_err(), Error::NotWellDefined);
    }

    #[test]
    fn ball_order_prefers_positive() {
        let ctx = triple();
        let ball = ctx.enumerate_ball(5);
        let ints: Vec<i64> = ball.iter().map(|g| g.0[0].to_i64().unwrap()).collect();
        assert_eq!(ints, vec![0, 1, -1, 2, -2]);
        let finite = EndoContext::new(EndoConfig::scalar(2).with_moduli(&[5])).unwrap();
        assert_eq!(finite.enumerate_ball(100).len(), 5);
    }
}
