use proptest::prelude::*;

use endoalg::{
    parse_element, Algebra, AlgebraElement, Coeff, DomainStatus, Dynamics, EndoConfig, EndoContext, FiniteVector,
    GroupElement, L2Oracle, Letter, ProfinitePoint, SemidirectElement,
};

fn triple() -> EndoContext {
    EndoContext::new(EndoConfig::scalar(3)).unwrap()
}

fn gaussian() -> EndoContext {
    EndoContext::new(EndoConfig::from_rows(&[&[1, 1], &[-1, 1]])).unwrap()
}

#[derive(Clone, Debug)]
struct Mono {
    c: (i64, i64),
    a: i64,
    p: u32,
    q: u32,
    b: i64,
}

fn mono() -> impl Strategy<Value = Mono> {
    ((-3i64..=3, -2i64..=2), -12i64..=12, 0u32..=3, 0u32..=3, -12i64..=12).prop_map(|(c, a, p, q, b)| Mono { c, a, p, q, b })
}

fn poly() -> impl Strategy<Value = Vec<Mono>> {
    prop::collection::vec(mono(), 1..=4)
}

fn build(alg: &Algebra, ms: &[Mono]) -> AlgebraElement {
    let ctx = alg.ctx();
    ms.iter().fold(AlgebraElement::zero(), |acc, m| {
        let c = Coeff::int(m.c.0) + Coeff::int(m.c.1) * Coeff::i();
        acc.add(&alg.monomial(&ctx.element(&[m.a]), m.p, m.q, &ctx.element(&[m.b])).scale(&c))
    })
}

fn letter() -> impl Strategy<Value = i64> {
    // 100 and 101 stand for s and s*
    prop_oneof![-9i64..=9, Just(100), Just(101)]
}

fn word(ctx: &EndoContext, codes: &[i64]) -> Vec<Letter> {
    codes
        .iter()
        .map(|&c| match c {
            100 => Letter::S,
            101 => Letter::Sstar,
            g => Letter::U(ctx.element(&[g])),
        })
        .collect()
}

fn window(ctx: &EndoContext) -> Vec<GroupElement> {
    L2Oracle::new(ctx).window(15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_elements_parse_back(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let x = alg.normal_form(&build(&alg, &ms)).unwrap();
        let y = parse_element(&alg, &x.to_string()).unwrap();
        prop_assert_eq!(alg.normal_form(&y).unwrap(), x);
    }

    #[test]
    fn normal_form_is_idempotent(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let nf = alg.normal_form(&build(&alg, &ms)).unwrap();
        prop_assert_eq!(alg.normal_form(&nf).unwrap(), nf);
    }

    #[test]
    fn normal_form_preserves_the_operator(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let x = build(&alg, &ms);
        let nf = alg.normal_form(&x).unwrap();
        prop_assert!(L2Oracle::new(&ctx).equal_on_window(&x, &nf, &window(&ctx)));
    }

    #[test]
    fn multiplication_is_associative(x in poly(), y in poly(), z in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let (x, y, z) = (build(&alg, &x), build(&alg, &y), build(&alg, &z));
        let left = alg.mul(&alg.mul(&x, &y), &z);
        let right = alg.mul(&x, &alg.mul(&y, &z));
        prop_assert!(alg.equals(&left, &right).unwrap());
        prop_assert!(L2Oracle::new(&ctx).equal_on_window(&left, &right, &window(&ctx)));
    }

    #[test]
    fn products_act_as_compositions(x in poly(), y in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let (x, y) = (build(&alg, &x), build(&alg, &y));
        let xy = alg.mul(&x, &y);
        for p in window(&ctx) {
            prop_assert_eq!(o.act(&xy, &p), o.act_vector(&x, &o.act(&y, &p)));
        }
    }

    #[test]
    fn words_match_literal_operators(codes in prop::collection::vec(letter(), 0..=8)) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let w = word(&ctx, &codes);
        let nf = alg.normal_form(&alg.from_word(&w)).unwrap();
        prop_assert!(L2Oracle::new(&ctx).matches_word(&nf, &w, &window(&ctx)));
    }

    #[test]
    fn gaussian_words_match_literal_operators(codes in prop::collection::vec(letter(), 0..=6)) {
        let ctx = gaussian();
        let alg = Algebra::new(&ctx);
        let w: Vec<Letter> = codes
            .iter()
            .map(|&c| match c {
                100 => Letter::S,
                101 => Letter::Sstar,
                g => Letter::U(ctx.element(&[g, 1 - g % 2])),
            })
            .collect();
        let nf = alg.normal_form(&alg.from_word(&w)).unwrap();
        prop_assert!(L2Oracle::new(&ctx).matches_word(&nf, &w, &L2Oracle::new(&ctx).window(4)));
    }

    #[test]
    fn adjoint_is_an_involution(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let x = build(&alg, &ms);
        prop_assert!(alg.equals(&alg.adjoint(&alg.adjoint(&x)), &x).unwrap());
    }

    #[test]
    fn adjoint_matches_matrix_transpose(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let x = build(&alg, &ms);
        let xs = alg.adjoint(&x);
        let pts = L2Oracle::new(&ctx).window(8);
        for p in &pts {
            for q in &pts {
                prop_assert_eq!(o.act(&x, p).get(q), o.act(&xs, q).get(p).conj());
            }
        }
    }

    #[test]
    fn expectation_is_idempotent_and_unital(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let x = alg.normal_form(&build(&alg, &ms)).unwrap();
        let e = alg.expectation(&x);
        prop_assert!(alg.equals(&alg.expectation(&e), &e).unwrap());
        prop_assert!(alg.is_diagonal_element(&e));
        prop_assert!(alg.equals(&alg.expectation(&alg.one()), &alg.one()).unwrap());
    }

    // Only for degree 0: on ℓ²(G) terms of nonzero degree can have fixed
    // points (S ξ_0 = ξ_0), which ε discards.
    #[test]
    fn expectation_is_the_diagonal_of_degree_zero(ms in poly()) {
        let ctx = triple();
        let alg = Algebra::new(&ctx);
        let o = L2Oracle::new(&ctx);
        let ms: Vec<Mono> = ms.into_iter().map(|m| Mono { q: m.p, ..m }).collect();
        let x = alg.normal_form(&build(&alg, &ms)).unwrap();
        let e = alg.expectation(&x);
        for p in window(&ctx) {
            let diag = o.act(&x, &p).get(&p);
            let mut expected = FiniteVector::zero();
            expected.push(p.clone(), diag);
            prop_assert_eq!(o.act(&e, &p), expected);
        }
    }
}

fn semidirect() -> impl Strategy<Value = (i64, u32, i64)> {
    (-9i64..=9, 0u32..=2, -3i64..=3)
}

fn semigroup() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..=9, 0i64..=3)
}

fn point(d: &Dynamics, u: i64, depth: u32) -> ProfinitePoint {
    d.point(&d.ctx().element(&[u]), depth)
}

fn elem(d: &Dynamics, (g, i, n): (i64, u32, i64)) -> SemidirectElement {
    d.element(&d.ctx().element(&[g]), i, n)
}

fn agree(d: &Dynamics, x: &ProfinitePoint, y: &ProfinitePoint) -> bool {
    let k = x.depth.min(y.depth);
    d.truncate(x, k) == d.truncate(y, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn semidirect_group_laws(a in semidirect(), b in semidirect(), c in semidirect()) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let (a, b, c) = (elem(&d, a), elem(&d, b), elem(&d, c));
        prop_assert_eq!(d.mul(&d.mul(&a, &b), &c), d.mul(&a, &d.mul(&b, &c)));
        prop_assert!(d.mul(&a, &d.inverse(&a)).is_identity());
        prop_assert!(d.mul(&d.inverse(&a), &a).is_identity());
        prop_assert_eq!(d.inverse(&d.mul(&a, &b)), d.mul(&d.inverse(&b), &d.inverse(&a)));
    }

    #[test]
    fn semigroup_is_cancellative(s in semigroup(), a in semigroup(), b in semigroup()) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let el = |(g, n): (i64, i64)| d.element(&ctx.element(&[g]), 0, n);
        let (s, a, b) = (el(s), el(a), el(b));
        prop_assert_eq!(d.mul(&s, &a) == d.mul(&s, &b), a == b);
        prop_assert_eq!(d.mul(&a, &s) == d.mul(&b, &s), a == b);
    }

    #[test]
    fn ore_witnesses_hold(s1 in semigroup(), s2 in semigroup()) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let el = |(g, n): (i64, i64)| d.element(&ctx.element(&[g]), 0, n);
        let (s1, s2) = (el(s1), el(s2));
        let w = d.ore_witness(&s1, &s2).unwrap();
        prop_assert_eq!(d.mul(&w.l1, &s1), w.common.clone());
        prop_assert_eq!(d.mul(&w.l2, &s2), w.common.clone());
        prop_assert!(w.l1.a.is_integral() && w.l1.n >= 0 && w.l2.a.is_integral() && w.l2.n >= 0);
    }

    #[test]
    fn domain_status_matches_brute_force(t in semidirect(), u in -40i64..=40) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let t = elem(&d, t);
        // x ∈ G̃_t iff the limit element t⁻¹·x lands in G, computed in 𝔾
        let inv = d.inverse(&t);
        let landed = d.limit_add(&inv.a, &d.phi_bar(&d.embed(&ctx.element(&[u])), inv.n));
        let x = point(&d, u, 5);
        prop_assert_eq!(d.in_domain(&t, &x).unwrap(), landed.is_integral());
        if let DomainStatus::Cylinder(c) = d.domain_status(&t).unwrap() {
            prop_assert!(c.level <= 5);
        }
    }

    #[test]
    fn partial_action_composes(t in semidirect(), r in semidirect(), u in -40i64..=40) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let (t, r) = (elem(&d, t), elem(&d, r));
        let x = point(&d, u, 8);
        if let Ok(y) = d.apply_partial(&r, &x) {
            if let Ok(z) = d.apply_partial(&t, &y) {
                let tr = d.apply_partial(&d.mul(&t, &r), &x).unwrap();
                prop_assert!(agree(&d, &z, &tr));
            }
        }
    }

    #[test]
    fn partial_action_inverse_law(t in semidirect(), u in -40i64..=40) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let t = elem(&d, t);
        let x = point(&d, u, 8);
        if let Ok(y) = d.apply_partial(&t, &x) {
            let back = d.apply_partial(&d.inverse(&t), &y).unwrap();
            prop_assert!(agree(&d, &back, &x));
        }
    }

    #[test]
    fn orbit_mover_reaches_the_cylinder(u in -200i64..=200, level in 0u32..=4, class in 0i64..81) {
        let ctx = triple();
        let d = Dynamics::new(&ctx);
        let x = point(&d, u, 4);
        let c = d.cylinder(level, &[ctx.element(&[class])]).unwrap();
        let t = d.orbit_mover(&x, &c).unwrap();
        prop_assert!(d.cylinder_contains(&c, &d.apply_partial(&t, &x).unwrap()).unwrap());
    }
}
