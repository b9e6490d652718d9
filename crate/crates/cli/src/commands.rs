use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use endoalg::expr::{parse_cylinder, parse_group, parse_point, parse_semidirect};
use endoalg::group::PurityVerdict;
use endoalg::oracle::random_word;
use endoalg::{
    format_word, parse, Algebra, AlgebraElement, Cylinder, Dynamics, EndoContext, FiniteVector, FreenessVerdict,
    L2Oracle, Orthogonalizer, ProfinitePoint, RelationBounds, RelationChecker, SemidirectElement,
};

use crate::report::Outcome;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub struct Env<'c> {
    pub ctx: &'c EndoContext,
    pub window: i64,
    pub seed: u64,
}

impl<'c> Env<'c> {
    fn alg(&self) -> Algebra<'c> {
        Algebra::new(self.ctx)
    }

    fn element(&self, src: &str) -> Result<AlgebraElement> {
        Ok(parse(src)?.eval(&self.alg())?)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn show(x: &AlgebraElement) -> Value {
    Value::String(x.to_string())
}

pub fn normalize(env: &Env, src: &str) -> Result<Outcome> {
    let nf = env.alg().normal_form(&env.element(src)?)?;
    Ok(Outcome::new(json!({ "normal_form": show(&nf) }), vec![nf.to_string()]))
}

pub fn mul(env: &Env, a: &str, b: &str) -> Result<Outcome> {
    let alg = env.alg();
    let nf = alg.normal_form(&alg.mul(&env.element(a)?, &env.element(b)?))?;
    Ok(Outcome::new(json!({ "product": show(&nf) }), vec![nf.to_string()]))
}

pub fn adjoint(env: &Env, src: &str) -> Result<Outcome> {
    let alg = env.alg();
    let nf = alg.normal_form(&alg.adjoint(&env.element(src)?))?;
    Ok(Outcome::new(json!({ "adjoint": show(&nf) }), vec![nf.to_string()]))
}

pub fn expect(env: &Env, src: &str) -> Result<Outcome> {
    let alg = env.alg();
    let e = alg.normal_form(&alg.expectation(&alg.normal_form(&env.element(src)?)?))?;
    Ok(Outcome::new(json!({ "expectation": show(&e) }), vec![e.to_string()]))
}

pub fn equal(env: &Env, a: &str, b: &str) -> Result<Outcome> {
    let alg = env.alg();
    let (x, y) = (env.element(a)?, env.element(b)?);
    let eq = alg.equals(&x, &y)?;
    let difference = alg.normal_form(&x.sub(&y))?;
    Ok(Outcome::new(json!({ "equal": eq, "difference": show(&difference) }), vec![eq.to_string()]).verdict(eq))
}

/// Engine normal forms against literal operators on the window. Given no
/// expressions, checks `samples` seeded random words instead.
pub fn oracle_check(env: &Env, exprs: &[String], samples: usize, max_len: usize) -> Result<Outcome> {
    let ctx = env.ctx;
    let alg = env.alg();
    let oracle = L2Oracle::new(ctx);
    let window = oracle.window(env.window);
    let mut checked = Vec::new();
    if exprs.is_empty() {
        let mut rng = env.rng();
        for _ in 0..samples {
            let word = random_word(&mut rng, ctx, max_len, 3);
            let nf = alg.normal_form(&alg.from_word(&word))?;
            checked.push((format_word(&word), oracle.matches_word(&nf, &word, &window)));
        }
    } else {
        for src in exprs {
            let e = parse(src)?;
            let nf = alg.normal_form(&e.eval(&alg)?)?;
            let mut ok = true;
            for p in &window {
                ok &= oracle.act(&nf, p) == e.act_literal(ctx, &FiniteVector::basis(p.clone()))?;
            }
            checked.push((src.clone(), ok));
        }
    }
    let failures: Vec<&str> = checked.iter().filter(|(_, ok)| !ok).map(|(s, _)| s.as_str()).collect();
    let passed = failures.is_empty();
    let text = vec![
        format!("window: {} points (radius {})", window.len(), env.window),
        format!("checked: {}", checked.len()),
        format!("failures: {}", failures.len()),
    ];
    let result = json!({
        "window_points": window.len(),
        "radius": env.window,
        "checked": checked.len(),
        "failures": failures,
    });
    Ok(Outcome::new(result, text).verdict(passed))
}

pub fn cosets(env: &Env, level: u32) -> Result<Outcome> {
    let ctx = env.ctx;
    let size = ctx.quotient_size(level);
    let reps = ctx.transversal(level)?;
    let reps: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
    let text = vec![format!("|G/φ^{level}(G)| = {size}"), reps.join(" ")];
    Ok(Outcome::new(json!({ "level": level, "size": size.to_string(), "transversal": reps }), text))
}

pub fn purity(env: &Env, extras: &[String]) -> Result<Outcome> {
    let ctx = env.ctx;
    let extras = extras.iter().map(|s| parse_group(ctx, s)).collect::<endoalg::Result<Vec<_>>>()?;
    let verdict = ctx.purity_check(&extras);
    let (line, pure) = match &verdict {
        PurityVerdict::PureUpToDepth(d) => (format!("pure up to depth {d}"), true),
        PurityVerdict::NotPure(x) => (format!("not pure: {x} lies in every φⁿ(G)"), false),
        PurityVerdict::Inconclusive(x) => (format!("inconclusive: {x} saturated the depth bound"), false),
    };
    Ok(Outcome::new(json!({ "purity": verdict }), vec![line]).verdict(pure))
}

pub fn orthogonalize(env: &Env, src: &str, p: Option<u32>, budget: usize, companions: &[String]) -> Result<Outcome> {
    let ctx = env.ctx;
    let ortho = Orthogonalizer::new(ctx).with_budget(budget);
    let alg = ortho.algebra();
    let e = parse(src)?;
    let terms = match e.qterms(ctx)? {
        Some(t) => t,
        None => alg.to_qform(&alg.normal_form(&e.eval(&alg)?)?),
    };
    let mut r = if companions.is_empty() {
        ortho.build(&terms)?
    } else {
        let hs = companions.iter().map(|h| parse_group(ctx, h)).collect::<endoalg::Result<Vec<_>>>()?;
        ortho.build_with_companions(&terms, &hs)?
    };
    if let Some(p) = p {
        r = ortho.with_exponent(r, p);
    }
    let report = ortho.report(&terms, &r)?;
    let companions: Vec<String> = report.companions.iter().map(|c| format!("{} -> {}", c.g, c.h)).collect();
    let exponents: Vec<String> = report.per_term_exponents.iter().map(|t| t.exponent.to_string()).collect();
    let quantities: Vec<String> = report
        .per_term_exponents
        .iter()
        .map(|t| format!("term {}: {} (valuation {}, companion {})", t.term, t.quantity, t.valuation, t.witness))
        .collect();
    let v = &report.verdicts;
    let text = vec![
        format!("M = {}", report.level),
        format!("N = {}", report.count),
        format!("companions: {}", companions.join(", ")),
        format!("per-term exponents: {{{}}}", exponents.join(",")),
        format!("critical quantities: {}", quantities.join("; ")),
        format!("p = {}", report.p),
        format!("orthogonal: {}", v.orthogonal),
        format!("equivalent_to_one: {}", v.equivalent_to_one),
        format!("norm_preserved: {}", v.norm_preserved),
        format!("compression_scalar: {}", v.compression_scalar),
    ];
    let all = v.all();
    Ok(Outcome::new(serde_json::to_value(&report)?, text).verdict(all))
}

fn freeness_line(t: &SemidirectElement, c: &Cylinder, v: &FreenessVerdict) -> String {
    match v {
        FreenessVerdict::Witness { point, level } => format!("{t} on {c}: moves {point} at level {level}"),
        FreenessVerdict::DomainEmpty => format!("{t} on {c}: domain empty"),
        FreenessVerdict::Inconclusive { max_depth } => format!("{t} on {c}: inconclusive up to depth {max_depth}"),
    }
}

pub fn freeness(env: &Env, t: &str, c: &str) -> Result<Outcome> {
    let d = Dynamics::new(env.ctx);
    let (t, c) = (parse_semidirect(&d, t)?, parse_cylinder(&d, c)?);
    let v = d.freeness_witness(&t, &c)?;
    let ok = !matches!(v, FreenessVerdict::Inconclusive { .. });
    Ok(Outcome::new(json!({ "element": t, "cylinder": c, "freeness": v }), vec![freeness_line(&t, &c, &v)]).verdict(ok))
}

fn orbit_holds(d: &Dynamics, x: &ProfinitePoint, c: &Cylinder) -> endoalg::Result<(SemidirectElement, ProfinitePoint, bool)> {
    let t = d.orbit_mover(x, c)?;
    let image = d.apply_partial(&t, x)?;
    let inside = d.cylinder_contains(c, &image)?;
    Ok((t, image, inside))
}

pub fn orbit(env: &Env, x: &str, c: &str) -> Result<Outcome> {
    let d = Dynamics::new(env.ctx);
    let (x, c) = (parse_point(&d, x)?, parse_cylinder(&d, c)?);
    let (t, image, inside) = orbit_holds(&d, &x, &c)?;
    let text = vec![format!("t = {t}"), format!("image = {image}"), format!("in {c}: {inside}")];
    Ok(Outcome::new(json!({ "mover": t, "image": image, "in_cylinder": inside }), text).verdict(inside))
}

pub fn ore(env: &Env, a: &str, b: &str) -> Result<Outcome> {
    let d = Dynamics::new(env.ctx);
    let (s1, s2) = (parse_semidirect(&d, a)?, parse_semidirect(&d, b)?);
    let w = d.ore_witness(&s1, &s2)?;
    let holds = d.mul(&w.l1, &s1) == w.common && d.mul(&w.l2, &s2) == w.common;
    let text = vec![format!("l1 = {}", w.l1), format!("l2 = {}", w.l2), format!("l1·s1 = l2·s2 = {}", w.common)];
    Ok(Outcome::new(serde_json::to_value(&w)?, text).verdict(holds))
}

pub fn relations_check(env: &Env, bounds: RelationBounds) -> Result<Outcome> {
    let report = RelationChecker::new(env.ctx, bounds).run()?;
    let text = report
        .verdicts
        .iter()
        .map(|v| format!("{} {}: {} checked, {} failed", if v.passed() { "PASS" } else { "FAIL" }, v.name, v.checked, v.failed))
        .collect();
    let passed = report.passed();
    Ok(Outcome::new(serde_json::to_value(&report)?, text).verdict(passed))
}

struct Section {
    name: &'static str,
    passed: bool,
    detail: Value,
}

fn random_group(rng: &mut ChaCha8Rng, ctx: &EndoContext, radius: i64) -> endoalg::GroupElement {
    let coords: Vec<i64> = (0..ctx.rank()).map(|_| rng.gen_range(-radius..=radius)).collect();
    ctx.element(&coords)
}

/// A fixed battery over the loaded context: coset sizes, purity, defining
/// relations, seeded oracle words, spectrum, freeness grid, orbit movers and
/// Ore witnesses.
pub fn report_all(env: &Env) -> Result<Outcome> {
    let ctx = env.ctx;
    let d = Dynamics::new(ctx);
    let mut sections = Vec::new();

    let mut sizes = BTreeMap::new();
    for n in 0..=3u32 {
        sizes.insert(n.to_string(), ctx.quotient_size(n).to_string());
    }
    sections.push(Section { name: "cosets", passed: true, detail: json!(sizes) });

    let p = purity(env, &[])?;
    sections.push(Section { name: "purity", passed: p.verdict == Some(true), detail: p.result });

    let bounds = RelationBounds { elements: 9, max_power: 2, ..RelationBounds::default() };
    let r = relations_check(env, bounds)?;
    sections.push(Section { name: "relations", passed: r.verdict == Some(true), detail: r.result });

    let o = oracle_check(env, &[], 50, 6)?;
    sections.push(Section { name: "oracle", passed: o.verdict == Some(true), detail: o.result });

    let depth = 3.min(ctx.max_depth());
    let mut spectrum = (true, 0usize);
    for rep in ctx.transversal(depth)? {
        let s = d.spectrum_check(&d.point(&rep, depth), 2)?;
        spectrum.0 &= s.passed();
        spectrum.1 += s.samples;
    }
    sections.push(Section { name: "spectrum", passed: spectrum.0, detail: json!({ "samples": spectrum.1 }) });

    let mut tally = BTreeMap::from([("witness", 0usize), ("domain_empty", 0), ("inconclusive", 0)]);
    let moves = ctx.enumerate_ball(5);
    for level in 0..=2u32 {
        for rep in ctx.transversal(level)? {
            let c = d.cylinder(level, &[rep])?;
            for g in &moves {
                for n in 0..=2i64 {
                    let t = d.element(g, 0, n);
                    if t.is_identity() {
                        continue;
                    }
                    let key = match d.freeness_witness(&t, &c)? {
                        FreenessVerdict::Witness { .. } => "witness",
                        FreenessVerdict::DomainEmpty => "domain_empty",
                        FreenessVerdict::Inconclusive { .. } => "inconclusive",
                    };
                    *tally.get_mut(key).unwrap() += 1;
                }
            }
        }
    }
    sections.push(Section { name: "freeness", passed: tally["inconclusive"] == 0, detail: json!(tally) });

    let mut rng = env.rng();
    let mut orbit_ok = 0usize;
    let samples = 20usize;
    for _ in 0..samples {
        let level = rng.gen_range(0..=depth);
        let x = d.point(&random_group(&mut rng, ctx, 20), depth);
        let classes = ctx.transversal(level)?;
        let c = d.cylinder(level, &[classes[rng.gen_range(0..classes.len())].clone()])?;
        if orbit_holds(&d, &x, &c)?.2 {
            orbit_ok += 1;
        }
    }
    sections.push(Section { name: "orbit", passed: orbit_ok == samples, detail: json!({ "samples": samples, "held": orbit_ok }) });

    let mut ore_ok = 0usize;
    for _ in 0..samples {
        let s1 = d.element(&random_group(&mut rng, ctx, 10), 0, rng.gen_range(0..=3));
        let s2 = d.element(&random_group(&mut rng, ctx, 10), 0, rng.gen_range(0..=3));
        let w = d.ore_witness(&s1, &s2)?;
        if d.mul(&w.l1, &s1) == w.common && d.mul(&w.l2, &s2) == w.common {
            ore_ok += 1;
        }
    }
    sections.push(Section { name: "ore", passed: ore_ok == samples, detail: json!({ "samples": samples, "held": ore_ok }) });

    let passed = sections.iter().all(|s| s.passed);
    let text = sections.iter().map(|s| format!("{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name)).collect();
    let result = Value::Array(
        sections.into_iter().map(|s| json!({ "section": s.name, "passed": s.passed, "detail": s.detail })).collect(),
    );
    Ok(Outcome::new(result, text).verdict(passed))
}
