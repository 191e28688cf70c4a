mod common;

use std::collections::BTreeSet;

use common::*;
use phsify_core::odedsl::{
    parse, parse_expression, render_system, resolve_dot_references, DotMode, Input, InputKind, OdeSystem,
};
use phsify_core::param::ParamScalar;
use phsify_core::poly::{Monomial, PolyVector, Polynomial};
use phsify_core::render::{polynomial as show, Symbols};
use proptest::prelude::*;

const N: usize = 3;
const PARAMS: [&str; 2] = ["a", "b"];

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Right-hand sides linear in the inputs, as the language requires.
fn rhs(ninputs: usize) -> impl Strategy<Value = Polynomial> {
    let amb = N + ninputs;
    let state = param_polynomial(N, 2, 0, 3, 4);
    let forcing = prop::collection::vec((0..ninputs.max(1), monomial(N, 0, 1), scalar(2)), 0..=ninputs.min(2));
    (state, forcing).prop_map(move |(p, f)| {
        let map: Vec<Option<usize>> = (0..N).map(Some).collect();
        let mut out = p.remap(amb, &map);
        if ninputs > 0 {
            for (k, m, c) in f {
                let mut e = m.exponents().to_vec();
                e.resize(amb, 0);
                e[N + k] = 1;
                out.add_term(Monomial::new(e), c);
            }
        }
        out
    })
}

fn system() -> impl Strategy<Value = OdeSystem> {
    (0usize..=2)
        .prop_flat_map(|ni| {
            let deps = prop::collection::vec(prop::collection::btree_set(0..N, 0..=2), ni);
            (Just(ni), deps, prop::collection::vec(rhs(ni), N))
        })
        .prop_map(|(ni, deps, rhs)| OdeSystem {
            variables: names(&["x1", "x2", "x3"]),
            parameters: names(&PARAMS),
            inputs: deps
                .into_iter()
                .enumerate()
                .map(|(k, d)| Input { name: format!("u{}", k + 1), deps: d, kind: InputKind::Declared })
                .collect(),
            rhs: PolyVector::new(N + ni, rhs),
        })
}

/// Replaces each synthesized input by `scale * dot(var)` until none is left.
fn expand_aux(sys: &OdeSystem) -> Vec<Polynomial> {
    let n = sys.dim();
    let slots: Vec<(usize, usize, ParamScalar)> = sys
        .inputs
        .iter()
        .enumerate()
        .filter_map(|(k, i)| match &i.kind {
            InputKind::Synthesized { var, scale } => Some((n + k, *var, scale.clone())),
            _ => None,
        })
        .collect();
    let mut rhs: Vec<Polynomial> = sys.rhs.iter().cloned().collect();
    for _ in 0..=slots.len() {
        for &(slot, var, ref scale) in &slots {
            let def = rhs[var].scale(scale);
            for p in rhs.iter_mut() {
                if p.degree_in(slot) > 0 {
                    *p = p.substitute(slot, &def);
                }
            }
        }
    }
    let map: Vec<Option<usize>> = (0..sys.ambient()).map(|i| (i < n).then_some(i)).collect();
    rhs.iter().map(|p| p.remap(n, &map)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn render_then_parse_round_trips(sys in system()) {
        let text = render_system(&sys);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{}\n{}", e, text)))?;
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn expressions_round_trip(p in param_polynomial(N, 2, 0, 4, 6)) {
        let vars = names(&["x1", "x2", "x3"]);
        let params = names(&PARAMS);
        let text = show(&p, Symbols::new(&vars, &params));
        prop_assert_eq!(parse_expression(&text, &vars, &params).unwrap(), p);
    }

    #[test]
    fn arbitrary_token_soup_never_panics(
        toks in prop::collection::vec(
            prop::sample::select(vec![
                "vars", "params", "input", "dot", "x", "y", "a", "u", "=", ";", ",", "(", ")", "+", "-", "*",
                "/", "^", "0", "1", "2", "3/4", "1.5", "#c\n", "dot(x)", "\n", "@",
            ]),
            0..24,
        )
    ) {
        let _ = parse(&toks.join(" "));
    }

    #[test]
    fn arbitrary_bytes_never_panic(s in "\\PC{0,60}") {
        let _ = parse(&s);
    }

    #[test]
    fn aux_and_substitute_agree(
        p in prop::collection::vec(param_polynomial(N, 2, 0, 2, 3), N),
        c1 in scalar(2),
        c2 in scalar(2),
    ) {
        prop_assume!(!c1.is_zero() && !c2.is_zero());
        let vars = names(&["x1", "x2", "x3"]);
        let params = names(&PARAMS);
        let sym = Symbols::new(&vars, &params);
        let pv = |cst: &ParamScalar| show(&Polynomial::constant(0, cst.clone()), Symbols::new(&[], &params));
        let src = format!(
            "params a, b; vars x1, x2, x3;\ndot x1 = {};\ndot x2 = {} + ({})*dot(x1);\ndot x3 = {} + ({})*dot(x2);\n",
            show(&p[0], sym), show(&p[1], sym), pv(&c1), show(&p[2], sym), pv(&c2),
        );
        let raw = parse(&src).unwrap();
        let aux = resolve_dot_references(&raw, DotMode::Aux).unwrap();
        let sub = resolve_dot_references(&raw, DotMode::Substitute).unwrap();
        prop_assert!(sub.inputs.is_empty());
        prop_assert_eq!(expand_aux(&aux), sub.rhs.entries().to_vec());
        // the hand expansion as a third opinion
        let want2 = p[1].add(&p[0].scale(&c1));
        prop_assert_eq!(sub.rhs.get(1), &want2);
        prop_assert_eq!(sub.rhs.get(2), &p[2].add(&want2.scale(&c2)));
    }
}

#[test]
fn dependency_sets_survive_round_trip() {
    let sys = parse("vars x, y; input u(y); dot x = u; dot y = -x;").unwrap();
    assert_eq!(sys.inputs[0].deps, BTreeSet::from([1]));
    assert_eq!(parse(&render_system(&sys)).unwrap(), sys);
}
