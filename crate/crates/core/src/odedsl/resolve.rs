use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Input, InputKind, OdeSystem, ParseError};
use crate::param::ParamScalar;
use crate::poly::{Polynomial, PolyVector};

/// Treatment of `dot(v)` references on right-hand sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DotMode {
    /// Replace each reference by an auxiliary input depending on the
    /// variables of `rhs(v)`.
    #[default]
    Aux,
    /// Replace each reference by `rhs(v)`, fully expanded.
    Substitute,
}

/// Removes raw derivative references from `sys`.
pub fn resolve_dot_references(sys: &OdeSystem, mode: DotMode) -> Result<OdeSystem, ParseError> {
    if !sys.has_dot_refs() {
        return Ok(sys.clone());
    }
    let n = sys.dim();
    let dot_slot: BTreeMap<usize, usize> = sys
        .inputs
        .iter()
        .enumerate()
        .filter_map(|(k, inp)| match inp.kind {
            InputKind::DotRef { var } => Some((var, n + k)),
            _ => None,
        })
        .collect();
    let expanded = expand_all(sys, &dot_slot)?;

    match mode {
        DotMode::Substitute => {
            let mut rhs: Vec<Polynomial> = sys.rhs.iter().cloned().collect();
            for (v, slot) in &dot_slot {
                for p in rhs.iter_mut() {
                    if p.degree_in(*slot) > 0 {
                        *p = p.substitute(*slot, &expanded[v]);
                    }
                }
            }
            let mut map: Vec<Option<usize>> = (0..n).map(Some).collect();
            let mut inputs = Vec::new();
            for inp in &sys.inputs {
                if inp.kind == InputKind::Declared {
                    map.push(Some(n + inputs.len()));
                    inputs.push(inp.clone());
                } else {
                    map.push(None);
                }
            }
            let ambient = n + inputs.len();
            let rhs = rhs.iter().map(|p| p.remap(ambient, &map)).collect();
            Ok(OdeSystem {
                variables: sys.variables.clone(),
                parameters: sys.parameters.clone(),
                inputs,
                rhs: PolyVector::new(ambient, rhs),
            })
        }
        DotMode::Aux => {
            let mut used: BTreeSet<String> = sys.variables.iter().chain(&sys.parameters).cloned().collect();
            used.extend(sys.inputs.iter().filter(|i| i.kind == InputKind::Declared).map(|i| i.name.clone()));
            let single = dot_slot.len() == 1;
            let mut counter = 0usize;
            let mut inputs = sys.inputs.clone();
            let mut rhs: Vec<Polynomial> = sys.rhs.iter().cloned().collect();
            for (v, slot) in &dot_slot {
                let scale = common_constant(&rhs, *slot).unwrap_or_else(ParamScalar::one);
                if !scale.is_one() {
                    let inv = scale.inv().expect("nonzero scale");
                    for p in rhs.iter_mut() {
                        *p = Polynomial::from_terms(
                            p.nvars(),
                            p.terms().map(|(m, c)| {
                                let c = if m.exp(*slot) > 0 { c.mul(&inv) } else { c.clone() };
                                (m.clone(), c)
                            }),
                        );
                    }
                }
                let name = if single && !used.contains("u") {
                    String::from("u")
                } else {
                    loop {
                        counter += 1;
                        let cand = format!("u{}", counter);
                        if !used.contains(&cand) {
                            break cand;
                        }
                    }
                };
                used.insert(name.clone());
                let deps = variable_support(sys, &expanded[v]);
                inputs[slot - n] = Input { name, deps, kind: InputKind::Synthesized { var: *v, scale } };
            }
            Ok(OdeSystem {
                variables: sys.variables.clone(),
                parameters: sys.parameters.clone(),
                inputs,
                rhs: PolyVector::new(sys.ambient(), rhs),
            })
        }
    }
}

/// The coefficient of input `slot` if it is the same constant everywhere
/// it occurs.
fn common_constant(rhs: &[Polynomial], slot: usize) -> Option<ParamScalar> {
    let mut found: Option<ParamScalar> = None;
    for p in rhs {
        let mut coef = Polynomial::zero(p.nvars());
        for (m, c) in p.terms() {
            if m.exp(slot) > 0 {
                coef.add_term(m.with_exp(slot, 0), c.clone());
            }
        }
        if coef.is_zero() {
            continue;
        }
        let c = coef.as_constant()?;
        match &found {
            Some(f) if *f != c => return None,
            _ => found = Some(c),
        }
    }
    found
}

fn variable_support(sys: &OdeSystem, p: &Polynomial) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    for m in p.monomials() {
        s.extend(sys.expanded_support(m));
    }
    s
}

/// `rhs(v)` with every derivative reference replaced recursively, for each
/// referenced variable `v`.
fn expand_all(sys: &OdeSystem, dot_slot: &BTreeMap<usize, usize>) -> Result<BTreeMap<usize, Polynomial>, ParseError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        v: usize,
        sys: &OdeSystem,
        dot_slot: &BTreeMap<usize, usize>,
        marks: &mut BTreeMap<usize, Mark>,
        out: &mut BTreeMap<usize, Polynomial>,
    ) -> Result<(), ParseError> {
        match marks.get(&v) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(ParseError::CyclicDotReference { name: sys.variables[v].clone() }),
            None => {}
        }
        marks.insert(v, Mark::Active);
        let mut p = sys.rhs.get(v).clone();
        for (w, slot) in dot_slot {
            if p.degree_in(*slot) > 0 {
                visit(*w, sys, dot_slot, marks, out)?;
                p = p.substitute(*slot, &out[w]);
            }
        }
        marks.insert(v, Mark::Done);
        out.insert(v, p);
        Ok(())
    }
    let mut marks = BTreeMap::new();
    let mut out = BTreeMap::new();
    for v in dot_slot.keys() {
        visit(*v, sys, dot_slot, &mut marks, &mut out)?;
    }
    Ok(out)
}
