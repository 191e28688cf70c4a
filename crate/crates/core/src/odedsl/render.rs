use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{InputKind, OdeSystem};
use crate::param::ParamScalar;
use crate::render::{polynomial, scalar, Symbols};

/// Names used for inputs when writing `.ode` text: synthesized inputs are
/// written out as the derivative expression they stand for.
pub fn input_display_names(sys: &OdeSystem) -> Vec<String> {
    sys.inputs
        .iter()
        .map(|inp| match &inp.kind {
            InputKind::Declared => inp.name.clone(),
            InputKind::DotRef { var } => format!("dot({})", sys.variables[*var]),
            InputKind::Synthesized { var, scale } => {
                if *scale == ParamScalar::one() {
                    format!("dot({})", sys.variables[*var])
                } else {
                    format!("({}*dot({}))", scalar(scale, &sys.parameters), sys.variables[*var])
                }
            }
        })
        .collect()
}

/// Canonical `.ode` text; parsing it gives back an equal system when the
/// input carries no synthesized inputs.
pub fn render_system(sys: &OdeSystem) -> String {
    let mut out = String::new();
    if !sys.parameters.is_empty() {
        out.push_str(&format!("params {};\n", sys.parameters.join(", ")));
    }
    if !sys.variables.is_empty() {
        out.push_str(&format!("vars {};\n", sys.variables.join(", ")));
    }
    for inp in &sys.inputs {
        if inp.kind != InputKind::Declared {
            continue;
        }
        if inp.deps.is_empty() {
            out.push_str(&format!("input {};\n", inp.name));
        } else {
            let deps: Vec<&str> = inp.deps.iter().map(|&d| sys.variables[d].as_str()).collect();
            out.push_str(&format!("input {}({});\n", inp.name, deps.join(", ")));
        }
    }
    let mut names = sys.variables.clone();
    names.extend(input_display_names(sys));
    let sym = Symbols::new(&names, &sys.parameters);
    for (v, p) in sys.variables.iter().zip(sys.rhs.iter()) {
        out.push_str(&format!("dot {} = {};\n", v, polynomial(p, sym)));
    }
    out
}
