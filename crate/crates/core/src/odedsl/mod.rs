//! The `.ode` input format.
//!
//! ```text
//! params a;
//! vars x1, x2;
//! input N1(x1);        # optional; dependency list is optional too
//! dot x1 = x2;
//! dot x2 = -x1 - a*x2 + N1;
//! ```
//!
//! Right-hand sides are polynomial in the variables, with coefficients that
//! may divide by parameter expressions. `dot(v)` on a right-hand side refers
//! to the derivative of `v`; [`resolve_dot_references`] turns such
//! references into auxiliary inputs or substitutes them away.

mod lexer;
mod parser;
mod render;
mod resolve;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::param::ParamScalar;
use crate::poly::PolyVector;

pub use parser::{parse, parse_expression, parse_with_cap};
pub use render::{input_display_names, render_system};
pub use resolve::{resolve_dot_references, DotMode};

/// Location of a token in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },
    #[error("{span}: `{name}` is already declared")]
    Duplicate { name: String, span: SourceSpan },
    #[error("{span}: `{name}` is not a declared variable")]
    UndeclaredVariable { name: String, span: SourceSpan },
    #[error("{span}: unknown identifier `{name}`")]
    UnknownIdentifier { name: String, span: SourceSpan },
    #[error("no equation for variable `{name}`")]
    MissingEquation { name: String },
    #[error("{span}: second equation for `{name}`")]
    DuplicateEquation { name: String, span: SourceSpan },
    #[error("{span}: not polynomial: {message}")]
    NonPolynomial { span: SourceSpan, message: String },
    #[error("{span}: division by zero")]
    DivisionByZero { span: SourceSpan },
    #[error("{span}: degree {degree} exceeds the cap {cap}")]
    DegreeCap { span: SourceSpan, degree: u32, cap: u32 },
    #[error("equation for `{equation}` multiplies inputs or derivative references together")]
    InputProduct { equation: String },
    #[error("cyclic derivative references through `{name}`")]
    CyclicDotReference { name: String },
}

/// Where an input symbol comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InputKind {
    /// Declared with an `input` statement.
    Declared,
    /// A raw `dot(var)` reference, before resolution.
    DotRef { var: usize },
    /// Auxiliary input standing for `scale * dot(var)`.
    Synthesized { var: usize, scale: ParamScalar },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Input {
    pub name: String,
    /// Variables the input depends on.
    pub deps: BTreeSet<usize>,
    pub kind: InputKind,
}

/// A parsed system. Right-hand sides live in an ambient of the variables
/// followed by the inputs, so `rhs.nvars() == variables.len() + inputs.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdeSystem {
    pub variables: Vec<String>,
    pub parameters: Vec<String>,
    pub inputs: Vec<Input>,
    pub rhs: PolyVector,
}

impl OdeSystem {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn ambient(&self) -> usize {
        self.variables.len() + self.inputs.len()
    }

    /// Variable names followed by input names, as printed in expressions.
    pub fn ambient_names(&self) -> Vec<String> {
        let mut v = self.variables.clone();
        v.extend(self.inputs.iter().map(|i| i.name.clone()));
        v
    }

    pub fn has_dot_refs(&self) -> bool {
        self.inputs.iter().any(|i| matches!(i.kind, InputKind::DotRef { .. }))
    }

    /// Support of a term in variables, with inputs replaced by their
    /// dependency sets.
    pub fn expanded_support(&self, m: &crate::poly::Monomial) -> BTreeSet<usize> {
        let n = self.dim();
        let mut s = BTreeSet::new();
        for i in m.support() {
            if i < n {
                s.insert(i);
            } else {
                s.extend(self.inputs[i - n].deps.iter().copied());
            }
        }
        s
    }
}
