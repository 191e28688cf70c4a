use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::lexer::{describe, tokenize, Tok, Token};
use super::{Input, InputKind, OdeSystem, ParseError, SourceSpan};
use crate::param::ParamScalar;
use crate::poly::{Polynomial, PolyVector, DEFAULT_DEGREE_CAP};
use crate::Rational;

const KEYWORDS: [&str; 4] = ["params", "vars", "input", "dot"];

#[derive(Clone, Copy, Debug)]
enum Sym {
    Var(usize),
    Param(usize),
    Input(usize),
    Dot(usize),
}

#[derive(Clone, Debug)]
enum Expr {
    Num(Rational),
    Sym(Sym),
    Neg(Box<Expr>),
    /// Signed summands; `true` marks subtraction.
    Sum(Vec<(bool, Expr)>),
    /// Factors after the first; `true` marks division.
    Product(Box<Expr>, Vec<(bool, Expr, SourceSpan)>),
    Pow(Box<Expr>, u32, SourceSpan),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Var,
    Param,
    Input,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: BTreeMap<String, (Kind, usize)>,
    vars: Vec<String>,
    params: Vec<String>,
    inputs: Vec<(String, BTreeSet<usize>)>,
    equations: BTreeMap<usize, Expr>,
    depth: usize,
}

const MAX_NESTING: usize = 256;

/// Parses `.ode` source with the default degree cap.
pub fn parse(src: &str) -> Result<OdeSystem, ParseError> {
    parse_with_cap(src, DEFAULT_DEGREE_CAP)
}

/// Parses `.ode` source; any intermediate expression of total degree above
/// `cap` is rejected.
pub fn parse_with_cap(src: &str, cap: u32) -> Result<OdeSystem, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        names: BTreeMap::new(),
        vars: Vec::new(),
        params: Vec::new(),
        inputs: Vec::new(),
        equations: BTreeMap::new(),
        depth: 0,
    };
    while p.peek() != &Tok::Eof {
        p.statement()?;
    }
    p.finish(cap)
}

/// Parses a single expression over the given symbol and parameter names;
/// the result lives in an ambient of `symbols.len()` variables.
pub fn parse_expression(src: &str, symbols: &[String], params: &[String]) -> Result<Polynomial, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        names: BTreeMap::new(),
        vars: Vec::new(),
        params: Vec::new(),
        inputs: Vec::new(),
        equations: BTreeMap::new(),
        depth: 0,
    };
    let start = p.span();
    for (names, kind) in [(symbols, Kind::Var), (params, Kind::Param)] {
        for name in names {
            p.declare(name.clone(), start, kind)?;
        }
    }
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    let n = symbols.len();
    let low = Lower { n, ni: 0, wide: 2 * n, cap: DEFAULT_DEGREE_CAP };
    let poly = low.lower(&e)?;
    if (n..2 * n).any(|s| poly.degree_in(s) > 0) {
        return Err(ParseError::Syntax { span: start, message: "`dot` is not allowed here".to_string() });
    }
    let map: Vec<Option<usize>> = (0..n).map(Some).chain((0..n).map(|_| None)).collect();
    Ok(poly.remap(n, &map))
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax {
            span: self.span(),
            message: format!("expected {}, found {}", wanted, describe(self.peek())),
        }
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == t {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.next().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn declare(&mut self, name: String, span: SourceSpan, kind: Kind) -> Result<usize, ParseError> {
        if KEYWORDS.contains(&name.as_str()) {
            return Err(ParseError::Syntax { span, message: format!("`{}` is a keyword", name) });
        }
        if self.names.contains_key(&name) {
            return Err(ParseError::Duplicate { name, span });
        }
        let idx = match kind {
            Kind::Var => {
                self.vars.push(name.clone());
                self.vars.len() - 1
            }
            Kind::Param => {
                self.params.push(name.clone());
                self.params.len() - 1
            }
            Kind::Input => {
                self.inputs.push((name.clone(), BTreeSet::new()));
                self.inputs.len() - 1
            }
        };
        self.names.insert(name, (kind, idx));
        Ok(idx)
    }

    fn id_list(&mut self, kind: Kind) -> Result<(), ParseError> {
        if *self.peek() == Tok::Semi {
            self.next();
            return Ok(());
        }
        loop {
            let (name, sp) = self.ident()?;
            self.declare(name, sp, kind)?;
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::Semi => {
                    self.next();
                    return Ok(());
                }
                _ => return Err(self.unexpected("`,` or `;`")),
            }
        }
    }

    fn var_ref(&mut self) -> Result<usize, ParseError> {
        let (name, sp) = self.ident()?;
        match self.names.get(&name) {
            Some((Kind::Var, i)) => Ok(*i),
            _ => Err(ParseError::UndeclaredVariable { name, span: sp }),
        }
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (kw, sp) = self.ident()?;
        match kw.as_str() {
            "params" => self.id_list(Kind::Param),
            "vars" => self.id_list(Kind::Var),
            "input" => {
                let (name, nsp) = self.ident()?;
                let idx = self.declare(name, nsp, Kind::Input)?;
                if *self.peek() == Tok::LParen {
                    self.next();
                    let mut deps = BTreeSet::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            deps.insert(self.var_ref()?);
                            match self.peek() {
                                Tok::Comma => {
                                    self.next();
                                }
                                Tok::RParen => break,
                                _ => return Err(self.unexpected("`,` or `)`")),
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    self.inputs[idx].1 = deps;
                }
                self.expect(Tok::Semi, "`;`")?;
                Ok(())
            }
            "dot" => {
                let (name, nsp) = self.ident()?;
                let v = match self.names.get(&name) {
                    Some((Kind::Var, i)) => *i,
                    _ => return Err(ParseError::UndeclaredVariable { name, span: nsp }),
                };
                if self.equations.contains_key(&v) {
                    return Err(ParseError::DuplicateEquation { name, span: nsp });
                }
                self.expect(Tok::Eq, "`=`")?;
                let e = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                self.equations.insert(v, e);
                Ok(())
            }
            _ => Err(ParseError::Syntax {
                span: sp,
                message: format!("expected `params`, `vars`, `input` or `dot`, found `{}`", kw),
            }),
        }
    }

    fn nest(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::Syntax { span: self.span(), message: "expression nested too deeply".to_string() });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.nest()?;
        let first = self.term()?;
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    parts.push((false, self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    parts.push((true, self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        if parts.is_empty() {
            return Ok(first);
        }
        parts.insert(0, (false, first));
        Ok(Expr::Sum(parts))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let first = self.unary()?;
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Tok::Star => {
                    let sp = self.next().span;
                    factors.push((false, self.unary()?, sp));
                }
                Tok::Slash => {
                    let sp = self.next().span;
                    factors.push((true, self.unary()?, sp));
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            return Ok(first);
        }
        Ok(Expr::Product(Box::new(first), factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.next();
                self.nest()?;
                let e = self.unary()?;
                self.depth -= 1;
                Ok(Expr::Neg(Box::new(e)))
            }
            Tok::Plus => {
                self.next();
                self.nest()?;
                let e = self.unary();
                self.depth -= 1;
                e
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let sp = self.next().span;
        match self.peek().clone() {
            Tok::Int(e) if e <= u32::MAX as u64 => {
                self.next();
                Ok(Expr::Pow(Box::new(base), e as u32, sp))
            }
            Tok::Int(_) => Err(ParseError::DegreeCap { span: sp, degree: u32::MAX, cap: DEFAULT_DEGREE_CAP }),
            Tok::Minus => Err(ParseError::NonPolynomial { span: sp, message: "negative exponent".to_string() }),
            Tok::Number(_) => Err(ParseError::NonPolynomial { span: sp, message: "non-integer exponent".to_string() }),
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                Ok(Expr::Num(Rational::from_integer(v.into())))
            }
            Tok::Number(q) => {
                self.next();
                Ok(Expr::Num(q))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "dot" => {
                self.next();
                self.expect(Tok::LParen, "`(`")?;
                let v = self.var_ref()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Sym(Sym::Dot(v)))
            }
            Tok::Ident(name) => {
                let sp = self.next().span;
                match self.names.get(&name) {
                    Some((Kind::Var, i)) => Ok(Expr::Sym(Sym::Var(*i))),
                    Some((Kind::Param, i)) => Ok(Expr::Sym(Sym::Param(*i))),
                    Some((Kind::Input, i)) => Ok(Expr::Sym(Sym::Input(*i))),
                    None => Err(ParseError::UnknownIdentifier { name, span: sp }),
                }
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn finish(self, cap: u32) -> Result<OdeSystem, ParseError> {
        let n = self.vars.len();
        let ni = self.inputs.len();
        let wide = n + ni + n;
        for (i, name) in self.vars.iter().enumerate() {
            if !self.equations.contains_key(&i) {
                return Err(ParseError::MissingEquation { name: name.clone() });
            }
        }
        let low = Lower { n, ni, wide, cap };
        let mut rhs = Vec::with_capacity(n);
        for (i, e) in &self.equations {
            let p = low.lower(e)?;
            for m in p.monomials() {
                let inputs: u32 = m.exponents()[n..].iter().sum();
                if inputs > 1 {
                    return Err(ParseError::InputProduct { equation: self.vars[*i].clone() });
                }
            }
            rhs.push(p);
        }
        let used: Vec<usize> = (0..n).filter(|v| rhs.iter().any(|p| p.degree_in(n + ni + v) > 0)).collect();
        let mut map: Vec<Option<usize>> = (0..n + ni).map(Some).collect();
        map.extend((0..n).map(|v| used.iter().position(|&u| u == v).map(|k| n + ni + k)));
        let ambient = n + ni + used.len();
        let rhs: Vec<Polynomial> = rhs.iter().map(|p| p.remap(ambient, &map)).collect();
        let mut inputs: Vec<Input> = self
            .inputs
            .into_iter()
            .map(|(name, deps)| Input { name, deps, kind: InputKind::Declared })
            .collect();
        for v in used {
            inputs.push(Input {
                name: format!("dot({})", self.vars[v]),
                deps: BTreeSet::new(),
                kind: InputKind::DotRef { var: v },
            });
        }
        Ok(OdeSystem { variables: self.vars, parameters: self.params, inputs, rhs: PolyVector::new(ambient, rhs) })
    }
}

struct Lower {
    n: usize,
    ni: usize,
    wide: usize,
    cap: u32,
}

impl Lower {
    fn check(&self, p: Polynomial, span: SourceSpan) -> Result<Polynomial, ParseError> {
        let d = p.degree();
        if d > self.cap {
            return Err(ParseError::DegreeCap { span, degree: d, cap: self.cap });
        }
        Ok(p)
    }

    fn lower(&self, e: &Expr) -> Result<Polynomial, ParseError> {
        let w = self.wide;
        Ok(match e {
            Expr::Num(q) => Polynomial::constant(w, ParamScalar::from_rational(q.clone())),
            Expr::Sym(Sym::Var(i)) => Polynomial::var(w, *i),
            Expr::Sym(Sym::Input(i)) => Polynomial::var(w, self.n + i),
            Expr::Sym(Sym::Dot(v)) => Polynomial::var(w, self.n + self.ni + v),
            Expr::Sym(Sym::Param(i)) => Polynomial::constant(w, ParamScalar::param(*i)),
            Expr::Neg(a) => self.lower(a)?.neg(),
            Expr::Sum(parts) => {
                let mut acc = Polynomial::zero(w);
                for (neg, e) in parts {
                    let p = self.lower(e)?;
                    acc = if *neg { acc.sub(&p) } else { acc.add(&p) };
                }
                acc
            }
            Expr::Product(first, factors) => {
                let mut acc = self.lower(first)?;
                for (div, e, sp) in factors {
                    let b = self.lower(e)?;
                    if *div {
                        let Some(c) = b.as_constant() else {
                            return Err(ParseError::NonPolynomial {
                                span: *sp,
                                message: "division by an expression that is not constant".to_string(),
                            });
                        };
                        let inv = c.inv().ok_or(ParseError::DivisionByZero { span: *sp })?;
                        acc = acc.scale(&inv);
                    } else {
                        if acc.degree() + b.degree() > self.cap && !acc.is_zero() && !b.is_zero() {
                            return Err(ParseError::DegreeCap { span: *sp, degree: acc.degree() + b.degree(), cap: self.cap });
                        }
                        acc = acc.mul(&b);
                    }
                }
                acc
            }
            Expr::Pow(a, k, sp) => {
                let a = self.lower(a)?;
                if a.is_constant() {
                    if let Some(c) = a.as_constant() {
                        if *k > 64 && !c.is_zero() && !c.is_one() {
                            return Err(ParseError::DegreeCap { span: *sp, degree: *k, cap: 64 });
                        }
                    }
                    a.pow(*k)
                } else {
                    let d = a.degree() as u64 * *k as u64;
                    if d > self.cap as u64 {
                        return Err(ParseError::DegreeCap { span: *sp, degree: d.min(u32::MAX as u64) as u32, cap: self.cap });
                    }
                    self.check(a.pow(*k), *sp)?
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::{polynomial, Symbols};

    fn show(sys: &OdeSystem, i: usize) -> String {
        polynomial(sys.rhs.get(i), Symbols::new(&sys.ambient_names(), &sys.parameters))
    }

    #[test]
    fn oscillator() {
        let s = parse("params a; vars x1,x2; dot x1 = x2; dot x2 = -x1 - a*x2;").unwrap();
        assert_eq!(s.variables, vec!["x1".to_string(), "x2".to_string()]);
        assert_eq!(show(&s, 0), "x2");
        assert_eq!(show(&s, 1), "-x1 - a*x2");
    }

    #[test]
    fn division_by_variable_is_rejected() {
        assert!(matches!(parse("vars x; dot x = 1/x;"), Err(ParseError::NonPolynomial { .. })));
        assert!(matches!(parse("params a; vars x; dot x = x/(a-a);"), Err(ParseError::DivisionByZero { .. })));
        let s = parse("params a, b; vars x; dot x = x/(a+b);").unwrap();
        assert_eq!(show(&s, 0), "1/(a + b)*x");
    }

    #[test]
    fn declaration_errors() {
        assert!(matches!(parse("vars x, x; dot x = 0;"), Err(ParseError::Duplicate { .. })));
        assert!(matches!(parse("vars x; dot y = 0;"), Err(ParseError::UndeclaredVariable { .. })));
        assert!(matches!(parse("vars x, y; dot x = 0;"), Err(ParseError::MissingEquation { .. })));
        assert!(matches!(parse("vars x; dot x = 0; dot x = 1;"), Err(ParseError::DuplicateEquation { .. })));
        assert!(matches!(parse("vars x; dot x = q;"), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("dot x = 1; vars x;"), Err(ParseError::UndeclaredVariable { .. })));
        assert!(matches!(parse("vars x; input u; dot x = u*u;"), Err(ParseError::InputProduct { .. })));
        assert!(matches!(parse("vars x; dot x = x^-1;"), Err(ParseError::NonPolynomial { .. })));
        assert!(matches!(parse("vars x; dot x = x^9;"), Err(ParseError::DegreeCap { .. })));
        match parse("vars x;\n dot x = x +;") {
            Err(ParseError::Syntax { span, .. }) => assert_eq!((span.line, span.column), (2, 13)),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn dot_references_become_inputs() {
        let s = parse("params m; vars x1, x2; dot x1 = x2; dot x2 = -x1 + m*dot(x1);").unwrap();
        assert_eq!(s.inputs.len(), 1);
        assert_eq!(s.inputs[0].kind, InputKind::DotRef { var: 0 });
        assert_eq!(show(&s, 1), "-x1 + m*dot(x1)");
    }

    #[test]
    fn decimals_and_inputs_with_deps() {
        let s = parse("vars x; input N(x); dot x = 0.25*x + N;").unwrap();
        assert_eq!(s.inputs[0].deps, BTreeSet::from([0]));
        assert_eq!(show(&s, 0), "1/4*x + N");
        assert!(parse("").unwrap().variables.is_empty());
    }

    #[test]
    fn standalone_expressions() {
        let names = |v: &[&str]| v.iter().map(|s| String::from(*s)).collect::<Vec<_>>();
        let p = parse_expression("c/(2*a)*x1^2 + 1/2*x2^2", &names(&["x1", "x2"]), &names(&["a", "c"])).unwrap();
        assert_eq!(p.nvars(), 2);
        let sys = parse("params a, c; vars x1, x2; dot x1 = c/(2*a)*x1^2 + 1/2*x2^2; dot x2 = 0;").unwrap();
        assert_eq!(&p, sys.rhs.get(0));
        assert!(parse_expression("x1 +", &names(&["x1"]), &[]).is_err());
        assert!(parse_expression("x1 x1", &names(&["x1"]), &[]).is_err());
        assert!(matches!(parse_expression("y", &names(&["x1"]), &[]), Err(ParseError::UnknownIdentifier { .. })));
        assert!(parse_expression("dot(x1)", &names(&["x1"]), &[]).is_err());
    }
}
