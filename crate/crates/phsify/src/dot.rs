//! Graphviz rendering: a cluster per node, solid coupling edges, dashed
//! edges to virtual vertices.

use std::collections::BTreeMap;
use std::fmt::Write;

use phsify_core::graph::DecoratedGraph;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn emit_dot(g: &DecoratedGraph) -> String {
    let mut out = String::from("digraph phsify {\n  rankdir=LR;\n  compound=true;\n");
    for n in &g.nodes {
        let label = format!("{}: {}\nH = {}", n.id, n.family, n.h);
        writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{}", n.id))).unwrap();
        writeln!(out, "    label={};", quote(&label)).unwrap();
        writeln!(out, "    {} [shape=box, label={}];", quote(&n.id), quote(&n.variables.join(", "))).unwrap();
        for v in g.virtual_vertices.iter().filter(|v| v.node == n.id) {
            writeln!(out, "    {} [shape=ellipse, style=dashed, label={}];", quote(&v.id), quote(&format!("{}\n{}", v.kind, v.term)))
                .unwrap();
        }
        out.push_str("  }\n");
        for v in g.virtual_vertices.iter().filter(|v| v.node == n.id) {
            writeln!(out, "  {} -> {} [style=dashed, arrowhead=none];", quote(&n.id), quote(&v.id)).unwrap();
        }
    }
    let mut inputs: Vec<&str> = g.edges.iter().filter_map(|e| e.from.strip_prefix("input:")).collect();
    inputs.sort_unstable();
    inputs.dedup();
    for i in inputs {
        writeln!(out, "  {} [shape=plaintext, label={}];", quote(&format!("input:{}", i)), quote(i)).unwrap();
    }
    let mut grouped: BTreeMap<(&str, &str), Vec<String>> = BTreeMap::new();
    for e in &g.edges {
        grouped.entry((&e.from, &e.to)).or_default().push(format!("dot {} += ({})*{}", e.equation, e.coefficient, e.port));
    }
    for ((from, to), labels) in grouped {
        writeln!(out, "  {} -> {} [label={}];", quote(from), quote(to), quote(&labels.join("\n"))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Id(String),
    Arrow,
    Open,
    Close,
    LBracket,
    RBracket,
    Semi,
    Equals,
    Comma,
}

fn tokenize(dot: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut it = dot.chars().peekable();
    while let Some(c) = it.next() {
        match c {
            c if c.is_whitespace() => {}
            '"' => {
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some('\\') => {
                            s.push('\\');
                            s.extend(it.next());
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(Token::Id(s));
            }
            '-' if it.peek() == Some(&'>') => {
                it.next();
                out.push(Token::Arrow);
            }
            '{' => out.push(Token::Open),
            '}' => out.push(Token::Close),
            '[' => out.push(Token::LBracket),
            ']' => out.push(Token::RBracket),
            ';' => out.push(Token::Semi),
            '=' => out.push(Token::Equals),
            ',' => out.push(Token::Comma),
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let mut s = String::from(c);
                while let Some(&d) = it.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '.' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Id(s));
            }
            c => return Err(format!("unexpected character `{}`", c)),
        }
    }
    Ok(out)
}

/// Summary of a DOT document that passed [`validate_dot`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotShape {
    pub clusters: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

/// Structural check: balanced braces and brackets, and every edge endpoint
/// declared as a vertex somewhere in the document.
pub fn validate_dot(dot: &str) -> Result<DotShape, String> {
    let toks = tokenize(dot)?;
    let mut depth = 0usize;
    let mut clusters = 0;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut stmt: Vec<Token> = Vec::new();
    let mut in_attrs = false;
    let finish = |stmt: &mut Vec<Token>, vertices: &mut Vec<String>, edges: &mut Vec<(String, String)>| {
        let ids: Vec<&Token> = stmt.iter().collect();
        if ids.iter().any(|t| **t == Token::Arrow) {
            for w in ids.windows(3) {
                if let (Token::Id(a), Token::Arrow, Token::Id(b)) = (w[0], w[1], w[2]) {
                    edges.push((a.clone(), b.clone()));
                }
            }
        } else if let [Token::Id(name), rest @ ..] = stmt.as_slice() {
            let keyword = matches!(name.as_str(), "digraph" | "graph" | "subgraph" | "node" | "edge" | "strict");
            if !keyword && rest.first() != Some(&Token::Equals) {
                vertices.push(name.clone());
            }
        }
        stmt.clear();
    };
    for t in toks {
        if in_attrs {
            match t {
                Token::RBracket => in_attrs = false,
                Token::LBracket | Token::Open | Token::Close => return Err("malformed attribute list".into()),
                _ => {}
            }
            continue;
        }
        match t {
            Token::LBracket => in_attrs = true,
            Token::RBracket => return Err("unbalanced `]`".into()),
            Token::Open => {
                if stmt.first() == Some(&Token::Id("subgraph".into())) {
                    if let Some(Token::Id(name)) = stmt.get(1) {
                        clusters += name.starts_with("cluster") as usize;
                    }
                }
                stmt.clear();
                depth += 1;
            }
            Token::Close => {
                finish(&mut stmt, &mut vertices, &mut edges);
                depth = depth.checked_sub(1).ok_or("unbalanced `}`")?;
            }
            Token::Semi => finish(&mut stmt, &mut vertices, &mut edges),
            t => stmt.push(t),
        }
    }
    if depth != 0 || in_attrs {
        return Err("unbalanced braces".into());
    }
    for (a, b) in &edges {
        if !vertices.contains(a) || !vertices.contains(b) {
            return Err(format!("edge {} -> {} uses an undeclared vertex", a, b));
        }
    }
    Ok(DotShape { clusters, vertices, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phsify_core::graph::{analyze, AnalyzeConfig};

    fn validate(dot: &str) -> Result<(usize, usize), String> {
        validate_dot(dot).map(|s| (s.clusters, s.edges.len()))
    }

    fn dot(src: &str) -> String {
        emit_dot(&analyze(src, &AnalyzeConfig::default()).unwrap().graph)
    }

    #[test]
    fn oscillator_has_one_cluster_and_one_dashed_vertex() {
        let d = dot("params a; vars x1, x2; dot x1 = x2; dot x2 = -x1 - a*x2;");
        assert_eq!(validate(&d).unwrap(), (1, 1));
        assert_eq!(d.matches("style=dashed, arrowhead").count(), 1);
    }

    #[test]
    fn fluid_shape() {
        let d = dot("params a, b, c, d, k, l, m; vars x1, x2, x3, x4;
dot x1 = x2; dot x2 = -b/a*x2 - c/a*x1 + d/a*x3; dot x3 = x4;
dot x4 = -k*(x3^2 - 1)*x4 - l*x3 + m*dot(x2);");
        let (clusters, edges) = validate(&d).unwrap();
        assert_eq!(clusters, 2);
        let coupling = d.lines().filter(|l| l.contains(" -> ") && l.contains("[label=")).count();
        assert_eq!(coupling, 2);
        assert!(d.contains("\"n0\" -> \"n1\"") && d.contains("\"n1\" -> \"n0\""));
        let dissipative = d.lines().filter(|l| l.contains("style=dashed, label=\"dissipative")).count();
        assert_eq!(dissipative, 2);
        assert_eq!(edges, coupling + 3);
    }

    #[test]
    fn validator_rejects_broken_documents() {
        assert!(validate("digraph { \"a\" -> \"b\"; }").is_err());
        assert!(validate("digraph { \"a\";").is_err());
        assert!(validate("digraph { \"a\"; \"b\"; \"a\" -> \"b\"; }").is_ok());
    }

    #[test]
    fn input_vertices_are_declared() {
        let d = dot("vars x; input u; dot x = -x + u;");
        validate(&d).unwrap();
        assert!(d.contains("\"input:u\" -> \"n0\""));
    }
}
