//! The decorated graph: the full pipeline from `.ode` text to nodes, ports
//! and edges, and an independent check of the reconstruction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::random_rational;
use crate::decomposer::{decorate_node, DecomposeConfig, DecomposeError, Decoration, FitReport, NodeField, PortKind, Positivity};
use crate::depgraph::{build_dependency, partition, split_terms, DepGraph, Partition, PartitionConfig, PartitionError};
use crate::odedsl::{input_display_names, parse, parse_expression, resolve_dot_references, DotMode, InputKind, OdeSystem, ParseError};
use crate::param::ParamScalar;
use crate::poly::{KernelError, Monomial, Polynomial};
use crate::render::{polynomial, scalar, Symbols};
use crate::Rational;

pub const SCHEMA: &str = "phsify/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphInput {
    pub name: String,
    /// `declared` or `aux`.
    pub kind: String,
    pub deps: Vec<String>,
    /// For auxiliary inputs, the derivative expression they stand for.
    pub stands_for: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPort {
    pub id: String,
    pub equation: String,
    pub term: String,
    /// `dissipative` or `generic`.
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphNode {
    pub id: String,
    pub variables: Vec<String>,
    pub family: String,
    pub j: Vec<Vec<String>>,
    pub h: String,
    pub r: Option<Vec<Vec<String>>>,
    /// `zero`, `nonnegative`, `indefinite` or `conditional`.
    pub positivity: Option<String>,
    pub conditions: Vec<String>,
    pub internal_ports: Vec<GraphPort>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    /// Node id, or `input:<name>` for a declared input.
    pub from: String,
    pub to: String,
    pub port: String,
    pub coefficient: String,
    pub equation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualVertex {
    pub id: String,
    pub node: String,
    pub term: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub tool: String,
    pub config: BTreeMap<String, String>,
    pub source_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedGraph {
    pub schema: String,
    pub variables: Vec<String>,
    pub parameters: Vec<String>,
    pub inputs: Vec<GraphInput>,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub virtual_vertices: Vec<VirtualVertex>,
    pub provenance: Provenance,
}

/// A term pinned out of the Hamiltonian fit, written as the equation's
/// variable and the monomial (coefficient ignored).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pin {
    pub equation: String,
    pub term: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzeConfig {
    pub dot_mode: DotMode,
    pub partition: PartitionConfig,
    pub decompose: DecomposeConfig,
    pub pins: Vec<Pin>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            dot_mode: DotMode::Aux,
            partition: PartitionConfig::default(),
            decompose: DecomposeConfig::default(),
            pins: Vec::new(),
        }
    }
}

impl AnalyzeConfig {
    /// Knob values recorded in the output.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("dot_mode".into(), dot_mode_name(self.dot_mode).into());
        m.insert("max_node".into(), self.partition.max_block.to_string());
        m.insert("lambda".into(), self.partition.lambda.to_string());
        m.insert("even_bonus".into(), self.partition.even_bonus.to_string());
        m.insert(
            "max_degree".into(),
            self.decompose.max_degree.map_or_else(|| "auto".to_string(), |d| d.to_string()),
        );
        let ansatz: Vec<&str> = self.decompose.ansatz.iter().map(|a| a.name()).collect();
        m.insert("ansatz".into(), ansatz.join(","));
        let presets: Vec<&str> = self.decompose.catalog.presets.iter().map(|p| p.name.as_str()).collect();
        m.insert("presets".into(), presets.join(","));
        let pins: Vec<String> = self.pins.iter().map(|p| format!("{}:{}", p.equation, p.term)).collect();
        m.insert("pins".into(), pins.join(";"));
        m
    }
}

pub fn dot_mode_name(m: DotMode) -> &'static str {
    match m {
        DotMode::Aux => "aux",
        DotMode::Substitute => "substitute",
    }
}

pub fn dot_mode_from_name(s: &str) -> Option<DotMode> {
    match s {
        "aux" => Some(DotMode::Aux),
        "substitute" => Some(DotMode::Substitute),
        _ => None,
    }
}

/// A failure, tagged with the pipeline stage it came from.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzeError {
    #[error("parse: {0}")]
    Parse(ParseError),
    #[error("resolve: {0}")]
    Resolve(ParseError),
    #[error("pin: {0}")]
    Pin(String),
    #[error("partition: {0}")]
    Partition(PartitionError),
    #[error("decompose {node}: {error}")]
    Decompose { node: String, error: DecomposeError },
}


/// Everything up to the per-node decoration.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub system: OdeSystem,
    pub dependency: DepGraph,
    pub partition: Partition,
    pub fields: Vec<NodeField>,
}

fn resolve_pins(sys: &OdeSystem, pins: &[Pin]) -> Result<Vec<(usize, Monomial)>, AnalyzeError> {
    let names = sys.ambient_names();
    pins.iter()
        .map(|p| {
            let eq = sys
                .variables
                .iter()
                .position(|v| *v == p.equation)
                .ok_or_else(|| AnalyzeError::Pin(format!("`{}` is not a variable", p.equation)))?;
            let poly = parse_expression(&p.term, &names, &sys.parameters)
                .map_err(|e| AnalyzeError::Pin(format!("{}: {}", p.term, e)))?;
            let mono = match poly.len() {
                1 => poly.monomials().next().unwrap().clone(),
                _ => return Err(AnalyzeError::Pin(format!("`{}` is not a single term", p.term))),
            };
            Ok((eq, mono))
        })
        .collect()
}

/// Parses, resolves derivative references, partitions and splits terms.
pub fn prepare(source: &str, cfg: &AnalyzeConfig) -> Result<Prepared, AnalyzeError> {
    let raw = parse(source).map_err(AnalyzeError::Parse)?;
    prepare_system(&raw, cfg)
}

pub fn prepare_system(raw: &OdeSystem, cfg: &AnalyzeConfig) -> Result<Prepared, AnalyzeError> {
    let system = resolve_dot_references(raw, cfg.dot_mode).map_err(AnalyzeError::Resolve)?;
    let pins = resolve_pins(&system, &cfg.pins)?;
    let dependency = build_dependency(&system);
    let part = if system.dim() == 0 {
        Partition::new(Vec::new())
    } else {
        partition(&dependency, &cfg.partition).map_err(AnalyzeError::Partition)?
    };
    let split = split_terms(&system, &part);
    let fields = part
        .blocks()
        .iter()
        .zip(&split.blocks)
        .map(|(b, t)| NodeField::new(&system, b, t, &pins))
        .collect();
    Ok(Prepared { system, dependency, partition: part, fields })
}

pub fn node_id(k: usize) -> String {
    format!("n{}", k)
}

pub fn decorate_all(p: &Prepared, cfg: &AnalyzeConfig) -> Result<Vec<Decoration>, AnalyzeError> {
    p.fields
        .iter()
        .enumerate()
        .map(|(k, nf)| {
            decorate_node(nf, &cfg.decompose, p.system.ambient())
                .map_err(|error| AnalyzeError::Decompose { node: node_id(k), error })
        })
        .collect()
}

/// Result of [`analyze`], keeping the structured pieces next to the graph.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub graph: DecoratedGraph,
    pub prepared: Prepared,
    pub decorations: Vec<Decoration>,
}

impl Analysis {
    pub fn reports(&self) -> impl Iterator<Item = (String, &FitReport)> {
        self.decorations.iter().enumerate().flat_map(|(k, d)| d.reports.iter().map(move |r| (node_id(k), r)))
    }
}

pub fn analyze(source: &str, cfg: &AnalyzeConfig) -> Result<Analysis, AnalyzeError> {
    let prepared = prepare(source, cfg)?;
    let decorations = decorate_all(&prepared, cfg)?;
    let graph = assemble(&prepared, &decorations, cfg);
    Ok(Analysis { graph, prepared, decorations })
}

fn positivity_name(p: &Positivity) -> &'static str {
    match p {
        Positivity::Zero => "zero",
        Positivity::NonNegative => "nonnegative",
        Positivity::Indefinite => "indefinite",
        Positivity::Conditional { .. } => "conditional",
    }
}

fn kind_name(k: PortKind) -> &'static str {
    match k {
        PortKind::Dissipative => "dissipative",
        PortKind::Generic => "generic",
    }
}

/// Builds the string-level graph from decorated nodes.
pub fn assemble(p: &Prepared, decorations: &[Decoration], cfg: &AnalyzeConfig) -> DecoratedGraph {
    let sys = &p.system;
    let ambient = sys.ambient();
    let names = sys.ambient_names();
    let sym = Symbols::new(&names, &sys.parameters);
    let show = |q: &Polynomial| polynomial(q, sym);
    let mono = |m: &Monomial| polynomial(&Polynomial::term(m.clone(), ParamScalar::one()), sym);
    let display = input_display_names(sys);

    let inputs = sys
        .inputs
        .iter()
        .zip(&display)
        .map(|(inp, disp)| GraphInput {
            name: inp.name.clone(),
            kind: if inp.kind == InputKind::Declared { "declared" } else { "aux" }.into(),
            deps: inp.deps.iter().map(|&d| sys.variables[d].clone()).collect(),
            stands_for: (inp.kind != InputKind::Declared).then(|| disp.strip_prefix('(').and_then(|d| d.strip_suffix(')')).unwrap_or(disp).into()),
        })
        .collect();

    let owner = p.partition.labels();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut virtual_vertices = Vec::new();
    for (k, d) in decorations.iter().enumerate() {
        let id = node_id(k);
        let nf = &p.fields[k];
        let lift = |q: &Polynomial| nf.lift(q, ambient);
        let m = d.block.len();
        let j = (0..m).map(|a| (0..m).map(|b| show(&lift(d.structure.j.get(a, b)))).collect()).collect();
        let (r, positivity, conditions) = match &d.dissipation {
            Some((r, pos)) => {
                let grid = r.iter().map(|row| row.iter().map(|c| scalar(c, &sys.parameters)).collect()).collect();
                let conds = match pos {
                    Positivity::Conditional { minors } => {
                        minors.iter().map(|c| format!("{} >= 0", scalar(c, &sys.parameters))).collect()
                    }
                    _ => Vec::new(),
                };
                (Some(grid), Some(positivity_name(pos).to_string()), conds)
            }
            None => (None, None, Vec::new()),
        };
        let mut internal_ports = Vec::new();
        for (i, port) in d.ports.iter().enumerate() {
            let pid = format!("{}.p{}", id, i);
            let term = show(&port.term);
            internal_ports.push(GraphPort {
                id: pid.clone(),
                equation: sys.variables[d.block[port.equation]].clone(),
                term: term.clone(),
                kind: kind_name(port.kind).into(),
            });
            virtual_vertices.push(VirtualVertex { id: pid, node: id.clone(), term, kind: kind_name(port.kind).into() });
        }
        for (uk, u) in d.coupling.u.iter().enumerate() {
            let from = edge_source(sys, &d.block, &owner, u);
            for (eq, row) in d.coupling.w.iter().enumerate() {
                if row[uk].is_zero() {
                    continue;
                }
                edges.push(GraphEdge {
                    from: from.clone(),
                    to: id.clone(),
                    port: mono(u),
                    coefficient: scalar(&row[uk], &sys.parameters),
                    equation: sys.variables[d.block[eq]].clone(),
                });
            }
        }
        nodes.push(GraphNode {
            id,
            variables: d.block.iter().map(|&v| sys.variables[v].clone()).collect(),
            family: d.structure.family.tag(),
            j,
            h: show(&lift(&d.hamiltonian)),
            r,
            positivity,
            conditions,
            internal_ports,
        });
    }
    DecoratedGraph {
        schema: SCHEMA.into(),
        variables: sys.variables.clone(),
        parameters: sys.parameters.clone(),
        inputs,
        nodes,
        edges,
        virtual_vertices,
        provenance: Provenance {
            tool: format!("phsify {}", env!("CARGO_PKG_VERSION")),
            config: cfg.echo(),
            source_hash: String::new(),
        },
    }
}

/// Declared inputs feed from their input vertex; anything else from the
/// node owning the lowest foreign variable it depends on.
fn edge_source(sys: &OdeSystem, block: &[usize], owner: &[usize], u: &Monomial) -> String {
    let n = sys.dim();
    if let Some(i) = u.support().find(|&i| i >= n && sys.inputs[i - n].kind == InputKind::Declared) {
        return format!("input:{}", sys.inputs[i - n].name);
    }
    let foreign = sys.expanded_support(u).into_iter().find(|v| block.binary_search(v).is_err());
    match foreign {
        Some(v) => node_id(owner[v]),
        None => node_id(owner[block[0]]),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub symbolic_identity: bool,
    pub sampled_points_checked: usize,
    pub max_abs_discrepancy: Rational,
    /// Equations whose reconstruction differs, with a reason.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("source: {0}")]
    Parse(ParseError),
    /// An expression string in the graph did not re-parse.
    #[error("{context}: {error}")]
    Expression { context: String, error: ParseError },
    #[error("{0}")]
    Mismatch(String),
}


pub const SAMPLE_POINTS: usize = 20;

/// Rebuilds every right-hand side from the graph's strings alone and
/// compares with the source, symbolically and at random rational points.
pub fn verify(source: &str, g: &DecoratedGraph) -> Result<VerifyReport, VerifyError> {
    let raw = parse(source).map_err(VerifyError::Parse)?;
    let mode = g.provenance.config.get("dot_mode").and_then(|s| dot_mode_from_name(s)).unwrap_or_default();
    let sys = resolve_dot_references(&raw, mode).map_err(VerifyError::Parse)?;
    if sys.variables != g.variables {
        return Err(VerifyError::Mismatch("graph variables differ from the source".into()));
    }
    if sys.parameters != g.parameters {
        return Err(VerifyError::Mismatch("graph parameters differ from the source".into()));
    }
    let names = sys.ambient_names();
    let graph_inputs: Vec<&str> = g.inputs.iter().map(|i| i.name.as_str()).collect();
    let sys_inputs: Vec<&str> = sys.inputs.iter().map(|i| i.name.as_str()).collect();
    if graph_inputs != sys_inputs {
        return Err(VerifyError::Mismatch("graph inputs differ from the resolved source".into()));
    }
    let ambient = sys.ambient();
    let expr = |s: &str, context: &str| {
        parse_expression(s, &names, &sys.parameters).map_err(|error| VerifyError::Expression { context: context.into(), error })
    };
    let var_index = |name: &str| {
        sys.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| VerifyError::Mismatch(format!("unknown variable `{}`", name)))
    };

    let mut owner: Vec<Option<usize>> = vec![None; sys.dim()];
    for (k, node) in g.nodes.iter().enumerate() {
        for v in &node.variables {
            let i = var_index(v)?;
            if owner[i].replace(k).is_some() {
                return Err(VerifyError::Mismatch(format!("`{}` belongs to two nodes", v)));
            }
        }
    }
    if owner.iter().any(|o| o.is_none()) {
        return Err(VerifyError::Mismatch("node variables do not cover the system".into()));
    }
    let node_ids: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();

    let mut rebuilt = vec![Polynomial::zero(ambient); sys.dim()];
    let mut violations = Vec::new();
    for node in &g.nodes {
        let ctx = |what: &str| format!("node {} {}", node.id, what);
        let vars: Vec<usize> = node.variables.iter().map(|v| var_index(v)).collect::<Result<_, _>>()?;
        let m = vars.len();
        if node.j.len() != m || node.j.iter().any(|r| r.len() != m) {
            return Err(VerifyError::Mismatch(ctx("J has the wrong shape")));
        }
        let h = expr(&node.h, &ctx("H"))?;
        let grad: Vec<Polynomial> = vars.iter().map(|&v| h.diff(v).expect("variable in range")).collect();
        let mut jm = vec![vec![Polynomial::zero(ambient); m]; m];
        for a in 0..m {
            for b in 0..m {
                jm[a][b] = expr(&node.j[a][b], &ctx("J"))?;
            }
        }
        for a in 0..m {
            for b in 0..m {
                if !jm[a][b].add(&jm[b][a]).is_zero() {
                    violations.push(format!("{}: J is not skew-symmetric", node.id));
                }
            }
        }
        let r: Option<Vec<Vec<Polynomial>>> = match &node.r {
            Some(grid) => {
                if grid.len() != m || grid.iter().any(|row| row.len() != m) {
                    return Err(VerifyError::Mismatch(ctx("R has the wrong shape")));
                }
                Some(grid.iter().map(|row| row.iter().map(|s| expr(s, &ctx("R"))).collect::<Result<_, _>>()).collect::<Result<_, _>>()?)
            }
            None => None,
        };
        let mut dissipative = vec![Polynomial::zero(ambient); m];
        for a in 0..m {
            let mut row = Polynomial::zero(ambient);
            for b in 0..m {
                row = row.add(&jm[a][b].mul(&grad[b]));
                if let Some(r) = &r {
                    let t = r[a][b].mul(&grad[b]);
                    row = row.sub(&t);
                    dissipative[a] = dissipative[a].sub(&t);
                }
            }
            rebuilt[vars[a]] = rebuilt[vars[a]].add(&row);
        }
        let mut declared = vec![Polynomial::zero(ambient); m];
        for port in &node.internal_ports {
            let eq = var_index(&port.equation)?;
            let Some(a) = vars.iter().position(|&v| v == eq) else {
                return Err(VerifyError::Mismatch(format!("port {} targets a foreign equation", port.id)));
            };
            let t = expr(&port.term, &format!("port {}", port.id))?;
            match port.kind.as_str() {
                "generic" => rebuilt[eq] = rebuilt[eq].add(&t),
                "dissipative" => declared[a] = declared[a].add(&t),
                other => return Err(VerifyError::Mismatch(format!("port {} has unknown kind `{}`", port.id, other))),
            }
        }
        for a in 0..m {
            if declared[a] != dissipative[a] {
                violations.push(format!("{}: dissipative ports differ from -R grad H", node.variables[a]));
            }
        }
    }
    for e in &g.edges {
        if !node_ids.contains(&e.to.as_str()) {
            return Err(VerifyError::Mismatch(format!("edge target `{}` is not a node", e.to)));
        }
        let from_ok = node_ids.contains(&e.from.as_str())
            || e.from.strip_prefix("input:").is_some_and(|i| sys.inputs.iter().any(|x| x.name == i));
        if !from_ok {
            return Err(VerifyError::Mismatch(format!("edge source `{}` does not exist", e.from)));
        }
        let eq = var_index(&e.equation)?;
        let port = expr(&e.port, "edge port")?;
        let coef = expr(&e.coefficient, "edge coefficient")?;
        if !coef.is_constant() {
            return Err(VerifyError::Mismatch(format!("edge coefficient `{}` is not constant", e.coefficient)));
        }
        rebuilt[eq] = rebuilt[eq].add(&port.mul(&coef));
    }

    let mut symbolic = true;
    for (i, want) in sys.rhs.iter().enumerate() {
        if &rebuilt[i] != want {
            symbolic = false;
            violations.push(format!("equation for {} differs", sys.variables[i]));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    let mut worst = Rational::zero();
    let mut attempts = 0;
    while checked < SAMPLE_POINTS && attempts < 50 * SAMPLE_POINTS {
        attempts += 1;
        let point: Vec<Rational> = (0..ambient).map(|_| random_rational(&mut rng)).collect();
        let params: Vec<Option<Rational>> = (0..sys.parameters.len()).map(|_| Some(random_rational(&mut rng))).collect();
        let mut diffs = Vec::with_capacity(sys.dim());
        let mut ok = true;
        for (want, got) in sys.rhs.iter().zip(&rebuilt) {
            match (want.evaluate(&point, &params), got.evaluate(&point, &params)) {
                (Ok(a), Ok(b)) => diffs.push((a - b).abs()),
                (Err(KernelError::VanishingDenominator), _) | (_, Err(KernelError::VanishingDenominator)) => {
                    ok = false;
                    break;
                }
                (Err(e), _) | (_, Err(e)) => return Err(VerifyError::Mismatch(format!("evaluation failed: {}", e))),
            }
        }
        if !ok {
            continue;
        }
        checked += 1;
        for d in diffs {
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(VerifyReport {
        symbolic_identity: symbolic && violations.is_empty(),
        sampled_points_checked: checked,
        max_abs_discrepancy: worst,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OSC: &str = "params a; vars x1, x2; dot x1 = x2; dot x2 = -x1 - a*x2;";
    const FLUID: &str = "params a, b, c, d, k, l, m;
vars x1, x2, x3, x4;
dot x1 = x2;
dot x2 = -b/a*x2 - c/a*x1 + d/a*x3;
dot x3 = x4;
dot x4 = -k*(x3^2 - 1)*x4 - l*x3 + m*dot(x2);
";
    const RIGID: &str = "params I1, I2, I3; vars M1, M2, M3; input N1; input N2; input N3;
dot M1 = (I2 - I3)/(I2*I3)*M2*M3 + N1;
dot M2 = (I3 - I1)/(I3*I1)*M3*M1 + N2;
dot M3 = (I1 - I2)/(I1*I2)*M1*M2 + N3;";

    fn run(src: &str) -> DecoratedGraph {
        analyze(src, &AnalyzeConfig::default()).unwrap().graph
    }

    #[test]
    fn oscillator_graph() {
        let g = run(OSC);
        assert_eq!(g.nodes.len(), 1);
        let n = &g.nodes[0];
        assert_eq!(n.j, vec![vec!["0", "1"], vec!["-1", "0"]]);
        assert_eq!(n.h, "1/2*x1^2 + 1/2*x2^2");
        assert_eq!(n.r, Some(vec![vec!["0".to_string(), "0".into()], vec!["0".into(), "a".into()]]));
        assert_eq!(n.conditions, ["a >= 0"]);
        assert_eq!(g.virtual_vertices.len(), 1);
        assert_eq!(g.virtual_vertices[0].kind, "dissipative");
        assert_eq!(g.virtual_vertices[0].term, "-a*x2");
        assert!(g.edges.is_empty());
        assert!(verify(OSC, &g).unwrap().symbolic_identity);
    }

    #[test]
    fn fluid_graph() {
        let g = run(FLUID);
        let vars: Vec<Vec<String>> = g.nodes.iter().map(|n| n.variables.clone()).collect();
        assert_eq!(vars, [["x1", "x2"], ["x3", "x4"]]);
        let e: Vec<(&str, &str, &str, &str, &str)> = g
            .edges
            .iter()
            .map(|e| (e.from.as_str(), e.to.as_str(), e.port.as_str(), e.coefficient.as_str(), e.equation.as_str()))
            .collect();
        assert_eq!(e, [("n1", "n0", "x3", "d/a", "x2"), ("n0", "n1", "u", "1", "x4")]);
        assert_eq!(g.inputs[0].stands_for.as_deref(), Some("m*dot(x2)"));
        let kinds: Vec<&str> = g.virtual_vertices.iter().map(|v| v.kind.as_str()).collect();
        assert_eq!(kinds, ["dissipative", "dissipative", "generic"]);
        let rep = verify(FLUID, &g).unwrap();
        assert!(rep.symbolic_identity, "{:?}", rep.violations);
        assert_eq!(rep.sampled_points_checked, SAMPLE_POINTS);
        assert!(rep.max_abs_discrepancy.is_zero());
    }

    #[test]
    fn rigid_body_graph() {
        let g = run(RIGID);
        assert_eq!(g.nodes[0].family, "linear_poisson:so3");
        assert_eq!(g.nodes[0].h, "1/(2*I1)*M1^2 + 1/(2*I2)*M2^2 + 1/(2*I3)*M3^2");
        let from: Vec<&str> = g.edges.iter().map(|e| e.from.as_str()).collect();
        assert_eq!(from, ["input:N1", "input:N2", "input:N3"]);
        assert!(verify(RIGID, &g).unwrap().symbolic_identity);
    }

    #[test]
    fn corrupted_hamiltonian_is_caught() {
        let mut g = run(OSC);
        g.nodes[0].h = "1/2*x1^2 + x2^2".into();
        let rep = verify(OSC, &g).unwrap();
        assert!(!rep.symbolic_identity);
        assert!(rep.violations.iter().any(|v| v.contains("x2")));
        assert!(rep.max_abs_discrepancy > Rational::zero());
    }

    #[test]
    fn zero_coefficient_edge_is_neutral() {
        let mut g = run(OSC);
        g.edges.push(GraphEdge { from: "n0".into(), to: "n0".into(), port: "x1".into(), coefficient: "0".into(), equation: "x2".into() });
        assert!(verify(OSC, &g).unwrap().symbolic_identity);
    }

    #[test]
    fn empty_system() {
        let g = run("");
        assert!(g.nodes.is_empty() && g.edges.is_empty());
        assert!(verify("", &g).unwrap().symbolic_identity);
    }

    #[test]
    fn stage_tags() {
        let e = analyze("vars x; dot x = ;", &AnalyzeConfig::default()).unwrap_err();
        assert!(e.to_string().starts_with("parse: "));
        let cfg = AnalyzeConfig { pins: vec![Pin { equation: "y".into(), term: "x".into() }], ..Default::default() };
        assert!(analyze("vars x; dot x = x;", &cfg).unwrap_err().to_string().starts_with("pin: "));
    }

    #[test]
    fn substitute_mode_round_trips() {
        let cfg = AnalyzeConfig { dot_mode: DotMode::Substitute, ..Default::default() };
        let g = analyze(FLUID, &cfg).unwrap().graph;
        assert!(g.inputs.is_empty());
        assert!(verify(FLUID, &g).unwrap().symbolic_identity);
    }
}
