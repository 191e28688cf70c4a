//! The "phsify/1" JSON document: emission with sorted keys and loading back.

use std::collections::BTreeMap;

use phsify_core::graph::{
    DecoratedGraph, GraphEdge, GraphInput, GraphNode, GraphPort, Provenance, VirtualVertex, SCHEMA,
};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema `{0}`")]
    Schema(String),
    #[error("field `{0}` is missing or has the wrong type")]
    Field(String),
}

fn grid(g: &[Vec<String>]) -> Value {
    g.iter().map(|row| Value::from(row.clone())).collect()
}

pub fn to_value(g: &DecoratedGraph) -> Value {
    let inputs: Vec<Value> = g
        .inputs
        .iter()
        .map(|i| {
            let mut m = Map::new();
            m.insert("name".into(), i.name.clone().into());
            m.insert("kind".into(), i.kind.clone().into());
            m.insert("deps".into(), i.deps.clone().into());
            if let Some(s) = &i.stands_for {
                m.insert("stands_for".into(), s.clone().into());
            }
            Value::Object(m)
        })
        .collect();
    let nodes: Vec<Value> = g
        .nodes
        .iter()
        .map(|n| {
            json!({
                "id": n.id,
                "variables": n.variables,
                "family": n.family,
                "J": grid(&n.j),
                "H": n.h,
                "R": n.r.as_deref().map_or(Value::Null, grid),
                "positivity": n.positivity,
                "conditions": n.conditions,
                "internal_ports": n.internal_ports.iter().map(|p| json!({
                    "id": p.id, "equation": p.equation, "term": p.term, "kind": p.kind,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| {
            json!({
                "from": e.from, "to": e.to, "port": e.port, "coefficient": e.coefficient, "equation": e.equation,
            })
        })
        .collect();
    let vv: Vec<Value> = g
        .virtual_vertices
        .iter()
        .map(|v| json!({ "id": v.id, "node": v.node, "term": v.term, "kind": v.kind }))
        .collect();
    json!({
        "schema": g.schema,
        "variables": g.variables,
        "parameters": g.parameters,
        "inputs": inputs,
        "nodes": nodes,
        "edges": edges,
        "virtual_vertices": vv,
        "provenance": {
            "tool": g.provenance.tool,
            "config": g.provenance.config,
            "source_hash": g.provenance.source_hash,
        },
    })
}

/// Pretty-printed with sorted keys and a trailing newline; equal graphs give
/// equal bytes.
pub fn emit_json(g: &DecoratedGraph) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(g)).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, LoadError> {
    v.get(key).ok_or_else(|| LoadError::Field(key.into()))
}

fn string(v: &Value, key: &str) -> Result<String, LoadError> {
    field(v, key)?.as_str().map(str::to_owned).ok_or_else(|| LoadError::Field(key.into()))
}

fn opt_string(v: &Value, key: &str) -> Result<Option<String>, LoadError> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(LoadError::Field(key.into())),
    }
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>, LoadError> {
    let bad = || LoadError::Field(key.into());
    field(v, key)?
        .as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|s| s.as_str().map(str::to_owned).ok_or_else(bad))
        .collect()
}

fn string_grid(v: &Value, key: &str) -> Result<Vec<Vec<String>>, LoadError> {
    let bad = || LoadError::Field(key.into());
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| row.as_array().ok_or_else(bad)?.iter().map(|s| s.as_str().map(str::to_owned).ok_or_else(bad)).collect())
        .collect()
}

fn objects<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, LoadError> {
    field(v, key)?.as_array().ok_or_else(|| LoadError::Field(key.into()))
}

pub fn load_json(text: &str) -> Result<DecoratedGraph, LoadError> {
    let v: Value = serde_json::from_str(text)?;
    let schema = string(&v, "schema")?;
    if schema != SCHEMA {
        return Err(LoadError::Schema(schema));
    }
    let inputs = objects(&v, "inputs")?
        .iter()
        .map(|i| {
            Ok(GraphInput {
                name: string(i, "name")?,
                kind: string(i, "kind")?,
                deps: strings(i, "deps")?,
                stands_for: opt_string(i, "stands_for")?,
            })
        })
        .collect::<Result<_, LoadError>>()?;
    let nodes = objects(&v, "nodes")?
        .iter()
        .map(|n| {
            let r = match field(n, "R")? {
                Value::Null => None,
                g => Some(string_grid(g, "R")?),
            };
            let internal_ports = objects(n, "internal_ports")?
                .iter()
                .map(|p| {
                    Ok(GraphPort {
                        id: string(p, "id")?,
                        equation: string(p, "equation")?,
                        term: string(p, "term")?,
                        kind: string(p, "kind")?,
                    })
                })
                .collect::<Result<_, LoadError>>()?;
            Ok(GraphNode {
                id: string(n, "id")?,
                variables: strings(n, "variables")?,
                family: string(n, "family")?,
                j: string_grid(field(n, "J")?, "J")?,
                h: string(n, "H")?,
                r,
                positivity: opt_string(n, "positivity")?,
                conditions: strings(n, "conditions")?,
                internal_ports,
            })
        })
        .collect::<Result<_, LoadError>>()?;
    let edges = objects(&v, "edges")?
        .iter()
        .map(|e| {
            Ok(GraphEdge {
                from: string(e, "from")?,
                to: string(e, "to")?,
                port: string(e, "port")?,
                coefficient: string(e, "coefficient")?,
                equation: string(e, "equation")?,
            })
        })
        .collect::<Result<_, LoadError>>()?;
    let virtual_vertices = objects(&v, "virtual_vertices")?
        .iter()
        .map(|x| {
            Ok(VirtualVertex { id: string(x, "id")?, node: string(x, "node")?, term: string(x, "term")?, kind: string(x, "kind")? })
        })
        .collect::<Result<_, LoadError>>()?;
    let prov = field(&v, "provenance")?;
    let config = field(prov, "config")?
        .as_object()
        .ok_or_else(|| LoadError::Field("config".into()))?
        .iter()
        .map(|(k, val)| Ok((k.clone(), val.as_str().ok_or_else(|| LoadError::Field(k.clone()))?.to_owned())))
        .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
    Ok(DecoratedGraph {
        schema,
        variables: strings(&v, "variables")?,
        parameters: strings(&v, "parameters")?,
        inputs,
        nodes,
        edges,
        virtual_vertices,
        provenance: Provenance { tool: string(prov, "tool")?, config, source_hash: string(prov, "source_hash")? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phsify_core::graph::{analyze, AnalyzeConfig};

    fn graph(src: &str) -> DecoratedGraph {
        analyze(src, &AnalyzeConfig::default()).unwrap().graph
    }

    #[test]
    fn empty_system_document() {
        let g = graph("");
        let v = to_value(&g);
        assert_eq!(v["schema"], "phsify/1");
        assert_eq!(v["nodes"], json!([]));
        assert_eq!(v["edges"], json!([]));
        assert_eq!(load_json(&emit_json(&g)).unwrap(), g);
    }

    #[test]
    fn oscillator_document() {
        let text = emit_json(&graph("params a; vars x1, x2; dot x1 = x2; dot x2 = -x1 - a*x2;"));
        assert!(text.contains(r#""H": "1/2*x1^2 + 1/2*x2^2""#), "{}", text);
    }

    #[test]
    fn keys_are_sorted() {
        let text = emit_json(&graph("vars x; dot x = -x;"));
        let top: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \"") && !l.starts_with("    "))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn fluid_round_trip_is_byte_identical() {
        let src = "params a, b, c, d, k, l, m; vars x1, x2, x3, x4;
dot x1 = x2; dot x2 = -b/a*x2 - c/a*x1 + d/a*x3; dot x3 = x4;
dot x4 = -k*(x3^2 - 1)*x4 - l*x3 + m*dot(x2);";
        let once = emit_json(&graph(src));
        let twice = emit_json(&load_json(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn bad_documents() {
        assert!(matches!(load_json("{"), Err(LoadError::Syntax(_))));
        assert!(matches!(load_json(r#"{"schema": "other/2"}"#), Err(LoadError::Schema(_))));
        assert!(matches!(load_json(r#"{"schema": "phsify/1"}"#), Err(LoadError::Field(_))));
    }
}
