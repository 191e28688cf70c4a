//! JSON form of a generator's ground truth, written next to the `.ode` file.

use phsify_core::generator::GroundTruth;
use phsify_core::odedsl::OdeSystem;
use phsify_core::render::{polynomial, scalar, Symbols};
use serde_json::{json, Value};

pub fn truth_value(sys: &OdeSystem, t: &GroundTruth) -> Value {
    let nodes: Vec<Value> = t
        .partition
        .blocks()
        .iter()
        .zip(&t.nodes)
        .enumerate()
        .map(|(k, (block, n))| {
            let names: Vec<String> = block.iter().map(|&v| sys.variables[v].clone()).collect();
            let sym = Symbols::new(&names, &sys.parameters);
            let m = block.len();
            let j: Vec<Vec<String>> =
                (0..m).map(|a| (0..m).map(|b| polynomial(n.j.get(a, b), sym)).collect()).collect();
            let r = n.r.as_ref().map(|r| {
                r.iter().map(|row| row.iter().map(|c| scalar(c, &sys.parameters)).collect::<Vec<_>>()).collect::<Vec<_>>()
            });
            json!({ "id": format!("n{}", k), "variables": names, "J": j, "H": polynomial(&n.h, sym), "R": r })
        })
        .collect();
    let edges: Vec<Value> = t.edges.iter().map(|&(a, b)| json!([format!("n{}", a), format!("n{}", b)])).collect();
    json!({ "nodes": nodes, "edges": edges })
}
