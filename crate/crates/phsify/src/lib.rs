//! Command-line front end: the analysis pipeline with per-node threads, JSON
//! and DOT emission, and loading of user catalog files.

pub mod catalog_file;
pub mod dot;
pub mod json;
pub mod truth;

use std::fmt::Write;
use std::thread;

use phsify_core::decomposer::decorate_node;
use phsify_core::graph::{assemble, node_id, prepare, Analysis, AnalyzeConfig, AnalyzeError};
use sha2::{Digest, Sha256};

pub fn source_hash(source: &str) -> String {
    Sha256::digest(source.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{:02x}", b).unwrap();
        s
    })
}

/// Same result as the sequential pipeline, with each node decorated on its
/// own thread. The first failing node (by id) is reported.
pub fn analyze_source(source: &str, cfg: &AnalyzeConfig) -> Result<Analysis, AnalyzeError> {
    let prepared = prepare(source, cfg)?;
    let ambient = prepared.system.ambient();
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = prepared
            .fields
            .iter()
            .map(|nf| s.spawn(move || decorate_node(nf, &cfg.decompose, ambient)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("decoration thread panicked")).collect()
    });
    let decorations = results
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.map_err(|error| AnalyzeError::Decompose { node: node_id(k), error }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut graph = assemble(&prepared, &decorations, cfg);
    graph.provenance.source_hash = source_hash(source);
    Ok(Analysis { graph, prepared, decorations })
}

/// One line per fit attempt, grouped by node.
pub fn explain(a: &Analysis) -> String {
    let mut out = String::new();
    for (node, r) in a.reports() {
        writeln!(
            out,
            "{} candidate={} degree={} rank={} matched={} residual={} exact={}",
            node, r.candidate, r.degree, r.image_rank, r.matched, r.residual, r.exact
        )
        .unwrap();
    }
    out
}
