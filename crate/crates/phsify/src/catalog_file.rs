//! User structures loaded from a JSON file:
//! `{"structures": [{"name": ..., "variables": [...], "J": [[...], ...]}]}`.
//! Entries are expressions in the listed variables.

use phsify_core::catalog::{CatalogError, Preset};
use phsify_core::odedsl::{parse_expression, ParseError};
use phsify_core::poly::PolyMatrix;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum CatalogFileError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("structure {index}: {message}")]
    Shape { index: usize, message: String },
    #[error("structure `{name}`, entry ({row}, {col}): {error}")]
    Entry { name: String, row: usize, col: usize, error: ParseError },
    #[error("structure `{name}`: {error}")]
    Invalid { name: String, error: CatalogError },
}

pub fn load_presets(text: &str) -> Result<Vec<Preset>, CatalogFileError> {
    let v: Value = serde_json::from_str(text)?;
    let shape = |index: usize, message: &str| CatalogFileError::Shape { index, message: message.into() };
    let list = v.get("structures").and_then(Value::as_array).ok_or_else(|| shape(0, "missing `structures` array"))?;
    let mut out = Vec::with_capacity(list.len());
    for (index, s) in list.iter().enumerate() {
        let name = s.get("name").and_then(Value::as_str).ok_or_else(|| shape(index, "missing `name`"))?.to_owned();
        let vars: Vec<String> = s
            .get("variables")
            .and_then(Value::as_array)
            .ok_or_else(|| shape(index, "missing `variables`"))?
            .iter()
            .map(|x| x.as_str().map(str::to_owned).ok_or_else(|| shape(index, "variable names must be strings")))
            .collect::<Result<_, _>>()?;
        let rows = s.get("J").and_then(Value::as_array).ok_or_else(|| shape(index, "missing `J`"))?;
        let m = vars.len();
        if rows.len() != m {
            return Err(shape(index, "`J` must have one row per variable"));
        }
        let mut grid = Vec::with_capacity(m);
        for (row, r) in rows.iter().enumerate() {
            let cells = r.as_array().filter(|c| c.len() == m).ok_or_else(|| shape(index, "`J` must be square"))?;
            let mut line = Vec::with_capacity(m);
            for (col, c) in cells.iter().enumerate() {
                let src = c.as_str().ok_or_else(|| shape(index, "entries must be strings"))?;
                let p = parse_expression(src, &vars, &[])
                    .map_err(|error| CatalogFileError::Entry { name: name.clone(), row, col, error })?;
                line.push(p);
            }
            grid.push(line);
        }
        let j = PolyMatrix::from_rows(m, grid);
        out.push(Preset::new(name.clone(), j).map_err(|error| CatalogFileError::Invalid { name, error })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_a_linear_bracket() {
        let text = r#"{"structures": [{"name": "e3", "variables": ["a", "b", "c"],
            "J": [["0", "c", "-b"], ["-c", "0", "a"], ["b", "-a", "0"]]}]}"#;
        let p = load_presets(text).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].name, "e3");
        assert!(p[0].j.is_skew());
    }

    #[test]
    fn rejects_bad_structures() {
        let not_skew = r#"{"structures": [{"name": "s", "variables": ["a", "b"], "J": [["0", "1"], ["1", "0"]]}]}"#;
        assert!(matches!(load_presets(not_skew), Err(CatalogFileError::Invalid { error: CatalogError::NotSkew, .. })));
        let jacobi = r#"{"structures": [{"name": "bad", "variables": ["a", "b", "c"],
            "J": [["0", "-c + a", "b"], ["c - a", "0", "-a"], ["-b", "a", "0"]]}]}"#;
        assert!(matches!(load_presets(jacobi), Err(CatalogFileError::Invalid { error: CatalogError::Jacobi(_), .. })));
        let unknown = r#"{"structures": [{"name": "u", "variables": ["a", "b"], "J": [["0", "z"], ["-z", "0"]]}]}"#;
        assert!(matches!(load_presets(unknown), Err(CatalogFileError::Entry { .. })));
        assert!(matches!(load_presets(r#"{"structures": [{"name": "x"}]}"#), Err(CatalogFileError::Shape { .. })));
    }
}
