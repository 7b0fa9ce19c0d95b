//! Loading JSON inputs and parsing lattice flags.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gbs_core::hgraph::{GogSource, HGraphDoc};
use gbs_core::{Error, GbsGraph, HGraph, IntMatrix, Lattice};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn json_error(path: &Path, e: &serde_json::Error) -> CliError {
    if e.line() == 0 {
        CliError::parse(format!("{}: {e}", path.display()))
    } else {
        CliError::parse(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    }
}

pub fn load_gog(path: &Path) -> Result<Arc<GbsGraph>, CliError> {
    let text = read(path)?;
    GbsGraph::from_json(&text).map(Arc::new).map_err(|e| json_error(path, &e))
}

/// An H-graph document; a graph of groups given by path resolves relative to the document.
pub fn load_hgraph(path: &Path) -> Result<(HGraph, Option<usize>), CliError> {
    let text = read(path)?;
    let doc: HGraphDoc = serde_json::from_str(&text).map_err(|e| json_error(path, &e))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let gog_path = match &doc.gog {
        GogSource::Path(p) => Some(dir.join(p)),
        GogSource::Inline(_) => None,
    };
    let nested: RefCell<Option<CliError>> = RefCell::new(None);
    let out = doc.into_graph(|_| {
        let p: PathBuf = gog_path.clone().expect("path source");
        match load_gog(&p) {
            Ok(g) => Ok((*g).clone()),
            Err(e) => {
                let msg = e.message.clone();
                *nested.borrow_mut() = Some(e);
                Err(Error::Parse(msg))
            }
        }
    });
    match out {
        Ok(x) => Ok(x),
        Err(e) => Err(nested.into_inner().unwrap_or_else(|| CliError::from_core(&e))),
    }
}

/// `zero`, `full`, or a JSON matrix of `d` rows whose columns generate the lattice.
pub fn parse_lattice(flag: &str, text: &str, d: usize) -> Result<Lattice, CliError> {
    match text.trim() {
        "zero" | "0" => return Ok(Lattice::zero(d)),
        "full" | "Z" => return Ok(Lattice::full(d)),
        _ => {}
    }
    let rows: Vec<Vec<serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| CliError::parse(format!("--{flag}:{}:{}: {e}", e.line(), e.column())))?;
    if rows.len() != d {
        return Err(CliError::parse(format!("--{flag}: expected {d} rows, found {}", rows.len())));
    }
    if rows.iter().all(Vec::is_empty) {
        return Ok(Lattice::zero(d));
    }
    let m: IntMatrix = serde_json::from_str(text).map_err(|e| CliError::parse(format!("--{flag}: {e}")))?;
    Ok(Lattice::from_matrix(&m))
}

pub fn required<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| CliError::usage(format!("missing --{flag}")))
}
