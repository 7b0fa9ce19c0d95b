//! JSON and DOT forms of H-graphs. Output lists records sorted by id.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{HGraph, PointedHGraph};
use crate::error::{Error, Result};
use crate::gog::{GbsGraph, OrientedEdge};
use crate::lattice::Lattice;

/// The graph of groups of an H-graph document: inline, or a path to a JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GogSource {
    Path(String),
    Inline(serde_json::Value),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    pub site: String,
    pub label: Lattice,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub src: String,
    pub trg: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HGraphDoc {
    pub gog: GogSource,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
}

impl HGraphDoc {
    /// Builds the graph; `resolve` loads a graph of groups given by path.
    pub fn into_graph(self, resolve: impl Fn(&str) -> Result<GbsGraph>) -> Result<(HGraph, Option<usize>)> {
        let gog = match self.gog {
            GogSource::Inline(v) => GbsGraph::from_value(v).map_err(|e| Error::Parse(e.to_string()))?,
            GogSource::Path(p) => resolve(&p)?,
        };
        let gog = Arc::new(gog);
        let mut h = HGraph::new(gog.clone());
        for v in self.vertices {
            let site = gog.vertex(&v.site)?;
            h.add_vertex(Some(v.id), site, v.label)?;
        }
        for e in self.edges {
            let ty = gog.edge(&e.ty)?;
            let (s, t) = (h.vertex_index(&e.src)?, h.vertex_index(&e.trg)?);
            h.add_edge(Some(e.id), ty, s, t)?;
        }
        let base = self.base.map(|b| h.vertex_index(&b)).transpose()?;
        Ok((h, base))
    }
}

impl HGraph {
    pub fn to_doc(&self, base: Option<usize>) -> HGraphDoc {
        let gog = self.gog();
        let mut vertices: Vec<VertexDoc> = self
            .vertices()
            .iter()
            .map(|v| VertexDoc { id: v.id.clone(), site: gog.vertex_id(v.site).to_string(), label: v.label.clone() })
            .collect();
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        let mut edges: Vec<EdgeDoc> = self
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                ty: gog.oriented_name(OrientedEdge::forward(e.ty)),
                src: self.vertex(e.src).id.clone(),
                trg: self.vertex(e.trg).id.clone(),
            })
            .collect();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        HGraphDoc { gog: GogSource::Inline(gog.to_value()), vertices, edges, base: base.map(|b| self.vertex(b).id.clone()) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc(None)).expect("H-graph serializes")
    }

    /// Parses a document with an inline graph of groups.
    pub fn from_json(s: &str) -> Result<HGraph> {
        let doc: HGraphDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(doc.into_graph(|p| Err(Error::Parse(format!("cannot resolve graph of groups `{p}`"))))?.0)
    }

    /// Graphviz rendering; vertex labels show the site and the lattice basis.
    pub fn export_dot(&self, base: Option<usize>) -> String {
        let doc = self.to_doc(base);
        let mut out = String::from("digraph hgraph {\n");
        for v in &doc.vertices {
            let cols: Vec<String> = v.label.basis_vectors().iter().map(|c| format!("({})", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))).collect();
            let shape = if doc.base.as_deref() == Some(v.id.as_str()) { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "  \"{}\" [label=\"{}\\n{}: <{}>\"{}];", v.id, v.id, v.site, cols.join(" "), shape);
        }
        for e in &doc.edges {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\", id=\"{}\"];", e.src, e.trg, e.ty, e.id);
        }
        out.push_str("}\n");
        out
    }
}

impl PointedHGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.graph.to_doc(Some(self.base))).expect("H-graph serializes")
    }

    pub fn from_json(s: &str) -> Result<PointedHGraph> {
        let doc: HGraphDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let (graph, base) = doc.into_graph(|p| Err(Error::Parse(format!("cannot resolve graph of groups `{p}`"))))?;
        let base = base.ok_or_else(|| Error::Parse("missing base vertex".into()))?;
        Ok(PointedHGraph { graph, base })
    }
}
