//! Lattice-labelled graphs over a GBS graph of groups.
//!
//! An H-graph vertex sits over a vertex ("site") of the graph of groups and
//! carries a lattice; an H-edge has the type of a graph-of-groups edge and is
//! stored in that edge's forward orientation. A graph is valid when every edge
//! satisfies the transfer equation
//! `M_src^-1 L_src ∩ Z^d = M_trg^-1 L_trg ∩ Z^d` and no vertex carries more
//! edges of an oriented type `e` than `|Z^d / (L + M_src(e) Z^d)|`.

mod construct;
mod io;
mod path;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gog::{GbsGraph, OrientedEdge};
use crate::lattice::Lattice;

pub use construct::{build_cycle_witness, merge_same_phenotype, MergeOutcome, MergeReport};
pub use io::{GogSource, HGraphDoc};
pub use path::{find_equiv_path, find_path, prefix_with, suffix_with, turnaround_excursion, HPath, PathStep, SearchOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVertex {
    pub id: String,
    pub site: usize,
    pub label: Lattice,
}

/// Stored in the forward orientation of its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HEdge {
    pub id: String,
    pub ty: usize,
    pub src: usize,
    pub trg: usize,
}

#[derive(Clone)]
pub struct HGraph {
    gog: Arc<GbsGraph>,
    vertices: Vec<HVertex>,
    edges: Vec<HEdge>,
    incidence: Vec<Vec<usize>>,
    vertex_ids: HashMap<String, usize>,
    edge_ids: HashSet<String>,
    next_vertex: usize,
    next_edge: usize,
}

/// An H-graph with a distinguished base vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedHGraph {
    pub graph: HGraph,
    pub base: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HViolation {
    InvalidGog { message: String },
    LabelDimension { vertex: String },
    SiteMismatch { edge: String },
    Transfer { edge: String },
    Multiplicity { vertex: String, edge_type: String, count: usize, bound: String },
}

impl fmt::Display for HViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HViolation::InvalidGog { message } => write!(f, "graph of groups: {message}"),
            HViolation::LabelDimension { vertex } => write!(f, "vertex {vertex}: label has the wrong dimension"),
            HViolation::SiteMismatch { edge } => write!(f, "edge {edge}: endpoints sit at the wrong sites"),
            HViolation::Transfer { edge } => write!(f, "edge {edge}: transfer equation fails"),
            HViolation::Multiplicity { vertex, edge_type, count, bound } => {
                write!(f, "vertex {vertex}: {count} edges of type {edge_type}, bound {bound}")
            }
        }
    }
}

/// A vertex that admits `residual` more edges of oriented type `edge`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deficiency {
    pub vertex: usize,
    pub edge: OrientedEdge,
    pub residual: usize,
}

/// Where [`HGraph::attach_edge`] sends the new edge.
#[derive(Clone, Debug)]
pub enum AttachTarget {
    Existing(usize),
    /// New vertex; `None` uses the minimal label [`propagate_label`].
    New(Option<Lattice>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureOutcome {
    Finite,
    /// Number of vertices added at each depth, in order.
    NotClosed { frontier_sizes: Vec<usize>, truncated: bool },
}

#[derive(Clone, Debug)]
pub struct SaturationRun {
    pub graph: HGraph,
    pub frontier_sizes: Vec<usize>,
    /// No deficiency left.
    pub saturated: bool,
    /// Stopped because of the vertex cap.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SaturateOptions {
    pub depth: usize,
    pub max_vertices: usize,
    pub exec: Exec,
}

impl SaturateOptions {
    pub fn depth(depth: usize) -> Self {
        SaturateOptions { depth, max_vertices: usize::MAX, exec: Exec::default() }
    }
}

/// `M_trg(e) (M_src(e)^-1 L ∩ Z^d)`: the smallest label across `e` from `L`.
pub fn propagate_label(gog: &GbsGraph, e: OrientedEdge, l: &Lattice) -> Result<Lattice> {
    l.preimage(gog.m_src(e))?.image(gog.m_trg(e))
}

pub fn check_transfer(gog: &GbsGraph, e: OrientedEdge, l0: &Lattice, l1: &Lattice) -> Result<bool> {
    Ok(l0.preimage(gog.m_src(e))? == l1.preimage(gog.m_trg(e))?)
}

/// Number of edges of type `e` a vertex labelled `l` may carry.
pub fn multiplicity_bound(gog: &GbsGraph, e: OrientedEdge, l: &Lattice) -> Result<BigInt> {
    l.join_index(gog.m_src(e))
}

pub(crate) fn to_count(x: &BigInt) -> Result<usize> {
    x.to_usize().ok_or_else(|| Error::InvalidArgument(format!("multiplicity {x} is too large")))
}

impl fmt::Debug for HGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HGraph").field("vertices", &self.vertices).field("edges", &self.edges).finish()
    }
}

/// Equality up to storage order: same graph of groups and the same id-keyed records.
impl PartialEq for HGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.gog != other.gog || self.vertices.len() != other.vertices.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        let key = |g: &HGraph| {
            let mut vs: Vec<_> = g.vertices.iter().map(|v| (v.id.clone(), v.site, v.label.clone())).collect();
            let mut es: Vec<_> =
                g.edges.iter().map(|e| (e.id.clone(), e.ty, g.vertices[e.src].id.clone(), g.vertices[e.trg].id.clone())).collect();
            vs.sort_by(|a, b| a.0.cmp(&b.0));
            es.sort();
            (vs, es)
        };
        key(self) == key(other)
    }
}

impl HGraph {
    pub fn new(gog: Arc<GbsGraph>) -> Self {
        HGraph {
            gog,
            vertices: Vec::new(),
            edges: Vec::new(),
            incidence: Vec::new(),
            vertex_ids: HashMap::new(),
            edge_ids: HashSet::new(),
            next_vertex: 0,
            next_edge: 0,
        }
    }

    /// One `Z^d` vertex per site and one edge per graph-of-groups edge.
    pub fn whole_group(gog: Arc<GbsGraph>) -> Result<Self> {
        let mut h = HGraph::new(gog.clone());
        let full = Lattice::full(gog.dim());
        for v in 0..gog.vertex_count() {
            h.add_vertex(Some(gog.vertex_id(v).to_string()), v, full.clone())?;
        }
        for e in 0..gog.edge_count() {
            let rec = gog.edge_record(e);
            h.add_edge(Some(rec.id.clone()), e, gog.vertex(&rec.src)?, gog.vertex(&rec.trg)?)?;
        }
        Ok(h)
    }

    pub fn single_vertex(gog: Arc<GbsGraph>, site: usize, label: Lattice) -> Result<PointedHGraph> {
        let mut h = HGraph::new(gog);
        let base = h.add_vertex(None, site, label)?;
        Ok(PointedHGraph { graph: h, base })
    }

    pub fn gog(&self) -> &GbsGraph {
        &self.gog
    }

    pub fn gog_arc(&self) -> &Arc<GbsGraph> {
        &self.gog
    }

    pub fn vertices(&self) -> &[HVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HEdge] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &HVertex {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_ids.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.into()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges incident to `v`; a loop appears once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    fn fresh_vertex_id(&mut self) -> String {
        loop {
            let id = format!("n{}", self.next_vertex);
            self.next_vertex += 1;
            if !self.vertex_ids.contains_key(&id) {
                return id;
            }
        }
    }

    fn fresh_edge_id(&mut self) -> String {
        loop {
            let id = format!("E{}", self.next_edge);
            self.next_edge += 1;
            if !self.edge_ids.contains(&id) {
                return id;
            }
        }
    }

    pub fn add_vertex(&mut self, id: Option<String>, site: usize, label: Lattice) -> Result<usize> {
        if site >= self.gog.vertex_count() {
            return Err(Error::UnknownVertex(format!("site #{site}")));
        }
        let id = match id {
            Some(id) if self.vertex_ids.contains_key(&id) => return Err(Error::InvalidHGraph(format!("duplicate vertex id `{id}`"))),
            Some(id) => id,
            None => self.fresh_vertex_id(),
        };
        let idx = self.vertices.len();
        self.vertex_ids.insert(id.clone(), idx);
        self.vertices.push(HVertex { id, site, label });
        self.incidence.push(Vec::new());
        Ok(idx)
    }

    /// Adds an edge of type `ty` (forward orientation) from `src` to `trg` without validation.
    pub fn add_edge(&mut self, id: Option<String>, ty: usize, src: usize, trg: usize) -> Result<usize> {
        if ty >= self.gog.edge_count() {
            return Err(Error::UnknownEdge(format!("#{ty}")));
        }
        if src >= self.vertices.len() || trg >= self.vertices.len() {
            return Err(Error::UnknownVertex(format!("#{}", src.max(trg))));
        }
        let id = match id {
            Some(id) if self.edge_ids.contains(&id) => return Err(Error::InvalidHGraph(format!("duplicate edge id `{id}`"))),
            Some(id) => id,
            None => self.fresh_edge_id(),
        };
        let idx = self.edges.len();
        self.edge_ids.insert(id.clone());
        self.edges.push(HEdge { id, ty, src, trg });
        self.incidence[src].push(idx);
        if trg != src {
            self.incidence[trg].push(idx);
        }
        Ok(idx)
    }

    /// Adds an edge traversed as `o` from `from` to `to`.
    pub fn add_oriented_edge(&mut self, o: OrientedEdge, from: usize, to: usize) -> Result<usize> {
        if o.reversed {
            self.add_edge(None, o.edge, to, from)
        } else {
            self.add_edge(None, o.edge, from, to)
        }
    }

    /// Edges at `v` of oriented type `o`: `v` is the source of `o`.
    pub fn type_count(&self, v: usize, o: OrientedEdge) -> usize {
        self.incidence[v]
            .iter()
            .filter(|&&k| {
                let e = &self.edges[k];
                e.ty == o.edge && if o.reversed { e.trg == v } else { e.src == v }
            })
            .count()
    }

    pub fn bound(&self, v: usize, o: OrientedEdge) -> Result<BigInt> {
        multiplicity_bound(&self.gog, o, &self.vertices[v].label)
    }

    pub fn validate(&self) -> Vec<HViolation> {
        let mut out = Vec::new();
        if let Err(e) = self.gog.ensure_valid() {
            out.push(HViolation::InvalidGog { message: e.to_string() });
            return out;
        }
        let d = self.gog.dim();
        for v in &self.vertices {
            if v.label.dim() != d {
                out.push(HViolation::LabelDimension { vertex: v.id.clone() });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for e in &self.edges {
            let o = OrientedEdge::forward(e.ty);
            let (s, t) = (&self.vertices[e.src], &self.vertices[e.trg]);
            if s.site != self.gog.src(o) || t.site != self.gog.trg(o) {
                out.push(HViolation::SiteMismatch { edge: e.id.clone() });
            } else if !check_transfer(&self.gog, o, &s.label, &t.label).unwrap_or(false) {
                out.push(HViolation::Transfer { edge: e.id.clone() });
            }
        }
        for (v, vx) in self.vertices.iter().enumerate() {
            for o in self.gog.oriented_out(vx.site) {
                let count = self.type_count(v, o);
                if count == 0 {
                    continue;
                }
                let bound = self.bound(v, o).expect("labels and matrices are consistent");
                if BigInt::from(count) > bound {
                    out.push(HViolation::Multiplicity {
                        vertex: vx.id.clone(),
                        edge_type: self.gog.oriented_name(o),
                        count,
                        bound: bound.to_string(),
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidHGraph(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
        }
    }

    fn vertex_deficiencies(&self, v: usize) -> Result<Vec<Deficiency>> {
        let mut out = Vec::new();
        for o in self.gog.oriented_out(self.vertices[v].site) {
            let bound = to_count(&self.bound(v, o)?)?;
            let count = self.type_count(v, o);
            if bound > count {
                out.push(Deficiency { vertex: v, edge: o, residual: bound - count });
            }
        }
        Ok(out)
    }

    /// Missing edges per vertex and oriented type, in vertex then type order.
    pub fn deficiencies(&self) -> Result<Vec<Deficiency>> {
        self.ensure_valid()?;
        let mut out = Vec::new();
        for v in 0..self.vertices.len() {
            out.extend(self.vertex_deficiencies(v)?);
        }
        Ok(out)
    }

    pub fn is_saturated(&self) -> Result<bool> {
        Ok(self.deficiencies()?.is_empty())
    }

    /// Adds one edge of oriented type `o` at `v`, checking the bounds and the transfer equation.
    pub fn attach_edge(&self, v: usize, o: OrientedEdge, target: AttachTarget) -> Result<(HGraph, usize)> {
        let gog = self.gog.clone();
        let vx = self.vertices.get(v).ok_or_else(|| Error::UnknownVertex(format!("#{v}")))?;
        if gog.src(o) != vx.site {
            return Err(Error::InvalidArgument(format!("edge type {} does not start at site {}", gog.oriented_name(o), gog.vertex_id(vx.site))));
        }
        let room = |g: &HGraph, x: usize, t: OrientedEdge| -> Result<()> {
            if BigInt::from(g.type_count(x, t) + 1) > g.bound(x, t)? {
                return Err(Error::SaturationBound(format!("vertex {} has no room for type {}", g.vertices[x].id, gog.oriented_name(t))));
            }
            Ok(())
        };
        room(self, v, o)?;
        let mut g = self.clone();
        let w = match target {
            AttachTarget::Existing(w) => {
                let wx = g.vertices.get(w).ok_or_else(|| Error::UnknownVertex(format!("#{w}")))?;
                if wx.site != gog.trg(o) {
                    return Err(Error::InvalidArgument("target vertex sits at the wrong site".into()));
                }
                if v == w {
                    // A loop edge counts once for each orientation at the same vertex.
                    if BigInt::from(g.type_count(w, o.rev()) + 1) > g.bound(w, o.rev())? {
                        return Err(Error::SaturationBound(format!("vertex {} has no room for type {}", wx.id, gog.oriented_name(o.rev()))));
                    }
                } else {
                    room(&g, w, o.rev())?;
                }
                w
            }
            AttachTarget::New(label) => {
                let label = match label {
                    Some(l) => l,
                    None => propagate_label(&gog, o, &vx.label)?,
                };
                g.add_vertex(None, gog.trg(o), label)?
            }
        };
        if !check_transfer(&gog, o, &g.vertices[v].label, &g.vertices[w].label)? {
            return Err(Error::TransferViolation(format!("{} from {} to {}", gog.oriented_name(o), g.vertices[v].id, g.vertices[w].id)));
        }
        let e = g.add_oriented_edge(o, v, w)?;
        Ok((g, e))
    }

    /// Attaches minimal leaves breadth first for `depth` rounds.
    pub fn saturate(&self, depth: usize) -> Result<HGraph> {
        Ok(self.saturate_with(SaturateOptions::depth(depth))?.graph)
    }

    pub fn saturate_with(&self, opts: SaturateOptions) -> Result<SaturationRun> {
        self.ensure_valid()?;
        let gog = self.gog.clone();
        let mut g = self.clone();
        let mut frontier: Vec<usize> = (0..g.vertices.len()).collect();
        let mut frontier_sizes = Vec::new();
        let mut bounds: HashMap<(OrientedEdge, Lattice), usize> = HashMap::new();
        let mut labels: HashMap<(OrientedEdge, Lattice), Lattice> = HashMap::new();
        let mut truncated = false;
        for _ in 0..opts.depth {
            let mut keys: Vec<(OrientedEdge, Lattice)> = Vec::new();
            let mut seen = HashSet::new();
            for &v in &frontier {
                let vx = &g.vertices[v];
                for o in gog.oriented_out(vx.site) {
                    let k = (o, vx.label.clone());
                    if !bounds.contains_key(&k) && seen.insert(k.clone()) {
                        keys.push(k);
                    }
                }
            }
            let computed = opts.exec.map(&keys, |(o, l)| -> Result<(usize, Lattice)> {
                Ok((to_count(&multiplicity_bound(&gog, *o, l)?)?, propagate_label(&gog, *o, l)?))
            });
            for (k, r) in keys.into_iter().zip(computed) {
                let (b, l) = r?;
                bounds.insert(k.clone(), b);
                labels.insert(k, l);
            }
            let mut work = Vec::new();
            for &v in &frontier {
                let vx = &g.vertices[v];
                for o in gog.oriented_out(vx.site) {
                    let k = (o, vx.label.clone());
                    let count = g.type_count(v, o);
                    let b = bounds[&k];
                    if b > count {
                        work.push((v, o, b - count, labels[&k].clone()));
                    }
                }
            }
            let added: usize = work.iter().map(|w| w.2).sum();
            if added == 0 {
                frontier.clear();
                break;
            }
            if g.vertices.len().saturating_add(added) > opts.max_vertices {
                truncated = true;
                break;
            }
            let mut next = Vec::with_capacity(added);
            for (v, o, residual, label) in work {
                for _ in 0..residual {
                    let w = g.add_vertex(None, gog.trg(o), label.clone())?;
                    g.add_oriented_edge(o, v, w)?;
                    next.push(w);
                }
            }
            frontier_sizes.push(next.len());
            frontier = next;
        }
        let saturated = if frontier.is_empty() {
            true
        } else {
            frontier.iter().map(|&v| g.vertex_deficiencies(v)).collect::<Result<Vec<_>>>()?.iter().all(Vec::is_empty)
        };
        Ok(SaturationRun { graph: g, frontier_sizes, saturated, truncated })
    }

    /// `Finite` when saturation ends with no deficiency within the budgets.
    pub fn close_or_grow(&self, depth: usize, max_vertices: usize, exec: Exec) -> Result<ClosureOutcome> {
        let run = self.saturate_with(SaturateOptions { depth, max_vertices, exec })?;
        if run.saturated {
            Ok(ClosureOutcome::Finite)
        } else {
            Ok(ClosureOutcome::NotClosed { frontier_sizes: run.frontier_sizes, truncated: run.truncated })
        }
    }

    /// Adds `path` starting at `start`; ends at `end` if given, else at a new vertex.
    /// Returns the final vertex.
    pub fn insert_path(&mut self, start: usize, path: &HPath, end: Option<usize>) -> Result<usize> {
        let mut cur = start;
        let k = path.steps.len();
        for (i, step) in path.steps.iter().enumerate() {
            let next = match end {
                Some(w) if i + 1 == k => w,
                _ => self.add_vertex(None, self.gog.trg(step.edge), step.label.clone())?,
            };
            self.add_oriented_edge(step.edge, cur, next)?;
            cur = next;
        }
        Ok(cur)
    }

    /// Vertex indices reachable from `v`.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![v];
        seen[v] = true;
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            out.push(x);
            for &k in &self.incidence[x] {
                let e = &self.edges[k];
                for y in [e.src, e.trg] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.is_empty() || self.component_of(0).len() == self.vertices.len()
    }

    /// Copies `other` into `self` with ids prefixed; returns the vertex map.
    pub fn absorb(&mut self, other: &HGraph, prefix: &str) -> Result<Vec<usize>> {
        let map: Vec<usize> = other
            .vertices
            .iter()
            .map(|v| self.add_vertex(Some(format!("{prefix}{}", v.id)), v.site, v.label.clone()))
            .collect::<Result<_>>()?;
        for e in &other.edges {
            self.add_edge(Some(format!("{prefix}{}", e.id)), e.ty, map[e.src], map[e.trg])?;
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests;
