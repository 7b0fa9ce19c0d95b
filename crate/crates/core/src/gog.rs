//! Graphs of groups with `Z^d` vertex and edge groups.
//!
//! An edge record stores one orientation `src -> trg` together with the two
//! inclusion matrices; the reverse orientation swaps endpoints and matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{IntMatrix, RatMatrix};

/// One edge of the underlying graph, stored in a chosen orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub src: String,
    pub trg: String,
    pub m_src: IntMatrix,
    pub m_trg: IntMatrix,
}

/// An edge of a [`GbsGraph`] traversed forwards or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: true }
    }

    pub fn rev(self) -> Self {
        OrientedEdge { edge: self.edge, reversed: !self.reversed }
    }
}

/// A structural problem reported by [`GbsGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GogViolation {
    Empty,
    BadDimension { edge: String, end: String, rows: usize, cols: usize },
    SingularLabel { edge: String, end: String },
    Disconnected,
}

impl fmt::Display for GogViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GogViolation::Empty => write!(f, "graph has no vertices"),
            GogViolation::BadDimension { edge, end, rows, cols } => write!(f, "edge {edge}: {end} label is {rows}x{cols}"),
            GogViolation::SingularLabel { edge, end } => write!(f, "edge {edge}: {end} label has determinant 0"),
            GogViolation::Disconnected => write!(f, "underlying graph is disconnected"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Amenability {
    pub amenable: bool,
    pub reason: String,
}

/// Spanning tree of the underlying graph, as a set of edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub edges: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularGenerator {
    /// Index of the non-tree edge producing this generator.
    pub edge: usize,
    pub matrix: RatMatrix,
}

/// A graph of groups whose vertex and edge groups are `Z^d`.
///
/// Construction only checks references; dimension, determinant and
/// connectivity problems are recorded and reported by [`GbsGraph::validate`].
#[derive(Clone, Debug)]
pub struct GbsGraph {
    d: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    src: Vec<usize>,
    trg: Vec<usize>,
    vindex: HashMap<String, usize>,
    eindex: HashMap<String, usize>,
    edge_order: Vec<usize>,
    violations: Vec<GogViolation>,
    /// Edge ids of a chosen spanning tree, used by default for modular generators.
    tree: Option<Vec<String>>,
}

impl PartialEq for GbsGraph {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for GbsGraph {}

#[derive(Serialize, Deserialize)]
struct GogDoc {
    d: usize,
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree: Option<Vec<String>>,
}

impl GbsGraph {
    pub fn new(d: usize, vertices: Vec<String>, edges: Vec<EdgeRecord>) -> Result<Self> {
        let mut vindex = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id `{v}`")));
            }
        }
        let mut eindex = HashMap::new();
        let (mut src, mut trg) = (Vec::new(), Vec::new());
        for (i, e) in edges.iter().enumerate() {
            if eindex.insert(e.id.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate edge id `{}`", e.id)));
            }
            src.push(*vindex.get(&e.src).ok_or_else(|| Error::UnknownVertex(e.src.clone()))?);
            trg.push(*vindex.get(&e.trg).ok_or_else(|| Error::UnknownVertex(e.trg.clone()))?);
        }
        let mut edge_order: Vec<usize> = (0..edges.len()).collect();
        edge_order.sort_by(|&a, &b| edges[a].id.cmp(&edges[b].id));
        let mut g = GbsGraph { d, vertices, edges, src, trg, vindex, eindex, edge_order, violations: Vec::new(), tree: None };
        g.violations = g.compute_violations();
        Ok(g)
    }

    /// Records a preferred spanning tree; it must name `|V| - 1` edges forming a tree.
    pub fn with_tree(mut self, ids: Vec<String>) -> Result<Self> {
        for id in &ids {
            self.edge(id)?;
        }
        self.tree = Some(ids);
        if self.is_valid() {
            self.spanning_tree()?;
        }
        Ok(self)
    }

    pub fn recorded_tree(&self) -> Option<&[String]> {
        self.tree.as_deref()
    }

    /// Convenience constructor from `(id, src, trg, m_src, m_trg)` tuples.
    pub fn from_edges(d: usize, vertices: &[&str], edges: Vec<(&str, &str, &str, IntMatrix, IntMatrix)>) -> Result<Self> {
        let edges = edges
            .into_iter()
            .map(|(id, s, t, a, b)| EdgeRecord { id: id.into(), src: s.into(), trg: t.into(), m_src: a, m_trg: b })
            .collect();
        Self::new(d, vertices.iter().map(|s| s.to_string()).collect(), edges)
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        let doc: GogDoc = serde_json::from_str(s)?;
        Self::from_value_doc(doc)
    }

    pub fn from_value(v: serde_json::Value) -> std::result::Result<Self, serde_json::Error> {
        let doc: GogDoc = serde_json::from_value(v)?;
        Self::from_value_doc(doc)
    }

    fn from_value_doc(doc: GogDoc) -> std::result::Result<Self, serde_json::Error> {
        use serde::de::Error as _;
        let g = Self::new(doc.d, doc.vertices, doc.edges).map_err(serde_json::Error::custom)?;
        match doc.tree {
            Some(t) => g.with_tree(t).map_err(serde_json::Error::custom),
            None => Ok(g),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(GogDoc { d: self.d, vertices: self.vertices.clone(), edges: self.edges.clone(), tree: self.tree.clone() })
            .expect("graph serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("graph serializes")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vindex.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.into()))
    }

    pub fn edge(&self, id: &str) -> Result<usize> {
        self.eindex.get(id).copied().ok_or_else(|| Error::UnknownEdge(id.into()))
    }

    pub fn edge_record(&self, e: usize) -> &EdgeRecord {
        &self.edges[e]
    }

    pub fn edge_records(&self) -> &[EdgeRecord] {
        &self.edges
    }

    /// Edge indices sorted by id.
    pub fn edges_by_id(&self) -> &[usize] {
        &self.edge_order
    }

    pub fn src(&self, o: OrientedEdge) -> usize {
        if o.reversed {
            self.trg[o.edge]
        } else {
            self.src[o.edge]
        }
    }

    pub fn trg(&self, o: OrientedEdge) -> usize {
        self.src(o.rev())
    }

    pub fn m_src(&self, o: OrientedEdge) -> &IntMatrix {
        if o.reversed {
            &self.edges[o.edge].m_trg
        } else {
            &self.edges[o.edge].m_src
        }
    }

    pub fn m_trg(&self, o: OrientedEdge) -> &IntMatrix {
        self.m_src(o.rev())
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.src[e] == self.trg[e]
    }

    /// `e` for a forward edge and `-e` for a reversed one.
    pub fn oriented_name(&self, o: OrientedEdge) -> String {
        let id = &self.edges[o.edge].id;
        if o.reversed {
            format!("-{id}")
        } else {
            id.clone()
        }
    }

    /// Parses `e` or `-e`.
    pub fn parse_oriented(&self, s: &str) -> Result<OrientedEdge> {
        match s.strip_prefix('-') {
            Some(id) => Ok(OrientedEdge::backward(self.edge(id)?)),
            None => Ok(OrientedEdge::forward(self.edge(s)?)),
        }
    }

    /// Oriented edges leaving `v`, sorted by edge id with the forward
    /// orientation first; a loop contributes both orientations.
    pub fn oriented_out(&self, v: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for &e in &self.edge_order {
            if self.src[e] == v {
                out.push(OrientedEdge::forward(e));
            }
            if self.trg[e] == v {
                out.push(OrientedEdge::backward(e));
            }
        }
        out
    }

    /// All oriented edges, in the order of [`GbsGraph::oriented_out`] per edge.
    pub fn all_oriented(&self) -> Vec<OrientedEdge> {
        self.edge_order.iter().flat_map(|&e| [OrientedEdge::forward(e), OrientedEdge::backward(e)]).collect()
    }

    fn compute_violations(&self) -> Vec<GogViolation> {
        let mut out = Vec::new();
        if self.vertices.is_empty() {
            out.push(GogViolation::Empty);
            return out;
        }
        for e in &self.edges {
            for (end, m) in [("src", &e.m_src), ("trg", &e.m_trg)] {
                if m.rows() != self.d || m.cols() != self.d {
                    out.push(GogViolation::BadDimension { edge: e.id.clone(), end: end.into(), rows: m.rows(), cols: m.cols() });
                } else if m.det().map(|x| x.is_zero()).unwrap_or(true) {
                    out.push(GogViolation::SingularLabel { edge: e.id.clone(), end: end.into() });
                }
            }
        }
        if self.components() > 1 {
            out.push(GogViolation::Disconnected);
        }
        out
    }

    fn components(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in 0..self.edges.len() {
            let (a, b) = (find(&mut parent, self.src[e]), find(&mut parent, self.trg[e]));
            parent[a] = b;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// Every structural problem; empty iff the graph is a valid GBS graph.
    pub fn validate(&self) -> &[GogViolation] {
        &self.violations
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if self.violations.is_empty() {
            return Ok(());
        }
        if self.violations.contains(&GogViolation::Disconnected) && self.violations.len() == 1 {
            return Err(Error::Disconnected);
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        Err(Error::InvalidGog(msgs.join("; ")))
    }

    /// No non-loop edge carries a unimodular label.
    pub fn is_reduced(&self) -> bool {
        (0..self.edges.len()).all(|e| self.is_loop(e) || !(self.edges[e].m_src.is_unimodular() || self.edges[e].m_trg.is_unimodular()))
    }

    /// Contracts non-loop edges with a unimodular label until none is left.
    ///
    /// The edge with the smallest id is contracted first; the vertex on the
    /// unimodular side is absorbed into the other endpoint.
    pub fn reduce(&self) -> Result<GbsGraph> {
        self.ensure_valid()?;
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        loop {
            edges.sort_by(|a, b| a.id.cmp(&b.id));
            let pick = edges.iter().position(|e| e.src != e.trg && (e.m_trg.is_unimodular() || e.m_src.is_unimodular()));
            let Some(k) = pick else { break };
            let e = edges.remove(k);
            let (keep, gone, t) = if e.m_trg.is_unimodular() {
                (e.src.clone(), e.trg.clone(), e.m_src.mul(&e.m_trg.inverse_unimodular()?)?)
            } else {
                (e.trg.clone(), e.src.clone(), e.m_trg.mul(&e.m_src.inverse_unimodular()?)?)
            };
            for f in &mut edges {
                if f.src == gone {
                    f.src = keep.clone();
                    f.m_src = t.mul(&f.m_src)?;
                }
                if f.trg == gone {
                    f.trg = keep.clone();
                    f.m_trg = t.mul(&f.m_trg)?;
                }
            }
            vertices.retain(|v| *v != gone);
        }
        GbsGraph::new(self.d, vertices, edges)
    }

    /// Classification of amenable GBS groups; requires a reduced graph.
    pub fn is_amenable(&self) -> Result<Amenability> {
        self.ensure_valid()?;
        if !self.is_reduced() {
            return Err(Error::NotReduced);
        }
        let yes = |r: &str| Ok(Amenability { amenable: true, reason: r.into() });
        match self.edges.len() {
            0 => return yes("no edges: the group is a single vertex group"),
            1 => {
                let e = &self.edges[0];
                if self.is_loop(0) && (e.m_src.is_unimodular() || e.m_trg.is_unimodular()) {
                    return yes("single loop with unimodular label");
                }
                let two = BigInt::from(2);
                if !self.is_loop(0) && e.m_src.det()?.abs() == two && e.m_trg.det()?.abs() == two {
                    return yes("single edge whose labels have determinant +-2");
                }
            }
            _ => {}
        }
        Ok(Amenability { amenable: false, reason: "reduced graph outside the amenable shapes".into() })
    }

    /// One vertex, only loops, every label unimodular: the group is `Z^d x| F_r`.
    pub fn is_semidirect(&self) -> bool {
        self.vertices.len() == 1
            && self.edges.iter().all(|e| e.src == e.trg && e.m_src.is_unimodular() && e.m_trg.is_unimodular())
    }

    /// The recorded tree if any, else the BFS tree from the lexicographically
    /// smallest vertex id, scanning edges by id.
    pub fn spanning_tree(&self) -> Result<SpanningTree> {
        self.ensure_valid()?;
        if let Some(ids) = &self.tree {
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            return self.tree_from_edges(&ids);
        }
        let root = (0..self.vertices.len()).min_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b])).expect("nonempty");
        self.spanning_tree_from(root)
    }

    fn spanning_tree_from(&self, root: usize) -> Result<SpanningTree> {
        let mut seen = vec![false; self.vertices.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut edges = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            for o in self.oriented_out(v) {
                let w = self.trg(o);
                if !seen[w] {
                    seen[w] = true;
                    edges.insert(o.edge);
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Disconnected);
        }
        Ok(SpanningTree { root, edges })
    }

    /// Spanning tree made of the named edges.
    pub fn tree_from_edges(&self, ids: &[&str]) -> Result<SpanningTree> {
        self.ensure_valid()?;
        let edges: BTreeSet<usize> = ids.iter().map(|id| self.edge(id)).collect::<Result<_>>()?;
        let n = self.vertices.len();
        if edges.len() + 1 != n {
            return Err(Error::InvalidArgument(format!("a spanning tree needs {} edges, got {}", n - 1, edges.len())));
        }
        let tree = SpanningTree { root: 0, edges };
        for v in 0..n {
            if self.tree_path(&tree, 0, v).is_none() {
                return Err(Error::InvalidArgument("edges do not form a spanning tree".into()));
            }
        }
        Ok(tree)
    }

    /// Path inside `tree` from `from` to `to`.
    pub fn tree_path(&self, tree: &SpanningTree, from: usize, to: usize) -> Option<Vec<OrientedEdge>> {
        let mut prev: BTreeMap<usize, OrientedEdge> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![false; self.vertices.len()];
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for o in self.oriented_out(v) {
                let w = self.trg(o);
                if tree.edges.contains(&o.edge) && !seen[w] {
                    seen[w] = true;
                    prev.insert(w, o);
                    queue.push_back(w);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let o = prev[&cur];
            path.push(o);
            cur = self.src(o);
        }
        path.reverse();
        Some(path)
    }

    /// `M_{en,trg} M_{en,src}^-1 ... M_{e1,trg} M_{e1,src}^-1` along a closed path.
    pub fn cycle_modular(&self, cycle: &[OrientedEdge]) -> Result<RatMatrix> {
        self.ensure_valid()?;
        for (i, o) in cycle.iter().enumerate() {
            if o.edge >= self.edges.len() {
                return Err(Error::UnknownEdge(format!("#{}", o.edge)));
            }
            let next = &cycle[(i + 1) % cycle.len()];
            if self.trg(*o) != self.src(*next) {
                return Err(Error::NotACycle(format!(
                    "{} ends at {} but {} starts at {}",
                    self.oriented_name(*o),
                    self.vertices[self.trg(*o)],
                    self.oriented_name(*next),
                    self.vertices[self.src(*next)]
                )));
            }
        }
        let mut acc = RatMatrix::identity(self.d);
        for &o in cycle {
            let step = self.m_trg(o).to_rat().mul(&self.m_src(o).to_rat().inverse()?)?;
            acc = step.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Generators of the modular image at `v`, one per non-tree edge (by id).
    ///
    /// The generator of a non-tree edge `e` is the modular matrix of the loop
    /// `tree(v, src e) . e . tree(trg e, v)`.
    pub fn modular_generators(&self, v: usize, tree: Option<&SpanningTree>) -> Result<Vec<ModularGenerator>> {
        self.ensure_valid()?;
        let owned;
        let tree = match tree {
            Some(t) => t,
            None => {
                owned = self.spanning_tree()?;
                &owned
            }
        };
        let mut out = Vec::new();
        for &e in &self.edge_order {
            if tree.edges.contains(&e) {
                continue;
            }
            let o = OrientedEdge::forward(e);
            let mut cycle = self.tree_path(tree, v, self.src(o)).ok_or(Error::Disconnected)?;
            cycle.push(o);
            cycle.extend(self.tree_path(tree, self.trg(o), v).ok_or(Error::Disconnected)?);
            out.push(ModularGenerator { edge: e, matrix: self.cycle_modular(&cycle)? });
        }
        Ok(out)
    }

    /// Every modular generator has determinant `+-1`.
    pub fn is_unimodular(&self) -> Result<bool> {
        let gens = self.modular_generators(0, None)?;
        for g in gens {
            let det = g.matrix.det()?;
            if det.numer().abs() != *det.denom() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
