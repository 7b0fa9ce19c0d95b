//! H-paths: the witnesses of label equivalence.
//!
//! A path is a chain of fresh vertices, so the only multiplicity constraint
//! sits at an inner vertex entered by `t` and left by `t.rev()`: such a
//! backtrack needs room for two edges of that type.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;

use super::{check_transfer, multiplicity_bound, propagate_label, HGraph, PointedHGraph};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gog::{GbsGraph, OrientedEdge};
use crate::lattice::Lattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub edge: OrientedEdge,
    /// Label of the vertex reached by this step.
    pub label: Lattice,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPath {
    pub start_site: usize,
    pub start: Lattice,
    pub steps: Vec<PathStep>,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Maximal number of edges.
    pub depth: usize,
    /// Maximal number of visited states.
    pub max_states: usize,
    /// Restricts moves to these edge indices (both orientations).
    pub edge_filter: Option<BTreeSet<usize>>,
    /// Extra labels tried at every step besides the minimal one.
    pub candidates: Vec<Lattice>,
    pub exec: Exec,
}

impl SearchOptions {
    pub fn depth(depth: usize) -> Self {
        SearchOptions { depth, max_states: 100_000, edge_filter: None, candidates: Vec::new(), exec: Exec::default() }
    }
}

fn backtrack_ok(gog: &GbsGraph, arrived: Option<OrientedEdge>, next: OrientedEdge, label: &Lattice) -> Result<bool> {
    if arrived != Some(next) {
        return Ok(true);
    }
    Ok(multiplicity_bound(gog, next, label)? >= BigInt::from(2))
}

impl HPath {
    pub fn empty(site: usize, label: Lattice) -> Self {
        HPath { start_site: site, start: label, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end_site(&self, gog: &GbsGraph) -> usize {
        self.steps.last().map_or(self.start_site, |s| gog.trg(s.edge))
    }

    pub fn end_label(&self) -> &Lattice {
        self.steps.last().map_or(&self.start, |s| &s.label)
    }

    pub fn types(&self) -> Vec<OrientedEdge> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    pub fn reversed(&self, gog: &GbsGraph) -> HPath {
        let mut labels = vec![self.start.clone()];
        labels.extend(self.steps.iter().map(|s| s.label.clone()));
        let k = self.steps.len();
        let steps = (0..k).rev().map(|i| PathStep { edge: self.steps[i].edge.rev(), label: labels[i].clone() }).collect();
        HPath { start_site: self.end_site(gog), start: labels[k].clone(), steps }
    }

    /// Checks sites, transfer equations and the backtrack bounds.
    pub fn validate(&self, gog: &GbsGraph) -> Result<()> {
        let mut site = self.start_site;
        let mut label = &self.start;
        let mut arrived: Option<OrientedEdge> = None;
        for (i, s) in self.steps.iter().enumerate() {
            if gog.src(s.edge) != site {
                return Err(Error::InvalidHGraph(format!("step {i} leaves the wrong site")));
            }
            if !check_transfer(gog, s.edge, label, &s.label)? {
                return Err(Error::TransferViolation(format!("step {i} ({})", gog.oriented_name(s.edge))));
            }
            if !backtrack_ok(gog, arrived, s.edge, label)? {
                return Err(Error::SaturationBound(format!("backtrack at step {i} needs two edges of type {}", gog.oriented_name(s.edge))));
            }
            site = gog.trg(s.edge);
            label = &s.label;
            arrived = Some(s.edge.rev());
        }
        Ok(())
    }

    /// The path as a pointed H-graph based at its first vertex.
    pub fn to_hgraph(&self, gog: Arc<GbsGraph>) -> Result<PointedHGraph> {
        let mut g = HGraph::new(gog);
        let base = g.add_vertex(None, self.start_site, self.start.clone())?;
        g.insert_path(base, self, None)?;
        Ok(PointedHGraph { graph: g, base })
    }
}

struct Node {
    site: usize,
    label: Lattice,
    arrived: Option<OrientedEdge>,
    parent: Option<(usize, OrientedEdge)>,
}

fn rebuild(nodes: &[Node], mut i: usize) -> Vec<PathStep> {
    let mut steps = Vec::new();
    while let Some((p, o)) = nodes[i].parent {
        steps.push(PathStep { edge: o, label: nodes[i].label.clone() });
        i = p;
    }
    steps.reverse();
    steps
}

/// Breadth-first search for an H-path from `(s0, l0)` to `(s1, l1)`.
///
/// Moves follow every oriented edge with the minimal label, plus any
/// candidate label satisfying the transfer equation. `Ok(None)` means no path
/// within the budgets, not that none exists.
pub fn find_path(gog: &GbsGraph, from: (usize, &Lattice), to: (usize, &Lattice), opts: &SearchOptions) -> Result<Option<HPath>> {
    gog.ensure_valid()?;
    let (s0, l0) = from;
    let (s1, l1) = to;
    if l0.dim() != gog.dim() || l1.dim() != gog.dim() {
        return Err(Error::DimensionMismatch { expected: gog.dim(), found: l0.dim().max(l1.dim()) });
    }
    if s0 == s1 && l0 == l1 {
        return Ok(Some(HPath::empty(s0, l0.clone())));
    }
    let mut nodes = vec![Node { site: s0, label: l0.clone(), arrived: None, parent: None }];
    let mut seen: HashSet<(usize, Lattice, Option<OrientedEdge>)> = HashSet::from([(s0, l0.clone(), None)]);
    let mut layer = vec![0usize];
    for _ in 0..opts.depth {
        let expanded = opts.exec.map(&layer, |&i| -> Result<Vec<(usize, OrientedEdge, Lattice)>> {
            let n = &nodes[i];
            let mut out = Vec::new();
            for o in gog.oriented_out(n.site) {
                if opts.edge_filter.as_ref().is_some_and(|f| !f.contains(&o.edge)) {
                    continue;
                }
                if !backtrack_ok(gog, n.arrived, o, &n.label)? {
                    continue;
                }
                let minimal = propagate_label(gog, o, &n.label)?;
                for c in &opts.candidates {
                    if *c != minimal && c.dim() == gog.dim() && check_transfer(gog, o, &n.label, c)? {
                        out.push((i, o, c.clone()));
                    }
                }
                out.push((i, o, minimal));
            }
            Ok(out)
        });
        let mut next = Vec::new();
        for batch in expanded {
            for (p, o, label) in batch? {
                let site = gog.trg(o);
                let key = (site, label.clone(), Some(o.rev()));
                if !seen.insert(key) {
                    continue;
                }
                nodes.push(Node { site, label, arrived: Some(o.rev()), parent: Some((p, o)) });
                let idx = nodes.len() - 1;
                if site == s1 && nodes[idx].label == *l1 {
                    return Ok(Some(HPath { start_site: s0, start: l0.clone(), steps: rebuild(&nodes, idx) }));
                }
                if nodes.len() > opts.max_states {
                    return Ok(None);
                }
                next.push(idx);
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(None)
}

/// Witness that `l0` and `l1` label equivalent vertices over site `v`.
pub fn find_equiv_path(gog: &GbsGraph, v: usize, l0: &Lattice, l1: &Lattice, opts: &SearchOptions) -> Result<Option<HPath>> {
    find_path(gog, (v, l0), (v, l1), opts)
}

/// Shortest closed H-path at `(site, label)` leaving by `e` and returning by `e.rev()`.
///
/// It follows a reduced word `e t_2 ... t_k` with minimal labels, turns around
/// at a vertex with room for two edges of type `t_k.rev()` and retraces the
/// word on fresh vertices. The final vertex carries `label` again.
pub fn turnaround_excursion(gog: &GbsGraph, site: usize, label: &Lattice, e: OrientedEdge, max_len: usize) -> Result<Option<Vec<PathStep>>> {
    if gog.src(e) != site {
        return Err(Error::InvalidArgument(format!("{} does not start at {}", gog.oriented_name(e), gog.vertex_id(site))));
    }
    let mut nodes = vec![Node { site, label: label.clone(), arrived: None, parent: None }];
    let first = propagate_label(gog, e, label)?;
    nodes.push(Node { site: gog.trg(e), label: first, arrived: Some(e.rev()), parent: Some((0, e)) });
    let mut seen = HashSet::from([(gog.trg(e), nodes[1].label.clone(), e)]);
    let mut layer = vec![1usize];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &i in &layer {
            let back = nodes[i].arrived.expect("non-root node");
            if multiplicity_bound(gog, back, &nodes[i].label)? >= BigInt::from(2) {
                let out = rebuild(&nodes, i);
                let mut labels = vec![label.clone()];
                labels.extend(out.iter().map(|s| s.label.clone()));
                let mut steps = out.clone();
                for j in (0..out.len()).rev() {
                    steps.push(PathStep { edge: out[j].edge.rev(), label: labels[j].clone() });
                }
                return Ok(Some(steps));
            }
            for o in gog.oriented_out(nodes[i].site) {
                if o == back {
                    continue;
                }
                let l = propagate_label(gog, o, &nodes[i].label)?;
                if seen.insert((gog.trg(o), l.clone(), o)) {
                    nodes.push(Node { site: gog.trg(o), label: l, arrived: Some(o.rev()), parent: Some((i, o)) });
                    next.push(nodes.len() - 1);
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    Ok(None)
}

/// A path with the same endpoints whose first step has type `e`.
pub fn prefix_with(gog: &GbsGraph, path: &HPath, e: OrientedEdge, max_len: usize) -> Result<HPath> {
    if gog.src(e) != path.start_site {
        return Err(Error::InvalidArgument(format!("{} does not start at the path's first site", gog.oriented_name(e))));
    }
    if path.steps.first().is_some_and(|s| s.edge == e) {
        return Ok(path.clone());
    }
    let exc = turnaround_excursion(gog, path.start_site, &path.start, e, max_len)?
        .ok_or_else(|| Error::UnsupportedShape(format!("no turnaround for type {} within {max_len} steps", gog.oriented_name(e))))?;
    let mut steps = exc;
    steps.extend(path.steps.iter().cloned());
    Ok(HPath { start_site: path.start_site, start: path.start.clone(), steps })
}

/// A path with the same endpoints whose last edge counts as type `c` at the end vertex.
pub fn suffix_with(gog: &GbsGraph, path: &HPath, c: OrientedEdge, max_len: usize) -> Result<HPath> {
    Ok(prefix_with(gog, &path.reversed(gog), c, max_len)?.reversed(gog))
}
