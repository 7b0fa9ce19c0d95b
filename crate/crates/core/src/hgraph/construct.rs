//! Constructions producing non-saturated H-graphs: cycle witnesses and merges.

use std::sync::Arc;

use super::path::{find_path, prefix_with, suffix_with, turnaround_excursion, HPath, PathStep, SearchOptions};
use super::{propagate_label, HGraph, PointedHGraph};
use crate::error::{Error, Result};
use crate::gog::{GbsGraph, OrientedEdge};
use crate::lattice::Lattice;

/// Longest reduced word tried when adjusting the type of a path end.
const TURNAROUND_LEN: usize = 6;

fn check_shape(gog: &GbsGraph) -> Result<()> {
    gog.ensure_valid()?;
    if !gog.is_reduced() {
        return Err(Error::UnsupportedShape("the graph of groups is not reduced".into()));
    }
    if gog.is_amenable()?.amenable {
        return Err(Error::UnsupportedShape("the group is amenable".into()));
    }
    if gog.is_semidirect() {
        return Err(Error::UnsupportedShape("the group is a semidirect product Z^d x| F_r".into()));
    }
    Ok(())
}

/// A connected H-graph with one cycle, at least two deficient vertices and a
/// vertex labelled `l0` over `v` (the base).
pub fn build_cycle_witness(gog: Arc<GbsGraph>, v: usize, l0: &Lattice) -> Result<PointedHGraph> {
    check_shape(&gog)?;
    if l0.dim() != gog.dim() {
        return Err(Error::DimensionMismatch { expected: gog.dim(), found: l0.dim() });
    }
    let g = &*gog;
    let lp = g.edges_by_id().iter().copied().find(|&e| g.is_loop(e) && g.src(OrientedEdge::forward(e)) == v);
    let (h, base) = match lp {
        Some(e) => loop_witness(gog.clone(), v, l0, OrientedEdge::forward(e))?,
        None => {
            let e0 = *g.oriented_out(v).first().ok_or_else(|| Error::UnsupportedShape("site has no edges".into()))?;
            chain_witness(gog.clone(), v, l0, e0)?
        }
    };
    h.ensure_valid().map_err(|e| Error::InvariantViolation(format!("cycle witness is invalid: {e}")))?;
    let deficient: std::collections::BTreeSet<usize> = h.deficiencies()?.iter().map(|d| d.vertex).collect();
    if deficient.len() < 2 || h.edge_count() < h.vertex_count() || !h.is_connected() {
        return Err(Error::InvariantViolation("cycle witness lacks a cycle or deficient vertices".into()));
    }
    Ok(PointedHGraph { graph: h, base })
}

/// `X1 -e0-> V0 -e0-> X2`, closed by an `e0 ... e0` path from `X2` back to `X1`.
fn loop_witness(gog: Arc<GbsGraph>, v: usize, l0: &Lattice, e0: OrientedEdge) -> Result<(HGraph, usize)> {
    let g = &*gog;
    let l1 = propagate_label(g, e0.rev(), l0)?;
    let l2 = propagate_label(g, e0, l0)?;
    let mut h = HGraph::new(gog.clone());
    let x1 = h.add_vertex(None, v, l1.clone())?;
    let v0 = h.add_vertex(None, v, l0.clone())?;
    let x2 = h.add_vertex(None, v, l2.clone())?;
    h.add_oriented_edge(e0, x1, v0)?;
    h.add_oriented_edge(e0, v0, x2)?;
    let back = HPath {
        start_site: v,
        start: l2,
        steps: vec![PathStep { edge: e0.rev(), label: l0.clone() }, PathStep { edge: e0.rev(), label: l1 }],
    };
    let p = prefix_with(g, &back, e0, TURNAROUND_LEN)?;
    let p = suffix_with(g, &p, e0.rev(), TURNAROUND_LEN)?;
    h.insert_path(x2, &p, Some(x1))?;
    Ok((h, v0))
}

/// Eight-edge `e0, -e0, ...` chain from `V0`, then two same-label chain vertices
/// joined through a turnaround.
fn chain_witness(gog: Arc<GbsGraph>, v: usize, l0: &Lattice, e0: OrientedEdge) -> Result<(HGraph, usize)> {
    let g = &*gog;
    let m1 = propagate_label(g, e0, l0)?;
    let m2 = propagate_label(g, e0.rev(), &m1)?;
    let mut steps = Vec::new();
    for _ in 0..4 {
        steps.push(PathStep { edge: e0, label: m1.clone() });
        steps.push(PathStep { edge: e0.rev(), label: m2.clone() });
    }
    let chain = HPath { start_site: v, start: l0.clone(), steps };
    let mut h = HGraph::new(gog.clone());
    let v0 = h.add_vertex(None, v, l0.clone())?;
    h.insert_path(v0, &chain, None)?;
    let ws: Vec<usize> = (0..4).map(|k| v0 + 1 + 2 * k).collect();
    let us: Vec<usize> = (0..4).map(|k| v0 + 2 + 2 * k).collect();
    for group in [us, ws] {
        let site = h.vertex(group[0]).site;
        let label = h.vertex(group[0]).label.clone();
        for o in g.oriented_out(site) {
            let open = group.iter().all(|&x| h.bound(x, o).map(|b| b > h.type_count(x, o).into()).unwrap_or(false));
            if !open {
                continue;
            }
            if let Some(exc) = turnaround_excursion(g, site, &label, o, TURNAROUND_LEN)? {
                let p = HPath { start_site: site, start: label.clone(), steps: exc };
                h.insert_path(group[0], &p, Some(group[1]))?;
                return Ok((h, v0));
            }
        }
    }
    Err(Error::UnsupportedShape("no pair of chain vertices can be joined".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeReport {
    pub merged: PointedHGraph,
    /// Vertex indices of each input copy inside `merged`.
    pub copies: Vec<Vec<usize>>,
    /// Length of each connecting path.
    pub connecting_lengths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MergeOutcome {
    Merged(MergeReport),
    NotFound { pair: (usize, usize), reason: String },
}

/// First deficient `(vertex, type)` among `candidates`.
fn open_slot(h: &HGraph, candidates: &[usize]) -> Result<Option<(usize, OrientedEdge)>> {
    for &x in candidates {
        for o in h.gog().oriented_out(h.vertex(x).site) {
            if h.bound(x, o)? > h.type_count(x, o).into() {
                return Ok(Some((x, o)));
            }
        }
    }
    Ok(None)
}

/// Joins copies of the inputs into one connected H-graph through paths
/// between deficient vertices of consecutive copies.
pub fn merge_same_phenotype(graphs: &[PointedHGraph], opts: &SearchOptions) -> Result<MergeOutcome> {
    let first = graphs.first().ok_or_else(|| Error::InvalidArgument("nothing to merge".into()))?;
    let gog = first.graph.gog_arc().clone();
    let site = first.graph.vertex(first.base).site;
    for p in graphs {
        if *p.graph.gog() != *gog || p.graph.vertex(p.base).site != site {
            return Err(Error::MixedGog);
        }
        p.graph.ensure_valid()?;
    }
    if graphs.len() == 1 {
        let copies = vec![(0..first.graph.vertex_count()).collect()];
        return Ok(MergeOutcome::Merged(MergeReport { merged: first.clone(), copies, connecting_lengths: vec![] }));
    }
    check_shape(&gog)?;
    let mut h = HGraph::new(gog.clone());
    let mut copies = Vec::new();
    let mut bases = Vec::new();
    for (i, p) in graphs.iter().enumerate() {
        let map = h.absorb(&p.graph, &format!("c{i}:"))?;
        bases.push(map[p.base]);
        copies.push(map);
    }
    let order = |i: usize| -> Vec<usize> {
        let mut c = vec![bases[i]];
        c.extend(copies[i].iter().copied().filter(|&x| x != bases[i]));
        c
    };
    let mut lengths = Vec::new();
    for i in 0..graphs.len() - 1 {
        let Some((a, ta)) = open_slot(&h, &order(i))? else {
            return Ok(MergeOutcome::NotFound { pair: (i, i + 1), reason: format!("copy {i} has no deficient vertex left") });
        };
        let Some((b, tb)) = open_slot(&h, &order(i + 1))? else {
            return Ok(MergeOutcome::NotFound { pair: (i, i + 1), reason: format!("copy {} has no deficient vertex", i + 1) });
        };
        let (va, vb) = (h.vertex(a).clone(), h.vertex(b).clone());
        let Some(path) = find_path(&gog, (va.site, &va.label), (vb.site, &vb.label), opts)? else {
            return Ok(MergeOutcome::NotFound { pair: (i, i + 1), reason: "no witness path within the search budget".into() });
        };
        let path = prefix_with(&gog, &path, ta, TURNAROUND_LEN)?;
        let path = suffix_with(&gog, &path, tb, TURNAROUND_LEN)?;
        lengths.push(path.len());
        h.insert_path(a, &path, Some(b))?;
    }
    h.ensure_valid().map_err(|e| Error::InvariantViolation(format!("merged graph is invalid: {e}")))?;
    let base = bases[0];
    Ok(MergeOutcome::Merged(MergeReport { merged: PointedHGraph { graph: h, base }, copies, connecting_lengths: lengths }))
}
