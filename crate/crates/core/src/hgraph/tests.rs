use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::*;
use crate::samples;

fn l(gens: &[&[i64]]) -> Lattice {
    Lattice::from_i64(2, gens)
}

fn fwd(g: &GbsGraph, id: &str) -> OrientedEdge {
    OrientedEdge::forward(g.edge(id).unwrap())
}

fn exhgraph() -> (HGraph, usize) {
    let gog = samples::h0();
    let (pink, orange) = (gog.vertex("pink").unwrap(), gog.vertex("orange").unwrap());
    let (e0, e1) = (gog.edge("e0").unwrap(), gog.edge("e1").unwrap());
    let mut h = HGraph::new(gog);
    let a = h.add_vertex(Some("a".into()), pink, l(&[&[1, 0]])).unwrap();
    let b = h.add_vertex(Some("b".into()), pink, l(&[&[1, 0]])).unwrap();
    let c = h.add_vertex(Some("c".into()), orange, l(&[&[1, 1]])).unwrap();
    let d = h.add_vertex(Some("d".into()), pink, l(&[&[2, 0]])).unwrap();
    h.add_edge(Some("ab".into()), e0, a, b).unwrap();
    h.add_edge(Some("ac1".into()), e1, a, c).unwrap();
    h.add_edge(Some("ac2".into()), e1, a, c).unwrap();
    h.add_edge(Some("dc".into()), e1, d, c).unwrap();
    let lp = h.add_edge(Some("dd".into()), e0, d, d).unwrap();
    (h, lp)
}

#[test]
fn figure_graph_reports_only_the_loop() {
    let (h, _) = exhgraph();
    assert_eq!(h.validate(), vec![HViolation::Transfer { edge: "dd".into() }]);
    let mut fixed = HGraph::new(h.gog_arc().clone());
    for v in h.vertices() {
        fixed.add_vertex(Some(v.id.clone()), v.site, v.label.clone()).unwrap();
    }
    for e in h.edges().iter().filter(|e| e.id != "dd") {
        fixed.add_edge(Some(e.id.clone()), e.ty, e.src, e.trg).unwrap();
    }
    assert!(fixed.is_valid());
    // c carries three e1 edges, exactly its bound |det B| = 3.
    let c = fixed.vertex_index("c").unwrap();
    let into_c = fwd(fixed.gog(), "e1").rev();
    assert_eq!(fixed.type_count(c, into_c), 3);
    assert_eq!(fixed.bound(c, into_c).unwrap(), BigInt::from(3));
}

#[test]
fn deficiencies_of_single_vertices() {
    let gog = samples::h0();
    let pink = gog.vertex("pink").unwrap();
    let (e0, e1) = (fwd(&gog, "e0"), fwd(&gog, "e1"));
    let p = HGraph::single_vertex(gog.clone(), pink, l(&[&[1, 0]])).unwrap();
    let got: Vec<_> = p.graph.deficiencies().unwrap().into_iter().map(|d| (d.edge, d.residual)).collect();
    assert_eq!(got, vec![(e0, 2), (e0.rev(), 1), (e1, 2)]);
    let full = HGraph::single_vertex(gog.clone(), pink, Lattice::full(2)).unwrap();
    let got: Vec<_> = full.graph.deficiencies().unwrap().into_iter().map(|d| (d.edge, d.residual)).collect();
    assert_eq!(got, vec![(e0, 1), (e0.rev(), 1), (e1, 1)]);
}

#[test]
fn whole_group_is_saturated() {
    let h = HGraph::whole_group(samples::h0()).unwrap();
    assert!(h.is_valid());
    assert!(h.deficiencies().unwrap().is_empty());
    assert_eq!(h.close_or_grow(8, 10_000, Exec::default()).unwrap(), ClosureOutcome::Finite);
}

#[test]
fn zero_label_keeps_growing() {
    let gog = samples::h0();
    let p = HGraph::single_vertex(gog, 0, Lattice::zero(2)).unwrap();
    match p.graph.close_or_grow(4, usize::MAX, Exec::default()).unwrap() {
        ClosureOutcome::NotClosed { frontier_sizes, truncated } => {
            assert!(!truncated);
            assert_eq!(frontier_sizes.len(), 4);
            assert!(frontier_sizes.windows(2).all(|w| w[1] >= 3 * w[0]), "{frontier_sizes:?}");
        }
        ClosureOutcome::Finite => panic!("zero label cannot close"),
    }
}

#[test]
fn saturation_keeps_the_input_and_validity() {
    let gog = samples::h0();
    let p = HGraph::single_vertex(gog, 0, l(&[&[1, 0]])).unwrap();
    let s = p.graph.saturate(2).unwrap();
    assert!(s.is_valid());
    assert_eq!(s.vertex(0), p.graph.vertex(0));
    assert!(s.deficiencies().unwrap().iter().all(|d| d.vertex != 0));
    let seq = p.graph.saturate_with(SaturateOptions { depth: 2, max_vertices: usize::MAX, exec: Exec::Sequential }).unwrap();
    assert_eq!(seq.graph, s);
}

#[test]
fn vertex_cap_truncates() {
    let p = HGraph::single_vertex(samples::h0(), 0, Lattice::zero(2)).unwrap();
    let out = p.graph.close_or_grow(8, 100, Exec::default()).unwrap();
    assert!(matches!(out, ClosureOutcome::NotClosed { truncated: true, .. }));
}

#[test]
fn attach_edge_checks() {
    let gog = samples::h0();
    let e0 = fwd(&gog, "e0");
    let e1 = fwd(&gog, "e1");
    let p = HGraph::single_vertex(gog.clone(), 0, Lattice::full(2)).unwrap();
    let (g, _) = p.graph.attach_edge(0, e1, AttachTarget::New(None)).unwrap();
    assert_eq!(g.vertex(1).label, Lattice::full(2).image(gog.m_trg(e1)).unwrap());
    assert!(matches!(g.attach_edge(0, e1, AttachTarget::New(None)), Err(Error::SaturationBound(_))));
    let bad = g.attach_edge(0, e0, AttachTarget::New(Some(Lattice::scaled(2, 3))));
    assert!(matches!(bad, Err(Error::TransferViolation(_))));
    let (g2, _) = g.attach_edge(0, e0, AttachTarget::Existing(0)).unwrap();
    assert!(g2.is_valid());
    assert!(matches!(g2.attach_edge(0, e0, AttachTarget::New(None)), Err(Error::SaturationBound(_))));
}

#[test]
fn equivalence_witnesses() {
    let gog = samples::h0();
    let pink = gog.vertex("pink").unwrap();
    let (a, b) = (l(&[&[1, 0]]), l(&[&[2, 0]]));
    let p = find_equiv_path(&gog, pink, &a, &b, &SearchOptions::depth(2)).unwrap().unwrap();
    p.validate(&gog).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.types(), vec![fwd(&gog, "e0").rev()]);

    let mut only_e1 = SearchOptions::depth(2);
    only_e1.edge_filter = Some(BTreeSet::from([gog.edge("e1").unwrap()]));
    let q = find_equiv_path(&gog, pink, &a, &b, &only_e1).unwrap().unwrap();
    q.validate(&gog).unwrap();
    let e1 = fwd(&gog, "e1");
    assert_eq!(q.types(), vec![e1, e1.rev()]);
    assert_eq!(q.steps[0].label, l(&[&[1, 1]]));
    assert!(q.to_hgraph(gog.clone()).unwrap().graph.is_valid());
}

#[test]
fn reversed_paths_stay_valid() {
    let gog = samples::h0();
    let (a, b) = (l(&[&[1, 0]]), l(&[&[2, 0]]));
    let mut only_e1 = SearchOptions::depth(2);
    only_e1.edge_filter = Some(BTreeSet::from([gog.edge("e1").unwrap()]));
    let q = find_equiv_path(&gog, 0, &a, &b, &only_e1).unwrap().unwrap();
    let r = q.reversed(&gog);
    r.validate(&gog).unwrap();
    assert_eq!(r.start, b);
    assert_eq!(r.end_label(), &a);
    assert_eq!(r.reversed(&gog), q);
}

#[test]
fn prefix_and_suffix_adjust_end_types() {
    let gog = samples::h0();
    let e0 = fwd(&gog, "e0");
    let e1 = fwd(&gog, "e1");
    let p = HPath::empty(0, Lattice::full(2));
    let q = prefix_with(&gog, &p, e1, 6).unwrap();
    q.validate(&gog).unwrap();
    assert_eq!(q.steps[0].edge, e1);
    assert_eq!(q.end_label(), &Lattice::full(2));
    let r = suffix_with(&gog, &q, e0, 6).unwrap();
    r.validate(&gog).unwrap();
    assert_eq!(r.steps[0].edge, e1);
    assert_eq!(r.steps.last().unwrap().edge, e0.rev());
}

#[test]
fn cycle_witness_with_a_loop() {
    let gog = samples::h0();
    for lab in [Lattice::full(2), l(&[&[1, 0]]), Lattice::zero(2)] {
        let w = build_cycle_witness(gog.clone(), 0, &lab).unwrap();
        assert!(w.graph.is_valid());
        assert_eq!(w.graph.vertex(w.base).label, lab);
        let deficient: BTreeSet<usize> = w.graph.deficiencies().unwrap().iter().map(|d| d.vertex).collect();
        assert!(deficient.len() >= 2);
        assert_eq!(w.graph.edge_count(), w.graph.vertex_count());
    }
}

#[test]
fn cycle_witness_without_a_loop() {
    let gog = samples::exgbs();
    let w = build_cycle_witness(gog.clone(), 0, &Lattice::full(2)).unwrap();
    assert!(w.graph.is_valid());
    assert!(w.graph.is_connected());
    assert_eq!(w.graph.edge_count(), w.graph.vertex_count());
}

#[test]
fn degenerate_shapes_are_rejected() {
    assert!(matches!(build_cycle_witness(samples::loop_2i_i(), 0, &Lattice::full(2)), Err(Error::UnsupportedShape(_))));
    assert!(matches!(build_cycle_witness(samples::rose2(), 0, &Lattice::full(2)), Err(Error::UnsupportedShape(_))));
}

#[test]
fn merge_two_copies() {
    let gog = samples::h0();
    let p = HGraph::single_vertex(gog.clone(), 0, l(&[&[1, 0]])).unwrap();
    let out = merge_same_phenotype(&[p.clone(), p.clone()], &SearchOptions::depth(4)).unwrap();
    let MergeOutcome::Merged(rep) = out else { panic!("merge failed") };
    assert!(rep.merged.graph.is_valid());
    assert!(rep.merged.graph.is_connected());
    assert!(rep.connecting_lengths[0] >= 2);
    assert_eq!(rep.copies.len(), 2);
    let single = merge_same_phenotype(std::slice::from_ref(&p), &SearchOptions::depth(4)).unwrap();
    assert_eq!(single, MergeOutcome::Merged(MergeReport { merged: p.clone(), copies: vec![vec![0]], connecting_lengths: vec![] }));
    let other = HGraph::single_vertex(samples::exgbs(), 0, Lattice::full(2)).unwrap();
    assert_eq!(merge_same_phenotype(&[p, other], &SearchOptions::depth(4)), Err(Error::MixedGog));
}

#[test]
fn json_and_dot_are_stable() {
    let (h, _) = exhgraph();
    let s = h.to_json();
    let back = HGraph::from_json(&s).unwrap();
    assert_eq!(back, h);
    assert_eq!(back.to_json(), s);
    assert_eq!(h.export_dot(None), back.export_dot(None));
    let empty = HGraph::new(samples::h0());
    assert_eq!(empty.export_dot(None), "digraph hgraph {\n}\n");
    let p = HGraph::single_vertex(samples::h0(), 0, Lattice::full(2)).unwrap();
    assert_eq!(PointedHGraph::from_json(&p.to_json()).unwrap(), p);
}
