//! The semidirect case `G = Z^d x| F_r`: one vertex carrying `r` loops with unimodular labels.
//!
//! The loop `a_i = (A_i, B_i)` acts on `Z^d` by `P_i = A_i B_i^{-1}`. Crossing an
//! `a_i` edge of an H-graph multiplies labels by `B_i A_i^{-1} = P_i^{-1}`, so the
//! vertex reached from the base by `w` carries `ρ(w)^{-1} Λ0`; every vertex label
//! set is an `F_r`-orbit.

mod free;

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use free::{FreeWord, StallingsGraph};

use crate::error::{Error, Result};
use crate::exactmat::IntMatrix;
use crate::exec::Exec;
use crate::gog::{EdgeRecord, GbsGraph, OrientedEdge};
use crate::hgraph::{HGraph, PointedHGraph};
use crate::lattice::Lattice;
use crate::phenotype::has_finite_cyclic_orbit;

/// Matrices `P_1, ..., P_r` of the action; all unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoseRep {
    d: usize,
    mats: Vec<IntMatrix>,
    inverses: Vec<IntMatrix>,
}

impl RoseRep {
    pub fn new(d: usize, mats: Vec<IntMatrix>) -> Result<Self> {
        let mut inverses = Vec::new();
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.rows() });
            }
            if !m.is_unimodular() {
                return Err(Error::InvalidRep(format!("P_{} is not unimodular", i + 1)));
            }
            inverses.push(m.inverse_unimodular()?);
        }
        Ok(RoseRep { d, mats, inverses })
    }

    /// Reads `P_i = m_src m_trg^{-1}` off the loops, in edge order.
    pub fn from_gog(gog: &GbsGraph) -> Result<Self> {
        gog.ensure_valid()?;
        if !gog.is_semidirect() {
            return Err(Error::ShapeMismatch("expected one vertex with unimodular loops".into()));
        }
        let mats = gog
            .edge_records()
            .iter()
            .map(|e| e.m_src.mul(&e.m_trg.inverse_unimodular()?))
            .collect::<Result<Vec<_>>>()?;
        RoseRep::new(gog.dim(), mats)
    }

    /// Loops `a_i = (P_i, I)` at a vertex `v`.
    pub fn to_gog(&self) -> Result<GbsGraph> {
        let edges = self
            .mats
            .iter()
            .enumerate()
            .map(|(i, m)| EdgeRecord { id: format!("a{}", i + 1), src: "v".into(), trg: "v".into(), m_src: m.clone(), m_trg: IntMatrix::identity(self.d) })
            .collect();
        GbsGraph::new(self.d, vec!["v".into()], edges)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> usize {
        self.mats.len()
    }

    pub fn matrix(&self, i: usize) -> &IntMatrix {
        &self.mats[i]
    }

    /// `P_i` for `letter = i + 1`, `P_i^{-1}` for `-(i + 1)`.
    fn letter(&self, x: i32) -> &IntMatrix {
        let i = x.unsigned_abs() as usize - 1;
        if x > 0 {
            &self.mats[i]
        } else {
            &self.inverses[i]
        }
    }

    fn check_word(&self, w: &FreeWord) -> Result<()> {
        if w.max_generator() > self.mats.len() {
            return Err(Error::InvalidArgument(format!("word `{w}` uses a generator beyond a{}", self.mats.len())));
        }
        Ok(())
    }

    /// `ρ(γ)`, the product of `P_i^{±1}` along `γ`.
    pub fn rho(&self, w: &FreeWord) -> Result<IntMatrix> {
        self.check_word(w)?;
        let mut out = IntMatrix::identity(self.d);
        for &x in w.letters() {
            out = out.mul(self.letter(x))?;
        }
        Ok(out)
    }
}

/// `(u, γ)` with product `(u, γ)(v, δ) = (u + ρ(γ)v, γδ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemidirectElement {
    pub u: Vec<BigInt>,
    pub gamma: FreeWord,
}

impl SemidirectElement {
    pub fn identity(d: usize) -> Self {
        SemidirectElement { u: vec![BigInt::zero(); d], gamma: FreeWord::identity() }
    }

    pub fn mul(&self, other: &SemidirectElement, rose: &RoseRep) -> Result<SemidirectElement> {
        for x in [self, other] {
            if x.u.len() != rose.dim() {
                return Err(Error::DimensionMismatch { expected: rose.dim(), found: x.u.len() });
            }
        }
        let moved = rose.rho(&self.gamma)?.mul_vec(&other.u)?;
        let u = self.u.iter().zip(moved).map(|(a, b)| a + b).collect();
        Ok(SemidirectElement { u, gamma: self.gamma.mul(&other.gamma) })
    }

    /// `(-ρ(γ)^{-1} u, γ^{-1})`.
    pub fn inverse(&self, rose: &RoseRep) -> Result<SemidirectElement> {
        if self.u.len() != rose.dim() {
            return Err(Error::DimensionMismatch { expected: rose.dim(), found: self.u.len() });
        }
        let gi = self.gamma.inverse();
        let u = rose.rho(&gi)?.mul_vec(&self.u)?.into_iter().map(|x| -x).collect();
        Ok(SemidirectElement { u, gamma: gi })
    }
}

/// A subgroup `H`: `H ∩ Z^d`, the core of `π(H)` and one lift per core generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupRep {
    pub lattice: Lattice,
    pub core_words: Vec<FreeWord>,
    pub core: StallingsGraph,
    pub lifts: Vec<Vec<BigInt>>,
}

#[derive(Serialize, Deserialize)]
struct SubgroupDoc {
    lattice: Lattice,
    core_words: Vec<FreeWord>,
    #[serde(default, serialize_with = "serialize_int_rows", deserialize_with = "crate::exactmat::deserialize_int_rows")]
    lifts: Vec<Vec<BigInt>>,
}

fn serialize_int_rows<S: serde::Serializer>(rows: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::exactmat::int_to_string_rows(rows).serialize(s)
}

impl SubgroupRep {
    /// Lifts default to zero vectors.
    pub fn new(rose: &RoseRep, lattice: Lattice, core_words: Vec<FreeWord>, lifts: Option<Vec<Vec<BigInt>>>) -> Result<Self> {
        let core = StallingsGraph::fold(rose.generators(), &core_words)?;
        let lifts = lifts.unwrap_or_else(|| vec![vec![BigInt::zero(); rose.dim()]; core_words.len()]);
        Ok(SubgroupRep { lattice, core_words, core, lifts })
    }

    pub fn from_json(s: &str, rose: &RoseRep) -> Result<Self> {
        let doc: SubgroupDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let lifts = if doc.lifts.is_empty() { None } else { Some(doc.lifts) };
        SubgroupRep::new(rose, doc.lattice, doc.core_words, lifts)
    }

    pub fn to_json(&self) -> String {
        let doc = SubgroupDoc {
            lattice: self.lattice.clone(),
            core_words: self.core_words.clone(),
            lifts: self.lifts.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("subgroup serializes")
    }

    /// Generators of `H`: a basis of the lattice and the lifted core words.
    pub fn generators(&self) -> Vec<SemidirectElement> {
        let mut out: Vec<SemidirectElement> = self.lattice.basis_vectors().into_iter().map(|u| SemidirectElement { u, gamma: FreeWord::identity() }).collect();
        out.extend(self.core_words.iter().zip(&self.lifts).map(|(w, u)| SemidirectElement { u: u.clone(), gamma: w.clone() }));
        out
    }

    /// Dimensions, lift count and `ρ(γ) Λ0 = Λ0` for every basis word of the core.
    pub fn validate(&self, rose: &RoseRep) -> Result<()> {
        if self.lattice.dim() != rose.dim() {
            return Err(Error::InvalidRep(format!("lattice lives in Z^{}, expected Z^{}", self.lattice.dim(), rose.dim())));
        }
        if self.lifts.len() != self.core_words.len() || self.lifts.iter().any(|u| u.len() != rose.dim()) {
            return Err(Error::InvalidRep("need one lift in Z^d per core word".into()));
        }
        if self.core.rank_of_free_group() != rose.generators() {
            return Err(Error::InvalidRep("core is over a different free group".into()));
        }
        for w in self.core.free_basis() {
            if self.lattice.image(&rose.rho(&w)?)? != self.lattice {
                return Err(Error::InvalidRep(format!("core word `{w}` does not stabilize the lattice")));
            }
        }
        Ok(())
    }
}

/// `π(H)` has infinite index in `F_r`; requires `r >= 2`, where the group is non-amenable.
pub fn kernel_member(rep: &SubgroupRep, rose: &RoseRep) -> Result<bool> {
    rep.validate(rose)?;
    if rose.generators() < 2 {
        return Err(Error::UnsupportedShape(format!("Z^{} x| F_{} is amenable", rose.dim(), rose.generators())));
    }
    Ok(!rep.core.is_finite_index())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum OrbitOutcome {
    Closed { lattices: Vec<Lattice> },
    /// Holds `budget + 1` distinct lattices.
    ExceededBudget { reached: Vec<Lattice> },
}

impl OrbitOutcome {
    pub fn lattices(&self) -> &[Lattice] {
        match self {
            OrbitOutcome::Closed { lattices } => lattices,
            OrbitOutcome::ExceededBudget { reached } => reached,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, OrbitOutcome::Closed { .. })
    }
}

/// `(source, generator, target)` indices into the orbit.
type OrbitEdge = (usize, usize, usize);

/// BFS orbit with the edge relation `x -a_i-> P_i^{-1} x`; returns the edges too.
fn orbit_graph(rose: &RoseRep, l: &Lattice, budget: usize) -> Result<(OrbitOutcome, Vec<OrbitEdge>)> {
    if l.dim() != rose.dim() {
        return Err(Error::DimensionMismatch { expected: rose.dim(), found: l.dim() });
    }
    let mut lattices = vec![l.clone()];
    let mut index = HashMap::from([(l.clone(), 0usize)]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in 0..rose.generators() {
            for (m, forward) in [(&rose.inverses[g], true), (&rose.mats[g], false)] {
                let next = lattices[i].image(m)?;
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        lattices.push(next.clone());
                        if lattices.len() > budget {
                            return Ok((OrbitOutcome::ExceededBudget { reached: lattices }, edges));
                        }
                        index.insert(next, lattices.len() - 1);
                        queue.push_back(lattices.len() - 1);
                        lattices.len() - 1
                    }
                };
                if forward {
                    edges.push((i, g, j));
                }
            }
        }
    }
    Ok((OrbitOutcome::Closed { lattices }, edges))
}

/// `{ρ(γ) L}` up to `budget` lattices.
pub fn orbit_lattice(rose: &RoseRep, l: &Lattice, budget: usize) -> Result<OrbitOutcome> {
    Ok(orbit_graph(rose, l, budget)?.0)
}

/// Core of `Stab_{F_r}(L)` for full-rank `L`: the orbit coset graph, of index the orbit size.
pub fn stabilizer_core(rose: &RoseRep, l: &Lattice) -> Result<StallingsGraph> {
    if !l.is_full_rank() {
        return Err(Error::BadRank(format!("rank {} < {}: the orbit may be infinite", l.rank(), l.dim())));
    }
    let (outcome, edges) = orbit_graph(rose, l, usize::MAX)?;
    let n = outcome.lattices().len();
    let core = StallingsGraph::from_raw(rose.generators(), n, edges);
    if core.index() != Some(n) {
        return Err(Error::InvariantViolation("orbit coset graph is not a complete covering".into()));
    }
    Ok(core)
}

/// Reduced words of length `1..=max_len` with `ρ(w) L = L`.
pub fn stabilizer_words(rose: &RoseRep, l: &Lattice, max_len: usize, exec: Exec) -> Result<Vec<FreeWord>> {
    if l.dim() != rose.dim() {
        return Err(Error::DimensionMismatch { expected: rose.dim(), found: l.dim() });
    }
    let words = FreeWord::enumerate(rose.generators(), max_len);
    let hits = exec.map(&words, |w| -> Result<bool> { Ok(l.image(&rose.rho(w)?)? == *l) });
    let mut out = Vec::new();
    for (w, hit) in words.into_iter().zip(hits) {
        if hit? {
            out.push(w);
        }
    }
    Ok(out)
}

/// Three-valued answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceClass {
    /// The piece of subgroups meeting `Z^d` in the orbit of `L` is closed.
    pub p_closed: Tri,
    /// Its countable open part is empty.
    pub d_empty: Tri,
    pub case: String,
    pub reason: String,
    /// Orbit size when it closed within budget.
    pub orbit_size: Option<usize>,
    /// Free basis of the subgroup generated by the stabilizing words found.
    pub stabilizer_basis: Vec<FreeWord>,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub budget: usize,
    /// Length of the stabilizer word search.
    pub word_len: usize,
    pub exec: Exec,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { budget: 10_000, word_len: 6, exec: Exec::default() }
    }
}

/// Longest word tried when certifying an infinite orbit.
const CERTIFICATE_LEN: usize = 3;

/// A word whose cyclic action on `span_Q(L)` is infinite, if one of length `<= CERTIFICATE_LEN` exists.
fn infinite_orbit_certificate(rose: &RoseRep, l: &Lattice) -> Result<Option<FreeWord>> {
    if l.is_zero() || l.is_full_rank() {
        return Ok(None);
    }
    for w in FreeWord::enumerate(rose.generators(), CERTIFICATE_LEN) {
        if !has_finite_cyclic_orbit(&rose.rho(&w)?.to_rat(), l)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub fn classify_piece(rose: &RoseRep, l: &Lattice, opts: &ClassifyOptions) -> Result<PieceClass> {
    let orbit = orbit_lattice(rose, l, opts.budget)?;
    if let OrbitOutcome::Closed { lattices } = &orbit {
        let n = lattices.len();
        let case = if l.is_full_rank() { "𝒟_𝒞 = ∅; 𝒫_𝒞 is clopen" } else { "𝒟_𝒞 = ∅; 𝒫_𝒞 is closed" };
        return Ok(PieceClass {
            p_closed: Tri::True,
            d_empty: Tri::True,
            case: case.into(),
            reason: format!("the stabilizer has index {n} in F_{}", rose.generators()),
            orbit_size: Some(n),
            stabilizer_basis: stabilizer_core(rose, l).map(|c| c.free_basis()).unwrap_or_default(),
        });
    }
    if l.is_full_rank() {
        return Ok(PieceClass {
            p_closed: Tri::True,
            d_empty: Tri::True,
            case: "𝒟_𝒞 = ∅; 𝒫_𝒞 is clopen".into(),
            reason: format!("full-rank orbit is finite but exceeds the budget {}", opts.budget),
            orbit_size: None,
            stabilizer_basis: Vec::new(),
        });
    }
    let certificate = infinite_orbit_certificate(rose, l)?;
    let p_closed = if certificate.is_some() { Tri::False } else { Tri::Unknown };
    let words = stabilizer_words(rose, l, opts.word_len, opts.exec)?;
    let basis = StallingsGraph::fold(rose.generators(), &words)?.free_basis();
    let orbit_note = match &certificate {
        Some(w) => format!("`{w}` moves the rational span with infinite period"),
        None => format!("orbit exceeds {} lattices", opts.budget),
    };
    let (d_empty, case, reason) = if basis.len() == 1 && certificate.is_some() {
        (
            Tri::False,
            "𝒟_𝒞 = 𝒫_𝒞".to_string(),
            format!("{orbit_note}; stabilizing words up to length {} are the powers of `{}`, so the stabilizer is taken to be infinite cyclic", opts.word_len, basis[0]),
        )
    } else {
        (Tri::Unknown, "undetermined".to_string(), format!("{orbit_note}; {} stabilizer generators found up to length {}", basis.len(), opts.word_len))
    };
    Ok(PieceClass { p_closed, d_empty, case, reason, orbit_size: None, stabilizer_basis: basis })
}

/// `P diag(d_1, ..., d_s, c, ..., c) Z^d` with `c = N d_1 ... d_s`, from `L = P diag(d_1, ..., d_s, 0, ...) Z^d`.
///
/// Equals `L + c Z^d`, hence does not depend on the choice of `P` and is
/// preserved by every matrix of `GL_d(Z)` stabilizing `L`.
pub fn lambda_n(l: &Lattice, n: u64) -> Result<Lattice> {
    if l.is_full_rank() {
        return Err(Error::BadRank("the lattice already has full rank".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let (p, ds) = l.smith_form();
    let c = ds.iter().fold(BigInt::from(n), |acc, x| acc * x);
    let d = l.dim();
    let mut diag = IntMatrix::zeros(d, d);
    for i in 0..d {
        diag.set(i, i, ds.get(i).cloned().unwrap_or_else(|| c.clone()));
    }
    Ok(Lattice::from_matrix(&p.mul(&diag)?))
}

/// Least `N` with `λ_N(L) ∩ [-B, B]^d = L ∩ [-B, B]^d` guaranteed.
///
/// A point of `λ_N(L)` outside `L` has some coordinate `j > s` of `P^{-1} x`
/// that is a nonzero multiple of `c`; that coordinate is at most
/// `B * |row_j(P^{-1})|_1` on the box.
pub fn lambda_n_box_threshold(l: &Lattice, b: u64) -> Result<BigInt> {
    if l.is_full_rank() {
        return Err(Error::BadRank("the lattice already has full rank".into()));
    }
    let (p, ds) = l.smith_form();
    let pinv = p.inverse_unimodular()?;
    let norm = (ds.len()..l.dim()).map(|j| pinv.row(j).iter().map(|x| x.abs()).sum::<BigInt>()).max().unwrap_or_else(BigInt::zero);
    let prod: BigInt = ds.iter().product();
    // Need N * prod > b * norm.
    Ok(BigInt::from(b) * norm / prod + BigInt::one())
}

/// The H-graph of `H`: the core with label `ρ(w)^{-1} Λ0` at the vertex reached by `w`.
pub fn hgraph_of_subgroup(rep: &SubgroupRep, rose: &RoseRep, gog: Arc<GbsGraph>) -> Result<PointedHGraph> {
    if RoseRep::from_gog(&gog)? != *rose {
        return Err(Error::ShapeMismatch("the graph of groups does not match the rose".into()));
    }
    if rep.lattice.dim() != rose.dim() {
        return Err(Error::DimensionMismatch { expected: rose.dim(), found: rep.lattice.dim() });
    }
    let core = &rep.core;
    let mut labels: Vec<Option<Lattice>> = vec![None; core.vertex_count()];
    labels[0] = Some(rep.lattice.clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let lv = labels[v].clone().expect("visited");
        for &(s, g, t) in core.edges() {
            let (w, m) = if s == v { (t, &rose.inverses[g]) } else if t == v { (s, &rose.mats[g]) } else { continue };
            if labels[w].is_none() {
                labels[w] = Some(lv.image(m)?);
                queue.push_back(w);
            }
        }
    }
    let mut h = HGraph::new(gog);
    for l in &labels {
        h.add_vertex(None, 0, l.clone().ok_or_else(|| Error::InvariantViolation("core is disconnected".into()))?)?;
    }
    for &(s, g, t) in core.edges() {
        let expected = h.vertex(s).label.image(&rose.inverses[g])?;
        if expected != h.vertex(t).label {
            return Err(Error::InvariantViolation(format!("a cycle through a{} moves the lattice", g + 1)));
        }
        h.add_oriented_edge(OrientedEdge::forward(g), s, t)?;
    }
    h.ensure_valid().map_err(|e| Error::InvariantViolation(e.to_string()))?;
    Ok(PointedHGraph { graph: h, base: 0 })
}
