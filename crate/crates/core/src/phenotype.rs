//! Invariants of label equivalence: rank, the phenotype δ and the modular span orbit.
//!
//! Equivalent labels have equal rank, equal δ (full rank only) and
//! commensurable images under the modular homomorphism. The decision
//! procedure checks these first and then searches for a witness path.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmat::{serialize_int, serialize_ints, RatMatrix};
use crate::exec::Exec;
use crate::gog::GbsGraph;
use crate::hgraph::{find_equiv_path, propagate_label, HPath, SearchOptions};
use crate::lattice::{Index, Lattice};

/// Prime factors by trial division.
pub fn prime_factors(n: &BigInt) -> BTreeSet<BigInt> {
    let mut n = n.abs();
    let mut out = BTreeSet::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.insert(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.insert(n);
    }
    out
}

/// Primes dividing the determinant of some edge label.
pub fn prime_set(gog: &GbsGraph) -> Result<BTreeSet<BigInt>> {
    gog.ensure_valid()?;
    let mut out = BTreeSet::new();
    for e in gog.edge_records() {
        out.extend(prime_factors(&e.m_src.det()?));
        out.extend(prime_factors(&e.m_trg.det()?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delta {
    Value(BigInt),
    /// The label has rank below `d`.
    Undefined,
}

impl Serialize for Delta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delta::Value(n) => s.serialize_str(&n.to_string()),
            Delta::Undefined => s.serialize_str("undefined"),
        }
    }
}

impl std::fmt::Display for Delta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Delta::Value(n) => write!(f, "{n}"),
            Delta::Undefined => f.write_str("undefined"),
        }
    }
}

/// The part of `|Z^d / L|` prime to the prime set of the graph.
pub fn delta(gog: &GbsGraph, l: &Lattice) -> Result<Delta> {
    if l.dim() != gog.dim() {
        return Err(Error::DimensionMismatch { expected: gog.dim(), found: l.dim() });
    }
    let Index::Finite(mut n) = l.det_index() else { return Ok(Delta::Undefined) };
    for p in prime_set(gog)? {
        while n.is_multiple_of(&p) {
            n /= &p;
        }
    }
    Ok(Delta::Value(n))
}

/// Modular generators at `v` followed by their inverses.
fn generators_with_inverses(gog: &GbsGraph, v: usize) -> Result<Vec<(String, RatMatrix)>> {
    let gens = gog.modular_generators(v, None)?;
    let mut out = Vec::new();
    for g in &gens {
        out.push((gog.edge_record(g.edge).id.clone(), g.matrix.clone()));
    }
    for g in &gens {
        out.push((format!("{}^-1", gog.edge_record(g.edge).id), g.matrix.inverse()?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanOrbit {
    /// Saturated lattices, one per commensurability class, in BFS order.
    pub classes: Vec<Lattice>,
    pub closed: bool,
}

/// Orbit of the rational span of `l` under the modular image at `v`.
pub fn modular_span_orbit(gog: &GbsGraph, v: usize, l: &Lattice, budget: usize) -> Result<SpanOrbit> {
    let gens = generators_with_inverses(gog, v)?;
    let start = l.saturation();
    if budget == 0 {
        return Ok(SpanOrbit { classes: vec![], closed: false });
    }
    let mut classes = vec![start.clone()];
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (_, g) in &gens {
            let next = classes[i].rational_span_image(g)?;
            if seen.contains(&next) {
                continue;
            }
            if classes.len() == budget {
                return Ok(SpanOrbit { classes, closed: false });
            }
            seen.insert(next.clone());
            classes.push(next);
            queue.push_back(classes.len() - 1);
        }
    }
    Ok(SpanOrbit { classes, closed: true })
}

fn euler_phi(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Least common multiple of every `m` with `φ(m) <= d(d-1)`.
///
/// The ratio of two eigenvalues of a `d x d` rational matrix lies in a field of
/// degree at most `d(d-1)`, so any root of unity among such ratios has an
/// order dividing this number.
pub fn root_of_unity_exponent(d: usize) -> u64 {
    let b = ((d * d.saturating_sub(1)) as u64).max(1);
    (1..=2 * b * b + 2).filter(|&m| euler_phi(m) <= b).fold(1, |acc, m| acc.lcm(&m))
}

/// Whether `g^n` maps `span_Q(l)` onto itself for some `n >= 1`.
///
/// Exact: for `M` from [`root_of_unity_exponent`], the map `λ -> λ^M` merges
/// exactly the eigenvalues whose ratio is a root of unity, so `g^M` has the
/// invariant subspaces of every `g^n` and this holds iff `g^M` fixes the span.
pub fn has_finite_cyclic_orbit(g: &RatMatrix, l: &Lattice) -> Result<bool> {
    let m = root_of_unity_exponent(l.dim());
    let s = l.saturation();
    Ok(s.rational_span_image(&g.pow(m)?)? == s)
}

/// Reduced words over `n` letters and their inverses (`i + n` inverts `i`), lengths `1..=max_len`.
pub(crate) fn reduced_words(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let inv = |a: usize| if a < n { a + n } else { a - n };
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..2 * n {
                if w.last().is_some_and(|&b| b == inv(a)) {
                    continue;
                }
                let mut x = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CorVerdict {
    /// `word` generates an infinite cyclic orbit of the span.
    Satisfied { word: Vec<String> },
    /// The span orbit is finite.
    Violated { orbit_size: usize },
    Unknown,
}

/// Longest generator product tried as a certificate.
const CERTIFICATE_LEN: usize = 3;

/// Whether the stabilizer of the commensurability class of `l` has infinite index
/// in the modular image; requires `0 < rank(l) < d`.
pub fn cor_criterion(gog: &GbsGraph, v: usize, l: &Lattice, budget: usize) -> Result<CorVerdict> {
    let r = l.rank();
    if r == 0 || r == gog.dim() {
        return Err(Error::BadRank(format!("rank {r} is not strictly between 0 and {}", gog.dim())));
    }
    let gens = generators_with_inverses(gog, v)?;
    let n = gens.len() / 2;
    for w in reduced_words(n, budget.min(CERTIFICATE_LEN)) {
        let mut g = RatMatrix::identity(gog.dim());
        for &a in &w {
            g = g.mul(&gens[a].1)?;
        }
        if !has_finite_cyclic_orbit(&g, l)? {
            return Ok(CorVerdict::Satisfied { word: w.iter().map(|&a| gens[a].0.clone()).collect() });
        }
    }
    let orbit = modular_span_orbit(gog, v, l, budget)?;
    if orbit.closed {
        return Ok(CorVerdict::Violated { orbit_size: orbit.classes.len() });
    }
    Ok(CorVerdict::Unknown)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum Distinction {
    Rank { left: usize, right: usize },
    Delta {
        #[serde(serialize_with = "serialize_int")]
        left: BigInt,
        #[serde(serialize_with = "serialize_int")]
        right: BigInt,
    },
    /// The span of `right` is not commensurable to any modular image of `left`.
    SpanOrbit { orbit_size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    Equivalent(HPath),
    Distinguished(Distinction),
    Unknown,
}

#[derive(Clone, Debug)]
pub struct EquivOptions {
    /// Witness search depth.
    pub depth: usize,
    /// State budget shared by the span orbit and the witness search.
    pub budget: usize,
    pub exec: Exec,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { depth: 8, budget: 10_000, exec: Exec::default() }
    }
}

fn check_decidable_shape(gog: &GbsGraph) -> Result<()> {
    let r = gog.reduce()?;
    if r.is_amenable()?.amenable {
        return Err(Error::UnsupportedShape("the group is amenable".into()));
    }
    if r.is_semidirect() {
        return Err(Error::UnsupportedShape("the group is a semidirect product Z^d x| F_r".into()));
    }
    Ok(())
}

/// Decides `l0 ≃ l1` at `v` when an invariant separates them or a witness is found.
pub fn equiv_decide(gog: &GbsGraph, v: usize, l0: &Lattice, l1: &Lattice, opts: &EquivOptions) -> Result<EquivVerdict> {
    check_decidable_shape(gog)?;
    for l in [l0, l1] {
        if l.dim() != gog.dim() {
            return Err(Error::DimensionMismatch { expected: gog.dim(), found: l.dim() });
        }
    }
    if l0 == l1 {
        return Ok(EquivVerdict::Equivalent(HPath::empty(v, l0.clone())));
    }
    if l0.rank() != l1.rank() {
        return Ok(EquivVerdict::Distinguished(Distinction::Rank { left: l0.rank(), right: l1.rank() }));
    }
    if let (Delta::Value(a), Delta::Value(b)) = (delta(gog, l0)?, delta(gog, l1)?) {
        if a != b {
            return Ok(EquivVerdict::Distinguished(Distinction::Delta { left: a, right: b }));
        }
    }
    if l0.rank() > 0 && l0.rank() < gog.dim() {
        let orbit = modular_span_orbit(gog, v, l0, opts.budget)?;
        let target = l1.saturation();
        if orbit.closed && !orbit.classes.contains(&target) {
            return Ok(EquivVerdict::Distinguished(Distinction::SpanOrbit { orbit_size: orbit.classes.len() }));
        }
    }
    let search = SearchOptions { depth: opts.depth, max_states: opts.budget, edge_filter: None, candidates: Vec::new(), exec: opts.exec };
    match find_equiv_path(gog, v, l0, l1, &search)? {
        Some(p) => Ok(EquivVerdict::Equivalent(p)),
        None => Ok(EquivVerdict::Unknown),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ClassProbe {
    /// Number of labels at the site reachable through minimal propagation.
    Finite { count: usize },
    ExceededBudget { explored: usize },
}

/// Closes `(v, l0)` under minimal propagation along every oriented edge.
pub fn class_finiteness_probe(gog: &GbsGraph, v: usize, l0: &Lattice, budget: usize) -> Result<ClassProbe> {
    gog.ensure_valid()?;
    let all = gog.all_oriented();
    let mut seen: HashSet<(usize, Lattice)> = HashSet::from([(v, l0.clone())]);
    let mut queue = VecDeque::from([(v, l0.clone())]);
    let mut cache: HashMap<(usize, Lattice), ()> = HashMap::new();
    while let Some((s, l)) = queue.pop_front() {
        cache.insert((s, l.clone()), ());
        for &o in all.iter().filter(|o| gog.src(**o) == s) {
            let next = (gog.trg(o), propagate_label(gog, o, &l)?);
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Ok(ClassProbe::ExceededBudget { explored: seen.len() - 1 });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(ClassProbe::Finite { count: seen.iter().filter(|(s, _)| *s == v).count() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhenotypeReport {
    pub site: String,
    pub rank: usize,
    pub delta: Delta,
    #[serde(serialize_with = "serialize_ints")]
    pub prime_set: Vec<BigInt>,
    pub span_orbit: SpanOrbit,
}

pub fn phenotype_report(gog: &GbsGraph, v: usize, l: &Lattice, budget: usize) -> Result<PhenotypeReport> {
    Ok(PhenotypeReport {
        site: gog.vertex_id(v).to_string(),
        rank: l.rank(),
        delta: delta(gog, l)?,
        prime_set: prime_set(gog)?.into_iter().collect(),
        span_orbit: modular_span_orbit(gog, v, l, budget)?,
    })
}
