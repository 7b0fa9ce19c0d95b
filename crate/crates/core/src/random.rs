//! Seeded random instances for property suites and benchmarks.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
pub use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::exactmat::IntMatrix;
use crate::gog::{EdgeRecord, GbsGraph};
use crate::lattice::Lattice;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    IntMatrix::new(rows, cols, data).expect("sizes agree")
}

pub fn nonsingular<R: Rng>(rng: &mut R, d: usize, bound: i64) -> IntMatrix {
    loop {
        let m = matrix(rng, d, d, bound);
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// Product of random elementary matrices.
pub fn unimodular<R: Rng>(rng: &mut R, d: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(d);
    if d < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let mut e = IntMatrix::identity(d);
        e.set(i, j, BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
        m = &m * &e;
    }
    m
}

pub fn lattice_of_rank<R: Rng>(rng: &mut R, d: usize, rank: usize, bound: i64) -> Lattice {
    loop {
        let l = Lattice::from_matrix(&matrix(rng, d, rank, bound));
        if l.rank() == rank {
            return l;
        }
    }
}

/// Uniform rank in `0..=d`.
pub fn lattice<R: Rng>(rng: &mut R, d: usize, bound: i64) -> Lattice {
    let rank = rng.gen_range(0..=d);
    lattice_of_rank(rng, d, rank, bound)
}

pub fn full_rank_lattice<R: Rng>(rng: &mut R, d: usize, bound: i64) -> Lattice {
    lattice_of_rank(rng, d, d, bound)
}

/// Rank in `1..d`; requires `d >= 2`.
pub fn rank_deficient_lattice<R: Rng>(rng: &mut R, d: usize, bound: i64) -> Lattice {
    let rank = rng.gen_range(1..d);
    lattice_of_rank(rng, d, rank, bound)
}

/// Connected graph with `n` vertices and `n - 1 + extra` edges, nonsingular labels.
pub fn gog<R: Rng>(rng: &mut R, d: usize, n: usize, extra: usize, bound: i64) -> GbsGraph {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut push = |rng: &mut R, s: usize, t: usize| {
        let id = format!("e{}", edges.len());
        edges.push(EdgeRecord { id, src: vertices[s].clone(), trg: vertices[t].clone(), m_src: nonsingular(rng, d, bound), m_trg: nonsingular(rng, d, bound) });
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        push(rng, u, v);
    }
    for _ in 0..extra {
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        push(rng, s, t);
    }
    GbsGraph::new(d, vertices, edges).expect("references are consistent")
}
