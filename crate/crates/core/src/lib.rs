//! Exact algorithms for generalized Baumslag-Solitar (GBS) groups.
//!
//! A GBS group of rank `d` is the fundamental group of a finite graph of groups
//! whose vertex and edge groups are all `Z^d`. Each edge carries two nonsingular
//! integer matrices describing the inclusions of the edge group. A subgroup lies
//! in the perfect kernel of the space of subgroups exactly when its quotient of
//! the Bass-Serre tree is infinite. Subgroups are described combinatorially by
//! lattice-labelled graphs (H-graphs); the crate decides or semi-decides the
//! questions that arise about them and returns three-valued verdicts where
//! only bounded search is available.
//!
//! All arithmetic is exact (`num-bigint` / `num-rational`).

pub mod error;
pub mod exactmat;
pub mod exec;
pub mod gog;
pub mod hgraph;
pub mod lattice;
pub mod phenotype;
pub mod random;
pub mod samples;
pub mod semidirect;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use error::{Error, Result};
pub use exactmat::{IntMatrix, RatMatrix};
pub use exec::Exec;
pub use gog::{GbsGraph, OrientedEdge};
pub use hgraph::{HGraph, PointedHGraph};
pub use lattice::{Index, Lattice};
