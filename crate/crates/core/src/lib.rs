//! Boltzmann random perfect matchings on contracting square-hexagon
//! lattices with 1×n periodic edge weights: exact partition functions
//! (Schur / Kasteleyn / enumeration), exact samplers, limit-shape density,
//! frozen-boundary curves and GUE-corner statistics.

pub mod error;
pub mod lattice;
pub mod signatures;
pub mod schur;
pub mod kasteleyn;
pub mod rng;
pub mod sample;
pub mod poly;
pub mod limitshape;
pub mod analysis;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{build_lattice, classify_rows, Direction, Graph, LatticeSpec, PeriodicWeights};
pub use limitshape::{BoundaryMeasureSpec, DensityQuery, FrozenBoundaryCurve};
pub use signatures::{
    chain_to_matching, counting_measure, matching_to_chain, CountingMeasure, Matching,
    MayaDiagram, Signature, SignatureChain,
};
