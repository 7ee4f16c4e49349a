//! Flip graphs on perfect matchings of complete graphs, signed reversal
//! graphs, their spectra and colorings.

pub mod cli;
pub mod coloring;
pub mod gf;
pub mod graph;
pub mod matchings;
pub mod signed_perm;
pub mod spectra;

pub use coloring::{verify_coloring, Coloring, ColoringError};
pub use graph::{Graph, GraphError};
pub use matchings::{build_flip_graph, FlipGraph, MatchingError, PerfectMatching};
pub use signed_perm::{build_signed_reversal_graph, SignedPermError, SignedPermutation};
pub use spectra::{flip_spectrum, IntegerPartition, SpectrumError};
