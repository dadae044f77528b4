//! Random list colouring of powers of cycles.
//!
//! Each vertex of `C_n^k` gets a uniformly random `c`-subset of a palette of
//! `s` colours, and the question is whether a proper colouring from the lists
//! exists. The crate provides:
//!
//! * [`circulant`]: the graph `C_n^k` and its cliques;
//! * [`scheme`]: colour schemes, reproducible sampling and clique statistics;
//! * [`solver`]: an exact decision procedure with a canonical witness;
//! * [`constructive`]: explicit colourings for good schemes and gadgets;
//! * [`experiment`]: Monte Carlo estimates, Poisson fits and sweeps.

pub mod circulant;
pub mod constructive;
pub mod error;
pub mod experiment;
pub mod scheme;
pub mod solver;

pub use circulant::{Clique, CyclePower, VertexId};
pub use error::{Error, Result};
pub use scheme::{
    count_identical_list_cliques, identical_list_cliques, sample_scheme, Colour, ColourScheme,
    ListAssignment, ListSampler, RaggedLists, RngStream, SchemeParams,
};
pub use solver::{decide_colourable, is_colourable, verify_colouring, Colouring, SolveOutcome};
