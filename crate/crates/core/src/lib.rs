//! Runs in k-block-factor processes.
//!
//! A k-block factor is the process `Z_i = f(U_i, ..., U_{i+k-1})` obtained by
//! sliding a width-`k` window over i.i.d. noise. This crate computes, exactly
//! and by simulation, the probability that such a process is constant or
//! monotone on `l` consecutive windows, together with the graph machinery that
//! controls those probabilities: increasing de Bruijn graphs, their chromatic
//! numbers, and colorings that avoid long monochromatic paths.
//!
//! * [`debruijn`]: the graphs `D(k, m)`, colex ranking, line-graph bijection.
//! * [`coloring`]: chromatic numbers, the subset lift, monochromatic paths,
//!   Chvátal checks and path-avoiding coloring search.
//! * [`blockfactor`]: grid functions, exact and Monte-Carlo run
//!   probabilities, path counting, and the adversarial construction `h`.
//! * [`bounds`]: tower functions and the explicit constants.

pub mod blockfactor;
pub mod bounds;
pub mod coloring;
pub mod debruijn;
mod error;
pub(crate) mod serde_util;

pub use blockfactor::{
    GridFunction, MCEstimate, Noise, ProcessSpec, RunEvent, RunReport, Value,
};
pub use coloring::{DirectedPath, EdgeColoring, SearchOutcome, VertexColoring};
pub use debruijn::{DeBruijnGraph, IncreasingWord, VertexRank};
pub use error::{Error, ErrorKind, Result};
