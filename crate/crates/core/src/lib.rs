//! Quivers with potentials attached to words in the braid semigroup of a
//! simply-laced graph.
//!
//! The crate builds the quivers `Q(x)` and `Q(x̃)` of a word, mutates quivers
//! with potentials (premutation followed by 2-cycle reduction), and classifies
//! primitive potentials up to right-equivalence by a class in the second
//! cohomology of a 2-dimensional CW-complex.

pub mod braid;
pub mod cohomology;
pub mod cartan;
pub mod cli;
pub mod error;
pub mod fuzz;
pub mod mutation;
pub mod potential;
pub mod qbuild;
pub mod quiver;

pub use braid::{BraidMove, Letter, MoveKind, Word};
pub use cartan::{CartanMatrix, GammaGraph, Label};
pub use error::{Error, Result};
pub use qbuild::{build_qx, build_qxtilde, BraidQuiver};
pub use quiver::{Arrow, Quiver, Vertex, VertexMap};
