//! Decoherence from random momentum kicks, treated as Lévy processes acting on
//! the off-diagonal elements of a density matrix in position space.
//!
//! The characteristic function of the accumulated momentum transfer,
//! Φ(t,s) = e^{tΨ(s)}, multiplies the coherence between points separated by s.

pub mod error;
pub mod evolution;
pub mod grid;
pub mod levy;
pub mod models;
pub mod sampling;
pub mod spectral;

pub use error::{Axiom, Error, Result};
pub use grid::SeparationGrid;
