//! Divisor theory on finite loopless multigraphs: chip-firing, Dhar's burning
//! algorithm, reduced divisors, Baker–Norine rank and gonality sequences, with
//! constructions and exhaustive checks for quasi-banana graphs.

pub mod banana;
pub mod chipfire;
pub mod error;
pub mod explore;
pub mod multigraph;
pub mod ranks;

pub use chipfire::{Divisor, FiringScript};
pub use error::{Error, Result};
pub use multigraph::Multigraph;
