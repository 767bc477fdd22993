pub mod blockform;
pub mod cli;
pub mod continuity;
pub mod error;
pub mod estimate;
pub mod gallery;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod scalar;
pub mod spectral;

pub use error::{MaxError, Result};
pub use matrix::{FiniteMaxMatrix, MaxVector, PathWitness, SparseMaxMatrix};
pub use scalar::MaxScalar;
pub use spectral::{CycleWitness, FiniteSpectrum};
