pub mod chain;
pub mod effective;
pub mod error;
pub mod file;
pub mod lattice;
pub mod render;
pub mod scenario;
pub mod simplicial;
pub mod spectral;

pub use chain::{ChainComplex, Combination, FiltrationFn, Generator, Key, Morphism};
pub use effective::{EffectiveHomology, Equivalence, FilteredEquivalence, Reduction, SampleSpec};
pub use error::{Error, Result};
pub use lattice::{Component, GroupPresentation, IntMatrix, IntVector, SmithDecomposition};
pub use simplicial::{AbSimplex, SimplicialSet};
pub use spectral::{make_filtered, ConvergenceReport, FilteredComplex, PageGroup};
