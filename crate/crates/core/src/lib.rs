//! Exact and statistical analysis of the r-th order nonlinearity of Boolean
//! functions: truth tables and their transforms, Reed–Muller code
//! enumeration, nonlinearity search, closed-form tail bounds, and seeded
//! Monte Carlo experiments.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod nonlin;
pub mod rmcode;
pub mod sampling;
pub mod truth_table;

pub use error::{Error, Result};
pub use nonlin::NonlinearityResult;
pub use rmcode::{MonomialBasis, RmCodeSpec, SeparatedSet, WeightCensus};
pub use sampling::SeedSpec;
pub use truth_table::{AnfCoefficients, TruthTable, WalshSpectrum};
