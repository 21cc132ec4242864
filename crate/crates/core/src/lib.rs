//! Numerical toolkit for almost-periodic Fourier series in the Stepanov space.

pub mod error;
pub mod evaluator;
pub mod experiments;
pub mod format;
pub mod norms;
pub mod conditions;
pub mod correlation;
pub mod quadrature;
pub mod reduction;
pub mod rng;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quadrature::Rule;
pub use series::{
    APSeries, CoeffSeq, Diagnostic, DilatedSeries, FrequencyKind, FrequencySeq, SampleGrid, Usage,
};
