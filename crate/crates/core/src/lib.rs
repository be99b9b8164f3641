//! Exact algebra for Segre and Chern currents: Gaussian-rational polynomials, quasi-cycles,
//! truncated graded series and closed-form reference values.

pub mod algebra;
pub mod cycle;
pub mod error;
pub mod form;
pub mod gauss;
pub mod intersection;
pub mod oracles;
pub mod parse;
pub mod poly;
pub mod qas;
pub mod series;

pub use cycle::{Component, ExcessPolicy, QuasiCycle};
pub use error::{AlgebraError, SeriesError};
pub use form::PolyForm;
pub use gauss::GaussRational;
pub use poly::{NumPoly, Polynomial};
pub use qas::QasDescriptor;
pub use series::{CycleAlgebra, GradedAlgebra, GradedSeries};
