//! Singular Hermitian metrics on trivialized vector bundles and their Segre and Chern currents.

pub mod chern;
pub mod decompose;
pub mod error;
pub mod fiber;
pub mod jet;
pub mod locus;
pub mod metric;
pub mod projective;
pub mod pullback;
pub mod report;
pub mod segre;

pub use error::BundleError;
pub use jet::{CompiledMetric, MatrixJet};
pub use metric::{BundleSpec, HermitianPolyMatrix, SingularMetric};
