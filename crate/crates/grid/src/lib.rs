//! Grid discretization of Monge–Ampère products of plurisubharmonic functions.
//!
//! Potentials are sampled on uniform boxes in ℂ^d (d ≤ 3), differentiated with central
//! differences, wedged pointwise, and integrated against the flat Kähler form.

pub mod chart;
pub mod error;
pub mod expr;
pub mod field;
pub mod lelong;
pub mod ops;
pub mod regularize;
pub mod report;
pub mod sum;

pub use chart::{GridChart, RealBox};
pub use error::GridError;
pub use expr::ScalarExpr;
pub use field::{FormField, ScalarField};
pub use lelong::{kernel_estimate, lelong_estimate, LelongEstimate};
pub use ops::{ddc, ma_power, power, wedge, Retain};
pub use regularize::{mollify_schedule, regularize_chi, regularize_mollify};
pub use report::ConvergenceReport;
