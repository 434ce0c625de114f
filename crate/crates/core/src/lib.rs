//! Gauss quadrature rules built from three-term recurrence coefficients, for
//! continuous, discrete and mixed measures.

pub mod apply;
pub mod eig;
pub mod error;
pub mod exprlang;
pub mod families;
pub mod jacobi;
pub mod rule;
pub mod special;
pub mod tables;

pub use apply::{approximate, Functional, FunctionalKind};
pub use error::{Error, Result};
pub use exprlang::{parse, Expr};
pub use families::{FamilySpec, MeasureSpec, RecurrenceStream};
pub use jacobi::JacobiMatrix;
pub use rule::{gauss_rule, gauss_rule_eigenvalue_only, QuadratureRule};
