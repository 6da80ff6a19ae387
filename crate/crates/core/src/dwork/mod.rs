//! Dwork's π-adic kernel `F(λ, x)`, the operator `α*`, its normalization `β`,
//! the explicit eigenvector built from `Φ`, and the one-variable identities
//! that fix its eigenvalue.

pub mod eigen;
pub mod gamma;
pub mod kernel;
pub mod operator;
pub mod theta;

pub use kernel::{bmu_polynomial, bmu_table_from_text, bmu_table_to_text, BmuPolynomial};
pub use operator::{DworkOperator, SElement};
pub use theta::ThetaTable;
