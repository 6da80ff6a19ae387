//! Exact computations around the A-hypergeometric series `Φ` of a lattice
//! point configuration with a unique interior point, and Dwork's π-adic
//! Frobenius operator `α*` acting on truncated series spaces.

pub mod dwork;
pub mod error;
pub mod hypergeom;
pub mod lattice;
pub mod padic;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{ConePoint, PointConfiguration};
pub use padic::{PiAdic, Valuation};
pub use series::{Coefficient, Series};
