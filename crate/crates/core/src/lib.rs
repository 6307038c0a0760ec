//! Exact linear algebra for the Plücker embedding of the Lagrangian
//! Grassmannian `LG(n, 2n)` and the linear relations cutting it out.

#![allow(clippy::needless_range_loop)]

pub mod blocks;
pub mod combinatorics;
pub mod error;
pub mod field;
pub mod formats;
pub mod frlc;
pub mod linalg;
pub mod symplectic;

pub use combinatorics::IndexTuple;
pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use frlc::{build_pluecker_matrix, PlueckerMatrix};
pub use symplectic::ExteriorVector;
