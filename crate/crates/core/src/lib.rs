//! Numerics for the isospectral flow `Ẋ = [X², N] = X²N − NX²` on real
//! symmetric matrices, `N` a fixed skew-symmetric matrix.
//!
//! The crate covers the Lie algebra `(Sym(n), [·,·]_N)`, the compatible
//! Lie–Poisson and frozen Poisson structures with their Casimirs, the
//! invariants `h_{k,2r}` from the Lax pair with parameter, RK4 integration
//! with conservation monitors, and sampled certificates of involution,
//! independence and the bi-Hamiltonian recursion.
//!
//! ```
//! use symflow::dynamics::vector_field;
//! use symflow::matrix::{SkewMatrix, SymMatrix};
//!
//! let x = SymMatrix::from_rows(&[[1.0, 2.0], [2.0, 3.0]]).unwrap();
//! let f = vector_field(&x, &SkewMatrix::j2()).unwrap();
//! assert_eq!(f.to_rows(), vec![vec![-16.0, -8.0], vec![-8.0, 16.0]]);
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod lie;
pub mod matrix;
pub mod poisson;
pub mod sampling;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Matrix, SkewMatrix, SymMatrix};
