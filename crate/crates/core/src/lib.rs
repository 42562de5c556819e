//! Kubo–Ando operator connections on real positive semidefinite matrices.
//!
//! A connection `σ` is built from a representing function
//! ([`FunctionSpec`]) or an associated measure ([`FiniteMeasure`]) and
//! evaluated as `A σ B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`. On top of
//! evaluation the crate solves `A σ X = B` and `X σ A = B`, classifies
//! connections by cancellability and regularity, and checks the connection
//! axioms on random matrices.
//!
//! ```
//! use opconn::solver::solve_left;
//! use opconn::{Connection, PdMatrix, PsdMatrix};
//!
//! let sigma: Connection = "geometric:0.5".parse()?;
//! let a = PdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]], 1e-12)?;
//! let x = PsdMatrix::from_diagonal(&[1.0, 3.0])?;
//!
//! let b = sigma.evaluate(&a.clone().into_psd(), &x)?;
//! let report = solve_left(&sigma, &a, &b)?;
//! assert!(report.x.unwrap().distance(&x)? < 1e-9);
//! # Ok::<(), opconn::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quadrature;
pub mod random;
pub mod report;
mod spec_text;
pub mod symmetric;
pub mod function;
pub mod measure;
pub mod connection;
pub mod solver;
pub mod axioms;
pub mod classify;
pub mod matfile;
pub mod cli;

pub use connection::{Connection, RegularizationSchedule};
pub use error::{Error, Result};
pub use function::{CustomFn, FunctionProps, FunctionSpec, RangeDescriptor};
pub use measure::{Density, DensityShape, FiniteMeasure};
pub use symmetric::{PdMatrix, PsdMatrix, SymmetricMatrix, Tolerances};
