//! Statement lattices with accessibility labels, maximal expressive standard
//! (MES) quasi-probability models, inaccessibility measures and the qubit
//! frame correspondence.
//!
//! ```
//! use inaccessible::mes::{build, marginals, reconstruct};
//!
//! let model = build(2).unwrap();
//! let q = [0.5, 0.5, 0.0, 0.0];
//! let am = marginals(&model, &q).unwrap();
//! assert_eq!(am.vectors()[0], vec![1.0, 0.0]);
//! assert_eq!(reconstruct(&model, &am).unwrap().values(), &q);
//! ```

pub mod cli;
pub mod error;
pub mod expr;
pub mod inaccessibility;
pub mod lattice;
pub mod mes;
pub mod models;
pub mod quasiprob;
pub mod qubit;
pub mod verify;

pub use error::{Error, Result};

/// Default absolute tolerance of membership and normalisation tests.
pub const DEFAULT_TOL: f64 = 1e-9;
