//! Riemannian adaptive optimization on products of manifolds.
//!
//! The crate is organised in four layers:
//!
//! - [`manifold`]: the manifold interface with the Euclidean factor, the
//!   Poincaré ball and Cartesian products of those.
//! - [`optim`]: RSGD, RADAGRAD, RADAM, RAMSGRAD and RADAMNC, where the
//!   adaptive terms are kept per component manifold, plus the coordinatewise
//!   Euclidean ADAGRAD / ADAM / AMSGRAD references.
//! - [`regret`]: online geodesically convex problems, empirical regret and
//!   the closed-form regret bounds of the adaptive methods.
//! - [`embed`]: taxonomy ingestion, Poincaré embedding training with
//!   negative sampling and MAP evaluation.

pub mod embed;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod optim;
pub mod regret;

pub use error::{Error, Result};
