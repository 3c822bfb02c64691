//! Symbolic + numeric engine for jet-bundle calculus and variational
//! calculus on a single chart.
//!
//! The pieces fit together like this:
//!
//! - [`expr`]: the expression AST, differentiation, evaluation, parsing,
//!   printing, and the randomized equivalence test every law check uses.
//! - [`jet`]: jet contexts, prolongation, total derivatives, the jet
//!   counit/comultiplication, projections, and linear connections.
//! - [`diffop`]: linear differential operators as maps out of jet bundles,
//!   the operator ↔ bundle-map correspondence, application and composition.
//! - [`lpde`]: linear PDEs as kernels of linear bundle maps, prolongation
//!   of equation sets, and residual-based solution checking.
//! - [`numeric`]: grids, trapezoid quadrature, sampled sections, and the
//!   finite-difference oracles that back every symbolic claim.
//! - [`functional`]: formal spans of Dirac deltas, coderelictions, the
//!   deriving transformation, smooth/local functionals, Gâteaux
//!   derivatives, and the Euler–Lagrange operator.
//! - [`panel`]: bump sections, random section/operator/Lagrangian panels
//!   used by the law suites.
//! - [`formats`]: the JSON file formats consumed and produced by the CLI.

pub mod diffop;
pub mod error;
pub mod expr;
pub mod formats;
pub mod functional;
pub mod jet;
pub mod lpde;
pub mod numeric;
pub mod panel;
pub mod suites;

pub use error::{Error, Result};
