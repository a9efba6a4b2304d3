//! Linear-programming substrate for the restricted master problems.
//!
//! The engine is a bounded-variable primal simplex generic over a
//! [`Scalar`] field, so the same code runs in `f64` for the solvers and in
//! exact rationals for verification.

mod backend;
mod error;
mod program;
mod scalar;
mod simplex;
mod solution;

pub use backend::{Backend, BuiltinSimplex, LpBackend, BACKEND_ENV};
pub use error::LpError;
pub use program::{Column, LinearProgram, Row, Sense};
pub use scalar::Scalar;
pub use solution::{LpSolution, Status};

pub use num_rational::BigRational;

/// Double precision program, used by every solver.
pub type Lp = LinearProgram<f64>;
/// Exact rational program.
pub type ExactLp = LinearProgram<BigRational>;
/// Double precision solution.
pub type Solution = LpSolution<f64>;
