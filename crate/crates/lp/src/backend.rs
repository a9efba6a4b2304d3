use crate::error::LpError;
use crate::program::LinearProgram;
use crate::scalar::Scalar;
use crate::solution::LpSolution;

/// Environment variable naming the engine: `builtin` (default) or `external`.
pub const BACKEND_ENV: &str = "CMCF_LP_BACKEND";

/// Engine that can solve a [`LinearProgram`] and report duals in the
/// `cost − Σ dual·a` convention.
pub trait LpBackend<T: Scalar> {
    fn name(&self) -> &'static str;
    fn solve(&self, lp: &mut LinearProgram<T>) -> Result<LpSolution<T>, LpError>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct BuiltinSimplex;

impl<T: Scalar> LpBackend<T> for BuiltinSimplex {
    fn name(&self) -> &'static str {
        "builtin"
    }

    fn solve(&self, lp: &mut LinearProgram<T>) -> Result<LpSolution<T>, LpError> {
        lp.solve()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Builtin,
}

impl Backend {
    pub fn from_name(name: &str) -> Result<Self, LpError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "" | "builtin" => Ok(Backend::Builtin),
            other => Err(LpError::BackendUnavailable(other.to_string())),
        }
    }

    /// Reads [`BACKEND_ENV`]; unset means builtin.
    pub fn from_env() -> Result<Self, LpError> {
        match std::env::var(BACKEND_ENV) {
            Ok(v) => Self::from_name(&v),
            Err(_) => Ok(Backend::Builtin),
        }
    }
}
