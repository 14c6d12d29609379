use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the map toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error(
        "map diverges on Bloch point ({a1}, {a2}, {a3}), which lies outside its invariant set"
    )]
    DivergentMap { a1: f64, a2: f64, a3: f64 },

    #[error("dephasing rate is singular at q = {q} (alpha_minus = {alpha_minus})")]
    RateSingularity { q: f64, alpha_minus: f64 },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("Pauli point ({0}, {1}, {2}) lies outside the positive-map cube [-1, 1]^3")]
    OutOfCube(f64, f64, f64),

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
