use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {}", .0.join(", "))]
    Validation(Vec<String>),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("density matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("a two-mode reduction needs two distinct modes, got {0} twice")]
    SameMode(&'static str),

    #[error("trajectories are not on a common time grid")]
    GridMismatch,

    #[error("no interior maximum inside [{0}, {1}]")]
    NoInteriorMaximum(f64, f64),

    #[error("config error: {0}")]
    Config(String),
}
