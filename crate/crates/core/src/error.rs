use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("operands live on different lattices")]
    LatticeMismatch,

    #[error("operands have different tilde flags")]
    TildeMismatch,

    #[error("degree overflow: {left} + {right} exceeds dimension {dim}")]
    DegreeOverflow { left: usize, right: usize, dim: usize },

    #[error("top-degree cochain has zero coboundary")]
    TopDegreeCoboundary,

    #[error("expected a degree-{expected} cochain, found degree {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("{what} system is {expected}-dimensional, lattice has dimension {found}")]
    WrongDimension { what: &'static str, expected: usize, found: usize },

    #[error("shift along axis {axis} leaves the lattice at site {site}")]
    OutOfRange { site: String, axis: usize },

    #[error("cochain entry at site {site}, edges {edges} is outside the valid region")]
    InvalidEntry { site: String, edges: String },

    #[error("component at site {site}, axis {axis} is not in su(2) (defect {defect:e})")]
    NotSu2 { site: usize, axis: usize, defect: f64 },

    #[error("parameter vector has length {found}, lattice requires {expected}")]
    ParameterLength { expected: usize, found: usize },

    #[error("divergence: non-finite objective at iterate {iteration}")]
    Divergence { iteration: usize },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
