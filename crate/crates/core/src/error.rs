use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Quadrature order too small to be meaningful.
    #[error("quadrature order {0} is below the minimum of 2")]
    Order(usize),

    /// Malformed configuration or input file. `key` names the offending entry.
    #[error("invalid `{key}`: {message}")]
    Config { key: String, message: String },

    /// A requested enumeration exceeds the configured size cap.
    #[error("problem size {requested} exceeds cap {cap}")]
    ResourceCap { requested: f64, cap: f64 },

    /// A matrix that must be symmetric is not.
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose by {gap}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    /// A density matrix has a negative eigenvalue beyond tolerance.
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0})")]
    NotPositiveSemidefinite(f64),

    /// A spectrum does not sum to one.
    #[error("spectrum is not normalized (sum = {0})")]
    Unnormalized(f64),

    /// The quantity is undefined for these inputs (for example a ratio of zeros).
    #[error("undefined: {0}")]
    Undefined(&'static str),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T: num_traits::ToPrimitive>(
    name: &'static str,
    value: T,
    domain: &'static str,
) -> Error {
    Error::Domain {
        name,
        value: value.to_f64().unwrap_or(f64::NAN),
        domain,
    }
}

/// Checks `lo <= x <= hi` (and finiteness), reporting `name` on failure.
pub(crate) fn check_closed<T: crate::Scalar>(
    name: &'static str,
    x: T,
    lo: T,
    hi: T,
    text: &'static str,
) -> Result<()> {
    if x.is_finite() && x >= lo && x <= hi {
        Ok(())
    } else {
        Err(domain(name, x, text))
    }
}
