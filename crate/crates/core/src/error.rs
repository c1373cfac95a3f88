use thiserror::Error;

use crate::state::Admissibility;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible state ({0})")]
    Inadmissible(Admissibility),

    #[error("conserved state is not invertible: {0}")]
    NonInvertible(String),

    #[error("recovered primitive state leaves the admissible region ({0})")]
    InversionOutOfRegion(Admissibility),

    #[error("point is off the contact curve; admissible rho range is ({rho_min}, {rho_max})")]
    OffCurve { rho_min: f64, rho_max: f64 },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("delta shock speed has no real solution (F^2 - EG = {discriminant})")]
    NoRealSpeed { discriminant: f64 },

    #[error("no delta shock speed satisfies the entropy window [{b}, {a}]")]
    EntropyViolation { b: f64, a: f64 },

    #[error("both delta shock speed candidates {first} and {second} satisfy the entropy window")]
    AmbiguousSpeed { first: f64, second: f64 },

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("primitive recovery failed in cell {cell}: {source}")]
    Recovery {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("quadrature did not reach the requested refinement (best residuals {best:?})")]
    Quadrature { best: [f64; 3], panels: usize },

    #[error("right state cannot be built for eps = {eps}; feasible eps lie in (0, {eps_max})")]
    Range { eps: f64, eps_max: f64 },

    #[error("simulation failed at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by the caller's data rather than a solver fault.
    pub fn is_inadmissible_input(&self) -> bool {
        match self {
            Error::Inadmissible(_) | Error::Domain(_) => true,
            Error::AtTime { source, .. } | Error::Recovery { source, .. } => source.is_inadmissible_input(),
            _ => false,
        }
    }
}
