use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("tau = {tau} <= 0 puts the system in the condensate regime; use the condensate module")]
    CondensateRegime { tau: f64 },

    #[error("distribution has not decayed at the grid boundary (boundary/max = {ratio:e}, limit {limit:e})")]
    TailNotDecayed { ratio: f64, limit: f64 },

    #[error("grid spacing {spacing} on axis {axis} is too coarse for momenta up to {p_max} (need < {limit})")]
    AliasingRisk {
        axis: usize,
        spacing: f64,
        p_max: f64,
        limit: f64,
    },

    #[error("transform lost norm: input {input}, output {output}")]
    TruncatedSupport { input: f64, output: f64 },

    #[error("wavefunction norm {norm} differs from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("integrand blew up on the contour near z = {re} + {im}i")]
    PoleOnPath { re: f64, im: f64 },

    #[error("poles at {first} and {second} are degenerate; merge them first")]
    DegeneratePoles { first: f64, second: f64 },

    #[error("pole at {location} lies outside the contour")]
    PoleOutsideContour { location: f64 },

    #[error("z = {re} + {im}i coincides with the pole p^2/2m")]
    PoleHit { re: f64, im: f64 },

    #[error("Fermi-surface quantity requested for Bose statistics")]
    WrongStatistics,

    #[error("order s = {0} is not supported (s must be 1 or 2)")]
    UnsupportedOrder(usize),

    #[error("z is within {distance:e} of the Bloch spectrum")]
    NearSingular { distance: f64 },

    #[error("plane-wave cutoff did not converge (change {change:e} at cutoff {cutoff})")]
    NotConverged { change: f64, cutoff: usize },

    #[error("condensate spec carries a lattice; use the crystal distribution")]
    SpecHasLattice,

    #[error("condensate spec has no lattice")]
    MissingLattice,

    #[error("coefficient norm sum |c|^2 = {sum} differs from 1")]
    CoefficientsNotNormalized { sum: f64 },

    #[error("stencil halving test failed: truncation estimate {estimate:e} exceeds {limit:e}")]
    GridTooCoarse { estimate: f64, limit: f64 },

    #[error("pair potential at the domain edge is {edge:e} of its maximum (limit {limit:e})")]
    RangeNotCovered { edge: f64, limit: f64 },

    #[error("imaginary residue {residue:e} exceeds {limit:e}")]
    ImaginaryResidue { residue: f64, limit: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the failure is numerical (non-convergence, blow-ups) rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TailNotDecayed { .. }
                | Error::AliasingRisk { .. }
                | Error::TruncatedSupport { .. }
                | Error::PoleOnPath { .. }
                | Error::PoleHit { .. }
                | Error::NearSingular { .. }
                | Error::NotConverged { .. }
                | Error::GridTooCoarse { .. }
                | Error::ImaginaryResidue { .. }
        )
    }
}
