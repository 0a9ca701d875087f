use thiserror::Error;

/// Errors across all exact-geometry operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generators do not span the ambient space")]
    NotFullDim,

    #[error("cone contains a line (not pointed)")]
    NotPointed,

    #[error("the system (lambda, v_rho) = -1 over the rays is inconsistent")]
    NotGorenstein,

    #[error("facet {0:?} is not smooth: its rays do not extend to a lattice basis")]
    NotSmooth(Vec<usize>),

    #[error("vector does not lie in the interior of the cone")]
    NotInterior,

    #[error("slice is unbounded: the cutting vector pairs non-positively with a dual ray")]
    Unbounded,

    #[error("polytope vertices do not span an n-dimensional space")]
    DegeneratePolytope,

    #[error("facet {0:?} does not extend to a lattice basis")]
    NotSmoothFacet(Vec<usize>),

    #[error("residue {residue} mod {period} has {got} samples, needs {needed}")]
    InsufficientSamples {
        residue: u64,
        period: u64,
        got: usize,
        needed: usize,
    },

    #[error("samples disagree with a degree-{degree} quasi-polynomial of period {period} at k = {at}")]
    InconsistentSamples { degree: usize, period: u64, at: u64 },

    #[error("no consistent quasi-polynomial period found up to {0}")]
    FitInconsistent(u64),

    #[error("chart weight {c} is not coprime to the stabilizer order {g}")]
    NonCoprimeWeight { c: String, g: u64 },

    #[error("chart data for ray {ray} differs across facets: {details}")]
    ChartMismatch { ray: usize, details: String },

    #[error("Newton iteration did not converge within {0} steps")]
    NoConvergence(usize),

    #[error("slice I does not meet the interior of the cone")]
    InfeasibleSlice,

    #[error("integer overflow converting exact data for enumeration")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
