use thiserror::Error;

/// Errors reported by surface construction, deformation, flow, and search
/// routines. Variant names double as stable machine-readable codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("closure violation: {0}")]
    ClosureViolation(String),
    #[error("orientation violation: {0}")]
    OrientationViolation(String),
    #[error("cone angle mismatch: {0}")]
    ConeAngleMismatch(String),
    #[error("surface is disconnected")]
    Disconnected,
    #[error("invalid surface data: {0}")]
    InvalidSurface(String),
    #[error("mixed exact/float holonomies (pass allow_mixed to accept)")]
    MixedNumericMode,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("flip of edge {0} is not convex")]
    NonConvexFlip(usize),
    #[error("flow started at a singularity")]
    StartAtSingularity,
    #[error("leaf exceeded coverage length {0} without hitting the transverse system")]
    UncoveredLeaf(f64),
    #[error("loop runs along a triangulation edge; perturb marked points")]
    NonTransverseCrossing,
    #[error("vertical prong hits a singularity before length {0}")]
    ProngHitsSingularity(f64),
    #[error("tremor path cannot be continued past t={0}: no convex flip restores orientation")]
    DegenerateBeyondRepair(f64),
    #[error("cocycle rejected: atomic or not constructor-certified non-atomic")]
    AtomicCocycle,
    #[error("region boundary contains a non-horizontal edge {0}")]
    NonHorizontalBoundary(usize),
    #[error("slit passes through a lattice point")]
    SlitThroughLatticePoint,
    #[error("horizontal direction is periodic on this lattice")]
    PeriodicHorizontal,
    #[error("search exhausted at bound {0}")]
    SearchExhausted(u64),
    #[error("slope is rational: {0}/{1}")]
    RationalSlope(i64, i64),
    #[error("checkerboard coloring inconsistent: {0}")]
    ColoringInconsistent(String),
    #[error("aperiodicity unverified: horizontal saddle connection of length {0} found")]
    AperiodicityUnverified(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate convex body: {0}")]
    Degenerate(String),
    #[error("sample left the chart after {0} retries")]
    ChartEscape(usize),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 numeric, 4 search exhausted.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            SearchExhausted(_) => 4,
            Numeric(_) | DegenerateBeyondRepair(_) | UncoveredLeaf(_) => 3,
            _ => 2,
        }
    }
}
