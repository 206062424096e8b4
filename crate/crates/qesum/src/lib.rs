//! Exact evaluation and verification of incomplete quadratic exponential sums.
//!
//! The central object is the normalized sum
//!
//! ```text
//! S(f, n, m) = 2^-n * sum over x in {-1,1}^n of x_1*...*x_n * omega^f(x)
//! ```
//!
//! where `omega = e^(2*pi*i/m)` for odd `m >= 3` and `f` is a quadratic
//! polynomial with no diagonal or constant terms. The unnormalized sum `S~`
//! (without the `2^-n`) is a cyclotomic integer and is carried exactly; only
//! final magnitudes drop to `f64`.
//!
//! Modules:
//! - [`cyclotomic`]: exact arithmetic in `Z[omega]`, root parameters, Chebyshev values.
//! - [`poly`]: the quadratic polynomial model, its symmetry group, and its graph.
//! - [`sum`]: naive and Gray-code evaluators plus parallel family sweeps.
//! - [`fourier`]: full spectra, the tree-recursion coefficient evaluator, forest certificates.
//! - [`moments`]: exact even moments of `|S|` over families and tail bounds.
//! - [`extremal`]: max / second-max searches and sharpness checks.
//! - [`legendre3`]: the `m = 3` pairing decomposition and its nonsingularity test.
//! - [`verify`]: the bundled verification suite driven by the CLI and the tests.

pub mod cyclotomic;
pub mod extremal;
pub mod fourier;
pub mod legendre3;
pub mod moments;
pub mod poly;
pub mod report;
pub mod sum;
pub mod verify;

/// Absolute tolerance for floating-point claim checks unless a tighter one is
/// stated at the use site.
pub const TOL: f64 = 1e-9;
/// Tolerance for cross-implementation agreement of transforms.
pub const TOL_TIGHT: f64 = 1e-12;
/// Resolution at which distinct `|S|` values are merged into one class when
/// ranking search results.
pub const VALUE_MERGE_RESOLUTION: f64 = 1e-9;
/// Default cap on exhaustive sweep size (number of polynomial evaluations).
pub const DEFAULT_BUDGET: u64 = 200_000_000;
/// Cap on the number of canonical witnesses retained in a search report.
pub const WITNESS_CAP: usize = 10_000;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("modulus must be odd and at least 3, got {0}")]
    BadModulus(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("invalid input: {0}")]
    Parse(String),
    #[error("{what} supports at most n = {guard} variables, got n = {n}; {hint}")]
    TooManyVariables {
        what: &'static str,
        guard: u32,
        n: u32,
        hint: &'static str,
    },
    #[error("family of size {size} exceeds the evaluation budget {budget}; use a random sample")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("graph has circuit rank {0}, not a forest; use the FWHT spectrum instead")]
    NotForest(u32),
    #[error("moment order must be one of 2, 4, 6, got {0}")]
    BadMomentOrder(u32),
    #[error("moments require an exhaustively enumerable family, not a random sample")]
    MomentNeedsExhaustive,
    #[error("gamma must lie in (0, 1], got {0}")]
    BadGamma(f64),
    #[error("gap verification needs an exhaustive search report")]
    NotExhaustive,
    #[error("operation requires modulus 3, got {0}")]
    NotMod3(u32),
    #[error("n must be even here; the odd-n variant is verify_theorem_a_odd")]
    OddN,
    #[error("n must be odd here; the even-n variant is verify_theorem_a")]
    EvenN,
    #[error("sigma must be a permutation of 0..n")]
    BadPermutation,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
