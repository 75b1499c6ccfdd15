use thiserror::Error;

/// Errors raised by the algebra layer.
///
/// Variants fall into two groups: caller mistakes (mismatched shapes, maps
/// that are not well defined, inexact input) and `Internal`, which signals
/// that two independent computations disagreed and is always a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is out of range (need 2 <= N <= 2^31 - 1)")]
    InvalidModulus(u64),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("map is not well defined: {0}")]
    NotWellDefined(String),

    #[error("maps are not composable: {0}")]
    NotComposable(String),

    #[error("sequence is not exact: {0}")]
    NotExact(String),

    #[error("({nprime}, {n}) is not a square-zero pair: {reason}")]
    NotSquareZero { nprime: u64, n: u64, reason: String },

    #[error("module is not killed by {n}: {context}")]
    NotTorsion { n: u64, context: &'static str },

    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),

    #[error("boundary modules differ: {0}")]
    BoundaryMismatch(String),

    #[error("invalid butterfly: {0}")]
    InvalidButterfly(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("target is not the trivial 2-extension")]
    NotTrivialTarget,

    #[error("module is not injective over Z/{0}")]
    NotInjective(u64),

    #[error("family is not a cover")]
    NotACover,

    #[error("map is not an epimorphism")]
    NotEpi,

    #[error("section is not in the fiber product: {0}")]
    NotInFiberProduct(String),

    #[error("no lift exists: {0}")]
    NoLift(String),

    #[error("enumeration bound exceeded: {size} > {bound}")]
    TooLarge { size: u128, bound: u128 },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
