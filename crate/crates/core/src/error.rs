use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("index {n} out of range for modulus {p}: {reason}")]
    IndexOutOfRange { p: u64, n: u64, reason: &'static str },

    #[error("symbol parse error at byte {position}: {message}")]
    SymbolParse { position: usize, message: String },

    #[error("word is not admissible (ends in e0)")]
    InadmissibleWord,

    #[error("tau is only defined on words over {{e0, e+}}")]
    TauOnSignedWord,

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("denominator divisible by prime {0}")]
    DenominatorDivisible(u64),

    #[error("depth parity violated: {0}")]
    DepthParity(String),

    #[error("value matrix needs at least {required} prime columns, got {got}")]
    TooFewColumns { required: usize, got: usize },

    #[error("unknown audit suite `{0}`")]
    UnknownSuite(String),

    #[error("no fit: first violating prime {0}")]
    NoFit(u64),

    #[error("fit needs at least {required} primes, got {got}")]
    TooFewPrimes { required: usize, got: usize },

    #[error("cache i/o failure at {path}: {source}")]
    CacheIo {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),
}
