use thiserror::Error;

/// Errors surfaced by ring construction, coding, repair, and storage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a unit (divisible by the maximal-ideal generator)")]
    NotAUnit(u64),
    #[error("no unit pivot available in column {0}; remaining entries all lie in <p>")]
    NoUnitPivot(usize),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("parameters overflow the supported width: {0}")]
    ParamOverflow(String),
    #[error("elements belong to different ring contexts")]
    ContextMismatch,
    #[error("element is not fixed by the subring Frobenius")]
    NotInSubring,
    #[error("Gram matrix has no unit pivot; input was not a free basis")]
    GramNotInvertible,
    #[error("basis certificate failed: residue rank {got} < {want}")]
    BasisCertificateFailed { got: usize, want: usize },
    #[error("pseudo-dimension k={k} out of range for length {len}")]
    BadK { k: usize, len: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not enough shards: need {needed}, got {got}")]
    NotEnoughShards { needed: usize, got: usize },
    #[error("brute-force enumeration too large: {0} messages")]
    TooLarge(u128),
    #[error("k={k} exceeds the repair-scheme bound {max}")]
    KTooLarge { k: usize, max: usize },
    #[error("code is not a full-length Reed-Solomon code over the Teichmuller set")]
    NotFullLength,
    #[error(
        "repair vector {0} is not orthogonal to the code; scheme unavailable for these parameters"
    )]
    DualMembershipFailed(usize),
    #[error("dual multiplier verification failed at generator pair ({0}, {1})")]
    DualVerificationFailed(usize, usize),
    #[error("helper index {0} is invalid for this scheme")]
    BadHelperIndex(usize),
    #[error("supplied word {0} is not a dual codeword")]
    NotADualCodeword(usize),
    #[error("lost-coordinate entries of the dual words do not form a free basis")]
    NotABasisAtLostCoordinate,
    #[error("byte-aligned storage requires characteristic 2, got p={0}")]
    UnsupportedCharacteristic(u64),
    #[error("no such node: {0}")]
    NoSuchNode(usize),
    #[error("node {0} is not marked lost")]
    NodeNotLost(usize),
    #[error("not enough live helpers: need {needed}, have {live}")]
    NotEnoughHelpers { needed: usize, live: usize },
    #[error("repair scheme unavailable: {0}")]
    SchemeUnavailable(String),
    #[error("corrupt shard file: {0}")]
    CorruptShard(String),
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
