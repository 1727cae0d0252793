//! Error type shared by every module in the crate.
//!
//! A single enum keeps cross-module plumbing simple: constructions call into
//! fields, codes call into constructions, and audits call into everything.

/// Crate-wide error enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The requested characteristic is not a prime number.
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),

    /// A supplied or candidate modulus polynomial factors over the base field.
    /// Carries a nontrivial factor as a witness.
    #[error("modulus polynomial is reducible; nontrivial factor {factor}")]
    Reducible { factor: String },

    /// An enumeration-bound parameter exceeds the configured cap. The
    /// operation is refused rather than attempted, so callers can retry with
    /// smaller parameters or a raised cap.
    #[error("{what} exceeds the enumeration cap {limit}")]
    TooLarge { what: String, limit: u128 },

    /// Division by the zero element of a field.
    #[error("division by zero in the field")]
    DivideByZero,

    /// An element index is outside `0..q` for the field at hand.
    #[error("element {0} is not a canonical member of the field")]
    NotInField(u64),

    /// Two distributions (or a distribution and a map) disagree on domain size.
    #[error("domain size mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),

    /// The request is well-formed but cannot be satisfied at any size
    /// (e.g. demanding more min-entropy than the domain holds).
    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// A numeric argument is outside its documented range.
    #[error("argument out of range: {0}")]
    BadRange(String),

    /// Structurally inconsistent parameters.
    #[error("bad parameters: {0}")]
    BadParams(String),

    /// The operation draws randomness but no RNG was supplied.
    #[error("operation requires a seeded rng")]
    RngRequired,

    /// A vector length does not match what the object expects.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Two objects live over different alphabets/fields.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// An erasure pattern does not determine the codeword uniquely.
    #[error("erasure pattern is ambiguous: unerased positions span rank {rank} < {need}")]
    Ambiguous { rank: usize, need: usize },

    /// A received word lies outside the code (no codeword is consistent).
    #[error("received word is inconsistent with the code")]
    Inconsistent,

    /// The exponent base of a Frobenius power is not a power of the
    /// characteristic.
    #[error("exponent base {h} is not a power of the characteristic {p}")]
    BadExponentBase { h: u64, p: u64 },

    /// An operation needs the code's minimum distance but it has not been
    /// computed or supplied.
    #[error("minimum distance is unknown; compute or supply it first")]
    UnknownDistance,

    /// A matrix that must have full rank does not.
    #[error("matrix is rank-deficient: rank {rank} < {need}")]
    RankDeficient { rank: usize, need: usize },

    /// Incompatible dimensions between two composed objects.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// A combinatorial design's set size disagrees with the arity of the
    /// function being evaluated on it.
    #[error("arity mismatch: function takes {expected} inputs, design sets have size {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// Input/output lengths passed to a map constructor are inconsistent.
    #[error("bad lengths: {0}")]
    BadLengths(String),

    /// The map was built without an inverter but one is required.
    #[error("map carries no inverter")]
    NoInverter,

    /// The requested adversary model is not meaningful for this scheme.
    #[error("adversary model unsupported for this scheme")]
    AdversaryUnsupported,

    /// The decoder needs construction provenance the matrix does not carry.
    #[error("matrix carries no construction provenance usable by this decoder")]
    MissingProvenance,

    /// Threshold pair with lower bound above upper bound.
    #[error("bad thresholds: lower {lo} exceeds upper {hi}")]
    BadThresholds { lo: usize, hi: usize },

    /// Two matrices that must agree on column count do not.
    #[error("column count mismatch: {0} vs {1}")]
    ColumnMismatch(usize, usize),

    /// A map advertised as linear is not, or a linear-only operation was
    /// handed a nonlinear map.
    #[error("map is not linear")]
    NotLinear,

    /// Outer-code decoding failed inside a concatenated decoder.
    #[error("outer decoding failed: {0}")]
    OuterDecodingFailed(String),

    /// A claimed error bound is vacuous (at least 1).
    #[error("claimed error bound is vacuous: {0}")]
    ErrorTooLarge(String),

    /// The generator would need more output bits per seed than available.
    #[error("insufficient stretch: need {need} bits, have {got}")]
    InsufficientStretch { need: usize, got: usize },

    /// Underlying I/O failure (file formats, CLI plumbing).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed textual input (file formats, CLI plumbing).
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
