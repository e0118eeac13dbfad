use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadExtensionDegree(i64),
    #[error("field order {order} exceeds the configured bound {bound}")]
    FieldTooLarge { order: u64, bound: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("element {value} is not in a field of order {order}")]
    InvalidElement { value: u32, order: u32 },
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomials live over different fields")]
    FieldMismatch,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("argument must be positive, got {0}")]
    NonPositive(i64),
    #[error("enumeration of {0} candidates exceeds the bound")]
    EnumerationTooLarge(u128),

    #[error("diameter must be at least {min}, got {got}")]
    BadDiameter { got: usize, min: usize },
    #[error("rule table has length {got}, expected {expected}")]
    TableLength { got: usize, expected: usize },
    #[error("Wolfram code {code} is out of range for diameter {d}")]
    WolframOutOfRange { code: u128, d: usize },
    #[error("Wolfram codes describe binary rules only")]
    NotBinary,
    #[error("configuration of length {got} is shorter than the diameter {d}")]
    ConfigurationTooShort { got: usize, d: usize },
    #[error("rule is not bipermutive")]
    NotBipermutive,
    #[error("rule is not linear")]
    NotLinear,
    #[error("coefficient list is empty")]
    EmptyCoefficients,
    #[error("words {u:?} and {v:?} do not overlap")]
    NoOverlap { u: Vec<u32>, v: Vec<u32> },
    #[error("expected a block of length {expected}, got {got}")]
    BlockLength { got: usize, expected: usize },
    #[error("rules disagree on field or diameter")]
    RuleMismatch,
    #[error("no start vertex reproduces both shares (rules not orthogonal or shares corrupted)")]
    NoSurvivor,
    #[error("{0} start vertices reproduce both shares (rule pair is not orthogonal)")]
    MultipleSurvivors(usize),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("matrix is not square or holds entries outside [1, N]")]
    MalformedMatrix,
    #[error("squares have different orders {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("matrix is not a Latin square")]
    NotLatin,
    #[error("requested {requested} orthogonal rules, at most {max} exist")]
    FamilyTooLarge { requested: usize, max: usize },
    #[error("a family needs at least 2 rules, got {0}")]
    FamilyTooSmall(usize),
    #[error("pair ({0},{1}) not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("brute-force search over {q}^({q}^{d}) rule tables is infeasible")]
    SearchInfeasible { q: u32, d: usize },

    #[error("both shares carry the same value")]
    SameShare,
    #[error("candidate families have no common preimage set (shares from different deals)")]
    EmptyIntersection,
    #[error("candidate families share {0} preimage sets (public family is not orthogonal)")]
    AmbiguousIntersection(usize),
    #[error("rule indices must differ, got {0} twice")]
    SameRuleIndex(usize),
    #[error("document does not match the public family (digest mismatch)")]
    DigestMismatch,
    #[error("malformed document: {0}")]
    Format(String),
}
