use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("GF({p}^{h}) is too large")]
    FieldTooLarge { p: u32, h: u32 },
    #[error("{0:?} is not a monic irreducible polynomial")]
    NotIrreducible(Vec<u32>),
    #[error("element {value} out of range for a field of order {q}")]
    ElementOutOfRange { value: u32, q: u32 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("zero vector is not a projective point")]
    ZeroVector,
    #[error("unexpected hyperplane section with {count} points (q = {q})")]
    UnexpectedSection { count: usize, q: u32 },
    #[error("antipode undefined: {0}")]
    Antipode(String),
    #[error("point is not on the quadric: {0:?}")]
    NotOnQuadric(Vec<u32>),

    #[error("GQ axiom violated: {0}")]
    Axiom(String),
    #[error("not a partial ovoid: points {0} and {1} are collinear")]
    NotPartialOvoid(usize, usize),
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("invalid model input: {0}")]
    Model(String),

    #[error("affine set of size {0} cannot be translated: size is 0 mod p")]
    Untranslatable(usize),
    #[error("sigma_{0} is not reachable through Newton identities")]
    UnsupportedIndex(usize),
    #[error("zero direction")]
    ZeroDirection,
    #[error("excluded plane tuple")]
    ExcludedPlane,

    #[error("invalid search configuration: {0}")]
    Config(String),

    #[error("unsupported order q = {0}: {1}")]
    UnsupportedOrder(u32, String),
    #[error("reference mismatch: {0}")]
    Reference(String),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse error categories, stable across releases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Field,
    Geometry,
    Model,
    NotPartialOvoid,
    Redei,
    Config,
    Unsupported,
    Reference,
    Io,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Field => "field",
            ErrorKind::Geometry => "geometry",
            ErrorKind::Model => "model",
            ErrorKind::NotPartialOvoid => "not_partial_ovoid",
            ErrorKind::Redei => "redei",
            ErrorKind::Config => "config",
            ErrorKind::Unsupported => "unsupported",
            ErrorKind::Reference => "reference",
            ErrorKind::Io => "io",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotPrime(_) | NotPrimePower(_) | EvenCharacteristic | InvalidDegree(_) | FieldTooLarge { .. }
            | NotIrreducible(_) | ElementOutOfRange { .. } | ZeroInverse | FieldMismatch(_) => ErrorKind::Field,
            InvalidDimension(_) | ZeroVector | UnexpectedSection { .. } | Antipode(_) | NotOnQuadric(_) => {
                ErrorKind::Geometry
            }
            Axiom(_) | PointOutOfRange(_) | Model(_) => ErrorKind::Model,
            NotPartialOvoid(..) => ErrorKind::NotPartialOvoid,
            Untranslatable(_) | UnsupportedIndex(_) | ZeroDirection | ExcludedPlane => ErrorKind::Redei,
            Config(_) => ErrorKind::Config,
            UnsupportedOrder(..) => ErrorKind::Unsupported,
            Reference(_) => ErrorKind::Reference,
            Io(_) | Json(_) => ErrorKind::Io,
        }
    }
}
