use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("denominator must be positive")]
    NonPositiveDenominator,
    #[error("invalid angle literal {0:?}")]
    Syntax(String),
    #[error("arguments must be pairwise distinct")]
    Coincident,
    #[error("angle sets must be non-empty")]
    EmptySet,
    #[error("angle sets must be disjoint")]
    NotDisjoint,
    #[error("arc from {0} to itself is not allowed")]
    DegenerateArc(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortraitError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("degree mismatch: white {white}, black {black}")]
    DegreeMismatch { white: u32, black: u32 },
    #[error("class {index} has {size} angle(s); classes need at least 2")]
    ClassTooSmall { index: usize, size: usize },
    #[error("angle {0} is listed twice")]
    DuplicateAngle(String),
    #[error("zero-level set has {0} angle(s); at least 2 are required")]
    TooFewZeroAngles(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Portrait(#[from] PortraitError),
    #[error("{0}")]
    Angle(#[from] AngleError),
    #[error("invalid geometry: {0}")]
    Geometry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("level {level} needs {angles} angles, over the budget of {budget}")]
    BudgetExceeded {
        level: usize,
        angles: u128,
        budget: usize,
    },
    #[error("level {level} {color} is not constructible: {reason}")]
    Inconsistent {
        level: usize,
        color: &'static str,
        reason: String,
    },
    #[error("level {requested} is not built (tower depth {built})")]
    NotBuilt { requested: usize, built: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partitions are over different ground sets")]
    GroundMismatch,
    #[error("blocks do not partition the ground set: {0}")]
    NotAPartition(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("edge vectors do not close up (sum is ({0:.3e}, {1:.3e}))")]
    OpenPolygon(f64, f64),
    #[error("geometry has {got} edge vectors but the portrait has {expected} zero-arcs")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("invalid geometry: {0}")]
    Invalid(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}
