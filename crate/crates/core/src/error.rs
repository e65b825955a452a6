use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("tower has no levels")]
    EmptyTower,

    #[error("level {level}: word has {len} cells but period is {period}")]
    WordLength {
        level: usize,
        period: usize,
        len: usize,
    },

    #[error("divisibility chain broken: period {lower} at level {level} does not properly divide {upper}")]
    Divisibility {
        level: usize,
        lower: usize,
        upper: usize,
    },

    #[error("levels {lower}-{upper} inconsistent at index {index}: filled cell changed or erased")]
    Consistency {
        lower: usize,
        upper: usize,
        index: usize,
    },

    #[error("levels {lower}-{upper}: hole at index {index} is filled with one symbol along its whole class")]
    HolePersistence {
        lower: usize,
        upper: usize,
        index: usize,
    },

    #[error("period {period} does not divide the declared scale {scale}")]
    Scale { period: usize, scale: String },

    #[error("{p} does not divide the deepest period {period}")]
    NonDivisor { p: usize, period: usize },

    #[error("skeleton at period {p} has no holes")]
    FullyPeriodic { p: usize },

    #[error("supernatural number has no prime factors")]
    EmptyScale,

    #[error("factorization term exceeds 64 bits")]
    FactorOverflow,

    #[error("alphabets differ")]
    AlphabetMismatch,

    #[error("period mismatch: {0}")]
    PeriodMismatch(String),

    #[error("deepest periods {left} and {right} are incompatible (neither divides the other)")]
    IncompatiblePeriods { left: usize, right: usize },

    #[error("both towers must declare a scale")]
    MissingScaleDeclaration,

    #[error("invalid odometer point: {0}")]
    InvalidPoint(String),

    #[error("invalid block code: {0}")]
    InvalidCode(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
