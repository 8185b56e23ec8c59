use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which formula form of a preference structure a zero weighted count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Winner,
    Loser,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Winner => f.write_str("winner (formula form)"),
            Side::Loser => f.write_str("loser (negated formula form)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("atom `{0}` is not declared")]
    UndeclaredAtom(String),

    #[error("invalid atom token `{0}`")]
    InvalidAtom(String),

    #[error("{count} atoms exceeds the limit of {limit} for {what}")]
    TooManyAtoms {
        count: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("no weight for atom `{0}`")]
    MissingWeight(String),

    #[error("weight {value} for atom `{atom}` is not a probability")]
    InvalidWeight { atom: String, value: f64 },

    #[error("exponent `{0}` is not a positive integer")]
    NonIntegerExponent(String),

    #[error("term `{0}` uses atom `{1}` with both polarities")]
    ContradictoryTerm(String, String),

    #[error("polynomial is not disjoint: terms `{first}` and `{second}` are both satisfied by {witness}")]
    NonDisjoint {
        first: String,
        second: String,
        witness: String,
    },

    #[error("{0} has no models under the structure's constraints (weighted count is zero)")]
    ZeroCount(Side),

    #[error("structure is trivial: {0}")]
    TrivialStructure(&'static str),

    #[error("unknown catalog entry `{name}`{}", suggest(.suggestions))]
    UnknownEntry { name: String, suggestions: Vec<String> },

    #[error("lower bound does not preference-entail the upper bound")]
    BoundViolation,

    #[error("enumeration would produce {0} candidate structures")]
    EnumerationTooLarge(u128),

    #[error("invalid mark table: {0}")]
    InvalidMarks(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("catalog entry `{name}` failed its self-check: {reason}")]
    CatalogInvariant { name: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn suggest(names: &[String]) -> String {
    if names.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", names.join(", "))
    }
}
