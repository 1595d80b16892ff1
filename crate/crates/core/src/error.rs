use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A weight generator vector violates `a_k > 0`, `sum(a) <= 1`.
    InvalidWeights(String),
    /// Two inputs that must share the player count do not.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A player index outside `0..m`.
    PlayerOutOfRange {
        player: usize,
        players: usize,
    },
    /// An exercise set outside the domain an operation accepts.
    InvalidExerciseSet(String),
    /// A strategy entry other than 0 or 1, or a quitting time past the horizon.
    InvalidProfile(String),
    /// The weighted inner product does not exist when `sum(a) = 1`.
    SaturatedInnerProduct,
    /// A non-finite number where a real value is required.
    NonFinite(&'static str),
    InvalidScenarios(String),
    InvalidTree(String),
    InvalidStoppingRule(String),
    InvalidQuittingGame(String),
    InvalidWeightTable(String),
    /// An exhaustive computation would exceed its size guard.
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidWeights(msg) => write!(f, "invalid weight system: {msg}"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::PlayerOutOfRange { player, players } => {
                write!(
                    f,
                    "player index {player} out of range for {players} players"
                )
            }
            Error::InvalidExerciseSet(msg) => write!(f, "invalid exercise set: {msg}"),
            Error::InvalidProfile(msg) => write!(f, "invalid strategy profile: {msg}"),
            Error::SaturatedInnerProduct => {
                f.write_str("the weighted inner product is undefined when the weights sum to one")
            }
            Error::NonFinite(what) => write!(f, "{what} must be finite"),
            Error::InvalidScenarios(msg) => write!(f, "invalid scenario set: {msg}"),
            Error::InvalidTree(msg) => write!(f, "invalid event tree: {msg}"),
            Error::InvalidStoppingRule(msg) => write!(f, "invalid stopping rule: {msg}"),
            Error::InvalidQuittingGame(msg) => write!(f, "invalid quitting game: {msg}"),
            Error::InvalidWeightTable(msg) => write!(f, "invalid weight table: {msg}"),
            Error::TooLarge { what, size, limit } => {
                write!(f, "{what} has size {size}, exceeding the limit of {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}
