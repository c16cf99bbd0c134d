use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Every state word was zero. The all-zeros state is a fixed point of every Romu map.
    #[error("zero state: at least one state word must be nonzero")]
    ZeroState,

    #[error("multiplier {0:#x} is even and therefore not invertible")]
    EvenMultiplier(u64),

    #[error("multiplier {multiplier:#x} does not fit in {word_bits} bits")]
    MultiplierTooWide { multiplier: u64, word_bits: u32 },

    #[error("rotation {rotation} outside 1..{word_bits}")]
    RotationOutOfRange { rotation: u32, word_bits: u32 },

    #[error("{family} takes {expected} rotation(s), got {got}")]
    RotationCount {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unsupported word width {0}")]
    WordBits(u32),

    #[error("{family} expects {expected} state word(s), got {got}")]
    StateWords {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("state word {word:#x} does not fit in {word_bits} bits")]
    WordTooWide { word: u64, word_bits: u32 },

    #[error("half-word output needs an even word width, got {0}")]
    OddHalfWidth(u32),

    #[error("{bits} bits of state exceeds the {limit}-bit limit")]
    StateTooLarge { bits: u32, limit: u32 },

    #[error("could not allocate {bytes} bytes for the membership set")]
    Allocation { bytes: usize },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluator failed on candidate {candidate}: {message}")]
    Evaluator { candidate: String, message: String },

    #[error("failed to spawn external tester `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("external tester closed its input after {bytes_written} bytes")]
    BrokenPipe { bytes_written: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
