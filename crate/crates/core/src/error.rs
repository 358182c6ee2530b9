use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain on which a formula is stated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected (m={expected_m}, n={expected_n}), got (m={m}, n={n})")]
    Mismatch {
        expected_m: u64,
        expected_n: u64,
        m: u64,
        n: u64,
    },

    #[error("table of {cells} cells exceeds the configured cap of {cap}")]
    TableTooLarge { cells: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
