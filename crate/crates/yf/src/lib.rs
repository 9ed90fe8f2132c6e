//! Quaternionic Yoshida lifts in exact arithmetic.

pub mod brandt;
pub mod cli_io;
pub mod congruence;
pub mod exact_core;
pub mod harmonics;
pub mod kernels;
pub mod quatlat;
pub mod waldspurger;
pub mod yoshida;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("search bound exceeded: {0}")]
    SearchBound(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("excluded weight: {0}")]
    ExcludedWeight(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("not an eigenform: {0}")]
    NotEigenform(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
