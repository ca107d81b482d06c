//! Command-line driver, text formats and seeded experiment runners on top of
//! `hamsim-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod random;
pub mod sweep;

pub use error::{AppError, AppResult, ErrorKind};
