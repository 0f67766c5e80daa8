//! File formats, reports and the command-line front end for `ftmea-core`.

pub mod cli;
pub mod error;
pub mod json_io;
pub mod report;
pub mod worksheet_csv;

pub use error::{Error, FormatError};
