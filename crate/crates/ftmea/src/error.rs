use std::fmt;
use std::io;
use std::path::PathBuf;

use ftmea_core::correlation::CdcfError;
use ftmea_core::risk::AnchorError;
use ftmea_core::rpn::RpnError;
use ftmea_core::structural::StructuralError;
use ftmea_core::{FaultSimError, NetlistError, RiskError, RiskMatrixError, ScoapError};

/// Problems with the contents of one input file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("not valid UTF-8")]
    NotUtf8,
    #[error("line {line}: {message}")]
    MalformedCsv { line: u64, message: String },
    #[error("{}{source}", line_prefix(*.line))]
    Risk { line: Option<u64>, source: RiskError },
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("{path}: number `{literal}` uses scientific notation")]
    ScientificNotation { path: String, literal: String },
    #[error(transparent)]
    Cdcf(#[from] CdcfError),
    #[error(transparent)]
    RiskMatrix(#[from] RiskMatrixError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

fn line_prefix(line: Option<u64>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl From<RiskError> for FormatError {
    fn from(source: RiskError) -> Self {
        FormatError::Risk { line: None, source }
    }
}

/// Anything that stops a subcommand; maps onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Usage(String),
    #[error("unresolved anchors: {}", join(.0))]
    Anchors(Vec<AnchorError>),
    #[error(transparent)]
    Cdcf(#[from] CdcfError),
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error(transparent)]
    Scoap(#[from] ScoapError),
    #[error(transparent)]
    FaultSim(#[from] FaultSimError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Rpn(#[from] RpnError),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Error {
        Error::Io { path: path.into(), source }
    }

    pub fn input(path: impl Into<PathBuf>, source: impl Into<FormatError>) -> Error {
        Error::Input { path: path.into(), source: source.into() }
    }

    /// 2 for I/O failures, 1 for everything the user can fix in the inputs.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}
