//! Integrated safety/security risk analysis over FMEA and TARA worksheets.
//!
//! The crate scores failure modes and threat modes with a classical risk
//! priority number, then corrects Occurrence and Detection with cross-domain
//! correlation factors (CDCFs). Factors come from configuration or are derived
//! from a gate-level netlist: cone-of-influence overlap for common effects and
//! detection, SCOAP controllability deltas for prevention. An exhaustive
//! stuck-at / attack-toggle simulator serves as an empirical check of the
//! structural estimates.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `ftmea` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod correlation;
pub mod faultsim;
pub mod netlist;
pub mod risk;
pub mod risk_matrix;
pub mod rpn;
pub mod scoap;
pub mod structural;

pub use correlation::{CdcfBundle, CdcfError, CommonEffectMatrix, Entry, InfluenceKind, InfluenceMatrix, Provenance, RawCdcf, Table};
pub use netlist::{Gate, GateKind, NetId, NetSet, Netlist, NetlistError};
pub use risk::{Countermeasure, Domain, ItemKind, MeasureKind, NetAnchors, Rating, RiskError, RiskItem, Worksheet};
pub use risk_matrix::{RiskMatrixConfig, RiskMatrixError};
pub use rpn::{RankChange, RpnError, RpnResult};
pub use scoap::{ScoapError, ScoapReport};
pub use faultsim::{CampaignResult, FaultSimError, FaultSite, Polarity, SimVector, VectorSource};
pub use structural::{Derivation, DerivationRequest, Evidence, StructuralError};
