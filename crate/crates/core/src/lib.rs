//! Qubit maps, including not-completely-positive ones.
//!
//! The crate converts between superoperator, dynamical (Choi) and signed Kraus
//! forms, classifies maps as CP or NCP, locates positivity domains (the Bloch
//! points a map sends back into the Bloch ball), builds the standard map
//! families, and estimates CP volume fractions by Monte Carlo.

pub mod channels;
pub mod document;
pub mod domain;
pub mod error;
pub mod families;
pub mod matops;
pub mod measure;
pub mod rng;
pub mod states;

pub use channels::{
    apply, check_validity, choi_from_superop, classify, kraus_from_choi, output_spectrum_unital,
    superop_from_choi, CPVerdict, ChoiMatrix, Classification, InvariantSet, ProbeConfig, QubitMap,
    SignedKraus, SignedKrausSet, SingularMap, SuperOp, ValidityStatus, ValidityVerdict,
};
pub use document::{MapDocument, Representation};
pub use domain::{detect_fixed_lines, export_domain, scan_domain, DomainReport, ScanMode};
pub use error::{Error, Result};
pub use families::{CnotIntermediate, ControlledUnitaryFamily, DephasingModel, PauliPoint};
pub use matops::{CMat2, CMat4, EigenDecomp, C64};
pub use measure::{DivergenceFamily, DivergenceScan, MeasureEstimate};
pub use states::{BlochVector, QubitState};
