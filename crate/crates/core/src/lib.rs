//! Qubit-assisted phase metrology on a collective spin ensemble.
//!
//! The probe is an ensemble of `N` spin-1/2 particles living in its
//! `(N + 1)`-dimensional symmetric (Dicke) subspace. It is coupled to a single
//! ancillary qubit, evolved jointly for `t1`, rotated by the unknown phase
//! `theta`, then evolved backwards (time reversal) before measurement.
//!
//! Modules, bottom-up:
//!
//! * [`spin_algebra`] collective spin matrices, eigenbases, matrix exponentials
//!   and the probe/ancilla tensor embedding.
//! * [`states`] ancilla and probe state constructors.
//! * [`circuit`] Hamiltonians, the three-stage circuit unitary, closed forms,
//!   reversal periods and optimal settings.
//! * [`fisher`] quantum and classical Fisher information.
//! * [`experiments`] parameter sweeps producing CSV datasets and fits.

pub mod circuit;
pub mod error;
pub mod experiments;
pub mod fisher;
pub mod spin_algebra;
pub mod states;

pub use circuit::{Interaction, ModelParams, PeriodSolution, Reversal, Schedule, SettingStatus};
pub use error::{Error, Result};
pub use fisher::{FisherMethod, FisherResult, MeasurementBasis, ProbabilityTable};
pub use spin_algebra::{EnsembleDim, GeneratorKind, Operator, PhaseGenerator};
pub use states::{AncillaState, SpectralProbe};

pub use num_complex::Complex64;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
