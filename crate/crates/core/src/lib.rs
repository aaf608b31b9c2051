//! Constructive T-universal polynomial series with prescribed approximation
//! curves.
//!
//! The crate builds explicit polynomial series `f = q_1 + q_2 + ...` on the
//! unit disc such that prescribed affine windows `a L_m + b`, with anchors
//! `b` on curves of a chosen family, reproduce target polynomials to a
//! prescribed accuracy, and it re-verifies every such claim independently.
//!
//! * [`curves`]: curve families, r-distance, continuity certification.
//! * [`enumeration`]: the canonical dense sequences and index maps.
//! * [`approx`]: simultaneous least-squares fits on disjoint disks.
//! * [`builder`]: window placement, series assembly, decomposition.
//! * [`verify`]: membership predicates, witness search and snapping.
//! * [`format`]: canonical serialization of configs, series, certificates.

pub mod approx;
pub mod builder;
pub mod curves;
pub mod enumeration;
pub mod error;
pub mod format;
pub mod poly;
pub mod verify;

pub use approx::{fit_simultaneous, Disk, FitConfig, FitReport, FittedPolynomial, PieceTarget};
pub use builder::{
    build_universal, decompose, BuildConfig, BuildOutcome, BuildStatus, SeriesTerm, Task, UniversalSeries, Witness,
};
pub use curves::{CurveFamily, CurveSpec, Interval, SampledCurve};
pub use error::{Error, Result};
pub use poly::{Evaluable, Polynomial, RationalPolynomial};
pub use verify::{Certificate, MembershipIndices};

pub use num_complex::Complex64;
