//! Discrimination strategies for networks of two-level quantum detectors.
//!
//! The crate models a row of phase detectors, each prepared in one of two
//! nonorthogonal single-qubit states, and asks how well a receiver can
//! tell firing configurations apart. It provides:
//!
//! * a dense complex linear-algebra kernel ([`linalg`]) with a Hermitian
//!   Jacobi eigensolver, trace norm, and PSD functional calculus;
//! * state and measurement types ([`quantum`]): detector states, density
//!   matrices, labeled POVMs, hypothesis ensembles;
//! * discrimination strategies ([`strategies`]): minimum-error (binary
//!   Helstrom), unambiguous product measurements, the pretty-good
//!   measurement, and a cluster POVM with a quartic spectral cross-check;
//! * named physical scenarios ([`scenarios`]) with closed-form and
//!   numerically reconstructed success probabilities side by side;
//! * an independent verification oracle ([`oracle`]) that re-derives all
//!   states and measurements from scratch and reports deviations;
//! * theta-sweep drivers ([`sweep`]) producing byte-stable CSV/JSON, with
//!   a data-parallel path (feature `parallel`, on by default) and an
//!   always-available sequential fallback.

pub mod error;
pub mod linalg;
pub mod quantum;
pub mod oracle;
pub mod scenarios;
pub mod strategies;
pub mod sweep;

pub use error::{DetnetError, Result};
