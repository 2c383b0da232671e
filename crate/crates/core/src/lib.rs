//! Fidelity-based purity, coherence and measurement-induced correlation
//! measures for finite-dimensional quantum states.
//!
//! The central quantity is the ratio fidelity
//! `F(ρ, σ) = (tr ρσ)² / (tr ρ² · tr σ²)`. Purity, coherence and correlation
//! measures are defined as distances (via `F`) to the relevant free sets:
//! the maximally mixed state, diagonal states, and the images of local
//! von Neumann measurements.
//!
//! ```
//! use qres::states::bell_phi_plus;
//! use qres::purity::fidelity_purity;
//! use qres::measurement::{quantum_correlation, OptimizerSettings};
//!
//! let bell = bell_phi_plus();
//! assert!((fidelity_purity(bell.density(), None) - 1.0).abs() < 1e-12);
//! let q = quantum_correlation(&bell, &OptimizerSettings::default()).unwrap();
//! assert!((q.value - 0.5).abs() < 1e-9);
//! ```

pub mod channels;
pub mod coherence;
pub mod error;
pub mod fidelity;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod purity;
pub mod random;
pub mod states;
pub mod sweep;

pub use error::{QresError, Result};
pub use linalg::{ComplexMatrix, Subsystem, C64};
pub use states::{BipartiteState, DensityMatrix};
