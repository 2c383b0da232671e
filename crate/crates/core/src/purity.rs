//! Purity measures: linear purity, Hilbert–Schmidt purity and the
//! log-fidelity purity with its correlation-matrix form.

use crate::linalg::{hs_inner, ComplexMatrix};
use crate::states::{CorrelationMatrix, DensityMatrix};

/// `log_base(x)`; base 1 (a trivial one-dimensional system) yields 0.
fn log_base(x: f64, base: f64) -> f64 {
    if base <= 1.0 {
        0.0
    } else {
        x.ln() / base.ln()
    }
}

/// All purity figures for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityReport {
    /// `tr ρ²`
    pub linear: f64,
    /// `tr ρ² − 1/d`, the Brukner–Zeilinger information
    pub hilbert_schmidt: f64,
    pub fidelity_purity: f64,
    pub log_base: usize,
}

impl PurityReport {
    pub fn new(rho: &DensityMatrix) -> Self {
        Self {
            linear: linear_purity(rho),
            hilbert_schmidt: hs_purity(rho),
            fidelity_purity: fidelity_purity(rho, None),
            log_base: rho.dim(),
        }
    }
}

pub fn linear_purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// `‖ρ − I/d‖²_HS = tr ρ² − 1/d`.
pub fn hs_purity(rho: &DensityMatrix) -> f64 {
    rho.purity() - 1.0 / rho.dim() as f64
}

/// Squared Hilbert–Schmidt distance to `I/d`, computed directly.
pub fn hs_distance_to_mixed(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let diff = rho.matrix() - &ComplexMatrix::identity(d).scale(1.0 / d as f64);
    hs_inner(&diff, &diff).expect("same shape").re
}

/// `−log_b F(ρ, I/d) = log_b(d · tr ρ²)`, `b` defaulting to `d`.
pub fn fidelity_purity(rho: &DensityMatrix, base: Option<usize>) -> f64 {
    let d = rho.dim();
    let b = base.unwrap_or(d);
    log_base(d as f64 * rho.purity(), b as f64)
}

/// `log_d(d ‖Γ‖²)` for the correlation matrix of a state of total dimension `d`.
pub fn purity_from_gamma(gamma: &CorrelationMatrix, d: usize) -> f64 {
    log_base(d as f64 * gamma.norm_sqr(), d as f64)
}

/// `log_base(d · tr ρ²)` from a precomputed linear purity.
pub fn fidelity_purity_from_linear(linear: f64, d: usize) -> f64 {
    log_base(d as f64 * linear, d as f64)
}
