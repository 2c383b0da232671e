//! Coherence in the computational basis: the fidelity-based monotone, the l1
//! norm of coherence, maximal coherence and the purity/coherence classifier.

use crate::error::{QresError, Result};
use crate::linalg::{conjugate, ComplexMatrix};
use crate::purity::fidelity_purity;
use crate::states::{DensityMatrix, GeneratorBasis};

/// `1 − max_δ F(ρ, δ)` over diagonal states δ.
///
/// For diagonal δ the ratio fidelity is `(Σ δ_i ρ_ii)² / (tr ρ² · Σ δ_i²)`. By
/// Cauchy–Schwarz this is maximized at `δ ∝ diag(ρ)`, which is itself a
/// probability vector, giving `max F = Σ ρ_ii² / tr ρ²`.
pub fn coherence_fidelity(rho: &DensityMatrix) -> f64 {
    let diag_sq: f64 = rho.matrix().diagonal().iter().map(|z| z.re * z.re).sum();
    (1.0 - diag_sq / rho.purity()).max(0.0)
}

/// The diagonal state achieving the maximum in [`coherence_fidelity`].
pub fn closest_incoherent(rho: &DensityMatrix) -> DensityMatrix {
    let diag: Vec<f64> = rho
        .matrix()
        .diagonal()
        .iter()
        .map(|z| z.re.max(0.0))
        .collect();
    let total: f64 = diag.iter().sum();
    DensityMatrix::from_trusted(ComplexMatrix::from_real_diag(
        &diag.iter().map(|p| p / total).collect::<Vec<_>>(),
    ))
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn coherence_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += m[(i, j)].norm();
            }
        }
    }
    total
}

/// `C_l1` from a generalized Bloch vector in [`GeneratorBasis`] ordering:
/// `Σ_{i<k} √(x_i² + x_{i+k}²)`, pairing each symmetric generator with the
/// antisymmetric one at the same position.
pub fn coherence_l1_from_bloch(x: &[f64], basis: &GeneratorBasis) -> f64 {
    let k = basis.k();
    (0..k).map(|i| x[i].hypot(x[i + k])).sum()
}

/// `1 − d^(−P_F(ρ)) = 1 − 1/(d · tr ρ²)`: the largest fidelity coherence on the
/// unitary orbit of ρ.
pub fn maximal_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim() as f64;
    1.0 - d.powf(-fidelity_purity(rho, None))
}

/// `½ (P_F(ρ) + C_l1(ρ)/(d−1))`: 0 for `I/d`, 1 for maximally coherent pure states.
pub fn tau_classifier(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    if d < 2 {
        return Err(QresError::Unsupported(
            "the classifier needs dimension at least 2".into(),
        ));
    }
    Ok(0.5 * (fidelity_purity(rho, None) + coherence_l1(rho) / (d - 1) as f64))
}

/// Expresses ρ in the basis given by the columns of `u`: returns `U† ρ U`, so
/// coherence measures of the result refer to that basis.
pub fn in_basis(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    if u.rows() != rho.dim() || !u.is_square() {
        return Err(QresError::DimensionMismatch(format!(
            "basis matrix is {}x{}, state is {}-dimensional",
            u.rows(),
            u.cols(),
            rho.dim()
        )));
    }
    DensityMatrix::new(conjugate(&u.adjoint(), rho.matrix()))
}
