//! The ratio fidelity `(tr ρσ)² / (tr ρ² · tr σ²)`, the Uhlmann fidelity, and
//! the randomized check of the ratio fidelity's algebraic properties.

use crate::error::{QresError, Result};
use crate::harness::{PropertyDef, PropertyKind, PropertyOutcome, TrialResult};
use crate::linalg::{conjugate, eig_hermitian, psd_sqrt, tensor, ComplexMatrix};
use crate::random::{random_pure_vector, random_unitary, rng_from_seed};
use crate::states::{random_density_any_rank, DensityMatrix};

/// Ratio fidelity on arbitrary positive operators (the formula is scale
/// invariant, so blocks need not have unit trace). Returns `None` when either
/// operator is zero.
pub fn ratio_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<f64> {
    let overlap = ComplexMatrix::trace_product_re(a, b).max(0.0);
    let pa = ComplexMatrix::trace_product_re(a, a);
    let pb = ComplexMatrix::trace_product_re(b, b);
    if pa <= 0.0 || pb <= 0.0 {
        return None;
    }
    Some(((overlap * overlap) / (pa * pb)).clamp(0.0, 1.0))
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(QresError::DimensionMismatch(format!(
            "fidelity between {}- and {}-dimensional states",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// `(tr ρσ)² / (tr ρ² · tr σ²)`, clamped to `[0, 1]`. Bitwise symmetric in its
/// arguments.
pub fn fidelity_alt(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    Ok(ratio_fidelity(rho.matrix(), sigma.matrix()).expect("states have positive purity"))
}

/// Uhlmann fidelity `(tr √(√σ ρ √σ))²`.
pub fn fidelity_uhlmann(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let root = psd_sqrt(sigma.matrix())?;
    let inner = conjugate(&root, rho.matrix());
    let eig = eig_hermitian(&inner)?;
    let floor = 64.0 * f64::EPSILON;
    let tr: f64 = eig
        .values
        .iter()
        .filter(|&&l| l > floor)
        .map(|l| l.sqrt())
        .sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

const F_TOL: f64 = 1e-10;

/// The ratio fidelity's listed properties as harness checks.
///
/// F4 and F6 are checked in the form they are usually quoted
/// (`⟨ψ|ρ|ψ⟩ / tr ρ²` and exact additivity over projector blocks). Neither
/// holds for this fidelity in general, so two corrected companions are also
/// reported: the squared pure-state form and block subadditivity.
pub fn fidelity_properties() -> Vec<PropertyDef> {
    let props: [(&'static str, &'static str, fn(u64) -> TrialResult); 8] = [
        ("F1", "0 <= F <= 1 and F(rho, rho) = 1", f1),
        ("F2", "F(rho, sigma) = F(sigma, rho) exactly", f2),
        ("F3", "unitary invariance", f3),
        (
            "F4",
            "pure-state form F(rho, psi) = <psi|rho|psi> / tr rho^2",
            f4,
        ),
        (
            "F4-squared",
            "pure-state form F(rho, psi) = <psi|rho|psi>^2 / tr rho^2",
            f4_squared,
        ),
        ("F5", "multiplicativity on tensor products", f5),
        ("F6", "additivity over rank-1 projector blocks", f6),
        (
            "F6-subadditive",
            "F(sum rho_i, sum sigma_i) <= sum F(rho_i, sigma_i)",
            f6_subadditive,
        ),
    ];
    props
        .into_iter()
        .map(|(name, description, check)| PropertyDef {
            suite: "fidelity",
            name,
            description,
            kind: PropertyKind::Guaranteed,
            tolerance: if name == "F2" { 0.0 } else { F_TOL },
            check,
        })
        .collect()
}

/// Runs every fidelity property for `trials` seeded trials.
pub fn check_f_properties(seed: u64, trials: usize) -> Vec<PropertyOutcome> {
    fidelity_properties()
        .iter()
        .map(|d| d.run(seed, trials))
        .collect()
}

fn dim_for(rng: &mut impl rand::Rng) -> usize {
    rng.random_range(2..=4)
}

fn f1(seed: u64) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let d = dim_for(&mut rng);
    let rho = random_density_any_rank(&mut rng, d);
    let sigma = random_density_any_rank(&mut rng, d);
    let f = fidelity_alt(&rho, &sigma).unwrap();
    let self_f = fidelity_alt(&rho, &rho).unwrap();
    let bound = (-f).max(f - 1.0).max(0.0);
    bound.max((self_f - 1.0).abs())
}

fn f2(seed: u64) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let d = dim_for(&mut rng);
    let rho = random_density_any_rank(&mut rng, d);
    let sigma = random_density_any_rank(&mut rng, d);
    (fidelity_alt(&rho, &sigma).unwrap() - fidelity_alt(&sigma, &rho).unwrap()).abs()
}

fn f3(seed: u64) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let d = dim_for(&mut rng);
    let rho = random_density_any_rank(&mut rng, d);
    let sigma = random_density_any_rank(&mut rng, d);
    let u = random_unitary(&mut rng, d);
    let ur = DensityMatrix::from_trusted(conjugate(&u, rho.matrix()));
    let us = DensityMatrix::from_trusted(conjugate(&u, sigma.matrix()));
    (fidelity_alt(&ur, &us).unwrap() - fidelity_alt(&rho, &sigma).unwrap()).abs()
}

fn pure_pair(seed: u64) -> (DensityMatrix, f64, f64) {
    let mut rng = rng_from_seed(seed);
    let d = dim_for(&mut rng);
    let rho = random_density_any_rank(&mut rng, d);
    let psi = random_pure_vector(&mut rng, d);
    let expectation = crate::linalg::C64::new(0.0, 0.0);
    let expectation = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .fold(expectation, |acc, (i, j)| {
            acc + psi[i].conj() * rho.matrix()[(i, j)] * psi[j]
        })
        .re;
    let f = fidelity_alt(
        &rho,
        &DensityMatrix::from_trusted(ComplexMatrix::outer(&psi)),
    )
    .unwrap();
    let purity = rho.purity();
    (rho, f, expectation / purity)
}

fn f4(seed: u64) -> TrialResult {
    let (_, f, ratio) = pure_pair(seed);
    (f - ratio).abs()
}

fn f4_squared(seed: u64) -> TrialResult {
    let (rho, f, ratio) = pure_pair(seed);
    let expectation = ratio * rho.purity();
    (f - expectation * ratio).abs()
}

fn f5(seed: u64) -> TrialResult {
    let mut rng = rng_from_seed(seed);
    let (d1, d2) = (dim_for(&mut rng), dim_for(&mut rng));
    let r1 = random_density_any_rank(&mut rng, d1);
    let s1 = random_density_any_rank(&mut rng, d1);
    let r2 = random_density_any_rank(&mut rng, d2);
    let s2 = random_density_any_rank(&mut rng, d2);
    let joint = fidelity_alt(&r1.tensor(&r2).unwrap(), &s1.tensor(&s2).unwrap()).unwrap();
    (joint - fidelity_alt(&r1, &s1).unwrap() * fidelity_alt(&r2, &s2).unwrap()).abs()
}

/// Rank-1 computational-basis blocks `Π_i ρ Π_i` of two random states and the
/// two sides of the block identity. Blocks that vanish on both sides are
/// skipped; a block vanishing on one side contributes 0.
fn block_sides(seed: u64) -> (f64, f64) {
    let mut rng = rng_from_seed(seed);
    let d = dim_for(&mut rng);
    let rho = random_density_any_rank(&mut rng, d);
    let sigma = random_density_any_rank(&mut rng, d);
    let mut rho_sum = ComplexMatrix::zeros(d, d);
    let mut sigma_sum = ComplexMatrix::zeros(d, d);
    let mut block_total = 0.0;
    for i in 0..d {
        let mut rb = ComplexMatrix::zeros(d, d);
        let mut sb = ComplexMatrix::zeros(d, d);
        rb[(i, i)] = rho.matrix()[(i, i)];
        sb[(i, i)] = sigma.matrix()[(i, i)];
        rho_sum = &rho_sum + &rb;
        sigma_sum = &sigma_sum + &sb;
        block_total += block_fidelity(&rb, &sb);
    }
    let joint = ratio_fidelity(&rho_sum, &sigma_sum).unwrap_or(0.0);
    (joint, block_total)
}

fn block_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    ratio_fidelity(a, b).unwrap_or(0.0)
}

fn f6(seed: u64) -> TrialResult {
    let (joint, blocks) = block_sides(seed);
    (joint - blocks).abs()
}

fn f6_subadditive(seed: u64) -> TrialResult {
    let (joint, blocks) = block_sides(seed);
    (joint - blocks).max(0.0)
}

/// `F(ρ₁⊗ρ₂, σ₁⊗σ₂)`, exposed for callers that want the joint value.
pub fn product_fidelity(
    r1: &DensityMatrix,
    r2: &DensityMatrix,
    s1: &DensityMatrix,
    s2: &DensityMatrix,
) -> Result<f64> {
    let a = DensityMatrix::from_trusted(tensor(r1.matrix(), r2.matrix())?);
    let b = DensityMatrix::from_trusted(tensor(s1.matrix(), s2.matrix())?);
    fidelity_alt(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};
    use crate::states::random_density;

    #[test]
    fn self_fidelity_is_exactly_one() {
        for seed in 0..20 {
            let rho = random_density(3, 1 + (seed as usize % 3), seed).unwrap();
            assert_eq!(fidelity_alt(&rho, &rho).unwrap(), 1.0);
        }
    }

    #[test]
    fn orthogonal_pure_states() {
        let f = fidelity_alt(&DensityMatrix::basis(2, 0), &DensityMatrix::basis(2, 1)).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn fidelity_with_maximally_mixed() {
        for seed in 0..20 {
            let rho = random_density(4, 2, seed).unwrap();
            let f = fidelity_alt(&rho, &DensityMatrix::maximally_mixed(4)).unwrap();
            assert!((f - 1.0 / (4.0 * rho.purity())).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_dims() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        assert!(fidelity_alt(&a, &b).is_err());
        assert!(fidelity_uhlmann(&a, &b).is_err());
    }

    #[test]
    fn uhlmann_basics() {
        let rho = random_density(3, 2, 17).unwrap();
        assert!((fidelity_uhlmann(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let psi = [h, ZERO, h];
        let pure = DensityMatrix::pure(&psi).unwrap();
        let expectation: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (psi[i].conj() * rho.matrix()[(i, j)] * psi[j]).re)
            .sum();
        assert!((fidelity_uhlmann(&pure, &rho).unwrap() - expectation).abs() < 1e-9);
    }

    #[test]
    fn uhlmann_and_ratio_differ_on_commuting_states() {
        // diag(p) vs diag(q): Uhlmann gives (Σ√(p_i q_i))², the ratio form gives
        // (p·q)² / (|p|²|q|²).
        let p = [0.7, 0.3];
        let q = [0.2, 0.8];
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&p)).unwrap();
        let sigma = DensityMatrix::new(ComplexMatrix::from_real_diag(&q)).unwrap();
        let uhl: f64 = p
            .iter()
            .zip(&q)
            .map(|(a, b)| (a * b).sqrt())
            .sum::<f64>()
            .powi(2);
        let dot: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        let ratio = dot * dot
            / (p.iter().map(|a| a * a).sum::<f64>() * q.iter().map(|b| b * b).sum::<f64>());
        assert!((fidelity_uhlmann(&rho, &sigma).unwrap() - uhl).abs() < 1e-12);
        assert!((fidelity_alt(&rho, &sigma).unwrap() - ratio).abs() < 1e-12);
        assert!((uhl - ratio).abs() > 0.1);
    }

    #[test]
    fn hadamard_invariance() {
        let h = ComplexMatrix::from_fn(2, 2, |i, j| {
            C64::new(if i == 1 && j == 1 { -1.0 } else { 1.0 } / 2f64.sqrt(), 0.0)
        });
        let rho = random_density(2, 2, 1).unwrap();
        let sigma = random_density(2, 1, 2).unwrap();
        let before = fidelity_alt(&rho, &sigma).unwrap();
        let after =
            fidelity_alt(&rho.conjugate(&h).unwrap(), &sigma.conjugate(&h).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn product_rule() {
        let r1 = random_density(2, 2, 1).unwrap();
        let r2 = random_density(2, 2, 2).unwrap();
        let s1 = random_density(2, 2, 3).unwrap();
        let s2 = random_density(2, 1, 4).unwrap();
        let joint = product_fidelity(&r1, &r2, &s1, &s2).unwrap();
        let split = fidelity_alt(&r1, &s1).unwrap() * fidelity_alt(&r2, &s2).unwrap();
        assert!((joint - split).abs() < 1e-12);
    }

    #[test]
    fn block_additivity_counterexample() {
        // diag(0.5, 0.5) vs diag(0.9, 0.1): each nonzero rank-1 block pair has
        // ratio fidelity 1, so the block sum is 2 while the joint value is < 1.
        let a = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        let b = ComplexMatrix::from_real_diag(&[0.9, 0.1]);
        let joint = ratio_fidelity(&a, &b).unwrap();
        assert!((joint - 0.25 / (0.5 * 0.82)).abs() < 1e-12);
        let mut blocks = 0.0;
        for i in 0..2 {
            let mut ab = ComplexMatrix::zeros(2, 2);
            let mut bb = ComplexMatrix::zeros(2, 2);
            ab[(i, i)] = a[(i, i)];
            bb[(i, i)] = b[(i, i)];
            blocks += block_fidelity(&ab, &bb);
        }
        assert_eq!(blocks, 2.0);
    }

    #[test]
    fn zero_blocks() {
        let z = ComplexMatrix::zeros(2, 2);
        let a = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(ratio_fidelity(&z, &z), None);
        assert_eq!(block_fidelity(&z, &a), 0.0);
    }
}
