//! Quantum channels: Kraus representations, the free operations of purity
//! (mixtures of unitaries, noisy operations), incoherent channels and the
//! Stinespring dilation.
//!
//! Every mixture of unitaries and every noisy operation is unital. The
//! converse fails in general (unital channels that are not mixtures of
//! unitaries exist for d ≥ 3), so nothing here tries to decompose a unital
//! channel into unitaries.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{QresError, Result};
use crate::linalg::{partial_trace, tensor, ComplexMatrix, Subsystem, C64, ZERO};
use crate::random::{
    complex_normal, random_isometry, random_probabilities, random_unitary, rng_from_seed,
};
use crate::states::{BipartiteState, DensityMatrix};

pub const COMPLETENESS_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

pub trait Channel {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

/// `ρ ↦ Σ_k A_k ρ A_k†` with `Σ_k A_k† A_k = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let d = match kraus.first() {
            Some(a) if a.is_square() => a.rows(),
            Some(a) => {
                return Err(QresError::DimensionMismatch(format!(
                    "Kraus operators must be square, got {}x{}",
                    a.rows(),
                    a.cols()
                )))
            }
            None => return Err(QresError::InvalidParameter("empty Kraus set".into())),
        };
        if kraus.iter().any(|a| a.rows() != d || a.cols() != d) {
            return Err(QresError::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        let channel = Self { kraus };
        let deviation = channel.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(QresError::IncompleteKraus { deviation });
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// Complete dephasing in the computational basis, `{|i⟩⟨i|}`.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut p = ComplexMatrix::zeros(d, d);
                p[(i, i)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        Self { kraus }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Max-abs entry of `Σ A_k† A_k − I`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.kraus[0].rows();
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| {
                &acc + &(&a.adjoint() * a)
            });
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// Applies the map to an arbitrary operator (no validation).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = m.rows();
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| {
                &acc + &(&(a * m) * &a.adjoint())
            })
    }

    /// Max-abs entry of `Φ(I/d) − I/d`.
    pub fn unitality_deviation(&self) -> f64 {
        let d = self.dim();
        let mixed = ComplexMatrix::identity(d).scale(1.0 / d as f64);
        self.apply_matrix(&mixed).max_abs_diff(&mixed)
    }

    /// `id_a ⊗ Φ` acting on the b factor of a bipartite state.
    pub fn on_b(&self, da: usize) -> Result<KrausChannel> {
        let id = ComplexMatrix::identity(da);
        let kraus = self
            .kraus
            .iter()
            .map(|a| tensor(&id, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kraus })
    }
}

impl Channel for KrausChannel {
    fn dim(&self) -> usize {
        self.kraus[0].rows()
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply_channel(self, rho)
    }
}

/// Applies `c` and revalidates the output as a density matrix.
pub fn apply_channel(c: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if c.dim() != rho.dim() {
        return Err(QresError::DimensionMismatch(format!(
            "channel on dimension {} applied to a {}-dimensional state",
            c.dim(),
            rho.dim()
        )));
    }
    DensityMatrix::new(c.apply_matrix(rho.matrix()))
}

/// Applies `c` to subsystem b.
pub fn apply_on_b(c: &KrausChannel, rho: &BipartiteState) -> Result<BipartiteState> {
    let (da, db) = rho.dims();
    if c.dim() != db {
        return Err(QresError::DimensionMismatch(format!(
            "channel on dimension {} applied to subsystem b of dimension {db}",
            c.dim()
        )));
    }
    BipartiteState::new(apply_channel(&c.on_b(da)?, rho.density())?, (da, db))
}

/// `Σ_i p_i U_i ρ U_i†` as the Kraus set `{√p_i U_i}`.
pub fn mixture_of_unitaries(p: &[f64], us: &[ComplexMatrix]) -> Result<KrausChannel> {
    if p.is_empty() || p.len() != us.len() {
        return Err(QresError::DimensionMismatch(format!(
            "{} probabilities for {} unitaries",
            p.len(),
            us.len()
        )));
    }
    if p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(QresError::InvalidParameter(
            "mixture weights must be nonnegative and sum to 1".into(),
        ));
    }
    for u in us {
        let deviation = u.unitary_deviation();
        if deviation > UNITARY_TOL {
            return Err(QresError::NotUnitary { deviation });
        }
    }
    KrausChannel::new(
        p.iter()
            .zip(us)
            .map(|(&pi, u)| u.scale(pi.sqrt()))
            .collect(),
    )
}

/// `ρ ↦ tr_E[U (ρ ⊗ I/e) U†]` for a unitary `U` on system ⊗ environment
/// (system index major).
#[derive(Debug, Clone)]
pub struct NoisyOperation {
    dim: usize,
    env_dim: usize,
    u: ComplexMatrix,
}

pub fn noisy_operation(dim: usize, env_dim: usize, u: ComplexMatrix) -> Result<NoisyOperation> {
    if dim == 0 || env_dim == 0 || !u.is_square() || u.rows() != dim * env_dim {
        return Err(QresError::DimensionMismatch(format!(
            "unitary is {}x{}, expected {}x{}",
            u.rows(),
            u.cols(),
            dim * env_dim,
            dim * env_dim
        )));
    }
    let deviation = u.unitary_deviation();
    if deviation > UNITARY_TOL {
        return Err(QresError::NotUnitary { deviation });
    }
    Ok(NoisyOperation { dim, env_dim, u })
}

impl NoisyOperation {
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let env = ComplexMatrix::identity(self.env_dim).scale(1.0 / self.env_dim as f64);
        let joint = tensor(m, &env).expect("dims validated");
        let evolved = &(&self.u * &joint) * &self.u.adjoint();
        partial_trace(&evolved, (self.dim, self.env_dim), Subsystem::A).expect("dims validated")
    }

    /// Equivalent Kraus set `A_{jk} = ⟨k|_E U |j⟩_E / √e`.
    pub fn to_kraus(&self) -> KrausChannel {
        let (d, e) = (self.dim, self.env_dim);
        let scale = 1.0 / (e as f64).sqrt();
        let mut kraus = Vec::with_capacity(e * e);
        for j in 0..e {
            for k in 0..e {
                kraus.push(ComplexMatrix::from_fn(d, d, |s, t| {
                    self.u[(s * e + k, t * e + j)] * scale
                }));
            }
        }
        KrausChannel { kraus }
    }
}

impl Channel for NoisyOperation {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(QresError::DimensionMismatch(format!(
                "noisy operation on dimension {} applied to a {}-dimensional state",
                self.dim,
                rho.dim()
            )));
        }
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }
}

/// Stinespring isometry `V = Σ_k |k⟩ ⊗ A_k` of shape `(K·d) × d`, with the
/// environment index major: rows `k·d .. (k+1)·d` hold `A_k`.
pub fn stinespring_isometry(c: &KrausChannel) -> Result<ComplexMatrix> {
    let deviation = c.completeness_deviation();
    if deviation > COMPLETENESS_TOL {
        return Err(QresError::IncompleteKraus { deviation });
    }
    let d = c.dim();
    let n = c.kraus.len();
    Ok(ComplexMatrix::from_fn(n * d, d, |r, col| {
        c.kraus[r / d][(r % d, col)]
    }))
}

/// `tr_K[V ρ V†]` for an environment-major isometry with `env_dim` blocks.
pub fn dilate_and_trace(
    v: &ComplexMatrix,
    rho: &ComplexMatrix,
    env_dim: usize,
) -> Result<ComplexMatrix> {
    let d = rho.rows();
    let joint = &(v * rho) * &v.adjoint();
    partial_trace(&joint, (env_dim, d), Subsystem::B)
}

/// Environment block `(k, k)` of `V ρ V†`, equal to `A_k ρ A_k†`.
pub fn environment_block(v: &ComplexMatrix, rho: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let d = rho.rows();
    let joint = &(v * rho) * &v.adjoint();
    ComplexMatrix::from_fn(d, d, |i, j| joint[(k * d + i, k * d + j)])
}

/// Random incoherent channel: `A_k = P_k D_k` with `P_k` a random permutation
/// and `D_k` diagonal. Each column of each `A_k` has at most one nonzero
/// entry, and the diagonals satisfy `Σ_k |D_k[j]|² = 1` for every `j`.
pub fn sample_incoherent_channel(d: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    if d == 0 || n_kraus == 0 {
        return Err(QresError::InvalidParameter(
            "dimension and Kraus count must be positive".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    Ok(incoherent_channel_with(&mut rng, d, n_kraus))
}

pub fn incoherent_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n_kraus: usize,
) -> KrausChannel {
    // Column weights; a coin flip turns some entries off so that projective
    // (subset) Kraus operators are also sampled.
    let mut coeff: Vec<Vec<C64>> = vec![vec![ZERO; d]; n_kraus];
    for j in 0..d {
        let mut norm = 0.0;
        for row in coeff.iter_mut() {
            let z = if rng.random_bool(0.75) {
                complex_normal(rng)
            } else {
                ZERO
            };
            norm += z.norm_sqr();
            row[j] = z;
        }
        if norm == 0.0 {
            let k = rng.random_range(0..n_kraus);
            coeff[k][j] = C64::new(1.0, 0.0);
            norm = 1.0;
        }
        let scale = norm.sqrt();
        for row in coeff.iter_mut() {
            row[j] /= scale;
        }
    }
    let kraus = coeff
        .into_iter()
        .map(|diag| {
            let mut perm: Vec<usize> = (0..d).collect();
            perm.shuffle(rng);
            let mut a = ComplexMatrix::zeros(d, d);
            for (j, &target) in perm.iter().enumerate() {
                a[(target, j)] = diag[j];
            }
            a
        })
        .collect();
    KrausChannel { kraus }
}

/// Random CPTP map with `n_kraus` Kraus operators, cut from a Haar isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, n_kraus: usize) -> KrausChannel {
    let v = random_isometry(rng, n_kraus * d, d);
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(d, d, |i, j| v[(k * d + i, j)]))
        .collect();
    KrausChannel { kraus }
}

/// Random mixture of `n` Haar unitaries with flat-Dirichlet weights.
pub fn random_mixture_of_unitaries<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    n: usize,
) -> KrausChannel {
    let p = random_probabilities(rng, n);
    let us: Vec<ComplexMatrix> = (0..n).map(|_| random_unitary(rng, d)).collect();
    mixture_of_unitaries(&p, &us).expect("sampled unitaries are unitary")
}

/// Random noisy operation with a Haar unitary on system ⊗ environment.
pub fn random_noisy_operation<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    env_dim: usize,
) -> NoisyOperation {
    let u = random_unitary(rng, d * env_dim);
    noisy_operation(d, env_dim, u).expect("sampled unitary is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, swap_operator};
    use crate::random::rng_from_seed;
    use crate::states::random_density;

    #[test]
    fn identity_mixture() {
        let c = mixture_of_unitaries(&[1.0], &[ComplexMatrix::identity(3)]).unwrap();
        let rho = random_density(3, 2, 1).unwrap();
        assert!(
            apply_channel(&c, &rho)
                .unwrap()
                .matrix()
                .max_abs_diff(rho.matrix())
                < 1e-15
        );
    }

    #[test]
    fn bit_flip_mixture_reduces_purity() {
        let [x, _, _] = pauli();
        let c = mixture_of_unitaries(&[0.5, 0.5], &[ComplexMatrix::identity(2), x]).unwrap();
        for seed in 0..20 {
            let rho = random_density(2, 1, seed).unwrap();
            let out = apply_channel(&c, &rho).unwrap();
            assert!(out.purity() <= rho.purity() + 1e-12);
        }
    }

    #[test]
    fn mixtures_are_unital() {
        let mut rng = rng_from_seed(8);
        let c = random_mixture_of_unitaries(&mut rng, 3, 5);
        assert!(c.unitality_deviation() < 1e-12);
    }

    #[test]
    fn mixture_rejects_bad_input() {
        let id = ComplexMatrix::identity(2);
        assert!(mixture_of_unitaries(&[0.5, 0.4], &[id.clone(), id.clone()]).is_err());
        assert!(mixture_of_unitaries(&[1.0], &[id.scale(2.0)]).is_err());
        assert!(mixture_of_unitaries(&[1.0], &[]).is_err());
    }

    #[test]
    fn noisy_identity_and_swap() {
        let rho = random_density(2, 2, 3).unwrap();
        let id = noisy_operation(2, 2, ComplexMatrix::identity(4)).unwrap();
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let swap = noisy_operation(2, 2, swap_operator(2)).unwrap();
        let out = swap.apply(&rho).unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-15
        );
        assert!(noisy_operation(2, 3, ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn noisy_kraus_matches_direct() {
        let mut rng = rng_from_seed(21);
        let op = random_noisy_operation(&mut rng, 3, 2);
        let kraus = op.to_kraus();
        assert!(kraus.completeness_deviation() < 1e-12);
        assert!(kraus.unitality_deviation() < 1e-12);
        let rho = random_density(3, 3, 4).unwrap();
        let direct = op.apply(&rho).unwrap();
        assert!(
            apply_channel(&kraus, &rho)
                .unwrap()
                .matrix()
                .max_abs_diff(direct.matrix())
                < 1e-12
        );
        assert!((direct.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(direct.purity() <= rho.purity() + 1e-10);
    }

    #[test]
    fn dephasing_keeps_diagonal() {
        let rho = random_density(3, 2, 6).unwrap();
        let out = apply_channel(&KrausChannel::dephasing(3), &rho).unwrap();
        let diag: Vec<f64> = rho.matrix().diagonal().iter().map(|z| z.re).collect();
        assert!(
            out.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diag(&diag))
                < 1e-15
        );
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(QresError::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn stinespring_identity() {
        let v = stinespring_isometry(&KrausChannel::identity(2)).unwrap();
        assert_eq!(v, ComplexMatrix::identity(2));
        assert!((&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn stinespring_reconstructs_dephasing() {
        let c = KrausChannel::dephasing(3);
        let v = stinespring_isometry(&c).unwrap();
        assert!((&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        let rho = random_density(3, 3, 2).unwrap();
        let direct = c.apply_matrix(rho.matrix());
        assert!(
            dilate_and_trace(&v, rho.matrix(), 3)
                .unwrap()
                .max_abs_diff(&direct)
                < 1e-12
        );
    }

    #[test]
    fn stinespring_blocks_are_kraus_terms() {
        let c = sample_incoherent_channel(3, 4, 12).unwrap();
        let v = stinespring_isometry(&c).unwrap();
        let rho = random_density(3, 2, 13).unwrap();
        for (k, a) in c.kraus().iter().enumerate() {
            let expected = &(a * rho.matrix()) * &a.adjoint();
            assert!(environment_block(&v, rho.matrix(), k).max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn incoherent_channel_properties() {
        for seed in 0..30 {
            let c = sample_incoherent_channel(4, 1 + seed as usize % 4, seed).unwrap();
            assert!(c.completeness_deviation() < 1e-10);
            for a in c.kraus() {
                for j in 0..4 {
                    let nonzero = (0..4).filter(|&i| a[(i, j)] != ZERO).count();
                    assert!(nonzero <= 1);
                }
            }
            let diag =
                DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4])).unwrap();
            let out = c.apply_matrix(diag.matrix());
            let off: f64 = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| out[(i, j)].norm())
                .sum();
            assert!(off < 1e-12);
        }
        let a = sample_incoherent_channel(3, 3, 5).unwrap();
        let b = sample_incoherent_channel(3, 3, 5).unwrap();
        for (x, y) in a.kraus().iter().zip(b.kraus()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn random_channels_are_complete() {
        let mut rng = rng_from_seed(4);
        let c = random_channel(&mut rng, 3, 3);
        assert!(c.completeness_deviation() < 1e-12);
        let rho = random_density(3, 3, 9).unwrap();
        let out = apply_channel(&c, &rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}
