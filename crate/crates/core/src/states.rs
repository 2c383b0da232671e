//! Density matrices, named state families, the SU(d) generator basis and the
//! Bloch / correlation-matrix decompositions.

use rand::Rng;

use crate::error::{QresError, Result};
use crate::linalg::{
    self, check_dim, eig_hermitian, partial_trace, pauli, swap_operator, tensor, ComplexMatrix,
    Subsystem, C64, HERMITIAN_TOL, I, ONE, PSD_TOL, ZERO,
};
use crate::random;

pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite `d × d` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, in that order, and
    /// reports the first violated invariant.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(QresError::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        check_dim(mat.rows())?;
        let deviation = mat.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(QresError::NotHermitian {
                deviation,
                tolerance: HERMITIAN_TOL,
            });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QresError::TraceNotOne {
                trace,
                tolerance: TRACE_TOL,
            });
        }
        let min_eigenvalue = eig_hermitian(&mat)?.values[0];
        if min_eigenvalue < -PSD_TOL {
            return Err(QresError::NotPositive {
                min_eigenvalue,
                tolerance: PSD_TOL,
            });
        }
        Ok(Self { mat })
    }

    /// Skips validation. Only for operators that are states by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(d).scale(1.0 / d as f64))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(QresError::InvalidParameter(
                "state vector must be nonzero".into(),
            ));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v))
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut diag = vec![0.0; d];
        diag[k] = 1.0;
        Self::from_trusted(ComplexMatrix::from_real_diag(&diag))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        ComplexMatrix::trace_product_re(&self.mat, &self.mat)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_trusted(tensor(&self.mat, &other.mat)?))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(QresError::DimensionMismatch(format!(
                "unitary is {}x{}, state is {}-dimensional",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::new(linalg::conjugate(u, &self.mat))
    }
}

/// A density matrix together with its `(d_a, d_b)` factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.0 * dims.1 != state.dim() {
            return Err(QresError::DimensionMismatch(format!(
                "factor dims ({}, {}) do not multiply to state dimension {}",
                dims.0,
                dims.1,
                state.dim()
            )));
        }
        Ok(Self { dims, state })
    }

    pub fn from_matrix(mat: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        Self::new(DensityMatrix::new(mat)?, dims)
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        Self::new(a.tensor(b)?, (a.dim(), b.dim()))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn reduced(&self, keep: Subsystem) -> DensityMatrix {
        let m = partial_trace(self.state.matrix(), self.dims, keep)
            .expect("dims validated at construction");
        DensityMatrix::from_trusted(m)
    }

    /// `(U_a ⊗ U_b) ρ (U_a ⊗ U_b)†`.
    pub fn local_unitary(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = tensor(ua, ub)?;
        Self::new(self.state.conjugate(&u)?, self.dims)
    }
}

/// Bell-diagonal state `(I⊗I + Σ c_i σ_i⊗σ_i)/4`.
pub fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> Result<BipartiteState> {
    for c in [c1, c2, c3] {
        if !(-1.0..=1.0).contains(&c) {
            return Err(QresError::InvalidParameter(format!(
                "Bell-diagonal coefficient {c} outside [-1, 1]"
            )));
        }
    }
    let mut m = ComplexMatrix::identity(4);
    for (s, c) in pauli().iter().zip([c1, c2, c3]) {
        m = &m + &tensor(s, s)?.scale(c);
    }
    BipartiteState::from_matrix(m.scale(0.25), (2, 2))
}

/// Werner state on `C^d ⊗ C^d`: `(d−y)/(d³−d)·I + (yd−1)/(d³−d)·F` with `F` the swap.
pub fn werner(d: usize, y: f64) -> Result<BipartiteState> {
    if !(2..=8).contains(&d) {
        return Err(QresError::InvalidParameter(format!(
            "Werner dimension {d} outside 2..=8"
        )));
    }
    if !(-1.0..=1.0).contains(&y) {
        return Err(QresError::InvalidParameter(format!(
            "Werner parameter y = {y} outside [-1, 1]"
        )));
    }
    let df = d as f64;
    let norm = df * df * df - df;
    let identity = ComplexMatrix::identity(d * d).scale((df - y) / norm);
    let flip = swap_operator(d).scale((y * df - 1.0) / norm);
    BipartiteState::from_matrix(&identity + &flip, (d, d))
}

/// `Σ_k p_k |k⟩⟨k| ⊗ ρ_k` with `|k⟩` the computational basis of a.
pub fn classical_quantum(p: &[f64], blocks: &[DensityMatrix]) -> Result<BipartiteState> {
    if p.is_empty() || p.len() != blocks.len() {
        return Err(QresError::DimensionMismatch(format!(
            "{} probabilities for {} blocks",
            p.len(),
            blocks.len()
        )));
    }
    if p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > TRACE_TOL {
        return Err(QresError::InvalidParameter(
            "probabilities must be nonnegative and sum to 1".into(),
        ));
    }
    let db = blocks[0].dim();
    if blocks.iter().any(|b| b.dim() != db) {
        return Err(QresError::DimensionMismatch(
            "blocks differ in dimension".into(),
        ));
    }
    let da = p.len();
    let mut m = ComplexMatrix::zeros(da * db, da * db);
    for (k, (pk, block)) in p.iter().zip(blocks).enumerate() {
        for i in 0..db {
            for j in 0..db {
                m[(k * db + i, k * db + j)] = block.matrix()[(i, j)] * *pk;
            }
        }
    }
    BipartiteState::from_matrix(m, (da, db))
}

/// `GG†/tr(GG†)` for a `d × rank` complex Gaussian `G`, seeded.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(QresError::InvalidParameter(format!(
            "rank {rank} must lie in 1..={d}"
        )));
    }
    check_dim(d)?;
    let mut rng = random::rng_from_seed(seed);
    Ok(random_density_with(&mut rng, d, rank))
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = random::ginibre(rng, d, rank);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::from_trusted(w.scale(1.0 / tr))
}

/// Random state of random rank in `1..=d`.
pub fn random_density_any_rank<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    random_density_with(rng, d, rank)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    DensityMatrix::from_trusted(ComplexMatrix::outer(&random::random_pure_vector(rng, d)))
}

/// Generalized Gell-Mann matrices normalized to `tr(X_i X_j) = 2δ_ij`.
///
/// Ordering: the `k = (d²−d)/2` symmetric off-diagonal generators for pairs
/// `(i, j)`, `i < j`, in lexicographic order; then the antisymmetric ones for
/// the same pairs; then the `d−1` diagonal generators. Generator `i` and
/// generator `i + k` therefore share the same matrix position.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of off-diagonal pairs, `(d²−d)/2`.
    pub fn k(&self) -> usize {
        (self.dim * self.dim - self.dim) / 2
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Orthonormal Hermitian basis with `tr(X_i X_j) = δ_ij`: `I/√d` first,
    /// then each generator scaled by `1/√2`.
    pub fn orthonormal(&self) -> Vec<ComplexMatrix> {
        let d = self.dim as f64;
        std::iter::once(ComplexMatrix::identity(self.dim).scale(1.0 / d.sqrt()))
            .chain(
                self.generators
                    .iter()
                    .map(|g| g.scale(std::f64::consts::FRAC_1_SQRT_2)),
            )
            .collect()
    }
}

pub fn generator_basis(d: usize) -> Result<GeneratorBasis> {
    if !(2..=8).contains(&d) {
        return Err(QresError::InvalidParameter(format!(
            "generator basis dimension {d} outside 2..=8"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect();
    let mut generators = Vec::with_capacity(d * d - 1);
    for &(i, j) in &pairs {
        let mut s = ComplexMatrix::zeros(d, d);
        s[(i, j)] = ONE;
        s[(j, i)] = ONE;
        generators.push(s);
    }
    for &(i, j) in &pairs {
        let mut a = ComplexMatrix::zeros(d, d);
        a[(i, j)] = -I;
        a[(j, i)] = I;
        generators.push(a);
    }
    for l in 1..d {
        let lf = l as f64;
        let norm = (2.0 / (lf * (lf + 1.0))).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|m| match m.cmp(&l) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -lf * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        generators.push(ComplexMatrix::from_real_diag(&diag));
    }
    Ok(GeneratorBasis { dim: d, generators })
}

/// Generalized Bloch vector, `x_i = tr(ρ X_i)`.
pub fn bloch_expand(rho: &DensityMatrix, basis: &GeneratorBasis) -> Result<Vec<f64>> {
    if rho.dim() != basis.dim() {
        return Err(QresError::DimensionMismatch(format!(
            "state dimension {} vs generator basis dimension {}",
            rho.dim(),
            basis.dim()
        )));
    }
    Ok(basis
        .generators()
        .iter()
        .map(|x| ComplexMatrix::trace_product_re(rho.matrix(), x))
        .collect())
}

/// Inverse of [`bloch_expand`]: `I/d + Σ x_i X_i / 2`.
pub fn bloch_reconstruct(x: &[f64], basis: &GeneratorBasis) -> ComplexMatrix {
    let d = basis.dim();
    x.iter().zip(basis.generators()).fold(
        ComplexMatrix::identity(d).scale(1.0 / d as f64),
        |acc, (&xi, g)| &acc + &g.scale(xi / 2.0),
    )
}

/// `Γ_ij = tr(ρ X_i ⊗ Y_j)` in the orthonormal bases of both factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    rows: usize,
    cols: usize,
    gamma: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.gamma[i * self.cols + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Squared Frobenius norm `‖Γ‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.gamma.iter().map(|g| g * g).sum()
    }
}

pub fn correlation_matrix(rho: &BipartiteState) -> Result<CorrelationMatrix> {
    let (da, db) = rho.dims();
    let xa = generator_basis(da)?.orthonormal();
    let yb = generator_basis(db)?.orthonormal();
    let mut gamma = Vec::with_capacity(xa.len() * yb.len());
    for x in &xa {
        for y in &yb {
            let op = tensor(x, y)?;
            gamma.push(ComplexMatrix::trace_product_re(rho.matrix(), &op));
        }
    }
    Ok(CorrelationMatrix {
        rows: xa.len(),
        cols: yb.len(),
        gamma,
    })
}

/// Builds the 2-qubit Bell state `|Φ+⟩⟨Φ+|`.
pub fn bell_phi_plus() -> BipartiteState {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi = [s, ZERO, ZERO, s];
    BipartiteState::new(DensityMatrix::pure(&psi).expect("normalized"), (2, 2)).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn density_validation_names_violation() {
        let not_herm = ComplexMatrix::from_fn(2, 2, |i, j| {
            if (i, j) == (0, 1) {
                ONE
            } else {
                C64::new(0.5 * (i == j) as u8 as f64, 0.0)
            }
        });
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(QresError::NotHermitian { .. })
        ));
        let bad_trace = ComplexMatrix::from_real_diag(&[0.5, 0.6]);
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(QresError::TraceNotOne { .. })
        ));
        let negative = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(QresError::NotPositive { .. })
        ));
    }

    #[test]
    fn bell_diagonal_origin_is_maximally_mixed() {
        let s = bell_diagonal(0.0, 0.0, 0.0).unwrap();
        assert!(
            s.matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale(0.25))
                < 1e-16
        );
    }

    #[test]
    fn bell_diagonal_singlet_and_purity() {
        let s = bell_diagonal(-1.0, -1.0, -1.0).unwrap();
        assert!(approx(s.density().purity(), 1.0, 1e-15));
        let h = 0.5f64.sqrt();
        let singlet =
            DensityMatrix::pure(&[ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO]).unwrap();
        assert!(s.matrix().max_abs_diff(singlet.matrix()) < 1e-15);
        let s = bell_diagonal(0.5, -0.5, 0.5).unwrap();
        assert!(approx(s.density().purity(), 0.4375, 1e-15));
    }

    #[test]
    fn bell_diagonal_rejects_non_psd() {
        assert!(matches!(
            bell_diagonal(1.0, 1.0, 1.0),
            Err(QresError::NotPositive { .. })
        ));
        assert!(bell_diagonal(1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn werner_qubit_endpoints() {
        let w = werner(2, 1.0).unwrap();
        assert!(approx(w.density().purity(), 1.0 / 3.0, 1e-15));
        let w = werner(2, -1.0).unwrap();
        assert!(approx(w.density().purity(), 1.0, 1e-15));
        let w = werner(3, 1.0 / 3.0).unwrap();
        assert!(approx(w.matrix().trace().re, 1.0, 1e-12));
        assert!(
            w.matrix()
                .max_abs_diff(&ComplexMatrix::identity(9).scale(1.0 / 9.0))
                < 1e-15
        );
        assert!(werner(2, 1.5).is_err());
        assert!(werner(9, 0.0).is_err());
    }

    #[test]
    fn classical_quantum_layout() {
        let b0 = DensityMatrix::basis(2, 0);
        let b1 = DensityMatrix::basis(2, 1);
        let cq = classical_quantum(&[0.5, 0.5], &[b0.clone(), b1]).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(cq.matrix(), &expected);
        let single = classical_quantum(&[1.0], std::slice::from_ref(&b0)).unwrap();
        assert_eq!(single.dims(), (1, 2));
        assert!(classical_quantum(&[0.5, 0.5], &[b0]).is_err());
    }

    #[test]
    fn random_density_properties() {
        let pure = random_density(4, 1, 11).unwrap();
        assert!(approx(pure.purity(), 1.0, 1e-12));
        assert_eq!(
            random_density(2, 2, 5).unwrap(),
            random_density(2, 2, 5).unwrap()
        );
        assert!(random_density(3, 4, 0).is_err());
        let mut rng = random::rng_from_seed(99);
        for _ in 0..1000 {
            let rho = random_density_any_rank(&mut rng, 3);
            assert!(eig_hermitian(rho.matrix()).unwrap().values[0] >= -1e-12);
        }
    }

    #[test]
    fn generator_basis_qubit_is_pauli() {
        let b = generator_basis(2).unwrap();
        assert_eq!(b.k(), 1);
        let p = pauli();
        for (g, s) in b.generators().iter().zip(p.iter()) {
            assert_eq!(g, s);
        }
    }

    #[test]
    fn generator_basis_orthogonality() {
        for d in 2..=5 {
            let b = generator_basis(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            for (i, x) in b.generators().iter().enumerate() {
                assert!(x.trace().norm() < 1e-12);
                assert!(x.hermitian_deviation() < 1e-15);
                for (j, y) in b.generators().iter().enumerate() {
                    let t = (x * y).trace();
                    let expected = if i == j { 2.0 } else { 0.0 };
                    assert!(
                        (t - C64::new(expected, 0.0)).norm() < 1e-10,
                        "d={d} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn generator_basis_ordering_d4() {
        let b = generator_basis(4).unwrap();
        assert_eq!(b.k(), 6);
        for i in 0..6 {
            let s = &b.generators()[i];
            let a = &b.generators()[i + 6];
            // symmetric block is real, antisymmetric block purely imaginary, same support
            assert!(s.as_slice().iter().all(|z| z.im == 0.0));
            assert!(a.as_slice().iter().all(|z| z.re == 0.0));
            for (zs, za) in s.as_slice().iter().zip(a.as_slice()) {
                assert_eq!(zs.norm() > 0.0, za.norm() > 0.0);
            }
        }
        for g in &b.generators()[12..] {
            assert!(g
                .as_slice()
                .iter()
                .enumerate()
                .all(|(p, z)| p % 5 == 0 || z.norm() == 0.0));
        }
    }

    #[test]
    fn bloch_expansion() {
        let b = generator_basis(3).unwrap();
        let x = bloch_expand(&DensityMatrix::maximally_mixed(3), &b).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-16));
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let plus = DensityMatrix::pure(&[h, h]).unwrap();
        let x = bloch_expand(&plus, &generator_basis(2).unwrap()).unwrap();
        assert!(approx(x[0], 1.0, 1e-15) && approx(x[1], 0.0, 1e-15) && approx(x[2], 0.0, 1e-15));
        let rho = random_density(3, 3, 4).unwrap();
        let x = bloch_expand(&rho, &b).unwrap();
        assert!(bloch_reconstruct(&x, &b).max_abs_diff(rho.matrix()) < 1e-9);
        assert!(bloch_expand(&rho, &generator_basis(2).unwrap()).is_err());
    }

    #[test]
    fn correlation_matrix_maximally_mixed() {
        let s = BipartiteState::new(DensityMatrix::maximally_mixed(4), (2, 2)).unwrap();
        let g = correlation_matrix(&s).unwrap();
        assert_eq!(g.shape(), (4, 4));
        assert!(approx(g.get(0, 0), 0.5, 1e-15));
        let others: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&p| p != (0, 0))
            .map(|(i, j)| g.get(i, j).abs())
            .sum();
        assert!(others < 1e-15);
    }

    #[test]
    fn correlation_matrix_norm_is_purity() {
        let g = correlation_matrix(&bell_phi_plus()).unwrap();
        assert!(approx(g.norm_sqr(), 1.0, 1e-12));
        let rho = random_density(6, 3, 8).unwrap();
        let s = BipartiteState::new(rho.clone(), (2, 3)).unwrap();
        assert!(approx(
            correlation_matrix(&s).unwrap().norm_sqr(),
            rho.purity(),
            1e-10
        ));
    }
}
