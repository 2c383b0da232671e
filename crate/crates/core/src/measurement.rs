//! Measurements on subsystem a: von Neumann dephasing, coherence relative to
//! a measurement, the measurement-induced correlation `Q_F`, the fidelity
//! nonlocality `N_F` (F-MIN), and two-outcome weak measurements.
//!
//! Optimization over measurement bases:
//! * `d_a = 2`: the basis `{U|0⟩, U|1⟩}` is parametrized by Bloch angles
//!   `(θ, φ)`. A 64×128 grid is scanned, then refined with Nelder–Mead. The
//!   objective uses the quadratic form `n ↦ nᵀMn` with
//!   `M_ij = Re tr(ρ S_i ρ S_j)`, `S_i = σ_i ⊗ I`, precomputed once per state.
//! * `d_a ∈ {3, 4}`: the basis is a product of complex Givens rotations,
//!   minimized from several random starts.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{QresError, Result};
use crate::fidelity::ratio_fidelity;
use crate::linalg::{eig_hermitian, pauli, tensor, ComplexMatrix, Subsystem, C64};
use crate::optimize::NelderMead;
use crate::random::rng_from_seed;
use crate::states::{BipartiteState, DensityMatrix};

const PROJECTOR_TOL: f64 = 1e-10;
/// Values in `(−NEGATIVE_NOISE, 0)` are optimizer noise and reported as 0.
pub const NEGATIVE_NOISE: f64 = 1e-8;
/// Strength at which a weak measurement is numerically projective
/// (`sech 40 < 1e-17`).
pub const PROJECTIVE_STRENGTH: f64 = 40.0;

/// Complete set of orthogonal projectors on subsystem a.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    /// Validates `Π_k Π_l = δ_kl Π_k` and `Σ_k Π_k = I`.
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let d = match projectors.first() {
            Some(p) if p.is_square() => p.rows(),
            _ => {
                return Err(QresError::InvalidParameter(
                    "measurement needs at least one square projector".into(),
                ))
            }
        };
        if projectors.iter().any(|p| p.rows() != d || p.cols() != d) {
            return Err(QresError::DimensionMismatch(
                "projectors differ in shape".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, pk) in projectors.iter().enumerate() {
            for (l, pl) in projectors.iter().enumerate() {
                let prod = pk * pl;
                let expected = if k == l {
                    pk.clone()
                } else {
                    ComplexMatrix::zeros(d, d)
                };
                if prod.max_abs_diff(&expected) > PROJECTOR_TOL {
                    return Err(QresError::InvalidParameter(format!(
                        "projectors {k} and {l} violate P_k P_l = delta_kl P_k"
                    )));
                }
            }
            sum = &sum + pk;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(d)) > PROJECTOR_TOL {
            return Err(QresError::InvalidParameter(
                "projectors do not sum to the identity".into(),
            ));
        }
        Ok(Self { projectors })
    }

    /// Rank-1 projectors onto the columns of a unitary.
    pub fn from_basis(u: &ComplexMatrix) -> Result<Self> {
        let deviation = u.unitary_deviation();
        if deviation > PROJECTOR_TOL {
            return Err(QresError::NotUnitary { deviation });
        }
        Ok(Self::from_basis_unchecked(u))
    }

    fn from_basis_unchecked(u: &ComplexMatrix) -> Self {
        Self {
            projectors: (0..u.cols())
                .map(|k| ComplexMatrix::outer(&u.column(k)))
                .collect(),
        }
    }

    pub fn computational(d: usize) -> Self {
        Self::from_basis_unchecked(&ComplexMatrix::identity(d))
    }

    /// Qubit basis `{U|0⟩, U|1⟩}` with `U|0⟩` at Bloch angles `(θ, φ)`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        Self::from_basis_unchecked(&qubit_basis(theta, phi))
    }

    pub fn subsystem_dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// `Σ_k Π_k m Π_k` on a single system.
    pub fn dephase(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = m.rows();
        self.projectors
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, p| &acc + &(&(p * m) * p))
    }

    /// `Σ_k (Π_k ⊗ I) m (Π_k ⊗ I)` on a bipartite operator.
    pub fn dephase_a(&self, m: &ComplexMatrix, db: usize) -> ComplexMatrix {
        let n = m.rows();
        let id = ComplexMatrix::identity(db);
        self.projectors
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, p| {
                let big = tensor(p, &id).expect("dims bounded by state");
                &acc + &(&(&big * m) * &big)
            })
    }
}

fn qubit_basis(theta: f64, phi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = C64::new(c, 0.0);
    u[(1, 0)] = e * s;
    u[(0, 1)] = -e.conj() * s;
    u[(1, 1)] = C64::new(c, 0.0);
    u
}

fn check_measurement(rho: &BipartiteState, m: &ProjectiveMeasurement) -> Result<()> {
    if m.subsystem_dim() != rho.dims().0 {
        return Err(QresError::DimensionMismatch(format!(
            "measurement on dimension {} applied to subsystem a of dimension {}",
            m.subsystem_dim(),
            rho.dims().0
        )));
    }
    Ok(())
}

/// `Π(ρ) = Σ_k (Π_k ⊗ I) ρ (Π_k ⊗ I)`.
pub fn apply_measurement(
    rho: &BipartiteState,
    m: &ProjectiveMeasurement,
) -> Result<BipartiteState> {
    check_measurement(rho, m)?;
    let out = m.dephase_a(rho.matrix(), rho.dims().1);
    BipartiteState::new(DensityMatrix::from_trusted(out), rho.dims())
}

/// `C_F(ρ|Π) = 1 − F(ρ, Π(ρ))`.
pub fn coherence_rel_measurement(rho: &BipartiteState, m: &ProjectiveMeasurement) -> Result<f64> {
    let measured = apply_measurement(rho, m)?;
    Ok(1.0 - ratio_fidelity(rho.matrix(), measured.matrix()).expect("states are nonzero"))
}

/// `C_F(ρ^a|Π^a)` for a single-system state.
pub fn coherence_rel_measurement_single(
    rho: &DensityMatrix,
    m: &ProjectiveMeasurement,
) -> Result<f64> {
    if m.subsystem_dim() != rho.dim() {
        return Err(QresError::DimensionMismatch(format!(
            "measurement on dimension {} applied to a {}-dimensional state",
            m.subsystem_dim(),
            rho.dim()
        )));
    }
    let measured = m.dephase(rho.matrix());
    Ok(1.0 - ratio_fidelity(rho.matrix(), &measured).expect("states are nonzero"))
}

/// `Δ_F(ρ|Π) = C_F(ρ|Π) − C_F(ρ^a ⊗ ρ^b|Π)`; the product term equals
/// `C_F(ρ^a|Π^a)` because the ratio fidelity is multiplicative.
pub fn delta_coherence(rho: &BipartiteState, m: &ProjectiveMeasurement) -> Result<f64> {
    let global = coherence_rel_measurement(rho, m)?;
    let local = coherence_rel_measurement_single(&rho.reduced(Subsystem::A), m)?;
    Ok(global - local)
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerSettings {
    /// Grid points in θ ∈ [0, π] for the qubit path.
    pub grid_theta: usize,
    /// Grid points in φ ∈ [0, 2π) for the qubit path.
    pub grid_phi: usize,
    pub local: NelderMead,
    /// Random starts for the Givens path.
    pub multistarts: usize,
    /// Nelder–Mead iterations per start on the Givens path.
    pub multistart_iterations: usize,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_theta: 64,
            grid_phi: 128,
            local: NelderMead {
                max_iterations: 200,
                tolerance: 1e-9,
                initial_step: PI / 64.0,
            },
            multistarts: 32,
            multistart_iterations: 2000,
            seed: 0x5eed,
        }
    }
}

/// How the optimal measurement was parametrized.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurementParams {
    /// Bloch angles of the first basis vector.
    Bloch { theta: f64, phi: f64 },
    /// `(θ, φ)` per Givens pair, in the order `(0,1), (0,2), …, (d−2,d−1)`,
    /// applied on top of `frame` (the identity unless constrained).
    Givens { angles: Vec<f64> },
    /// No free parameters (single candidate).
    Fixed,
}

#[derive(Debug, Clone)]
pub struct Optimum {
    pub value: f64,
    pub measurement: ProjectiveMeasurement,
    pub params: MeasurementParams,
    /// Unitary whose columns are the optimal basis.
    pub basis: ComplexMatrix,
}

/// Per-state data for evaluating `F(ρ, Π_U(ρ))` and `F(ρ^a, Π_U(ρ^a))`.
struct MeasurementObjective {
    rho: ComplexMatrix,
    rho_a: ComplexMatrix,
    dims: (usize, usize),
    purity: f64,
    purity_a: f64,
    qubit: Option<QubitForms>,
}

/// `M_ij = Re tr(ρ S_i ρ S_j)` for the global state and the marginal.
struct QubitForms {
    global: [[f64; 3]; 3],
    marginal: [[f64; 3]; 3],
}

impl MeasurementObjective {
    fn new(rho: &BipartiteState) -> Self {
        let (da, db) = rho.dims();
        let rho_a = rho.reduced(Subsystem::A);
        let purity = rho.density().purity();
        let purity_a = rho_a.purity();
        let qubit = (da == 2).then(|| {
            let s = pauli();
            let id = ComplexMatrix::identity(db);
            let big: Vec<ComplexMatrix> =
                s.iter().map(|p| tensor(p, &id).expect("small")).collect();
            let form = |m: &ComplexMatrix, ops: &[ComplexMatrix]| {
                let prods: Vec<ComplexMatrix> = ops.iter().map(|o| m * o).collect();
                let mut out = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        out[i][j] = ComplexMatrix::trace_product_re(&prods[i], &prods[j]);
                    }
                }
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        let avg = 0.5 * (out[i][j] + out[j][i]);
                        out[i][j] = avg;
                        out[j][i] = avg;
                    }
                }
                out
            };
            QubitForms {
                global: form(rho.matrix(), &big),
                marginal: form(rho_a.matrix(), &s),
            }
        });
        Self {
            rho: rho.matrix().clone(),
            rho_a: rho_a.into_matrix(),
            dims: (da, db),
            purity,
            purity_a,
            qubit,
        }
    }

    /// `(F(ρ, Π(ρ)), F(ρ^a, Π^a(ρ^a)))` for the qubit basis at `(θ, φ)`.
    fn qubit_fidelities(&self, theta: f64, phi: f64) -> (f64, f64) {
        let forms = self.qubit.as_ref().expect("qubit objective");
        let n = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        let quad = |m: &[[f64; 3]; 3]| -> f64 {
            (0..3)
                .map(|i| (0..3).map(|j| n[i] * m[i][j] * n[j]).sum::<f64>())
                .sum()
        };
        let global = (self.purity + quad(&forms.global)) / (2.0 * self.purity);
        let local = (self.purity_a + quad(&forms.marginal)) / (2.0 * self.purity_a);
        (global, local)
    }

    /// Same pair for an arbitrary basis `u` of subsystem a. Uses
    /// `tr(ρ Π(ρ)) = Σ_k ‖block_kk(ρ')‖²` with `ρ' = (U†⊗I) ρ (U⊗I)`.
    fn basis_fidelities(&self, u: &ComplexMatrix) -> (f64, f64) {
        let (da, db) = self.dims;
        let big = tensor(u, &ComplexMatrix::identity(db)).expect("small");
        let rotated = &(&big.adjoint() * &self.rho) * &big;
        let mut kept = 0.0;
        for k in 0..da {
            for i in 0..db {
                for j in 0..db {
                    kept += rotated[(k * db + i, k * db + j)].norm_sqr();
                }
            }
        }
        let rotated_a = &(&u.adjoint() * &self.rho_a) * u;
        let kept_a: f64 = (0..da).map(|k| rotated_a[(k, k)].norm_sqr()).sum();
        (kept / self.purity, kept_a / self.purity_a)
    }
}

/// What to minimize over measurement bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    /// `Δ_F = F(ρ^a, Π^a ρ^a) − F(ρ, Πρ)`
    Delta,
    /// `F(ρ, Πρ)`
    Fidelity,
}

impl Target {
    fn combine(self, (global, local): (f64, f64)) -> f64 {
        match self {
            Target::Delta => local - global,
            Target::Fidelity => global,
        }
    }
}

fn check_supported(rho: &BipartiteState) -> Result<()> {
    let da = rho.dims().0;
    if da > 4 {
        return Err(QresError::Unsupported(format!(
            "measurement optimization supports d_a <= 4, got {da}"
        )));
    }
    Ok(())
}

fn optimize_qubit(
    obj: &MeasurementObjective,
    target: Target,
    opts: &OptimizerSettings,
) -> (f64, f64, f64) {
    let nt = opts.grid_theta.max(2);
    let np = opts.grid_phi.max(1);
    let eval = |t: f64, p: f64| target.combine(obj.qubit_fidelities(t, p));
    let best = (0..nt)
        .into_par_iter()
        .map(|i| {
            let theta = PI * i as f64 / (nt - 1) as f64;
            (0..np)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / np as f64;
                    (eval(theta, phi), theta, phi)
                })
                .fold(
                    (f64::INFINITY, 0.0, 0.0),
                    |a, b| if b.0 < a.0 { b } else { a },
                )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            (f64::INFINITY, 0.0, 0.0),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    // In shallow valleys the simplex meets the value-spread criterion before
    // reaching the minimizer; restarts from the incumbent with smaller
    // simplices recover the remaining digits.
    let mut current = best;
    let mut local = opts.local;
    for _ in 0..QUBIT_RESTARTS {
        let refined = local.minimize(|x| eval(x[0], x[1]), &[current.1, current.2]);
        if refined.value < current.0 {
            current = (refined.value, refined.x[0], refined.x[1]);
        }
        local.initial_step *= 0.1;
    }
    current
}

const QUBIT_RESTARTS: usize = 4;

/// Product of complex Givens rotations on the listed index pairs.
pub fn givens_unitary(d: usize, pairs: &[(usize, usize)], angles: &[f64]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(d);
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let (theta, phi) = (angles[2 * idx], angles[2 * idx + 1]);
        let (c, s) = (theta.cos(), theta.sin());
        let e = C64::from_polar(1.0, phi);
        // u ← u · G, G acting on columns i and j
        for r in 0..d {
            let ui = u[(r, i)];
            let uj = u[(r, j)];
            u[(r, i)] = ui * c + uj * e * s;
            u[(r, j)] = -ui * e.conj() * s + uj * c;
        }
    }
    u
}

fn all_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect()
}

fn optimize_givens(
    obj: &MeasurementObjective,
    target: Target,
    opts: &OptimizerSettings,
    frame: &ComplexMatrix,
    pairs: &[(usize, usize)],
) -> (f64, Vec<f64>) {
    let d = frame.rows();
    let n_params = 2 * pairs.len();
    let eval = |x: &[f64]| {
        let u = frame * &givens_unitary(d, pairs, x);
        target.combine(obj.basis_fidelities(&u))
    };
    if n_params == 0 {
        return (eval(&[]), Vec::new());
    }
    let mut rng = rng_from_seed(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.multistarts.max(1))
        .map(|s| {
            if s == 0 {
                vec![0.0; n_params]
            } else {
                (0..n_params)
                    .map(|_| rand::Rng::random_range(&mut rng, 0.0..2.0 * PI))
                    .collect()
            }
        })
        .collect();
    let local = NelderMead {
        max_iterations: opts.multistart_iterations,
        tolerance: opts.local.tolerance * 1e-3,
        initial_step: 0.5,
    };
    starts
        .par_iter()
        .map(|x0| {
            let m = local.minimize(eval, x0);
            (m.value, m.x)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(
            (f64::INFINITY, Vec::new()),
            |a, b| if b.0 < a.0 { b } else { a },
        )
}

fn optimize(rho: &BipartiteState, target: Target, opts: &OptimizerSettings) -> Result<Optimum> {
    check_supported(rho)?;
    let obj = MeasurementObjective::new(rho);
    let da = rho.dims().0;
    if da == 2 {
        let (value, theta, phi) = optimize_qubit(&obj, target, opts);
        let basis = qubit_basis(theta, phi);
        return Ok(Optimum {
            value,
            measurement: ProjectiveMeasurement::from_basis_unchecked(&basis),
            params: MeasurementParams::Bloch { theta, phi },
            basis,
        });
    }
    let frame = ComplexMatrix::identity(da);
    let pairs = all_pairs(da);
    let (value, angles) = optimize_givens(&obj, target, opts, &frame, &pairs);
    let basis = givens_unitary(da, &pairs, &angles);
    Ok(Optimum {
        value,
        measurement: ProjectiveMeasurement::from_basis_unchecked(&basis),
        params: if pairs.is_empty() {
            MeasurementParams::Fixed
        } else {
            MeasurementParams::Givens { angles }
        },
        basis,
    })
}

/// `Q_F(ρ) = min_Π Δ_F(ρ|Π)` over von Neumann measurements on a, with the
/// minimizing measurement. Negative values above `−1e-8` are reported as 0.
pub fn quantum_correlation(rho: &BipartiteState, opts: &OptimizerSettings) -> Result<Optimum> {
    let mut opt = optimize(rho, Target::Delta, opts)?;
    if opt.value < 0.0 && opt.value > -NEGATIVE_NOISE {
        opt.value = 0.0;
    }
    Ok(opt)
}

/// Closed-form `Q_F` for `d_a = 2`: `Δ_F(n) = nᵀKn` with
/// `K = M^a/(2 tr ρ_a²) − M/(2 tr ρ²)`, so the minimum over unit Bloch
/// vectors is the smallest eigenvalue of `K`. Not clamped.
pub fn qubit_correlation_exact(rho: &BipartiteState) -> Result<f64> {
    if rho.dims().0 != 2 {
        return Err(QresError::Unsupported("closed form needs d_a = 2".into()));
    }
    let obj = MeasurementObjective::new(rho);
    let forms = obj.qubit.as_ref().expect("qubit objective");
    let k = ComplexMatrix::from_fn(3, 3, |i, j| {
        C64::new(
            forms.marginal[i][j] / (2.0 * obj.purity_a) - forms.global[i][j] / (2.0 * obj.purity),
            0.0,
        )
    });
    Ok(eig_hermitian(&k)?.values[0])
}

/// Which measurements the F-MIN minimization ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FminMode {
    /// All von Neumann measurements on a.
    #[default]
    Unconstrained,
    /// Only measurements that leave `ρ^a` invariant (bases diagonalizing `ρ^a`).
    MarginalPreserving,
}

/// `N_F(ρ) = 1 − min_Π F(ρ, Π(ρ))`.
pub fn fmin(rho: &BipartiteState, opts: &OptimizerSettings, mode: FminMode) -> Result<Optimum> {
    check_supported(rho)?;
    let mut opt = match mode {
        FminMode::Unconstrained => optimize(rho, Target::Fidelity, opts)?,
        FminMode::MarginalPreserving => optimize_marginal_preserving(rho, opts)?,
    };
    opt.value = 1.0 - opt.value;
    Ok(opt)
}

const DEGENERACY_TOL: f64 = 1e-9;

fn optimize_marginal_preserving(rho: &BipartiteState, opts: &OptimizerSettings) -> Result<Optimum> {
    let obj = MeasurementObjective::new(rho);
    let da = rho.dims().0;
    let eig = eig_hermitian(obj.rho_a_matrix())?;
    // Rotations are only allowed inside degenerate eigenspaces of ρ^a.
    let mut cluster = vec![0usize; da];
    for k in 1..da {
        cluster[k] = if eig.values[k] - eig.values[k - 1] < DEGENERACY_TOL {
            cluster[k - 1]
        } else {
            cluster[k - 1] + 1
        };
    }
    let pairs: Vec<(usize, usize)> = all_pairs(da)
        .into_iter()
        .filter(|&(i, j)| cluster[i] == cluster[j])
        .collect();
    let (value, angles) = optimize_givens(&obj, Target::Fidelity, opts, &eig.vectors, &pairs);
    let basis = &eig.vectors * &givens_unitary(da, &pairs, &angles);
    Ok(Optimum {
        value,
        measurement: ProjectiveMeasurement::from_basis_unchecked(&basis),
        params: if pairs.is_empty() {
            MeasurementParams::Fixed
        } else {
            MeasurementParams::Givens { angles }
        },
        basis,
    })
}

impl MeasurementObjective {
    fn rho_a_matrix(&self) -> &ComplexMatrix {
        &self.rho_a
    }
}

/// `Δ_F(ρ|Π)` evaluated through the same fast route the optimizer uses.
pub fn delta_for_basis(rho: &BipartiteState, u: &ComplexMatrix) -> f64 {
    Target::Delta.combine(MeasurementObjective::new(rho).basis_fidelities(u))
}

/// Qubit-path objective `Δ_F` at Bloch angles `(θ, φ)`; `d_a` must be 2.
pub fn delta_for_angles(rho: &BipartiteState, theta: f64, phi: f64) -> Result<f64> {
    if rho.dims().0 != 2 {
        return Err(QresError::Unsupported("Bloch angles need d_a = 2".into()));
    }
    Ok(Target::Delta.combine(MeasurementObjective::new(rho).qubit_fidelities(theta, phi)))
}

/// Two-outcome weak measurement on subsystem a:
/// `Ω_x = t₁Π¹ + t₂Π²`, `Ω_{−x} = t₁Π² + t₂Π¹`, `t_{1,2} = √((1 ± tanh x)/2)`.
///
/// `Π¹` is the sum of the first `k` projectors of a rank-1 basis measurement
/// and `Π² = I − Π¹`.
#[derive(Debug, Clone)]
pub struct WeakMeasurement {
    strength: f64,
    k: usize,
    refinement: ProjectiveMeasurement,
    dichotomy: ProjectiveMeasurement,
    t1: f64,
    t2: f64,
}

impl WeakMeasurement {
    pub fn new(strength: f64, basis: ProjectiveMeasurement, k: usize) -> Result<Self> {
        let d = basis.subsystem_dim();
        if !strength.is_finite() {
            return Err(QresError::InvalidParameter(
                "weak strength must be finite".into(),
            ));
        }
        if basis.projectors().len() != d {
            return Err(QresError::InvalidParameter(
                "dichotomy must refine into d rank-1 projectors".into(),
            ));
        }
        if k == 0 || k >= d {
            return Err(QresError::InvalidParameter(format!(
                "dichotomy size k = {k} must lie in 1..{d}"
            )));
        }
        let pi1 = basis.projectors()[..k]
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, p| &acc + p);
        let pi2 = &ComplexMatrix::identity(d) - &pi1;
        // Stable forms: (1 ± tanh x)/2 = 1/(1 + e^{∓2x}).
        let t1 = (1.0 / (1.0 + (-2.0 * strength).exp())).sqrt();
        let t2 = (1.0 / (1.0 + (2.0 * strength).exp())).sqrt();
        Ok(Self {
            strength,
            k,
            refinement: basis,
            dichotomy: ProjectiveMeasurement {
                projectors: vec![pi1, pi2],
            },
            t1,
            t2,
        })
    }

    /// First `k` computational basis vectors span `Π¹`.
    pub fn computational(d: usize, k: usize, strength: f64) -> Result<Self> {
        Self::new(strength, ProjectiveMeasurement::computational(d), k)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Interpolation weight `t = 2 t₁ t₂ = sech x`.
    pub fn t(&self) -> f64 {
        1.0 / self.strength.cosh()
    }

    pub fn subsystem_dim(&self) -> usize {
        self.refinement.subsystem_dim()
    }

    /// `{Π¹, Π²}` as a two-outcome projective measurement.
    pub fn dichotomy(&self) -> &ProjectiveMeasurement {
        &self.dichotomy
    }

    /// The rank-1 measurement the dichotomy is built from.
    pub fn refinement(&self) -> &ProjectiveMeasurement {
        &self.refinement
    }

    /// `(Ω_x, Ω_{−x})`.
    pub fn operators(&self) -> (ComplexMatrix, ComplexMatrix) {
        let [p1, p2] = [&self.dichotomy.projectors[0], &self.dichotomy.projectors[1]];
        (
            &p1.scale(self.t1) + &p2.scale(self.t2),
            &p2.scale(self.t1) + &p1.scale(self.t2),
        )
    }

    /// Max-abs entry of `Ω_x†Ω_x + Ω_{−x}†Ω_{−x} − I`.
    pub fn completeness_deviation(&self) -> f64 {
        let (a, b) = self.operators();
        let sum = &(&a.adjoint() * &a) + &(&b.adjoint() * &b);
        sum.max_abs_diff(&ComplexMatrix::identity(self.subsystem_dim()))
    }

    fn check(&self, rho: &BipartiteState) -> Result<()> {
        if self.subsystem_dim() != rho.dims().0 {
            return Err(QresError::DimensionMismatch(format!(
                "weak measurement on dimension {} applied to subsystem a of dimension {}",
                self.subsystem_dim(),
                rho.dims().0
            )));
        }
        Ok(())
    }

    /// `Π(ρ)` appearing in the weak-measurement identities: dephasing by the
    /// dichotomy `{Π¹, Π²}` on a.
    pub fn projective_image(&self, rho: &BipartiteState) -> Result<BipartiteState> {
        self.check(rho)?;
        apply_measurement(rho, &self.dichotomy)
    }
}

/// `Ω(ρ) = Σ_{j=±x} (Ω_j ⊗ I) ρ (Ω_j ⊗ I)`, evaluated as an operator sum.
pub fn weak_apply(rho: &BipartiteState, w: &WeakMeasurement) -> Result<BipartiteState> {
    w.check(rho)?;
    let (da, db) = rho.dims();
    let id = ComplexMatrix::identity(db);
    let (a, b) = w.operators();
    let n = da * db;
    let out = [a, b].iter().fold(ComplexMatrix::zeros(n, n), |acc, op| {
        let big = tensor(op, &id).expect("dims bounded by state");
        &acc + &(&(&big * rho.matrix()) * &big.adjoint())
    });
    BipartiteState::from_matrix(out, rho.dims())
}

/// `t ρ + (1 − t) Π(ρ)` with `t = sech x`, the convex form of [`weak_apply`].
pub fn weak_interpolate(rho: &BipartiteState, w: &WeakMeasurement) -> Result<BipartiteState> {
    let projected = w.projective_image(rho)?;
    let t = w.t();
    let m = &rho.matrix().scale(t) + &projected.matrix().scale(1.0 - t);
    BipartiteState::new(DensityMatrix::from_trusted(m), rho.dims())
}

/// `F(ρ, Ω(ρ))`.
pub fn weak_fidelity(rho: &BipartiteState, w: &WeakMeasurement) -> Result<f64> {
    let omega = weak_interpolate(rho, w)?;
    Ok(ratio_fidelity(rho.matrix(), omega.matrix()).expect("states are nonzero"))
}

/// `tr[ρΩ(ρ)] / (tr ρ² · (t + (1 − t) ζ))` with `ζ = tr[ρΠ(ρ)] / tr[ρΩ(ρ)]`.
pub fn weak_fidelity_zeta(rho: &BipartiteState, w: &WeakMeasurement) -> Result<f64> {
    let omega = weak_interpolate(rho, w)?;
    let projected = w.projective_image(rho)?;
    let t = w.t();
    let r_omega = ComplexMatrix::trace_product_re(rho.matrix(), omega.matrix());
    let r_pi = ComplexMatrix::trace_product_re(rho.matrix(), projected.matrix());
    let zeta = r_pi / r_omega;
    Ok(r_omega / (rho.density().purity() * (t + (1.0 - t) * zeta)))
}

/// `P_F(Ω(ρ)) = log_d(d · tr[t²ρ² + (1 − t²) ρ Π(ρ)])`.
pub fn weak_purity(rho: &BipartiteState, w: &WeakMeasurement) -> Result<f64> {
    let projected = w.projective_image(rho)?;
    let t = w.t();
    let purity = rho.density().purity();
    let r_pi = ComplexMatrix::trace_product_re(rho.matrix(), projected.matrix());
    let d = rho.dim() as f64;
    Ok((d * (t * t * purity + (1.0 - t * t) * r_pi)).ln() / d.ln())
}
