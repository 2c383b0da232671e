//! Dense complex matrix kernel.
//!
//! Everything here is sized for desk-scale quantum states (composite dimension
//! at most 64 by default), so matrices are plain row-major `Vec`s. The Hermitian
//! eigensolver is delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QresError, Result};

pub type C64 = Complex64;

/// Max-abs tolerance on `m - m†` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` are treated as zero when validating positivity.
pub const PSD_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DIM: usize = 64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest supported matrix dimension. Reads `QRES_MAX_DIM` once.
pub fn max_dim() -> usize {
    static MAX: OnceLock<usize> = OnceLock::new();
    *MAX.get_or_init(|| {
        std::env::var("QRES_MAX_DIM")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_DIM)
    })
}

pub fn check_dim(dim: usize) -> Result<()> {
    let max = max_dim();
    if dim > max {
        Err(QresError::DimensionTooLarge { dim, max })
    } else {
        Ok(())
    }
}

/// Which factor of a bipartite space to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting a wrong entry count
    /// or non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QresError::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(QresError::EntryCount {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QresError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO },
        )
    }

    /// Builds from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(QresError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Largest entrywise modulus of `self - other`. Shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs entry of `m - m†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Max-abs entry of `U†U - I`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Real part of `tr(a b)`, summed symmetrically so that swapping the two
    /// arguments gives a bitwise-identical result.
    pub fn trace_product_re(a: &Self, b: &Self) -> f64 {
        assert!(a.is_square() && b.is_square() && a.rows == b.rows);
        let n = a.rows;
        let mut acc = 0.0;
        for i in 0..n {
            acc += re_mul(a[(i, i)], b[(i, i)]);
            for j in (i + 1)..n {
                acc += re_mul(a[(i, j)], b[(j, i)]) + re_mul(a[(j, i)], b[(i, j)]);
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

fn re_mul(a: C64, b: C64) -> f64 {
    a.re * b.re - a.im * b.im
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `a U b U†`-style sandwich `u m u†`.
pub fn conjugate(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(u * m) * &u.adjoint()
}

/// Kronecker product, `(a⊗b)[(i·r_b+k),(j·c_b+l)] = a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    check_dim(rows.max(cols))?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out one factor of a `(d_a·d_b)`-dimensional operator, keeping the
/// other. Composite index is a-major, b-minor.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if da == 0 || db == 0 || m.rows != n || m.cols != n {
        return Err(QresError::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix with factor dims ({da}, {db})",
            m.rows, m.cols
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(QresError::DimensionMismatch(format!(
            "hs_inner of {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.vectors;
        let d = ComplexMatrix::from_real_diag(&self.values);
        &(v * &d) * &v.adjoint()
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(QresError::NotHermitian {
            deviation: dev,
            tolerance: HERMITIAN_TOL,
        });
    }
    let n = m.rows;
    // Symmetrize so the solver only sees the Hermitian part.
    let herm = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let decomposition = herm.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let values = order
        .iter()
        .map(|&k| decomposition.eigenvalues[k])
        .collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| decomposition.eigenvectors[(i, order[j])]);
    Ok(Eigen { values, vectors })
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-PSD_TOL, 0)` are clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    if let Some(&min) = eig.values.first() {
        if min < -PSD_TOL {
            return Err(QresError::NotPositive {
                min_eigenvalue: min,
                tolerance: PSD_TOL,
            });
        }
    }
    // Eigenvalues at round-off level are zero; their square roots would
    // otherwise be ~1e-8 and dominate downstream errors.
    let floor = 64.0 * f64::EPSILON * eig.values.last().map_or(0.0, |l| l.abs()).max(1.0);
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .collect();
    Ok(Eigen {
        values: roots,
        vectors: eig.vectors,
    }
    .reconstruct())
}

/// Pauli matrices `(σ_x, σ_y, σ_z)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let x = ComplexMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
    let y = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    });
    let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    [x, y, z]
}

/// Swap (flip) operator on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let n = d * d;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / d, r % d);
        let (a2, b2) = (c / d, c % d);
        if a == b2 && b == a2 {
            ONE
        } else {
            ZERO
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn sigma_z_tensor_identity_is_diagonal() {
        let [_, _, z] = pauli();
        let t = tensor(&z, &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(t, ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn tensor_respects_dimension_guard() {
        let big = ComplexMatrix::identity(9);
        let err = tensor(&big, &big).unwrap_err();
        assert!(matches!(err, QresError::DimensionTooLarge { dim: 81, .. }));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = 0.5f64.sqrt();
        let phi = [c(s), ZERO, ZERO, c(s)];
        let rho = ComplexMatrix::outer(&phi);
        let half = ComplexMatrix::identity(2).scale(0.5);
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, (2, 2), keep).unwrap();
            assert!(r.max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(6);
        assert!(partial_trace(&m, (2, 2), Subsystem::A).is_err());
        assert_eq!(
            partial_trace(&m, (2, 3), Subsystem::B).unwrap(),
            ComplexMatrix::identity(3).scale(2.0)
        );
    }

    #[test]
    fn diagonal_eigen() {
        let m = ComplexMatrix::from_real_diag(&[0.75, 0.25]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 0.25).abs() < 1e-15 && (e.values[1] - 0.75).abs() < 1e-15);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        let [x, _, _] = pauli();
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO });
        assert!(matches!(
            eig_hermitian(&m),
            Err(QresError::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = ComplexMatrix::from_real_diag(&[4.0 / 13.0, 9.0 / 13.0]);
        let s = psd_sqrt(&m).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[2.0 / 13f64.sqrt(), 3.0 / 13f64.sqrt()]);
        assert!(s.max_abs_diff(&expected) < 1e-14);
        let id = ComplexMatrix::identity(3);
        assert!(psd_sqrt(&id).unwrap().max_abs_diff(&id) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&m), Err(QresError::NotPositive { .. })));
        // Tiny negatives are clamped.
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-12]);
        assert!(psd_sqrt(&m).is_ok());
    }

    #[test]
    fn hs_inner_pauli() {
        let [x, y, _] = pauli();
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0));
        assert_eq!(hs_inner(&x, &y).unwrap(), ZERO);
        assert!(hs_inner(&i2, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn new_rejects_bad_entries() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(QresError::EntryCount {
                expected: 4,
                got: 3
            })
        ));
        let mut data = vec![ONE; 4];
        data[3] = C64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(2, 2, data),
            Err(QresError::NonFinite { row: 1, col: 1 })
        ));
    }

    #[test]
    fn swap_squares_to_identity() {
        let f = swap_operator(3);
        assert_eq!(&f * &f, ComplexMatrix::identity(9));
        assert_eq!(f.trace(), c(3.0));
    }

    #[test]
    fn trace_product_is_symmetric() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 + 0.1, j as f64 - 0.3));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i * j) as f64 * 0.7, 0.2 * i as f64));
        let ab = ComplexMatrix::trace_product_re(&a, &b);
        assert_eq!(
            ab.to_bits(),
            ComplexMatrix::trace_product_re(&b, &a).to_bits()
        );
        assert!((ab - (&a * &b).trace().re).abs() < 1e-12);
    }
}
