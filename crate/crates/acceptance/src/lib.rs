//! Reference oracles for the acceptance gate.
//!
//! Everything here is written from the defining formulas with plain dense
//! loops: its own matrix type, Kronecker product, partial trace, fidelity,
//! Gell-Mann matrices, measurement maps and brute-force searches. Only
//! conversions touch `qres` types, so agreement with the library is a check
//! of two independent implementations.

use num_complex::Complex64 as C;
use qres::ComplexMatrix;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<C>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: vec![C::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, C::new(1.0, 0.0));
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Mat::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, C::new(v, 0.0));
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn projector(v: &[C]) -> Self {
        let n = v.len();
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    pub fn from_qres(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }

    pub fn to_qres(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn adj(&self) -> Mat {
        let mut out = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_diff(&self, o: &Mat) -> f64 {
        self.a
            .iter()
            .zip(&o.a)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// `tr(ab)`, real part.
pub fn tr_prod(a: &Mat, b: &Mat) -> f64 {
    a.mul(b).trace().re
}

pub fn purity(rho: &Mat) -> f64 {
    tr_prod(rho, rho)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let n = a.n * b.n;
    let mut out = Mat::zeros(n);
    for i in 0..a.n {
        for j in 0..a.n {
            for k in 0..b.n {
                for l in 0..b.n {
                    out.set(i * b.n + k, j * b.n + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    out
}

/// `tr_b` of an operator on `C^da ⊗ C^db`.
pub fn trace_out_b(m: &Mat, da: usize, db: usize) -> Mat {
    let mut out = Mat::zeros(da);
    for i in 0..da {
        for j in 0..da {
            let mut s = C::new(0.0, 0.0);
            for k in 0..db {
                s += m.get(i * db + k, j * db + k);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// `(tr ab)² / (tr a² · tr b²)`
pub fn fidelity(a: &Mat, b: &Mat) -> f64 {
    let ab = tr_prod(a, b);
    ab * ab / (purity(a) * purity(b))
}

/// `log_d(d · tr ρ²)`
pub fn fidelity_purity(rho: &Mat) -> f64 {
    let d = rho.n as f64;
    (d * purity(rho)).ln() / d.ln()
}

/// Generalized Gell-Mann matrices normalized to `tr(λ_a λ_b) = 2δ_ab`:
/// symmetric pairs `j < k` in lexicographic order, then antisymmetric pairs
/// in the same order, then the diagonal ones.
pub fn gell_mann(d: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    for j in 0..d {
        for k in (j + 1)..d {
            pairs.push((j, k));
        }
    }
    for &(j, k) in &pairs {
        let mut m = Mat::zeros(d);
        m.set(j, k, C::new(1.0, 0.0));
        m.set(k, j, C::new(1.0, 0.0));
        out.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = Mat::zeros(d);
        m.set(j, k, C::new(0.0, -1.0));
        m.set(k, j, C::new(0.0, 1.0));
        out.push(m);
    }
    for l in 1..d {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = c;
        }
        diag[l] = -(l as f64) * c;
        out.push(Mat::diag(&diag));
    }
    out
}

/// `Σ_{j<k} √(x_{jk,s}² + x_{jk,a}²)` from Bloch components `x = tr(ρ λ)`.
pub fn l1_from_gell_mann(rho: &Mat) -> f64 {
    let d = rho.n;
    let k = d * (d - 1) / 2;
    let x: Vec<f64> = gell_mann(d).iter().map(|g| tr_prod(rho, g)).collect();
    (0..k)
        .map(|i| (x[i] * x[i] + x[i + k] * x[i + k]).sqrt())
        .sum()
}

/// Squared norm of the correlation matrix in the orthonormal bases
/// `{I/√d} ∪ {λ/√2}` on both factors.
pub fn gamma_norm_sqr(rho: &Mat, da: usize, db: usize) -> f64 {
    let basis = |d: usize| -> Vec<Mat> {
        std::iter::once(Mat::identity(d).scale(1.0 / (d as f64).sqrt()))
            .chain(
                gell_mann(d)
                    .into_iter()
                    .map(|g| g.scale(std::f64::consts::FRAC_1_SQRT_2)),
            )
            .collect()
    };
    let (xa, yb) = (basis(da), basis(db));
    let mut total = 0.0;
    for x in &xa {
        for y in &yb {
            let g = tr_prod(rho, &kron(x, y));
            total += g * g;
        }
    }
    total
}

/// All compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// `max F(ρ, δ)` over diagonal states δ by brute force: a grid of step
/// `1/resolution` over the probability simplex, then a pattern search that
/// moves weight between pairs of entries with shrinking steps.
pub fn simplex_oracle(rho: &Mat, resolution: usize) -> f64 {
    let d = rho.n;
    let eval = |p: &[f64]| -> f64 {
        if p.iter().all(|&x| x == 0.0) {
            return f64::NEG_INFINITY;
        }
        fidelity(rho, &Mat::diag(p))
    };
    let mut grid = Vec::new();
    compositions(resolution, d, &mut Vec::new(), &mut grid);
    let mut best_p: Vec<f64> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for c in &grid {
        let p: Vec<f64> = c.iter().map(|&k| k as f64 / resolution as f64).collect();
        let f = eval(&p);
        if f > best {
            best = f;
            best_p = p;
        }
    }
    let mut step = 1.0 / resolution as f64;
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || best_p[j] < step {
                    continue;
                }
                let mut p = best_p.clone();
                p[i] += step;
                p[j] -= step;
                let f = eval(&p);
                if f > best {
                    best = f;
                    best_p = p;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// `Σ_k (|v_k⟩⟨v_k| ⊗ I) ρ (|v_k⟩⟨v_k| ⊗ I)`
pub fn measure_a(rho: &Mat, da: usize, db: usize, basis: &[Vec<C>]) -> Mat {
    let id = Mat::identity(db);
    let mut out = Mat::zeros(da * db);
    for v in basis {
        let p = kron(&Mat::projector(v), &id);
        out = out.add(&p.mul(rho).mul(&p));
    }
    out
}

/// `F(ρ_a, Π_a ρ_a) − F(ρ, Π ρ)` by direct construction.
pub fn delta_oracle(rho: &Mat, da: usize, db: usize, basis: &[Vec<C>]) -> f64 {
    let rho_a = trace_out_b(rho, da, db);
    let local = fidelity(&rho_a, &measure_a(&rho_a, da, 1, basis));
    let global = fidelity(rho, &measure_a(rho, da, db, basis));
    local - global
}

/// Qubit basis with first vector at Bloch angles `(θ, φ)`.
pub fn bloch_basis(theta: f64, phi: f64) -> Vec<Vec<C>> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C::from_polar(1.0, phi);
    vec![
        vec![C::new(c, 0.0), e * s],
        vec![-e.conj() * s, C::new(c, 0.0)],
    ]
}

/// `min Δ_F` over an `nθ × nφ` grid of qubit bases on subsystem a.
pub fn bloch_grid_min(rho: &Mat, db: usize, n_theta: usize, n_phi: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            best = best.min(delta_oracle(rho, 2, db, &bloch_basis(theta, phi)));
        }
    }
    best
}

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap(d: usize) -> Mat {
    let mut m = Mat::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(j * d + i, i * d + j, C::new(1.0, 0.0));
        }
    }
    m
}

/// `((d − y) I + (yd − 1) F) / (d³ − d)`
pub fn werner(d: usize, y: f64) -> Mat {
    let df = d as f64;
    let norm = df * df * df - df;
    Mat::identity(d * d)
        .scale((df - y) / norm)
        .add(&swap(d).scale((y * df - 1.0) / norm))
}

/// Weak measurement by its operator sum, with the dichotomy spanned by the
/// first `k` vectors of `basis` and `t_{1,2} = √((1 ± tanh x)/2)`.
pub fn weak_operator_sum(
    rho: &Mat,
    da: usize,
    db: usize,
    basis: &[Vec<C>],
    k: usize,
    x: f64,
) -> Mat {
    let mut p1 = Mat::zeros(da);
    for v in &basis[..k] {
        p1 = p1.add(&Mat::projector(v));
    }
    let p2 = Mat::identity(da).add(&p1.scale(-1.0));
    let t1 = ((1.0 + x.tanh()) / 2.0).sqrt();
    let t2 = ((1.0 - x.tanh()) / 2.0).sqrt();
    let id = Mat::identity(db);
    let plus = kron(&p1.scale(t1).add(&p2.scale(t2)), &id);
    let minus = kron(&p2.scale(t1).add(&p1.scale(t2)), &id);
    plus.mul(rho)
        .mul(&plus.adj())
        .add(&minus.mul(rho).mul(&minus.adj()))
}

/// Block dephasing by the dichotomy `{Π¹, Π²}` on subsystem a.
pub fn dichotomy_dephase(rho: &Mat, da: usize, db: usize, basis: &[Vec<C>], k: usize) -> Mat {
    let mut p1 = Mat::zeros(da);
    for v in &basis[..k] {
        p1 = p1.add(&Mat::projector(v));
    }
    let p2 = Mat::identity(da).add(&p1.scale(-1.0));
    let id = Mat::identity(db);
    let (b1, b2) = (kron(&p1, &id), kron(&p2, &id));
    b1.mul(rho).mul(&b1).add(&b2.mul(rho).mul(&b2))
}

/// Columns of a `qres` unitary as basis vectors.
pub fn columns(u: &ComplexMatrix) -> Vec<Vec<C>> {
    (0..u.cols()).map(|j| u.column(j)).collect()
}
