//! Seeded sampling of matrices, unitaries and states.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a base seed with a stream label and an index into an independent
/// per-trial seed (splitmix64 finalizer).
pub fn derive_seed(base: u64, stream: &str, index: u64) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    for b in stream.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    splitmix(h ^ index.wrapping_mul(0xbf58_476d_1ce4_e5b9))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix. The
/// implied R factor has a positive real diagonal, which fixes the phases.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Uniformly random unit vector in `C^d`.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Random probability vector (normalized exponentials, i.e. flat Dirichlet).
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random isometry `V` (`rows × cols`, `rows ≥ cols`) from the first columns
/// of a Haar unitary.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let u = random_unitary(rng, rows);
    ComplexMatrix::from_fn(rows, cols, |i, j| u[(i, j)])
}
