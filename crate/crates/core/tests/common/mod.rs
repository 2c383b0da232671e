#![allow(dead_code)]

use proptest::prelude::*;
use qres::random::{random_unitary, rng_from_seed};
use qres::states::{random_density, BipartiteState, DensityMatrix};
use qres::ComplexMatrix;

pub fn state(d: usize, seed: u64) -> DensityMatrix {
    let rank = 1 + (seed as usize) % d;
    random_density(d, rank, seed).expect("valid dimension")
}

pub fn bipartite(da: usize, db: usize, seed: u64) -> BipartiteState {
    BipartiteState::new(state(da * db, seed), (da, db)).expect("dims match")
}

pub fn unitary(d: usize, seed: u64) -> ComplexMatrix {
    random_unitary(&mut rng_from_seed(seed), d)
}

/// `(d, seed)` with `d` in `lo..=hi`.
pub fn dim_and_seed(lo: usize, hi: usize) -> impl Strategy<Value = (usize, u64)> {
    (lo..=hi, any::<u64>())
}
