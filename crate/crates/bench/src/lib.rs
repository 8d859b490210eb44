//! Shared fixtures for the benchmark targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use axireg_core::ensemble::{random_flow, EnsembleSpec};
use axireg_core::grid::{CylGrid, GridRef};
use axireg_core::state::AxisymState;

pub fn bench_grid(n: usize) -> GridRef {
    CylGrid::shared(6.0, 6.0, n, n).expect("benchmark grid")
}

pub fn bench_state(grid: &GridRef, seed: u64) -> AxisymState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flow = random_flow(&mut rng, &EnsembleSpec::default());
    flow.sample(grid, 0.0).expect("benchmark state")
}
