//! Shared inputs for the criterion benchmarks.

use smnc_core::instances::gen_random;
use smnc_core::pipeline::bench_params;
use smnc_core::Network;

/// Link counts of the scaling series.
pub const SIZES: [usize; 4] = [10_000, 20_000, 40_000, 80_000];

pub const SEED: u64 = 7;

/// The layered random instance used for the scaling series.
pub fn scaling_instance(links: usize) -> Network {
    gen_random(&bench_params(links, SEED)).expect("bench parameters are feasible")
}
