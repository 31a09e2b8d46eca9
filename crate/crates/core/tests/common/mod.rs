#![allow(dead_code)]

use proptest::prelude::*;
use smnc_core::instances::gen_random;
use smnc_core::{GenParams, Network};

/// Random small networks: every generated parameter set is feasible.
pub fn small_network() -> impl Strategy<Value = Network> {
    (4usize..=12, any::<u64>())
        .prop_flat_map(|(nodes, seed)| {
            let inner = nodes - 2;
            (
                Just(nodes),
                inner + 1..=25usize,
                1..=inner.min(3),
                1..=inner.min(3),
                Just(seed),
            )
        })
        .prop_map(|(nodes, links, sinks1, sinks2, seed)| {
            gen_random(&GenParams {
                nodes,
                links,
                sinks1,
                sinks2,
                seed,
            })
            .expect("parameters are feasible")
        })
}

pub const SUPPORTED_ORDERS: [u64; 10] = [2, 3, 4, 5, 7, 8, 16, 31, 256, 65521];
