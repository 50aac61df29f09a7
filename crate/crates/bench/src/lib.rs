//! Benchmarks for the sswalk kernels; see `benches/kernels.rs`.

use sswalk::{fixtures, walkfn::transition_return_functions, CellGraph, WalkFunctions};

/// Fixtures used by the benchmarks, with their walk functions.
pub fn bench_cells() -> Vec<(&'static str, CellGraph, WalkFunctions)> {
    [("flake3", fixtures::flake(3)), ("gasket", fixtures::sierpinski(2, 2)), ("sierpinski3d", fixtures::sierpinski(3, 4))]
        .into_iter()
        .map(|(name, c)| {
            let c = c.expect("fixture");
            let wf = transition_return_functions(&c).expect("walk functions");
            (name, c, wf)
        })
        .collect()
}
