//! Benchmarks live in `benches/`; run them with `cargo bench -p tresca-bench`.

use std::sync::Arc;

use tresca_core::sensitivity::reference_mesh;
use tresca_core::FeSpace;

/// FE space on the reference disk with `n` boundary edges.
pub fn reference_space(n: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(reference_mesh(n).expect("valid size")).expect("assembles"))
}
