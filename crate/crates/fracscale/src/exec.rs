//! Worker-thread control for the convolution stage.
//!
//! The `FRACSCALE_THREADS` environment variable caps parallelism: unset or
//! "0" uses all cores, "1" forces the sequential code path, and any larger
//! value caps the global rayon pool at that many threads. The cap is applied
//! when the pool is first used and cannot shrink an already-built pool;
//! unparseable values fall back to "all cores" rather than failing a library
//! call (the CLI validates the variable up front and reports garbage).

use std::sync::Once;

pub(crate) const THREADS_ENV: &str = "FRACSCALE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Parallelism {
    Sequential,
    Parallel,
}

/// Reads `FRACSCALE_THREADS` (freshly, each call) and prepares the pool.
pub(crate) fn from_env() -> Parallelism {
    match std::env::var(THREADS_ENV) {
        Err(_) => Parallelism::Parallel,
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(1) => Parallelism::Sequential,
            Ok(0) | Err(_) => Parallelism::Parallel,
            Ok(cap) => {
                cap_global_pool(cap);
                Parallelism::Parallel
            }
        },
    }
}

fn cap_global_pool(cap: usize) {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        // Fails if something else already built the global pool; the cap is
        // best-effort in that case.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cap).build_global();
    });
}
