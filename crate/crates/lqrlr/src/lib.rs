// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Scenario harness, file formats and plotting around [`lqrlr_core`].

pub mod experiments;
pub mod format;
pub mod modelfile;
pub mod svg;

use std::env;

/// Builds the worker pool, capped by `LQRLR_THREADS` (`0` or unset: one
/// thread per core).
pub fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let threads = match env::var("LQRLR_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("LQRLR_THREADS must be a non-negative integer, got {v:?}"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())
}
