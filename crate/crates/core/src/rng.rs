// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! The single seeded generator family used for all simulated noise.
//!
//! A run is identified by a 64-bit seed; independent subtasks (one per
//! simulated output state, one per ensemble member) draw from distinct
//! ChaCha8 streams of that seed, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TomoRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TomoRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for subtask `stream` of the run identified by `seed`.
pub fn substream(seed: u64, stream: u64) -> TomoRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
