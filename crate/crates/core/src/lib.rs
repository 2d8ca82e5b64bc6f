// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

// `!(x > 0.0)` guards are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Triangular solves read clearer with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fixtures;
pub mod io;
pub mod lindblad;
pub mod linalg;
pub mod metrics;
pub mod pauli;
pub mod qpt;
pub mod qst;
pub mod rng;
pub mod solver;
pub mod state;
pub mod study;

pub use error::{Error, Result};
