// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

pub mod oracle;

use rand::Rng;
use rand_distr::StandardNormal;
use tomoct::linalg::{ComplexMatrix, C64};

/// Random Hermitian 4x4 with trace one and exactly one negative eigenvalue.
pub fn hermitian_with_one_negative<R: Rng>(rng: &mut R) -> ComplexMatrix {
    loop {
        let data = (0..16)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let g = ComplexMatrix::from_vec(4, 4, data).unwrap();
        let h = (&g + &g.dagger()).scale_real(0.25);
        let shift = (1.0 - h.trace().re) / 4.0;
        let h = &h + &ComplexMatrix::identity(4).scale_real(shift);
        let ev = tomoct::linalg::eig_hermitian(&h).unwrap().values;
        if ev.iter().filter(|e| **e < -1e-3).count() == 1 {
            return h;
        }
    }
}
