// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! Published experimental reference data for two-qubit NMR process
//! tomography: CCO-derived Kraus operators for three gates, printed to four
//! decimals, and the tabulated eigenvalues, fidelities and average state
//! deviations that accompany them.
//!
//! Only the Kraus-anchored values can be recomputed offline. The
//! standard-inversion columns need raw spectrometer data and are kept for
//! display only.

use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::qpt::{Gate, KrausSet};

/// Tolerance on eigenvalues recomputed from the rounded operators.
pub const EIGENVALUE_TOL: f64 = 5e-3;
/// Tolerance on process fidelities recomputed from the rounded operators.
pub const FIDELITY_TOL: f64 = 1e-2;
/// Tolerance on `‖Σ E†E − I‖_max` for the rounded operators.
pub const COMPLETENESS_TOL: f64 = 2e-2;

#[derive(Debug, Clone)]
pub struct GateFixture {
    pub gate: Gate,
    pub kraus: Vec<ComplexMatrix>,
    /// Nonzero eigenvalues of the CCO χ, descending.
    pub cco_eigenvalues: &'static [f64],
    /// All sixteen eigenvalues of the standard χ, as printed.
    pub standard_eigenvalues: &'static [f64],
    pub cco_fidelity: f64,
    pub standard_fidelity: f64,
    pub cco_avg_deviation: f64,
    pub standard_avg_deviation: f64,
}

impl GateFixture {
    pub fn kraus_set(&self) -> Result<KrausSet> {
        KrausSet::from_operators(self.kraus.clone())
    }
}

/// Identity, CNOT and controlled-`Rx(π)`, in that order.
pub fn reference_fixtures() -> [GateFixture; 3] {
    [
        GateFixture {
            gate: Gate::Identity,
            kraus: to_matrices(&IDENTITY_KRAUS),
            cco_eigenvalues: &[0.9477, 0.0357, 0.0166],
            standard_eigenvalues: &[
                1.0087, 0.1205, -0.0547, 0.0581, 0.0355, -0.0441, -0.0122, -0.0385, -0.0338, -0.0271, -0.0213,
                -0.0151, 0.0019, 0.0006, -0.0067, 0.0281,
            ],
            cco_fidelity: 0.9959,
            standard_fidelity: 0.9809,
            cco_avg_deviation: 4.3414e-4,
            standard_avg_deviation: 0.0020,
        },
        GateFixture {
            gate: Gate::Cnot,
            kraus: to_matrices(&CNOT_KRAUS),
            cco_eigenvalues: &[0.9038, 0.0438, 0.0245, 0.0201, 0.0077],
            standard_eigenvalues: &[
                1.0117, 0.1331, -0.1421, 0.1247, 0.0934, 0.0860, 0.0716, 0.0541, 0.0668, -0.1135, -0.0935,
                -0.0838, -0.0315, -0.0672, -0.0598, -0.0503,
            ],
            cco_fidelity: 0.9817,
            standard_fidelity: 0.9313,
            cco_avg_deviation: 0.0021,
            standard_avg_deviation: 0.0097,
        },
        GateFixture {
            gate: Gate::CrxPi,
            kraus: to_matrices(&CRX_PI_KRAUS),
            cco_eigenvalues: &[0.9045, 0.0397, 0.0315, 0.0166, 0.0077],
            standard_eigenvalues: &[
                0.9972, 0.1435, -0.1305, 0.1198, 0.1061, 0.0971, 0.0837, 0.0746, 0.0553, -0.0119, -0.1044,
                -0.0838, -0.0415, -0.0767, -0.0578, -0.0639,
            ],
            cco_fidelity: 0.9831,
            standard_fidelity: 0.9269,
            cco_avg_deviation: 0.0018,
            standard_avg_deviation: 0.0101,
        },
    ]
}

type Op = [[(f64, f64); 4]; 4];

fn to_matrices(ops: &[Op]) -> Vec<ComplexMatrix> {
    ops.iter()
        .map(|op| {
            let data = op.iter().flatten().map(|&(re, im)| C64::new(re, im)).collect();
            ComplexMatrix::from_vec(4, 4, data).expect("4x4")
        })
        .collect()
}

const IDENTITY_KRAUS: [Op; 3] = [
    [
        [(-0.0308, 0.0457), (-0.0028, -0.0077), (0.0626, 0.1056), (0.0022, 0.0078)],
        [(0.0070, 0.0095), (-0.0393, 0.0633), (-0.0055, -0.0060), (0.0550, 0.1068)],
        [(0.0755, -0.0678), (0.0203, 0.0042), (0.0279, -0.0575), (0.0052, 0.0001)],
        [(0.0395, 0.0187), (0.0850, 0.0079), (0.0153, 0.0005), (0.0451, -0.0399)],
    ],
    [
        [(0.0571, 0.0943), (-0.0133, 0.0201), (-0.1932, -0.0604), (-0.0069, -0.0085)],
        [(-0.0071, 0.0271), (-0.0082, 0.0968), (0.0173, -0.0019), (-0.1724, -0.0574)],
        [(0.0189, -0.1154), (0.0269, -0.0103), (-0.0281, -0.1005), (0.0091, -0.0038)],
        [(0.0481, -0.0087), (0.0723, -0.0485), (-0.0040, 0.0067), (-0.0220, -0.0980)],
    ],
    [
        [(-0.0442, -0.9758), (-0.0014, 0.0418), (0.0103, 0.0259), (-0.0100, -0.0007)],
        [(0.0005, -0.0271), (-0.0550, -0.9813), (0.0095, 0.0029), (0.0129, 0.0272)],
        [(0.0101, -0.0239), (0.0088, -0.0002), (-0.0190, -0.9617), (0.0233, 0.0404)],
        [(-0.0096, 0.0017), (0.0101, -0.0205), (0.0242, -0.0412), (0.0021, -0.9671)],
    ],
];

const CNOT_KRAUS: [Op; 5] = [
    [
        [(0.0344, -0.0042), (0.0389, 0.0130), (-0.0068, 0.0035), (-0.0691, -0.0003)],
        [(-0.0039, -0.0038), (-0.0208, -0.0054), (-0.0494, 0.0543), (0.0125, 0.0320)],
        [(0.0548, 0.0194), (-0.0023, -0.0251), (-0.0714, 0.0137), (-0.0094, -0.0117)],
        [(0.0208, 0.0094), (0.0654, 0.0264), (-0.0162, 0.0148), (0.0221, 0.0124)],
    ],
    [
        [(0.0124, 0.0245), (0.0065, -0.0008), (-0.0508, -0.1283), (-0.0079, 0.0205)],
        [(0.0727, 0.0709), (-0.0132, -0.0155), (-0.0941, 0.0168), (0.0494, -0.0326)],
        [(0.0323, -0.0020), (-0.0552, 0.0537), (0.1017, 0.0139), (-0.0577, -0.0248)],
        [(0.0400, 0.0811), (-0.0112, 0.0281), (0.0603, 0.0204), (-0.0381, -0.0261)],
    ],
    [
        [(0.0907, -0.0140), (-0.0599, 0.0491), (0.0581, 0.0467), (0.0292, 0.0058)],
        [(-0.0567, 0.0142), (-0.0978, -0.0171), (0.0109, 0.0093), (-0.0310, -0.1036)],
        [(0.0267, 0.0135), (-0.0221, 0.0546), (-0.0700, 0.0595), (-0.0752, -0.0404)],
        [(-0.0269, -0.0463), (-0.0340, 0.0427), (0.0765, 0.0205), (-0.1294, 0.0564)],
    ],
    [
        [(0.1786, 0.0344), (0.1327, -0.0629), (0.0228, 0.0866), (-0.0018, -0.0201)],
        [(0.0052, -0.0290), (-0.1264, -0.0353), (0.0174, -0.0797), (-0.0397, 0.0932)],
        [(-0.0346, 0.0199), (0.0383, -0.0361), (0.1008, -0.0337), (-0.1466, -0.0222)],
        [(-0.0024, -0.0169), (-0.0415, -0.0293), (0.1058, -0.0050), (0.1214, -0.1034)],
    ],
    [
        [(0.0706, 0.9517), (-0.0369, 0.0847), (0.0250, 0.0166), (-0.0245, -0.0130)],
        [(-0.0139, -0.1052), (-0.1412, 0.9412), (-0.0442, -0.0280), (-0.0077, -0.0040)],
        [(-0.0187, 0.0169), (-0.0218, -0.0073), (-0.0414, 0.0215), (-0.0410, 0.9380)],
        [(-0.0065, -0.0224), (-0.0537, 0.0269), (0.0297, 0.9390), (-0.0516, 0.0110)],
    ],
];

const CRX_PI_KRAUS: [Op; 5] = [
    [
        [(0.0012, 0.0210), (0.0165, 0.0134), (-0.0744, 0.0001), (-0.0121, -0.0364)],
        [(0.0359, 0.0089), (0.0251, -0.0080), (-0.0654, -0.0831), (-0.0097, -0.0251)],
        [(-0.0234, 0.0153), (-0.0354, -0.0211), (-0.0461, 0.0131), (0.0004, 0.0068)],
        [(0.0365, 0.0369), (-0.0233, 0.0167), (-0.0068, 0.0143), (0.0125, -0.0159)],
    ],
    [
        [(0.0153, 0.0286), (0.0001, -0.1142), (-0.0595, -0.0245), (0.0153, -0.0085)],
        [(-0.0141, 0.0290), (-0.0039, -0.0323), (-0.0097, 0.0340), (0.1150, 0.0166)],
        [(0.0058, 0.0004), (-0.0092, -0.0963), (0.0556, 0.0204), (-0.0167, -0.0196)],
        [(-0.0192, 0.0136), (-0.0308, 0.0298), (0.0407, 0.0222), (-0.1054, -0.0405)],
    ],
    [
        [(0.1537, 0.0345), (0.0717, 0.0257), (0.0169, -0.0805), (-0.0006, -0.0094)],
        [(-0.0074, 0.0235), (-0.1425, -0.0207), (-0.0232, 0.0145), (0.0001, -0.0276)],
        [(0.0178, 0.0428), (-0.0375, -0.0168), (0.0243, -0.0328), (-0.0154, 0.1688)],
        [(-0.0239, -0.0132), (-0.0232, 0.0146), (0.0017, -0.1398), (0.0512, -0.0880)],
    ],
    [
        [(0.0686, -0.0160), (-0.1101, -0.0036), (-0.0419, -0.0764), (-0.0257, -0.0232)],
        [(-0.1221, -0.0570), (-0.0450, 0.0133), (-0.0657, 0.0230), (0.0491, 0.0496)],
        [(0.0651, 0.0241), (0.0643, -0.0430), (-0.1377, 0.1614), (-0.0061, 0.0345)],
        [(-0.0239, 0.0021), (-0.0537, -0.0392), (-0.0594, -0.0210), (0.0213, 0.1907)],
    ],
    [
        [(0.1841, 0.9399), (-0.0704, 0.1026), (0.0143, 0.0058), (0.0012, 0.0004)],
        [(-0.0949, -0.0906), (0.0979, 0.9445), (0.0084, 0.0134), (-0.0049, 0.0210)],
        [(0.0077, -0.0108), (-0.0075, 0.0042), (-0.0249, 0.0765), (0.9336, -0.0790)],
        [(-0.0076, -0.0216), (-0.0092, -0.0086), (0.9304, -0.0835), (0.0338, 0.0811)],
    ],
];
