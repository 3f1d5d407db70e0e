//! Golden fixture: the hand-crafted `N = K = 2`, `F = 6` scheme, cache and
//! transmission tables reproduced literally. It is held to the same
//! exhaustive decodability and privacy suite as the general construction;
//! its bit assignments need not coincide with the general construction's
//! output, only its rate and both verification verdicts.

use num::BigRational;

use crate::combinatorics::ratio;
use crate::gf2::GfSystem;
use crate::model::{
    Block, BroadcastMessage, CacheContent, DemandVector, FileLibrary, KeyVector, ShiftVector,
};
use crate::scheme::{CachingScheme, WireBroadcast};
use crate::verifier::{
    check_decodability, check_privacy_uniform, mutual_information, VerificationReport,
    VerifyOptions, WorldPolicy,
};
use crate::{Error, Result};

const FILE_A: usize = 1;
const FILE_B: usize = 2;

/// Cached bit positions (1-based) per (user, key), identical for both files.
const CACHE_TABLE: [[[usize; 3]; 2]; 2] = [
    [[1, 2, 3], [1, 4, 5]], // Z_{1,1}, Z_{1,2}
    [[2, 4, 6], [3, 5, 6]], // Z_{2,1}, Z_{2,2}
];

/// The four transmissions, indexed by the shifts `(c_1, c_2)`; each is four
/// one-bit XOR blocks, each block the XOR of three (file, bit) terms.
const TX_TABLE: [[[(usize, usize); 3]; 4]; 4] = [
    // (c1, c2) = (0, 0): T1
    [
        [(FILE_B, 2), (FILE_A, 1), (FILE_A, 4)],
        [(FILE_B, 4), (FILE_B, 6), (FILE_A, 5)],
        [(FILE_B, 2), (FILE_A, 6), (FILE_A, 3)],
        [(FILE_B, 1), (FILE_A, 5), (FILE_B, 3)],
    ],
    // (0, 1): T2
    [
        [(FILE_B, 1), (FILE_A, 4), (FILE_B, 2)],
        [(FILE_A, 4), (FILE_B, 6), (FILE_B, 5)],
        [(FILE_A, 2), (FILE_A, 6), (FILE_B, 3)],
        [(FILE_A, 1), (FILE_A, 5), (FILE_B, 3)],
    ],
    // (1, 0): T3
    [
        [(FILE_B, 4), (FILE_A, 2), (FILE_A, 1)],
        [(FILE_A, 6), (FILE_A, 5), (FILE_B, 4)],
        [(FILE_B, 6), (FILE_A, 3), (FILE_B, 2)],
        [(FILE_B, 5), (FILE_A, 3), (FILE_B, 1)],
    ],
    // (1, 1): T4
    [
        [(FILE_B, 4), (FILE_A, 2), (FILE_B, 1)],
        [(FILE_A, 6), (FILE_B, 5), (FILE_A, 4)],
        [(FILE_B, 6), (FILE_B, 3), (FILE_A, 2)],
        [(FILE_B, 5), (FILE_A, 3), (FILE_A, 1)],
    ],
];

/// The literal two-file, two-user, six-bit scheme. Libraries use the same
/// layout as the general construction at `(N=2, K=2, t=2, b=1)`: file bit `j`
/// is the subfile at colex rank `j - 1`.
pub struct FixtureScheme;

impl FixtureScheme {
    pub fn library_shape() -> (usize, usize, usize, usize) {
        (2, 4, 2, 1)
    }

    fn group_index(shifts: &ShiftVector) -> usize {
        2 * shifts.0[0] + shifts.0[1]
    }
}

impl CachingScheme for FixtureScheme {
    fn n_files(&self) -> usize {
        2
    }

    fn n_users(&self) -> usize {
        2
    }

    fn subfile_bits(&self) -> usize {
        1
    }

    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent> {
        keys.0
            .iter()
            .enumerate()
            .map(|(k0, &s)| {
                let bits = &CACHE_TABLE[k0][s - 1];
                let store = (1..=2)
                    .map(|file| {
                        bits.iter()
                            .map(|&b| (b - 1, lib.subfile(file, b - 1).clone()))
                            .collect()
                    })
                    .collect();
                CacheContent {
                    owner: k0 + 1,
                    key: s,
                    store,
                }
            })
            .collect()
    }

    fn deliver(
        &self,
        lib: &FileLibrary,
        demands: &DemandVector,
        keys: &KeyVector,
    ) -> WireBroadcast {
        let shifts = crate::private::compute_shifts(keys, demands, 2).expect("lengths match");
        let payload: Vec<Block> = TX_TABLE[Self::group_index(&shifts)]
            .iter()
            .map(|terms| {
                let mut acc = crate::model::zero_block(1);
                for &(file, bit) in terms {
                    crate::model::xor_into(&mut acc, lib.subfile(file, bit - 1));
                }
                acc
            })
            .collect();
        WireBroadcast {
            message: BroadcastMessage {
                header: shifts,
                payload,
            },
            extra_header: Vec::new(),
        }
    }

    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>> {
        // The demanded file follows from the key and the broadcast shifts.
        let c = broadcast.message.header.0[user - 1];
        let wanted = (cache.key + 2 - 1 - c) % 2 + 1; // d_k = (s_k - c_k) mod N
        let col_of = |file: usize, bit: usize| (file - 1) * 6 + (bit - 1);
        let mut sys = GfSystem::new(12);
        let group = &TX_TABLE[Self::group_index(&broadcast.message.header)];
        for (terms, block) in group.iter().zip(&broadcast.message.payload) {
            let mut rhs = block.clone();
            let mut cols = Vec::new();
            for &(file, bit) in terms {
                match cache.get(file, bit - 1) {
                    Some(known) => crate::model::xor_into(&mut rhs, known),
                    None => cols.push(col_of(file, bit)),
                }
            }
            sys.add_equation(cols, rhs);
        }
        let missing: Vec<usize> = (1..=6)
            .filter(|&b| cache.get(wanted, b - 1).is_none())
            .collect();
        let needed: Vec<usize> = missing.iter().map(|&b| col_of(wanted, b)).collect();
        let solved = sys.solve(&needed).map_err(|col| Error::Undetermined {
            user,
            file: col / 6 + 1,
            subfile: col % 6,
        })?;
        let mut solved_iter = solved.into_iter();
        Ok((1..=6)
            .map(|b| match cache.get(wanted, b - 1) {
                Some(bl) => bl.clone(),
                None => solved_iter.next().expect("one per missing bit"),
            })
            .collect())
    }
}

/// Runs the fixture through the exhaustive suite (all `2^12` worlds, all 16
/// key/demand pairs) and asserts its rate. Returns the report and the rate.
pub fn run_fixture(parallel: bool) -> Result<(VerificationReport, BigRational)> {
    let scheme = FixtureScheme;
    let shape = FixtureScheme::library_shape();
    let opts = VerifyOptions {
        policy: WorldPolicy::Exhaustive,
        parallel,
        ..VerifyOptions::default()
    };
    let mut report = check_decodability(&scheme, shape, &opts)?;
    let privacy = check_privacy_uniform(&scheme, shape, &opts)?;
    report.privacy_violations = privacy.privacy_violations;
    report.privacy_violation_count = privacy.privacy_violation_count;
    report.mutual_information = Some(mutual_information(&scheme, shape, &opts)?);
    // 4 payload bits over F = 6
    let rate = ratio(4, 6);
    Ok((report, rate))
}
