//! The `(N, K, M)`-private scheme: key sampling, shift computation, demand
//! lifting, private placement/delivery/decoding, the trivial uncoded baseline,
//! and seeded end-to-end episodes.
//!
//! Index conventions: users, files and keys are 1-based; shifts are 0-based
//! residues mod `N`.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::ratio;
use crate::model::{
    Block, BroadcastMessage, CacheContent, DemandVector, FileLibrary, KeyVector, SchemeParams,
    ShiftVector,
};
use crate::yma::{
    pick_leaders, transmitted_subsets, yma_decode, yma_deliver, yma_place, VirtualDemand,
};
use crate::{Error, Result};

/// `K` i.i.d. keys uniform on `[N]`, deterministic in the seed (ChaCha8).
pub fn sample_keys(params: &SchemeParams, seed: u64) -> KeyVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KeyVector(
        (0..params.n_users)
            .map(|_| rng.gen_range(1..=params.n_files))
            .collect(),
    )
}

/// Uniform demand vector, used by episodes.
pub fn sample_demands(params: &SchemeParams, seed: u64) -> DemandVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DemandVector(
        (0..params.n_users)
            .map(|_| rng.gen_range(1..=params.n_files))
            .collect(),
    )
}

/// `c_k = (s_k - d_k) mod N`, the only demand-dependent quantity that is
/// broadcast.
pub fn compute_shifts(
    keys: &KeyVector,
    demands: &DemandVector,
    n_files: usize,
) -> Result<ShiftVector> {
    if keys.0.len() != demands.0.len() {
        return Err(Error::LengthMismatch(format!(
            "{} keys vs {} demands",
            keys.0.len(),
            demands.0.len()
        )));
    }
    Ok(ShiftVector(
        keys.0
            .iter()
            .zip(&demands.0)
            .map(|(&s, &d)| (s + n_files - d) % n_files)
            .collect(),
    ))
}

/// Lifts the shifts into the `NK`-length virtual demand: block `k` is
/// `(1, …, N)` right-cyclic-shifted by `c_k`, so position `(k-1)N + j` holds
/// `((j - 1 - c_k) mod N) + 1`. Every block demands all `N` files.
pub fn lift_demands(shifts: &ShiftVector, n_files: usize, n_users: usize) -> VirtualDemand {
    assert_eq!(shifts.0.len(), n_users);
    let mut d = Vec::with_capacity(n_files * n_users);
    for &c in &shifts.0 {
        for j in 1..=n_files {
            d.push((j - 1 + n_files - c) % n_files + 1);
        }
    }
    VirtualDemand(d)
}

/// User `k` receives the virtual cache of virtual user `(k-1)N + s_k`, plus
/// the key itself.
pub fn private_place(
    params: &SchemeParams,
    lib: &FileLibrary,
    keys: &KeyVector,
) -> Vec<CacheContent> {
    let virtual_caches = yma_place(lib);
    keys.0
        .iter()
        .enumerate()
        .map(|(k0, &s)| {
            let v = k0 * params.n_files + s; // (k-1)N + s_k, 1-based
            CacheContent {
                owner: k0 + 1,
                key: s,
                store: virtual_caches[v - 1].store.clone(),
            }
        })
        .collect()
}

/// Broadcast: header `c̄` plus the building-block payload for the lifted
/// demand. The payload always has `C(NK, t+1) - C(NK-N, t+1)` blocks because
/// every lifted demand requests all `N` files.
pub fn private_deliver(
    params: &SchemeParams,
    lib: &FileLibrary,
    demands: &DemandVector,
    keys: &KeyVector,
) -> Result<BroadcastMessage> {
    let shifts = compute_shifts(keys, demands, params.n_files)?;
    let lifted = lift_demands(&shifts, params.n_files, params.n_users);
    let payload = yma_deliver(lib, &lifted)
        .into_iter()
        .map(|(_, b)| b)
        .collect();
    Ok(BroadcastMessage {
        header: shifts,
        payload,
    })
}

/// Decoding: reconstruct the lifted demand from the header, then decode as
/// virtual user `(k-1)N + s_k`. Equations are re-paired with the canonical
/// transmitted-subset order, so a truncated payload simply yields fewer
/// equations.
pub fn private_decode(
    params: &SchemeParams,
    user: usize,
    cache: &CacheContent,
    broadcast: &BroadcastMessage,
) -> Result<Vec<Block>> {
    let lifted = lift_demands(&broadcast.header, params.n_files, params.n_users);
    let leaders = pick_leaders(&lifted);
    let subsets = transmitted_subsets(params.virtual_users(), params.cache_index, &leaders);
    let delivered: Vec<(Vec<usize>, Block)> = subsets
        .into_iter()
        .zip(broadcast.payload.iter().cloned())
        .collect();
    let virtual_user = (user - 1) * params.n_files + cache.key;
    yma_decode(
        virtual_user,
        cache,
        &delivered,
        &lifted,
        (
            params.n_files,
            params.virtual_users(),
            params.cache_index,
            params.subfile_bits,
        ),
    )
}

/// The trivial private baseline: everyone caches the same first `m_files`
/// files and the rest are broadcast uncoded. The broadcast is independent of
/// the demands, hence private; its rate is `N - m_files`.
pub fn trivial_deliver(lib: &FileLibrary, m_files: usize) -> Result<Vec<Block>> {
    if m_files > lib.n_files {
        return Err(Error::InvalidParams(format!(
            "cannot cache {m_files} of {} files",
            lib.n_files
        )));
    }
    Ok((m_files + 1..=lib.n_files)
        .flat_map(|f| lib.file_blocks(f).iter().cloned())
        .collect())
}

/// Rate of the trivial baseline.
pub fn trivial_rate(n_files: usize, m_files: usize) -> BigRational {
    ratio(n_files as i64 - m_files as i64, 1)
}

/// One full run of the protocol: sampled world, keys and demands, then
/// place/deliver/decode for every user.
#[derive(Debug, Clone)]
pub struct PrivateEpisode {
    pub params: SchemeParams,
    pub seed: u64,
    pub library: FileLibrary,
    pub keys: KeyVector,
    pub demands: DemandVector,
    pub shifts: ShiftVector,
    pub broadcast: BroadcastMessage,
    pub decoded: Vec<Vec<Block>>,
    pub success: Vec<bool>,
    pub realized_rate: BigRational,
}

impl PrivateEpisode {
    pub fn all_succeeded(&self) -> bool {
        self.success.iter().all(|&s| s)
    }

    /// Structured one-line record for CLI logging.
    pub fn render(&self) -> String {
        let shifts: Vec<String> = self.shifts.0.iter().map(|c| c.to_string()).collect();
        let flags: Vec<&str> = self
            .success
            .iter()
            .map(|&s| if s { "ok" } else { "FAIL" })
            .collect();
        format!(
            "episode seed={} n={} k={} t={} b={} shifts=({}) rate={} decode=[{}]",
            self.seed,
            self.params.n_files,
            self.params.n_users,
            self.params.cache_index,
            self.params.subfile_bits,
            shifts.join(","),
            self.realized_rate,
            flags.join(",")
        )
    }
}

use crate::model::splitmix64;

/// Runs a seeded episode. The library, keys and demands use independent
/// streams derived from `seed` by splitmix64.
pub fn run_episode(params: &SchemeParams, seed: u64) -> Result<PrivateEpisode> {
    let library = params.sample_library(splitmix64(seed));
    let keys = sample_keys(params, splitmix64(seed ^ 0x6b79)); // "ky"
    let demands = sample_demands(params, splitmix64(seed ^ 0x646d)); // "dm"
    let shifts = compute_shifts(&keys, &demands, params.n_files)?;
    let broadcast = private_deliver(params, &library, &demands, &keys)?;
    let caches = private_place(params, &library, &keys);
    let mut decoded = Vec::with_capacity(params.n_users);
    let mut success = Vec::with_capacity(params.n_users);
    for k in 1..=params.n_users {
        let got = private_decode(params, k, &caches[k - 1], &broadcast)?;
        success.push(got == library.file_blocks(demands.0[k - 1]));
        decoded.push(got);
    }
    let realized_rate = ratio(
        broadcast.payload_bits(params.subfile_bits) as i64,
        params.file_bits() as i64,
    );
    Ok(PrivateEpisode {
        params: params.clone(),
        seed,
        library,
        keys,
        demands,
        shifts,
        broadcast,
        decoded,
        success,
        realized_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::all_vectors;
    use std::collections::HashSet;

    #[test]
    fn keys_singleton_alphabet() {
        let p = SchemeParams::new(1, 3, 0, 1).unwrap();
        assert_eq!(sample_keys(&p, 5).0, vec![1, 1, 1]);
    }

    #[test]
    fn keys_deterministic() {
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        assert_eq!(sample_keys(&p, 11), sample_keys(&p, 11));
    }

    #[test]
    fn keys_roughly_uniform() {
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        let mut counts = [[0u32; 2]; 2];
        let draws = 10_000;
        for seed in 0..draws {
            let k = sample_keys(&p, seed);
            counts[k.0[0] - 1][k.0[1] - 1] += 1;
        }
        for row in counts {
            for c in row {
                let freq = c as f64 / draws as f64;
                assert!((freq - 0.25).abs() < 0.02, "frequency {freq}");
            }
        }
    }

    #[test]
    fn shifts_direct_arithmetic() {
        let c = compute_shifts(&KeyVector(vec![1, 2]), &DemandVector(vec![1, 1]), 2).unwrap();
        assert_eq!(c.0, vec![0, 1]);

        let c = compute_shifts(&KeyVector(vec![2, 1]), &DemandVector(vec![2, 1]), 3).unwrap();
        assert_eq!(c.0, vec![0, 0]);

        let c = compute_shifts(&KeyVector(vec![1]), &DemandVector(vec![2]), 3).unwrap();
        assert_eq!(c.0, vec![2]);

        assert!(compute_shifts(&KeyVector(vec![1]), &DemandVector(vec![1, 1]), 2).is_err());
    }

    #[test]
    fn lifting_blocks() {
        let d = lift_demands(&ShiftVector(vec![0, 1]), 2, 2);
        assert_eq!(d.0, vec![1, 2, 2, 1]);

        let d = lift_demands(&ShiftVector(vec![1]), 3, 1);
        assert_eq!(d.0, vec![3, 1, 2]);

        let d = lift_demands(&ShiftVector(vec![0, 0]), 3, 2);
        assert_eq!(d.0, vec![1, 2, 3, 1, 2, 3]);
    }

    #[test]
    fn shift_map_is_a_bijection() {
        // For fixed demands, s̄ ↦ c̄ is a bijection on [N]^K, and vice versa.
        for n in 1..=4usize {
            for k in 1..=4usize {
                for d in all_vectors(n, k) {
                    let demands = DemandVector(d);
                    let images: HashSet<Vec<usize>> = all_vectors(n, k)
                        .map(|s| compute_shifts(&KeyVector(s), &demands, n).unwrap().0)
                        .collect();
                    assert_eq!(images.len(), n.pow(k as u32));
                }
            }
        }
    }

    #[test]
    fn alignment_invariant() {
        // lifted demand at position (k-1)N + s_k equals d_k, for all (s̄, d̄)
        for n in 1..=4usize {
            for k in 1..=3usize {
                for s in all_vectors(n, k) {
                    for d in all_vectors(n, k) {
                        let keys = KeyVector(s.clone());
                        let demands = DemandVector(d.clone());
                        let c = compute_shifts(&keys, &demands, n).unwrap();
                        let lifted = lift_demands(&c, n, k);
                        for u in 1..=k {
                            assert_eq!(lifted.0[(u - 1) * n + s[u - 1] - 1], d[u - 1]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn placement_virtual_index() {
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        let lib = p.sample_library(3);
        let virt = yma_place(&lib);
        let caches = private_place(&p, &lib, &KeyVector(vec![1, 2]));
        assert_eq!(caches[0].store, virt[0].store); // virtual user 1
        assert_eq!(caches[1].store, virt[3].store); // virtual user 4
        for c in &caches {
            assert_eq!(c.stored_bits(1), 6); // M * F = 1 * 6 bits
        }
    }

    #[test]
    fn delivery_counts_and_rate() {
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        let lib = p.sample_library(1);
        let b =
            private_deliver(&p, &lib, &DemandVector(vec![1, 2]), &KeyVector(vec![2, 1])).unwrap();
        assert_eq!(b.payload.len(), 4); // C(4,3) - C(2,3)

        let p = SchemeParams::new(2, 2, 4, 1).unwrap();
        let lib = p.sample_library(1);
        let b =
            private_deliver(&p, &lib, &DemandVector(vec![1, 2]), &KeyVector(vec![2, 1])).unwrap();
        assert!(b.payload.is_empty());

        let p = SchemeParams::new(2, 2, 1, 1).unwrap();
        let lib = p.sample_library(1);
        let b =
            private_deliver(&p, &lib, &DemandVector(vec![1, 2]), &KeyVector(vec![2, 1])).unwrap();
        assert_eq!(b.payload.len(), 5); // C(4,2) - C(2,2)
    }

    #[test]
    fn broadcast_depends_only_on_shifts_and_world() {
        // recompute the broadcast from (c̄, W̄) without (s̄, d̄)
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        let lib = p.sample_library(17);
        for s in all_vectors(2, 2) {
            for d in all_vectors(2, 2) {
                let keys = KeyVector(s.clone());
                let demands = DemandVector(d.clone());
                let b = private_deliver(&p, &lib, &demands, &keys).unwrap();
                let lifted = lift_demands(&b.header, 2, 2);
                let direct: Vec<Block> = yma_deliver(&lib, &lifted)
                    .into_iter()
                    .map(|(_, x)| x)
                    .collect();
                assert_eq!(b.payload, direct);
            }
        }
    }

    #[test]
    fn decode_all_pairs_small_instances() {
        for t in [1usize, 2] {
            let p = SchemeParams::new(2, 2, t, 1).unwrap();
            let lib = p.sample_library(23 + t as u64);
            for s in all_vectors(2, 2) {
                for d in all_vectors(2, 2) {
                    let keys = KeyVector(s.clone());
                    let demands = DemandVector(d.clone());
                    let caches = private_place(&p, &lib, &keys);
                    let b = private_deliver(&p, &lib, &demands, &keys).unwrap();
                    for k in 1..=2 {
                        let got = private_decode(&p, k, &caches[k - 1], &b).unwrap();
                        assert_eq!(got, lib.file_blocks(d[k - 1]));
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_baseline() {
        let p = SchemeParams::new(3, 2, 0, 4).unwrap();
        let lib = p.sample_library(2);
        assert!(trivial_deliver(&lib, 3).unwrap().is_empty());
        assert_eq!(trivial_deliver(&lib, 0).unwrap().len(), 3);
        assert_eq!(trivial_deliver(&lib, 1).unwrap().len(), 2);
        assert!(trivial_deliver(&lib, 4).is_err());
        assert_eq!(trivial_rate(3, 1), ratio(2, 1));
        assert_eq!(trivial_rate(3, 0), ratio(3, 1));
        assert_eq!(trivial_rate(3, 3), ratio(0, 1));
    }

    #[test]
    fn episode_rates() {
        let p = SchemeParams::new(2, 2, 2, 1).unwrap();
        let e = run_episode(&p, 4).unwrap();
        assert_eq!(e.realized_rate, ratio(2, 3));
        assert!(e.all_succeeded());

        let p = SchemeParams::new(2, 2, 4, 1).unwrap();
        let e = run_episode(&p, 4).unwrap();
        assert_eq!(e.realized_rate, ratio(0, 1));

        let p = SchemeParams::new(2, 2, 3, 1).unwrap();
        let e = run_episode(&p, 4).unwrap();
        assert_eq!(e.realized_rate, ratio(1, 4));
    }

    #[test]
    fn episode_rate_constant_across_pairs() {
        let p = SchemeParams::new(2, 3, 2, 1).unwrap();
        let lib = p.sample_library(9);
        let expected = crate::yma::yma_rate(2, 6, 2).unwrap();
        for s in all_vectors(2, 3) {
            for d in all_vectors(2, 3) {
                let b = private_deliver(&p, &lib, &DemandVector(d), &KeyVector(s.clone())).unwrap();
                assert_eq!(
                    ratio(b.payload_bits(1) as i64, p.file_bits() as i64),
                    expected
                );
            }
        }
    }
}
