//! The non-private building-block scheme for `N` files and `K'` users:
//! uncoded placement, leader-based delivery, generic GF(2) decoding, and its
//! exact rate. The private scheme instantiates it with `K' = NK` virtual
//! users.

use num::BigRational;

use crate::combinatorics::{binomial, rank_subset, ratio_big, ColexSubsets};
use crate::gf2::GfSystem;
use crate::model::{subsets_containing, Block, CacheContent, FileLibrary};
use crate::{Error, Result};

/// Demand vector of the non-private scheme, 1-based file indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualDemand(pub Vec<usize>);

/// One leader per distinct demanded file: the lowest-index demander.
/// Fixing the tie-break makes transmissions byte-reproducible.
pub fn pick_leaders(demand: &VirtualDemand) -> Vec<usize> {
    let mut seen = Vec::new();
    let mut leaders = Vec::new();
    for (i, &d) in demand.0.iter().enumerate() {
        if !seen.contains(&d) {
            seen.push(d);
            leaders.push(i + 1);
        }
    }
    leaders.sort_unstable();
    leaders
}

/// Uncoded placement: virtual user `u` caches subfile `(i, T)` iff `u ∈ T`.
pub fn yma_place(lib: &FileLibrary) -> Vec<CacheContent> {
    (1..=lib.universe)
        .map(|u| {
            let ranks = subsets_containing(lib.universe, lib.cache_index, u);
            let store = (1..=lib.n_files)
                .map(|file| {
                    ranks
                        .iter()
                        .map(|&r| (r, lib.subfile(file, r).clone()))
                        .collect()
                })
                .collect();
            CacheContent {
                owner: u,
                key: 0,
                store,
            }
        })
        .collect()
}

/// The `(t+1)`-subsets that generate transmissions, in colex order: those
/// meeting the leader set.
pub fn transmitted_subsets(universe: usize, t: usize, leaders: &[usize]) -> Vec<Vec<usize>> {
    ColexSubsets::new(universe, t + 1)
        .filter(|s| s.iter().any(|u| leaders.contains(u)))
        .collect()
}

/// Delivery: for every qualifying subset `S`, the XOR over `u ∈ S` of
/// subfile `(d(u), S∖{u})`.
pub fn yma_deliver(lib: &FileLibrary, demand: &VirtualDemand) -> Vec<(Vec<usize>, Block)> {
    assert_eq!(demand.0.len(), lib.universe);
    let leaders = pick_leaders(demand);
    transmitted_subsets(lib.universe, lib.cache_index, &leaders)
        .into_iter()
        .map(|s| {
            let mut acc = crate::model::zero_block(lib.subfile_bits);
            for &u in &s {
                let rest: Vec<usize> = s.iter().copied().filter(|&v| v != u).collect();
                let rank = rank_subset(lib.universe, &rest)
                    .expect("subset of universe")
                    .rank;
                crate::model::xor_into(&mut acc, lib.subfile(demand.0[u - 1], rank));
            }
            (s, acc)
        })
        .collect()
}

/// Decoding by GF(2) elimination on subfile symbols: unknowns are all
/// uncached subfiles, equations are the delivered blocks with cached subfiles
/// substituted as constants. Returns all subfiles of the demanded file in
/// colex order.
pub fn yma_decode(
    user: usize,
    cache: &CacheContent,
    delivered: &[(Vec<usize>, Block)],
    demand: &VirtualDemand,
    lib_shape: (usize, usize, usize, usize), // (n_files, universe, t, subfile_bits)
) -> Result<Vec<Block>> {
    let (n_files, universe, t, _subfile_bits) = lib_shape;
    let p = crate::combinatorics::binomial_usize(universe, t)
        .ok_or_else(|| Error::Overflow(format!("C({universe}, {t})")))?;
    let wanted = demand.0[user - 1];

    let col_of = |file: usize, rank: usize| (file - 1) * p + rank;
    let mut sys = GfSystem::new(n_files * p);
    for (s, block) in delivered {
        let mut rhs = block.clone();
        let mut cols = Vec::with_capacity(s.len());
        for &u in s {
            let rest: Vec<usize> = s.iter().copied().filter(|&v| v != u).collect();
            let rank = rank_subset(universe, &rest)?.rank;
            let file = demand.0[u - 1];
            match cache.get(file, rank) {
                Some(known) => crate::model::xor_into(&mut rhs, known),
                None => cols.push(col_of(file, rank)),
            }
        }
        sys.add_equation(cols, rhs);
    }

    let missing: Vec<usize> = (0..p).filter(|&r| cache.get(wanted, r).is_none()).collect();
    let needed: Vec<usize> = missing.iter().map(|&r| col_of(wanted, r)).collect();
    let solved = sys.solve(&needed).map_err(|col| Error::Undetermined {
        user,
        file: col / p + 1,
        subfile: col % p,
    })?;

    let mut solved_iter = solved.into_iter();
    Ok((0..p)
        .map(|r| match cache.get(wanted, r) {
            Some(b) => b.clone(),
            None => solved_iter.next().expect("one per missing rank"),
        })
        .collect())
}

/// Worst-case rate of the building block:
/// `(C(K', t+1) - C(K' - min(N, K'), t+1)) / C(K', t)`.
pub fn yma_rate(n_files: usize, k_users: usize, t: usize) -> Result<BigRational> {
    if t > k_users {
        return Err(Error::InvalidParams(format!(
            "t = {t} exceeds K' = {k_users}"
        )));
    }
    let k = k_users as u64;
    let served =
        binomial(k, t as i64 + 1) - binomial(k - n_files.min(k_users) as u64, t as i64 + 1);
    Ok(ratio_big(served, binomial(k, t as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;
    use crate::model::FileLibrary;

    fn lib(n_files: usize, universe: usize, t: usize, b: usize, seed: u64) -> FileLibrary {
        FileLibrary::sample(n_files, universe, t, b, seed)
    }

    #[test]
    fn leaders_lowest_index() {
        assert_eq!(pick_leaders(&VirtualDemand(vec![1, 2, 2, 1])), vec![1, 2]);
        assert_eq!(pick_leaders(&VirtualDemand(vec![3, 3, 3])), vec![1]);
        assert_eq!(pick_leaders(&VirtualDemand(vec![1, 2, 3])), vec![1, 2, 3]);
    }

    #[test]
    fn placement_membership_rule() {
        let lib = lib(2, 4, 2, 1, 5);
        let caches = yma_place(&lib);
        assert_eq!(caches.len(), 4);
        // user 1 caches {T : 1 ∈ T} = {{1,2},{1,3},{1,4}}, ranks {0,1,3}, per file
        let ranks: Vec<usize> = caches[0].store[0].iter().map(|e| e.0).collect();
        assert_eq!(ranks, vec![0, 1, 3]);
        for c in &caches {
            assert_eq!(c.stored_bits(1), 6); // N * C(3,1) = 6 subfiles of 1 bit
        }
    }

    #[test]
    fn placement_degenerate_t() {
        let empty = lib(2, 4, 0, 1, 5);
        for c in yma_place(&empty) {
            assert_eq!(c.stored_bits(1), 0);
        }
        let full = lib(2, 4, 4, 1, 5);
        for c in yma_place(&full) {
            assert_eq!(c.stored_bits(1), 2);
        }
    }

    #[test]
    fn delivery_block_counts() {
        let l = lib(2, 4, 2, 1, 9);
        let d = VirtualDemand(vec![1, 2, 2, 1]);
        assert_eq!(yma_deliver(&l, &d).len(), 4); // C(4,3) - C(2,3)

        let l = lib(2, 4, 1, 1, 9);
        assert_eq!(yma_deliver(&l, &d).len(), 5); // C(4,2) - C(2,2)

        let l = lib(2, 4, 4, 1, 9);
        assert!(yma_deliver(&l, &d).is_empty());
    }

    #[test]
    fn payload_count_identity_all_demands() {
        use crate::combinatorics::binomial_usize;
        let l = lib(2, 4, 2, 1, 13);
        for d in crate::model::all_vectors(2, 4) {
            let demand = VirtualDemand(d);
            let leaders = pick_leaders(&demand);
            let expect =
                binomial_usize(4, 3).unwrap() - binomial_usize(4 - leaders.len(), 3).unwrap();
            assert_eq!(yma_deliver(&l, &demand).len(), expect);
        }
    }

    #[test]
    fn decode_recovers_every_file() {
        for seed in 0..8u64 {
            let l = lib(2, 4, 2, 3, seed);
            let caches = yma_place(&l);
            for d in crate::model::all_vectors(2, 4) {
                let demand = VirtualDemand(d);
                let delivered = yma_deliver(&l, &demand);
                for u in 1..=4 {
                    let got =
                        yma_decode(u, &caches[u - 1], &delivered, &demand, (2, 4, 2, 3)).unwrap();
                    assert_eq!(got, l.file_blocks(demand.0[u - 1]));
                }
            }
        }
    }

    #[test]
    fn decode_from_cache_only_when_everything_cached() {
        let l = lib(2, 3, 3, 1, 3);
        let caches = yma_place(&l);
        let demand = VirtualDemand(vec![2, 1, 2]);
        let got = yma_decode(1, &caches[0], &[], &demand, (2, 3, 3, 1)).unwrap();
        assert_eq!(got, l.file_blocks(2));
    }

    #[test]
    fn decoded_blocks_satisfy_delivered_equations() {
        let l = lib(3, 6, 2, 1, 21);
        let caches = yma_place(&l);
        let demand = VirtualDemand(vec![1, 2, 3, 1, 2, 3]);
        let delivered = yma_deliver(&l, &demand);
        for u in 1..=6 {
            let got = yma_decode(u, &caches[u - 1], &delivered, &demand, (3, 6, 2, 1)).unwrap();
            assert_eq!(got, l.file_blocks(demand.0[u - 1]));
        }
        // substitute truth back into every equation
        for (s, block) in &delivered {
            let mut acc = crate::model::zero_block(1);
            for &u in s {
                let rest: Vec<usize> = s.iter().copied().filter(|&v| v != u).collect();
                let rank = rank_subset(6, &rest).unwrap().rank;
                crate::model::xor_into(&mut acc, l.subfile(demand.0[u - 1], rank));
            }
            assert_eq!(&acc, block);
        }
    }

    #[test]
    fn rate_values() {
        assert_eq!(yma_rate(2, 2, 1).unwrap(), ratio(1, 2));
        assert_eq!(yma_rate(2, 4, 2).unwrap(), ratio(2, 3));
        assert_eq!(yma_rate(3, 5, 5).unwrap(), ratio(0, 1));
        assert!(yma_rate(2, 4, 5).is_err());
    }

    #[test]
    fn rate_identity_with_payload_bits() {
        // payload_bits / F = yma_rate when all N files are demanded
        let l = lib(2, 4, 2, 1, 2);
        let demand = VirtualDemand(vec![1, 2, 2, 1]);
        let payload = yma_deliver(&l, &demand).len();
        let f = l.subpacketization();
        assert_eq!(ratio(payload as i64, f as i64), yma_rate(2, 4, 2).unwrap());
    }
}
