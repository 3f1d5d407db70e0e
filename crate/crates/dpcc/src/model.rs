//! Core data types: scheme parameters, file libraries, demands, keys, caches,
//! and broadcast messages, plus seeded sampling and exhaustive world
//! enumeration.
//!
//! Memory is parameterized by the integer grid index `t = KM`, so cache sizes
//! are exact bit counts and no floating-point memory values exist anywhere.
//! All randomness comes from ChaCha8 seeded with a caller-supplied `u64`, so
//! runs reproduce across platforms.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binomial_usize, ratio, ColexSubsets};
use crate::{Error, Result};

/// Default cap on `N * P * b` for exhaustive world enumeration.
pub const DEFAULT_ENUM_BUDGET_BITS: usize = 24;

/// A `b`-bit subfile, bit-packed little-endian; bits past `b` are zero.
pub type Block = Vec<u8>;

/// Cheap seed mixer for deriving independent sub-seeds.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

pub fn block_bytes(bits: usize) -> usize {
    bits.div_ceil(8)
}

pub fn zero_block(bits: usize) -> Block {
    vec![0u8; block_bytes(bits)]
}

pub fn xor_into(dst: &mut Block, src: &Block) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Parameters of an `(N, K, M)` instance on the memory grid `M = t/K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub n_files: usize,
    pub n_users: usize,
    /// `t = KM`, in `[0, NK]`.
    pub cache_index: usize,
    /// Bits per subfile.
    pub subfile_bits: usize,
    subpacketization: usize,
}

impl SchemeParams {
    /// Validates and derives the instance. `P = C(NK, t)` must fit in memory.
    pub fn new(
        n_files: usize,
        n_users: usize,
        cache_index: usize,
        subfile_bits: usize,
    ) -> Result<Self> {
        if n_files == 0 || n_users == 0 || subfile_bits == 0 {
            return Err(Error::InvalidParams(
                "N, K and subfile bits must be positive".into(),
            ));
        }
        let nk = n_files
            .checked_mul(n_users)
            .ok_or_else(|| Error::Overflow("N*K".into()))?;
        if cache_index > nk {
            return Err(Error::InvalidParams(format!(
                "t = {cache_index} exceeds NK = {nk}"
            )));
        }
        let subpacketization = binomial_usize(nk, cache_index)
            .ok_or_else(|| Error::Overflow(format!("C({nk}, {cache_index})")))?;
        Ok(SchemeParams {
            n_files,
            n_users,
            cache_index,
            subfile_bits,
            subpacketization,
        })
    }

    /// Number of users of the underlying non-private scheme.
    pub fn virtual_users(&self) -> usize {
        self.n_files * self.n_users
    }

    /// `P = C(NK, t)`: subfiles per file.
    pub fn subpacketization(&self) -> usize {
        self.subpacketization
    }

    /// File length in bits, `F = P * b`.
    pub fn file_bits(&self) -> usize {
        self.subpacketization * self.subfile_bits
    }

    /// Memory in files, `M = t/K`.
    pub fn memory(&self) -> BigRational {
        ratio(self.cache_index as i64, self.n_users as i64)
    }

    /// Cached subfiles per user: `N * C(NK-1, t-1)`.
    pub fn cached_subfiles(&self) -> usize {
        if self.cache_index == 0 {
            return 0;
        }
        self.n_files
            * binomial_usize(self.virtual_users() - 1, self.cache_index - 1)
                .expect("smaller than P")
    }

    /// Total random bits of one world: `N * P * b`.
    pub fn world_bits(&self) -> usize {
        self.n_files * self.file_bits()
    }

    /// Seeded uniform library.
    pub fn sample_library(&self, seed: u64) -> FileLibrary {
        FileLibrary::sample(
            self.n_files,
            self.virtual_users(),
            self.cache_index,
            self.subfile_bits,
            seed,
        )
    }
}

/// `N` files, each split into `C(universe, t)` subfiles of `b` bits, indexed
/// by colex rank of the `t`-subset of virtual users that caches the subfile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileLibrary {
    pub n_files: usize,
    pub universe: usize,
    pub cache_index: usize,
    pub subfile_bits: usize,
    /// `data[file][rank]`, files 0-based internally.
    data: Vec<Vec<Block>>,
}

impl FileLibrary {
    pub fn from_blocks(
        n_files: usize,
        universe: usize,
        cache_index: usize,
        subfile_bits: usize,
        data: Vec<Vec<Block>>,
    ) -> Result<Self> {
        let p = binomial_usize(universe, cache_index)
            .ok_or_else(|| Error::Overflow(format!("C({universe}, {cache_index})")))?;
        if data.len() != n_files || data.iter().any(|f| f.len() != p) {
            return Err(Error::InvalidParams("library dimensions mismatch".into()));
        }
        let bytes = block_bytes(subfile_bits);
        if data.iter().flatten().any(|bl| bl.len() != bytes) {
            return Err(Error::InvalidParams("subfile width mismatch".into()));
        }
        Ok(FileLibrary {
            n_files,
            universe,
            cache_index,
            subfile_bits,
            data,
        })
    }

    /// Uniform random library, a deterministic function of `seed` (ChaCha8).
    pub fn sample(
        n_files: usize,
        universe: usize,
        cache_index: usize,
        subfile_bits: usize,
        seed: u64,
    ) -> Self {
        let p = binomial_usize(universe, cache_index).expect("validated by caller");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bytes = block_bytes(subfile_bits);
        let tail_mask = if subfile_bits.is_multiple_of(8) {
            0xffu8
        } else {
            (1u8 << (subfile_bits % 8)) - 1
        };
        let data = (0..n_files)
            .map(|_| {
                (0..p)
                    .map(|_| {
                        let mut bl = vec![0u8; bytes];
                        rng.fill(&mut bl[..]);
                        if let Some(last) = bl.last_mut() {
                            *last &= tail_mask;
                        }
                        bl
                    })
                    .collect()
            })
            .collect();
        FileLibrary {
            n_files,
            universe,
            cache_index,
            subfile_bits,
            data,
        }
    }

    pub fn subpacketization(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Subfile of 1-based `file` at colex `rank`.
    pub fn subfile(&self, file: usize, rank: usize) -> &Block {
        &self.data[file - 1][rank]
    }

    /// All subfiles of 1-based `file` in colex order.
    pub fn file_blocks(&self, file: usize) -> &[Block] {
        &self.data[file - 1]
    }

    /// Raw bit-packed serialization: file-major, then subfile colex order,
    /// each subfile contributing exactly `b` bits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut acc = 0u8;
        let mut fill = 0usize;
        for file in &self.data {
            for bl in file {
                for bit in 0..self.subfile_bits {
                    let v = bl[bit / 8] >> (bit % 8) & 1;
                    acc |= v << fill;
                    fill += 1;
                    if fill == 8 {
                        out.push(acc);
                        acc = 0;
                        fill = 0;
                    }
                }
            }
        }
        if fill > 0 {
            out.push(acc);
        }
        out
    }

    pub fn from_bytes(
        n_files: usize,
        universe: usize,
        cache_index: usize,
        subfile_bits: usize,
        bytes: &[u8],
    ) -> Result<Self> {
        let p = binomial_usize(universe, cache_index)
            .ok_or_else(|| Error::Overflow(format!("C({universe}, {cache_index})")))?;
        let total_bits = n_files * p * subfile_bits;
        if bytes.len() != total_bits.div_ceil(8) {
            return Err(Error::InvalidParams(format!(
                "expected {} bytes, got {}",
                total_bits.div_ceil(8),
                bytes.len()
            )));
        }
        let mut cursor = 0usize;
        let mut read_bit = || {
            let v = bytes[cursor / 8] >> (cursor % 8) & 1;
            cursor += 1;
            v
        };
        let data = (0..n_files)
            .map(|_| {
                (0..p)
                    .map(|_| {
                        let mut bl = zero_block(subfile_bits);
                        for bit in 0..subfile_bits {
                            bl[bit / 8] |= read_bit() << (bit % 8);
                        }
                        bl
                    })
                    .collect()
            })
            .collect();
        FileLibrary::from_blocks(n_files, universe, cache_index, subfile_bits, data)
    }

    /// The library whose concatenated bits equal `index` (little-endian), used
    /// for exhaustive world enumeration.
    pub fn from_world_index(
        n_files: usize,
        universe: usize,
        cache_index: usize,
        subfile_bits: usize,
        index: u64,
    ) -> Self {
        let p = binomial_usize(universe, cache_index).expect("validated by caller");
        let mut cursor = 0usize;
        let data = (0..n_files)
            .map(|_| {
                (0..p)
                    .map(|_| {
                        let mut bl = zero_block(subfile_bits);
                        for bit in 0..subfile_bits {
                            bl[bit / 8] |= ((index >> cursor & 1) as u8) << (bit % 8);
                            cursor += 1;
                        }
                        bl
                    })
                    .collect()
            })
            .collect();
        FileLibrary {
            n_files,
            universe,
            cache_index,
            subfile_bits,
            data,
        }
    }
}

/// Iterator over every possible library of an instance, exactly once.
pub struct WorldIter {
    params: SchemeParams,
    next: u64,
    total: u64,
}

/// All `2^(N*P*b)` libraries; errors when the bit count exceeds `budget_bits`.
pub fn enumerate_worlds(params: &SchemeParams, budget_bits: usize) -> Result<WorldIter> {
    let bits = params.world_bits();
    if bits > budget_bits {
        return Err(Error::BudgetExceeded {
            needed: bits,
            budget: budget_bits,
        });
    }
    Ok(WorldIter {
        params: params.clone(),
        next: 0,
        total: 1u64 << bits,
    })
}

impl Iterator for WorldIter {
    type Item = FileLibrary;

    fn next(&mut self) -> Option<FileLibrary> {
        if self.next == self.total {
            return None;
        }
        let idx = self.next;
        self.next += 1;
        Some(FileLibrary::from_world_index(
            self.params.n_files,
            self.params.virtual_users(),
            self.params.cache_index,
            self.params.subfile_bits,
            idx,
        ))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.total - self.next) as usize;
        (rem, Some(rem))
    }
}

/// The `K` demands, 1-based file indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(pub Vec<usize>);

/// The `K` shared keys, 1-based values in `[N]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyVector(pub Vec<usize>);

impl DemandVector {
    pub fn new(d: Vec<usize>, n_files: usize) -> Result<Self> {
        check_entries(&d, n_files, "demand")?;
        Ok(DemandVector(d))
    }

    /// All demands except user `k` (1-based), in user order.
    pub fn without(&self, k: usize) -> Vec<usize> {
        let mut v = self.0.clone();
        v.remove(k - 1);
        v
    }
}

impl KeyVector {
    pub fn new(s: Vec<usize>, n_files: usize) -> Result<Self> {
        check_entries(&s, n_files, "key")?;
        Ok(KeyVector(s))
    }
}

fn check_entries(v: &[usize], n_files: usize, what: &str) -> Result<()> {
    match v.iter().find(|&&x| x == 0 || x > n_files) {
        Some(&x) => Err(Error::OutOfRange(format!(
            "{what} value {x} not in [1, {n_files}]"
        ))),
        None => Ok(()),
    }
}

/// All vectors in `[n]^k`, lexicographic, first coordinate fastest.
pub fn all_vectors(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (n as u64).pow(k as u32);
    (0..total).map(move |mut idx| {
        (0..k)
            .map(|_| {
                let v = (idx % n as u64) as usize + 1;
                idx /= n as u64;
                v
            })
            .collect()
    })
}

/// One user's cache: the planted key plus, per file, the cached subfiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContent {
    /// 1-based user index.
    pub owner: usize,
    /// Key `s_k` in `[N]`; 0 for caches of the non-private scheme.
    pub key: usize,
    /// `store[file]` is sorted by subfile rank; files 0-based.
    pub store: Vec<Vec<(usize, Block)>>,
}

impl CacheContent {
    /// Cached subfile of 1-based `file` at `rank`, if present.
    pub fn get(&self, file: usize, rank: usize) -> Option<&Block> {
        let row = &self.store[file - 1];
        row.binary_search_by_key(&rank, |e| e.0)
            .ok()
            .map(|i| &row[i].1)
    }

    /// Total stored payload bits (key excluded).
    pub fn stored_bits(&self, subfile_bits: usize) -> usize {
        self.store.iter().map(Vec::len).sum::<usize>() * subfile_bits
    }

    /// Canonical byte encoding of everything user `k` sees in its cache:
    /// the key and every cached (rank, block) pair.
    pub fn digest(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.key as u64).to_le_bytes());
        for row in &self.store {
            for (rank, bl) in row {
                out.extend_from_slice(&(*rank as u64).to_le_bytes());
                out.extend_from_slice(bl);
            }
        }
        out
    }
}

/// The per-user shifts `c_k = (s_k - d_k) mod N`, broadcast in the clear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftVector(pub Vec<usize>);

impl ShiftVector {
    pub fn new(c: Vec<usize>, n_files: usize) -> Result<Self> {
        match c.iter().find(|&&x| x >= n_files) {
            Some(&x) => Err(Error::OutOfRange(format!(
                "shift {x} not in [0, {n_files})"
            ))),
            None => Ok(ShiftVector(c)),
        }
    }

    /// Header wire form: `K` values of `ceil(log2 N)` bits each, user-major.
    /// Header bits are excluded from the rate.
    pub fn header_bits(&self, n_files: usize) -> Vec<u8> {
        let width = if n_files <= 1 {
            0
        } else {
            (usize::BITS - (n_files - 1).leading_zeros()) as usize
        };
        let mut out = Vec::new();
        let mut acc = 0u8;
        let mut fill = 0usize;
        for &c in &self.0 {
            for bit in 0..width {
                acc |= ((c >> bit & 1) as u8) << fill;
                fill += 1;
                if fill == 8 {
                    out.push(acc);
                    acc = 0;
                    fill = 0;
                }
            }
        }
        if fill > 0 {
            out.push(acc);
        }
        out
    }
}

/// The private scheme's broadcast: cleartext shifts plus one XOR block per
/// transmitted `(t+1)`-subset, in colex order of transmitted subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastMessage {
    pub header: ShiftVector,
    pub payload: Vec<Block>,
}

impl BroadcastMessage {
    pub fn payload_bits(&self, subfile_bits: usize) -> usize {
        self.payload.len() * subfile_bits
    }
}

/// Subsets of the universe containing `user`, as colex ranks — the uncoded
/// placement rule of the building-block scheme.
pub fn subsets_containing(universe: usize, t: usize, user: usize) -> Vec<usize> {
    ColexSubsets::new(universe, t)
        .enumerate()
        .filter(|(_, s)| s.contains(&user))
        .map(|(r, _)| r)
        .collect()
}
