//! Abstraction over place/deliver/decode, so the verifier can certify the
//! general construction, the hand-crafted fixture, and the negative controls
//! through one interface.

use crate::model::{
    Block, BroadcastMessage, CacheContent, DemandVector, FileLibrary, KeyVector, SchemeParams,
};
use crate::private::{private_decode, private_deliver, private_place};
use crate::Result;

/// What the broadcast looks like on the wire for verification purposes: a
/// header (anything sent in the clear besides the coded payload) and the
/// payload blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireBroadcast {
    pub message: BroadcastMessage,
    /// Extra cleartext header bytes, empty for honest schemes.
    pub extra_header: Vec<u8>,
}

impl WireBroadcast {
    /// Canonical bytes of everything a user observes on the channel.
    pub fn digest(&self, n_files: usize) -> Vec<u8> {
        let mut out = self.message.header.header_bits(n_files);
        out.extend_from_slice(&self.extra_header);
        for bl in &self.message.payload {
            out.extend_from_slice(bl);
        }
        out
    }
}

/// A complete caching scheme under test.
pub trait CachingScheme: Sync {
    fn n_files(&self) -> usize;
    fn n_users(&self) -> usize;
    fn subfile_bits(&self) -> usize;
    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent>;
    fn deliver(&self, lib: &FileLibrary, demands: &DemandVector, keys: &KeyVector)
        -> WireBroadcast;
    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>>;
}

/// The general lifted construction at given parameters.
pub struct GeneralScheme {
    pub params: SchemeParams,
}

impl GeneralScheme {
    pub fn new(params: SchemeParams) -> Self {
        GeneralScheme { params }
    }
}

impl CachingScheme for GeneralScheme {
    fn n_files(&self) -> usize {
        self.params.n_files
    }

    fn n_users(&self) -> usize {
        self.params.n_users
    }

    fn subfile_bits(&self) -> usize {
        self.params.subfile_bits
    }

    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent> {
        private_place(&self.params, lib, keys)
    }

    fn deliver(
        &self,
        lib: &FileLibrary,
        demands: &DemandVector,
        keys: &KeyVector,
    ) -> WireBroadcast {
        WireBroadcast {
            message: private_deliver(&self.params, lib, demands, keys)
                .expect("keys and demands have matching length"),
            extra_header: Vec::new(),
        }
    }

    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>> {
        private_decode(&self.params, user, cache, &broadcast.message)
    }
}

/// Negative control: same construction, but the broadcast carries the demand
/// vector in the clear. Decodes fine; privacy must fail.
pub struct CleartextDemandScheme {
    pub inner: GeneralScheme,
}

impl CleartextDemandScheme {
    pub fn new(params: SchemeParams) -> Self {
        CleartextDemandScheme {
            inner: GeneralScheme::new(params),
        }
    }
}

impl CachingScheme for CleartextDemandScheme {
    fn n_files(&self) -> usize {
        self.inner.n_files()
    }

    fn n_users(&self) -> usize {
        self.inner.n_users()
    }

    fn subfile_bits(&self) -> usize {
        self.inner.subfile_bits()
    }

    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent> {
        self.inner.place(lib, keys)
    }

    fn deliver(
        &self,
        lib: &FileLibrary,
        demands: &DemandVector,
        keys: &KeyVector,
    ) -> WireBroadcast {
        let mut w = self.inner.deliver(lib, demands, keys);
        w.extra_header = demands.0.iter().map(|&d| d as u8).collect();
        w
    }

    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>> {
        self.inner.decode(user, cache, broadcast)
    }
}

/// Negative control: drops one payload block from every broadcast. Some user
/// must fail to decode.
pub struct DropBlockScheme {
    pub inner: GeneralScheme,
    pub drop_index: usize,
}

impl DropBlockScheme {
    pub fn new(params: SchemeParams, drop_index: usize) -> Self {
        DropBlockScheme {
            inner: GeneralScheme::new(params),
            drop_index,
        }
    }
}

impl CachingScheme for DropBlockScheme {
    fn n_files(&self) -> usize {
        self.inner.n_files()
    }

    fn n_users(&self) -> usize {
        self.inner.n_users()
    }

    fn subfile_bits(&self) -> usize {
        self.inner.subfile_bits()
    }

    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent> {
        self.inner.place(lib, keys)
    }

    fn deliver(
        &self,
        lib: &FileLibrary,
        demands: &DemandVector,
        keys: &KeyVector,
    ) -> WireBroadcast {
        let mut w = self.inner.deliver(lib, demands, keys);
        if self.drop_index < w.message.payload.len() {
            w.message.payload.remove(self.drop_index);
        }
        w
    }

    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>> {
        self.inner.decode(user, cache, broadcast)
    }
}

/// Negative control: flips one payload bit in every broadcast.
pub struct FlipBitScheme {
    pub inner: GeneralScheme,
    pub block_index: usize,
}

impl FlipBitScheme {
    pub fn new(params: SchemeParams, block_index: usize) -> Self {
        FlipBitScheme {
            inner: GeneralScheme::new(params),
            block_index,
        }
    }
}

impl CachingScheme for FlipBitScheme {
    fn n_files(&self) -> usize {
        self.inner.n_files()
    }

    fn n_users(&self) -> usize {
        self.inner.n_users()
    }

    fn subfile_bits(&self) -> usize {
        self.inner.subfile_bits()
    }

    fn place(&self, lib: &FileLibrary, keys: &KeyVector) -> Vec<CacheContent> {
        self.inner.place(lib, keys)
    }

    fn deliver(
        &self,
        lib: &FileLibrary,
        demands: &DemandVector,
        keys: &KeyVector,
    ) -> WireBroadcast {
        let mut w = self.inner.deliver(lib, demands, keys);
        if let Some(bl) = w.message.payload.get_mut(self.block_index) {
            bl[0] ^= 1;
        }
        w
    }

    fn decode(
        &self,
        user: usize,
        cache: &CacheContent,
        broadcast: &WireBroadcast,
    ) -> Result<Vec<Block>> {
        self.inner.decode(user, cache, broadcast)
    }
}
