//! Deterministic hash map aliases.
//!
//! Enumeration order and tick counts must be reproducible across runs, so
//! all maps use a fixed-seed FNV-1a hasher instead of a randomly keyed
//! one. Keys are small (compressed ids and short id tuples), where FNV is
//! also fast.

use core::hash::{BuildHasherDefault, Hasher};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a, fixed seed.
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(FNV_OFFSET)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        let mut h = self.0;
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
        self.0 = h;
    }
}

pub type Map<K, V> = hashbrown::HashMap<K, V, BuildHasherDefault<Fnv64>>;
pub type Set<K> = hashbrown::HashSet<K, BuildHasherDefault<Fnv64>>;
