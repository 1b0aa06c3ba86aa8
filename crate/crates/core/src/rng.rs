//! Deterministic random streams.
//!
//! Every randomized operation takes `&mut impl RngCore`; callers that need
//! reproducibility build one of these from a `u64` seed and derive independent
//! child streams for each actor or call site.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Seeds a fresh stream from the operating system.
pub fn from_entropy() -> StreamRng {
    ChaCha20Rng::from_os_rng()
}

/// Splits off an independent stream; the parent advances by 32 bytes.
pub fn child<R: RngCore + ?Sized>(parent: &mut R) -> StreamRng {
    let mut seed = [0u8; 32];
    parent.fill_bytes(&mut seed);
    ChaCha20Rng::from_seed(seed)
}
