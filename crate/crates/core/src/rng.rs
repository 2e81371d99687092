//! Counter-based random streams.
//!
//! A ChaCha8 keystream is a pure function of (key, stream, position), so
//! `(seed, stream)` pins an entire sample sequence and ensembles can be
//! split across workers by stream index without coordination.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
