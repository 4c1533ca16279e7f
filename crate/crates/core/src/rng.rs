//! Seed mixing and named random streams.
//!
//! Every consumer of randomness draws from its own stream, derived from a
//! master seed and a fixed purpose tag, so one source can be varied while the
//! others stay frozen. Replica seeds are derived from the master seed with
//! [`replica_seed`]; both use the SplitMix64 finalizer and are bit-exact:
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15            (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//! replica_seed(master, i) = splitmix64(master ^ splitmix64(i))
//! stream_seed(seed, tag)  = splitmix64(seed ^ tag)
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replica_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Purpose tags for the independent random streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Couplings,
    Clocks,
    Coins,
    InitialSpins,
    Coloring,
    Sampler,
}

impl Stream {
    pub fn tag(self) -> u64 {
        let bytes = match self {
            Stream::Couplings => *b"coupling",
            Stream::Clocks => *b"clocks..",
            Stream::Coins => *b"coins...",
            Stream::InitialSpins => *b"initspin",
            Stream::Coloring => *b"coloring",
            Stream::Sampler => *b"sampler.",
        };
        u64::from_be_bytes(bytes)
    }
}

pub fn stream_seed(seed: u64, stream: Stream) -> u64 {
    splitmix64(seed ^ stream.tag())
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, stream))
}

/// A generator for one sub-stream (a clock, a loop) of a purpose stream.
pub fn keyed_rng(seed: u64, stream: Stream, key: u64) -> ChaCha8Rng {
    let mut rng = stream_rng(seed, stream);
    rng.set_stream(key);
    rng
}
