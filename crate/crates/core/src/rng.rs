//! Seeded random streams.
//!
//! ChaCha is counter based, so one seed yields independent streams by stream
//! id. Each consumer of randomness draws from its own stream, so changing how
//! one part is sampled never shifts the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Graph = 1,
    BMatrix = 2,
    RMatrix = 3,
    Profile = 4,
    Bayes = 5,
    Sampling = 6,
    Guess = 7,
    Rounding = 8,
}

pub fn seeded(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
