use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream reserved for the environment; player `i` uses stream `i + 1`.
pub const ENVIRONMENT_STREAM: u64 = 0;

/// Independent random stream `stream` derived from the master seed. Streams never
/// overlap, so adding a player leaves the existing players' draws untouched.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

pub fn player_rng(master_seed: u64, player: usize) -> ChaCha8Rng {
    stream_rng(master_seed, player as u64 + 1)
}
