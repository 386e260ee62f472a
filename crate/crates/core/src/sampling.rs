//! Seeded randomness for generic-position sampling.
//!
//! Every randomized routine in this crate takes an explicit `seed: u64` and
//! derives its generator here, so identical inputs and seeds reproduce
//! identical runs bit for bit.  Independent phases of one computation (trial
//! indices, retry rounds) get independent ChaCha streams of the same seed
//! instead of sharing one generator, which keeps results stable when one
//! phase changes how much randomness it consumes.

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Largest integer coordinate handed out by the samplers.
pub const COORD_BOUND: i64 = 1_000_000;

/// Generator for stream `stream` of seed `seed`.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `[1, COORD_BOUND]` as a rational.
pub(crate) fn sample_int_coord<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.random_range(1..=COORD_BOUND)))
}

/// Uniform rational with numerator in `[-COORD_BOUND, COORD_BOUND]` and
/// denominator in `[1, 997]`.  Small denominators keep downstream exact
/// elimination cheap.
pub(crate) fn sample_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num = rng.random_range(-COORD_BOUND..=COORD_BOUND);
    let den = rng.random_range(1..=997i64);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A point in `R^d` with integer coordinates.
pub(crate) fn sample_point<R: Rng>(rng: &mut R, d: usize) -> Vec<BigRational> {
    (0..d).map(|_| sample_int_coord(rng)).collect()
}
