//! Counter-based random streams.
//!
//! Every stochastic quantity is drawn from a ChaCha8 stream addressed by
//! `(master seed, domain, counter)`. A trial's samples therefore depend only
//! on its index, never on which worker ran it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Geometry = 0x6765_6f6d,
    Shadowing = 0x7368_6164,
    SmallScale = 0x736d_616c,
    Waveform = 0x7761_7665,
    Battery = 0x6261_7474,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the ChaCha instance for `(master, domain)`.
pub fn domain_key(master: u64, domain: Domain) -> u64 {
    splitmix64(master ^ splitmix64(domain as u64))
}

/// Stream `counter` of the `(master, domain)` generator.
pub fn stream(master: u64, domain: Domain, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(domain_key(master, domain));
    rng.set_stream(counter);
    rng
}
