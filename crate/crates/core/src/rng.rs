//! Counter-based random numbers.
//!
//! Philox4x32-10 maps a 128-bit counter and a 64-bit key to 128 random
//! bits with no hidden state, so any draw can be computed directly from its
//! coordinates. The simulation keys the generator with the study seed and
//! addresses draws by (replicate, lane, draw), which makes every replicate
//! reproducible no matter which thread computes it or in what order.

const MUL0: u32 = 0xD251_1F53;
const MUL1: u32 = 0xCD9E_8D57;
const WEYL0: u32 = 0x9E37_79B9;
const WEYL1: u32 = 0xBB67_AE85;
const ROUNDS: usize = 10;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32-10 bijection.
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..ROUNDS {
        if round > 0 {
            k[0] = k[0].wrapping_add(WEYL0);
            k[1] = k[1].wrapping_add(WEYL1);
        }
        let (hi0, lo0) = mulhilo(MUL0, c[0]);
        let (hi1, lo1) = mulhilo(MUL1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Reserved lane for per-replicate bookkeeping draws (the null shuffle).
pub const SHUFFLE_LANE: u32 = u32::MAX;

/// A keyed, stateless generator addressed by (replicate, lane, draw).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: [u32; 2],
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
        }
    }

    pub fn block(&self, replicate: u64, lane: u32, draw: u32) -> [u32; 4] {
        philox4x32(
            [draw, lane, replicate as u32, (replicate >> 32) as u32],
            self.key,
        )
    }

    /// Two independent 64-bit words from one block.
    pub fn words(&self, replicate: u64, lane: u32, draw: u32) -> (u64, u64) {
        let b = self.block(replicate, lane, draw);
        (
            (b[0] as u64) << 32 | b[1] as u64,
            (b[2] as u64) << 32 | b[3] as u64,
        )
    }

    /// Standard normal deviate by the Box–Muller transform of one block.
    pub fn standard_normal(&self, replicate: u64, lane: u32, draw: u32) -> f64 {
        let (a, b) = self.words(replicate, lane, draw);
        // u1 in (0, 1] keeps the logarithm finite
        let u1 = 1.0 - unit_interval(a);
        let u2 = unit_interval(b);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `0..bound` by 64×64→128-bit multiply.
    pub fn below(&self, replicate: u64, lane: u32, draw: u32, bound: u64) -> u64 {
        let (a, _) = self.words(replicate, lane, draw);
        ((a as u128 * bound as u128) >> 64) as u64
    }
}

/// Top 53 bits as a double in [0, 1).
pub fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// SplitMix64 finaliser; derives independent seeds from (seed, index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
