//! Counter-based keyed randomness.
//!
//! Every random bit in the crate is a pure function of
//! `(seed, stream, replica, object digest)`. Draws therefore do not depend on
//! the order in which objects are inspected, replicas can be scheduled on any
//! number of workers, and the same uniform is reused across parameter values
//! (common random numbers).

/// SplitMix64 finalizer.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes an integer key sequence under `seed`.
#[inline]
pub fn mix_key(seed: u64, key: &[i64]) -> u64 {
    let mut h = mix64(seed ^ (key.len() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for &x in key {
        h = mix64(h.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ x as u64);
    }
    h
}

/// Named independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    /// Edge bits of the single-graph model.
    Omega = 0x6f6d_6567_6101,
    /// Vertex marks of the single-graph model.
    Alpha = 0x616c_7068_6102,
    /// Copies of quotient edges in the coupling.
    CoupleOmega = 0x636f_6d65_6703,
    /// Copies of cover edges in the coupling.
    CoupleOmegaPrime = 0x636f_6d70_7204,
    /// Acceptance coins of the coupling.
    Acceptance = 0x6163_6365_7005,
    /// Completion of undefined cover-edge bits.
    EtaFill = 0x6574_6166_6906,
    /// Completion of undefined marks.
    AlphaFill = 0x616c_6669_6c07,
    /// Sampling of configurations and instances in property campaigns.
    Instance = 0x696e_7374_6e08,
}

/// Per-(seed, stream, replica) base for keyed draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Keyed {
    base: u64,
}

impl Keyed {
    pub fn new(seed: u64, stream: Stream, replica: u64) -> Self {
        let a = mix64(seed ^ (stream as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
        let b = mix64(a.wrapping_add(replica.wrapping_mul(0xa076_1d64_78bd_642f)));
        Keyed { base: b }
    }

    /// Raw 64-bit draw for object `obj`.
    #[inline]
    pub fn bits(&self, obj: u64) -> u64 {
        mix64(mix64(self.base ^ obj).wrapping_add(0x9e37_79b9_7f4a_7c15))
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&self, obj: u64) -> f64 {
        (self.bits(obj) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(`p`) draw; `p <= 0` is never open and `p >= 1` always.
    #[inline]
    pub fn bernoulli(&self, obj: u64, p: f64) -> bool {
        self.uniform(obj) < p
    }

    /// Uniform on `[0, 1)` for object `obj` and sub-index `k`.
    #[inline]
    pub fn uniform_indexed(&self, obj: u64, k: u64) -> f64 {
        self.uniform(mix64(obj ^ k.wrapping_mul(0xff51_afd7_ed55_8ccd)))
    }
}

/// Small sequential generator for sampling instances, seeded from a keyed base.
#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn keyed(seed: u64, stream: Stream, replica: u64) -> Self {
        SplitMix { state: Keyed::new(seed, stream, replica).base }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.state)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_their_key() {
        let a = Keyed::new(7, Stream::Omega, 3);
        let b = Keyed::new(7, Stream::Omega, 3);
        assert_eq!(a.bits(99), b.bits(99));
        assert_ne!(a.bits(99), Keyed::new(7, Stream::Alpha, 3).bits(99));
        assert_ne!(a.bits(99), Keyed::new(7, Stream::Omega, 4).bits(99));
        assert_ne!(a.bits(99), Keyed::new(8, Stream::Omega, 3).bits(99));
    }

    #[test]
    fn bernoulli_frequency() {
        let k = Keyed::new(1, Stream::Omega, 0);
        let n = 200_000u64;
        let hits = (0..n).filter(|&i| k.bernoulli(mix64(i), 0.3)).count() as f64;
        let sd = (0.3 * 0.7 / n as f64).sqrt();
        assert!((hits / n as f64 - 0.3).abs() < 4.0 * sd);
        assert!(!k.bernoulli(5, 0.0));
        assert!(k.bernoulli(5, 1.0));
    }

    #[test]
    fn below_is_in_range() {
        let mut g = SplitMix::new(3);
        let mut seen = [0usize; 5];
        for _ in 0..5000 {
            seen[g.below(5)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800));
    }
}
