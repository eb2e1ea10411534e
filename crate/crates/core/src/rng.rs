//! Counter-based random stream.
//!
//! Every draw is a pure function of `(master_seed, trial, particle, dim,
//! step, purpose)`: the coordinates are folded into a 64-bit state through
//! SplitMix64 finalisation rounds. Trials can therefore run in any order or
//! on any thread, and the Basic and Noisy PSO consume identical `R`/`S`
//! draws under a shared seed.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// What a draw is used for. Part of the stream coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    /// Cognitive factor `R ~ U[0,1]`.
    R = 1,
    /// Social factor `S ~ U[0,1]`.
    S = 2,
    /// Velocity noise `Δ ~ U[-δ/2, δ/2]`.
    Delta = 3,
    InitX = 4,
    InitV = 5,
    /// Free-form auxiliary draws (rejection sampling, experiment set-up).
    Aux = 6,
}

/// SplitMix64 output function.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline(always)]
fn absorb(state: u64, word: u64) -> u64 {
    mix64(state ^ word.wrapping_mul(GOLDEN).wrapping_add(GOLDEN))
}

/// Maps 64 random bits to `[0, 1)` using the top 53 bits.
#[inline(always)]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stream bound to one trial of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    trial: u64,
    // pre-absorbed (seed, trial) prefix
    prefix: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, trial: u64) -> Self {
        let prefix = absorb(mix64(master_seed ^ GOLDEN), trial);
        Self {
            master_seed,
            trial,
            prefix,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    /// Stream for another trial under the same master seed.
    pub fn for_trial(&self, trial: u64) -> Self {
        Self::new(self.master_seed, trial)
    }

    /// Raw 64-bit draw at the given coordinates.
    #[inline(always)]
    pub fn bits(&self, particle: u64, dim: u64, step: u64, purpose: Purpose) -> u64 {
        let mut h = absorb(self.prefix, particle);
        h = absorb(h, dim);
        h = absorb(h, step);
        absorb(h, purpose as u64)
    }

    /// Uniform draw on `[0, 1)`.
    #[inline(always)]
    pub fn uniform(&self, particle: u64, dim: u64, step: u64, purpose: Purpose) -> f64 {
        unit_f64(self.bits(particle, dim, step, purpose))
    }

    /// Uniform draw on `[lo, hi)`.
    #[inline(always)]
    pub fn uniform_in(
        &self,
        lo: f64,
        hi: f64,
        particle: u64,
        dim: u64,
        step: u64,
        purpose: Purpose,
    ) -> f64 {
        lo + (hi - lo) * self.uniform(particle, dim, step, purpose)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_coordinates_identical_draws() {
        let a = RngStream::new(42, 7);
        let b = RngStream::new(42, 7);
        for step in 0..100 {
            assert_eq!(
                a.bits(1, 0, step, Purpose::R),
                b.bits(1, 0, step, Purpose::R)
            );
        }
    }

    #[test]
    fn coordinates_are_separated() {
        let s = RngStream::new(1, 0);
        let base = s.bits(0, 0, 0, Purpose::R);
        assert_ne!(base, s.bits(1, 0, 0, Purpose::R));
        assert_ne!(base, s.bits(0, 1, 0, Purpose::R));
        assert_ne!(base, s.bits(0, 0, 1, Purpose::R));
        assert_ne!(base, s.bits(0, 0, 0, Purpose::S));
        assert_ne!(base, RngStream::new(1, 1).bits(0, 0, 0, Purpose::R));
        assert_ne!(base, RngStream::new(2, 0).bits(0, 0, 0, Purpose::R));
    }

    #[test]
    fn uniform_moments() {
        let s = RngStream::new(2024, 3);
        let n = 200_000u64;
        let (mut sum, mut sum2, mut cross) = (0.0, 0.0, 0.0);
        for k in 0..n {
            let r = s.uniform(0, 0, k, Purpose::R);
            let q = s.uniform(0, 0, k, Purpose::S);
            assert!((0.0..1.0).contains(&r));
            sum += r;
            sum2 += r * r;
            cross += r * q;
        }
        let nf = n as f64;
        // E = 1/2, E[R^2] = 1/3, E[RS] = 1/4; loose 5-sigma bands
        assert!((sum / nf - 0.5).abs() < 5.0 * (1.0 / 12.0f64).sqrt() / nf.sqrt());
        assert!((sum2 / nf - 1.0 / 3.0).abs() < 5.0 * 0.3 / nf.sqrt());
        assert!((cross / nf - 0.25).abs() < 5.0 * 0.25 / nf.sqrt());
    }

    #[test]
    fn unit_interval_endpoints() {
        assert_eq!(unit_f64(0), 0.0);
        assert!(unit_f64(u64::MAX) < 1.0);
    }
}
