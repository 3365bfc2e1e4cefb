//! BPSK/AWGN transmission, channel LLRs and fixed-point quantization.
//!
//! LLRs are kept in sign-magnitude form with `Q_LLR = 6` bits (one sign bit,
//! five magnitude bits), matching the decoder's saturating arithmetic. Path
//! metrics elsewhere use `Q_PM = 8` bits.

use crate::polar::CodeSpec;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// LLR quantization width in bits (sign plus magnitude).
pub const Q_LLR: usize = 6;
/// Largest representable LLR magnitude, `2^(Q_LLR-1) - 1`.
pub const LLR_MAG_MAX: u8 = (1 << (Q_LLR - 1)) - 1;

/// Path-metric quantization width in bits.
pub const Q_PM: usize = 8;
/// Saturation value of a path metric.
pub const PM_MAX: u32 = (1 << Q_PM) - 1;

/// Unsigned saturating path metric, clamped to [`PM_MAX`].
pub type Metric = u32;

/// Saturating metric addition.
#[inline]
pub fn pm_sat_add(a: Metric, b: Metric) -> Metric {
    (a + b).min(PM_MAX)
}

/// Quantized sign-magnitude log-likelihood ratio.
///
/// Positive sign means the zero hypothesis is more likely. The hard decision
/// follows the convention that only a strictly positive LLR decodes to zero,
/// so both signed zeros decide for one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Llr {
    neg: bool,
    mag: u8,
}

impl Llr {
    #[inline]
    pub fn new(neg: bool, mag: u8) -> Self {
        debug_assert!(mag <= LLR_MAG_MAX);
        Llr { neg, mag: mag.min(LLR_MAG_MAX) }
    }

    /// Builds from a signed integer value, saturating the magnitude.
    #[inline]
    pub fn from_value(v: i32) -> Self {
        Llr {
            neg: v < 0,
            mag: (v.unsigned_abs()).min(LLR_MAG_MAX as u32) as u8,
        }
    }

    #[inline]
    pub fn sign_negative(self) -> bool {
        self.neg
    }

    #[inline]
    pub fn magnitude(self) -> u8 {
        self.mag
    }

    /// Signed integer value in [-31, 31].
    #[inline]
    pub fn value(self) -> i32 {
        let m = self.mag as i32;
        if self.neg {
            -m
        } else {
            m
        }
    }

    /// Hard decision: 0 only for a strictly positive LLR, 1 otherwise.
    #[inline]
    pub fn theta(self) -> u8 {
        if !self.neg && self.mag > 0 {
            0
        } else {
            1
        }
    }
}

/// Symmetric saturating quantizer: sign from the real value, magnitude
/// rounded half away from zero and clamped.
///
/// NaN saturates positive and is reported on stderr.
pub fn quantize(l: f64, scale: f64) -> Llr {
    if l.is_nan() {
        eprintln!("warning: quantize: NaN input, saturating positive");
        return Llr::new(false, LLR_MAG_MAX);
    }
    let mag = (l.abs() * scale).round().min(LLR_MAG_MAX as f64) as u8;
    Llr::new(l < 0.0, mag)
}

/// Quantizes a whole frame of real LLRs.
pub fn quantize_frame(llrs: &[f64], scale: f64) -> Vec<Llr> {
    llrs.iter().map(|&l| quantize(l, scale)).collect()
}

/// One transmitted frame: codeword, real channel LLRs and the noise stream
/// that produced them.
#[derive(Debug, Clone)]
pub struct ChannelFrame {
    pub tx_bits: Vec<u8>,
    pub rx_llrs: Vec<f64>,
    pub ebn0_db: f64,
    pub noise_seed: u64,
}

/// BPSK maps bit 0 to +1 and bit 1 to -1; AWGN with variance
/// `1/(2 R 10^(ebn0/10))`; the real LLR of sample `y` is `2 y / sigma^2`.
///
/// The noise stream is fully determined by `noise_seed`, so a frame can be
/// reproduced from `(tx_bits, ebn0_db, noise_seed)` alone.
pub fn transmit(x: &[u8], ebn0_db: f64, rate: f64, noise_seed: u64) -> ChannelFrame {
    let sigma2 = noise_variance(ebn0_db, rate);
    let mut rng = ChaCha12Rng::seed_from_u64(noise_seed);
    let rx_llrs = x
        .iter()
        .map(|&b| {
            let s = if b == 0 { 1.0 } else { -1.0 };
            let n: f64 = rng.sample(StandardNormal);
            let y = s + n * sigma2.sqrt();
            2.0 * y / sigma2
        })
        .collect();
    ChannelFrame {
        tx_bits: x.to_vec(),
        rx_llrs,
        ebn0_db,
        noise_seed,
    }
}

/// Noise variance for BPSK at the given `Eb/N0` and code rate.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// Derives the per-frame RNG stream from the sweep master seed, so results
/// do not depend on how frames are distributed over workers.
pub fn frame_seed(master_seed: u64, frame_index: u64) -> u64 {
    // splitmix64 over the pair
    let mut z = master_seed
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(frame_index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Encodes and transmits a random message frame of the given spec, returning
/// the source word and the channel frame.
pub fn random_frame(
    spec: &CodeSpec,
    ebn0_db: f64,
    master_seed: u64,
    frame_index: u64,
) -> Result<(Vec<u8>, ChannelFrame)> {
    let seed = frame_seed(master_seed, frame_index);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let msg: Vec<u8> = (0..spec.k() - spec.crc_len())
        .map(|_| rng.gen_range(0..=1u8))
        .collect();
    let u = spec.source_word(&msg)?;
    let x = spec.encode(&u)?;
    // Independent sub-stream for the noise.
    let noise_seed = rng.gen::<u64>();
    Ok((u, transmit(&x, ebn0_db, spec.rate(), noise_seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(0.0, 1.0), Llr::new(false, 0));
        assert_eq!(quantize(-100.0, 1.0), Llr::new(true, 31));
        // round half away from zero
        assert_eq!(quantize(3.4, 1.0), Llr::new(false, 3));
        assert_eq!(quantize(3.5, 1.0), Llr::new(false, 4));
        assert_eq!(quantize(-3.5, 1.0), Llr::new(true, 4));
    }

    proptest::proptest! {
        #[test]
        fn quantize_is_odd(l in -100.0f64..100.0, scale in 0.25f64..4.0) {
            let q = quantize(l, scale);
            let qn = quantize(-l, scale);
            proptest::prop_assert_eq!(q.magnitude(), qn.magnitude());
            if q.magnitude() > 0 && l != 0.0 {
                proptest::prop_assert_ne!(q.sign_negative(), qn.sign_negative());
            }
        }

        #[test]
        fn quantize_is_monotone_in_magnitude(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            proptest::prop_assert!(quantize(lo, 1.0).magnitude() <= quantize(hi, 1.0).magnitude());
        }
    }

    #[test]
    fn theta_zero_decodes_to_one() {
        assert_eq!(Llr::new(false, 0).theta(), 1);
        assert_eq!(Llr::new(true, 0).theta(), 1);
        assert_eq!(Llr::new(false, 1).theta(), 0);
        assert_eq!(Llr::new(true, 1).theta(), 1);
    }

    #[test]
    fn noiseless_limit_preserves_signs() {
        let bits: Vec<u8> = (0..64).map(|i| (i % 3 == 0) as u8).collect();
        let fr = transmit(&bits, 60.0, 0.5, 7);
        for (b, l) in bits.iter().zip(&fr.rx_llrs) {
            assert_eq!(*b == 1, *l < 0.0);
        }
    }

    #[test]
    fn transmit_is_deterministic_in_seed() {
        let bits = vec![0u8; 32];
        let a = transmit(&bits, 2.0, 0.5, 42);
        let b = transmit(&bits, 2.0, 0.5, 42);
        assert_eq!(a.rx_llrs, b.rx_llrs);
        let c = transmit(&bits, 2.0, 0.5, 43);
        assert_ne!(a.rx_llrs, c.rx_llrs);
    }

    #[test]
    fn llr_mean_matches_gaussian_moment() {
        // E[2y/sigma^2 | bit 0] = 2/sigma^2, Var = 4/sigma^2.
        let n = 100_000usize;
        let ebn0 = 2.0;
        let sigma2 = noise_variance(ebn0, 0.5);
        let bits = vec![0u8; n];
        let fr = transmit(&bits, ebn0, 0.5, 11);
        let mean = fr.rx_llrs.iter().sum::<f64>() / n as f64;
        let expect = 2.0 / sigma2;
        let se = (4.0 / sigma2 / n as f64).sqrt();
        assert!(
            (mean - expect).abs() < 3.0 * se,
            "mean {mean} vs {expect} (se {se})"
        );
    }
}
