//! Circularly-symmetric complex Gaussian sampling and deterministic
//! stream derivation.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::numkernel::ComplexVector;

/// Draw `n` iid samples of CN(0, `variance`): real and imaginary parts are
/// independent N(0, variance/2), so E|z|^2 = variance.
pub fn sample_cn(n: usize, variance: f64, rng: &mut impl Rng) -> Result<ComplexVector> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::DomainError("sample_cn requires finite variance > 0"));
    }
    let normal = Normal::new(0.0, (variance / 2.0).sqrt())
        .map_err(|_| Error::DomainError("bad normal parameters"))?;
    let entries = (0..n)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    Ok(ComplexVector::new(entries))
}

/// Derive an independent ChaCha8 stream from a base seed and a label.
///
/// Mixing is splitmix64-style so nearby labels give unrelated streams.
/// Same (seed, label) always yields the same stream.
pub fn substream(seed: u64, label: u64) -> ChaCha8Rng {
    let mut state = [0u8; 32];
    let mut x = seed;
    for (i, chunk) in state.chunks_mut(8).enumerate() {
        x = mix64(x ^ mix64(label.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(state)
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_variance() {
        let mut rng = substream(1, 1);
        assert!(sample_cn(4, 0.0, &mut rng).is_err());
        assert!(sample_cn(4, -1.0, &mut rng).is_err());
        assert!(sample_cn(4, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn moments_match_circular_gaussian() {
        let mut rng = substream(2024, 0x5A);
        let n = 200_000;
        let v = sample_cn(n, 3.0, &mut rng).unwrap();
        let mean: Complex64 = v.entries.iter().sum::<Complex64>() / n as f64;
        let pow: f64 = v.entries.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        // Pseudo-variance E[z^2] vanishes for circular symmetry.
        let pseudo: Complex64 = v.entries.iter().map(|z| z * z).sum::<Complex64>() / n as f64;
        // n = 2e5 draws: std of mean ~ sqrt(3/n) ~ 0.0039, allow 5 sigma.
        assert!(mean.norm() < 0.02, "mean {mean}");
        assert!((pow - 3.0).abs() < 0.06, "power {pow}");
        assert!(pseudo.norm() < 0.03, "pseudo-variance {pseudo}");
    }

    #[test]
    fn magnitude_squared_is_exponential() {
        // |z|^2 / variance ~ Exp(1); chi-square GOF against 20 equiprobable
        // bins. Critical value chi2(0.999, df = 19) = 43.82019596451753.
        let mut rng = substream(77, 0xF00D);
        let n = 100_000usize;
        let v = sample_cn(n, 2.0, &mut rng).unwrap();
        let bins = 20usize;
        let mut counts = vec![0usize; bins];
        for z in &v.entries {
            let u = 1.0 - (-z.norm_sqr() / 2.0).exp(); // CDF value in [0,1)
            let k = ((u * bins as f64) as usize).min(bins - 1);
            counts[k] += 1;
        }
        let expect = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expect;
                d * d / expect
            })
            .sum();
        assert!(chi2 < 43.82019596451753, "chi2 = {chi2}");
    }

    #[test]
    fn substream_is_deterministic_and_label_sensitive() {
        let a1: Vec<u64> = {
            let mut r = substream(9, 4);
            (0..4).map(|_| r.gen()).collect()
        };
        let a2: Vec<u64> = {
            let mut r = substream(9, 4);
            (0..4).map(|_| r.gen()).collect()
        };
        let b: Vec<u64> = {
            let mut r = substream(9, 5);
            (0..4).map(|_| r.gen()).collect()
        };
        let c: Vec<u64> = {
            let mut r = substream(10, 4);
            (0..4).map(|_| r.gen()).collect()
        };
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
        assert_ne!(a1, c);
    }
}
