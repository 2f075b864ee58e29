//! Synthetic camera-pixel data: Gaussian pedestal noise plus a few uniform
//! signal values.
//!
//! Generation is fully determined by the seed. The stream comes from
//! ChaCha8 seeded with [`rand::SeedableRng::seed_from_u64`]; normal deviates
//! use the Marsaglia polar method (both deviates of each accepted pair are
//! used, in order) and are rounded half away from zero, then clamped to the
//! element width. Signal samples are drawn after all noise samples and the
//! whole vector is then Fisher-Yates shuffled with the same stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ring::{SourceVector, Width};

/// Parameters of the noise-plus-signal mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    /// Mean of the Gaussian noise, in counts.
    pub mu: f64,
    /// Standard deviation of the noise, in counts.
    pub sigma: f64,
    /// Inclusive bounds of the uniform signal.
    pub low: u32,
    pub high: u32,
    /// Number of signal samples.
    pub signal_count: usize,
    /// Total number of samples.
    pub total: usize,
}

impl DistributionSpec {
    pub fn new(
        mu: f64,
        sigma: f64,
        low: u32,
        high: u32,
        signal_count: usize,
        total: usize,
    ) -> Self {
        Self {
            mu,
            sigma,
            low,
            high,
            signal_count,
            total,
        }
    }

    pub fn validate(&self, width: Width) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "mu must be finite, got {}",
                self.mu
            )));
        }
        if self.low > self.high {
            return Err(Error::InvalidSpec(format!(
                "signal range [{}, {}] is empty",
                self.low, self.high
            )));
        }
        if self.signal_count > self.total {
            return Err(Error::InvalidSpec(format!(
                "{} signal samples exceed total {}",
                self.signal_count, self.total
            )));
        }
        if self.high > width.max_value() {
            return Err(Error::ValueOutOfRange {
                value: self.high as u64,
                low: 0,
                high: width.max_value() as u64,
            });
        }
        Ok(())
    }

    /// Same distribution with a different signal count.
    pub fn with_signal_count(mut self, signal_count: usize) -> Self {
        self.signal_count = signal_count;
        self
    }
}

/// Seed of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed of trial `index` in a multi-trial run.
    pub fn for_trial(self, index: u64) -> Seed {
        Seed(self.0.wrapping_add(index))
    }
}

struct PolarNormal {
    spare: Option<f64>,
}

impl PolarNormal {
    fn new() -> Self {
        Self { spare: None }
    }

    fn sample(&mut self, rng: &mut impl Rng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * rng.random::<f64>() - 1.0;
            let v = 2.0 * rng.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * scale);
                return u * scale;
            }
        }
    }
}

/// Draws the mixture and reports which positions hold signal samples.
pub fn generate_labeled(
    spec: &DistributionSpec,
    width: Width,
    seed: Seed,
) -> Result<(SourceVector, Vec<bool>)> {
    spec.validate(width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let max = width.max_value() as f64;
    let mut normal = PolarNormal::new();
    let noise = spec.total - spec.signal_count;

    let mut tagged: Vec<(u32, bool)> = Vec::with_capacity(spec.total);
    for _ in 0..noise {
        let x = (spec.mu + spec.sigma * normal.sample(&mut rng)).round();
        tagged.push((x.clamp(0.0, max) as u32, false));
    }
    for _ in 0..spec.signal_count {
        tagged.push((rng.random_range(spec.low..=spec.high), true));
    }
    tagged.shuffle(&mut rng);

    let (values, labels) = tagged.into_iter().unzip();
    Ok((SourceVector::new(values, width)?, labels))
}

pub fn generate(spec: &DistributionSpec, width: Width, seed: Seed) -> Result<SourceVector> {
    generate_labeled(spec, width, seed).map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

pub fn sample_stats(values: &[u32]) -> Result<SampleStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(SampleStats {
        min: *values.iter().min().unwrap(),
        max: *values.iter().max().unwrap(),
        mean,
        stddev: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_spec() -> DistributionSpec {
        DistributionSpec::new(3000.0, 500.0, 2000, 45000, 4, 1855)
    }

    #[test]
    fn composition() {
        let (v, labels) = generate_labeled(&paper_spec(), Width::W32, Seed(7)).unwrap();
        assert_eq!(v.len(), 1855);
        assert_eq!(labels.iter().filter(|&&s| s).count(), 4);
        for (&x, &signal) in v.iter().zip(&labels) {
            if signal {
                assert!((2000..=45000).contains(&x));
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = generate(&paper_spec(), Width::W32, Seed(11)).unwrap();
        let b = generate(&paper_spec(), Width::W32, Seed(11)).unwrap();
        let c = generate(&paper_spec(), Width::W32, Seed(12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pure_signal() {
        let spec = DistributionSpec::new(3000.0, 500.0, 10, 20, 500, 500);
        let v = generate(&spec, Width::W8, Seed(1)).unwrap();
        assert!(v.iter().all(|x| (10..=20).contains(x)));
    }

    #[test]
    fn narrow_noise() {
        let spec = DistributionSpec::new(100.0, 1.0, 0, 0, 0, 10_000);
        for seed in 0..100 {
            let s = sample_stats(&generate(&spec, Width::W16, Seed(seed)).unwrap()).unwrap();
            assert!(s.min >= 92 && s.max <= 108, "{s:?}");
            assert!(s.max - s.min < 17);
        }
    }

    #[test]
    fn moments() {
        let spec = DistributionSpec::new(3000.0, 500.0, 2000, 45000, 0, 100_000);
        let s = sample_stats(&generate(&spec, Width::W32, Seed(3)).unwrap()).unwrap();
        assert!((s.mean - 3000.0).abs() < 10.0, "{s:?}");
        assert!((s.stddev - 500.0).abs() < 10.0, "{s:?}");
    }

    #[test]
    fn stats_examples() {
        let s = sample_stats(&[1, 2, 3]).unwrap();
        assert_eq!((s.min, s.max, s.mean), (1, 3, 2.0));
        assert_eq!(sample_stats(&[9, 9, 9]).unwrap().stddev, 0.0);
        assert!(matches!(sample_stats(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn invalid_specs() {
        let bad_sigma = DistributionSpec::new(3000.0, 0.0, 0, 10, 1, 10);
        assert!(matches!(
            generate(&bad_sigma, Width::W32, Seed(0)),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            generate(&paper_spec(), Width::W8, Seed(0)),
            Err(Error::ValueOutOfRange { .. })
        ));
        let too_many = paper_spec().with_signal_count(2000);
        assert!(matches!(
            generate(&too_many, Width::W32, Seed(0)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn clamping_at_zero() {
        let spec = DistributionSpec::new(0.0, 5.0, 0, 0, 0, 1000);
        let v = generate(&spec, Width::W8, Seed(5)).unwrap();
        assert!(v.contains(&0));
        assert!(v.iter().all(|&x| x <= 30));
    }
}
