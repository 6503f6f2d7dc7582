//! Seeded synthetic time-series generators.
//!
//! Randomness comes from ChaCha8 streams: every series draws from its own
//! substream derived with [`mix_seed`] (a SplitMix64 finalizer), so instance
//! `k` of class `c` is the same regardless of how many other series a
//! database holds.
//!
//! Families and their constants:
//!
//! * `random-walk`: `x_1 = 0`, `x_i = x_{i-1} + N(0,1)`.
//! * `white-noise`: `x_i = N(0,1)`.
//! * `cbf` (cylinder / bell / funnel, 3 classes, default length 128):
//!   a plateau / rising ramp / falling ramp of height `6 + N(0,1)` over a
//!   random span — onset uniform in `[n/8, n/4]`, duration uniform in
//!   `[n/4, 3n/4]` — plus unit Gaussian noise everywhere.
//! * `control-chart` (6 classes, default length 60): baseline
//!   `30 + 2 * U(-3,3)` plus, per class: nothing; a sine of amplitude
//!   `U(10,15)` and period `U(10,15)`; a trend `±U(0.2,0.5) * t`; or a step
//!   `±U(7.5,20)` starting at a point uniform in `[n/3, 2n/3]`.
//! * `waveform` (3 classes, default length 21): a `u : (1-u)` convex
//!   combination (`u` uniform) of two of three triangular bumps of height 6
//!   centered at positions 7, 15 and 11 of the 21-sample grid, plus unit
//!   Gaussian noise; other lengths rescale the grid linearly.
//! * `wave-noise` (3 classes, default length 40): a 21-sample waveform
//!   followed by 19 pure `N(0,1)` samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Sample;
use crate::series::{Dataset, TimeSeries};

/// Generator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    RandomWalk,
    WhiteNoise,
    Cbf,
    ControlChart,
    Waveform,
    WaveNoise,
}

impl Family {
    /// Number of classes, `None` for the unlabeled families.
    pub fn class_count(self) -> Option<u32> {
        match self {
            Family::RandomWalk | Family::WhiteNoise => None,
            Family::Cbf | Family::Waveform | Family::WaveNoise => Some(3),
            Family::ControlChart => Some(6),
        }
    }

    pub fn default_length(self) -> usize {
        match self {
            Family::RandomWalk => 256,
            Family::WhiteNoise => 100,
            Family::Cbf => 128,
            Family::ControlChart => 60,
            Family::Waveform => 21,
            Family::WaveNoise => 40,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomWalk => "random-walk",
            Family::WhiteNoise => "white-noise",
            Family::Cbf => "cbf",
            Family::ControlChart => "control-chart",
            Family::Waveform => "waveform",
            Family::WaveNoise => "wave-noise",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "random-walk" | "rw" => Ok(Family::RandomWalk),
            "white-noise" | "wn" => Ok(Family::WhiteNoise),
            "cbf" => Ok(Family::Cbf),
            "control-chart" | "cc" => Ok(Family::ControlChart),
            "waveform" => Ok(Family::Waveform),
            "wave-noise" => Ok(Family::WaveNoise),
            other => Err(Error::InvalidParameter(format!(
                "unknown family {other:?}"
            ))),
        }
    }
}

/// Everything needed to generate one series deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    /// 1-based class id for the labeled families; `None` otherwise.
    pub class_id: Option<u32>,
    pub n: usize,
    pub seed: u64,
}

/// SplitMix64 finalizer; derives independent substream seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn validated_class(family: Family, class_id: Option<u32>) -> Result<u32> {
    match (family.class_count(), class_id) {
        (None, None) => Ok(0),
        (None, Some(c)) => Err(Error::InvalidParameter(format!(
            "family {family} has no classes, got class {c}"
        ))),
        (Some(_), None) => Err(Error::InvalidParameter(format!(
            "family {family} requires a class id"
        ))),
        (Some(k), Some(c)) if (1..=k).contains(&c) => Ok(c),
        (Some(k), Some(c)) => Err(Error::InvalidParameter(format!(
            "class {c} out of range 1..={k} for family {family}"
        ))),
    }
}

/// Generate one series; bit-identical for identical specs.
pub fn generate<T: Sample>(spec: &GeneratorSpec) -> Result<TimeSeries<T>> {
    if spec.n == 0 {
        return Err(Error::EmptyInput("generated series length must be >= 1"));
    }
    let class = validated_class(spec.family, spec.class_id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = match spec.family {
        Family::RandomWalk => random_walk(spec.n, &mut rng),
        Family::WhiteNoise => white_noise(spec.n, &mut rng),
        Family::Cbf => cbf(spec.n, class, &mut rng),
        Family::ControlChart => control_chart(spec.n, class, &mut rng),
        Family::Waveform => waveform(spec.n, class, &mut rng),
        Family::WaveNoise => wave_noise(spec.n, class, &mut rng),
    };
    Ok(TimeSeries::new_unchecked(
        samples.into_iter().map(T::from_f64_lossy).collect(),
    ))
}

/// Labeled database of `classes x instances_per_class` series (unlabeled
/// families require `classes == 1` and get no labels). Reproducible from
/// the master seed; series `(c, k)` does not depend on the database shape.
pub fn generate_database<T: Sample>(
    family: Family,
    classes: u32,
    instances_per_class: usize,
    n: usize,
    seed: u64,
) -> Result<Dataset<T>> {
    if classes == 0 || instances_per_class == 0 {
        return Err(Error::InvalidParameter(
            "classes and instances_per_class must be positive".into(),
        ));
    }
    match family.class_count() {
        Some(k) if classes > k => {
            return Err(Error::InvalidParameter(format!(
                "family {family} has {k} classes, requested {classes}"
            )));
        }
        None if classes != 1 => {
            return Err(Error::InvalidParameter(format!(
                "family {family} is unlabeled; use classes = 1"
            )));
        }
        _ => {}
    }
    let labeled = family.class_count().is_some();
    let mut series = Vec::with_capacity(classes as usize * instances_per_class);
    let mut labels = labeled.then(Vec::new);
    for c in 1..=classes {
        for k in 0..instances_per_class {
            let spec = GeneratorSpec {
                family,
                class_id: labeled.then_some(c),
                n,
                seed: mix_seed(seed, (u64::from(c) << 40) ^ k as u64),
            };
            series.push(generate(&spec)?);
            if let Some(labels) = labels.as_mut() {
                labels.push(i64::from(c));
            }
        }
    }
    Dataset::new(series, labels)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_walk(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    v.push(0.0);
    for i in 1..n {
        let prev: f64 = v[i - 1];
        v.push(prev + normal(rng));
    }
    v
}

fn white_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

fn cbf(n: usize, class: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let nf = n as f64;
    let onset_lo = (nf / 8.0).floor().max(0.0) as usize;
    let onset_hi = (nf / 4.0).floor() as usize;
    let dur_lo = ((nf / 4.0).floor() as usize).max(1);
    let dur_hi = ((3.0 * nf / 4.0).floor() as usize).max(dur_lo);
    let a = rng.random_range(onset_lo..=onset_hi);
    let dur = rng.random_range(dur_lo..=dur_hi);
    let b = (a + dur).min(n.saturating_sub(1)).max(a + 1);
    let amplitude = 6.0 + normal(rng);
    let span = (b - a) as f64;
    (0..n)
        .map(|t| {
            let shape = if t >= a && t <= b {
                match class {
                    1 => 1.0,                        // cylinder
                    2 => (t - a) as f64 / span,      // bell
                    3 => (b - t) as f64 / span,      // funnel
                    _ => unreachable!("class validated"),
                }
            } else {
                0.0
            };
            amplitude * shape + normal(rng)
        })
        .collect()
}

fn control_chart(n: usize, class: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    const MEAN: f64 = 30.0;
    const SCALE: f64 = 2.0;
    let cycle_amp = rng.random_range(10.0..15.0);
    let cycle_period = rng.random_range(10.0..15.0);
    let gradient = rng.random_range(0.2..0.5);
    let shift = rng.random_range(7.5..20.0);
    let shift_at = rng.random_range(n / 3..=(2 * n) / 3);
    (0..n)
        .map(|idx| {
            let t = (idx + 1) as f64;
            let base = MEAN + SCALE * rng.random_range(-3.0..3.0);
            match class {
                1 => base,
                2 => base + cycle_amp * (2.0 * std::f64::consts::PI * t / cycle_period).sin(),
                3 => base + gradient * t,
                4 => base - gradient * t,
                5 => base + if idx >= shift_at { shift } else { 0.0 },
                6 => base - if idx >= shift_at { shift } else { 0.0 },
                _ => unreachable!("class validated"),
            }
        })
        .collect()
}

/// Triangular bump of height 6 centered at `c` on the 21-sample grid.
fn hat(tau: f64, c: f64) -> f64 {
    (6.0 - (tau - c).abs()).max(0.0)
}

fn waveform_sample(tau: f64, class: u32, u: f64) -> f64 {
    match class {
        1 => u * hat(tau, 7.0) + (1.0 - u) * hat(tau, 15.0),
        2 => u * hat(tau, 7.0) + (1.0 - u) * hat(tau, 11.0),
        3 => u * hat(tau, 15.0) + (1.0 - u) * hat(tau, 11.0),
        _ => unreachable!("class validated"),
    }
}

fn waveform(n: usize, class: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let u: f64 = rng.random_range(0.0..1.0);
    (0..n)
        .map(|idx| {
            let tau = (idx + 1) as f64 * 21.0 / n as f64;
            waveform_sample(tau, class, u) + normal(rng)
        })
        .collect()
}

fn wave_noise(n: usize, class: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // waveform prefix in the canonical 21:40 proportion, noise tail
    let wave_len = ((n * 21 + 20) / 40).clamp(1, n);
    let u: f64 = rng.random_range(0.0..1.0);
    (0..n)
        .map(|idx| {
            if idx < wave_len {
                let tau = (idx + 1) as f64 * 21.0 / wave_len as f64;
                waveform_sample(tau, class, u) + normal(rng)
            } else {
                normal(rng)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_dist;
    use crate::params::Exponent;

    fn spec(family: Family, class_id: Option<u32>, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            family,
            class_id,
            n,
            seed,
        }
    }

    #[test]
    fn random_walk_starts_at_zero() {
        for seed in [0, 1, 99] {
            let s: TimeSeries<f64> =
                generate(&spec(Family::RandomWalk, None, 64, seed)).unwrap();
            assert_eq!(s[0], 0.0);
            assert_eq!(s.len(), 64);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a: TimeSeries<f64> = generate(&spec(Family::Cbf, Some(2), 128, 7)).unwrap();
        let b: TimeSeries<f64> = generate(&spec(Family::Cbf, Some(2), 128, 7)).unwrap();
        assert_eq!(a, b);
        let c: TimeSeries<f64> = generate(&spec(Family::Cbf, Some(2), 128, 8)).unwrap();
        assert_ne!(a.samples()[..8], c.samples()[..8]);
    }

    #[test]
    fn white_noise_moments() {
        let n = 10_000usize;
        let s: TimeSeries<f64> = generate(&spec(Family::WhiteNoise, None, n, 5)).unwrap();
        let mean = s.iter().sum::<f64>() / n as f64;
        let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn class_validation() {
        assert!(generate::<f64>(&spec(Family::Cbf, Some(4), 32, 0)).is_err());
        assert!(generate::<f64>(&spec(Family::Cbf, None, 32, 0)).is_err());
        assert!(generate::<f64>(&spec(Family::RandomWalk, Some(1), 32, 0)).is_err());
        assert!(generate::<f64>(&spec(Family::ControlChart, Some(6), 60, 0)).is_ok());
    }

    #[test]
    fn database_shape_and_determinism() {
        let db: Dataset<f64> = generate_database(Family::ControlChart, 6, 9, 60, 3).unwrap();
        assert_eq!(db.len(), 54);
        assert_eq!(db.series_len(), 60);
        let labels = db.labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 4).count(), 9);

        let again: Dataset<f64> = generate_database(Family::ControlChart, 6, 9, 60, 3).unwrap();
        assert_eq!(db, again);

        let three: Dataset<f64> = generate_database(Family::Waveform, 3, 1, 21, 11).unwrap();
        assert_eq!(three.len(), 3);
        assert_eq!(three.labels(), Some(&[1, 2, 3][..]));
    }

    #[test]
    fn database_is_nested_across_sizes() {
        let small: Dataset<f64> = generate_database(Family::Cbf, 3, 2, 64, 9).unwrap();
        let large: Dataset<f64> = generate_database(Family::Cbf, 3, 5, 64, 9).unwrap();
        // instance k of class c is the same series in both databases
        for c in 0..3usize {
            for k in 0..2usize {
                assert_eq!(small.get(c * 2 + k), large.get(c * 5 + k));
            }
        }
    }

    #[test]
    fn unlabeled_families_reject_multiple_classes() {
        assert!(generate_database::<f64>(Family::RandomWalk, 2, 3, 16, 0).is_err());
        let db: Dataset<f64> = generate_database(Family::RandomWalk, 1, 3, 16, 0).unwrap();
        assert!(db.labels().is_none());
    }

    #[test]
    fn classes_have_structure() {
        // a 1-NN scan with the plain l1 distance beats chance comfortably
        for family in [Family::Cbf, Family::ControlChart, Family::Waveform, Family::WaveNoise] {
            let classes = family.class_count().unwrap();
            let n = family.default_length();
            let db: Dataset<f64> = generate_database(family, classes, 9, n, 17).unwrap();
            let labels = db.labels().unwrap().to_vec();
            let mut hits = 0usize;
            let trials = 60usize;
            for q in 0..trials {
                let class = (q as u32 % classes) + 1;
                let query: TimeSeries<f64> = generate(&spec(
                    family,
                    Some(class),
                    n,
                    mix_seed(0xABCD, q as u64),
                ))
                .unwrap();
                let mut best = f64::INFINITY;
                let mut best_label = 0i64;
                for (i, cand) in db.iter().enumerate() {
                    let d = lp_dist(&query, cand, Exponent::Finite(1)).unwrap();
                    if d < best {
                        best = d;
                        best_label = labels[i];
                    }
                }
                if best_label == i64::from(class) {
                    hits += 1;
                }
            }
            let accuracy = hits as f64 / trials as f64;
            let chance = 1.0 / f64::from(classes);
            assert!(
                accuracy > chance + 0.15,
                "{family}: accuracy {accuracy} vs chance {chance}"
            );
        }
    }
}
