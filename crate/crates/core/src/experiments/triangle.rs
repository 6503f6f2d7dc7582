//! Triangle-inequality violation rates.
//!
//! For random triples the ratio `C(x,y,z) = DTW(x,z) / (DTW(x,y) + DTW(y,z))`
//! exceeds 1 exactly when the triangle inequality fails. The DTW here runs
//! without a locality constraint (`w >= n`), and distances are the rooted
//! DTW values.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datagen::{generate, mix_seed, Family, GeneratorSpec};
use crate::dtw::dtw;
use crate::error::{Error, Result};
use crate::params::{Exponent, SearchParams};
use crate::series::TimeSeries;

/// Tolerance below which `C > 1` is attributed to floating-point noise.
pub const VIOLATION_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct TriangleConfig {
    pub family: Family,
    pub n: usize,
    pub trials: usize,
    pub p: Exponent,
    pub seed: u64,
}

/// Fixed-width histogram of the ratio `C` over `[0, upper)` plus an
/// overflow bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    overflow: u64,
}

impl Histogram {
    pub const BIN_WIDTH: f64 = 0.05;
    const BINS: usize = 50; // covers [0, 2.5)

    fn new() -> Self {
        Self {
            counts: vec![0; Self::BINS],
            overflow: 0,
        }
    }

    fn record(&mut self, c: f64) {
        let bin = (c / Self::BIN_WIDTH).floor() as usize;
        if bin < self.counts.len() {
            self.counts[bin] += 1;
        } else {
            self.overflow += 1;
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }
}

/// Streaming accumulator so tests can feed explicit triples.
#[derive(Debug, Clone)]
pub struct TriangleAccumulator {
    pub trials: usize,
    pub violations: usize,
    pub degenerate: usize,
    pub histogram: Histogram,
    params: SearchParams,
}

impl TriangleAccumulator {
    pub fn new(p: Exponent, n: usize) -> Self {
        Self {
            trials: 0,
            violations: 0,
            degenerate: 0,
            histogram: Histogram::new(),
            params: SearchParams::unconstrained(p, n),
        }
    }

    pub fn observe(
        &mut self,
        x: &TimeSeries<f64>,
        y: &TimeSeries<f64>,
        z: &TimeSeries<f64>,
    ) -> Result<()> {
        self.trials += 1;
        let xz = dtw(x, z, &self.params)?;
        let xy = dtw(x, y, &self.params)?;
        let yz = dtw(y, z, &self.params)?;
        let denominator = xy + yz;
        if denominator == 0.0 {
            self.degenerate += 1;
            return Ok(());
        }
        let c = xz / denominator;
        self.histogram.record(c);
        if c > 1.0 + VIOLATION_GUARD {
            self.violations += 1;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TriangleReport {
    pub family: Family,
    pub p: Exponent,
    pub n: usize,
    pub trials: usize,
    pub violations: usize,
    pub degenerate: usize,
    pub violation_rate: f64,
    pub histogram: Histogram,
}

impl TriangleReport {
    /// One summary row, a blank line, then `bin_lo,bin_hi,count` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "family,p,n,trials,degenerate,violations,violation_rate"
        )?;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            self.family,
            self.p,
            self.n,
            self.trials,
            self.degenerate,
            self.violations,
            self.violation_rate
        )?;
        writeln!(out)?;
        writeln!(out, "bin_lo,bin_hi,count")?;
        let w = Histogram::BIN_WIDTH;
        for (i, count) in self.histogram.counts().iter().enumerate() {
            writeln!(out, "{},{},{count}", i as f64 * w, (i + 1) as f64 * w)?;
        }
        writeln!(
            out,
            "{},inf,{}",
            self.histogram.counts().len() as f64 * w,
            self.histogram.overflow()
        )?;
        Ok(())
    }
}

/// Generate `trials` random triples from the family and count violations.
pub fn run_triangle(config: &TriangleConfig) -> Result<TriangleReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut acc = TriangleAccumulator::new(config.p, config.n);
    let classes = config.family.class_count();
    let mut class_rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, 0x7121A));
    for trial in 0..config.trials {
        let mut make = |slot: u64| -> Result<TimeSeries<f64>> {
            let class_id = classes.map(|k| class_rng.random_range(1..=k));
            generate(&GeneratorSpec {
                family: config.family,
                class_id,
                n: config.n,
                seed: mix_seed(config.seed, trial as u64 * 3 + slot),
            })
        };
        let x = make(0)?;
        let y = make(1)?;
        let z = make(2)?;
        acc.observe(&x, &y, &z)?;
    }
    Ok(TriangleReport {
        family: config.family,
        p: config.p,
        n: config.n,
        trials: acc.trials,
        violations: acc.violations,
        degenerate: acc.degenerate,
        violation_rate: acc.violations as f64 / acc.trials as f64,
        histogram: acc.histogram,
    })
}
