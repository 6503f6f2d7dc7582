//! Core value types: fixed-length time series and uniform-length datasets.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::scalar::Sample;

/// A fixed-length sequence of finite real samples.
///
/// Construction rejects empty series and non-finite samples, so every
/// downstream computation can assume finite inputs of length `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: Sample> {
    samples: Vec<T>,
}

impl<T: Sample> TimeSeries<T> {
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("time series must have length >= 1"));
        }
        for (i, v) in samples.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: 0, col: i });
            }
        }
        Ok(Self { samples })
    }

    /// Internal constructor for values already known to be finite
    /// (clamps, envelope bounds, generator output).
    pub(crate) fn new_unchecked(samples: Vec<T>) -> Self {
        debug_assert!(!samples.is_empty());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Self { samples }
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }
}

impl<T: Sample> Deref for TimeSeries<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.samples
    }
}

impl<T: Sample> AsRef<[T]> for TimeSeries<T> {
    fn as_ref(&self) -> &[T] {
        &self.samples
    }
}

/// A nonempty collection of equal-length series with optional class labels.
///
/// Immutable after construction; safe for unrestricted concurrent reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T: Sample> {
    series: Vec<TimeSeries<T>>,
    labels: Option<Vec<i64>>,
    n: usize,
}

impl<T: Sample> Dataset<T> {
    pub fn new(series: Vec<TimeSeries<T>>, labels: Option<Vec<i64>>) -> Result<Self> {
        let first = series.first().ok_or(Error::EmptyDataset)?;
        let n = first.len();
        for s in &series {
            if s.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: s.len(),
                });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != series.len() {
                return Err(Error::LengthMismatch {
                    left: series.len(),
                    right: labels.len(),
                });
            }
        }
        Ok(Self { series, labels, n })
    }

    /// Number of series.
    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    /// Common sample length of every series.
    pub fn series_len(&self) -> usize {
        self.n
    }

    pub fn series(&self) -> &[TimeSeries<T>] {
        &self.series
    }

    pub fn get(&self, index: usize) -> &TimeSeries<T> {
        &self.series[index]
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TimeSeries<T>> {
        self.series.iter()
    }

    /// Dataset containing the first `count` series (labels carried along).
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {count} out of range 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            series: self.series[..count].to_vec(),
            labels: self.labels.as_ref().map(|l| l[..count].to_vec()),
            n: self.n,
        })
    }
}
