//! Piecewise-sum dimensionality reduction and the `l_1` point/rectangle
//! geometry backing the index.
//!
//! The cover splits `{1..n}` into `d` contiguous intervals of `floor(n/d)`
//! samples, the last absorbing the remainder. Summing a series over each
//! interval gives its `d`-dimensional image `P_d`; summing the envelope
//! bounds gives a hyperrectangle. The `l_1` distance from `P_d(x)` to that
//! rectangle lower-bounds `LB_Keogh_1(x, y)` and hence `DTW_1(x, y)`.

use std::ops::Range;

use crate::envelope::Envelope;
use crate::error::{Error, Result};
use crate::norms::point_interval_dist_unchecked;
use crate::scalar::Sample;
use crate::series::TimeSeries;

/// Disjoint contiguous cover of `0..n` by `d` index intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseCover {
    intervals: Vec<Range<usize>>,
    n: usize,
}

impl PiecewiseCover {
    pub fn intervals(&self) -> &[Range<usize>] {
        &self.intervals
    }

    /// Number of intervals, i.e. the reduced dimension `d`.
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Source series length the cover was built for.
    pub fn series_len(&self) -> usize {
        self.n
    }
}

/// `d`-dimensional piecewise-sum image of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint<T: Sample> {
    coords: Vec<T>,
}

impl<T: Sample> ProjectedPoint<T> {
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Axis-aligned box with `lo <= hi` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperrectangle<T: Sample> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Sample> Hyperrectangle<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                left: lo.len(),
                right: hi.len(),
            });
        }
        for (a, b) in lo.iter().zip(&hi) {
            if a > b {
                return Err(Error::InvalidParameter(format!(
                    "rectangle bounds out of order: {a} > {b}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate rectangle covering exactly one point.
    pub fn from_point(p: &ProjectedPoint<T>) -> Self {
        Self {
            lo: p.coords.clone(),
            hi: p.coords.clone(),
        }
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Smallest rectangle containing both operands.
    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(&a, &b)| a.min(b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        }
    }

    pub fn contains_point(&self, p: &ProjectedPoint<T>) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(p.coords())
            .all(|((&l, &h), &v)| l <= v && v <= h)
    }

    pub fn contains_rect(&self, other: &Self) -> bool {
        self.lo
            .iter()
            .zip(&other.lo)
            .all(|(&mine, &theirs)| mine <= theirs)
            && self
                .hi
                .iter()
                .zip(&other.hi)
                .all(|(&mine, &theirs)| mine >= theirs)
    }

    /// Coordinatewise `l_1` gap to another rectangle: zero on overlap.
    /// This lower-bounds [`rect_dist_l1`] for every point inside `other`.
    pub fn min_dist_l1(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        let mut sum = T::zero();
        for j in 0..self.dim() {
            let gap = (self.lo[j] - other.hi[j]).max(other.lo[j] - self.hi[j]);
            if gap > T::zero() {
                sum = sum + gap;
            }
        }
        sum
    }
}

/// The interval family `C_j = [1 + (j-1) floor(n/d), j floor(n/d)]` for
/// `j < d`, with `C_d` running to `n` (quoted here 1-based, stored 0-based).
pub fn make_cover(n: usize, d: usize) -> Result<PiecewiseCover> {
    if d < 1 || d > n {
        return Err(Error::InvalidParameter(format!(
            "cover dimension d={d} out of range 1..={n}"
        )));
    }
    let step = n / d;
    let mut intervals = Vec::with_capacity(d);
    for j in 0..d - 1 {
        intervals.push(j * step..(j + 1) * step);
    }
    intervals.push((d - 1) * step..n);
    Ok(PiecewiseCover { intervals, n })
}

/// Per-interval sums of a series.
pub fn project_series<T: Sample>(x: &TimeSeries<T>, cover: &PiecewiseCover) -> Result<ProjectedPoint<T>> {
    project_slice(x, cover)
}

pub(crate) fn project_slice<T: Sample>(x: &[T], cover: &PiecewiseCover) -> Result<ProjectedPoint<T>> {
    if x.len() != cover.series_len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: cover.series_len(),
        });
    }
    let coords = cover
        .intervals()
        .iter()
        .map(|r| x[r.clone()].iter().fold(T::zero(), |acc, &v| acc + v))
        .collect();
    Ok(ProjectedPoint { coords })
}

/// Bounding rectangle of the projected envelope:
/// `lo = P_d(L)`, `hi = P_d(U)`.
pub fn envelope_rect<T: Sample>(env: &Envelope<T>, cover: &PiecewiseCover) -> Result<Hyperrectangle<T>> {
    let lo = project_slice(env.lower(), cover)?;
    let hi = project_slice(env.upper(), cover)?;
    Ok(Hyperrectangle {
        lo: lo.coords,
        hi: hi.coords,
    })
}

/// `sum_j d(pt_j, [lo_j, hi_j])`: the `l_1` distance from a point to a
/// rectangle.
pub fn rect_dist_l1<T: Sample>(pt: &ProjectedPoint<T>, rect: &Hyperrectangle<T>) -> Result<T> {
    if pt.dim() != rect.dim() {
        return Err(Error::DimensionMismatch {
            left: pt.dim(),
            right: rect.dim(),
        });
    }
    let mut sum = T::zero();
    for j in 0..pt.dim() {
        sum = sum + point_interval_dist_unchecked(pt.coords[j], rect.lo[j], rect.hi[j]);
    }
    Ok(sum)
}
