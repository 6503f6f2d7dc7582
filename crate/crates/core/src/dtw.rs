//! Constrained dynamic time warping.
//!
//! `dtw` runs the banded dynamic program: cell `(i, j)` holds the best
//! accumulated cost of aligning the first `i` samples of `x` with the first
//! `j` samples of `y`, restricted to the Sakoe-Chiba band `|i - j| <= w`.
//! For finite `p` the accumulation is in `p`-th-power space with a single
//! root at the end; for `p = inf` cells combine by `max` instead of `+`.
//!
//! `dtw_bruteforce` enumerates every minimal monotone warping path inside
//! the band and takes the cheapest. It is exponential and refuses series
//! longer than [`BRUTE_FORCE_MAX_LEN`]; it exists as an independent oracle
//! for the dynamic program.

use crate::error::{Error, Result};
use crate::norms::{pow_p, root_p};
use crate::params::{Exponent, SearchParams};
use crate::scalar::Sample;
use crate::series::TimeSeries;

/// Upper length limit accepted by [`dtw_bruteforce`].
pub const BRUTE_FORCE_MAX_LEN: usize = 10;

/// A warping path: ordered index matches `(i, j)`, zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingPath {
    matches: Vec<(usize, usize)>,
}

impl WarpingPath {
    pub fn matches(&self) -> &[(usize, usize)] {
        &self.matches
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }
}

/// DTW distance between equal-length series under `params`.
pub fn dtw<T: Sample>(x: &TimeSeries<T>, y: &TimeSeries<T>, params: &SearchParams) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let w = params.effective_window(x.len());
    Ok(dtw_slices(x, y, params.p, w))
}

/// Band-restricted DP over raw slices; `w` must already be clamped to
/// `n - 1`. Two rolling rows of at most `min(2w + 1, n)` cells each.
pub(crate) fn dtw_slices<T: Sample>(x: &[T], y: &[T], p: Exponent, w: usize) -> T {
    let n = x.len();
    debug_assert_eq!(n, y.len());
    debug_assert!(n >= 1 && w <= n - 1);

    let inf = T::infinity();
    let band = (2 * w + 1).min(n);
    let mut prev: Vec<T> = Vec::with_capacity(band);
    let mut cur: Vec<T> = Vec::with_capacity(band);
    // Row 0 is the single cell (0,0) = 0: the empty-prefix base case.
    let mut prev_lo: usize = 0;
    prev.push(T::zero());

    for i in 1..=n {
        let lo = if i > w { i - w } else { 1 };
        let hi = (i + w).min(n);
        let prev_hi = prev_lo + prev.len() - 1;
        cur.clear();
        for j in lo..=hi {
            let cost = match p {
                Exponent::Finite(p) => pow_p(x[i - 1] - y[j - 1], p),
                Exponent::Infinity => (x[i - 1] - y[j - 1]).abs(),
            };
            let up = if j >= prev_lo && j <= prev_hi {
                prev[j - prev_lo]
            } else {
                inf
            };
            let diag = if j >= prev_lo + 1 && j - 1 <= prev_hi {
                prev[j - 1 - prev_lo]
            } else {
                inf
            };
            let left = if j > lo { cur[j - lo - 1] } else { inf };
            let reach = up.min(diag).min(left);
            cur.push(match p {
                Exponent::Finite(_) => cost + reach,
                Exponent::Infinity => cost.max(reach),
            });
        }
        std::mem::swap(&mut prev, &mut cur);
        prev_lo = lo;
    }

    let q = prev[n - prev_lo];
    match p {
        Exponent::Finite(p) => root_p(q, p),
        Exponent::Infinity => q,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Diag,
    Right,
    Down,
}

struct Enumerator<'a, T: Sample> {
    x: &'a [T],
    y: &'a [T],
    p: Exponent,
    w: usize,
    n: usize,
    best: T,
    best_path: Vec<(usize, usize)>,
    path: Vec<(usize, usize)>,
}

impl<T: Sample> Enumerator<'_, T> {
    fn pair_cost(&self, i: usize, j: usize) -> T {
        match self.p {
            Exponent::Finite(p) => pow_p(self.x[i] - self.y[j], p),
            Exponent::Infinity => (self.x[i] - self.y[j]).abs(),
        }
    }

    fn accumulate(&self, acc: T, cost: T) -> T {
        match self.p {
            Exponent::Finite(_) => acc + cost,
            Exponent::Infinity => acc.max(cost),
        }
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) <= self.w
    }

    fn walk(&mut self, i: usize, j: usize, last: Step, acc: T) {
        if acc >= self.best {
            return; // both sum and max accumulate monotonically
        }
        if i == self.n - 1 && j == self.n - 1 {
            self.best = acc;
            self.best_path = self.path.clone();
            return;
        }
        // Minimality forbids a right step directly after a down step and
        // vice versa: the corner match would be redundant.
        if i + 1 < self.n && j + 1 < self.n {
            self.step(i + 1, j + 1, Step::Diag, acc);
        }
        if j + 1 < self.n && last != Step::Down && self.in_band(i, j + 1) {
            self.step(i, j + 1, Step::Right, acc);
        }
        if i + 1 < self.n && last != Step::Right && self.in_band(i + 1, j) {
            self.step(i + 1, j, Step::Down, acc);
        }
    }

    fn step(&mut self, i: usize, j: usize, step: Step, acc: T) {
        let acc = self.accumulate(acc, self.pair_cost(i, j));
        self.path.push((i, j));
        self.walk(i, j, step, acc);
        self.path.pop();
    }
}

/// Brute-force DTW by enumeration of all minimal monotone warping paths
/// within the band; also returns an optimal path.
pub fn dtw_bruteforce_with_path<T: Sample>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    params: &SearchParams,
) -> Result<(T, WarpingPath)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n > BRUTE_FORCE_MAX_LEN {
        return Err(Error::BruteForceTooLong {
            n,
            max: BRUTE_FORCE_MAX_LEN,
        });
    }
    let w = params.effective_window(n);
    let mut e = Enumerator {
        x,
        y,
        p: params.p,
        w,
        n,
        best: T::infinity(),
        best_path: Vec::new(),
        path: vec![(0, 0)],
    };
    let start = e.pair_cost(0, 0);
    e.walk(0, 0, Step::Diag, start);
    debug_assert!(e.best.is_finite(), "the diagonal path always exists");

    let value = match params.p {
        Exponent::Finite(p) => root_p(e.best, p),
        Exponent::Infinity => e.best,
    };
    Ok((
        value,
        WarpingPath {
            matches: e.best_path,
        },
    ))
}

/// Brute-force DTW value (see [`dtw_bruteforce_with_path`]).
pub fn dtw_bruteforce<T: Sample>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    params: &SearchParams,
) -> Result<T> {
    dtw_bruteforce_with_path(x, y, params).map(|(v, _)| v)
}
