//! Warping envelopes.
//!
//! For a series `y` and locality constraint `w`, the envelope is
//! `U_i = max { y_k : |k - i| <= w }` and `L_i = min { y_k : |k - i| <= w }`.
//! The streaming builder maintains monotonic double-ended queues of indices
//! and spends at most `3n` comparisons between data-point values; the naive
//! builder recomputes each window extremum in `O(nw)` and serves as the
//! testing oracle.

use std::collections::VecDeque;

use crate::scalar::Sample;
use crate::series::TimeSeries;

/// Upper and lower warping envelope of a series, tagged with the `w` it was
/// built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<T: Sample> {
    upper: TimeSeries<T>,
    lower: TimeSeries<T>,
    w: usize,
}

impl<T: Sample> Envelope<T> {
    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        false // built from a nonempty series
    }
}

/// Streaming envelope build; returns the envelope and the number of
/// comparisons between data-point values it performed.
///
/// One deque holds candidate maxima (values decreasing from front to back),
/// the other candidate minima. Each new sample is compared to its
/// predecessor once; only the deque that the comparison disqualifies is
/// then trimmed from the back, which is what keeps the total at `3n`.
pub fn envelope_streaming_counted<T: Sample>(y: &[T], w: usize) -> (Envelope<T>, u64) {
    let n = y.len();
    assert!(n >= 1, "envelope of an empty series");
    let w = w.min(n - 1); // window saturates at the series bounds
    let width = 2 * w + 1;

    let mut upper = vec![T::zero(); n];
    let mut lower = vec![T::zero(); n];
    let mut comparisons: u64 = 0;

    let mut max_q: VecDeque<usize> = VecDeque::new();
    let mut min_q: VecDeque<usize> = VecDeque::new();
    max_q.push_back(0);
    min_q.push_back(0);

    for i in 1..n {
        if i >= w + 1 {
            upper[i - w - 1] = y[*max_q.front().expect("max queue holds the last index")];
            lower[i - w - 1] = y[*min_q.front().expect("min queue holds the last index")];
        }
        comparisons += 1;
        if y[i] > y[i - 1] {
            // y[i-1] is the back of both queues; it can no longer be a
            // window maximum.
            max_q.pop_back();
            while let Some(&back) = max_q.back() {
                comparisons += 1;
                if y[i] > y[back] {
                    max_q.pop_back();
                } else {
                    break;
                }
            }
        } else {
            min_q.pop_back();
            while let Some(&back) = min_q.back() {
                comparisons += 1;
                if y[i] < y[back] {
                    min_q.pop_back();
                } else {
                    break;
                }
            }
        }
        max_q.push_back(i);
        min_q.push_back(i);
        // The fronts can never both hit the eviction point at once: that
        // would need a constant window, and ties always pop the min queue.
        if i == width + max_q.front().expect("nonempty after push") {
            max_q.pop_front();
        } else if i == width + min_q.front().expect("nonempty after push") {
            min_q.pop_front();
        }
    }

    for i in n..=(n + w) {
        upper[i - w - 1] = y[*max_q.front().expect("tail emission before eviction")];
        lower[i - w - 1] = y[*min_q.front().expect("tail emission before eviction")];
        if i - max_q.front().expect("nonempty") >= width {
            max_q.pop_front();
        }
        if i - min_q.front().expect("nonempty") >= width {
            min_q.pop_front();
        }
    }

    (
        Envelope {
            upper: TimeSeries::new_unchecked(upper),
            lower: TimeSeries::new_unchecked(lower),
            w,
        },
        comparisons,
    )
}

/// Streaming envelope build (at most `3n` data-point comparisons).
pub fn envelope_streaming<T: Sample>(y: &TimeSeries<T>, w: usize) -> Envelope<T> {
    envelope_streaming_counted(y, w).0
}

/// Naive `O(nw)` envelope: recompute the extremum of every window.
pub fn envelope_naive<T: Sample>(y: &TimeSeries<T>, w: usize) -> Envelope<T> {
    envelope_naive_slice(y, w)
}

pub(crate) fn envelope_naive_slice<T: Sample>(y: &[T], w: usize) -> Envelope<T> {
    let n = y.len();
    assert!(n >= 1, "envelope of an empty series");
    let w = w.min(n - 1);
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(w);
        let hi = (i + w).min(n - 1);
        let window = &y[lo..=hi];
        let mut mx = window[0];
        let mut mn = window[0];
        for &v in &window[1..] {
            mx = mx.max(v);
            mn = mn.min(v);
        }
        upper.push(mx);
        lower.push(mn);
    }
    Envelope {
        upper: TimeSeries::new_unchecked(upper),
        lower: TimeSeries::new_unchecked(lower),
        w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn constant_series() {
        let e = envelope_streaming(&ts(&[5.0, 5.0, 5.0]), 2);
        assert_eq!(e.upper(), &[5.0, 5.0, 5.0]);
        assert_eq!(e.lower(), &[5.0, 5.0, 5.0]);
    }

    #[test]
    fn zero_window_collapses_to_series() {
        let y = ts(&[3.0, 1.0, 4.0, 1.0, 5.0]);
        let e = envelope_streaming(&y, 0);
        assert_eq!(e.upper(), y.samples());
        assert_eq!(e.lower(), y.samples());
    }

    #[test]
    fn small_example() {
        // y = (1,3,2), w=1 -> U = (3,3,3), L = (1,1,2)
        let e = envelope_streaming(&ts(&[1.0, 3.0, 2.0]), 1);
        assert_eq!(e.upper(), &[3.0, 3.0, 3.0]);
        assert_eq!(e.lower(), &[1.0, 1.0, 2.0]);
        let n = envelope_naive(&ts(&[1.0, 3.0, 2.0]), 1);
        assert_eq!(n.upper(), e.upper());
        assert_eq!(n.lower(), e.lower());
    }

    #[test]
    fn full_window_is_global_extrema() {
        // w >= n-1 saturates
        let e = envelope_naive(&ts(&[0.0, -1.0, 0.0, -2.0]), 3);
        assert_eq!(e.upper(), &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(e.lower(), &[-2.0, -2.0, -2.0, -2.0]);
        let s = envelope_streaming(&ts(&[0.0, -1.0, 0.0, -2.0]), 100);
        assert_eq!(s.upper(), e.upper());
        assert_eq!(s.lower(), e.lower());
        assert_eq!(s.w(), 3);
    }

    #[test]
    fn singleton() {
        let e = envelope_streaming(&ts(&[7.5]), 9);
        assert_eq!(e.upper(), &[7.5]);
        assert_eq!(e.lower(), &[7.5]);
    }

    /// Every series over a tiny alphabet, every window: the streaming build
    /// must equal the naive one and stay within the comparison budget. The
    /// tiny alphabet forces long runs of equal values, the regime where the
    /// queue tie-handling could go wrong.
    #[test]
    fn exhaustive_small_inputs_with_ties() {
        for n in 1..=6usize {
            let mut series = vec![vec![]];
            for _ in 0..n {
                series = series
                    .into_iter()
                    .flat_map(|s: Vec<f64>| {
                        [0.0, 1.0, 2.0].iter().map(move |&v| {
                            let mut t = s.clone();
                            t.push(v);
                            t
                        })
                    })
                    .collect();
            }
            for s in series {
                for w in 0..=n + 1 {
                    let (fast, comparisons) = envelope_streaming_counted(&s, w);
                    let slow = envelope_naive_slice(&s, w);
                    assert_eq!(fast.upper(), slow.upper(), "y={s:?} w={w}");
                    assert_eq!(fast.lower(), slow.lower(), "y={s:?} w={w}");
                    assert!(
                        comparisons <= 3 * n as u64,
                        "{comparisons} comparisons on n={n}, w={w}, y={s:?}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn streaming_matches_naive(
            y in proptest::collection::vec(-100.0f64..100.0, 1..80),
            w in 0usize..90,
        ) {
            let (fast, comparisons) = envelope_streaming_counted(&y, w);
            let slow = envelope_naive_slice(&y, w);
            prop_assert_eq!(fast.upper(), slow.upper());
            prop_assert_eq!(fast.lower(), slow.lower());
            prop_assert!(comparisons <= 3 * y.len() as u64);
        }

        #[test]
        fn monotone_in_w(
            y in proptest::collection::vec(-10.0f64..10.0, 1..40),
            w1 in 0usize..20,
            delta in 0usize..20,
        ) {
            let narrow = envelope_naive_slice(&y, w1);
            let wide = envelope_naive_slice(&y, w1 + delta);
            for i in 0..y.len() {
                prop_assert!(narrow.upper()[i] <= wide.upper()[i]);
                prop_assert!(narrow.lower()[i] >= wide.lower()[i]);
                prop_assert!(narrow.lower()[i] <= y[i] && y[i] <= narrow.upper()[i]);
            }
        }
    }
}
