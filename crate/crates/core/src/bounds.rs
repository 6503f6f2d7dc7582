//! Lower bounds on the DTW: the envelope projection, LB_Keogh, and the
//! two-pass LB_Improved.
//!
//! With `h = H(x, y)` the clamp of `x` into the envelope of `y`,
//! `LB_Keogh_p(x, y) = ||x - h||_p` never exceeds `DTW_p(x, y)`.
//! LB_Improved adds a second pass, `LB_Keogh_p(y, h)` in `p`-th-power
//! space, measured against the envelope of `h` built with the same `w`.

use crate::envelope::{envelope_streaming_counted, Envelope};
use crate::error::{Error, Result};
use crate::norms::{pow_p, root_p};
use crate::params::Exponent;
use crate::scalar::Sample;
use crate::series::TimeSeries;

/// Projection `H(x, y)` of `x` onto the envelope of `y`: the componentwise
/// clamp of `x` into `[L(y), U(y)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Sample> {
    h: TimeSeries<T>,
}

impl<T: Sample> Projection<T> {
    pub fn series(&self) -> &TimeSeries<T> {
        &self.h
    }

    pub fn into_series(self) -> TimeSeries<T> {
        self.h
    }
}

/// A lower-bound value; `abandoned` marks an early-abandoned computation,
/// in which case the true bound is at least `value` (and `value` is at
/// least the abandonment threshold).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue<T> {
    pub value: T,
    pub abandoned: bool,
}

pub fn project<T: Sample>(x: &TimeSeries<T>, env: &Envelope<T>) -> Result<Projection<T>> {
    if x.len() != env.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: env.len(),
        });
    }
    let h = x
        .iter()
        .zip(env.upper().iter().zip(env.lower()))
        .map(|(&v, (&u, &l))| {
            if v >= u {
                u
            } else if v <= l {
                l
            } else {
                v
            }
        })
        .collect();
    Ok(Projection {
        h: TimeSeries::new_unchecked(h),
    })
}

/// `LB_Keogh_p(x, y) = ||x - H(x, y)||_p` computed against a prebuilt
/// envelope of `y`. With `abandon_at` set, the scan stops once the partial
/// bound provably reaches the threshold.
pub fn lb_keogh<T: Sample>(
    x: &TimeSeries<T>,
    env_of_y: &Envelope<T>,
    p: Exponent,
    abandon_at: Option<T>,
) -> Result<BoundValue<T>> {
    check_inputs(x.len(), env_of_y.len(), abandon_at)?;
    let mut comparisons = 0u64;
    Ok(lb_keogh_counted(
        x,
        env_of_y.upper(),
        env_of_y.lower(),
        p,
        abandon_at,
        &mut comparisons,
    ))
}

/// `LB_Improved_p(x, y)^p = LB_Keogh_p(x, y)^p + LB_Keogh_p(y, H(x, y))^p`,
/// defined for finite `p` only. The envelope of the projection uses the same
/// `w` as `env_of_y`.
pub fn lb_improved<T: Sample>(
    x: &TimeSeries<T>,
    y: &TimeSeries<T>,
    env_of_y: &Envelope<T>,
    p: Exponent,
    abandon_at: Option<T>,
) -> Result<BoundValue<T>> {
    let p = match p {
        Exponent::Finite(p) => p,
        Exponent::Infinity => {
            return Err(Error::UnsupportedExponent(
                "LB_Improved is defined for finite p only".into(),
            ))
        }
    };
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    check_inputs(x.len(), env_of_y.len(), abandon_at)?;
    let mut comparisons = 0u64;
    Ok(lb_improved_counted(
        x,
        y,
        env_of_y,
        p,
        abandon_at,
        &mut comparisons,
    ))
}

fn check_inputs<T: Sample>(xlen: usize, envlen: usize, abandon_at: Option<T>) -> Result<()> {
    if xlen != envlen {
        return Err(Error::LengthMismatch {
            left: xlen,
            right: envlen,
        });
    }
    if let Some(t) = abandon_at {
        if t < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "abandonment threshold must be nonnegative, got {t}"
            )));
        }
    }
    Ok(())
}

/// LB_Keogh inner loop. `comparisons` accrues comparisons between
/// data-point values (one when the sample exceeds the upper bound, two
/// otherwise), matching the budget accounting of the scan algorithms.
pub(crate) fn lb_keogh_counted<T: Sample>(
    x: &[T],
    upper: &[T],
    lower: &[T],
    p: Exponent,
    abandon_at: Option<T>,
    comparisons: &mut u64,
) -> BoundValue<T> {
    match p {
        Exponent::Finite(p) => {
            let threshold = abandon_at.map(|t| pow_p(t, p));
            let mut sum = T::zero();
            for i in 0..x.len() {
                *comparisons += 1;
                if x[i] > upper[i] {
                    sum = sum + pow_p(x[i] - upper[i], p);
                } else {
                    *comparisons += 1;
                    if x[i] < lower[i] {
                        sum = sum + pow_p(lower[i] - x[i], p);
                    }
                }
                if let Some(t) = threshold {
                    if sum >= t {
                        return BoundValue {
                            value: root_p(sum, p),
                            abandoned: true,
                        };
                    }
                }
            }
            BoundValue {
                value: root_p(sum, p),
                abandoned: false,
            }
        }
        Exponent::Infinity => {
            let mut max = T::zero();
            for i in 0..x.len() {
                *comparisons += 1;
                if x[i] > upper[i] {
                    max = max.max(x[i] - upper[i]);
                } else {
                    *comparisons += 1;
                    if x[i] < lower[i] {
                        max = max.max(lower[i] - x[i]);
                    }
                }
                if let Some(t) = abandon_at {
                    if max >= t {
                        return BoundValue {
                            value: max,
                            abandoned: true,
                        };
                    }
                }
            }
            BoundValue {
                value: max,
                abandoned: false,
            }
        }
    }
}

/// First pass of the two-pass bound: LB_Keogh power sum plus the projection
/// `x' = H(x, y)` written into `proj`. With `abandon_power` set, returns as
/// soon as the sum reaches it (leaving `proj` incomplete — the caller
/// prunes the candidate in that case).
pub(crate) fn lb_keogh_project_counted<T: Sample>(
    x: &[T],
    upper: &[T],
    lower: &[T],
    p: u32,
    abandon_power: Option<T>,
    proj: &mut Vec<T>,
    comparisons: &mut u64,
) -> T {
    proj.clear();
    proj.extend_from_slice(x);
    let mut sum = T::zero();
    for i in 0..x.len() {
        *comparisons += 1;
        if x[i] > upper[i] {
            sum = sum + pow_p(x[i] - upper[i], p);
            proj[i] = upper[i];
        } else {
            *comparisons += 1;
            if x[i] < lower[i] {
                sum = sum + pow_p(lower[i] - x[i], p);
                proj[i] = lower[i];
            }
        }
        if let Some(t) = abandon_power {
            if sum >= t {
                return sum;
            }
        }
    }
    sum
}

/// Second pass: add `LB_Keogh_p(y, x')^p` against the envelope of the
/// projection, in power space, on top of `base`.
pub(crate) fn second_pass_counted<T: Sample>(
    y: &[T],
    proj: &[T],
    w: usize,
    p: u32,
    base: T,
    abandon_power: Option<T>,
    comparisons: &mut u64,
) -> T {
    let (env, env_comparisons) = envelope_streaming_counted(proj, w);
    *comparisons += env_comparisons;
    let mut sum = base;
    for i in 0..y.len() {
        *comparisons += 1;
        if y[i] > env.upper()[i] {
            sum = sum + pow_p(y[i] - env.upper()[i], p);
        } else {
            *comparisons += 1;
            if y[i] < env.lower()[i] {
                sum = sum + pow_p(env.lower()[i] - y[i], p);
            }
        }
        if let Some(t) = abandon_power {
            if sum >= t {
                return sum;
            }
        }
    }
    sum
}

pub(crate) fn lb_improved_counted<T: Sample>(
    x: &[T],
    y: &[T],
    env_of_y: &Envelope<T>,
    p: u32,
    abandon_at: Option<T>,
    comparisons: &mut u64,
) -> BoundValue<T> {
    let threshold = abandon_at.map(|t| pow_p(t, p));
    let mut proj = Vec::new();
    let sum = lb_keogh_project_counted(
        x,
        env_of_y.upper(),
        env_of_y.lower(),
        p,
        threshold,
        &mut proj,
        comparisons,
    );
    if let Some(t) = threshold {
        if sum >= t {
            return BoundValue {
                value: root_p(sum, p),
                abandoned: true,
            };
        }
    }
    let total = second_pass_counted(y, &proj, env_of_y.w(), p, sum, threshold, comparisons);
    let abandoned = matches!(threshold, Some(t) if total >= t);
    BoundValue {
        value: root_p(total, p),
        abandoned,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtw::{dtw, dtw_bruteforce};
    use crate::envelope::envelope_streaming;
    use crate::norms::lp_dist;
    use crate::params::SearchParams;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    const EPS: f64 = 1e-9;

    #[test]
    fn projection_clamps() {
        let y = ts(&[0.0, 0.0, 0.0, 0.0]);
        let env = envelope_streaming(&y, 1);
        let x = ts(&[2.0, 2.0, 0.0, 0.0]);
        let h = project(&x, &env).unwrap();
        assert_eq!(h.series().samples(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn projection_identity_inside() {
        let env = envelope_streaming(&ts(&[0.0, 5.0, 0.0]), 1);
        let x = ts(&[0.0, 0.0, 0.0]);
        let h = project(&x, &env).unwrap();
        assert_eq!(h.series().samples(), x.samples());

        // values inside the band stay put
        let env2 = envelope_streaming(&ts(&[1.0, 3.0, 2.0]), 1);
        let inside = ts(&[2.0, 2.5, 2.0]);
        assert_eq!(project(&inside, &env2).unwrap().series().samples(), inside.samples());
    }

    #[test]
    fn keogh_zero_inside_envelope() {
        let env = envelope_streaming(&ts(&[0.0, 5.0, 0.0]), 1);
        let x = ts(&[0.0, 0.0, 0.0]);
        let b = lb_keogh(&x, &env, Exponent::Finite(1), None).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(!b.abandoned);
    }

    #[test]
    fn keogh_with_zero_window_is_lp_dist() {
        let x = ts(&[1.0, -2.0, 0.5, 3.0]);
        let y = ts(&[0.0, 1.0, 0.5, -1.0]);
        let env = envelope_streaming(&y, 0);
        for p in [Exponent::Finite(1), Exponent::Finite(2), Exponent::Infinity] {
            let b = lb_keogh(&x, &env, p, None).unwrap();
            assert!((b.value - lp_dist(&x, &y, p).unwrap()).abs() < EPS);
        }
    }

    #[test]
    fn keogh_hand_expanded() {
        let env = envelope_streaming(&ts(&[0.0, 0.0, 0.0, 0.0]), 1);
        let x = ts(&[2.0, 2.0, 0.0, 0.0]);
        let b = lb_keogh(&x, &env, Exponent::Finite(1), None).unwrap();
        assert!((b.value - 4.0).abs() < EPS);
    }

    #[test]
    fn improved_fixture_tight() {
        // x=(0,0,0), y=(0,5,0), w=1, p=1: first term 0, second term 5
        let x = ts(&[0.0, 0.0, 0.0]);
        let y = ts(&[0.0, 5.0, 0.0]);
        let env = envelope_streaming(&y, 1);
        let b = lb_improved(&x, &y, &env, Exponent::Finite(1), None).unwrap();
        assert!((b.value - 5.0).abs() < EPS);
        let d = dtw_bruteforce(&x, &y, &SearchParams::new(Exponent::Finite(1), 1)).unwrap();
        assert!((b.value - d).abs() < EPS, "bound is tight here");
    }

    #[test]
    fn improved_second_term_zero() {
        // x=(2,2,0,0), y=(0,0,0,0): H=(0,0,0,0), y inside env(H)
        let x = ts(&[2.0, 2.0, 0.0, 0.0]);
        let y = ts(&[0.0, 0.0, 0.0, 0.0]);
        let env = envelope_streaming(&y, 1);
        let b = lb_improved(&x, &y, &env, Exponent::Finite(1), None).unwrap();
        assert!((b.value - 4.0).abs() < EPS);
    }

    #[test]
    fn improved_rejects_infinity() {
        let x = ts(&[0.0, 0.0]);
        let env = envelope_streaming(&x, 1);
        assert!(matches!(
            lb_improved(&x, &x, &env, Exponent::Infinity, None),
            Err(Error::UnsupportedExponent(_))
        ));
    }

    #[test]
    fn early_abandoning_is_sound() {
        let x = ts(&[10.0, 10.0, 10.0, 10.0]);
        let y = ts(&[0.0, 0.0, 0.0, 0.0]);
        let env = envelope_streaming(&y, 1);
        let exact = lb_keogh(&x, &env, Exponent::Finite(1), None).unwrap();
        let cut = lb_keogh(&x, &env, Exponent::Finite(1), Some(5.0)).unwrap();
        assert!(cut.abandoned);
        assert!(cut.value >= 5.0);
        assert!(exact.value >= cut.value);
        assert!(!exact.abandoned);

        let low = lb_keogh(&x, &env, Exponent::Finite(1), Some(1e6)).unwrap();
        assert!(!low.abandoned);
        assert_eq!(low.value, exact.value);
    }

    proptest! {
        /// Sandwich: 0 <= LB_Keogh <= LB_Improved <= DTW for finite p,
        /// and LB_Keogh <= DTW at p = inf.
        #[test]
        fn bound_chain(
            xv in proptest::collection::vec(-10.0f64..10.0, 2..24),
            yv in proptest::collection::vec(-10.0f64..10.0, 2..24),
            w in 0usize..24,
        ) {
            let n = xv.len().min(yv.len());
            let x = ts(&xv[..n]);
            let y = ts(&yv[..n]);
            let env = envelope_streaming(&y, w);
            for p in [Exponent::Finite(1), Exponent::Finite(2), Exponent::Finite(4)] {
                let keogh = lb_keogh(&x, &env, p, None).unwrap().value;
                let improved = lb_improved(&x, &y, &env, p, None).unwrap().value;
                let d = dtw(&x, &y, &SearchParams::new(p, w)).unwrap();
                prop_assert!(keogh >= 0.0);
                prop_assert!(keogh <= improved + EPS);
                prop_assert!(improved <= d + EPS, "p={p} w={w}");
            }
            let keogh_inf = lb_keogh(&x, &env, Exponent::Infinity, None).unwrap().value;
            let d_inf = dtw(&x, &y, &SearchParams::new(Exponent::Infinity, w)).unwrap();
            prop_assert!(keogh_inf <= d_inf + EPS);
        }

        /// Power-sum form: LB_Keogh^p + DTW(h, y)^p <= DTW(x, y)^p.
        #[test]
        fn power_sum_decomposition(
            xv in proptest::collection::vec(-5.0f64..5.0, 2..8),
            yv in proptest::collection::vec(-5.0f64..5.0, 2..8),
            w in 0usize..8,
        ) {
            let n = xv.len().min(yv.len());
            let x = ts(&xv[..n]);
            let y = ts(&yv[..n]);
            let env = envelope_streaming(&y, w);
            for p in [1u32, 2u32] {
                let pe = Exponent::Finite(p);
                let pr = SearchParams::new(pe, w);
                let keogh = lb_keogh(&x, &env, pe, None).unwrap().value;
                let h = project(&x, &env).unwrap().into_series();
                let d_hy = dtw_bruteforce(&h, &y, &pr).unwrap();
                let d_xy = dtw_bruteforce(&x, &y, &pr).unwrap();
                let fp = f64::from(p);
                prop_assert!(
                    keogh.powf(fp) + d_hy.powf(fp) <= d_xy.powf(fp) + EPS,
                    "p={p} w={w}"
                );
            }
        }

        /// Approximation error: DTW - LB_Keogh <= ||H(x,y) - y||_p, and the
        /// coarser envelope-width bound.
        #[test]
        fn approximation_error_bounds(
            xv in proptest::collection::vec(-10.0f64..10.0, 2..20),
            yv in proptest::collection::vec(-10.0f64..10.0, 2..20),
            w in 0usize..20,
        ) {
            let n = xv.len().min(yv.len());
            let x = ts(&xv[..n]);
            let y = ts(&yv[..n]);
            let env = envelope_streaming(&y, w);
            for p in [Exponent::Finite(1), Exponent::Finite(2), Exponent::Infinity] {
                let keogh = lb_keogh(&x, &env, p, None).unwrap().value;
                let d = dtw(&x, &y, &SearchParams::new(p, w)).unwrap();
                let h = project(&x, &env).unwrap().into_series();
                let hy = lp_dist(&h, &y, p).unwrap();
                prop_assert!(d - keogh <= hy + EPS);

                let widths: Vec<f64> = (0..n)
                    .map(|i| (env.upper()[i] - y[i]).max(y[i] - env.lower()[i]))
                    .collect();
                let width_norm = crate::norms::lp_norm(&widths, p).unwrap();
                prop_assert!(d - keogh <= width_norm + EPS);
            }
        }

        /// Value-separated series: the l1 error decomposition is exact.
        #[test]
        fn value_separated_exact_decomposition(
            xa in proptest::collection::vec(0.0f64..5.0, 2..10),
            ya in proptest::collection::vec(0.0f64..5.0, 2..10),
            c in -2.0f64..2.0,
        ) {
            let n = xa.len().min(ya.len());
            let xs: Vec<f64> = xa[..n].iter().map(|v| c + v).collect();
            let ys: Vec<f64> = ya[..n].iter().map(|v| c - v).collect();
            let x = ts(&xs);
            let y = ts(&ys);
            let env = envelope_streaming(&y, n); // full-width envelope
            let keogh = lb_keogh(&x, &env, Exponent::Finite(1), None).unwrap().value;
            let h = project(&x, &env).unwrap().into_series();
            let hy = lp_dist(&h, &y, Exponent::Finite(1)).unwrap();
            let xy = lp_dist(&x, &y, Exponent::Finite(1)).unwrap();
            let d = dtw(&x, &y, &SearchParams::new(Exponent::Finite(1), n)).unwrap();
            prop_assert!((d - xy).abs() < EPS);
            prop_assert!((keogh + hy - xy).abs() < EPS);
        }
    }
}
