//! `l_p` norms and distances, and point-to-interval distance.

use crate::error::{Error, Result};
use crate::params::Exponent;
use crate::scalar::Sample;

/// `|v|^p` for finite `p`.
#[inline]
pub(crate) fn pow_p<T: Sample>(v: T, p: u32) -> T {
    let a = v.abs();
    match p {
        1 => a,
        2 => a * a,
        _ => a.powi(p as i32),
    }
}

/// `s^(1/p)` for finite `p`.
#[inline]
pub(crate) fn root_p<T: Sample>(s: T, p: u32) -> T {
    match p {
        1 => s,
        2 => s.sqrt(),
        _ => s.powf(T::one() / T::from(p).expect("small integer fits in float")),
    }
}

pub(crate) fn lp_norm_slice<T: Sample>(x: &[T], p: Exponent) -> T {
    match p {
        Exponent::Finite(p) => {
            let sum = x.iter().fold(T::zero(), |acc, &v| acc + pow_p(v, p));
            root_p(sum, p)
        }
        Exponent::Infinity => x.iter().fold(T::zero(), |acc, &v| acc.max(v.abs())),
    }
}

/// The `l_p` norm `(sum_i |x_i|^p)^(1/p)`, or `max_i |x_i|` for `p = inf`.
pub fn lp_norm<T: Sample>(x: &[T], p: Exponent) -> Result<T> {
    if x.is_empty() {
        return Err(Error::EmptyInput("lp_norm of an empty series"));
    }
    Ok(lp_norm_slice(x, p))
}

/// The `l_p` distance `||x - y||_p` between equal-length series.
pub fn lp_dist<T: Sample>(x: &[T], y: &[T], p: Exponent) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("lp_dist of empty series"));
    }
    Ok(match p {
        Exponent::Finite(p) => {
            let sum = x
                .iter()
                .zip(y)
                .fold(T::zero(), |acc, (&a, &b)| acc + pow_p(a - b, p));
            root_p(sum, p)
        }
        Exponent::Infinity => x
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())),
    })
}

/// Distance from a point to the interval `[lo, hi]`: zero inside, the gap
/// to the nearer endpoint outside.
pub fn point_interval_dist<T: Sample>(v: T, lo: T, hi: T) -> Result<T> {
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "interval bounds out of order: {lo} > {hi}"
        )));
    }
    Ok(point_interval_dist_unchecked(v, lo, hi))
}

#[inline]
pub(crate) fn point_interval_dist_unchecked<T: Sample>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        T::zero()
    }
}
