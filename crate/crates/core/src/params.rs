//! Search parameters: the norm exponent `p` and the locality constraint `w`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Norm exponent: a finite integer `p >= 1` or infinity (max norm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

impl Exponent {
    pub fn finite(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("exponent p must be >= 1".into()));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1/p` as a float, with `1/inf = 0`.
    pub fn inverse(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / f64::from(p),
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Exponent::Infinity),
            t => {
                let p: u32 = t.parse().map_err(|_| {
                    Error::InvalidParameter(format!("exponent must be an integer >= 1 or 'inf', got {s:?}"))
                })?;
                Exponent::finite(p)
            }
        }
    }
}

/// DTW search parameters.
///
/// `w` is the Sakoe-Chiba locality constraint in absolute samples; aligning
/// `x_i` with `y_j` is allowed only when `|i - j| <= w`. The effective band
/// is `min(w, n - 1)` since the window saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub p: Exponent,
    pub w: usize,
}

impl SearchParams {
    pub fn new(p: Exponent, w: usize) -> Self {
        Self { p, w }
    }

    /// Window from a fraction of the series length, `w = floor(fraction * n)`.
    pub fn with_window_fraction(p: Exponent, n: usize, fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidParameter(format!(
                "window fraction must lie in [0, 1], got {fraction}"
            )));
        }
        Ok(Self {
            p,
            w: (fraction * n as f64).floor() as usize,
        })
    }

    /// The customary default: `w = n/10`.
    pub fn with_default_window(p: Exponent, n: usize) -> Self {
        Self { p, w: n / 10 }
    }

    /// Band radius actually used for series of length `n`.
    pub fn effective_window(&self, n: usize) -> usize {
        self.w.min(n.saturating_sub(1))
    }

    /// Same parameters with the band wide open (`w >= n`).
    pub fn unconstrained(p: Exponent, n: usize) -> Self {
        Self { p, w: n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_parsing() {
        assert_eq!("1".parse::<Exponent>().unwrap(), Exponent::Finite(1));
        assert_eq!("4".parse::<Exponent>().unwrap(), Exponent::Finite(4));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert!("0".parse::<Exponent>().is_err());
        assert!("-2".parse::<Exponent>().is_err());
        assert!("two".parse::<Exponent>().is_err());
    }

    #[test]
    fn window_fraction() {
        let p = SearchParams::with_window_fraction(Exponent::Finite(1), 128, 0.1).unwrap();
        assert_eq!(p.w, 12);
        let d = SearchParams::with_default_window(Exponent::Finite(1), 100);
        assert_eq!(d.w, 10);
        assert!(SearchParams::with_window_fraction(Exponent::Finite(1), 10, 1.5).is_err());
    }

    #[test]
    fn effective_window_clamps() {
        let p = SearchParams::new(Exponent::Finite(2), 100);
        assert_eq!(p.effective_window(10), 9);
        assert_eq!(p.effective_window(200), 100);
        assert_eq!(SearchParams::new(Exponent::Finite(2), 0).effective_window(1), 0);
    }
}
