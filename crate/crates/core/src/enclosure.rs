//! Two-sided error intervals.
//!
//! An [`Enclosure`] is the currency of every computed quantity in this crate:
//! a pair `lo <= hi` of finite doubles that is claimed to contain the true
//! real value. The arithmetic here is not directed-rounding interval
//! arithmetic; operations widen their result by a small fixed number of ulps
//! instead (see [`ROUNDING_ULPS`]).

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of ulps added on each side by every arithmetic stage.
pub const ROUNDING_ULPS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    /// Builds an enclosure, rejecting reversed or non-finite endpoints.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite(format!("enclosure [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Domain(format!("enclosure with lo {lo} > hi {hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate enclosure of an exactly representable value.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[mid - radius, mid + radius]`.
    pub fn around(mid: f64, radius: f64) -> Self {
        let r = radius.abs();
        Self {
            lo: mid - r,
            hi: mid + r,
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Largest absolute value of any point in the enclosure.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Enclosure of `|x|` for `x` in `self`.
    pub fn abs(&self) -> Self {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            Self {
                lo: -self.hi,
                hi: -self.lo,
            }
        } else {
            Self {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    /// Widens both ends by `ulps` units in the last place of the magnitude.
    pub fn inflate_ulps(&self, ulps: f64) -> Self {
        let pad = ulps * f64::EPSILON * self.mag();
        Self {
            lo: self.lo - pad,
            hi: self.hi + pad,
        }
    }

    /// Widens both ends by an absolute amount.
    pub fn inflate(&self, pad: f64) -> Self {
        let pad = pad.abs();
        Self {
            lo: self.lo - pad,
            hi: self.hi + pad,
        }
    }

    /// Image under a nondecreasing map, with the rounding cushion applied.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            lo: f(self.lo),
            hi: f(self.hi),
        }
        .inflate_ulps(ROUNDING_ULPS)
    }

    /// Image of a nonnegative enclosure under `x -> x^p`, `p > 0`.
    ///
    /// Negative lower ends (from rounding cushions) are clamped to zero first.
    pub fn powf_nonneg(&self, p: f64) -> Self {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        let out = Self {
            lo: lo.powf(p),
            hi: hi.powf(p),
        }
        .inflate_ulps(ROUNDING_ULPS);
        Self {
            lo: out.lo.max(0.0),
            hi: out.hi,
        }
    }

    /// Multiplication by an exact positive scalar.
    pub fn scale(&self, c: f64) -> Self {
        let (a, b) = (self.lo * c, self.hi * c);
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
        .inflate_ulps(ROUNDING_ULPS)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl Add for Enclosure {
    type Output = Enclosure;

    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
        .inflate_ulps(ROUNDING_ULPS)
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;

    fn mul(self, rhs: Enclosure) -> Enclosure {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Enclosure { lo, hi }.inflate_ulps(ROUNDING_ULPS)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15e}, {:.15e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reversed_and_nan() {
        assert!(Enclosure::new(1.0, 0.0).is_err());
        assert!(Enclosure::new(f64::NAN, 0.0).is_err());
        assert!(Enclosure::new(0.0, f64::INFINITY).is_err());
        assert!(Enclosure::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn abs_straddling_zero() {
        let e = Enclosure { lo: -0.5, hi: 0.25 };
        assert_eq!(e.abs(), Enclosure { lo: 0.0, hi: 0.5 });
        let n = Enclosure { lo: -0.5, hi: -0.25 };
        assert_eq!(n.abs(), Enclosure { lo: 0.25, hi: 0.5 });
    }

    #[test]
    fn powf_contains_exact_image() {
        let e = Enclosure { lo: 0.2, hi: 0.3 }.powf_nonneg(10.0 / 3.0);
        assert!(e.contains(0.2f64.powf(10.0 / 3.0)));
        assert!(e.contains(0.3f64.powf(10.0 / 3.0)));
    }

    #[test]
    fn sum_contains_endpoint_sums() {
        let s = Enclosure::point(0.1) + Enclosure::point(0.2);
        assert!(s.contains(0.30000000000000004));
        assert!(s.contains(0.3));
    }
}
