//! Gamma family, Bessel `J_ν` of real order and explicit pointwise bounds.

mod bessel;
mod gamma;
mod pointwise;

pub use bessel::{bessel_j, bessel_j_scaled, bessel_zeros, MAX_ARG, MAX_ORDER};
pub use gamma::{gamma, ln_gamma, stirling_bounds, GAMMA_MAX_ARG, GAMMA_REL_ERR};
pub use pointwise::{krasikov_bound, landau_constant, power_bound, surface_area, LANDAU};

use crate::error::{domain, Result};

/// A nonnegative Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return domain(format!("Bessel order must be finite and >= 0, got {nu}"));
        }
        Ok(Self(nu))
    }

    /// `d/2 - 1 + k`, the order attached to dimension `d` and degree `k`.
    pub fn from_dim(d: u32, k: u32) -> Result<Self> {
        if d < 2 {
            return domain(format!("dimension must be >= 2, got {d}"));
        }
        Ok(Self(0.5 * d as f64 - 1.0 + k as f64))
    }

    pub fn nu(self) -> f64 {
        self.0
    }
}
