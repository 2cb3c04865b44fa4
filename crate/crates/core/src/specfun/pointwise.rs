//! Explicit pointwise bounds for `J_ν` and a few geometric constants.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

use super::gamma::{gamma, ln_gamma};

/// Upper bound for `sup_{ν, r > 0} |r^{1/3} J_ν(r)|`.
///
/// The supremum is `0.78574687…`; the stored value is rounded up so that
/// every use as an upper bound stays valid.
pub const LANDAU: f64 = 0.785747;

/// See [`LANDAU`].
pub fn landau_constant() -> f64 {
    LANDAU
}

/// `r^ν / (2^ν Γ(ν+1))`, an upper bound for `|J_ν(r)|` when `ν >= 0`.
pub fn power_bound(nu: f64, r: f64) -> Result<f64> {
    if !nu.is_finite() || nu < 0.0 {
        return domain(format!("power_bound requires nu >= 0, got {nu}"));
    }
    if !r.is_finite() || r <= 0.0 {
        return domain(format!("power_bound requires r > 0, got {r}"));
    }
    if nu == 0.0 {
        return Ok(1.0);
    }
    let ln = nu * (0.5 * r).ln() - ln_gamma(nu + 1.0)?;
    let v = ln.exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("power_bound({nu}, {r})")));
    }
    Ok(v)
}

/// `r^{-1/2}`, an upper bound for `|J_ν(r)|` when `ν >= 1/2` and `r > 3ν/2`.
pub fn krasikov_bound(nu: f64, r: f64) -> Result<f64> {
    if !(nu >= 0.5) {
        return domain(format!("Krasikov bound needs nu >= 1/2, got nu = {nu}"));
    }
    if !(r > 1.5 * nu) || !r.is_finite() {
        return domain(format!(
            "Krasikov bound needs r > 3 nu / 2 = {}, got r = {r}",
            1.5 * nu
        ));
    }
    Ok(r.powf(-0.5))
}

/// Surface area `2 π^{d/2} / Γ(d/2)` of the unit sphere in `R^d`.
pub fn surface_area(d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("surface_area requires d >= 2, got {d}"));
    }
    let h = 0.5 * d as f64;
    if h <= 170.0 {
        Ok(2.0 * PI.powf(h) / gamma(h)?)
    } else {
        Ok((2f64.ln() + h * PI.ln() - ln_gamma(h)?).exp())
    }
}
