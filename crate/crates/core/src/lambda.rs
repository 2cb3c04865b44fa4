//! Weighted Bessel norms
//! `Λ_{d,q}(k) = ( ∫_0^∞ |r^{1-d/2} J_{d/2-1+k}(r)|^q r^{d-1} dr )^{1/q}`
//! and the sup-norm variant `Λ_{d,∞}(k) = sup_r |r^{1-d/2} J_{d/2-1+k}(r)|`.
//!
//! Finite-`q` norms are split at a cutoff `R`: the head `∫_0^R` is integrated
//! numerically and the tail `∫_R^∞` is bounded in closed form using
//! `|J_ν(r)| <= r^{-1/2}` for `ν >= 1/2`, `r > 3ν/2`.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with_breaks, maximize};
use crate::specfun::{bessel_j_scaled, bessel_zeros, gamma, ln_gamma, Order, GAMMA_REL_ERR};

/// Default cutoff between head integral and analytic tail.
pub const DEFAULT_CUTOFF: f64 = 200.0;
/// Default absolute tolerance of head integrals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Integrability exponent: an exact positive rational, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl Exponent {
    pub fn finite(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return domain("exponent with zero denominator");
        }
        let q = Ratio::new(numer, denom);
        if q <= Ratio::from_integer(0) {
            return domain(format!("exponent must be positive, got {q}"));
        }
        Ok(Self::Finite(q))
    }

    pub fn integer(q: i64) -> Result<Self> {
        Self::finite(q, 1)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Floating-point value; `f64::INFINITY` for `Infinity`.
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(q) => *q.numer() as f64 / *q.denom() as f64,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn ratio(&self) -> Option<Ratio<i64>> {
        match self {
            Self::Finite(q) => Some(*q),
            Self::Infinity => None,
        }
    }

    /// The Tomas–Stein exponent `2(d+1)/(d-1)`.
    pub fn tomas_stein(d: u32) -> Result<Self> {
        if d < 2 {
            return domain(format!("dimension must be >= 2, got {d}"));
        }
        Self::finite(2 * (d as i64 + 1), d as i64 - 1)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Self::Infinity);
        }
        let parse = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Domain(format!("cannot parse exponent {s:?}; expected INT, A/B or inf")))
        };
        match t.split_once('/') {
            Some((n, d)) => Self::finite(parse(n)?, parse(d)?),
            None => Self::finite(parse(t)?, 1),
        }
    }
}

impl From<Exponent> for String {
    fn from(q: Exponent) -> String {
        q.to_string()
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Coordinates `(d, q, k)` of one Bessel norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub d: u32,
    pub q: Exponent,
    pub k: u32,
}

impl ProblemSpec {
    /// Validates `d >= 2` and, for finite `q`, `q > 2d/(d-1)`.
    pub fn new(d: u32, q: Exponent, k: u32) -> Result<Self> {
        if d < 2 {
            return domain(format!("dimension must be >= 2, got {d}"));
        }
        if let Exponent::Finite(r) = q {
            let d = d as i64;
            if *r.numer() * (d - 1) <= 2 * d * *r.denom() {
                return domain(format!("q = {r} must exceed 2d/(d-1) = {}", Ratio::new(2 * d, d - 1)));
            }
        }
        Ok(Self { d, q, k })
    }

    pub fn order(&self) -> Order {
        Order::from_dim(self.d, self.k).expect("validated dimension")
    }

    pub fn nu(&self) -> f64 {
        self.order().nu()
    }

    fn finite_q(&self) -> Result<Ratio<i64>> {
        self.q
            .ratio()
            .ok_or_else(|| Error::Domain("this operation needs a finite q; use lambda_inf for q = inf".into()))
    }
}

/// Certified value of one Bessel norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaResult {
    pub spec: ProblemSpec,
    /// `Λ^q` for finite `q`, `Λ` itself for `q = ∞`.
    pub power: Enclosure,
    pub lambda: Enclosure,
    pub cutoff_r: f64,
    pub head: Enclosure,
    pub tail_hi: f64,
    /// True when the requested cutoff was raised to satisfy `R > 3ν/2`.
    pub cutoff_raised: bool,
}

/// Integrand `|r^{1-d/2} J_ν(r)|^q r^{d-1}` written as `|r^k s(r)|^q r^{d-1}`
/// with `s(r) = r^{-ν} J_ν(r)`.
fn integrand(d: u32, k: u32, nu: f64, q: f64) -> impl Fn(f64) -> Result<Enclosure> + Sync {
    move |r: f64| {
        let s = bessel_j_scaled(nu, r)?.abs();
        let base = if k == 0 { s } else { s.scale(r.powi(k as i32)) };
        let p = base.powf_nonneg(q);
        Ok(if d == 1 { p } else { p.scale(r.powi(d as i32 - 1)) })
    }
}

/// `∫_0^R |r^{1-d/2} J_ν(r)|^q r^{d-1} dr`, with the zeros of `J_ν` used
/// as panel boundaries.
pub fn lambda_head(spec: &ProblemSpec, cutoff: f64, tol: f64) -> Result<Enclosure> {
    let q = spec.finite_q()?;
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return domain(format!("cutoff must be positive and finite, got {cutoff}"));
    }
    let nu = spec.nu();
    let mut breaks = vec![0.0];
    breaks.extend(bessel_zeros(nu, cutoff)?.into_iter().filter(|&z| z > 0.0 && z < cutoff));
    breaks.push(cutoff);
    breaks.dedup();
    let qf = *q.numer() as f64 / *q.denom() as f64;
    let f = integrand(spec.d, spec.k, nu, qf);
    Ok(integrate_with_breaks(f, &breaks, tol)?.value)
}

/// Closed-form upper bound for `∫_R^∞ |r^{1-d/2} J_ν(r)|^q r^{d-1} dr`:
/// `R^{d - q(d-1)/2} / (q(d-1)/2 - d)`.
///
/// Needs `ν >= 1/2`, `R > 3ν/2` and `q(d-1)/2 > d`. For `ν < 1/2` the
/// bound `|J_ν(r)| <= sqrt(2/(πr))` is used instead, which multiplies the
/// result by `(2/π)^{q/2}`.
pub fn lambda_tail_bound(spec: &ProblemSpec, cutoff: f64) -> Result<f64> {
    let q = spec.finite_q()?;
    let nu = spec.nu();
    let d = Ratio::from_integer(spec.d as i64);
    let decay = q * (d - 1) / 2;
    if decay <= d {
        return domain(format!("tail not integrable: q(d-1)/2 = {decay} must exceed d = {d}"));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return domain(format!("cutoff must be positive and finite, got {cutoff}"));
    }
    let envelope = if nu >= 0.5 {
        if cutoff <= 1.5 * nu {
            return domain(format!(
                "tail bound needs |J_nu(r)| <= r^(-1/2), valid for r > 3 nu / 2 = {}; got R = {cutoff}",
                1.5 * nu
            ));
        }
        1.0
    } else {
        (2.0 / PI).powf(0.5 * (*q.numer() as f64 / *q.denom() as f64))
    };
    let expo = d - decay;
    let denom = decay - d;
    let power = if expo.is_integer() {
        cutoff.powi(expo.to_integer() as i32)
    } else {
        cutoff.powf(*expo.numer() as f64 / *expo.denom() as f64)
    };
    let denom = *denom.numer() as f64 / *denom.denom() as f64;
    Ok(envelope * power / denom)
}

/// `Λ_{d,q}(k)` for finite `q`.
///
/// ```
/// use vega_sharp::lambda::{lambda, Exponent, ProblemSpec};
/// let spec = ProblemSpec::new(4, "10/3".parse::<Exponent>().unwrap(), 0).unwrap();
/// let res = lambda(&spec, 200.0, 1e-9).unwrap();
/// assert!(res.head.lo >= 0.257 && res.head.hi < 0.258);
/// assert_eq!(res.tail_hi, 0.005);
/// ```
pub fn lambda(spec: &ProblemSpec, cutoff: f64, tol: f64) -> Result<LambdaResult> {
    let q = spec.finite_q()?;
    let nu = spec.nu();
    let mut cutoff_r = cutoff;
    let mut cutoff_raised = false;
    if nu >= 0.5 && cutoff <= 1.5 * nu {
        cutoff_r = 1.6 * nu;
        cutoff_raised = true;
        log::warn!("cutoff {cutoff} violates R > 3 nu / 2 for nu = {nu}; raised to {cutoff_r}");
    }
    let head = lambda_head(spec, cutoff_r, tol)?;
    let tail_hi = lambda_tail_bound(spec, cutoff_r)?;
    let power = Enclosure {
        lo: head.lo.max(0.0),
        hi: head.hi + tail_hi,
    };
    let inv_q = *q.denom() as f64 / *q.numer() as f64;
    Ok(LambdaResult {
        spec: *spec,
        power,
        lambda: power.powf_nonneg(inv_q),
        cutoff_r,
        head,
        tail_hi,
        cutoff_raised,
    })
}

/// `Λ_{d,4}(0)^4 = Γ(d/2-1) Γ(d-2) / (2π Γ(d/2-1/2)^2 Γ(3d/2-3))`, for `d >= 3`.
pub fn lambda4_closed(d: u32) -> Result<f64> {
    if d < 3 {
        return domain(format!("closed form needs d >= 3 (order d/2 - 1 > 0), got {d}"));
    }
    let h = 0.5 * d as f64;
    let top = 1.5 * d as f64 - 3.0;
    if top <= 170.0 {
        let g = |x| gamma(x);
        let half = g(h - 0.5)?;
        Ok(g(h - 1.0)? * g(d as f64 - 2.0)? / (2.0 * PI * half * half * g(top)?))
    } else {
        let l = ln_gamma(h - 1.0)? + ln_gamma(d as f64 - 2.0)?
            - (2.0 * PI).ln()
            - 2.0 * ln_gamma(h - 0.5)?
            - ln_gamma(top)?;
        Ok(l.exp())
    }
}

/// `1 / (2^{d/2-1} Γ(d/2))`, the value of `Λ_{d,∞}(0)`.
pub fn lambda_inf_zero(d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("dimension must be >= 2, got {d}"));
    }
    let h = 0.5 * d as f64;
    if h <= 170.0 {
        Ok(1.0 / (2f64.powf(h - 1.0) * gamma(h)?))
    } else {
        Ok((-(h - 1.0) * LN_2 - ln_gamma(h)?).exp())
    }
}

/// `Λ_{d,∞}(k)`. For `k >= 1` the supremum is located on `[0, R_search]`
/// and `R_search` is doubled until `r^{-(d-1)/2}` at `R_search` (a bound for
/// the function beyond it) falls below the interior maximum.
pub fn lambda_inf(d: u32, k: u32, search: Option<f64>) -> Result<Enclosure> {
    let zero = lambda_inf_zero(d)?;
    if k == 0 {
        return Ok(Enclosure::around(zero, 2.0 * GAMMA_REL_ERR * zero));
    }
    let nu = Order::from_dim(d, k)?.nu();
    let mut reach = search.unwrap_or(3.0 * nu + 50.0).max(1.5 * nu + 1.0);
    let decay = 0.5 * (d as f64 - 1.0);
    loop {
        let f = move |r: f64| {
            let s = bessel_j_scaled(nu, r)?.abs();
            Ok(s.scale(r.powi(k as i32)))
        };
        let (_, value) = maximize(f, 0.0, reach, 1e-10)?;
        if reach.powf(-decay) < value.lo {
            return Ok(value);
        }
        reach *= 2.0;
        if reach > crate::specfun::MAX_ARG {
            return Err(Error::Range(format!(
                "cannot certify the supremum for d = {d}, k = {k} within r <= {}",
                crate::specfun::MAX_ARG
            )));
        }
    }
}

/// Explicit lower bound for `Λ_{d,q}(0)`:
/// `(2^{d-1}(d/2)^{d/2})^{1/q} / (2^{d/2-1}Γ(d/2)) · (Γ(q+1)Γ(d/2)/Γ(q+d/2+1))^{1/q}`.
pub fn lambda0_lower_bound(d: u32, q: Exponent) -> Result<f64> {
    let spec = ProblemSpec::new(d, q, 0)?;
    let qf = spec.finite_q().map(|r| *r.numer() as f64 / *r.denom() as f64)?;
    let h = 0.5 * d as f64;
    let ln = ((d as f64 - 1.0) * LN_2 + h * h.ln()) / qf - ((h - 1.0) * LN_2 + ln_gamma(h)?)
        + (ln_gamma(qf + 1.0)? + ln_gamma(h)? - ln_gamma(qf + h + 1.0)?) / qf;
    Ok(ln.exp())
}

/// `1 - r^2 / (4(ν+1))`, a lower bound for `Γ(ν+1)(r/2)^{-ν} J_ν(r)` on
/// `0 <= r <= 2 sqrt(ν+1)`.
pub fn quadratic_minorant(nu: f64, r: f64) -> Result<f64> {
    Order::new(nu)?;
    let edge = 2.0 * (nu + 1.0).sqrt();
    if !(0.0..=edge).contains(&r) {
        return domain(format!("quadratic minorant needs 0 <= r <= 2 sqrt(nu + 1) = {edge}, got {r}"));
    }
    Ok(1.0 - r * r / (4.0 * (nu + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!(q("10/3"), Exponent::Finite(Ratio::new(10, 3)));
        assert_eq!(q("20/6"), q("10/3"));
        assert_eq!(q("inf"), Exponent::Infinity);
        assert_eq!(q("4").to_string(), "4");
        assert!("0".parse::<Exponent>().is_err());
        assert!("3.5".parse::<Exponent>().is_err());
        assert!("1/0".parse::<Exponent>().is_err());
        assert_eq!(Exponent::tomas_stein(4).unwrap(), q("10/3"));
    }

    #[test]
    fn admissibility() {
        assert!(ProblemSpec::new(4, q("8/3"), 0).is_err());
        assert!(ProblemSpec::new(4, q("3"), 0).is_ok());
        assert!(ProblemSpec::new(2, q("4"), 0).is_err());
        assert!(ProblemSpec::new(1, q("inf"), 0).is_err());
    }

    #[test]
    fn tail_closed_form() {
        for k in 0..=28 {
            let s = ProblemSpec::new(4, q("10/3"), k).unwrap();
            assert_eq!(lambda_tail_bound(&s, 200.0).unwrap(), 0.005);
            let s = ProblemSpec::new(5, q("3"), k).unwrap();
            assert_eq!(lambda_tail_bound(&s, 200.0).unwrap(), 0.005);
        }
        let s = ProblemSpec::new(4, q("10/3"), 0).unwrap();
        assert_eq!(lambda_tail_bound(&s, 400.0).unwrap(), 0.0025);
        let big = ProblemSpec::new(4, q("10/3"), 200).unwrap();
        assert!(lambda_tail_bound(&big, 200.0).is_err());
    }

    #[test]
    fn closed_forms() {
        assert!((lambda4_closed(4).unwrap() - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!((lambda4_closed(3).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(lambda4_closed(2).is_err());
        let far = lambda4_closed(120).unwrap();
        assert!(far > 0.0 && far < lambda4_closed(119).unwrap());
        assert_eq!(lambda_inf_zero(2).unwrap(), 1.0);
        assert!((lambda_inf_zero(4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_collapses_in_the_plane() {
        let v = lambda0_lower_bound(2, q("6")).unwrap();
        assert!((v - (2.0f64 / 7.0).powf(1.0 / 6.0)).abs() < 1e-13);
    }

    #[test]
    fn minorant_endpoints() {
        assert_eq!(quadratic_minorant(3.0, 0.0).unwrap(), 1.0);
        assert!(quadratic_minorant(3.0, 4.0).unwrap().abs() < 1e-15);
        assert_eq!(quadratic_minorant(1.0, 1.0).unwrap(), 0.875);
        assert!(quadratic_minorant(1.0, 3.0).is_err());
    }

    #[test]
    fn sup_of_first_order() {
        let v = lambda_inf(2, 1, None).unwrap();
        assert!((v.mid() - 0.581_865_224_281_596).abs() < 1e-10, "{v}");
    }

    #[test]
    fn auto_raised_cutoff() {
        let s = ProblemSpec::new(4, q("10/3"), 200).unwrap();
        let r = lambda(&s, 200.0, 1e-9).unwrap();
        assert!(r.cutoff_raised);
        assert!(r.cutoff_r > 1.5 * s.nu());
    }
}
