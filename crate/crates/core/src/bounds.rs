//! Closed-form bounds: the decreasing majorant `U_{d,q}(k)` of `Λ_{d,q}(k)`,
//! the gap ratio `β(d)`, and the threshold search for `q₀(d)`.
//!
//! Everything gamma-heavy is evaluated in log space.

use std::f64::consts::{E, LN_2, PI};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lambda::Exponent;
use crate::specfun::{ln_gamma, LANDAU};

/// Reference value of `Λ_{2,6}(0)^6`, accurate to `5e-7`.
pub const LAMBDA_2_6_POWER: f64 = 0.336_828_0;
/// Upper end of the reference interval, used wherever a valid upper bound is needed.
pub const LAMBDA_2_6_POWER_HI: f64 = 0.336_828_5;

/// Ratio `b/a` between the power-bound region `[0, b]` and the start
/// `a = 3ν/2` of the `r^{-1/2}` region in [`endpoint_bound_power`].
/// Must stay below `4/(3e)` for the power-bound piece to decay.
pub const SPLIT_RATIO: f64 = 0.49;

fn q_as_f64(q: Ratio<i64>) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// True when `q > 2d/(d - 4/3)` or `q = ∞`.
pub fn in_decay_range(d: u32, q: Exponent) -> bool {
    match q {
        Exponent::Infinity => d >= 2,
        Exponent::Finite(r) => {
            let d = d as i64;
            d >= 2 && *r.numer() * (3 * d - 4) > 6 * d * *r.denom()
        }
    }
}

fn check_decay_range(d: u32, q: Exponent) -> Result<()> {
    if d < 2 {
        return domain(format!("dimension must be >= 2, got {d}"));
    }
    if !in_decay_range(d, q) {
        let edge = Ratio::new(6 * d as i64, 3 * d as i64 - 4);
        return domain(format!("the decreasing bound needs 2d/(d - 4/3) < q; here 2d/(d - 4/3) = {edge} and q = {q}"));
    }
    Ok(())
}

/// `ln U_{d,q}(k)`.
pub fn u_bound_ln(d: u32, q: Exponent, k: u32) -> Result<f64> {
    check_decay_range(d, q)?;
    let h = 0.5 * d as f64;
    let kf = k as f64;
    let denom = h + kf - 2.0 / 3.0;
    let lg = ln_gamma(h + kf)?;
    let ln_l = LANDAU.ln();
    Ok(match q {
        Exponent::Infinity => {
            let slope = -h + 2.0 / 3.0;
            (kf * ln_l + (h + kf - 1.0) * slope * LN_2 + slope * lg) / denom
        }
        Exponent::Finite(r) => {
            let qf = q_as_f64(r);
            let dq = d as f64 / qf;
            let slope = -h + 2.0 / 3.0 + dq;
            let last = 1.0 / (kf * qf + d as f64) + 1.0 / (qf * (h - 2.0 / 3.0) - d as f64);
            ((kf + dq) * ln_l + (h + kf - 1.0) * slope * LN_2 + slope * lg) / denom + last.ln() / qf
        }
    })
}

/// `U_{d,q}(k)`.
///
/// ```
/// use vega_sharp::{bounds::u_bound, lambda::Exponent};
/// // U_{4,∞}(0) = 1 / (2 Γ(2))
/// assert!((u_bound(4, Exponent::Infinity, 0).unwrap() - 0.5).abs() < 1e-14);
/// ```
pub fn u_bound(d: u32, q: Exponent, k: u32) -> Result<f64> {
    Ok(u_bound_ln(d, q, k)?.exp())
}

/// `U_{d,q}(k)^q` for finite `q`, `U_{d,∞}(k)` for `q = ∞`.
pub fn u_bound_power(d: u32, q: Exponent, k: u32) -> Result<f64> {
    let l = u_bound_ln(d, q, k)?;
    Ok(match q {
        Exponent::Infinity => l.exp(),
        Exponent::Finite(r) => (q_as_f64(r) * l).exp(),
    })
}

/// Checks `U(k) > U(k+1)` for `0 <= k < k_max`, together with the gamma
/// inequality `Γ(x) < x^{x-2/3}` behind it, for half-integers
/// `x ∈ (1, k_max + d/2]` (equality holds at `x = 1`).
pub fn u_bound_decreasing_check(d: u32, q: Exponent, k_max: u32) -> Result<bool> {
    check_decay_range(d, q)?;
    let mut prev = u_bound_ln(d, q, 0)?;
    for k in 1..=k_max {
        let next = u_bound_ln(d, q, k)?;
        if !(next < prev) {
            return Ok(false);
        }
        prev = next;
    }
    let top = 2 * k_max + d;
    for twice in 2..=top {
        let x = 0.5 * twice as f64;
        let lhs = ln_gamma(x)?;
        let rhs = (x - 2.0 / 3.0) * x.ln();
        let ok = if twice == 2 { lhs <= rhs } else { lhs < rhs };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn ln_beta_gap(d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("dimension must be >= 2, got {d}"));
    }
    let df = d as f64;
    Ok((6.0 * LANDAU.ln() + (3.0 * df - 6.0) * LN_2 + 6.0 * ln_gamma(0.5 * df)? - (3.0 * df - 4.0) * df.ln())
        / (3.0 * df + 2.0))
}

/// Gap ratio `β(d) = (L^6 2^{3d-6} Γ(d/2)^6 / d^{3d-4})^{1/(3d+2)} = U_{d,∞}(1) / U_{d,∞}(0)`.
pub fn beta_gap(d: u32) -> Result<f64> {
    Ok(ln_beta_gap(d)?.exp())
}

/// Precomputed pieces of the threshold inequality for one dimension.
#[derive(Debug, Clone, Copy)]
struct Threshold {
    d: u32,
    ln_lhs: f64,
    ln_beta: f64,
}

impl Threshold {
    fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return domain(format!("dimension must be >= 2, got {d}"));
        }
        let ln_beta = ln_beta_gap(d)?;
        let ln_lhs = if d == 2 {
            (0.5 * LAMBDA_2_6_POWER_HI).ln()
        } else {
            let df = d as f64;
            let h = 0.5 * df;
            let quartic = ln_gamma(h - 1.0)? + ln_gamma(df - 2.0)?
                - (2.0 * PI).ln()
                - 2.0 * ln_gamma(h - 0.5)?
                - ln_gamma(1.5 * df - 3.0)?;
            let sup0 = (h - 1.0) * LN_2 + ln_gamma(h)?;
            quartic + 4.0 * sup0 - ((df - 1.0) * LN_2 + h * h.ln() + ln_gamma(h)?)
        };
        Ok(Self { d, ln_lhs, ln_beta })
    }

    fn min_q(&self) -> f64 {
        if self.d == 2 {
            6.0
        } else {
            4.0
        }
    }

    fn ln_rhs(&self, q: f64) -> Result<f64> {
        if !(q >= self.min_q()) || !q.is_finite() {
            return domain(format!(
                "threshold inequality needs q >= {} for d = {}, got {q}",
                self.min_q(),
                self.d
            ));
        }
        Ok(if self.d == 2 {
            -(q - 6.0) * self.ln_beta - (q + 1.0).ln()
        } else {
            ln_gamma(q + 1.0)? - (q - 4.0) * self.ln_beta - ln_gamma(q + 0.5 * self.d as f64 + 1.0)?
        })
    }
}

/// Log-sides `(ln LHS, ln RHS)` of the sufficient condition for constants
/// to be the unique extremizers at exponent `q`.
pub fn threshold_sides(d: u32, q: f64) -> Result<(f64, f64)> {
    let t = Threshold::new(d)?;
    Ok((t.ln_lhs, t.ln_rhs(q)?))
}

/// `ln RHS - ln LHS` of the threshold inequality; nonnegative means the
/// sufficient condition holds at `q`. Needs `d >= 3, q >= 4` or `d = 2, q >= 6`.
pub fn threshold_residual(d: u32, q: f64) -> Result<f64> {
    let (l, r) = threshold_sides(d, q)?;
    Ok(r - l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    pub q: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub d: u32,
    pub q0_upper: f64,
    pub tol: f64,
    /// Bisection probes plus an evenly thinned subset of the window samples.
    pub grid_checked: Vec<ThresholdSample>,
    pub samples_checked: usize,
    /// Smallest residual seen over the verified window.
    pub min_residual: f64,
    pub method_note: String,
}

const TRACE_POINTS: usize = 100;

/// Smallest grid point `q* = q_start + i·tol` such that the threshold
/// inequality holds at every grid point of `[q*, q* + 10 d ln d]`.
///
/// `q_start` is 4 for `d >= 3` and 6 for `d = 2`.
pub fn q0_upper(d: u32, tol: f64) -> Result<ThresholdReport> {
    if !(tol > 0.0) || !tol.is_finite() {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let t = Threshold::new(d)?;
    let start = t.min_q();
    let df = d as f64;
    let window = 10.0 * df * df.ln();
    let limit = start + 100.0 * df * df.ln() + 1000.0;
    let q_at = |i: u64| start + i as f64 * tol;
    let residual = |i: u64| -> Result<f64> { Ok(t.ln_rhs(q_at(i))? - t.ln_lhs) };
    let sample = |i: u64| -> Result<ThresholdSample> {
        Ok(ThresholdSample {
            q: q_at(i),
            ln_lhs: t.ln_lhs,
            ln_rhs: t.ln_rhs(q_at(i))?,
        })
    };
    let mut trace = Vec::new();
    let mut probes = 0usize;
    let mut from = 0u64;
    loop {
        // doubling then bisection for the first nonnegative grid point at or after `from`
        probes += 1;
        trace.push(sample(from)?);
        let cand = if residual(from)? >= 0.0 {
            from
        } else {
            let mut lo = from;
            let mut step = 1u64;
            let mut hi = from + step;
            loop {
                if q_at(hi) > limit {
                    return Err(Error::Range(format!(
                        "threshold inequality fails on the whole grid up to q = {limit} for d = {d}"
                    )));
                }
                probes += 1;
                trace.push(sample(hi)?);
                if residual(hi)? >= 0.0 {
                    break;
                }
                lo = hi;
                step *= 2;
                hi = from + step;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                probes += 1;
                trace.push(sample(mid)?);
                if residual(mid)? >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        let n = (window / tol).ceil() as u64;
        let values: Vec<f64> = (cand..=cand + n)
            .into_par_iter()
            .map(residual)
            .collect::<Result<_>>()?;
        match values.iter().position(|&v| v < 0.0) {
            Some(j) => {
                log::debug!("threshold residual negative at q = {}; restarting above it", q_at(cand + j as u64));
                probes += values.len();
                from = cand + j as u64 + 1;
            }
            None => {
                let stride = (values.len() / TRACE_POINTS).max(1);
                for i in (0..values.len()).step_by(stride) {
                    trace.push(sample(cand + i as u64)?);
                }
                trace.sort_by(|a, b| a.q.total_cmp(&b.q));
                trace.dedup_by(|a, b| a.q == b.q);
                let min_residual = values.iter().copied().fold(f64::INFINITY, f64::min);
                return Ok(ThresholdReport {
                    d,
                    q0_upper: q_at(cand),
                    tol,
                    grid_checked: trace,
                    samples_checked: probes + values.len(),
                    min_residual,
                    method_note: format!(
                        "grid step {tol} from q = {start}; first nonnegative residual located by doubling and bisection, \
                         then every grid point in [q*, q* + 10 d ln d] (width {window:.3}) checked"
                    ),
                });
            }
        }
    }
}

/// `q0_upper(d) / (d ln d)` for each `d >= 3`.
pub fn q0_asymptotic_check(ds: &[u32]) -> Result<Vec<(u32, f64)>> {
    ds.iter()
        .map(|&d| {
            if d < 3 {
                return domain(format!("asymptotic check needs d >= 3, got {d}"));
            }
            let df = d as f64;
            Ok((d, q0_upper(d, 0.01)?.q0_upper / (df * df.ln())))
        })
        .collect()
}

/// Pieces of the three-region bound at the endpoint exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointBound {
    /// `∫_0^b` with `|J_ν| <= (r/2)^ν / Γ(ν+1)`.
    pub power_part: f64,
    /// `∫_b^a` with `|J_ν| <= L r^{-1/3}`; independent of `k`.
    pub landau_part: f64,
    /// `∫_a^∞` with `|J_ν| <= r^{-1/2}`.
    pub tail_part: f64,
}

impl EndpointBound {
    pub fn total(&self) -> f64 {
        self.power_part + self.landau_part + self.tail_part
    }
}

fn endpoint_setup(d: u32, q: Exponent, k: u32) -> Result<(f64, f64, f64)> {
    let r = q
        .ratio()
        .ok_or_else(|| Error::Domain("endpoint bound needs finite q".into()))?;
    let di = d as i64;
    if d < 2 || *r.numer() * (3 * di - 4) != 6 * di * *r.denom() {
        return domain(format!("endpoint bound applies only at q = 2d/(d - 4/3); got d = {d}, q = {q}"));
    }
    let nu = 0.5 * d as f64 - 1.0 + k as f64;
    if nu < 0.5 {
        return domain(format!("endpoint bound needs order >= 1/2, got {nu}"));
    }
    Ok((q_as_f64(r), d as f64, nu))
}

/// Upper bound for `Λ_{d,q}(k)^q` at the endpoint `q = 2d/(d - 4/3)`,
/// splitting `(0, ∞)` at `b = ρa` and `a = 3ν/2` with `ρ = SPLIT_RATIO`.
/// It does not tend to zero in `k`, but to `L^q ln(1/ρ)`.
pub fn endpoint_bound_power(d: u32, q: Exponent, k: u32) -> Result<EndpointBound> {
    let (qf, df, nu) = endpoint_setup(d, q, k)?;
    let a = 1.5 * nu;
    let b = SPLIT_RATIO * a;
    let growth = k as f64 * qf + df;
    let power_part =
        (growth * b.ln() - growth.ln() - qf * (nu * LN_2 + ln_gamma(nu + 1.0)?)).exp();
    let landau_part = LANDAU.powf(qf) * (1.0 / SPLIT_RATIO).ln();
    let decay = 0.5 * qf * (df - 1.0) - df;
    let tail_part = a.powf(-decay) / decay;
    Ok(EndpointBound {
        power_part,
        landau_part,
        tail_part,
    })
}

/// Majorant of [`endpoint_bound_power`] obtained from Stirling's lower bound
/// `Γ(ν+1) >= sqrt(2πν) (ν/e)^ν`; each piece is nonincreasing in `k`.
pub fn endpoint_majorant_power(d: u32, q: Exponent, k: u32) -> Result<EndpointBound> {
    let (qf, df, nu) = endpoint_setup(d, q, k)?;
    let exact = endpoint_bound_power(d, q, k)?;
    let growth = k as f64 * qf + df;
    let ln_m = qf * nu * (0.75 * SPLIT_RATIO * E).ln() - 0.5 * qf * (2.0 * PI * nu).ln()
        + (df - qf * (0.5 * df - 1.0)) * (1.5 * SPLIT_RATIO * nu).ln()
        - growth.ln();
    Ok(EndpointBound {
        power_part: ln_m.exp(),
        ..exact
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::lambda_inf_zero;

    fn q(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn range_edges() {
        assert!(!in_decay_range(2, q("6")));
        assert!(in_decay_range(2, q("61/10")));
        assert!(in_decay_range(4, q("10/3")));
        assert!(!in_decay_range(4, q("3")));
        assert!(in_decay_range(2, Exponent::Infinity));
        let err = u_bound(2, q("6"), 0).unwrap_err();
        assert!(err.to_string().contains("2d/(d - 4/3) < q"));
    }

    #[test]
    fn sup_norm_bound_at_zero() {
        for d in 2..=10 {
            let u = u_bound(d, Exponent::Infinity, 0).unwrap();
            let exact = lambda_inf_zero(d).unwrap();
            assert!(((u - exact) / exact).abs() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn displayed_special_forms() {
        // U^{10/3}_{4,10/3}(k) = (L^{3(5k+6)/2} / (2^{k+1} Γ(k+2)))^{4/(9k+12)} (9/4 + 1/(4 + 10k/3))
        for k in [0u32, 1, 5, 28] {
            let kf = k as f64;
            let g = crate::specfun::gamma(kf + 2.0).unwrap();
            let direct = (LANDAU.powf(1.5 * (5.0 * kf + 6.0)) / (2f64.powf(kf + 1.0) * g)).powf(4.0 / (9.0 * kf + 12.0))
                * (2.25 + 1.0 / (4.0 + 10.0 * kf / 3.0));
            let ours = u_bound_power(4, q("10/3"), k).unwrap();
            assert!(((ours - direct) / direct).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn beta_matches_ratio() {
        for d in 2..=50 {
            let ratio = u_bound(d, Exponent::Infinity, 1).unwrap() / u_bound(d, Exponent::Infinity, 0).unwrap();
            assert!((beta_gap(d).unwrap() - ratio).abs() < 1e-12, "d = {d}");
        }
        assert!((beta_gap(2).unwrap() - (LANDAU.powi(6) / 4.0).powf(0.125)).abs() < 1e-15);
    }

    #[test]
    fn residual_domain() {
        assert!(threshold_residual(2, 5.9).is_err());
        assert!(threshold_residual(3, 3.9).is_err());
        assert!(threshold_residual(2, 6.76).unwrap() >= 0.0);
        assert!(threshold_residual(2, 6.5).unwrap() < 0.0);
    }

    #[test]
    fn endpoint_pieces_decrease() {
        let q6 = q("6");
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let m = endpoint_majorant_power(2, q6, k).unwrap();
            let e = endpoint_bound_power(2, q6, k).unwrap();
            assert!(e.power_part <= m.power_part * (1.0 + 1e-12));
            assert!(m.total() < prev);
            prev = m.total();
        }
        assert!(endpoint_bound_power(2, q("7"), 1).is_err());
        assert!(endpoint_bound_power(2, q6, 0).is_err());
    }
}
