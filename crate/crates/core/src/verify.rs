//! Certified check that `Λ_{d,q}(0) > Λ_{d,q}(k)` for every `k >= 1`, and
//! the sharp constant `(2π)^{d/2} max_k Λ_{d,q}(k)`.
//!
//! The check runs in three steps:
//!
//! 1. a certified lower bound for `Λ_{d,q}(0)^q` (the lower end of the head
//!    integral; the discarded tail is positive);
//! 2. a closed-form bound that is decreasing in `k`, giving a cutoff `K`
//!    beyond which no `Λ_{d,q}(k)^q` can reach that lower bound;
//! 3. a certified upper bound (head plus tail) for each `1 <= k <= K`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    endpoint_bound_power, endpoint_majorant_power, in_decay_range, u_bound_decreasing_check, u_bound_power,
};
use crate::enclosure::Enclosure;
use crate::error::{domain, Error, Result};
use crate::lambda::{lambda, lambda_tail_bound, Exponent, LambdaResult, ProblemSpec, DEFAULT_CUTOFF, DEFAULT_TOL};
use crate::specfun::surface_area;

/// Largest `k` the cutoff scans will consider.
const K_SCAN_LIMIT: u32 = 100_000;
/// Target for the tail bound when computing the sharp constant.
const CONSTANT_TAIL_TARGET: f64 = 1e-6;
/// Largest cutoff used for the sharp constant.
const CONSTANT_CUTOFF_CAP: f64 = 3e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Verified,
    Inconclusive,
    Refuted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Verified => "VERIFIED",
            Self::Inconclusive => "INCONCLUSIVE",
            Self::Refuted => "REFUTED",
        })
    }
}

/// How the cutoff `K` of step 2 was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffMethod {
    /// The decreasing closed-form bound `U_{d,q}(k)`, for `q > 2d/(d - 4/3)`.
    DecreasingBound,
    /// The three-region bound at `q = 2d/(d - 4/3)`.
    EndpointSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBound {
    pub k: u32,
    pub head: Enclosure,
    pub tail_hi: f64,
    pub power_lo: f64,
    pub power_hi: f64,
    pub cutoff_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub d: u32,
    pub q: Exponent,
    pub cutoff_r: f64,
    pub lambda0: LambdaResult,
    /// Certified lower bound for `Λ_{d,q}(0)^q`: the lower end of the head integral.
    pub lambda0_power_lo: f64,
    pub method: CutoffMethod,
    /// Three-decimal truncation of the head integral minus the tail bound.
    pub display_threshold: f64,
    /// Largest `k` whose closed-form bound exceeds `display_threshold`.
    pub cutoff_k: u32,
    /// Largest `k` whose closed-form bound exceeds `lambda0_power_lo`.
    pub certified_cutoff_k: u32,
    /// Closed-form bound at the first `k` that is not checked numerically.
    pub bound_after_cutoff: f64,
    pub per_k: Vec<KBound>,
    pub verdict: Verdict,
    pub offending_k: Option<u32>,
}

/// Floor to three decimals.
pub fn trunc3(x: f64) -> f64 {
    (x * 1000.0 + 1e-9).floor() / 1000.0
}

/// Last `k` in `from..` for which `bound(k) > threshold`, given that
/// `bound` is nonincreasing; `from - 1` if there is none.
fn last_above(from: u32, threshold: f64, bound: impl Fn(u32) -> Result<f64>) -> Result<u32> {
    let mut k = from;
    while bound(k)? > threshold {
        k += 1;
        if k > K_SCAN_LIMIT {
            return Err(Error::Range(format!("bound still above {threshold} at k = {K_SCAN_LIMIT}")));
        }
    }
    Ok(k.saturating_sub(1))
}

/// Cutoff from the three-region endpoint bound: the Stirling majorant is
/// nonincreasing, so beyond the first `k` where it drops below `threshold`
/// nothing can exceed it; below that `k` the exact bound is scanned.
fn endpoint_cutoff(d: u32, q: Exponent, threshold: f64) -> Result<Option<u32>> {
    let stationary = endpoint_bound_power(d, q, 1)?.landau_part;
    if stationary >= threshold {
        return Ok(None);
    }
    let k_tail = {
        let mut k = 1;
        while endpoint_majorant_power(d, q, k)?.total() >= threshold {
            k += 1;
            if k > K_SCAN_LIMIT {
                return Ok(None);
            }
        }
        k
    };
    let mut last = 0;
    for k in 1..k_tail {
        if endpoint_bound_power(d, q, k)?.total() > threshold {
            last = k;
        }
    }
    Ok(Some(last))
}

/// [`verify_hierarchy_with`] at the default head tolerance.
pub fn verify_hierarchy(d: u32, q: Exponent, cutoff: f64) -> Result<HierarchyReport> {
    verify_hierarchy_with(d, q, cutoff, DEFAULT_TOL)
}

/// Runs the three-step check for finite `q >= 2d/(d - 4/3)`.
///
/// Above the endpoint the cutoff comes from `U_{d,q}(k)`, whose
/// monotonicity is checked first. At the endpoint itself the three-region
/// bound is used; below it there is no closed-form cutoff and the call is
/// refused.
pub fn verify_hierarchy_with(d: u32, q: Exponent, cutoff: f64, tol: f64) -> Result<HierarchyReport> {
    let spec0 = ProblemSpec::new(d, q, 0)?;
    if !q.is_finite() {
        return domain("hierarchy verification needs a finite q");
    }
    let method = if in_decay_range(d, q) {
        CutoffMethod::DecreasingBound
    } else if endpoint_bound_power(d, q, 1).is_ok() {
        CutoffMethod::EndpointSplit
    } else {
        let edge = num_rational::Ratio::new(6 * d as i64, 3 * d as i64 - 4);
        return domain(format!(
            "no closed-form cutoff for q = {q} <= 2d/(d - 4/3) = {edge}; step 2 needs 2d/(d - 4/3) < q"
        ));
    };
    if method == CutoffMethod::DecreasingBound && !u_bound_decreasing_check(d, q, 200)? {
        return Err(Error::Domain(format!("closed-form bound is not decreasing for d = {d}, q = {q}")));
    }

    let lambda0 = lambda(&spec0, cutoff, tol)?;
    let lambda0_power_lo = lambda0.head.lo;
    let display_threshold = trunc3(lambda0.head.lo) - lambda0.tail_hi;

    let (cutoff_k, certified_cutoff_k, bound_after_cutoff) = match method {
        CutoffMethod::DecreasingBound => {
            let bound = |k| u_bound_power(d, q, k);
            let shown = last_above(0, display_threshold, bound)?;
            let strict = last_above(0, lambda0_power_lo, bound)?;
            let checked = shown.max(strict);
            if checked + 1 > 200 && !u_bound_decreasing_check(d, q, checked + 1)? {
                return Err(Error::Domain(format!("closed-form bound is not decreasing up to k = {}", checked + 1)));
            }
            (shown, strict, bound(checked + 1)?)
        }
        CutoffMethod::EndpointSplit => {
            let strict = endpoint_cutoff(d, q, lambda0_power_lo)?;
            let shown = endpoint_cutoff(d, q, display_threshold)?;
            match (shown, strict) {
                (Some(s), Some(c)) => (s, c, endpoint_bound_power(d, q, s.max(c) + 1)?.total()),
                _ => {
                    let stationary = endpoint_bound_power(d, q, 1)?.landau_part;
                    return Ok(HierarchyReport {
                        d,
                        q,
                        cutoff_r: lambda0.cutoff_r,
                        lambda0,
                        lambda0_power_lo,
                        method,
                        display_threshold,
                        cutoff_k: 0,
                        certified_cutoff_k: 0,
                        bound_after_cutoff: stationary,
                        per_k: Vec::new(),
                        verdict: Verdict::Inconclusive,
                        offending_k: None,
                    });
                }
            }
        }
    };
    let checked = cutoff_k.max(certified_cutoff_k);

    let per_k: Vec<KBound> = (1..=checked)
        .into_par_iter()
        .map(|k| {
            let res = lambda(&ProblemSpec::new(d, q, k)?, cutoff, tol)?;
            Ok(KBound {
                k,
                head: res.head,
                tail_hi: res.tail_hi,
                power_lo: res.power.lo,
                power_hi: res.power.hi,
                cutoff_r: res.cutoff_r,
            })
        })
        .collect::<Result<_>>()?;

    let power0_hi = lambda0.power.hi;
    let refuted = per_k.iter().find(|b| b.power_lo > power0_hi);
    let offending = per_k.iter().find(|b| b.power_hi >= lambda0_power_lo);
    let (verdict, offending_k) = if let Some(b) = refuted {
        (Verdict::Refuted, Some(b.k))
    } else if let Some(b) = offending {
        (Verdict::Inconclusive, Some(b.k))
    } else if bound_after_cutoff >= lambda0_power_lo {
        (Verdict::Inconclusive, Some(checked + 1))
    } else {
        (Verdict::Verified, None)
    };
    Ok(HierarchyReport {
        d,
        q,
        cutoff_r: lambda0.cutoff_r,
        lambda0,
        lambda0_power_lo,
        method,
        display_threshold,
        cutoff_k,
        certified_cutoff_k,
        bound_after_cutoff,
        per_k,
        verdict,
        offending_k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpConstantResult {
    pub d: u32,
    pub q: Exponent,
    pub constant: Enclosure,
    /// Enclosure of `Λ_{d,q}(argmax_k)`.
    pub lambda: Enclosure,
    pub argmax_k: u32,
    pub certified: bool,
    pub cutoff_r: f64,
    pub verdict: Option<Verdict>,
}

/// Cutoff that brings the tail bound of `spec` down to about `target`.
fn cutoff_for_tail(spec: &ProblemSpec, target: f64) -> Result<f64> {
    let at_one = lambda_tail_bound(spec, DEFAULT_CUTOFF)? * DEFAULT_CUTOFF.powf(tail_decay(spec));
    let r = (at_one / target).powf(1.0 / tail_decay(spec));
    Ok(r.clamp(DEFAULT_CUTOFF, CONSTANT_CUTOFF_CAP))
}

fn tail_decay(spec: &ProblemSpec) -> f64 {
    let qf = spec.q.value();
    0.5 * qf * (spec.d as f64 - 1.0) - spec.d as f64
}

/// `(2π)^{d/2} max_k Λ_{d,q}(k)`.
///
/// For `q = ∞` this is the sphere's surface area. For finite `q` the
/// hierarchy is verified first; `certified` is set only for a VERIFIED
/// report, in which case the maximum sits at `k = 0` and is recomputed with
/// a cutoff large enough for a tail bound near `1e-6`.
pub fn sharp_constant(d: u32, q: Exponent) -> Result<SharpConstantResult> {
    let spec0 = ProblemSpec::new(d, q, 0)?;
    let scale = (2.0 * PI).powf(0.5 * d as f64);
    if !q.is_finite() {
        let area = surface_area(d)?;
        let constant = Enclosure::around(area, 8.0 * f64::EPSILON * area);
        return Ok(SharpConstantResult {
            d,
            q,
            constant,
            lambda: constant.scale(1.0 / scale),
            argmax_k: 0,
            certified: true,
            cutoff_r: f64::INFINITY,
            verdict: None,
        });
    }
    let report = verify_hierarchy(d, q, DEFAULT_CUTOFF);
    let (verdict, argmax_k) = match &report {
        Ok(r) if r.verdict == Verdict::Verified => (Some(r.verdict), 0),
        Ok(r) => {
            let best = r
                .per_k
                .iter()
                .filter(|b| b.power_hi > r.lambda0.power.hi)
                .max_by(|a, b| a.power_hi.total_cmp(&b.power_hi))
                .map_or(0, |b| b.k);
            (Some(r.verdict), best)
        }
        Err(Error::Domain(msg)) => {
            log::warn!("hierarchy not checked: {msg}");
            (None, 0)
        }
        Err(e) => return Err(e.clone()),
    };
    let spec = ProblemSpec::new(d, q, argmax_k)?;
    let cutoff = cutoff_for_tail(&spec0, CONSTANT_TAIL_TARGET)?;
    let res = lambda(&spec, cutoff, DEFAULT_TOL.min(CONSTANT_TAIL_TARGET * 1e-2))?;
    Ok(SharpConstantResult {
        d,
        q,
        constant: res.lambda.scale(scale),
        lambda: res.lambda,
        argmax_k,
        certified: verdict == Some(Verdict::Verified),
        cutoff_r: res.cutoff_r,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_is_floor() {
        assert_eq!(trunc3(0.257_178), 0.257);
        assert_eq!(trunc3(0.2579999), 0.257);
        assert_eq!(trunc3(0.146), 0.146);
    }

    #[test]
    fn refuses_below_endpoint() {
        // 2d/(d-1) = 3 < q = 7/2 < 2d/(d - 4/3) = 18/5
        let q: Exponent = "7/2".parse().unwrap();
        assert!(matches!(verify_hierarchy(3, q, 200.0), Err(Error::Domain(_))));
        assert!(verify_hierarchy(3, Exponent::Infinity, 200.0).is_err());
    }

    #[test]
    fn four_four_needs_one_step() {
        let r = verify_hierarchy(4, Exponent::integer(4).unwrap(), 200.0).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.method, CutoffMethod::DecreasingBound);
        assert!(r.cutoff_k <= 2);
    }

    #[test]
    fn sphere_constant() {
        let c = sharp_constant(3, Exponent::Infinity).unwrap();
        assert!(c.constant.contains(4.0 * PI));
        assert!(c.certified);
        assert_eq!(c.argmax_k, 0);
    }
}
