//! Bessel functions of the first kind, `J_ν(r)`, for real `ν >= 0`, `r >= 0`.
//!
//! Three evaluation branches, each of which reports an absolute error bound:
//!
//! * ascending power series for `r <= max(4, 2 sqrt(ν + 1))`, where the
//!   terms alternate and decrease after a short rise, so the first omitted
//!   term bounds the truncation;
//! * Hankel's asymptotic expansion for `r >= 20` when it converges to
//!   about `1e-16`, with the remainder bounded by the first neglected term
//!   (valid once enough terms are taken, see DLMF 10.17(iii));
//! * Miller's backward recurrence otherwise, normalised by the Neumann sum
//!   `(r/2)^μ = Γ(μ+1) Σ_k (μ+2k) Γ(μ+k) / (k! Γ(μ+1)) J_{μ+2k}(r)`.
//!
//! Every result is finally intersected with the power bound
//! `|J_ν(r)| <= r^ν / (2^ν Γ(ν+1))` and with `|J_ν| <= 1`.

use std::f64::consts::PI;

use crate::enclosure::{Enclosure, ROUNDING_ULPS};
use crate::error::{domain, Error, Result};

use super::gamma::{gamma, ln_gamma, GAMMA_REL_ERR};

/// Largest supported argument.
pub const MAX_ARG: f64 = 1e6;
/// Largest supported order.
pub const MAX_ORDER: f64 = 1000.0;

const HANKEL_MIN_ARG: f64 = 20.0;
const HANKEL_TARGET: f64 = 1e-16;
const EPS: f64 = f64::EPSILON;

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy)]
struct Approx {
    value: f64,
    err: f64,
}

fn check_args(nu: f64, r: f64) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 {
        return domain(format!("Bessel order must be finite and >= 0, got {nu}"));
    }
    if !r.is_finite() || r < 0.0 {
        return domain(format!("Bessel argument must be finite and >= 0, got {r}"));
    }
    if nu > MAX_ORDER {
        return Err(Error::Range(format!("Bessel order {nu} exceeds {MAX_ORDER}")));
    }
    if r > MAX_ARG {
        return Err(Error::Range(format!("Bessel argument {r} exceeds {MAX_ARG}")));
    }
    Ok(())
}

/// `ln(1 / (2^ν Γ(ν+1)))` together with a bound on its absolute error.
fn ln_leading(nu: f64) -> (f64, f64) {
    let lg = ln_gamma(nu + 1.0).expect("nu + 1 > 0");
    let v = -nu * std::f64::consts::LN_2 - lg;
    (v, 4.0 * EPS * (v.abs() + 1.0) + GAMMA_REL_ERR)
}

/// `1 / (2^ν Γ(ν+1))` with relative error bound.
fn leading(nu: f64) -> (f64, f64) {
    if nu + 1.0 <= 170.0 {
        let g = gamma(nu + 1.0).expect("in range");
        (1.0 / (2f64.powf(nu) * g), GAMMA_REL_ERR + 4.0 * EPS)
    } else {
        let (l, e) = ln_leading(nu);
        (l.exp(), e + 2.0 * EPS)
    }
}

fn series_region(nu: f64, r: f64) -> bool {
    r <= 4f64.max(2.0 * (nu + 1.0).sqrt())
}

/// Power series for `r^{-ν} J_ν(r)`.
fn series_scaled(nu: f64, r: f64) -> Approx {
    let (t0, rel0) = leading(nu);
    let y = -0.25 * r * r;
    let mut term = t0;
    let mut sum = t0;
    let mut abs_sum = t0.abs();
    let mut n = 0usize;
    let trunc = loop {
        let nf = n as f64;
        let ratio = y / ((nf + 1.0) * (nu + nf + 1.0));
        let next = term * ratio;
        if ratio.abs() < 1.0 && next.abs() <= 1e-18 * abs_sum {
            break next.abs();
        }
        sum += next;
        abs_sum += next.abs();
        term = next;
        n += 1;
    };
    let rounding = ((2 * n + 8) as f64 * EPS + rel0) * abs_sum;
    Approx {
        value: sum,
        err: trunc + rounding,
    }
}

/// Hankel expansion for `J_ν(x)`; `None` if it does not reach the target accuracy.
fn hankel(nu: f64, x: f64) -> Option<Approx> {
    let mu = 4.0 * nu * nu;
    let l_min = (0.5 * nu - 0.25).max(1.0);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut abs_sum = 1.0;
    let mut term = 1.0;
    let mut k = 0usize;
    let next_term = |term: f64, k: usize| {
        let kf = k as f64;
        term * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x)
    };
    // u_1 enters Q immediately; sums then hold l terms of each.
    term = next_term(term, 1);
    k += 1;
    q += term;
    abs_sum += term.abs();
    let mut l = 1usize;
    loop {
        let u_even = next_term(term, k + 1);
        let u_odd = next_term(u_even, k + 2);
        if l as f64 >= l_min && u_even.abs() + u_odd.abs() <= HANKEL_TARGET {
            let (cx, sx) = (x.cos(), x.sin());
            let t = (0.5 * nu + 0.25) % 2.0;
            let (sp, cp) = (PI * t).sin_cos();
            let c = cx * cp + sx * sp;
            let s = sx * cp - cx * sp;
            let amp = (2.0 / (PI * x)).sqrt();
            let value = amp * (p * c - q * s);
            let rounding = 8.0 * EPS * abs_sum + 8.0 * EPS * (p.abs() + q.abs());
            let err = amp * (u_even.abs() + u_odd.abs() + rounding) + 4.0 * EPS * value.abs();
            // large intermediate terms mean cancellation; Miller does better there
            return (err <= 1e-14).then_some(Approx { value, err });
        }
        // signs: P = Σ (-1)^j u_{2j}, Q = Σ (-1)^j u_{2j+1}
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        p += sign * u_even;
        q += sign * u_odd;
        abs_sum += u_even.abs() + u_odd.abs();
        term = u_odd;
        k += 2;
        l += 1;
        if l > 300 || abs_sum > 1e8 {
            return None;
        }
    }
}

/// One Miller pass started at order `ν0 + start`.
fn miller_pass(nu: f64, r: f64, start: usize) -> (f64, f64) {
    let n = nu.floor() as usize;
    let nu0 = nu - n as f64;
    // normalisation weights ŵ_k for even indices 2k <= start
    let half = start / 2 + 1;
    let mut w = Vec::with_capacity(half);
    w.push(1.0);
    let mut c = 1.0;
    for k in 1..half {
        let kf = k as f64;
        if k > 1 {
            c *= (nu0 + kf - 1.0) / kf;
        }
        w.push((nu0 + 2.0 * kf) * c);
    }
    const BIG: f64 = 1e250;
    let mut f_next = 0.0;
    let mut f = 1e-280;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut target = 0.0;
    let mut rescales_after_target = 0i32;
    let mut have_target = false;
    let mut idx = start;
    loop {
        if idx == n {
            target = f;
            have_target = true;
        }
        if idx % 2 == 0 {
            let t = w[idx / 2] * f;
            sum += t;
            abs_sum += t.abs();
        }
        if idx == 0 {
            break;
        }
        let f_prev = 2.0 * (nu0 + idx as f64) / r * f - f_next;
        f_next = f;
        f = f_prev;
        idx -= 1;
        if f.abs() > BIG {
            f /= BIG;
            f_next /= BIG;
            sum /= BIG;
            abs_sum /= BIG;
            if have_target {
                rescales_after_target += 1;
            }
        }
    }
    let norm = (0.5 * r).powf(nu0) / (gamma(nu0 + 1.0).expect("nu0 + 1 >= 1") * sum);
    let value = if rescales_after_target == 0 {
        target * norm
    } else {
        let ln_mag = target.abs().ln() + norm.abs().ln()
            - rescales_after_target as f64 * BIG.ln();
        (target * norm).signum() * ln_mag.exp()
    };
    let kappa = abs_sum / sum.abs();
    (value, kappa)
}

fn miller(nu: f64, r: f64) -> Approx {
    let n = nu.floor();
    let m = n.max(r.ceil());
    let edge = (0.5 * m).cbrt();
    let start1 = (m + (12.0 * edge).ceil() + 20.0) as usize;
    let start2 = start1 + (6.0 * edge).ceil() as usize + 10;
    let (v1, _) = miller_pass(nu, r, start1);
    let (v2, kappa) = miller_pass(nu, r, start2);
    let scale = v2.abs().max(r.powf(-1.0 / 3.0).min(1.0));
    let rounding = 16.0 * EPS * (start2 as f64).sqrt() * kappa * scale + GAMMA_REL_ERR * v2.abs();
    Approx {
        value: v2,
        err: 2.0 * (v1 - v2).abs() + rounding + 1e-300,
    }
}

/// `J_ν(r)` for `r` outside the series region.
fn j_large(nu: f64, r: f64) -> Approx {
    if r >= HANKEL_MIN_ARG {
        if let Some(a) = hankel(nu, r) {
            return a;
        }
    }
    miller(nu, r)
}

fn finish(a: Approx, cap: f64) -> Enclosure {
    let e = Enclosure::around(a.value, a.err).inflate_ulps(ROUNDING_ULPS);
    Enclosure {
        lo: e.lo.max(-cap),
        hi: e.hi.min(cap),
    }
}

/// Enclosure of `J_ν(r)`.
///
/// ```
/// use vega_sharp::specfun::bessel_j;
/// let j = bessel_j(0.5, std::f64::consts::FRAC_PI_2).unwrap();
/// assert!(j.contains(2.0 / std::f64::consts::PI));
/// assert!(j.width() < 1e-13);
/// ```
pub fn bessel_j(nu: f64, r: f64) -> Result<Enclosure> {
    check_args(nu, r)?;
    if r == 0.0 {
        return Ok(Enclosure::point(if nu == 0.0 { 1.0 } else { 0.0 }));
    }
    let (ln_cap, ln_cap_err) = ln_leading(nu);
    let cap = (ln_cap + nu * r.ln() + ln_cap_err + 4.0 * EPS * (nu * r.ln()).abs())
        .exp()
        .min(1.0);
    let a = if series_region(nu, r) {
        let s = series_scaled(nu, r);
        let p = r.powf(nu);
        Approx {
            value: s.value * p,
            err: s.err * p + 4.0 * EPS * (s.value * p).abs(),
        }
    } else {
        j_large(nu, r)
    };
    Ok(finish(a, cap))
}

/// Enclosure of the scaled function `r^{-ν} J_ν(r)`, continuous at `r = 0`
/// where it equals `1 / (2^ν Γ(ν+1))`.
pub fn bessel_j_scaled(nu: f64, r: f64) -> Result<Enclosure> {
    check_args(nu, r)?;
    let (ln_cap, ln_cap_err) = ln_leading(nu);
    let cap = (ln_cap + ln_cap_err).exp();
    if series_region(nu, r) {
        return Ok(finish(series_scaled(nu, r), cap));
    }
    let a = j_large(nu, r);
    let scale = (-nu * r.ln()).exp();
    let scaled = Approx {
        value: a.value * scale,
        err: (a.err + 4.0 * EPS * (1.0 + nu * r.ln()) * a.value.abs()) * scale
            + f64::MIN_POSITIVE,
    };
    Ok(finish(scaled, cap))
}

/// Approximate positive zeros of `J_ν` in `(0, upto]`, in increasing order.
///
/// The zeros are only used as panel boundaries, so they are located to
/// about `1e-12` relative accuracy rather than certified.
pub fn bessel_zeros(nu: f64, upto: f64) -> Result<Vec<f64>> {
    check_args(nu, upto)?;
    let f = |x: f64| bessel_j(nu, x).map(|e| e.mid());
    let mut zeros = Vec::new();
    // no zero lies below max(ν, 2.4); consecutive zeros are more than 2.4 apart
    let mut a = nu.max(2.0);
    let mut fa = f(a)?;
    while a < upto {
        let b = (a + 1.0).min(upto);
        let fb = f(b)?;
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(illinois(&f, a, b, fa, fb)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn illinois(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() <= 1e-12 * b.abs() {
            break;
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            side = 0;
        } else {
            fa *= if side == 1 { 0.5 } else { 1.0 };
            side = 1;
        }
        b = c;
        fb = fc;
    }
    Ok(0.5 * (a + b))
}
