//! Adaptive Gauss–Kronrod integration and bracketed maximisation.
//!
//! Each panel is integrated with the 10-point Gauss / 21-point Kronrod pair.
//! The Kronrod sum of the integrand's enclosures is widened by twice the
//! Gauss–Kronrod difference plus a rounding cushion. Panels with the widest
//! enclosure are bisected, a fixed-size batch at a time, until the total
//! width drops to `2 * tol`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::enclosure::Enclosure;
use crate::error::{domain, Error, Result};

/// Maximum bisection depth of a panel.
pub const MAX_DEPTH: u32 = 40;
/// Upper limit on the number of panels created by refinement.
pub const MAX_PANELS: usize = 2_000_000;
/// Panels bisected per refinement round. Fixed so that results do not
/// depend on the thread count.
const BATCH: usize = 16;

const EPS: f64 = f64::EPSILON;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], …, XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Enclosure,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Enclosure,
    pub panels_used: usize,
    pub requested_tol: f64,
}

fn gk21<F>(f: &F, a: f64, b: f64, depth: u32) -> Result<Panel>
where
    F: Fn(f64) -> Result<Enclosure>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k_lo = 0.0;
    let mut k_hi = 0.0;
    let mut k_mid = 0.0;
    let mut g_mid = 0.0;
    let mut abs = 0.0;
    let mut eval = |x: f64, wk: f64, wg: f64| -> Result<()> {
        let y = f(x)?;
        if !y.is_finite() {
            return Err(Error::NonFinite(format!("integrand at {x}: {y}")));
        }
        k_lo += wk * y.lo;
        k_hi += wk * y.hi;
        k_mid += wk * y.mid();
        g_mid += wg * y.mid();
        abs += wk * y.mag();
        Ok(())
    };
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate().take(10) {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        eval(c - h * x, w, wg)?;
        eval(c + h * x, w, wg)?;
    }
    eval(c, WGK[10], 0.0)?;
    let err = 2.0 * h * (k_mid - g_mid).abs() + 32.0 * EPS * h * abs;
    Ok(Panel {
        a,
        b,
        value: Enclosure {
            lo: h * k_lo - err,
            hi: h * k_hi + err,
        },
        depth,
    })
}

#[derive(PartialEq)]
struct ByWidth(f64, usize);

impl Eq for ByWidth {}

impl PartialOrd for ByWidth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ByWidth {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn total(panels: &[Panel]) -> Enclosure {
    let mut sorted: Vec<&Panel> = panels.iter().collect();
    sorted.sort_by(|p, q| p.a.total_cmp(&q.a));
    let (mut lo, mut hi, mut abs) = (0.0, 0.0, 0.0);
    for p in &sorted {
        lo += p.value.lo;
        hi += p.value.hi;
        abs += p.value.mag();
    }
    let pad = (sorted.len() as f64 + 1.0) * EPS * abs;
    Enclosure {
        lo: lo - pad,
        hi: hi + pad,
    }
}

/// Integral of `f` over `[a, b]`.
///
/// ```
/// use vega_sharp::{quadrature::integrate, Enclosure};
/// let r = integrate(|x: f64| Ok(Enclosure::point(x.sin())), 0.0, std::f64::consts::PI, 1e-12).unwrap();
/// assert!(r.value.contains(2.0));
/// ```
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Enclosure> + Sync,
{
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integral over `[breaks[0], breaks[last]]`, with the given interior points
/// used as initial panel boundaries.
pub fn integrate_with_breaks<F>(f: F, breaks: &[f64], tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<Enclosure> + Sync,
{
    if breaks.len() < 2 {
        return domain("integration needs at least two endpoints");
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return domain(format!("integration limits must be finite and increasing, got {} and {}", w[0], w[1]));
        }
    }
    let mut panels: Vec<Panel> = breaks
        .par_windows(2)
        .map(|w| gk21(&f, w[0], w[1], 0))
        .collect::<Result<_>>()?;
    let mut heap: BinaryHeap<ByWidth> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| ByWidth(p.value.width(), i))
        .collect();
    let mut width: f64 = panels.iter().map(|p| p.value.width()).sum();
    let target = 2.0 * tol;
    let mut exhausted = false;
    let mut rounds = 0usize;
    let mut checkpoint = width;
    while width > target * 0.9 {
        rounds += 1;
        if rounds % 512 == 0 {
            // refinement no longer pays off: the remaining width comes from `f` itself
            if width > 0.99 * checkpoint {
                exhausted = true;
                break;
            }
            checkpoint = width;
        }
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match heap.pop() {
                Some(ByWidth(_, i)) if panels[i].depth < MAX_DEPTH => batch.push(i),
                Some(_) => continue,
                None => break,
            }
        }
        if batch.is_empty() || panels.len() + 2 * batch.len() > MAX_PANELS {
            exhausted = true;
            break;
        }
        let halves: Vec<(Panel, Panel)> = batch
            .par_iter()
            .map(|&i| {
                let p = panels[i];
                let m = 0.5 * (p.a + p.b);
                Ok((gk21(&f, p.a, m, p.depth + 1)?, gk21(&f, m, p.b, p.depth + 1)?))
            })
            .collect::<Result<_>>()?;
        for (&i, (left, right)) in batch.iter().zip(halves) {
            width -= panels[i].value.width();
            width += left.value.width() + right.value.width();
            panels[i] = left;
            heap.push(ByWidth(left.value.width(), i));
            panels.push(right);
            heap.push(ByWidth(right.value.width(), panels.len() - 1));
        }
        if batch.len() < BATCH && heap.is_empty() {
            exhausted = true;
            break;
        }
        // guard against drift in the running width
        if panels.len() % 4096 < 2 * BATCH {
            width = panels.iter().map(|p| p.value.width()).sum();
        }
    }
    let value = total(&panels);
    if value.width() > target {
        let why = if exhausted { "refinement exhausted" } else { "stopped" };
        return Err(Error::Convergence {
            message: format!(
                "{why}: width {:e} exceeds 2 * tol = {:e} after {} panels",
                value.width(),
                target,
                panels.len()
            ),
            best_effort: value,
        });
    }
    Ok(QuadratureResult {
        value,
        panels_used: panels.len(),
        requested_tol: tol,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Enclosure>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?.mid();
    let mut fd = f(d)?.mid();
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?.mid();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?.mid();
        }
    }
    Ok(if fc >= fd { c } else { d })
}

/// Location and value of the maximum of `f` over `[a, b]`.
///
/// A grid scan with step `min(π/4, (b-a)/64)` brackets every local maximum,
/// each bracket is refined by golden-section search to `tol`, and the best
/// candidate wins. The upper end of the returned enclosure is widened by the
/// variation of `f` within `tol` of the argmax.
pub fn maximize<F>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, Enclosure)>
where
    F: Fn(f64) -> Result<Enclosure>,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return domain(format!("maximize needs finite a < b, got [{a}, {b}]"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let step = FRAC_PI_4.min((b - a) / 64.0);
    let n = ((b - a) / step).ceil() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| (a + i as f64 * step).min(b)).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let y = f(x)?;
            if !y.is_finite() {
                return Err(Error::NonFinite(format!("objective at {x}: {y}")));
            }
            Ok(y.mid())
        })
        .collect::<Result<_>>()?;
    let mut best_x = xs[0];
    let mut best_y = f64::NEG_INFINITY;
    for i in 0..=n {
        let left = if i == 0 { f64::NEG_INFINITY } else { ys[i - 1] };
        let right = if i == n { f64::NEG_INFINITY } else { ys[i + 1] };
        if ys[i] < left || ys[i] < right {
            continue;
        }
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(n)];
        let x = golden(&f, lo, hi, tol)?;
        let y = f(x)?.mid();
        let (x, y) = if ys[i] > y { (xs[i], ys[i]) } else { (x, y) };
        if y > best_y {
            best_x = x;
            best_y = y;
        }
    }
    let at = f(best_x)?;
    let mut slack = 0.0f64;
    for x in [best_x - tol, best_x + tol] {
        if a <= x && x <= b {
            slack = slack.max(f(x)?.mid() - at.mid()).max(at.mid() - f(x)?.mid());
        }
    }
    Ok((
        best_x,
        Enclosure {
            lo: at.lo,
            hi: at.hi + 2.0 * slack,
        },
    ))
}
