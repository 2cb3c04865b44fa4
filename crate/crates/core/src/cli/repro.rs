//! Published values recomputed side by side with certified ones.

use rayon::prelude::*;

use super::report::{Report, Row};
use super::{Section, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::bounds::{q0_upper, threshold_residual};
use crate::enclosure::Enclosure;
use crate::error::Result;
use crate::lambda::{lambda, Exponent, ProblemSpec, DEFAULT_CUTOFF, DEFAULT_TOL};
use crate::quadrature::maximize;
use crate::specfun::{bessel_j, LANDAU};
use crate::verify::{trunc3, verify_hierarchy, HierarchyReport, Verdict};

/// Published upper bounds for `q0(d)`, `d = 2..=10`.
pub const Q0_PUBLISHED: [f64; 9] = [6.76, 5.45, 5.53, 6.07, 6.82, 7.70, 8.69, 9.78, 10.95];
/// Slack allowed on top of the published `q0` bounds.
pub const Q0_SLACK: f64 = 0.02;
/// Grid step used when recomputing `q0`.
pub const Q0_STEP: f64 = 0.001;

/// Published three-decimal head integrals over `[0, 200]` for `k = 1..=28`, `(d, q) = (4, 10/3)`.
pub const HEADS_4_10_3: [f64; 28] = [
    0.146, 0.103, 0.080, 0.066, 0.056, 0.048, 0.043, 0.038, 0.035, 0.032, 0.029, 0.027, 0.025, 0.024, 0.022,
    0.021, 0.020, 0.019, 0.018, 0.017, 0.016, 0.016, 0.015, 0.014, 0.014, 0.013, 0.013, 0.012,
];
/// Same for `(d, q) = (5, 3)`.
pub const HEADS_5_3: [f64; 28] = [
    0.134, 0.099, 0.079, 0.066, 0.056, 0.049, 0.044, 0.039, 0.036, 0.033, 0.030, 0.028, 0.026, 0.024, 0.023,
    0.022, 0.020, 0.019, 0.018, 0.017, 0.017, 0.016, 0.015, 0.015, 0.014, 0.014, 0.013, 0.013,
];

/// Orders used for the Landau table.
pub const LANDAU_ORDERS: [f64; 12] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];

/// True when `head` meets `[v, v + 0.001)`, i.e. some value in the
/// enclosure truncates to `v` at three decimals.
pub fn matches_3dp(head: Enclosure, v: f64) -> bool {
    head.hi >= v - 1e-12 && head.lo < v + 0.001 - 1e-12
}

pub(super) fn run(section: Section) -> Result<(Report, i32)> {
    let (name, rows) = match section {
        Section::Thm3 => ("thm3", thm3()?),
        Section::Thm4D4 => ("thm4-d4", tomas_stein(4, "10/3", 0.257, &HEADS_4_10_3)?),
        Section::Thm4D5 => ("thm4-d5", tomas_stein(5, "3", 0.210, &HEADS_5_3)?),
        Section::LandauTable => ("landau-table", landau_table()?),
    };
    let all_match = rows.iter().all(|r| r.get("match") != Some(&false.into()));
    let mut report = Report::new("repro").param("section", name);
    report.results = rows;
    report.verdict = Some(if all_match { "MATCH" } else { "MISMATCH" }.to_string());
    Ok((report, if all_match { EXIT_OK } else { EXIT_INCONCLUSIVE }))
}

fn thm3() -> Result<Vec<Row>> {
    (2u32..=10)
        .into_par_iter()
        .map(|d| {
            let published = Q0_PUBLISHED[d as usize - 2];
            let computed = q0_upper(d, Q0_STEP)?.q0_upper;
            let residual = threshold_residual(d, published)?;
            Ok(Row::new()
                .with("item", format!("q0({d})"))
                .with("published", published)
                .with("computed", computed)
                .with("residual_at_published", residual)
                .with("match", computed <= published + Q0_SLACK && residual >= 0.0))
        })
        .collect()
}

fn tomas_stein(d: u32, q: &str, head0: f64, heads: &[f64; 28]) -> Result<Vec<Row>> {
    let q: Exponent = q.parse()?;
    let rep: HierarchyReport = verify_hierarchy(d, q, DEFAULT_CUTOFF)?;
    let mut rows = vec![
        Row::new()
            .with("item", "head k=0")
            .with("published", head0)
            .with("computed", rep.lambda0.head)
            .with("shown", format!("{:.3}", trunc3(rep.lambda0.head.lo)))
            .with("match", matches_3dp(rep.lambda0.head, head0)),
        Row::new()
            .with("item", "tail bound")
            .with("published", 0.005)
            .with("computed", Enclosure::point(rep.lambda0.tail_hi))
            .with("shown", format!("{}", rep.lambda0.tail_hi))
            .with("match", rep.lambda0.tail_hi == 0.005),
        Row::new()
            .with("item", "cutoff K")
            .with("published", 28.0)
            .with("computed", Enclosure::point(rep.cutoff_k as f64))
            .with("shown", rep.cutoff_k.to_string())
            .with("match", rep.cutoff_k == 28),
        Row::new()
            .with("item", "verdict")
            .with("published", 1.0)
            .with("computed", Enclosure::point((rep.verdict == Verdict::Verified) as u8 as f64))
            .with("shown", rep.verdict.to_string())
            .with("match", rep.verdict == Verdict::Verified),
    ];
    let per_k: Vec<Enclosure> = (1..=28u32)
        .into_par_iter()
        .map(|k| match rep.per_k.iter().find(|b| b.k == k) {
            Some(b) => Ok(b.head),
            None => Ok(lambda(&ProblemSpec::new(d, q, k)?, DEFAULT_CUTOFF, DEFAULT_TOL)?.head),
        })
        .collect::<Result<_>>()?;
    for (i, head) in per_k.into_iter().enumerate() {
        rows.push(
            Row::new()
                .with("item", format!("head k={}", i + 1))
                .with("published", heads[i])
                .with("computed", head)
                .with("shown", format!("{:.3}", trunc3(head.lo)))
                .with("match", matches_3dp(head, heads[i])),
        );
    }
    Ok(rows)
}

/// `sup_r |r^{1/3} J_ν(r)|` for each order in [`LANDAU_ORDERS`].
fn landau_table() -> Result<Vec<Row>> {
    LANDAU_ORDERS
        .par_iter()
        .map(|&nu| {
            let reach = nu + 8.0 * nu.cbrt() + 20.0;
            let f = |r: f64| Ok(bessel_j(nu, r)?.abs().scale(r.cbrt()));
            let (at, sup) = maximize(f, 0.0, reach, 1e-9)?;
            Ok(Row::new()
                .with("item", format!("nu={nu}"))
                .with("published", LANDAU)
                .with("computed", sup)
                .with("shown", format!("r={at:.6}"))
                .with("match", sup.hi <= LANDAU))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_decimal_match() {
        assert!(matches_3dp(Enclosure::new(0.2571, 0.2572).unwrap(), 0.257));
        assert!(matches_3dp(Enclosure::new(0.2569, 0.2571).unwrap(), 0.257));
        assert!(!matches_3dp(Enclosure::new(0.2580, 0.2581).unwrap(), 0.257));
        assert!(!matches_3dp(Enclosure::new(0.2560, 0.2569).unwrap(), 0.257));
    }
}
