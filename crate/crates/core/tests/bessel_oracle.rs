//! Frozen 50-digit reference values (see `data/gen_oracles.py`).

use serde::Deserialize;
use vega_sharp::specfun::{bessel_j, gamma, ln_gamma};

#[derive(Deserialize)]
struct BesselRow {
    nu: f64,
    r: f64,
    value: f64,
}

#[derive(Deserialize)]
struct GammaRow {
    x: f64,
    gamma: f64,
    ln_gamma: f64,
}

fn rows<T: for<'de> Deserialize<'de>>(name: &str) -> Vec<T> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn bessel_contains_reference_and_is_narrow() {
    let table: Vec<BesselRow> = rows("bessel_j.csv");
    assert_eq!(table.len(), 400);
    let mut widest = 0.0f64;
    for row in &table {
        let e = bessel_j(row.nu, row.r).unwrap();
        // the reference itself is rounded to f64 when parsed
        let slack = row.value.abs() * f64::EPSILON;
        assert!(
            e.lo - slack <= row.value && row.value <= e.hi + slack,
            "J_{}({}) = {} not in {e}",
            row.nu,
            row.r,
            row.value
        );
        assert!(e.width() <= 1e-11, "J_{}({}) width {}", row.nu, row.r, e.width());
        widest = widest.max(e.width());
    }
    println!("widest Bessel enclosure: {widest:e}");
}

#[test]
fn bessel_one_at_two_hundred() {
    let e = bessel_j(1.0, 200.0).unwrap();
    assert!((e.mid() - -5.430_453_818_237_822e-2).abs() < 1e-11);
}

#[test]
fn gamma_matches_reference() {
    let table: Vec<GammaRow> = rows("gamma.csv");
    for row in &table {
        let g = gamma(row.x).unwrap();
        assert!(((g - row.gamma) / row.gamma).abs() < 1e-13, "gamma({})", row.x);
        let lg = ln_gamma(row.x).unwrap();
        assert!((lg - row.ln_gamma).abs() < 1e-12 * row.ln_gamma.abs().max(1.0), "ln_gamma({})", row.x);
    }
}
