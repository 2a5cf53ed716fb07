//! Central differences with Richardson extrapolation over step halvings.
//!
//! Both 5-point stencils have truncation error `c₄h⁴ + c₆h⁶ + …`, so column
//! `m` of the table eliminates `h^{2m+2}`.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Richardson {
    /// Most extrapolated entry.
    pub value: f64,
    /// `|T[L][L] − T[L−1][L−1]|`, zero for a single level.
    pub change: f64,
    /// Row `j` holds the step `h₀·2^{−j}` and its extrapolations.
    pub table: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
}

fn extrapolate(raw: Vec<f64>, steps: Vec<f64>) -> Richardson {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for (j, d) in raw.into_iter().enumerate() {
        let mut row = vec![d];
        for m in 1..=j {
            let p = (2 * m + 2) as i32;
            let factor = 2f64.powi(p) - 1.0;
            let prev = table[j - 1][m - 1];
            row.push(row[m - 1] + (row[m - 1] - prev) / factor);
        }
        table.push(row);
    }
    let last = table.len() - 1;
    let value = table[last][last];
    let change = if last == 0 { 0.0 } else { (value - table[last - 1][last - 1]).abs() };
    Richardson { value, change, table, steps }
}

fn halvings(h0: f64, levels: usize) -> Vec<f64> {
    (0..=levels).map(|j| h0 / 2f64.powi(j as i32)).collect()
}

/// `f'(0)` from `(−f(2h) + 8f(h) − 8f(−h) + f(−2h))/(12h)`.
pub fn first_derivative<F>(f: F, h0: f64, levels: usize) -> Richardson
where
    F: Fn(f64) -> f64,
{
    let steps = halvings(h0, levels);
    let raw = steps
        .iter()
        .map(|&h| (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h))
        .collect();
    extrapolate(raw, steps)
}

/// `f''(0)` from `(−f(2h) + 16f(h) − 30f(0) + 16f(−h) − f(−2h))/(12h²)`.
pub fn second_derivative<F>(f: F, h0: f64, levels: usize) -> Richardson
where
    F: Fn(f64) -> f64,
{
    let f0 = f(0.0);
    second_derivative_from_samples(f0, |h| (f(h), f(-h), f(2.0 * h), f(-2.0 * h)), h0, levels)
}

/// As [`second_derivative`], with the four off-center samples
/// `(f(h), f(−h), f(2h), f(−2h))` supplied per step.
pub fn second_derivative_from_samples<F>(f0: f64, samples: F, h0: f64, levels: usize) -> Richardson
where
    F: Fn(f64) -> (f64, f64, f64, f64),
{
    let steps = halvings(h0, levels);
    let raw = steps
        .iter()
        .map(|&h| {
            let (p1, m1, p2, m2) = samples(h);
            (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h)
        })
        .collect();
    extrapolate(raw, steps)
}
