//! Grid certificates: auditable records of inequality checks over sampled
//! domains.
//!
//! A certificate samples a quantity `q` that must be strictly positive,
//! records the smallest sample (the margin) and the largest difference
//! quotient between neighbouring samples (the slope). It passes when
//! `margin > 0` and `margin > slope · step`, so that the first-order
//! extrapolation from any sample to the rest of its grid cell stays
//! positive. Zeros that the inequality has by construction (an equality
//! point, a vanishing factor) are divided out before sampling; the quantity
//! string records exactly what was sampled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Excluded neighbourhood of a degenerate locus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collar {
    pub locus: String,
    pub width: f64,
}

/// Separate check of a value at an excluded locus or a boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub locus: String,
    pub expected: String,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub lemma: String,
    pub domain: String,
    pub quantity: String,
    pub step: f64,
    pub samples: usize,
    pub min_margin: f64,
    /// Coordinates of the sample attaining `min_margin`.
    pub min_location: Vec<f64>,
    pub max_slope: f64,
    pub collars: Vec<Collar>,
    pub limit_checks: Vec<LimitCheck>,
    /// First sample where the quantity was not positive, if any.
    pub counterexample: Option<Vec<f64>>,
    pub verdict: Verdict,
}

impl GridCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Adds a limit check and updates the verdict.
    pub fn with_limit(mut self, check: LimitCheck) -> Self {
        self.limit_checks.push(check);
        self.refresh();
        self
    }

    pub fn with_collar(mut self, locus: impl Into<String>, width: f64) -> Self {
        self.collars.push(Collar {
            locus: locus.into(),
            width,
        });
        self
    }

    fn refresh(&mut self) {
        let ok = self.min_margin.is_finite()
            && self.min_margin > 0.0
            && self.min_margin > self.max_slope * self.step
            && self.counterexample.is_none()
            && self.limit_checks.iter().all(|c| c.pass);
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }
}

/// Sample points `lo, lo + h, …` followed by `hi` itself; the last gap is at
/// most `h`.
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut xs = Vec::with_capacity(((hi - lo) / step).max(0.0) as usize + 2);
    let mut i = 0usize;
    loop {
        let x = lo + i as f64 * step;
        if x >= hi - 1e-9 * step {
            break;
        }
        xs.push(x);
        i += 1;
    }
    xs.push(hi);
    xs
}

/// Certifies `q > 0` on a 1-D grid.
pub fn certify_1d<F>(
    lemma: &str,
    domain: &str,
    quantity: &str,
    xs: &[f64],
    step: f64,
    q: F,
) -> GridCertificate
where
    F: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = xs.par_iter().map(|&x| q(x)).collect();
    from_samples_1d(lemma, domain, quantity, xs, &values, step)
}

/// Builds a 1-D certificate from precomputed samples `values[i] = q(xs[i])`.
pub fn from_samples_1d(
    lemma: &str,
    domain: &str,
    quantity: &str,
    xs: &[f64],
    values: &[f64],
    step: f64,
) -> GridCertificate {
    let mut min_idx = 0;
    let mut counterexample = None;
    for (i, v) in values.iter().enumerate() {
        if v < &values[min_idx] || v.is_nan() {
            min_idx = i;
        }
        if counterexample.is_none() && (v.is_nan() || *v <= 0.0) {
            counterexample = Some(vec![xs[i]]);
        }
    }
    let max_slope = values
        .windows(2)
        .zip(xs.windows(2))
        .map(|(v, x)| (v[1] - v[0]).abs() / (x[1] - x[0]))
        .fold(0.0, f64::max);
    let mut cert = GridCertificate {
        lemma: lemma.to_string(),
        domain: domain.to_string(),
        quantity: quantity.to_string(),
        step,
        samples: values.len(),
        min_margin: values.get(min_idx).copied().unwrap_or(f64::NAN),
        min_location: xs.get(min_idx).map(|&x| vec![x]).unwrap_or_default(),
        max_slope,
        collars: Vec::new(),
        limit_checks: Vec::new(),
        counterexample,
        verdict: Verdict::Fail,
    };
    cert.refresh();
    cert
}

/// Certifies `q > 0` on the tensor grid `xs × ys`, restricted to points
/// where `inside` holds. Slopes use horizontal and vertical neighbours that
/// are both inside.
#[allow(clippy::too_many_arguments)]
pub fn certify_2d<F, M>(
    lemma: &str,
    domain: &str,
    quantity: &str,
    xs: &[f64],
    ys: &[f64],
    step: f64,
    inside: M,
    q: F,
) -> GridCertificate
where
    F: Fn(f64, f64) -> f64 + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    let rows: Vec<Vec<Option<f64>>> = xs
        .par_iter()
        .map(|&x| ys.iter().map(|&y| inside(x, y).then(|| q(x, y))).collect())
        .collect();

    let mut samples = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut min_location = Vec::new();
    let mut counterexample = None;
    let mut max_slope = 0.0_f64;
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let Some(v) = *v else { continue };
            samples += 1;
            if v < min_margin || v.is_nan() {
                min_margin = v;
                min_location = vec![xs[i], ys[j]];
            }
            if counterexample.is_none() && (v.is_nan() || v <= 0.0) {
                counterexample = Some(vec![xs[i], ys[j]]);
            }
            if let Some(Some(r)) = row.get(j + 1) {
                max_slope = max_slope.max((r - v).abs() / (ys[j + 1] - ys[j]));
            }
            if let Some(Some(d)) = rows.get(i + 1).map(|next| next[j]) {
                max_slope = max_slope.max((d - v).abs() / (xs[i + 1] - xs[i]));
            }
        }
    }
    let mut cert = GridCertificate {
        lemma: lemma.to_string(),
        domain: domain.to_string(),
        quantity: quantity.to_string(),
        step,
        samples,
        min_margin,
        min_location,
        max_slope,
        collars: Vec::new(),
        limit_checks: Vec::new(),
        counterexample,
        verdict: Verdict::Fail,
    };
    cert.refresh();
    cert
}

/// Certifies that consecutive values strictly decrease; the certified
/// quantity is the decrement `f(x_i) − f(x_{i+1})`.
pub fn certify_decreasing<F>(
    lemma: &str,
    domain: &str,
    xs: &[f64],
    step: f64,
    f: F,
) -> GridCertificate
where
    F: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let drops: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    from_samples_1d(
        lemma,
        domain,
        "consecutive decrement f(x_i) - f(x_i+1)",
        &xs[..xs.len().saturating_sub(1)],
        &drops,
        step,
    )
}
