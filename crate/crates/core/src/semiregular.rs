//! The semi-regular family: circumscriptible polygons whose angles are all
//! equal except possibly one larger angle.
//!
//! Members are indexed by `s ∈ (2, ∞)` through the normalization
//! `S = 4π(s − 1)/(s − 2)`, which equals the corner functional of the regular
//! `s`-gon when `s` is an integer. The member for a non-integer `s` has
//! `⌈s⌉` sides.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{from_samples_1d, grid_points, GridCertificate, LimitCheck};
use crate::error::{Error, Result};
use crate::geometry::{self, AngleSet, Polygon};
use crate::roots;

/// Absolute tolerance on `theta_big` for the bracketed solve.
pub const THETA_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiRegularSpec {
    pub s: f64,
    pub n: usize,
    pub theta_small: f64,
    pub theta_big: f64,
}

/// `4π(s − 1)/(s − 2)`.
pub fn normalized_s(s: f64) -> f64 {
    4.0 * PI * (s - 1.0) / (s - 2.0)
}

/// Right-hand side of the harmonic constraint `Σ 1/θ = (n + 2s/(s − 2))/π`.
pub fn harmonic_target(s: f64, n: usize) -> f64 {
    (n as f64 + 2.0 * s / (s - 2.0)) / PI
}

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 2.0) {
        return Err(Error::domain(format!(
            "family parameter s must exceed 2, got {s}"
        )));
    }
    Ok(())
}

/// Family member with parameter `s`.
pub fn from_s(s: f64) -> Result<SemiRegularSpec> {
    check_s(s)?;
    let n_f = s.ceil();
    let n = n_f as usize;
    let regular = (n_f - 2.0) * PI / n_f;
    if s == n_f {
        return Ok(SemiRegularSpec {
            s,
            n,
            theta_small: regular,
            theta_big: regular,
        });
    }
    let target = harmonic_target(s, n);
    let small_of = |big: f64| ((n_f - 2.0) * PI - big) / (n_f - 1.0);
    let residual = |big: f64| (n_f - 1.0) / small_of(big) + 1.0 / big - target;
    let root = roots::bracketed(residual, regular, PI, THETA_TOL, 200)?;
    let theta_big = root.x;
    let theta_small = small_of(theta_big);
    // The residual is increasing in theta_big exactly when theta_big > theta_small.
    if !(theta_big > theta_small && theta_small > 0.0 && theta_big < PI) {
        return Err(Error::Numerical(format!(
            "solve for s = {s} left the monotone branch (big {theta_big}, small {theta_small})"
        )));
    }
    Ok(SemiRegularSpec {
        s,
        n,
        theta_small,
        theta_big,
    })
}

impl SemiRegularSpec {
    /// Angles with the large one first.
    pub fn angle_values(&self) -> Vec<f64> {
        let mut v = vec![self.theta_small; self.n];
        v[0] = self.theta_big;
        v
    }

    pub fn angles(&self) -> Result<AngleSet> {
        AngleSet::new(self.angle_values())
    }

    pub fn s_value(&self) -> f64 {
        self.angle_values()
            .iter()
            .map(|&t| geometry::corner_term(t))
            .sum()
    }

    pub fn is_regular(&self) -> bool {
        self.theta_big == self.theta_small
    }

    pub fn polygon(&self) -> Result<Polygon> {
        geometry::circumscriptible_from_angles(&self.angles()?)
    }

    pub fn area(&self) -> f64 {
        geometry::cot_half_area(&self.angle_values())
    }

    /// Residuals of the angle-sum and corner-functional equations.
    pub fn residuals(&self) -> (f64, f64) {
        let v = self.angle_values();
        let sum: f64 = v.iter().sum();
        (
            sum - (self.n as f64 - 2.0) * PI,
            self.s_value() - normalized_s(self.s),
        )
    }
}

/// Unit-perimeter area of the family member with parameter `s`.
pub fn envelope_area(s: f64) -> Result<f64> {
    Ok(from_s(s)?.area())
}

/// Inverse of the normalization: `(2S − 4π)/(S − 4π)`.
#[allow(non_snake_case)]
pub fn s_from_S(S: f64) -> Result<f64> {
    let four_pi = 4.0 * PI;
    if !(S.is_finite() && S > four_pi) {
        return Err(Error::domain(format!(
            "S = {S} must exceed 4π; no convex polygon attains it"
        )));
    }
    Ok((2.0 * S - four_pi) / (S - four_pi))
}

/// Point on the isoperimetric envelope: `(S, area)` of the member `s`.
pub fn envelope_point(s: f64) -> Result<(f64, f64)> {
    let spec = from_s(s)?;
    Ok((spec.s_value(), spec.area()))
}

/// Checks on a grid that distinct members have distinct `S`.
///
/// `S` is measured from the constructed angles, then mapped back through
/// [`s_from_S`]; the certified quantity is the increment of the recovered
/// parameter between consecutive grid points. That map is a decreasing
/// bijection of `(4π, ∞)` onto `(2, ∞)`, so a positive increment is the
/// same as a strict decrease of `S`. The raw minimum decrease of `S` is
/// attached as a limit check.
pub fn injectivity_scan(s_lo: f64, s_hi: f64, step: f64) -> Result<GridCertificate> {
    check_s(s_lo)?;
    if !(s_hi > s_lo && step > 0.0) {
        return Err(Error::domain(format!(
            "need s_lo < s_hi and step > 0 (got {s_lo}, {s_hi}, {step})"
        )));
    }
    let xs = grid_points(s_lo, s_hi, step);
    let measured: Vec<f64> = xs
        .par_iter()
        .map(|&s| from_s(s).map(|spec| spec.s_value()))
        .collect::<Result<_>>()?;
    let recovered: Vec<f64> = measured
        .iter()
        .map(|&v| s_from_S(v))
        .collect::<Result<_>>()?;
    let increments: Vec<f64> = recovered.windows(2).map(|w| w[1] - w[0]).collect();
    let min_drop = measured
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min);
    Ok(from_samples_1d(
        "semiregular-injectivity",
        &format!("s in [{s_lo}, {s_hi}]"),
        "increment of s_from_S(S(from_s(s))) between consecutive grid points",
        &xs[..xs.len() - 1],
        &increments,
        step,
    )
    .with_limit(LimitCheck {
        locus: "minimum consecutive decrease of S".into(),
        expected: "> 0".into(),
        observed: min_drop,
        pass: min_drop > 0.0,
    }))
}
