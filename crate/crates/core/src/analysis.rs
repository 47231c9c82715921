//! Closed-form functions behind the maximizer characterization, and grid
//! certificates for the inequalities they satisfy.
//!
//! The two-angle reduction works in coordinates `(θ̄₁, θ̄₂)` with
//! `θ̄₁ ≥ θ̄₂`: `k` copies of `θ̄₁` and `n − k` copies of `θ̄₂`, where the
//! constraints are solved for `(n, k)`. Everything here takes `s` as a plain
//! runtime parameter.
//!
//! Several displayed expressions are `0/0` on parts of the boundary. They are
//! evaluated through rewritten forms that have no cancellation there:
//! `x·cot(x/2)` and `(u − sin u)/u³` switch to their Taylor series near zero,
//! and the objective is written through `T1` so that `θ̄₁ = π` is a regular
//! point.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::{
    certify_1d, certify_2d, certify_decreasing, grid_points, GridCertificate, LimitCheck,
};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Elementary helpers

/// `x·cot(x/2)`, equal to 2 at `x = 0`.
pub fn x_cot_half(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // 2 − x²/6 − x⁴/360
        let x2 = x * x;
        2.0 - x2 / 6.0 - x2 * x2 / 360.0
    } else {
        x / (0.5 * x).tan()
    }
}

/// `(u − sin u)/u³`, equal to 1/6 at `u = 0`.
pub fn sine_deficit(u: f64) -> f64 {
    if u.abs() < 0.5 {
        // Σ_{m≥1} (−1)^{m+1} u^{2m−2}/(2m+1)!
        let u2 = u * u;
        let mut term = 1.0 / 6.0;
        let mut sum = term;
        for m in 2..12 {
            let m = m as f64;
            term *= -u2 / ((2.0 * m) * (2.0 * m + 1.0));
            sum += term;
        }
        sum
    } else {
        (u - u.sin()) / (u * u * u)
    }
}

/// `tan(u/2)/u`, equal to 1/2 at `u = 0`.
fn tan_half_over(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        0.5 + u * u / 24.0
    } else {
        (0.5 * u).tan() / u
    }
}

fn csc2_half(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    1.0 / (s * s)
}

fn in_closed(x: f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    if x.is_finite() && x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} = {x} outside [{lo}, {hi}]")))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s > 2.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("s must exceed 2, got {s}")))
    }
}

/// `(s − 1)π/(s + 1)`: lower edge of `θ̄₁` in the regions, and `h(s, 0)`.
pub fn theta1_lo(s: f64) -> f64 {
    (s - 1.0) * PI / (s + 1.0)
}

/// `(s − 2)π/s`: upper edge of `θ̄₂`, where `k` changes sign.
pub fn theta2_hi(s: f64) -> f64 {
    (s - 2.0) * PI / s
}

// ---------------------------------------------------------------------------
// Base case

/// `z(2 + cos z) − 3 sin z`.
pub fn base_gap(z: f64) -> f64 {
    if z.abs() < 1.0 {
        // Σ_{k≥2} (−1)^k (2k − 2) z^{2k+1}/(2k + 1)!
        let z2 = z * z;
        let mut pow_fact = z.powi(5) / 120.0; // z^{2k+1}/(2k+1)! at k = 2
        let mut sum = 0.0;
        for k in 2..16 {
            let kf = k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (2.0 * kf - 2.0) * pow_fact;
            pow_fact *= z2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        }
        sum
    } else {
        z * (2.0 + z.cos()) - 3.0 * z.sin()
    }
}

/// `g(x) = f'(x^{−1/2})` up to the constant factor used in the concavity
/// argument: `1/(cos x^{−1/2} − 1)`.
pub fn g_base(x: f64) -> f64 {
    1.0 / ((1.0 / x.sqrt()).cos() - 1.0)
}

/// Second derivative of [`g_base`] on `(π⁻², ∞)`.
pub fn g_second_derivative(x: f64) -> Result<f64> {
    let lo = 1.0 / (PI * PI);
    if !(x.is_finite() && x > lo) {
        return Err(Error::domain(format!("g'' needs x > π⁻², got {x}")));
    }
    let z = 1.0 / x.sqrt();
    // 2 + cos z − 3 x^{1/2} sin z = base_gap(z)/z
    let numer = base_gap(z) / z;
    let s4 = (0.5 * z).sin().powi(4);
    Ok(-numer / (16.0 * x * x * x * s4))
}

// ---------------------------------------------------------------------------
// T1, T2

/// `T1(x) = x·cot(x/2)/(π − x)` on `[0, π]`, with limits `2/π` and `π/2`.
pub fn t1(x: f64) -> Result<f64> {
    in_closed(x, 0.0, PI, "x")?;
    Ok(t1_raw(x))
}

pub(crate) fn t1_raw(x: f64) -> f64 {
    // cot(x/2) = tan(u/2) with u = π − x
    let u = PI - x;
    if u < 0.5 {
        x * tan_half_over(u)
    } else {
        x_cot_half(x) / u
    }
}

/// `T2(x) = −2π(x − π + sin x)/(π − x)³` on `[0, π]`, equal to `π/3` at `π`.
pub fn t2(x: f64) -> Result<f64> {
    in_closed(x, 0.0, PI, "x")?;
    Ok(t2_raw(x))
}

pub(crate) fn t2_raw(x: f64) -> f64 {
    2.0 * PI * sine_deficit(PI - x)
}

/// `T1''(x)` from the positive-term series truncated after `terms` terms,
/// with an upper bound on the omitted tail.
///
/// Each term is positive on `[0, π]`, so the partial sum is a lower bound.
/// The tail bound uses `term_k ≤ 640/(81π³k⁴)`.
pub fn t1_second(x: f64, terms: usize) -> Result<(f64, f64)> {
    in_closed(x, 0.0, PI, "x")?;
    if terms == 0 {
        return Err(Error::domain("need at least one series term"));
    }
    let pi3 = PI * PI * PI;
    let sum = (1..=terms)
        .map(|k| {
            let k = k as f64;
            let a = 2.0 * k * PI;
            let numer = 32.0
                * k
                * k
                * (4.0 * k * k * pi3 + 12.0 * k * k * PI * PI * x + 3.0 * PI * x * x + x * x * x);
            let denom = (2.0 * k - 1.0) * (2.0 * k + 1.0) * (a - x).powi(3) * (a + x).powi(3);
            numer / denom
        })
        .sum();
    let kf = terms as f64;
    let tail = 640.0 / (243.0 * pi3 * kf * kf * kf);
    Ok((sum, tail))
}

/// `T2''(x) = 2π[6(π−x)(1−cos x) − (12 − (π−x)²) sin x]/(π−x)⁵`.
pub fn t2_second(x: f64) -> Result<f64> {
    in_closed(x, 0.0, PI, "x")?;
    let u = PI - x;
    if u < 0.6 {
        // numerator = Σ_{m≥2} (−1)^m [6/(2m)! − 12/(2m+1)! − 1/(2m−1)!] u^{2m+1}
        let mut sum = 0.0;
        let mut upow = 1.0; // u^{2m−4}
        let mut f2m1 = 6.0; // (2m−1)! at m = 2
        for m in 2..14 {
            let mf = m as f64;
            let f2m = f2m1 * 2.0 * mf;
            let f2m_1 = f2m * (2.0 * mf + 1.0);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (6.0 / f2m - 12.0 / f2m_1 - 1.0 / f2m1) * upow;
            upow *= u * u;
            f2m1 = f2m_1;
        }
        Ok(2.0 * PI * sum)
    } else {
        let numer = 6.0 * u * (1.0 - x.cos()) - (12.0 - u * u) * x.sin();
        Ok(2.0 * PI * numer / u.powi(5))
    }
}

// ---------------------------------------------------------------------------
// Two-angle reduction

/// A point `(θ̄₁, θ̄₂)` of the reduced problem, `π ≥ θ̄₁ ≥ θ̄₂ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoAnglePoint {
    pub theta1: f64,
    pub theta2: f64,
}

impl TwoAnglePoint {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        in_closed(theta1, 0.0, PI, "theta1")?;
        in_closed(theta2, 0.0, PI, "theta2")?;
        if theta1 < theta2 {
            return Err(Error::domain(format!(
                "ordering requires theta1 >= theta2 (got {theta1} < {theta2})"
            )));
        }
        Ok(Self { theta1, theta2 })
    }
}

/// `(n, k)` solving both constraints of the two-angle problem.
pub fn nk_from_angles(s: f64, p: TwoAnglePoint) -> Result<(f64, f64)> {
    check_s(s)?;
    let (a, b) = (p.theta1, p.theta2);
    if a == b {
        return Err(Error::domain(
            "theta1 = theta2 is the singular regular-polygon locus",
        ));
    }
    if a == PI {
        return Err(Error::domain(
            "theta1 = π is singular for (n, k); use the limit forms",
        ));
    }
    let n = (2.0 * (s - 2.0) * PI * PI - 2.0 * a * b * s) / ((s - 2.0) * (PI - a) * (PI - b));
    let k = 2.0 * a * (b * s - (s - 2.0) * PI) / ((s - 2.0) * (b - a) * (PI - a));
    Ok((n, k))
}

/// Residuals of the two constraints at `(n, k, θ̄₁, θ̄₂)`.
pub fn two_angle_residuals(s: f64, n: f64, k: f64, p: TwoAnglePoint) -> (f64, f64) {
    let (a, b) = (p.theta1, p.theta2);
    let harmonic = k / a + (n - k) / b - (n + 2.0 * s / (s - 2.0)) / PI;
    let sum = k * a + (n - k) * b - (n - 2.0) * PI;
    (harmonic, sum)
}

/// Objective `G_s = k·cot(θ̄₁/2) + (n − k)·cot(θ̄₂/2)`.
///
/// Evaluated as
/// `2[((s−2)π − sθ̄₂)·T1(θ̄₁) − ((s−2)π − sθ̄₁)·T1(θ̄₂)] / ((s−2)(θ̄₁ − θ̄₂))`,
/// which is finite on the whole closed region including `θ̄₁ = π` and
/// `θ̄₂ = 0`. The area of the matching polygon candidate is `1/(4G)`.
pub fn objective(s: f64, p: TwoAnglePoint) -> Result<f64> {
    check_s(s)?;
    if p.theta1 == p.theta2 {
        return Err(Error::domain(
            "objective is singular on the diagonal theta1 = theta2",
        ));
    }
    Ok(objective_raw(s, p.theta1, p.theta2))
}

pub(crate) fn objective_raw(s: f64, a: f64, b: f64) -> f64 {
    let c = (s - 2.0) * PI;
    2.0 * ((c - s * b) * t1_raw(a) - (c - s * a) * t1_raw(b)) / ((s - 2.0) * (a - b))
}

/// The same objective evaluated literally from `(n, k)` and cotangents.
pub fn objective_from_nk(s: f64, p: TwoAnglePoint) -> Result<f64> {
    let (n, k) = nk_from_angles(s, p)?;
    Ok(k / (0.5 * p.theta1).tan() + (n - k) / (0.5 * p.theta2).tan())
}

/// `G̃(θ̄₁, θ̄₂)`, the factor of `∂θ̄₁G_s` that carries its sign. It does not
/// depend on `s`, and has a finite limit at `θ̄₁ = π`.
pub fn g_tilde(p: TwoAnglePoint) -> f64 {
    g_tilde_raw(p.theta1, p.theta2)
}

pub(crate) fn g_tilde_raw(a: f64, b: f64) -> f64 {
    // [θ̄₁(θ̄₁−θ̄₂)(θ̄₁−π) + (θ̄₁² − θ̄₂π) sin θ̄₁]/(π−θ̄₁)²
    //   = −θ̄₂ − (θ̄₁² − θ̄₂π)·u·σ(u),  u = π − θ̄₁, σ(u) = (u − sin u)/u³
    let u = PI - a;
    let bracket = -b - (a * a - b * PI) * u * sine_deficit(u);
    2.0 * x_cot_half(b) + (PI - b) * csc2_half(a) * bracket
}

/// `G̃` exactly as displayed, with the `1/(π − θ̄₁)²` prefactor outside.
pub fn g_tilde_displayed(p: TwoAnglePoint) -> f64 {
    let (a, b) = (p.theta1, p.theta2);
    let first = 2.0 * b * (a - PI).powi(2) / (0.5 * b).tan();
    let second = (PI - b) * csc2_half(a) * (a * (a - b) * (a - PI) + (a * a - b * PI) * a.sin());
    (first + second) / (PI - a).powi(2)
}

/// `∂θ̄₁G̃ = (θ̄₁ − θ̄₂)(π − θ̄₂)csc²(θ̄₁/2)·(T1(θ̄₁) − T2(θ̄₁))`.
pub fn g_tilde_dtheta1(p: TwoAnglePoint) -> f64 {
    let (a, b) = (p.theta1, p.theta2);
    (a - b) * (PI - b) * csc2_half(a) * (t1_raw(a) - t2_raw(a))
}

/// `∂θ̄₁G_s = ((s−2)π − sθ̄₂)/((θ̄₁−θ̄₂)²(s−2)(π−θ̄₂)) · G̃`.
pub fn dg_dtheta1(s: f64, p: TwoAnglePoint) -> Result<f64> {
    check_s(s)?;
    if p.theta1 == p.theta2 {
        return Err(Error::domain("derivative is singular on the diagonal"));
    }
    if p.theta2 == PI {
        return Err(Error::domain("derivative is singular at theta2 = π"));
    }
    Ok(dg_dtheta1_raw(s, p.theta1, p.theta2))
}

fn dg_dtheta1_raw(s: f64, a: f64, b: f64) -> f64 {
    let d = a - b;
    ((s - 2.0) * PI - b * s) / (d * d * (s - 2.0) * (PI - b)) * g_tilde_raw(a, b)
}

/// `∂θ̄₁G_s` divided by its factor `((s−2)π − sθ̄₂)/((s−2)(π−θ̄₂))`, which is
/// positive below `Γ₄` and vanishes on it. Equals `G̃/(θ̄₁ − θ̄₂)²`.
pub fn dg_dtheta1_reduced(p: TwoAnglePoint) -> f64 {
    let d = p.theta1 - p.theta2;
    g_tilde_raw(p.theta1, p.theta2) / (d * d)
}

/// `Ĝ_s(θ̄₂) = G̃((s−2)π/s, θ̄₂)·2sπ/(π − θ̄₂)`.
pub fn g_hat_cap(s: f64, theta2: f64) -> Result<f64> {
    check_s(s)?;
    in_closed(theta2, 0.0, PI - 1e-15, "theta2")?;
    Ok(g_tilde_raw(theta2_hi(s), theta2) * 2.0 * s * PI / (PI - theta2))
}

// ---------------------------------------------------------------------------
// Boundary restriction Γ₁

/// `g_s(θ̄₂) = G_s((s−1)π/(s+1), θ̄₂)` in its closed form, for
/// `θ̄₂ ∈ [0, (s−2)π/s]`.
pub fn g_s_boundary(s: f64, theta2: f64) -> Result<f64> {
    check_s(s)?;
    in_closed(theta2, 0.0, theta2_hi(s), "theta2")?;
    let b = theta2;
    let numer = 4.0 * PI * x_cot_half(b)
        + (s * s - 1.0) * (PI - b) * ((s - 2.0) * PI - s * b) * (PI / (s + 1.0)).tan();
    let denom = (s - 2.0) * (PI - b) * ((s - 1.0) * PI - (1.0 + s) * b);
    Ok(numer / denom)
}

/// `ĝ_s(θ̄₂)` on `(0, π)`.
pub fn g_s_hat(s: f64, theta2: f64) -> Result<f64> {
    check_s(s)?;
    if !(theta2 > 0.0 && theta2 < PI) {
        return Err(Error::domain(format!("theta2 = {theta2} outside (0, π)")));
    }
    Ok(g_s_hat_raw(s, theta2))
}

fn g_s_hat_raw(s: f64, b: f64) -> f64 {
    let first = 2.0 * (b * b * (1.0 + s) - (s - 1.0) * PI * PI) / (0.5 * b).tan();
    let second = b * (b - PI) * (b * (1.0 + s) + PI * (1.0 - s)) * csc2_half(b);
    (first + second) / (b - PI).powi(2)
}

/// `g_s'(θ̄₂) = −2π(ĝ_s + (s²−1)tan(π/(s+1)))/((s−2)(θ̄₂(1+s) + π(1−s))²)`.
pub fn g_s_derivative(s: f64, theta2: f64) -> Result<f64> {
    let hat = g_s_hat(s, theta2)?;
    let c = (s * s - 1.0) * (PI / (s + 1.0)).tan();
    let lin = theta2 * (1.0 + s) + PI * (1.0 - s);
    Ok(-2.0 * PI * (hat + c) / ((s - 2.0) * lin * lin))
}

/// `h(s, θ̄₂)`: lower bound on `θ̄₁` implied by `n ≥ s + 1`.
pub fn h_bound(s: f64, theta2: f64) -> Result<f64> {
    check_s(s)?;
    in_closed(theta2, 0.0, theta2_hi(s), "theta2")?;
    Ok(h_bound_raw(s, theta2))
}

fn h_bound_raw(s: f64, b: f64) -> f64 {
    PI * (s - 2.0) * (PI * (s - 1.0) - b * (1.0 + s))
        / (2.0 * b + (s + 1.0) * (PI * (s - 2.0) - s * b))
}

/// The curve `Γ₁` of `S_s` as displayed: `θ̄₁` as a function of `θ̄₂`.
pub fn gamma1_s(s: f64, theta2: f64) -> f64 {
    let a = s * s - s - 2.0;
    let c = s * s + s - 2.0;
    a * PI / c - 4.0 * PI * PI * (s - 2.0) / (c * (theta2 * c + PI * (-s * s + s + 2.0)))
}

// ---------------------------------------------------------------------------
// Regions

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    /// The box `[(s−1)π/(s+1), π] × [0, (s−2)π/s]`.
    R,
    /// The curvilinear triangle cut from `R` by `θ̄₁ ≥ h(s, θ̄₂)`.
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub s: f64,
    pub kind: RegionKind,
}

impl RegionSpec {
    pub fn new(s: f64, kind: RegionKind) -> Result<Self> {
        check_s(s)?;
        Ok(Self { s, kind })
    }

    pub fn contains(&self, p: TwoAnglePoint) -> bool {
        self.contains_raw(p.theta1, p.theta2)
    }

    pub(crate) fn contains_raw(&self, a: f64, b: f64) -> bool {
        let s = self.s;
        let in_box = (0.0..=theta2_hi(s)).contains(&b) && a >= theta1_lo(s) && a <= PI;
        match self.kind {
            RegionKind::R => in_box,
            RegionKind::S => in_box && a >= h_bound_raw(s, b) - 1e-12,
        }
    }
}

// ---------------------------------------------------------------------------
// Lagrange function

/// `F = Σcot(θ/2) + λ₁(Σ1/θ − n/π − 2s/(π(s−2))) + λ₂(Σθ − (n−2)π)`.
pub fn lagrange_f(angles: &[f64], lambda1: f64, lambda2: f64, s: f64) -> Result<f64> {
    check_s(s)?;
    if let Some(t) = angles.iter().find(|t| !(**t > 0.0 && **t < PI)) {
        return Err(Error::domain(format!("angle {t} outside (0, π)")));
    }
    let n = angles.len() as f64;
    let cot: f64 = angles.iter().map(|&t| 1.0 / (0.5 * t).tan()).sum();
    let harm: f64 = angles.iter().map(|&t| 1.0 / t).sum();
    let sum: f64 = angles.iter().sum();
    Ok(cot
        + lambda1 * (harm - n / PI - 2.0 * s / (PI * (s - 2.0)))
        + lambda2 * (sum - (n - 2.0) * PI))
}

/// `Φ(z, λ₁, λ₂) = −1/(2 sin²(z/2)) − λ₁/z² + λ₂`, the common form of every
/// partial derivative of the Lagrange function.
pub fn phi(z: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(z > 0.0 && z < PI) {
        return Err(Error::domain(format!("z = {z} outside (0, π)")));
    }
    Ok(-0.5 * csc2_half(z) - lambda1 / (z * z) + lambda2)
}

/// Number of sign changes of `Φ(·, λ₁, λ₂)` on a uniform grid of `(0, π)`.
pub fn phi_sign_changes(lambda1: f64, lambda2: f64, step: f64) -> usize {
    let xs = grid_points(step, PI - step, step);
    let mut prev: Option<f64> = None;
    let mut changes = 0;
    for x in xs {
        let v = -0.5 * csc2_half(x) - lambda1 / (x * x) + lambda2;
        if v == 0.0 {
            continue;
        }
        if let Some(p) = prev {
            if p.signum() != v.signum() {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    changes
}

// ---------------------------------------------------------------------------
// Certificates

/// Inequalities that can be certified on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// `z(2 + cos z) − 3 sin z > 0` on `(0, π]`.
    BaseGap,
    /// `g'' < 0` on `(π⁻², 100]`.
    GConcave,
    /// `T1 ≥ T2` on `[0, π]`, equality only at 0.
    T1GeT2,
    /// `T1'' > 0` on `[0, π]`.
    T1ppPositive,
    /// `T2'' ≤ 0` on `[0, π]`, zero only at 0.
    T2ppNonpositive,
    /// `z(2 + cos z) > z(3 − z²/2 + z⁴/24 − z⁶/720)` on `(0, π]`.
    TaylorCos,
    /// `3 sin z < 3z − z³/2 + z⁵/40` on `(0, π]`.
    TaylorSin,
    /// `z⁵/60 − z⁷/720 > 0` on `(0, π]`.
    TaylorPoly,
    /// `z(2 + cos z) − 3 sin z > z⁵/60 − z⁷/720` on `(0, π]`.
    TaylorChain,
    /// `∂θ̄₁G_s > 0` in the interior of `R_s` and on `Γ₂`.
    DgPositive,
    /// `∂θ̄₁G_s = 0` on `Γ₄`.
    Gamma4Zero,
    /// `g_s` strictly decreasing on `(0, (s−2)π/s]`.
    GsDecreasing,
    /// `h(s, ·)` increasing on `[0, (s−2)π/s]`.
    HIncreasing,
}

impl Lemma {
    pub const ALL: [Lemma; 13] = [
        Lemma::BaseGap,
        Lemma::GConcave,
        Lemma::T1GeT2,
        Lemma::T1ppPositive,
        Lemma::T2ppNonpositive,
        Lemma::TaylorCos,
        Lemma::TaylorSin,
        Lemma::TaylorPoly,
        Lemma::TaylorChain,
        Lemma::DgPositive,
        Lemma::Gamma4Zero,
        Lemma::GsDecreasing,
        Lemma::HIncreasing,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Lemma::BaseGap => "base-gap",
            Lemma::GConcave => "g-concave",
            Lemma::T1GeT2 => "t1-ge-t2",
            Lemma::T1ppPositive => "t1pp-positive",
            Lemma::T2ppNonpositive => "t2pp-nonpositive",
            Lemma::TaylorCos => "taylor-cos",
            Lemma::TaylorSin => "taylor-sin",
            Lemma::TaylorPoly => "taylor-poly",
            Lemma::TaylorChain => "taylor-chain",
            Lemma::DgPositive => "dg-positive",
            Lemma::Gamma4Zero => "gamma4-zero",
            Lemma::GsDecreasing => "gs-decreasing",
            Lemma::HIncreasing => "h-increasing",
        }
    }

    /// Whether the lemma is stated for a specific `s`.
    pub fn needs_s(self) -> bool {
        matches!(
            self,
            Lemma::DgPositive | Lemma::Gamma4Zero | Lemma::GsDecreasing | Lemma::HIncreasing
        )
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL.into_iter().find(|l| l.id() == s).ok_or_else(|| {
            let known: Vec<&str> = Lemma::ALL.iter().map(|l| l.id()).collect();
            Error::Usage(format!("unknown lemma '{s}'; known: {}", known.join(", ")))
        })
    }
}

/// Width of the excluded neighbourhood at degenerate loci.
pub const COLLAR: f64 = 1e-3;

/// Series length used for `T1''` inside certificates.
pub const T1PP_TERMS: usize = 400;

/// Grid-certifies `lemma`. `s` is required for the lemmas with
/// [`Lemma::needs_s`]; `step` is the grid spacing (in each direction for the
/// two-dimensional lemma).
pub fn verify_inequality(lemma: Lemma, s: Option<f64>, step: f64) -> Result<GridCertificate> {
    verify_signed(lemma, s, step, 1.0)
}

/// Same as [`verify_inequality`] with the certified quantity negated. Used
/// to exercise the failure path end to end.
pub fn verify_inequality_negated(
    lemma: Lemma,
    s: Option<f64>,
    step: f64,
) -> Result<GridCertificate> {
    verify_signed(lemma, s, step, -1.0)
}

fn limit(locus: &str, expected: &str, observed: f64, pass: bool) -> LimitCheck {
    LimitCheck {
        locus: locus.to_string(),
        expected: expected.to_string(),
        observed,
        pass,
    }
}

fn verify_signed(lemma: Lemma, s: Option<f64>, step: f64, sign: f64) -> Result<GridCertificate> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {step}")));
    }
    let s = match (lemma.needs_s(), s) {
        (true, None) => {
            return Err(Error::Usage(format!("lemma {lemma} needs a value of s")));
        }
        (true, Some(s)) => {
            check_s(s)?;
            s
        }
        (false, _) => f64::NAN,
    };
    let id = lemma.id();
    let z_grid = || grid_points(COLLAR, PI, step);

    let cert = match lemma {
        Lemma::BaseGap => certify_1d(
            id,
            "z in (0, pi]",
            "base_gap(z)/z^5",
            &z_grid(),
            step,
            |z| sign * base_gap(z) / z.powi(5),
        )
        .with_collar("z = 0 (equality point)", COLLAR)
        .with_limit(limit(
            "z = 0",
            "base_gap = 0",
            base_gap(0.0),
            base_gap(0.0) == 0.0,
        ))
        .with_limit({
            let q = base_gap(1e-6) / 1e-30;
            limit(
                "z -> 0+",
                "base_gap/z^5 -> 1/60",
                q,
                (q - 1.0 / 60.0).abs() < 1e-9,
            )
        }),

        Lemma::GConcave => {
            let lo = 1.0 / (PI * PI);
            let xs = grid_points(lo + step, 100.0, step);
            let q = |x: f64| sign * -x.powi(3) * g_second_derivative(x).unwrap_or(f64::NAN);
            let far = -(1e8f64).powi(3) * g_second_derivative(1e8)?;
            certify_1d(id, "x in (pi^-2, 100]", "-x^3 g''(x)", &xs, step, q).with_limit(limit(
                "x -> infinity",
                "-x^3 g''(x) -> 1/60",
                far,
                (far - 1.0 / 60.0).abs() < 1e-6,
            ))
        }

        Lemma::T1GeT2 => {
            let at0 = t1_raw(0.0) - t2_raw(0.0);
            let (t1pp0, _) = t1_second(0.0, 10_000)?;
            let t2pp0 = t2_second(0.0)?;
            let curv = 0.5 * (t1pp0 - t2pp0);
            let near = (t1_raw(1e-4) - t2_raw(1e-4)) / 1e-8;
            certify_1d(
                id,
                "x in (0, pi]",
                "(T1(x) - T2(x))/x^2",
                &z_grid(),
                step,
                |x| sign * (t1_raw(x) - t2_raw(x)) / (x * x),
            )
            .with_collar("x = 0 (equality point)", COLLAR)
            .with_limit(limit("x = 0", "T1(0) - T2(0) = 0", at0, at0.abs() < 1e-15))
            .with_limit(limit(
                "x -> 0+",
                "(T1 - T2)/x^2 -> (T1''(0) - T2''(0))/2 > 0",
                curv,
                curv > 0.0 && (near - curv).abs() < 1e-4,
            ))
        }

        Lemma::T1ppPositive => {
            let xs = grid_points(0.0, PI, step);
            let (_, tail) = t1_second(0.0, T1PP_TERMS)?;
            certify_1d(
                id,
                "x in [0, pi]",
                "partial sum of the positive-term series for T1''",
                &xs,
                step,
                |x| sign * t1_second(x, T1PP_TERMS).map(|v| v.0).unwrap_or(f64::NAN),
            )
            .with_limit(limit(
                "series tail",
                "omitted tail bound (terms are positive, partial sum is a lower bound)",
                tail,
                tail.is_finite(),
            ))
        }

        Lemma::T2ppNonpositive => {
            let at0 = t2_second(0.0)?;
            certify_1d(id, "x in (0, pi]", "-T2''(x)/x", &z_grid(), step, |x| {
                sign * -t2_second(x).unwrap_or(f64::NAN) / x
            })
            .with_collar("x = 0 (T2'' vanishes)", COLLAR)
            .with_limit(limit("x = 0", "T2''(0) = 0", at0, at0.abs() < 1e-12))
        }

        Lemma::TaylorCos => certify_1d(
            id,
            "z in (0, pi]",
            "[z(2 + cos z) - z(3 - z^2/2 + z^4/24 - z^6/720)]/z^9",
            &z_grid(),
            step,
            |z| sign * cos_remainder8(z),
        )
        .with_collar("z = 0 (equality point)", COLLAR),

        Lemma::TaylorSin => certify_1d(
            id,
            "z in (0, pi]",
            "[3z - z^3/2 + z^5/40 - 3 sin z]/z^7",
            &z_grid(),
            step,
            |z| sign * 3.0 * sin_remainder7(z),
        )
        .with_collar("z = 0 (equality point)", COLLAR),

        Lemma::TaylorPoly => certify_1d(
            id,
            "z in (0, pi]",
            "(z^5/60 - z^7/720)/z^5",
            &z_grid(),
            step,
            |z| sign * (1.0 / 60.0 - z * z / 720.0),
        )
        .with_collar("z = 0 (equality point)", COLLAR),

        Lemma::TaylorChain => certify_1d(
            id,
            "z in (0, pi]",
            "[base_gap(z) - z^5/60 + z^7/720]/z^7",
            &z_grid(),
            step,
            |z| sign * (base_gap(z) / z.powi(5) - 1.0 / 60.0 + z * z / 720.0) / (z * z),
        )
        .with_collar("z = 0 (equality point)", COLLAR),

        Lemma::DgPositive => {
            let lo1 = theta1_lo(s);
            let hi2 = theta2_hi(s);
            let xs = grid_points(lo1, PI - COLLAR, step);
            let ys = grid_points(0.0, hi2 - COLLAR, step);
            let min_factor = ys
                .iter()
                .map(|&b| ((s - 2.0) * PI - s * b) / ((s - 2.0) * (PI - b)))
                .fold(f64::INFINITY, f64::min);
            let cert = certify_2d(
                id,
                &format!("interior of R_s and Gamma_2, s = {s}"),
                "dG_s/dtheta1 divided by ((s-2)pi - s theta2)/((s-2)(pi - theta2)), i.e. Gtilde/(theta1 - theta2)^2",
                &xs,
                &ys,
                step,
                |_, _| true,
                |a, b| sign * g_tilde_raw(a, b) / ((a - b) * (a - b)),
            );
            cert.with_collar("Gamma_3: theta1 = pi", COLLAR)
                .with_collar("Gamma_4: theta2 = (s-2)pi/s (derivative vanishes)", COLLAR)
                .with_limit(limit(
                    "removed factor on the grid",
                    "((s-2)pi - s theta2)/((s-2)(pi - theta2)) > 0",
                    min_factor,
                    min_factor > 0.0,
                ))
        }

        Lemma::Gamma4Zero => {
            let hi2 = theta2_hi(s);
            let xs = grid_points(theta1_lo(s), PI - COLLAR, step);
            let worst = xs
                .iter()
                .map(|&a| dg_dtheta1_raw(s, a, hi2).abs())
                .fold(0.0, f64::max);
            certify_1d(
                id,
                &format!("Gamma_4, theta2 = (s-2)pi/s, s = {s}"),
                "1e-10 - |dG_s/dtheta1|",
                &xs,
                step,
                |a| sign * (1e-10 - dg_dtheta1_raw(s, a, hi2).abs()),
            )
            .with_collar("Gamma_3: theta1 = pi", COLLAR)
            .with_limit(limit(
                "Gamma_4",
                "max |dG_s/dtheta1| < 1e-10",
                worst,
                worst < 1e-10,
            ))
        }

        Lemma::GsDecreasing => {
            let hi2 = theta2_hi(s);
            let xs = grid_points(step, hi2, step);
            let scale = (s - 2.0) * (s + 1.0) * (s + 1.0) / (2.0 * PI);
            let star = theta1_lo(s);
            let identity = g_s_hat_raw(s, star) + (s * s - 1.0) * (PI / (s + 1.0)).tan();
            let mono = certify_decreasing(id, "", &grid_points(0.0, hi2, step), step, |b| {
                g_s_boundary(s, b).unwrap_or(f64::NAN)
            });
            certify_1d(
                id,
                &format!("theta2 in (0, (s-2)pi/s], s = {s}"),
                "-g_s'(theta2) (s-2)(s+1)^2/(2 pi)",
                &xs,
                step,
                |b| sign * -scale * g_s_derivative(s, b).unwrap_or(f64::NAN),
            )
            .with_limit(limit(
                "theta2 = (s-1)pi/(s+1)",
                "ghat_s + (s^2-1)tan(pi/(s+1)) = 0",
                identity,
                identity.abs() < 1e-9 * (s * s),
            ))
            .with_limit(limit(
                "closed-form g_s on the grid",
                "strictly decreasing (minimum consecutive decrement > 0)",
                mono.min_margin,
                mono.min_margin > 0.0,
            ))
        }

        Lemma::HIncreasing => {
            // h = π(s−2)·N/D with N = π(s−1) − (s+1)θ̄₂ and
            // D = 2θ̄₂ + (s+1)(π(s−2) − sθ̄₂); h' has the sign of N'D − ND'.
            let numer = |b: f64| PI * (s - 1.0) - b * (1.0 + s);
            let denom = |b: f64| 2.0 * b + (s + 1.0) * (PI * (s - 2.0) - s * b);
            let xs = grid_points(0.0, theta2_hi(s), step);
            let min_denom = xs.iter().map(|&b| denom(b)).fold(f64::INFINITY, f64::min);
            let at0 = h_bound_raw(s, 0.0);
            certify_1d(
                id,
                &format!("theta2 in [0, (s-2)pi/s], s = {s}"),
                "N'D - ND' for h = pi(s-2) N/D",
                &xs,
                step,
                |b| sign * ((s * s + s - 2.0) * numer(b) - (s + 1.0) * denom(b)),
            )
            .with_limit(limit(
                "grid",
                "denominator D > 0 (no pole of h)",
                min_denom,
                min_denom > 0.0,
            ))
            .with_limit(limit(
                "theta2 = 0",
                "h(s, 0) = (s-1)pi/(s+1)",
                at0,
                (at0 - theta1_lo(s)).abs() < 1e-14,
            ))
        }
    };
    Ok(cert)
}

/// `[cos z − (1 − z²/2 + z⁴/24 − z⁶/720)]/z⁸`.
fn cos_remainder8(z: f64) -> f64 {
    if z.abs() < 2.0 {
        let z2 = z * z;
        let mut term = 1.0 / 40320.0; // 1/8!
        let mut sum = term;
        for m in 5..20 {
            let m = m as f64;
            term *= -z2 / ((2.0 * m - 1.0) * (2.0 * m));
            sum += term;
        }
        sum
    } else {
        let z2 = z * z;
        let poly = 1.0 - z2 / 2.0 + z2 * z2 / 24.0 - z2 * z2 * z2 / 720.0;
        (z.cos() - poly) / z2.powi(4)
    }
}

/// `[z − z³/6 + z⁵/120 − sin z]/z⁷`.
fn sin_remainder7(z: f64) -> f64 {
    if z.abs() < 2.0 {
        let z2 = z * z;
        let mut term = 1.0 / 5040.0; // 1/7!
        let mut sum = term;
        for m in 4..20 {
            let m = m as f64;
            term *= -z2 / ((2.0 * m) * (2.0 * m + 1.0));
            sum += term;
        }
        sum
    } else {
        let z2 = z * z;
        (z - z * z2 / 6.0 + z * z2 * z2 / 120.0 - z.sin()) / (z * z2.powi(3))
    }
}

#[cfg(test)]
mod tests;
