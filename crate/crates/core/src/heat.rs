//! Short-time heat-trace coefficients for domains with straight corners, and
//! an exact rectangle spectrum to test them against.
//!
//! With Dirichlet conditions the trace behaves like
//!
//! ```text
//! |Ω|/(4πt) − |∂Ω|/(8√(πt)) + (1/12π)(∫κ + Σ(π² − θ²)/(2θ)) + (√t/(256√π))∫κ² + O(t)
//! ```
//!
//! Neumann flips the sign of the perimeter term and multiplies the last
//! coefficient by 5. For a polygon the constant term is `S(P)/(24π)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polygon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            _ => Err(Error::Usage(format!(
                "boundary condition must be dirichlet or neumann, got '{s}'"
            ))),
        }
    }
}

/// Geometric data that the first four heat coefficients depend on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatInvariants {
    pub area: f64,
    pub perimeter: f64,
    /// `Σ(π² − θ²)/(2θ)` over the corners.
    pub corner_sum: f64,
    pub curvature_integral: f64,
    pub curvature_sq_integral: f64,
    pub boundary_condition: BoundaryCondition,
}

impl HeatInvariants {
    /// Builds invariants from raw data. Corners are only supported when the
    /// boundary is flat next to each of them (`straight_corners`); for curved
    /// corners the coefficients are not known and the input is refused.
    pub fn new(
        area: f64,
        perimeter: f64,
        corner_angles: &[f64],
        curvature_integral: f64,
        curvature_sq_integral: f64,
        straight_corners: bool,
        boundary_condition: BoundaryCondition,
    ) -> Result<Self> {
        if !(area.is_finite() && area > 0.0 && perimeter.is_finite() && perimeter > 0.0) {
            return Err(Error::domain(format!(
                "area and perimeter must be positive (got {area}, {perimeter})"
            )));
        }
        if !corner_angles.is_empty() && !straight_corners {
            return Err(Error::domain(
                "corners must be straight (boundary flat near each corner); \
                 curved-corner coefficients are not available",
            ));
        }
        if let Some(t) = corner_angles
            .iter()
            .find(|t| !(**t > 0.0 && **t < 2.0 * PI))
        {
            return Err(Error::domain(format!("corner angle {t} outside (0, 2π)")));
        }
        if !(curvature_integral.is_finite()
            && curvature_sq_integral.is_finite()
            && curvature_sq_integral >= 0.0)
        {
            return Err(Error::domain("curvature integrals must be finite, ∫κ² ≥ 0"));
        }
        let corner_sum = corner_angles
            .iter()
            .map(|&t| (PI * PI - t * t) / (2.0 * t))
            .sum();
        Ok(Self {
            area,
            perimeter,
            corner_sum,
            curvature_integral,
            curvature_sq_integral,
            boundary_condition,
        })
    }

    pub fn with_boundary_condition(&self, bc: BoundaryCondition) -> Self {
        Self {
            boundary_condition: bc,
            ..self.clone()
        }
    }
}

/// Coefficients of `t⁻¹, t^{−1/2}, t⁰, t^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceExpansion {
    pub c_minus_one: f64,
    pub c_minus_half: f64,
    pub c_zero: f64,
    pub c_half: f64,
}

impl TraceExpansion {
    /// Value of the four-term expansion at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        let r = t.sqrt();
        self.c_minus_one / t + self.c_minus_half / r + self.c_zero + self.c_half * r
    }

    /// Sum of the magnitudes of the evaluated terms, for rounding estimates.
    pub fn magnitude(&self, t: f64) -> f64 {
        let r = t.sqrt();
        (self.c_minus_one / t).abs()
            + (self.c_minus_half / r).abs()
            + self.c_zero.abs()
            + (self.c_half * r).abs()
    }
}

pub fn expansion(inv: &HeatInvariants) -> TraceExpansion {
    let sqrt_pi = PI.sqrt();
    let (sign, k) = match inv.boundary_condition {
        BoundaryCondition::Dirichlet => (-1.0, 1.0),
        BoundaryCondition::Neumann => (1.0, 5.0),
    };
    TraceExpansion {
        c_minus_one: inv.area / (4.0 * PI),
        c_minus_half: sign * inv.perimeter / (8.0 * sqrt_pi),
        c_zero: (inv.curvature_integral + inv.corner_sum) / (12.0 * PI),
        c_half: k * inv.curvature_sq_integral / (256.0 * sqrt_pi),
    }
}

/// Invariants of a polygon; reflex corners are allowed.
pub fn polygon_invariants(polygon: &Polygon, bc: BoundaryCondition) -> Result<HeatInvariants> {
    let angles = polygon.interior_angles();
    HeatInvariants::new(
        polygon.area(),
        polygon.perimeter(),
        &angles,
        0.0,
        0.0,
        true,
        bc,
    )
}

// ---------------------------------------------------------------------------
// Rectangle oracle

/// Accuracy the rectangle partial sum is expected to reach; a larger
/// truncation bound produces a warning.
pub const TRUNCATION_TARGET: f64 = 1e-10;

/// Partial heat trace of an `a × b` rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleTrace {
    pub partial_sum: f64,
    /// Number of eigenvalues (with multiplicity) included.
    pub terms: usize,
    pub cutoff: f64,
    /// Upper bound on the sum over omitted eigenvalues.
    pub truncation_bound: f64,
    pub warning: Option<String>,
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Bound on `Σ_{λ > Λ} e^{−λt}` for the rectangle, from the lattice count
/// `N(λ) ≤ abλ/(4π) + (a + b)√λ/π + 1` (valid for both conditions).
pub fn rectangle_tail_bound(a: f64, b: f64, t: f64, cutoff: f64) -> f64 {
    let alpha = a * b / (4.0 * PI);
    let beta = (a + b) / PI;
    let lam = cutoff.max(1e-300);
    (-lam * t).exp() * (alpha * (lam + 1.0 / t) + beta * (lam + 1.0 / t) / lam.sqrt() + 1.0)
}

/// Smallest cutoff (to within a factor 1.01) whose tail bound is below `target`.
pub fn cutoff_for_accuracy(a: f64, b: f64, t: f64, target: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && t > 0.0 && target > 0.0) {
        return Err(Error::domain("a, b, t and target must be positive"));
    }
    let mut hi = 1.0 / t;
    while rectangle_tail_bound(a, b, t, hi) >= target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical(
                "no finite cutoff reaches the target".into(),
            ));
        }
    }
    let mut lo = hi / 2.0;
    while hi / lo > 1.01 {
        let mid = 0.5 * (lo + hi);
        if rectangle_tail_bound(a, b, t, mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `Σ e^{−λt}` over rectangle eigenvalues `λ = π²(m²/a² + n²/b²) ≤ cutoff`,
/// with `m, n ≥ 1` (Dirichlet) or `m, n ≥ 0` (Neumann).
///
/// Rows of fixed `m` are summed in parallel and combined in index order, so
/// the result does not depend on the thread count.
pub fn rectangle_trace(
    a: f64,
    b: f64,
    bc: BoundaryCondition,
    t: f64,
    cutoff: f64,
) -> Result<RectangleTrace> {
    if !(a > 0.0 && b > 0.0 && t > 0.0 && a.is_finite() && b.is_finite() && t.is_finite()) {
        return Err(Error::domain(format!(
            "a, b, t must be positive (got {a}, {b}, {t})"
        )));
    }
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::domain(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    let start = match bc {
        BoundaryCondition::Dirichlet => 1u64,
        BoundaryCondition::Neumann => 0u64,
    };
    let (pa, pb) = (PI / a, PI / b);
    let m_max = (cutoff.sqrt() / pa).floor() as u64;
    let rows: Vec<(f64, f64, usize)> = (start..=m_max)
        .into_par_iter()
        .map(|m| {
            let lm = (pa * m as f64).powi(2);
            let rest = cutoff - lm;
            let mut acc = Neumaier::default();
            let mut count = 0usize;
            if rest >= 0.0 {
                let n_max = (rest.sqrt() / pb).floor() as u64;
                // smallest terms first
                for n in (start..=n_max).rev() {
                    let lam = lm + (pb * n as f64).powi(2);
                    if lam <= cutoff {
                        acc.add((-lam * t).exp());
                        count += 1;
                    }
                }
            }
            (acc.sum, acc.comp, count)
        })
        .collect();
    let mut total = Neumaier::default();
    let mut terms = 0;
    for (s, c, n) in rows.iter().rev() {
        total.add(*c);
        total.add(*s);
        terms += n;
    }
    let truncation_bound = rectangle_tail_bound(a, b, t, cutoff);
    let warning = (truncation_bound > TRUNCATION_TARGET).then(|| {
        format!(
            "cutoff {cutoff} leaves truncation bound {truncation_bound:e} above {TRUNCATION_TARGET:e}"
        )
    });
    Ok(RectangleTrace {
        partial_sum: total.value(),
        terms,
        cutoff,
        truncation_bound,
        warning,
    })
}

/// Invariants of the `a × b` rectangle.
pub fn rectangle_invariants(a: f64, b: f64, bc: BoundaryCondition) -> Result<HeatInvariants> {
    HeatInvariants::new(a * b, 2.0 * (a + b), &[PI / 2.0; 4], 0.0, 0.0, true, bc)
}

// ---------------------------------------------------------------------------
// Residual decay

/// One point of a residual study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub partial_sum: f64,
    pub expansion_value: f64,
    pub residual: f64,
    /// Truncation bound plus a rounding estimate for both sides.
    pub error_bound: f64,
    pub truncation_bound: f64,
    pub cutoff: f64,
}

/// Decay of residuals `r(t)` across a grid of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Largest `p` on the scan grid for which some `c` gives
    /// `|r_i − c·t_i^p| ≤ E_i` at every point; `None` if no `p` fits.
    pub max_consistent_exponent: Option<f64>,
    /// Smallest such `p`.
    pub min_consistent_exponent: Option<f64>,
    /// Coefficient `c` at the largest consistent exponent.
    pub coefficient: Option<f64>,
    /// Least-squares fit `r ≈ α√t + βt`.
    pub sqrt_coefficient: f64,
    pub linear_coefficient: f64,
    /// Every residual lies within its error bound of zero, so the data are
    /// at the noise floor and no decay rate is excluded from above.
    pub at_noise_floor: bool,
}

/// Exponent scan range for [`fit_decay`].
pub const EXPONENT_SCAN: (f64, f64, f64) = (-2.0, 4.0, 0.01);

pub fn fit_decay(points: &[ResidualPoint]) -> Result<DecayFit> {
    if points.len() < 2 {
        return Err(Error::domain("need at least two residual points"));
    }
    let consistent_at = |p: f64| -> Option<f64> {
        // weighted least squares for c with weights 1/E²
        let mut num = 0.0;
        let mut den = 0.0;
        for q in points {
            let w = 1.0 / (q.error_bound * q.error_bound);
            let tp = q.t.powf(p);
            num += w * q.residual * tp;
            den += w * tp * tp;
        }
        let c = num / den;
        points
            .iter()
            .all(|q| (q.residual - c * q.t.powf(p)).abs() <= q.error_bound)
            .then_some(c)
    };
    let (lo, hi, step) = EXPONENT_SCAN;
    let count = ((hi - lo) / step).round() as usize;
    let mut min_p = None;
    let mut max_p = None;
    let mut coefficient = None;
    for i in 0..=count {
        let p = lo + i as f64 * step;
        if let Some(c) = consistent_at(p) {
            min_p.get_or_insert(p);
            max_p = Some(p);
            coefficient = Some(c);
        }
    }

    // r ≈ α√t + βt
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for q in points {
        let (x1, x2) = (q.t.sqrt(), q.t);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * q.residual;
        r2 += x2 * q.residual;
    }
    let det = s11 * s22 - s12 * s12;
    let alpha = (r1 * s22 - r2 * s12) / det;
    let beta = (s11 * r2 - s12 * r1) / det;

    Ok(DecayFit {
        max_consistent_exponent: max_p,
        min_consistent_exponent: min_p,
        coefficient,
        sqrt_coefficient: alpha,
        linear_coefficient: beta,
        at_noise_floor: points.iter().all(|q| q.residual.abs() <= q.error_bound),
    })
}

/// Residual study of an `a × b` rectangle: the trace is computed with
/// `trace_bc`, the expansion with `expansion_bc` (they differ only in
/// negative controls). Cutoffs are chosen so the truncation bound is below
/// [`TRUNCATION_TARGET`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub a: f64,
    pub b: f64,
    pub trace_bc: BoundaryCondition,
    pub expansion_bc: BoundaryCondition,
    pub expansion: TraceExpansion,
    pub points: Vec<ResidualPoint>,
    pub fit: DecayFit,
}

pub fn rectangle_residuals(
    a: f64,
    b: f64,
    trace_bc: BoundaryCondition,
    expansion_bc: BoundaryCondition,
    ts: &[f64],
) -> Result<AsymptoticReport> {
    let exp = expansion(&rectangle_invariants(a, b, expansion_bc)?);
    let points = ts
        .iter()
        .map(|&t| {
            let cutoff = cutoff_for_accuracy(a, b, t, TRUNCATION_TARGET)?;
            let tr = rectangle_trace(a, b, trace_bc, t, cutoff)?;
            let value = exp.evaluate(t);
            let rounding = 64.0 * f64::EPSILON * (tr.partial_sum.abs() + exp.magnitude(t));
            Ok(ResidualPoint {
                t,
                partial_sum: tr.partial_sum,
                expansion_value: value,
                residual: tr.partial_sum - value,
                error_bound: tr.truncation_bound + rounding,
                truncation_bound: tr.truncation_bound,
                cutoff,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_decay(&points)?;
    Ok(AsymptoticReport {
        a,
        b,
        trace_bc,
        expansion_bc,
        expansion: exp,
        points,
        fit,
    })
}

// ---------------------------------------------------------------------------
// Isospectral comparison

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantComparison {
    pub name: String,
    pub first: f64,
    pub second: f64,
    pub differs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsospectralVerdict {
    pub comparisons: Vec<InvariantComparison>,
    /// Names of the invariants that differ beyond the tolerance.
    pub differing: Vec<String>,
    /// True only when all four invariants agree.
    pub possibly_isospectral: bool,
}

/// Compares area, perimeter, `c_0` and `c_{1/2}` with absolute tolerance `tol`.
pub fn isospectral_test(
    inv1: &HeatInvariants,
    inv2: &HeatInvariants,
    tol: f64,
) -> Result<IsospectralVerdict> {
    if inv1.boundary_condition != inv2.boundary_condition {
        return Err(Error::Usage(
            "cannot compare invariants under different boundary conditions".into(),
        ));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::domain("tolerance must be nonnegative"));
    }
    let (e1, e2) = (expansion(inv1), expansion(inv2));
    let comparisons: Vec<InvariantComparison> = [
        ("area", inv1.area, inv2.area),
        ("perimeter", inv1.perimeter, inv2.perimeter),
        ("c_0", e1.c_zero, e2.c_zero),
        ("c_1/2", e1.c_half, e2.c_half),
    ]
    .into_iter()
    .map(|(name, x, y)| InvariantComparison {
        name: name.to_string(),
        first: x,
        second: y,
        differs: (x - y).abs() > tol,
    })
    .collect();
    let differing: Vec<String> = comparisons
        .iter()
        .filter(|c| c.differs)
        .map(|c| c.name.clone())
        .collect();
    Ok(IsospectralVerdict {
        possibly_isospectral: differing.is_empty(),
        comparisons,
        differing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{s_functional, AngleSet, Point};

    const D: BoundaryCondition = BoundaryCondition::Dirichlet;
    const N: BoundaryCondition = BoundaryCondition::Neumann;

    #[test]
    fn unit_square_coefficients() {
        let inv = rectangle_invariants(1.0, 1.0, D).unwrap();
        assert!((inv.corner_sum - 3.0 * PI).abs() < 1e-14);
        let e = expansion(&inv);
        assert!((e.c_minus_one - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((e.c_minus_half + 4.0 / (8.0 * PI.sqrt())).abs() < 1e-16);
        assert!((e.c_zero - 0.25).abs() < 1e-15);
        assert_eq!(e.c_half, 0.0);
        let n = expansion(&inv.with_boundary_condition(N));
        assert_eq!(n.c_minus_half, -e.c_minus_half);
        assert_eq!(n.c_zero, e.c_zero);
    }

    #[test]
    fn smooth_domain_constant_term() {
        let disk = HeatInvariants::new(PI, 2.0 * PI, &[], 2.0 * PI, 2.0 * PI, false, D).unwrap();
        let e = expansion(&disk);
        assert!((e.c_zero - 1.0 / 6.0).abs() < 1e-15);
        assert!(e.c_half > 0.0);
        let n = expansion(&disk.with_boundary_condition(N));
        assert!((n.c_half - 5.0 * e.c_half).abs() < 1e-15);
    }

    #[test]
    fn curved_corners_refused() {
        assert!(HeatInvariants::new(1.0, 4.0, &[1.0, 2.0, 3.0], 0.5, 0.1, false, D).is_err());
        assert!(HeatInvariants::new(0.0, 4.0, &[], 0.0, 0.0, true, D).is_err());
    }

    #[test]
    fn polygon_corner_sums() {
        let sq = Polygon::regular(4).unwrap();
        assert!((polygon_invariants(&sq, D).unwrap().corner_sum - 3.0 * PI).abs() < 1e-12);
        let tri = Polygon::regular(3).unwrap();
        assert!((polygon_invariants(&tri, D).unwrap().corner_sum - 4.0 * PI).abs() < 1e-12);

        let l = Polygon::new(
            [
                (0.0, 0.0),
                (2.0, 0.0),
                (2.0, 1.0),
                (1.0, 1.0),
                (1.0, 2.0),
                (0.0, 2.0),
            ]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect(),
        )
        .unwrap();
        let inv = polygon_invariants(&l, D).unwrap();
        // five right angles and one reflex corner
        let expected = 5.0 * (3.0 * PI / 4.0) - 5.0 * PI / 12.0;
        assert!((inv.corner_sum - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_term_matches_corner_functional() {
        let set = AngleSet::new(vec![2.0, 2.2, 1.9, 2.5, 3.0 * PI - 8.6]).unwrap();
        let p = crate::geometry::circumscriptible_from_angles(&set).unwrap();
        let e = expansion(&polygon_invariants(&p, D).unwrap());
        assert!((e.c_zero - s_functional(&set).value / (24.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn large_t_dominated_by_ground_state() {
        let t = 1.0;
        let tr = rectangle_trace(1.0, 1.0, D, t, 400.0).unwrap();
        let ground = (-2.0 * PI * PI * t).exp();
        assert!((tr.partial_sum - ground) / ground < 1e-6);
        assert!(tr.partial_sum >= ground);
    }

    #[test]
    fn truncation_bound_is_honest() {
        // compare against a much larger cutoff
        let t = 0.01;
        let small = rectangle_trace(1.0, 2.0, D, t, 1500.0).unwrap();
        let big = rectangle_trace(1.0, 2.0, D, t, 10_000.0).unwrap();
        let omitted = big.partial_sum - small.partial_sum;
        assert!(
            omitted > 0.0 && omitted <= small.truncation_bound,
            "{omitted} vs {}",
            small.truncation_bound
        );
        assert!(small.warning.is_some());
        let c = cutoff_for_accuracy(1.0, 2.0, t, 1e-10).unwrap();
        assert!(rectangle_trace(1.0, 2.0, D, t, c)
            .unwrap()
            .warning
            .is_none());
    }

    #[test]
    fn trace_is_thread_count_independent() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    rectangle_trace(1.0, 2.0, N, 0.003, 30_000.0)
                        .unwrap()
                        .partial_sum
                })
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    #[test]
    fn rectangle_matches_expansion() {
        for bc in [D, N] {
            let (a, b) = if bc == D { (1.0, 2.0) } else { (1.0, 1.0) };
            let c = cutoff_for_accuracy(a, b, 0.01, 1e-10).unwrap();
            let tr = rectangle_trace(a, b, bc, 0.01, c).unwrap();
            let e = expansion(&rectangle_invariants(a, b, bc).unwrap());
            assert!((tr.partial_sum - e.evaluate(0.01)).abs() < 1e-9, "{bc:?}");
        }
    }

    #[test]
    fn decay_fit_detects_wrong_condition() {
        let ts = [0.02, 0.01, 0.005, 0.0025];
        let good = rectangle_residuals(1.0, 2.0, D, D, &ts).unwrap();
        assert!(good.fit.max_consistent_exponent.unwrap() >= 0.9);
        assert!(good.fit.sqrt_coefficient.abs() < 1e-3);

        let bad = rectangle_residuals(1.0, 2.0, N, D, &ts).unwrap();
        let p = bad.fit.max_consistent_exponent.unwrap();
        assert!((p + 0.5).abs() < 0.02, "p = {p}");
        assert!(!bad.fit.at_noise_floor);
        assert!(bad.fit.sqrt_coefficient.abs() > 1e-3);
    }

    #[test]
    fn decay_fit_recovers_synthetic_exponent() {
        let pts: Vec<ResidualPoint> = [0.02, 0.01, 0.005, 0.0025]
            .iter()
            .map(|&t: &f64| ResidualPoint {
                t,
                partial_sum: 0.0,
                expansion_value: 0.0,
                residual: 0.3 * t,
                error_bound: 1e-12,
                truncation_bound: 0.0,
                cutoff: 0.0,
            })
            .collect();
        let f = fit_decay(&pts).unwrap();
        assert!((f.max_consistent_exponent.unwrap() - 1.0).abs() < 0.011);
        assert!((f.min_consistent_exponent.unwrap() - 1.0).abs() < 0.011);
        assert!(f.sqrt_coefficient.abs() < 1e-9);
    }

    #[test]
    fn isospectral_comparisons() {
        let sq = polygon_invariants(&Polygon::regular(4).unwrap(), D).unwrap();
        let tri = polygon_invariants(&Polygon::regular(3).unwrap(), D).unwrap();
        let same = isospectral_test(&sq, &sq, 1e-12).unwrap();
        assert!(same.possibly_isospectral);
        let diff = isospectral_test(&sq, &tri, 1e-12).unwrap();
        assert_eq!(diff.differing, vec!["area".to_string(), "c_0".to_string()]);
        assert!(!diff.possibly_isospectral);

        let smooth = HeatInvariants::new(sq.area, 1.0, &[], 2.0 * PI, 1.0, false, D).unwrap();
        assert!(isospectral_test(&sq, &smooth, 1e-12)
            .unwrap()
            .differing
            .contains(&"c_1/2".to_string()));
        assert!(isospectral_test(&sq, &sq.with_boundary_condition(N), 1e-12).is_err());
    }
}
