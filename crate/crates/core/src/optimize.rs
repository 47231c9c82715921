//! Direct maximization of circumscriptible area under the two constraints,
//! over `n` free angles and over the two-angle reduction.
//!
//! The full problem minimizes `Σcot(θ/2)` subject to `Σθ = (n − 2)π` and
//! `Σ1/θ = (n + 2s/(s − 2))/π` with `0 < θ ≤ π`; the circumscriptible area at
//! unit perimeter is `1/(4Σcot(θ/2))`. Local search is projected gradient on
//! the constraint manifold: each trial step is pulled back by a Newton solve
//! for the two normal multipliers, and angles that reach `π` are held there
//! until the multipliers say they should be released.

use std::f64::consts::PI;

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{objective_raw, theta1_lo, theta2_hi, RegionKind, RegionSpec, TwoAnglePoint};
use crate::error::{Error, Result};
use crate::geometry::AngleSet;
use crate::sampler::sub_rng;
use crate::semiregular::{envelope_area, from_s, harmonic_target};
use crate::OPTIMIZATION_TOL;

/// Angles within this distance of `π` count as flat.
pub const DEGENERACY_TOL: f64 = 1e-6;

const MAX_ITER: usize = 4000;
const MIN_ANGLE: f64 = 1e-9;

/// Residuals `(Σ1/θ − target, Σθ − (n − 2)π)`.
pub fn feasibility_check(angles: &AngleSet, s: f64, n: usize) -> Result<(f64, f64)> {
    if angles.len() != n {
        return Err(Error::domain(format!(
            "expected {n} angles, got {}",
            angles.len()
        )));
    }
    Ok(residuals(angles.angles(), s))
}

fn residuals(angles: &[f64], s: f64) -> (f64, f64) {
    let n = angles.len();
    let harm: f64 = angles.iter().map(|t| 1.0 / t).sum();
    let sum: f64 = angles.iter().sum();
    (harm - harmonic_target(s, n), sum - (n as f64 - 2.0) * PI)
}

fn cot_sum(angles: &[f64]) -> f64 {
    angles.iter().map(|&t| 1.0 / (0.5 * t).tan()).sum()
}

/// One local search outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalOptimum {
    pub restart: usize,
    /// Sorted descending.
    pub angles: Vec<f64>,
    pub area: f64,
    pub residuals: (f64, f64),
    pub degenerate: bool,
    pub converged: bool,
    /// Largest stationarity or constraint residual after polishing; `None`
    /// when the Newton polish did not improve the point.
    pub kkt_residual: Option<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizationResult {
    pub s: f64,
    pub n: usize,
    /// Best angles, sorted descending.
    pub angles: Vec<f64>,
    pub area: f64,
    pub residuals: (f64, f64),
    /// Some angle lies within [`DEGENERACY_TOL`] of `π`.
    pub degenerate: bool,
    /// The best point with flat angles removed; a candidate for `n − k` sides.
    pub canonical_angles: Vec<f64>,
    pub envelope_area: f64,
    pub restarts: usize,
    pub converged_restarts: usize,
    /// Largest minus smallest area over all local optima.
    pub area_spread: f64,
    /// Set when no restart met the convergence test; the result is then the
    /// best point seen.
    pub best_effort: bool,
    pub local_optima: Vec<LocalOptimum>,
}

/// Multi-start maximization over `n` angles.
pub fn solve_full(s: f64, n: usize, restarts: usize, seed: u64) -> Result<MaximizationResult> {
    if !(s.is_finite() && s > 2.0) {
        return Err(Error::domain(format!("s must exceed 2, got {s}")));
    }
    if restarts == 0 {
        return Err(Error::Usage("restarts must be at least 1".into()));
    }
    let need = s.ceil() as usize;
    if n < need {
        let bound = (n * n) as f64 / ((n as f64 - 2.0).max(1e-300) * PI);
        return Err(Error::Infeasible(format!(
            "n = {n} < ceil(s) = {need}: Σ1/θ ≥ n²/Σθ = {bound} exceeds the harmonic target {}",
            harmonic_target(s, n)
        )));
    }
    let env = envelope_area(s)?;
    let target = harmonic_target(s, n);
    let sum = (n as f64 - 2.0) * PI;

    let regular = (n as f64 - 2.0) * PI / n as f64;
    let equality = (n * n) as f64 / ((n as f64 - 2.0) * PI);
    let only_regular = (target - equality).abs() <= 1e-14 * target;

    let seeded = padded_semiregular(s, n)?;
    let locals: Vec<LocalOptimum> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if only_regular {
                Some(vec![regular; n])
            } else {
                start_point(r, &seeded, n, target, sum, seed)
            };
            // a random start can fail to hit the harmonic constraint; reuse the seeded one
            local_search(r, start.unwrap_or_else(|| seeded.clone()), s, target, sum)
        })
        .collect();

    let feasible: Vec<&LocalOptimum> = locals
        .iter()
        .filter(|l| {
            l.area.is_finite()
                && l.residuals.0.abs() < OPTIMIZATION_TOL
                && l.residuals.1.abs() < OPTIMIZATION_TOL
        })
        .collect();
    // Areas agreeing to rounding are ties; prefer the better-polished point.
    let top = feasible
        .iter()
        .map(|l| l.area)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = feasible
        .iter()
        .copied()
        .filter(|l| l.area >= top * (1.0 - 1e-13))
        .min_by(|a, b| {
            let ka = a.kkt_residual.unwrap_or(f64::INFINITY);
            ka.total_cmp(&b.kkt_residual.unwrap_or(f64::INFINITY))
                .then_with(|| lex_cmp(&b.angles, &a.angles))
        })
        .ok_or_else(|| Error::Numerical("no restart produced a feasible point".into()))?;
    let (lo, hi) = feasible
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
            (lo.min(l.area), hi.max(l.area))
        });
    let converged_restarts = locals.iter().filter(|l| l.converged).count();
    let canonical_angles = best
        .angles
        .iter()
        .copied()
        .filter(|&t| PI - t > DEGENERACY_TOL)
        .collect();
    Ok(MaximizationResult {
        s,
        n,
        angles: best.angles.clone(),
        area: best.area,
        residuals: best.residuals,
        degenerate: best.degenerate,
        canonical_angles,
        envelope_area: env,
        restarts,
        converged_restarts,
        area_spread: hi - lo,
        best_effort: converged_restarts == 0,
        local_optima: locals,
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.total_cmp(y);
        if c.is_ne() {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Semi-regular angles for `s`, padded with flat angles up to `n`.
fn padded_semiregular(s: f64, n: usize) -> Result<Vec<f64>> {
    let mut v = from_s(s)?.angle_values();
    v.resize(n, PI);
    Ok(v)
}

/// Start point for restart `r`: the padded semi-regular point, a few
/// perturbations of it, then random points on the feasible set.
fn start_point(
    r: usize,
    seeded: &[f64],
    n: usize,
    target: f64,
    sum: f64,
    seed: u64,
) -> Option<Vec<f64>> {
    let mut rng = sub_rng(seed, r as u64);
    if r == 0 {
        return Some(seeded.to_vec());
    }
    if r < 4 {
        for _ in 0..50 {
            let trial: Vec<f64> = seeded
                .iter()
                .map(|&t| (t - rng.random_range(0.0..0.05)).max(0.05))
                .collect();
            if let Some(p) = project(&trial, &vec![true; n], target, sum) {
                if p.iter().all(|&t| t > MIN_ANGLE && t <= PI) {
                    return Some(p);
                }
            }
        }
    }
    let regular = sum / n as f64;
    for _ in 0..1000 {
        // random split of the angle sum
        let w: Vec<f64> = (0..n)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let total: f64 = w.iter().sum();
        let dir: Vec<f64> = w.iter().map(|x| sum * x / total - regular).collect();
        // largest step along dir keeping every angle in (0, π]
        let mut tmax = f64::INFINITY;
        for &d in &dir {
            if d > 0.0 {
                tmax = tmax.min((PI - regular) / d);
            } else if d < 0.0 {
                tmax = tmax.min((regular - 1e-6) / -d);
            }
        }
        let at = |t: f64| -> Vec<f64> { dir.iter().map(|d| regular + t * d).collect() };
        let harm = |t: f64| at(t).iter().map(|x| 1.0 / x).sum::<f64>() - target;
        if !(tmax.is_finite() && harm(tmax) > 0.0) {
            continue;
        }
        let root = crate::roots::bracketed(harm, 0.0, tmax, 1e-15, 200).ok()?;
        let mut p = at(root.x);
        if let Some(q) = project(&p, &vec![true; n], target, sum) {
            p = q;
        }
        if p.iter().all(|&t| t > MIN_ANGLE && t <= PI) {
            return Some(p);
        }
    }
    None
}

/// Newton projection onto both constraints, moving only free coordinates
/// along `λ·1 − μ/θ²`.
fn project(x: &[f64], free: &[bool], target: f64, sum: f64) -> Option<Vec<f64>> {
    let fixed_sum: f64 = x
        .iter()
        .zip(free)
        .filter(|(_, f)| !**f)
        .map(|(t, _)| t)
        .sum();
    let fixed_harm: f64 = x
        .iter()
        .zip(free)
        .filter(|(_, f)| !**f)
        .map(|(t, _)| 1.0 / t)
        .sum();
    let idx: Vec<usize> = (0..x.len()).filter(|&i| free[i]).collect();
    if idx.len() < 2 {
        return None;
    }
    let base: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let (mut lam, mut mu) = (0.0, 0.0);
    let mut cur = base.clone();
    for _ in 0..60 {
        cur = base.iter().map(|&b| b + lam - mu / (b * b)).collect();
        if cur.iter().any(|&t| t <= 0.0) {
            return None;
        }
        let r1 = cur.iter().sum::<f64>() + fixed_sum - sum;
        let r2 = cur.iter().map(|t| 1.0 / t).sum::<f64>() + fixed_harm - target;
        if r1.abs() < 1e-14 * sum.max(1.0) && r2.abs() < 1e-14 * target.max(1.0) {
            let mut out = x.to_vec();
            for (k, &i) in idx.iter().enumerate() {
                out[i] = cur[k];
            }
            return Some(out);
        }
        // Jacobian of (r1, r2) in (λ, μ)
        let j11 = idx.len() as f64;
        let j12: f64 = -base.iter().map(|b| 1.0 / (b * b)).sum::<f64>();
        let j21: f64 = -cur.iter().map(|t| 1.0 / (t * t)).sum::<f64>();
        let j22: f64 = base
            .iter()
            .zip(&cur)
            .map(|(b, t)| 1.0 / (b * b * t * t))
            .sum();
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        lam -= (r1 * j22 - r2 * j12) / det;
        mu -= (j11 * r2 - j21 * r1) / det;
    }
    // accept if close enough after the iteration budget
    let r1 = cur.iter().sum::<f64>() + fixed_sum - sum;
    let r2 = cur.iter().map(|t| 1.0 / t).sum::<f64>() + fixed_harm - target;
    if r1.abs() < 1e-12 && r2.abs() < 1e-12 {
        let mut out = x.to_vec();
        for (k, &i) in idx.iter().enumerate() {
            out[i] = cur[k];
        }
        Some(out)
    } else {
        None
    }
}

/// Gradient of `Σcot(θ/2)`.
fn gradient(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&t| {
            let s = (0.5 * t).sin();
            -0.5 / (s * s)
        })
        .collect()
}

/// Projects `g` onto the tangent space of the constraints restricted to free
/// coordinates. Returns the projected vector and the multipliers `(a, b)`
/// with `g ≈ a·1 + b·(−1/θ²)` on the free set.
fn tangent(x: &[f64], g: &[f64], free: &[bool]) -> (Vec<f64>, f64, f64) {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..x.len() {
        if !free[i] {
            continue;
        }
        let v = -1.0 / (x[i] * x[i]);
        s11 += 1.0;
        s12 += v;
        s22 += v * v;
        r1 += g[i];
        r2 += v * g[i];
    }
    let det = s11 * s22 - s12 * s12;
    let (a, b) = if det.abs() > 1e-300 {
        ((r1 * s22 - r2 * s12) / det, (s11 * r2 - s12 * r1) / det)
    } else {
        (r1 / s11.max(1.0), 0.0)
    };
    let p = (0..x.len())
        .map(|i| {
            if free[i] {
                g[i] - a + b / (x[i] * x[i])
            } else {
                0.0
            }
        })
        .collect();
    (p, a, b)
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn local_search(restart: usize, mut x: Vec<f64>, s: f64, target: f64, sum: f64) -> LocalOptimum {
    let n = x.len();
    let mut free: Vec<bool> = x.iter().map(|&t| t < PI).collect();
    let mut f = cot_sum(&x);
    let mut alpha = 1e-2;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=MAX_ITER {
        iterations = it;
        let g = gradient(&x);
        let (mut p, a, b) = tangent(&x, &g, &free);

        // release flat angles whose reduced gradient favours decreasing them
        let mut released = false;
        for i in 0..n {
            if !free[i] {
                let reduced = g[i] - a + b / (x[i] * x[i]);
                if reduced > 1e-12 {
                    free[i] = true;
                    released = true;
                }
            }
        }
        if released {
            let r = tangent(&x, &g, &free);
            p = r.0;
        }

        let d: Vec<f64> = p.iter().map(|v| -v).collect();
        if norm_inf(&d) < 1e-13 {
            converged = true;
            break;
        }
        if free.iter().filter(|f| **f).count() <= 2 {
            // the feasible set is locally a point
            converged = true;
            break;
        }

        // Barzilai–Borwein step from the previous iterate
        if let Some((px, pd)) = &prev {
            let sx: Vec<f64> = x.iter().zip(px).map(|(a, b)| a - b).collect();
            let yd: Vec<f64> = pd.iter().zip(&d).map(|(a, b)| a - b).collect();
            let sy: f64 = sx.iter().zip(&yd).map(|(a, b)| a * b).sum();
            let ss: f64 = sx.iter().map(|a| a * a).sum();
            if sy > 0.0 && ss > 0.0 {
                alpha = (ss / sy).clamp(1e-10, 10.0);
            }
        }

        // steplength at which the first free angle reaches π
        let mut hit = f64::INFINITY;
        let mut hit_idx = None;
        for i in 0..n {
            if free[i] && d[i] > 0.0 {
                let t = (PI - x[i]) / d[i];
                if t < hit {
                    hit = t;
                    hit_idx = Some(i);
                }
            }
        }

        let dd: f64 = d.iter().map(|v| v * v).sum();
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..60 {
            let (trial_step, clamp) = if step >= hit {
                (hit, hit_idx)
            } else {
                (step, None)
            };
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + trial_step * b).collect();
            let mut trial_free = free.clone();
            if let Some(i) = clamp {
                trial[i] = PI;
                trial_free[i] = false;
            }
            if let Some(y) = project(&trial, &trial_free, target, sum) {
                if y.iter().all(|&t| t > MIN_ANGLE && t <= PI) {
                    let fy = cot_sum(&y);
                    if fy <= f - 1e-4 * trial_step * dd || (fy < f && clamp.is_some()) {
                        accepted = Some((y, fy, trial_free));
                        break;
                    }
                }
            }
            step *= 0.5;
            if step < 1e-16 {
                break;
            }
        }
        match accepted {
            Some((y, fy, new_free)) => {
                let df = f - fy;
                prev = Some((x, d));
                x = y;
                free = new_free;
                f = fy;
                if df <= 1e-16 * f.abs() && norm_inf(&prev.as_ref().unwrap().1) < 1e-8 {
                    converged = true;
                    break;
                }
            }
            None => {
                // no descent possible at this resolution
                converged = norm_inf(&d) < 1e-7;
                break;
            }
        }
    }

    let mut kkt_residual = None;
    if let Some((y, kkt)) = polish(&x, &free, target, sum) {
        if cot_sum(&y) <= f * (1.0 + 1e-13) {
            x = y;
            kkt_residual = Some(kkt);
            converged = converged || kkt < 1e-10;
        }
    }

    let res = residuals(&x, s);
    let mut angles = x;
    angles.sort_by(|a, b| b.total_cmp(a));
    LocalOptimum {
        restart,
        degenerate: angles.iter().any(|&t| PI - t < DEGENERACY_TOL),
        area: 0.25 / cot_sum(&angles),
        angles,
        residuals: res,
        converged,
        kkt_residual,
        iterations,
    }
}

/// Newton iteration on the stationarity conditions
/// `g(θ_i) − a + b/θ_i² = 0` (free `i`) together with both constraints.
/// Returns the polished point and its final residual norm.
fn polish(x: &[f64], free: &[bool], target: f64, sum: f64) -> Option<(Vec<f64>, f64)> {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| free[i]).collect();
    let m = idx.len();
    if m < 3 {
        return None;
    }
    let fixed_sum: f64 = (0..x.len()).filter(|&i| !free[i]).map(|i| x[i]).sum();
    let fixed_harm: f64 = (0..x.len()).filter(|&i| !free[i]).map(|i| 1.0 / x[i]).sum();
    let (_, mut a, mut b) = tangent(x, &gradient(x), free);
    let mut th: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let resid = |th: &[f64], a: f64, b: f64| -> Vec<f64> {
        let mut r: Vec<f64> = th
            .iter()
            .map(|&t| {
                let s = (0.5 * t).sin();
                -0.5 / (s * s) - a + b / (t * t)
            })
            .collect();
        r.push(th.iter().sum::<f64>() + fixed_sum - sum);
        r.push(th.iter().map(|t| 1.0 / t).sum::<f64>() + fixed_harm - target);
        r
    };
    let norm = |r: &[f64]| norm_inf(r);
    let mut r = resid(&th, a, b);
    for _ in 0..30 {
        if norm(&r) < 1e-14 {
            break;
        }
        let k = m + 2;
        let mut jac = vec![vec![0.0; k]; k];
        for (i, &t) in th.iter().enumerate() {
            let s = (0.5 * t).sin();
            let c = (0.5 * t).cos();
            jac[i][i] = 0.5 * c / (s * s * s) - 2.0 * b / (t * t * t);
            jac[i][m] = -1.0;
            jac[i][m + 1] = 1.0 / (t * t);
            jac[m][i] = 1.0;
            jac[m + 1][i] = -1.0 / (t * t);
        }
        let delta = solve_dense(jac, r.iter().map(|v| -v).collect())?;
        let trial: Vec<f64> = th.iter().zip(&delta).map(|(t, d)| t + d).collect();
        if trial.iter().any(|&t| t <= MIN_ANGLE || t > PI) {
            return None;
        }
        let (ta, tb) = (a + delta[m], b + delta[m + 1]);
        let tr = resid(&trial, ta, tb);
        if norm(&tr) >= norm(&r) {
            break;
        }
        th = trial;
        a = ta;
        b = tb;
        r = tr;
    }
    let mut out = x.to_vec();
    for (k, &i) in idx.iter().enumerate() {
        out[i] = th[k];
    }
    Some((out, norm(&r)))
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

// ---------------------------------------------------------------------------
// Two-angle problem

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoAngleResult {
    pub s: f64,
    pub minimizer: TwoAnglePoint,
    /// `G_s` at the minimizer.
    pub value: f64,
    /// `1/(4G_s)`.
    pub area: f64,
    /// The predicted minimizer `(π, (s − 2)π/s)`.
    pub expected: TwoAnglePoint,
    /// Distance to the predicted point in units of `grid_step`.
    pub distance_in_cells: f64,
    pub grid_step: f64,
    pub samples: usize,
}

/// Grid search for the minimum of `G_s` over `S_s`, refined by successive
/// zooms around the best grid point.
pub fn solve_two_angle(s: f64, grid_step: f64) -> Result<TwoAngleResult> {
    let region = RegionSpec::new(s, RegionKind::S)?;
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::domain(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let (lo1, hi2) = (theta1_lo(s), theta2_hi(s));
    let mut samples = 0;
    let mut search = |a0: f64, a1: f64, b0: f64, b1: f64, h: f64| -> (f64, f64, f64) {
        let xs = crate::certificate::grid_points(a0, a1, h);
        let ys = crate::certificate::grid_points(b0, b1, h);
        let best = xs
            .par_iter()
            .map(|&a| {
                ys.iter()
                    .filter(|&&b| region.contains_raw(a, b))
                    .map(|&b| (objective_raw(s, a, b), a, b))
                    .fold(
                        (f64::INFINITY, a, f64::NAN),
                        |m, v| if v.0 < m.0 { v } else { m },
                    )
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((f64::INFINITY, f64::NAN, f64::NAN), |m, v| {
                if v.0 < m.0 {
                    v
                } else {
                    m
                }
            });
        samples += xs.len() * ys.len();
        best
    };
    let mut best = search(lo1, PI, 0.0, hi2, grid_step);
    let mut h = grid_step;
    for _ in 0..3 {
        let h2 = h / 10.0;
        let (a, b) = (best.1, best.2);
        let cand = search(
            (a - h).max(lo1),
            (a + h).min(PI),
            (b - h).max(0.0),
            (b + h).min(hi2),
            h2,
        );
        if cand.0 <= best.0 {
            best = cand;
        }
        h = h2;
    }
    if !best.0.is_finite() {
        return Err(Error::Numerical("no grid point inside the region".into()));
    }
    let minimizer = TwoAnglePoint::new(best.1, best.2)?;
    let expected = TwoAnglePoint::new(PI, hi2)?;
    let dist = ((minimizer.theta1 - PI).powi(2) + (minimizer.theta2 - hi2).powi(2)).sqrt();
    Ok(TwoAngleResult {
        s,
        minimizer,
        value: best.0,
        area: 0.25 / best.0,
        expected,
        distance_in_cells: dist / grid_step,
        grid_step,
        samples,
    })
}
