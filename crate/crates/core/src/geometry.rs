//! Planar polygons and the angle coordinates used for circumscriptible
//! polygons.
//!
//! [`Polygon`] stores counterclockwise vertices. [`AngleSet`] stores interior
//! angles and is the canonical form for every unit-perimeter computation: a
//! circumscriptible polygon is fixed up to rigid motion by its angles once
//! the perimeter is normalized.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ANGLE_SUM_TOL;

/// Minimum separation between consecutive vertices.
pub const MIN_VERTEX_SEPARATION: f64 = 1e-12;

/// Angles closer than this to `π` are treated as flat vertices.
pub const FLAT_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl std::ops::Add for Point {
    type Output = Point;

    fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// A simple polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct Polygon {
    vertices: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<Point>,
}

impl TryFrom<PolygonJson> for Polygon {
    type Error = Error;

    fn try_from(raw: PolygonJson) -> Result<Self> {
        Polygon::new(raw.vertices)
    }
}

impl From<Polygon> for PolygonJson {
    fn from(p: Polygon) -> Self {
        PolygonJson {
            vertices: p.vertices,
        }
    }
}

impl Polygon {
    /// Validates and wraps a counterclockwise vertex list.
    ///
    /// Rejects fewer than three vertices, repeated consecutive vertices,
    /// self-intersections, edges that fold back onto their predecessor and
    /// clockwise orientation.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if let Some(bad) = vertices
            .iter()
            .find(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidPolygon(format!("non-finite vertex {bad:?}")));
        }
        for i in 0..n {
            let d = vertices[i].dist(vertices[(i + 1) % n]);
            if d <= MIN_VERTEX_SEPARATION {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {i} and {} coincide (separation {d:e})",
                    (i + 1) % n
                )));
            }
        }
        check_simple(&vertices)?;
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "vertices must be counterclockwise (signed area {area:e})"
            )));
        }
        Ok(Self { vertices })
    }

    /// Like [`Polygon::new`] but accepts either orientation.
    pub fn oriented(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() >= 3 && signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    /// Regular `n`-gon with unit perimeter.
    pub fn regular(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidPolygon(format!(
                "regular polygon needs n >= 3, got {n}"
            )));
        }
        let side = 1.0 / n as f64;
        let radius = side / (2.0 * (PI / n as f64).sin());
        let vertices = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                Point::new(radius * phi.cos(), radius * phi.sin())
            })
            .collect();
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n]))
            .sum()
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|p| p.scale(k)).collect())
    }

    /// Rescales so that the perimeter equals one.
    pub fn unit_perimeter(&self) -> Result<Self> {
        self.scaled(1.0 / self.perimeter())
    }

    /// Interior angle at each vertex, in vertex order, each in `(0, 2π)`.
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let prev = self.vertices[(i + n - 1) % n];
                let cur = self.vertices[i];
                let next = self.vertices[(i + 1) % n];
                let e_in = cur - prev;
                let e_out = next - cur;
                PI - e_in.cross(e_out).atan2(e_in.dot(e_out))
            })
            .collect()
    }

    /// True when every interior angle is at most `π` (flat vertices allowed).
    pub fn is_convex(&self) -> bool {
        self.interior_angles()
            .iter()
            .all(|&t| t <= PI + FLAT_ANGLE_TOL)
    }

    /// Drops vertices whose interior angle is within [`FLAT_ANGLE_TOL`] of `π`.
    pub fn simplify(&self) -> Result<Self> {
        let angles = self.interior_angles();
        let kept: Vec<Point> = self
            .vertices
            .iter()
            .zip(&angles)
            .filter(|(_, &t)| (t - PI).abs() > FLAT_ANGLE_TOL)
            .map(|(p, _)| *p)
            .collect();
        Self::new(kept)
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching counts as intersecting.
fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

// O(n²); n stays in the hundreds at most.
fn check_simple(v: &[Point]) -> Result<()> {
    let n = v.len();
    for i in 0..n {
        // Adjacent edges share a vertex; they only fail by folding back.
        let e_in = v[i] - v[(i + n - 1) % n];
        let e_out = v[(i + 1) % n] - v[i];
        if e_in.cross(e_out) == 0.0 && e_in.dot(e_out) < 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "edges fold back at vertex {i}"
            )));
        }
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(Error::InvalidPolygon(format!(
                    "edges {i} and {j} intersect"
                )));
            }
        }
    }
    Ok(())
}

/// Interior angles of a polygon with the angle-sum identity enforced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AngleSetJson", into = "AngleSetJson")]
pub struct AngleSet {
    angles: Vec<f64>,
    convex: bool,
}

#[derive(Serialize, Deserialize)]
struct AngleSetJson {
    angles: Vec<f64>,
}

impl TryFrom<AngleSetJson> for AngleSet {
    type Error = Error;

    fn try_from(raw: AngleSetJson) -> Result<Self> {
        AngleSet::new(raw.angles)
    }
}

impl From<AngleSet> for AngleSetJson {
    fn from(a: AngleSet) -> Self {
        AngleSetJson { angles: a.angles }
    }
}

impl AngleSet {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        let n = angles.len();
        if n < 3 {
            return Err(Error::InvalidAngles(format!(
                "need at least 3 angles, got {n}"
            )));
        }
        if let Some((i, t)) = angles
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0 && **t < 2.0 * PI))
        {
            return Err(Error::InvalidAngles(format!(
                "angle {i} = {t} outside (0, 2π)"
            )));
        }
        let expected = (n as f64 - 2.0) * PI;
        let sum: f64 = angles.iter().sum();
        if (sum - expected).abs() > ANGLE_SUM_TOL {
            return Err(Error::InvalidAngles(format!(
                "angle sum {sum} differs from (n-2)π = {expected} by {:e}",
                sum - expected
            )));
        }
        let convex = angles.iter().all(|&t| t < PI);
        Ok(Self { angles, convex })
    }

    /// All angles equal to `(n − 2)π/n`.
    pub fn regular(n: usize) -> Result<Self> {
        let t = (n as f64 - 2.0) * PI / n as f64;
        Self::new(vec![t; n])
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// True iff every angle is strictly below `π`.
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Indices of angles within [`FLAT_ANGLE_TOL`] of `π`.
    pub fn flat_vertices(&self) -> Vec<usize> {
        self.angles
            .iter()
            .enumerate()
            .filter(|(_, &t)| (t - PI).abs() <= FLAT_ANGLE_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    /// Removes flat angles. The angle sum stays consistent because each
    /// removed vertex carries exactly `π`.
    pub fn simplify(&self) -> Result<Self> {
        Self::new(
            self.angles
                .iter()
                .copied()
                .filter(|t| (t - PI).abs() > FLAT_ANGLE_TOL)
                .collect(),
        )
    }
}

/// `S` together with the family parameter it corresponds to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SFunctionalValue {
    pub value: f64,
    /// `(2S − 4π)/(S − 4π)`; only defined when `S > 4π`.
    pub s_equivalent: Option<f64>,
}

/// Corner functional `Σ (π² − θ²)/θ` of raw angles, each in `(0, 2π)`.
pub fn corner_functional(angles: &[f64]) -> Result<f64> {
    if let Some(t) = angles.iter().find(|t| !(**t > 0.0 && **t < 2.0 * PI)) {
        return Err(Error::domain(format!("angle {t} outside (0, 2π)")));
    }
    Ok(angles.iter().map(|&t| corner_term(t)).sum())
}

#[inline]
pub(crate) fn corner_term(t: f64) -> f64 {
    (PI * PI - t * t) / t
}

/// Interior angles of a validated polygon.
pub fn angles_of(polygon: &Polygon) -> Result<AngleSet> {
    AngleSet::new(polygon.interior_angles())
}

pub fn s_functional(angles: &AngleSet) -> SFunctionalValue {
    let value: f64 = angles.angles.iter().map(|&t| corner_term(t)).sum();
    let four_pi = 4.0 * PI;
    let s_equivalent = (value > four_pi).then(|| (2.0 * value - four_pi) / (value - four_pi));
    SFunctionalValue {
        value,
        s_equivalent,
    }
}

/// Shoelace area and edge-length perimeter.
pub fn area_perimeter(polygon: &Polygon) -> (f64, f64) {
    (polygon.area(), polygon.perimeter())
}

fn require_strictly_convex(angles: &AngleSet) -> Result<()> {
    if let Some((i, t)) = angles.angles.iter().enumerate().find(|(_, &t)| t >= PI) {
        return Err(Error::domain(format!(
            "angle {i} = {t} is not below π; tangent construction needs a convex angle set"
        )));
    }
    Ok(())
}

/// Unit-perimeter polygon circumscribed about a circle with the given
/// angles, built by walking the tangent lengths `r·cot(θ_k/2)`.
pub fn circumscriptible_from_angles(angles: &AngleSet) -> Result<Polygon> {
    require_strictly_convex(angles)?;
    let cot_half: Vec<f64> = angles
        .angles
        .iter()
        .map(|&t| 1.0 / (0.5 * t).tan())
        .collect();
    let inradius = 0.5 / cot_half.iter().sum::<f64>();
    let tangent: Vec<f64> = cot_half.iter().map(|c| inradius * c).collect();
    let n = tangent.len();

    let mut vertices = Vec::with_capacity(n);
    let mut cur = Point::new(0.0, 0.0);
    let mut heading = 0.0_f64;
    for k in 0..n {
        vertices.push(cur);
        let side = tangent[k] + tangent[(k + 1) % n];
        cur = cur + Point::new(heading.cos(), heading.sin()).scale(side);
        heading += PI - angles.angles[(k + 1) % n];
    }
    let gap = cur.norm();
    if gap > ANGLE_SUM_TOL {
        return Err(Error::Numerical(format!(
            "tangent walk failed to close (gap {gap:e})"
        )));
    }
    Polygon::new(vertices)
}

/// `(1/4)(Σ cot(θ_k/2))⁻¹`, the unit-perimeter area of the circumscriptible
/// polygon with these angles.
pub fn circumscriptible_area(angles: &AngleSet) -> Result<f64> {
    require_strictly_convex(angles)?;
    Ok(cot_half_area(angles.angles()))
}

#[inline]
pub(crate) fn cot_half_area(angles: &[f64]) -> f64 {
    0.25 / angles.iter().map(|&t| 1.0 / (0.5 * t).tan()).sum::<f64>()
}
