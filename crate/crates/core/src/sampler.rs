//! Random convex polygons, the `(S, area)` scatter with its envelope, and
//! the non-convex spike ("hair") construction.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{corner_functional, Point, Polygon};
use crate::roots::{bracketed, golden_min};
use crate::semiregular::envelope_point;

/// Generator for stream `index` of `seed`; streams are independent.
pub fn sub_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const MAX_DRAWS: usize = 1000;

/// Convex polygon with `sides` vertices and unit perimeter: zero-mean random
/// edge vectors sorted by direction and chained.
pub fn random_convex(sides: usize, seed: u64) -> Result<Polygon> {
    random_convex_from(sides, &mut sub_rng(seed, 0))
}

fn random_convex_from(sides: usize, rng: &mut ChaCha8Rng) -> Result<Polygon> {
    if sides < 3 {
        return Err(Error::domain(format!("need at least 3 sides, got {sides}")));
    }
    for _ in 0..MAX_DRAWS {
        let mut edges: Vec<Point> = (0..sides)
            .map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mean = edges
            .iter()
            .fold(Point::new(0.0, 0.0), |m, e| m + *e)
            .scale(1.0 / sides as f64);
        for e in &mut edges {
            *e = *e - mean;
        }
        edges.sort_by(|a, b| a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x)));
        // consecutive parallel edges would leave a flat vertex
        let parallel = (0..sides).any(|i| {
            let (a, b) = (edges[i], edges[(i + 1) % sides]);
            a.cross(b) <= 1e-9 * a.norm() * b.norm()
        });
        if parallel || edges.iter().any(|e| e.norm() < 1e-9) {
            continue;
        }
        let mut vertices = Vec::with_capacity(sides);
        let mut p = Point::new(0.0, 0.0);
        for e in &edges {
            vertices.push(p);
            p = p + *e;
        }
        let Ok(poly) = Polygon::new(vertices).and_then(|p| p.unit_perimeter()) else {
            continue;
        };
        if poly.is_convex() && poly.interior_angles().iter().all(|&t| t < PI) {
            return Ok(poly);
        }
    }
    Err(Error::Numerical(format!(
        "no valid convex {sides}-gon after {MAX_DRAWS} draws"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    #[serde(rename = "S")]
    pub s_value: f64,
    pub area: f64,
    pub sides: usize,
    /// Stream index of the sample under the scatter seed.
    pub index: u64,
}

/// `samples` random convex polygons with side counts uniform on
/// `[min_sides, max_sides]`, in sample order.
pub fn scatter(
    samples: usize,
    min_sides: usize,
    max_sides: usize,
    seed: u64,
) -> Result<Vec<ScatterRecord>> {
    if min_sides < 3 || max_sides < min_sides {
        return Err(Error::domain(format!(
            "side range [{min_sides}, {max_sides}] must satisfy 3 <= min <= max"
        )));
    }
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sub_rng(seed, i);
            let sides = rng.random_range(min_sides..=max_sides);
            let poly = random_convex_from(sides, &mut rng)?;
            Ok(ScatterRecord {
                s_value: corner_functional(&poly.interior_angles())?,
                area: poly.area(),
                sides,
                index: i,
            })
        })
        .collect()
}

/// Points `(S, area)` of the envelope for `s` on a uniform grid of
/// `[s_lo, s_hi]` plus every integer in range, sorted by `s`.
pub fn envelope_curve(s_lo: f64, s_hi: f64, points: usize) -> Result<Vec<(f64, f64, f64)>> {
    if !(s_lo > 2.0 && s_hi > s_lo && points >= 2) {
        return Err(Error::domain(
            "envelope range needs 2 < s_lo < s_hi and >= 2 points",
        ));
    }
    let mut ss: Vec<f64> = (0..points)
        .map(|i| s_lo + (s_hi - s_lo) * i as f64 / (points - 1) as f64)
        .collect();
    ss.extend((s_lo.ceil() as i64..=s_hi.floor() as i64).map(|k| k as f64));
    ss.sort_by(f64::total_cmp);
    ss.dedup();
    ss.into_iter()
        .map(|s| envelope_point(s).map(|(big_s, a)| (s, big_s, a)))
        .collect()
}

/// Writes `S,area,sides` rows.
pub fn write_csv<W: Write>(out: &mut W, records: &[ScatterRecord]) -> std::io::Result<()> {
    writeln!(out, "S,area,sides")?;
    for r in records {
        writeln!(out, "{:.16e},{:.16e},{}", r.s_value, r.area, r.sides)?;
    }
    Ok(())
}

/// Static SVG of the scatter with the envelope polyline.
pub fn render_svg(records: &[ScatterRecord], envelope: &[(f64, f64, f64)]) -> String {
    let (w, h, m) = (800.0, 560.0, 60.0);
    let x_lo = 4.0 * PI;
    let x_hi = records
        .iter()
        .map(|r| r.s_value)
        .fold(8.0 * PI, f64::max)
        .min(16.0 * PI);
    let y_hi = 1.0 / (4.0 * PI);
    let sx = |x: f64| m + (x - x_lo) / (x_hi - x_lo) * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / y_hi * (h - 2.0 * m);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {y0:.2} H{x1:.2} M{x0:.2} {y0:.2} V{y1:.2}" stroke="black" fill="none"/>"#,
        x0 = m,
        y0 = h - m,
        x1 = w - m,
        y1 = m
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">S</text>"#,
        w / 2.0,
        h - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.1})">area</text>"#,
        h / 2.0,
        h / 2.0
    );
    for k in 4..=16 {
        let x = k as f64 * PI;
        if x > x_hi {
            break;
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{k}π</text>"#,
            sx(x),
            h - m + 15.0
        );
    }
    let _ = writeln!(svg, r##"<g fill="#4477aa" fill-opacity="0.35">"##);
    for r in records.iter().filter(|r| r.s_value <= x_hi) {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#,
            sx(r.s_value),
            sy(r.area)
        );
    }
    let _ = writeln!(svg, "</g>");
    let pts: Vec<String> = envelope
        .iter()
        .filter(|p| p.1 <= x_hi)
        .map(|p| format!("{:.2},{:.2}", sx(p.1), sy(p.2)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#cc3311" stroke-width="1.5" stroke-dasharray="6 3"/>"##,
        pts.join(" ")
    );
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// Hair

/// Where the hair sits on the base polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HairAttachment {
    /// An isosceles spike replacing a vertex.
    Vertex,
    /// A thin parallelogram strip leaning out of the middle of an edge.
    Edge,
}

/// A convex polygon with an outward hair, rescaled to unit perimeter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairPolygon {
    pub polygon: Polygon,
    pub base: Polygon,
    pub attachment: HairAttachment,
    /// Index of the base vertex the spike replaces, or the first vertex of the
    /// edge carrying the strip.
    pub vertex: usize,
    /// Length of each hair side, before the final rescaling.
    pub hair_length: f64,
    pub tip_angle: f64,
    pub s_value: f64,
    pub area: f64,
}

fn f_corner(t: f64) -> f64 {
    (PI * PI - t * t) / t
}

/// Change in `S` when a vertex of angle `alpha` is replaced by a spike with
/// tip angle `tau`: the tip plus two reflex angles `(α + 2π − τ)/2`.
pub fn hair_s_change(alpha: f64, tau: f64) -> f64 {
    f_corner(tau) + 2.0 * f_corner(0.5 * (alpha + 2.0 * PI - tau)) - f_corner(alpha)
}

struct Spike {
    d: f64,
    reach: f64,
    scale: f64,
}

fn spike(alpha: f64, tau: f64, len: f64) -> Spike {
    let sa = (0.5 * alpha).sin();
    let d = len * (0.5 * tau).sin() / sa;
    // distance from the vertex to the tip along the bisector
    let reach = len * (0.5 * (alpha - tau)).sin() / sa;
    Spike {
        d,
        reach,
        scale: 1.0 + 2.0 * len - 2.0 * d,
    }
}

/// Strip width as a fraction of the edge it sits on.
pub const STRIP_WIDTH: f64 = 1e-3;

/// Change in `S` from a parallelogram strip leaning at angle `beta` out of an
/// edge: tips `β` and `π − β`, feet `π + β` and `2π − β`. At least `4π/3`.
pub fn strip_s_change(beta: f64) -> f64 {
    f_corner(beta) + f_corner(PI - beta) + f_corner(PI + beta) + f_corner(2.0 * PI - beta)
}

fn strip_area(base_area: f64, width: f64, beta: f64, len: f64) -> f64 {
    let scale = 1.0 + 2.0 * len;
    (base_area + width * len * beta.sin()) / (scale * scale)
}

fn edge_strip(
    base: &Polygon,
    target_s: f64,
    target_area: f64,
    trace: &mut Vec<String>,
) -> Option<HairPolygon> {
    let angles = base.interior_angles();
    let s_base = corner_functional(&angles).ok()?;
    let a_base = base.area();
    let ds = target_s - s_base;
    if ds < strip_s_change(0.5 * PI) {
        trace.push(format!("edge strip: S change {ds:.6e} below 4π/3"));
        return None;
    }
    let beta = match bracketed(|b| strip_s_change(b) - ds, 1e-12, 0.5 * PI, 1e-15, 300) {
        Ok(r) => r.x,
        Err(e) => {
            trace.push(format!("edge strip: lean angle solve failed ({e})"));
            return None;
        }
    };
    let verts = base.vertices();
    let n = verts.len();
    let e = (0..n)
        .max_by(|&i, &j| {
            let li = verts[i].dist(verts[(i + 1) % n]);
            let lj = verts[j].dist(verts[(j + 1) % n]);
            li.total_cmp(&lj)
        })
        .unwrap_or(0);
    let (a, b) = (verts[e], verts[(e + 1) % n]);
    let edge_len = a.dist(b);
    let width = STRIP_WIDTH * edge_len;
    let mut hi = 1.0;
    while strip_area(a_base, width, beta, hi) > target_area {
        hi *= 2.0;
        if hi > 1e12 {
            trace.push("edge strip: area target not bracketed".into());
            return None;
        }
    }
    let len = match bracketed(
        |l| strip_area(a_base, width, beta, l) - target_area,
        0.0,
        hi,
        1e-15,
        300,
    ) {
        Ok(r) => r.x,
        Err(err) => {
            trace.push(format!("edge strip: length solve failed ({err})"));
            return None;
        }
    };
    let u = (b - a).scale(1.0 / edge_len);
    let out = Point::new(u.y, -u.x);
    let dir = u.scale(beta.cos()) + out.scale(beta.sin());
    let mid = (a + b).scale(0.5);
    let f1 = mid - u.scale(0.5 * width);
    let f2 = mid + u.scale(0.5 * width);
    let mut vs = Vec::with_capacity(n + 4);
    for (i, &q) in verts.iter().enumerate() {
        vs.push(q);
        if i == e {
            vs.extend([f1, f1 + dir.scale(len), f2 + dir.scale(len), f2]);
        }
    }
    let poly = match Polygon::new(vs).and_then(|q| q.unit_perimeter()) {
        Ok(q) => q,
        Err(err) => {
            trace.push(format!("edge strip: polygon rejected ({err})"));
            return None;
        }
    };
    let s_value = corner_functional(&poly.interior_angles()).ok()?;
    let area = poly.area();
    trace.push(format!(
        "edge {e}: lean {beta:.6e}, length {len:.6e}, S = {s_value}, area = {area}"
    ));
    if (s_value - target_s).abs() > 1e-6 || (area - target_area).abs() > 1e-6 {
        return None;
    }
    Some(HairPolygon {
        polygon: poly,
        base: base.clone(),
        attachment: HairAttachment::Edge,
        vertex: e,
        hair_length: len,
        tip_angle: beta,
        s_value,
        area,
    })
}

fn spike_area(base_area: f64, alpha: f64, tau: f64, len: f64) -> f64 {
    let sp = spike(alpha, tau, len);
    (base_area + sp.d * (0.5 * alpha).sin() * sp.reach) / (sp.scale * sp.scale)
}

/// Appends a hair to `base` so that the result has corner functional
/// `target_s` and area `target_area` at unit perimeter.
///
/// A vertex spike is tried first. It can only raise `S` (the change is zero
/// when the tip angle equals the vertex angle and grows without bound as the
/// tip closes), and how far it lowers the area is limited by the adjacent
/// edges. The fallback is a thin strip leaning out of the longest edge: its
/// lean angle fixes an `S` change of at least `4π/3` and its length then
/// drives the area anywhere in `(0, |base|)`. Targets neither reaches are
/// reported as infeasible with what was tried.
pub fn build_hair(base: &Polygon, target_s: f64, target_area: f64) -> Result<HairPolygon> {
    if !base.is_convex() {
        return Err(Error::InvalidPolygon("hair base must be convex".into()));
    }
    let base = base.unit_perimeter()?;
    let angles = base.interior_angles();
    if angles.iter().any(|&t| t >= PI - 1e-9) {
        return Err(Error::InvalidPolygon(
            "hair base has a flat vertex; simplify it first".into(),
        ));
    }
    let s_base = corner_functional(&angles)?;
    let a_base = base.area();
    if !(target_area > 0.0 && target_area < 1.0 / (4.0 * PI)) {
        return Err(Error::domain(format!(
            "target area {target_area} outside (0, 1/(4π))"
        )));
    }
    if target_s < s_base {
        return Err(Error::Infeasible(format!(
            "target S = {target_s} is below S(base) = {s_base}; a hair only increases S"
        )));
    }
    if target_area > a_base {
        return Err(Error::Infeasible(format!(
            "target area {target_area} exceeds the base area {a_base}; a hair only decreases area"
        )));
    }

    let n = base.len();
    let verts = base.vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angles[j].total_cmp(&angles[i]));
    let mut trace = Vec::new();
    for v in order {
        let alpha = angles[v];
        let ds = target_s - s_base;
        let tau = if ds == 0.0 {
            alpha
        } else {
            match bracketed(|t| hair_s_change(alpha, t) - ds, 1e-12, alpha, 1e-15, 300) {
                Ok(r) => r.x,
                Err(e) => {
                    trace.push(format!("vertex {v}: tip angle solve failed ({e})"));
                    continue;
                }
            }
        };
        let prev = verts[(v + n - 1) % n];
        let next = verts[(v + 1) % n];
        let p = verts[v];
        let short = p.dist(prev).min(p.dist(next));
        // d < adjacent edge lengths
        let len_max = 0.999 * short * (0.5 * alpha).sin() / (0.5 * tau).sin().max(1e-300);
        let (len_min_area, a_min) = golden_min(
            |l| spike_area(a_base, alpha, tau, l),
            0.0,
            len_max,
            1e-12 * len_max,
        );
        trace.push(format!(
            "vertex {v}: alpha = {alpha:.6}, tau = {tau:.6e}, length in [0, {len_max:.6e}], \
             area in [{a_min:.6e}, {a_base:.6e}]"
        ));
        if target_area < a_min {
            continue;
        }
        let len = if target_area == a_base {
            0.0
        } else {
            match bracketed(
                |l| spike_area(a_base, alpha, tau, l) - target_area,
                0.0,
                len_min_area,
                1e-15,
                300,
            ) {
                Ok(r) => r.x,
                Err(e) => {
                    trace.push(format!("vertex {v}: length solve failed ({e})"));
                    continue;
                }
            }
        };
        let sp = spike(alpha, tau, len);
        let e_prev = (prev - p).scale(1.0 / p.dist(prev));
        let e_next = (next - p).scale(1.0 / p.dist(next));
        let out = (e_prev + e_next).scale(-1.0);
        let out = out.scale(1.0 / out.norm());
        let mut vs = Vec::with_capacity(n + 2);
        for (i, &q) in verts.iter().enumerate() {
            if i == v {
                vs.push(p + e_prev.scale(sp.d));
                vs.push(p + out.scale(sp.reach));
                vs.push(p + e_next.scale(sp.d));
            } else {
                vs.push(q);
            }
        }
        let poly = match Polygon::new(vs).and_then(|q| q.unit_perimeter()) {
            Ok(q) => q,
            Err(e) => {
                trace.push(format!("vertex {v}: spike polygon rejected ({e})"));
                continue;
            }
        };
        let s_value = corner_functional(&poly.interior_angles())?;
        let area = poly.area();
        if (s_value - target_s).abs() > 1e-6 || (area - target_area).abs() > 1e-6 {
            trace.push(format!(
                "vertex {v}: result misses targets (S = {s_value}, area = {area})"
            ));
            continue;
        }
        return Ok(HairPolygon {
            polygon: poly,
            base,
            attachment: HairAttachment::Vertex,
            vertex: v,
            hair_length: len,
            tip_angle: tau,
            s_value,
            area,
        });
    }
    if let Some(h) = edge_strip(&base, target_s, target_area, &mut trace) {
        return Ok(h);
    }
    Err(Error::Infeasible(format!(
        "no vertex spike or edge strip gives S = {target_s}, area = {target_area}: {}",
        trace.join("; ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiregular::{envelope_area, s_from_S};

    #[test]
    fn generator_contract() {
        for seed in 0..500 {
            let sides = 3 + (seed as usize % 10);
            let p = random_convex(sides, seed).unwrap();
            assert_eq!(p.len(), sides);
            assert!(p.is_convex());
            assert!((p.perimeter() - 1.0).abs() < 1e-12);
            assert!(p.area() > 0.0 && p.area() < 1.0 / (4.0 * PI));
        }
        assert_eq!(random_convex(7, 42).unwrap(), random_convex(7, 42).unwrap());
        assert!(random_convex(2, 1).is_err());
    }

    #[test]
    fn scatter_below_envelope() {
        let recs = scatter(2000, 3, 12, 5).unwrap();
        assert_eq!(recs.len(), 2000);
        for r in &recs {
            assert!(r.s_value > 4.0 * PI);
            let env = envelope_area(s_from_S(r.s_value).unwrap()).unwrap();
            assert!(r.area <= env + 1e-9, "{r:?} vs {env}");
        }
        assert!(scatter(0, 3, 12, 5).unwrap().is_empty());
    }

    #[test]
    fn scatter_is_thread_count_independent() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| scatter(300, 3, 12, 11).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn envelope_passes_through_regular_polygons() {
        let curve = envelope_curve(2.5, 12.0, 50).unwrap();
        let tri = curve.iter().find(|p| p.0 == 3.0).unwrap();
        assert!((tri.1 - 8.0 * PI).abs() < 1e-10);
        assert!((tri.2 - 1.0 / (12.0 * 3f64.sqrt())).abs() < 1e-12);
        let sq = curve.iter().find(|p| p.0 == 4.0).unwrap();
        assert!((sq.1 - 6.0 * PI).abs() < 1e-10 && (sq.2 - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn csv_and_svg() {
        let recs = scatter(10, 3, 5, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("S,area,sides\n"));
        assert_eq!(text.lines().count(), 11);
        let svg = render_svg(&recs, &envelope_curve(2.5, 12.0, 20).unwrap());
        let circles = svg.matches("<circle").count();
        assert!(svg.contains("<polyline") && (1..=10).contains(&circles));
    }

    #[test]
    fn s_change_limits() {
        assert!(hair_s_change(2.0, 2.0).abs() < 1e-14);
        assert!(hair_s_change(2.0, 1e-6) > 1e6);
        // decreasing in the tip angle
        let mut last = f64::INFINITY;
        for k in 1..=100 {
            let v = hair_s_change(2.0, 2.0 * k as f64 / 100.0);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn hair_matches_targets() {
        let base = Polygon::regular(5).unwrap();
        let s_base = corner_functional(&base.interior_angles()).unwrap();
        let h = build_hair(&base, s_base + 10.0, 0.8 * base.area()).unwrap();
        assert!(!h.polygon.is_convex());
        assert!((h.polygon.perimeter() - 1.0).abs() < 1e-10);
        assert!((h.s_value - (s_base + 10.0)).abs() < 1e-6);
        assert!((h.area - 0.8 * base.area()).abs() < 1e-6);
    }

    #[test]
    fn hair_continuity_at_zero_length() {
        let base = Polygon::regular(5).unwrap();
        let alpha = base.interior_angles()[0];
        assert!((spike_area(base.area(), alpha, alpha - 1e-9, 1e-9) - base.area()).abs() < 1e-9);
    }

    #[test]
    fn hair_reports_unreachable_targets() {
        let base = Polygon::regular(5).unwrap();
        let s_base = corner_functional(&base.interior_angles()).unwrap();
        assert!(matches!(
            build_hair(&base, s_base - 1.0, 0.04),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            build_hair(&base, s_base + 1.0, 0.07),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn strip_reaches_small_areas() {
        assert!((strip_s_change(0.5 * PI) - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((strip_s_change(0.3) - strip_s_change(PI - 0.3)).abs() < 1e-12);
        assert!(strip_s_change(0.3) > strip_s_change(0.6));
        let base = Polygon::regular(5).unwrap();
        let s_base = corner_functional(&base.interior_angles()).unwrap();
        let hair = build_hair(&base, s_base + 10.0, 0.005).unwrap();
        assert_eq!(hair.attachment, HairAttachment::Edge);
        assert!(!hair.polygon.is_convex());
        assert_eq!(hair.polygon.len(), 9);
        assert!((hair.polygon.perimeter() - 1.0).abs() < 1e-10);
        assert!((hair.s_value - s_base - 10.0).abs() < 1e-6);
        assert!((hair.area - 0.005).abs() < 1e-6);
    }
}
