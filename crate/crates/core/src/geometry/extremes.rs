//! Exact extreme distances of aperture regions.
//!
//! The squared distance to the origin, or the squared norm after projection
//! orthogonal to the array direction, is a positive semidefinite quadratic form
//! on the aperture plane. Its extremes over a region made of rectangles,
//! disks, annuli, segments and points are attained at the origin (minimum,
//! when the origin is inside), at critical points along boundary curves, at
//! intersections of boundary curves, or where the null line of the form meets
//! a boundary. All candidates are enumerated and filtered by membership in the
//! region closure.

use serde::{Deserialize, Serialize};

use super::shape::Curve;
use super::{ApertureModule, ApertureRegion, Direction, Point2};
use crate::{Error, Result, Vec3};

/// Closest and farthest distance from the origin to an aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeDistances {
    pub p_min: f64,
    pub p_max: f64,
}

impl ExtremeDistances {
    pub fn new(p_min: f64, p_max: f64) -> Result<Self> {
        if !(p_min.is_finite() && p_max.is_finite()) || p_min < 0.0 || p_min > p_max {
            return Err(Error::param(
                "extreme distances",
                format!("need 0 <= p_min <= p_max, got ({p_min}, {p_max})"),
            ));
        }
        Ok(Self { p_min, p_max })
    }

    /// Extremes of a point cloud; used as the sampled fallback.
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Result<Self> {
        let (lo, hi) = points
            .into_iter()
            .map(|p| p.norm())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        if lo > hi {
            return Err(Error::EmptyRegion);
        }
        Ok(Self {
            p_min: lo,
            p_max: hi,
        })
    }

    fn merge(self, other: Self) -> Self {
        Self {
            p_min: self.p_min.min(other.p_min),
            p_max: self.p_max.max(other.p_max),
        }
    }
}

/// `f(p) = pᵀ A p` on `(x, z)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PlanarMetric {
    a11: f64,
    a12: f64,
    a22: f64,
}

impl PlanarMetric {
    pub(crate) fn euclidean() -> Self {
        Self {
            a11: 1.0,
            a12: 0.0,
            a22: 1.0,
        }
    }

    /// `‖p‖² − (uᵀp)²` restricted to the xz-plane.
    pub(crate) fn projected(direction: &Direction) -> Self {
        let (ux, uz) = (direction.u.x, direction.u.z);
        Self {
            a11: 1.0 - ux * ux,
            a12: -ux * uz,
            a22: 1.0 - uz * uz,
        }
    }

    fn eval(&self, p: Point2) -> f64 {
        (self.a11 * p.x * p.x + 2.0 * self.a12 * p.x * p.y + self.a22 * p.y * p.y).max(0.0)
    }

    fn bilinear(&self, p: Point2, q: Point2) -> f64 {
        self.a11 * p.x * q.x + self.a12 * (p.x * q.y + p.y * q.x) + self.a22 * p.y * q.y
    }

    fn is_isotropic(&self) -> bool {
        self.a12 == 0.0 && self.a11 == self.a22
    }

    /// Direction spanning the null space, when the form is singular.
    fn null_direction(&self) -> Option<Point2> {
        let det = self.a11 * self.a22 - self.a12 * self.a12;
        let trace = self.a11 + self.a22;
        if det.abs() > 1e-14 * trace.max(1.0) {
            return None;
        }
        let v = if self.a11.abs() >= self.a22.abs() {
            Point2::new(-self.a12, self.a11)
        } else {
            Point2::new(self.a22, -self.a12)
        };
        let n = v.norm();
        (n > 0.0).then(|| v / n)
    }
}

fn line_critical_points(m: &PlanarMetric, a: Point2, b: Point2, out: &mut Vec<Point2>) {
    out.push(a);
    out.push(b);
    let d = b - a;
    let dd = m.bilinear(d, d);
    if dd > 0.0 {
        let s = -m.bilinear(a, d) / dd;
        if (0.0..=1.0).contains(&s) {
            out.push(a + d * s);
        }
    }
}

fn circle_critical_points(m: &PlanarMetric, c: Point2, r: f64, out: &mut Vec<Point2>) {
    let at = |theta: f64| c + Point2::new(theta.cos(), theta.sin()) * r;
    if m.is_isotropic() {
        let n = c.norm();
        if n > 0.0 {
            out.push(c + c * (r / n));
            out.push(c - c * (r / n));
        } else {
            out.push(at(0.0));
        }
        return;
    }
    // Scan then refine each discrete local extremum by golden-section search.
    const N: usize = 1024;
    let step = std::f64::consts::TAU / N as f64;
    let vals: Vec<f64> = (0..N).map(|i| m.eval(at(i as f64 * step))).collect();
    for i in 0..N {
        let (prev, cur, next) = (vals[(i + N - 1) % N], vals[i], vals[(i + 1) % N]);
        let is_max = cur >= prev && cur >= next;
        let is_min = cur <= prev && cur <= next;
        if !(is_max || is_min) {
            continue;
        }
        let sign = if is_max { -1.0 } else { 1.0 };
        let f = |t: f64| sign * m.eval(at(t));
        let theta = golden_section(f, (i as f64 - 1.0) * step, (i as f64 + 1.0) * step);
        out.push(at(theta));
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Intersections of the line `p + s·d` (for `s` in `range`) with a circle.
fn line_circle(p: Point2, d: Point2, range: (f64, f64), c: Point2, r: f64) -> Vec<Point2> {
    let f = p - c;
    let (qa, qb, qc) = (d.dot(&d), 2.0 * f.dot(&d), f.dot(&f) - r * r);
    if qa == 0.0 {
        return Vec::new();
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let slack = 1e-12;
    [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
        .into_iter()
        .filter(|s| *s >= range.0 - slack && *s <= range.1 + slack)
        .map(|s| p + d * s)
        .collect()
}

fn line_line(a: Point2, b: Point2, c: Point2, d: Point2, infinite_first: bool) -> Option<Point2> {
    let (r, s) = (b - a, d - c);
    let denom = r.x * s.y - r.y * s.x;
    if denom.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let w = c - a;
    let t = (w.x * s.y - w.y * s.x) / denom;
    let u = (w.x * r.y - w.y * r.x) / denom;
    let slack = 1e-12;
    let t_ok = infinite_first || (-slack..=1.0 + slack).contains(&t);
    (t_ok && (-slack..=1.0 + slack).contains(&u)).then(|| a + r * t)
}

fn circle_circle(c1: Point2, r1: f64, c2: Point2, r2: f64) -> Vec<Point2> {
    let d = (c2 - c1).norm();
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let e = (c2 - c1) / d;
    let base = c1 + e * a;
    let perp = Point2::new(-e.y, e.x);
    vec![base + perp * h, base - perp * h]
}

fn intersections(a: &Curve, b: &Curve, out: &mut Vec<Point2>) {
    match (*a, *b) {
        (Curve::Line { a: p, b: q }, Curve::Line { a: r, b: s }) => {
            out.extend(line_line(p, q, r, s, false));
        }
        (Curve::Line { a: p, b: q }, Curve::Circle { center, radius })
        | (Curve::Circle { center, radius }, Curve::Line { a: p, b: q }) => {
            out.extend(line_circle(p, q - p, (0.0, 1.0), center, radius));
        }
        (
            Curve::Circle {
                center: c1,
                radius: r1,
            },
            Curve::Circle {
                center: c2,
                radius: r2,
            },
        ) => out.extend(circle_circle(c1, r1, c2, r2)),
    }
}

fn null_line_hits(n: Point2, curve: &Curve, out: &mut Vec<Point2>) {
    let o = Point2::zeros();
    match *curve {
        Curve::Line { a, b } => out.extend(line_line(o, n, a, b, true)),
        Curve::Circle { center, radius } => out.extend(line_circle(
            o,
            n,
            (f64::NEG_INFINITY, f64::INFINITY),
            center,
            radius,
        )),
    }
}

pub(crate) fn module_extremes(module: &ApertureModule, metric: &PlanarMetric) -> Result<ExtremeDistances> {
    let curves: Vec<Curve> = module
        .parts
        .iter()
        .chain(&module.holes)
        .flat_map(|s| s.boundary())
        .collect();

    let mut candidates = vec![Point2::zeros()];
    for c in &curves {
        match *c {
            Curve::Line { a, b } => line_critical_points(metric, a, b, &mut candidates),
            Curve::Circle { center, radius } => {
                circle_critical_points(metric, center, radius, &mut candidates)
            }
        }
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            intersections(&curves[i], &curves[j], &mut candidates);
        }
    }
    if let Some(n) = metric.null_direction() {
        for c in &curves {
            null_line_hits(n, c, &mut candidates);
        }
    }

    let tol = 1e-9 * module.scale();
    let (lo, hi) = candidates
        .iter()
        .filter(|p| module.signed_distance(**p) <= tol)
        .map(|p| metric.eval(*p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return Err(Error::EmptyRegion);
    }
    Ok(ExtremeDistances {
        p_min: lo.sqrt(),
        p_max: hi.sqrt(),
    })
}

fn region_extremes(region: &ApertureRegion, metric: &PlanarMetric) -> Result<Vec<ExtremeDistances>> {
    region.validate()?;
    region
        .modules
        .iter()
        .map(|m| module_extremes(m, metric))
        .collect()
}

/// `(p_min, p_max)` over the whole region.
pub fn extreme_distances(region: &ApertureRegion) -> Result<ExtremeDistances> {
    let per = region_extremes(region, &PlanarMetric::euclidean())?;
    Ok(per.into_iter().reduce(ExtremeDistances::merge).expect("validated nonempty"))
}

/// Extremes of each module separately.
pub fn module_extreme_distances(region: &ApertureRegion) -> Result<Vec<ExtremeDistances>> {
    region_extremes(region, &PlanarMetric::euclidean())
}

/// Extremes `(p̄_min, p̄_max)` of the region projected onto the plane
/// orthogonal to `direction`.
pub fn projected_extreme_distances(
    region: &ApertureRegion,
    direction: &Direction,
) -> Result<ExtremeDistances> {
    let per = projected_module_extreme_distances(region, direction)?;
    Ok(per.into_iter().reduce(ExtremeDistances::merge).expect("validated nonempty"))
}

pub fn projected_module_extreme_distances(
    region: &ApertureRegion,
    direction: &Direction,
) -> Result<Vec<ExtremeDistances>> {
    region_extremes(region, &PlanarMetric::projected(direction))
}
