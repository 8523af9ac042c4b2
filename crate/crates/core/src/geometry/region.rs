use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Point2, Shape};
use crate::{Error, Result, Vec3};

/// Sub-samples per axis used to estimate the covered fraction of boundary cells.
const COVERAGE_SUBSAMPLES: usize = 8;

/// Continuous sub-array: union of `parts` minus the union of `holes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureModule {
    pub parts: Vec<Shape>,
    #[serde(default)]
    pub holes: Vec<Shape>,
}

impl ApertureModule {
    pub fn new(parts: Vec<Shape>, holes: Vec<Shape>) -> Self {
        Self { parts, holes }
    }

    pub fn from_shape(shape: Shape) -> Self {
        Self::new(vec![shape], Vec::new())
    }

    /// CSG signed distance of the module restricted to planar parts.
    fn planar_distance(&self, p: Point2) -> f64 {
        let outer = self
            .parts
            .iter()
            .filter(|s| s.is_planar())
            .map(|s| s.signed_distance(p))
            .fold(f64::INFINITY, f64::min);
        self.holes
            .iter()
            .map(|h| -h.signed_distance(p))
            .fold(outer, f64::max)
    }

    /// Signed distance of the module closure. One-dimensional parts count as
    /// zero-thickness sets: points on them have distance 0.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let outer = self
            .parts
            .iter()
            .map(|s| s.signed_distance(p))
            .fold(f64::INFINITY, f64::min);
        self.holes
            .iter()
            .map(|h| -h.signed_distance(p))
            .fold(outer, f64::max)
    }

    fn in_hole(&self, p: Point2) -> bool {
        self.holes.iter().any(|h| h.signed_distance(p) < 0.0)
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        self.parts.iter().map(Shape::bounding_box).fold(
            (
                Point2::new(f64::INFINITY, f64::INFINITY),
                Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), (a, b)| (lo.inf(&a), hi.sup(&b)),
        )
    }

    /// Largest absolute coordinate, used to scale geometric tolerances.
    pub(crate) fn scale(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.abs().max().max(hi.abs().max()).max(1e-300)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            parts: self.parts.iter().map(|s| s.scaled(factor)).collect(),
            holes: self.holes.iter().map(|s| s.scaled(factor)).collect(),
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if self.parts.is_empty() {
            return Err(Error::InvalidGeometry(format!(
                "module {index} has no additive parts"
            )));
        }
        for s in self.parts.iter().chain(&self.holes) {
            s.validate()?;
        }
        for h in &self.holes {
            if !h.is_planar() {
                return Err(Error::InvalidGeometry(format!(
                    "module {index}: holes must be planar shapes"
                )));
            }
            let (hlo, hhi) = h.bounding_box();
            let touches = self.parts.iter().any(|p| {
                let (lo, hi) = p.bounding_box();
                hlo.x < hi.x && hhi.x > lo.x && hlo.y <= hi.y && hhi.y >= lo.y
            });
            if !touches {
                return Err(Error::InvalidGeometry(format!(
                    "module {index}: hole {h:?} lies outside every part"
                )));
            }
        }
        Ok(())
    }
}

/// Transmit aperture in the xz-plane, made of pairwise disjoint modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureRegion {
    pub modules: Vec<ApertureModule>,
}

impl ApertureRegion {
    pub fn new(modules: Vec<ApertureModule>) -> Self {
        Self { modules }
    }

    pub fn from_shape(shape: Shape) -> Self {
        Self::new(vec![ApertureModule::from_shape(shape)])
    }

    /// Single module `shape` with the given holes.
    pub fn with_holes(shape: Shape, holes: Vec<Shape>) -> Self {
        Self::new(vec![ApertureModule::new(vec![shape], holes)])
    }

    /// Symmetric pair of x-axis segments `[inner, outer] ∪ [-outer, -inner]`.
    /// A zero inner offset yields the single segment `[-outer, outer]`.
    pub fn symmetric_segments(inner: f64, outer: f64) -> Self {
        if inner == 0.0 {
            return Self::from_shape(Shape::x_segment(-outer, outer));
        }
        Self::new(vec![
            ApertureModule::from_shape(Shape::x_segment(inner, outer)),
            ApertureModule::from_shape(Shape::x_segment(-outer, -inner)),
        ])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            modules: self.modules.iter().map(|m| m.scaled(factor)).collect(),
        }
    }

    /// Structural checks: nonempty, finite positive dimensions, holes planar
    /// and overlapping some part.
    pub fn validate(&self) -> Result<()> {
        if self.modules.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for (i, m) in self.modules.iter().enumerate() {
            m.validate(i)?;
        }
        Ok(())
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.modules
            .iter()
            .map(|m| m.signed_distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Quadrature point cloud over an aperture.
///
/// Points are sorted lexicographically by `x`, then `z`. After
/// [`project_aperture`](super::project_aperture) they no longer lie in the
/// xz-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledAperture {
    pub points: Vec<Vec3>,
    /// Quadrature weight per point: m² for planar parts, m for segments.
    pub weights: Vec<f64>,
    /// Index of the module each point belongs to.
    pub module: Vec<usize>,
    pub spacing: f64,
}

impl SampledAperture {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn module_count(&self) -> usize {
        self.module.iter().max().map_or(0, |m| m + 1)
    }

    /// Points belonging to module `n`, in the same order.
    pub fn module_subset(&self, n: usize) -> SampledAperture {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.module[i] == n).collect();
        SampledAperture {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            weights: idx.iter().map(|&i| self.weights[i]).collect(),
            module: idx.iter().map(|_| n).collect(),
            spacing: self.spacing,
        }
    }

    /// Contiguous sub-range of points, used for chunked assembly.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SampledAperture {
        SampledAperture {
            points: self.points[range.clone()].to_vec(),
            weights: self.weights[range.clone()].to_vec(),
            module: self.module[range].to_vec(),
            spacing: self.spacing,
        }
    }

    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (p, q) = (&self.points[a], &self.points[b]);
            p.x.total_cmp(&q.x)
                .then(p.z.total_cmp(&q.z))
                .then(p.y.total_cmp(&q.y))
                .then(self.module[a].cmp(&self.module[b]))
        });
        self.points = order.iter().map(|&i| self.points[i]).collect();
        self.weights = order.iter().map(|&i| self.weights[i]).collect();
        self.module = order.iter().map(|&i| self.module[i]).collect();
    }
}

fn lift(p: Point2) -> Vec3 {
    Vec3::new(p.x, 0.0, p.y)
}

struct ModuleSamples {
    points: Vec<Point2>,
    weights: Vec<f64>,
}

fn sample_planar(module: &ApertureModule, h: f64, out: &mut ModuleSamples) {
    if !module.parts.iter().any(Shape::is_planar) {
        return;
    }
    let (lo, hi) = module
        .parts
        .iter()
        .filter(|s| s.is_planar())
        .map(Shape::bounding_box)
        .fold(
            (
                Point2::new(f64::INFINITY, f64::INFINITY),
                Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), (a, b)| (lo.inf(&a), hi.sup(&b)),
        );
    let (i0, i1) = ((lo.x / h).floor() as i64, (hi.x / h).ceil() as i64);
    let (j0, j1) = ((lo.y / h).floor() as i64, (hi.y / h).ceil() as i64);
    let half_diag = h * std::f64::consts::FRAC_1_SQRT_2;
    let n = COVERAGE_SUBSAMPLES;
    let cell_area = h * h;

    for i in i0..i1 {
        for j in j0..j1 {
            let center = Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let d = module.planar_distance(center);
            if d <= -half_diag {
                out.points.push(center);
                out.weights.push(cell_area);
                continue;
            }
            if d >= half_diag {
                continue;
            }
            // Boundary cell: estimate the covered fraction.
            let mut inside = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let s = Point2::new(
                        (i as f64 + (a as f64 + 0.5) / n as f64) * h,
                        (j as f64 + (b as f64 + 0.5) / n as f64) * h,
                    );
                    if module.planar_distance(s) <= 0.0 {
                        inside.push(s);
                    }
                }
            }
            if inside.is_empty() {
                continue;
            }
            let weight = cell_area * inside.len() as f64 / (n * n) as f64;
            let point = if d <= 0.0 {
                center
            } else {
                let centroid = inside.iter().sum::<Point2>() / inside.len() as f64;
                if module.planar_distance(centroid) <= 0.0 {
                    centroid
                } else {
                    *inside
                        .iter()
                        .min_by(|p, q| {
                            (*p - centroid)
                                .norm_squared()
                                .total_cmp(&(*q - centroid).norm_squared())
                        })
                        .expect("nonempty")
                }
            };
            out.points.push(point);
            out.weights.push(weight);
        }
    }
}

fn sample_linear(module: &ApertureModule, h: f64, out: &mut ModuleSamples) {
    for part in &module.parts {
        match *part {
            Shape::Segment { start, end } => {
                let a = Point2::new(start[0], start[1]);
                let b = Point2::new(end[0], end[1]);
                let len = (b - a).norm();
                let n = ((len / h) - 1e-9).ceil().max(1.0) as usize;
                let step = len / n as f64;
                for k in 0..=n {
                    let p = a + (b - a) * (k as f64 / n as f64);
                    if module.in_hole(p) {
                        continue;
                    }
                    let w = if k == 0 || k == n { 0.5 * step } else { step };
                    out.points.push(p);
                    out.weights.push(w);
                }
            }
            Shape::Point { at } => {
                let p = Point2::new(at[0], at[1]);
                if !module.in_hole(p) {
                    out.points.push(p);
                    out.weights.push(h * h);
                }
            }
            _ => {}
        }
    }
}

fn sample_module(module: &ApertureModule, index: usize, h: f64) -> Result<ModuleSamples> {
    let mut out = ModuleSamples {
        points: Vec::new(),
        weights: Vec::new(),
    };
    sample_planar(module, h, &mut out);
    sample_linear(module, h, &mut out);

    let total: f64 = out.weights.iter().sum();
    let only_points = module
        .parts
        .iter()
        .all(|s| matches!(s, Shape::Point { .. }));
    if only_points || total >= 0.25 * h * h {
        return Ok(out);
    }

    // Regions smaller than a quarter cell collapse to a point source.
    if total > 0.0 {
        let centroid = out
            .points
            .iter()
            .zip(&out.weights)
            .map(|(p, w)| p * *w)
            .sum::<Point2>()
            / total;
        let nearest = *out
            .points
            .iter()
            .min_by(|p, q| {
                (*p - centroid)
                    .norm_squared()
                    .total_cmp(&(*q - centroid).norm_squared())
            })
            .expect("nonempty");
        return Ok(ModuleSamples {
            points: vec![nearest],
            weights: vec![total],
        });
    }
    for part in &module.parts {
        let r = part.reference_point();
        if module.signed_distance(r) <= 0.0 {
            let w = if part.is_planar() {
                part.measure()
            } else {
                h * h
            };
            return Ok(ModuleSamples {
                points: vec![r],
                weights: vec![w],
            });
        }
    }
    Err(Error::DegenerateAperture(format!(
        "module {index} is empty after clipping"
    )))
}

/// Grid quadrature over `region` at the given `spacing`.
///
/// Cells lie on a global lattice with edges at integer multiples of the
/// spacing. Interior cells carry weight `spacing²`; boundary cells carry their
/// covered fraction of it and a point inside the region. Segments are sampled
/// with trapezoidal weights at a step no larger than the spacing. A module
/// whose total weight is below `(spacing/2)²` becomes a single point source.
pub fn sample_aperture(region: &ApertureRegion, spacing: f64) -> Result<SampledAperture> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::param("spacing", "must be positive and finite"));
    }
    region.validate()?;

    let mut sampled = SampledAperture {
        points: Vec::new(),
        weights: Vec::new(),
        module: Vec::new(),
        spacing,
    };
    for (index, module) in region.modules.iter().enumerate() {
        let s = sample_module(module, index, spacing)?;
        check_disjoint(region, index, &s.points)?;
        sampled.points.extend(s.points.iter().map(|p| lift(*p)));
        sampled.weights.extend(s.weights);
        sampled.module.extend(std::iter::repeat_n(index, s.points.len()));
    }
    sampled.sort();
    Ok(sampled)
}

fn check_disjoint(region: &ApertureRegion, index: usize, points: &[Point2]) -> Result<()> {
    for (j, other) in region.modules.iter().enumerate() {
        if j == index || !other.parts.iter().any(Shape::is_planar) {
            continue;
        }
        let tol = 1e-9 * other.scale();
        if points.iter().any(|p| other.planar_distance(*p) < -tol) {
            return Err(Error::InvalidGeometry(format!(
                "modules {index} and {j} overlap"
            )));
        }
    }
    Ok(())
}

/// Lexicographic `(x, z)` ordering used for sampled point lists.
pub fn point_order(a: &Vec3, b: &Vec3) -> Ordering {
    a.x.total_cmp(&b.x).then(a.z.total_cmp(&b.z))
}
