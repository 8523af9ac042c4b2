use serde::{Deserialize, Serialize};

use super::Point2;
use crate::{Error, Result};

/// Primitive shape in the aperture plane. Coordinates are `(x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Axis-aligned rectangle; `size` is `[extent along x, extent along z]`.
    Rectangle { center: [f64; 2], size: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    /// One-dimensional aperture between two points.
    Segment { start: [f64; 2], end: [f64; 2] },
    /// Isotropic point source.
    Point { at: [f64; 2] },
}

/// Boundary piece of a shape, used when searching for extreme distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Curve {
    Line { a: Point2, b: Point2 },
    Circle { center: Point2, radius: f64 },
}

fn p2(v: [f64; 2]) -> Point2 {
    Point2::new(v[0], v[1])
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

impl Shape {
    pub fn rectangle(center: [f64; 2], width: f64, height: f64) -> Self {
        Shape::Rectangle {
            center,
            size: [width, height],
        }
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        Shape::Disk { center, radius }
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64) -> Self {
        Shape::Annulus {
            center,
            inner,
            outer,
        }
    }

    /// Segment along the x axis between `x0` and `x1`.
    pub fn x_segment(x0: f64, x1: f64) -> Self {
        Shape::Segment {
            start: [x0, 0.0],
            end: [x1, 0.0],
        }
    }

    pub fn point(x: f64, z: f64) -> Self {
        Shape::Point { at: [x, z] }
    }

    /// True for shapes with nonzero area.
    pub fn is_planar(&self) -> bool {
        matches!(
            self,
            Shape::Rectangle { .. } | Shape::Disk { .. } | Shape::Annulus { .. }
        )
    }

    /// Area for planar shapes, length for segments, zero for points.
    pub fn measure(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Shape::Rectangle { size, .. } => size[0] * size[1],
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            Shape::Segment { start, end } => (p2(end) - p2(start)).norm(),
            Shape::Point { .. } => 0.0,
        }
    }

    /// Signed distance: negative inside planar shapes, zero on their boundary.
    /// One-dimensional shapes return the (non-negative) distance to the shape.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        match *self {
            Shape::Rectangle { center, size } => {
                let d = (p - p2(center)).abs() - Point2::new(size[0], size[1]) * 0.5;
                let outside = Point2::new(d.x.max(0.0), d.y.max(0.0)).norm();
                outside + d.x.max(d.y).min(0.0)
            }
            Shape::Disk { center, radius } => (p - p2(center)).norm() - radius,
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = (p - p2(center)).norm();
                (r - outer).max(inner - r)
            }
            Shape::Segment { start, end } => segment_distance(p, p2(start), p2(end)),
            Shape::Point { at } => (p - p2(at)).norm(),
        }
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match *self {
            Shape::Rectangle { center, size } => {
                let c = p2(center);
                let h = Point2::new(size[0], size[1]) * 0.5;
                (c - h, c + h)
            }
            Shape::Disk { center, radius: r }
            | Shape::Annulus {
                center, outer: r, ..
            } => {
                let c = p2(center);
                (c - Point2::new(r, r), c + Point2::new(r, r))
            }
            Shape::Segment { start, end } => {
                let (a, b) = (p2(start), p2(end));
                (a.inf(&b), a.sup(&b))
            }
            Shape::Point { at } => (p2(at), p2(at)),
        }
    }

    /// A point that belongs to the shape.
    pub fn reference_point(&self) -> Point2 {
        match *self {
            Shape::Rectangle { center, .. } | Shape::Disk { center, .. } => p2(center),
            Shape::Annulus {
                center,
                inner,
                outer,
            } => p2(center) + Point2::new(0.5 * (inner + outer), 0.0),
            Shape::Segment { start, end } => (p2(start) + p2(end)) * 0.5,
            Shape::Point { at } => p2(at),
        }
    }

    pub(crate) fn boundary(&self) -> Vec<Curve> {
        match *self {
            Shape::Rectangle { center, size } => {
                let c = p2(center);
                let (hx, hz) = (0.5 * size[0], 0.5 * size[1]);
                let corners = [
                    c + Point2::new(-hx, -hz),
                    c + Point2::new(hx, -hz),
                    c + Point2::new(hx, hz),
                    c + Point2::new(-hx, hz),
                ];
                (0..4)
                    .map(|i| Curve::Line {
                        a: corners[i],
                        b: corners[(i + 1) % 4],
                    })
                    .collect()
            }
            Shape::Disk { center, radius } => vec![Curve::Circle {
                center: p2(center),
                radius,
            }],
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                let mut v = vec![Curve::Circle {
                    center: p2(center),
                    radius: outer,
                }];
                if inner > 0.0 {
                    v.push(Curve::Circle {
                        center: p2(center),
                        radius: inner,
                    });
                }
                v
            }
            Shape::Segment { start, end } => vec![Curve::Line {
                a: p2(start),
                b: p2(end),
            }],
            Shape::Point { at } => vec![Curve::Line {
                a: p2(at),
                b: p2(at),
            }],
        }
    }

    /// Same shape with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: [f64; 2]| [v[0] * factor, v[1] * factor];
        match *self {
            Shape::Rectangle { center, size } => Shape::Rectangle {
                center: s(center),
                size: s(size),
            },
            Shape::Disk { center, radius } => Shape::Disk {
                center: s(center),
                radius: radius * factor,
            },
            Shape::Annulus {
                center,
                inner,
                outer,
            } => Shape::Annulus {
                center: s(center),
                inner: inner * factor,
                outer: outer * factor,
            },
            Shape::Segment { start, end } => Shape::Segment {
                start: s(start),
                end: s(end),
            },
            Shape::Point { at } => Shape::Point { at: s(at) },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite2 = |v: [f64; 2]| v[0].is_finite() && v[1].is_finite();
        let bad = |msg: &str| Err(Error::InvalidGeometry(format!("{msg}: {self:?}")));
        match *self {
            Shape::Rectangle { center, size } => {
                if !finite2(center) || !finite2(size) {
                    return bad("non-finite rectangle");
                }
                if size[0] <= 0.0 || size[1] <= 0.0 {
                    return bad("rectangle size must be positive");
                }
            }
            Shape::Disk { center, radius } => {
                if !finite2(center) || !radius.is_finite() || radius <= 0.0 {
                    return bad("disk radius must be positive and finite");
                }
            }
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                if !finite2(center) || !inner.is_finite() || !outer.is_finite() {
                    return bad("non-finite annulus");
                }
                if inner < 0.0 || outer <= inner {
                    return bad("annulus needs 0 <= inner < outer");
                }
            }
            Shape::Segment { start, end } => {
                if !finite2(start) || !finite2(end) {
                    return bad("non-finite segment");
                }
                if start == end {
                    return bad("segment endpoints coincide");
                }
            }
            Shape::Point { at } => {
                if !finite2(at) {
                    return bad("non-finite point");
                }
            }
        }
        Ok(())
    }
}
