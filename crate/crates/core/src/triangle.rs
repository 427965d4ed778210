//! Triangles and their elementary metrics.

use serde::{Deserialize, Serialize};

use crate::conic::Point2;
use crate::error::{GeometryError, Result};

/// Relative area (against the squared longest side) below which three
/// points are treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// Vertices `P₁, P₂, P₃`; side `sᵢ` is opposite `Pᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [Point2; 3],
}

impl Triangle {
    pub fn new(p1: Point2, p2: Point2, p3: Point2) -> Result<Self> {
        let t = Self {
            vertices: [p1, p2, p3],
        };
        if !(p1.is_finite() && p2.is_finite() && p3.is_finite()) {
            return Err(GeometryError::DegenerateTriangle(
                "non-finite vertex".to_string(),
            ));
        }
        let longest = t.sides().into_iter().fold(0.0, f64::max);
        if longest == 0.0 || t.signed_area().abs() <= COLLINEAR_TOL * longest * longest {
            return Err(GeometryError::DegenerateTriangle(
                "vertices are collinear".to_string(),
            ));
        }
        Ok(t)
    }

    pub fn from_array(v: [Point2; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// `(s₁, s₂, s₃) = (|P₂P₃|, |P₃P₁|, |P₁P₂|)`.
    pub fn sides(&self) -> [f64; 3] {
        let [p1, p2, p3] = self.vertices;
        [p2.dist(p3), p3.dist(p1), p1.dist(p2)]
    }

    /// Positive for counter-clockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        let [p1, p2, p3] = self.vertices;
        0.5 * (p2 - p1).cross(p3 - p1)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Interior angles `θᵢ` at `Pᵢ`.
    pub fn angles(&self) -> [f64; 3] {
        let v = self.vertices;
        std::array::from_fn(|i| {
            let p = v[i];
            let u = v[(i + 1) % 3] - p;
            let w = v[(i + 2) % 3] - p;
            u.cross(w).abs().atan2(u.dot(w))
        })
    }

    pub fn centroid(&self) -> Point2 {
        let [p1, p2, p3] = self.vertices;
        (p1 + p2 + p3) * (1.0 / 3.0)
    }

    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        Self::from_array(self.vertices.map(f))
    }

    pub fn is_acute(&self) -> bool {
        self.angles()
            .iter()
            .all(|&t| t < std::f64::consts::FRAC_PI_2)
    }

    pub fn metrics(&self) -> TriangleMetrics {
        metrics(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleMetrics {
    pub sides: [f64; 3],
    pub angles: [f64; 3],
    pub area: f64,
    pub perimeter: f64,
    pub semiperimeter: f64,
    pub inradius: f64,
    pub circumradius: f64,
    pub brocard_angle: f64,
    /// Sum of squared sidelengths.
    pub sum_sq_sides: f64,
}

pub fn metrics(t: &Triangle) -> TriangleMetrics {
    let sides = t.sides();
    let area = t.area();
    let perimeter = sides.iter().sum::<f64>();
    let semiperimeter = 0.5 * perimeter;
    let sum_sq_sides = sides.iter().map(|s| s * s).sum::<f64>();
    TriangleMetrics {
        sides,
        angles: t.angles(),
        area,
        perimeter,
        semiperimeter,
        inradius: area / semiperimeter,
        circumradius: sides[0] * sides[1] * sides[2] / (4.0 * area),
        brocard_angle: (4.0 * area).atan2(sum_sq_sides),
        sum_sq_sides,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    pub(crate) fn equilateral(side: f64) -> Triangle {
        Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(side, 0.0),
            Point2::new(0.5 * side, 0.5 * 3f64.sqrt() * side),
        )
        .unwrap()
    }

    #[test]
    fn equilateral_metrics() {
        let m = equilateral(1.0).metrics();
        assert_abs_diff_eq!(m.area, 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.brocard_angle, PI / 6.0, epsilon = 1e-15);
        let sum_cos: f64 = m.angles.iter().map(|a| a.cos()).sum();
        assert_abs_diff_eq!(sum_cos, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn right_triangle_metrics() {
        let t = Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(0.0, 3.0),
        )
        .unwrap();
        let m = t.metrics();
        // classical: r = (a + b − c)/2, R = c/2 for a right triangle
        assert_abs_diff_eq!(m.inradius, (3.0 + 4.0 - 5.0) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.circumradius, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(m.area, 6.0, epsilon = 1e-14);
        assert!(!t.is_acute() || m.angles.iter().any(|&a| (a - PI / 2.0).abs() < 1e-12));
    }

    #[test]
    fn collinear_rejected() {
        let r = Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(2.0, 2.0),
        );
        assert!(matches!(r, Err(GeometryError::DegenerateTriangle(_))));
    }

    proptest! {
        #[test]
        fn metric_identities(
            x1 in -3.0f64..3.0, y1 in -3.0f64..3.0,
            x2 in -3.0f64..3.0, y2 in -3.0f64..3.0,
            x3 in -3.0f64..3.0, y3 in -3.0f64..3.0,
        ) {
            let Ok(t) = Triangle::new(Point2::new(x1, y1), Point2::new(x2, y2), Point2::new(x3, y3)) else {
                return Ok(());
            };
            let m = t.metrics();
            prop_assume!(m.area > 1e-3 * m.perimeter * m.perimeter);
            let sum: f64 = m.angles.iter().sum();
            prop_assert!((sum - PI).abs() < 1e-12);
            prop_assert!((m.area - m.inradius * m.semiperimeter).abs() < 1e-12 * m.perimeter * m.perimeter);
            let prod = m.sides[0] * m.sides[1] * m.sides[2];
            prop_assert!((prod - 4.0 * m.circumradius * m.area).abs() < 1e-10 * prod);
            prop_assert!((m.brocard_angle.tan() - 4.0 * m.area / m.sum_sq_sides).abs() < 1e-12);
        }
    }
}
