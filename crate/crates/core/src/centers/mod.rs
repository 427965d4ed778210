//! Triangle centers from trilinear coordinates, derived triangles, and the
//! Brocard points.

mod expr;
mod registry;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::conic::Point2;
use crate::error::{GeometryError, Result};
use crate::triangle::Triangle;

pub use expr::{TrilinearExpr, SYMBOLS};
pub use registry::{default_registry, CenterRegistry, CenterSpec, REQUIRED_CENTERS};

/// `(u·s₁·P₁ + v·s₂·P₂ + w·s₃·P₃)/(u·s₁ + v·s₂ + w·s₃)`.
pub fn trilinear_to_cartesian(t: &Triangle, u: f64, v: f64, w: f64) -> Result<Point2> {
    let s = t.sides();
    let weights = [u * s[0], v * s[1], w * s[2]];
    let total: f64 = weights.iter().sum();
    let magnitude: f64 = weights.iter().map(|x| x.abs()).sum();
    if !total.is_finite() || total.abs() <= 1e-12 * magnitude || magnitude == 0.0 {
        return Err(GeometryError::Infinity);
    }
    let [p1, p2, p3] = t.vertices;
    let p = (p1 * weights[0] + p2 * weights[1] + p3 * weights[2]) * (1.0 / total);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(GeometryError::Infinity)
    }
}

/// `X_k` of `t` from the built-in registry.
pub fn center(t: &Triangle, k: u32) -> Result<Point2> {
    default_registry().center(t, k)
}

/// Triangle whose vertices are the excenters; the excenter opposite `Pᵢ`
/// comes `i`-th.
pub fn excentral_triangle(t: &Triangle) -> Result<Triangle> {
    let e1 = trilinear_to_cartesian(t, -1.0, 1.0, 1.0)?;
    let e2 = trilinear_to_cartesian(t, 1.0, -1.0, 1.0)?;
    let e3 = trilinear_to_cartesian(t, 1.0, 1.0, -1.0)?;
    Triangle::new(e1, e2, e3)
}

/// Feet of the altitudes; the foot from `Pᵢ` comes `i`-th. Rejects right
/// triangles, whose orthic triangle collapses.
pub fn orthic_triangle(t: &Triangle) -> Result<Triangle> {
    if t
        .angles()
        .iter()
        .any(|&a| (a - FRAC_PI_2).abs() < 1e-9)
    {
        return Err(GeometryError::DegenerateTriangle(
            "right triangle has no orthic triangle".to_string(),
        ));
    }
    let v = t.vertices;
    let foot = |i: usize| {
        let (p, q, r) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
        let d = r - q;
        q + d * ((p - q).dot(d) / d.norm_sq())
    };
    Triangle::new(foot(0), foot(1), foot(2))
}

/// The two Brocard points `(Ω₁, Ω₂)` with trilinears `c/b : a/c : b/a` and
/// `b/c : c/a : a/b`.
pub fn brocard_points(t: &Triangle) -> Result<(Point2, Point2)> {
    let [a, b, c] = t.sides();
    let o1 = trilinear_to_cartesian(t, c / b, a / c, b / a)?;
    let o2 = trilinear_to_cartesian(t, b / c, c / a, a / b)?;
    Ok((o1, o2))
}

/// Which triangle a center is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Derived {
    #[default]
    Reference,
    Excentral,
    Orthic,
}

impl Derived {
    pub fn apply(self, t: &Triangle) -> Result<Triangle> {
        match self {
            Derived::Reference => Ok(*t),
            Derived::Excentral => excentral_triangle(t),
            Derived::Orthic => orthic_triangle(t),
        }
    }
}

impl std::str::FromStr for Derived {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reference" | "ref" => Ok(Derived::Reference),
            "excentral" | "exc" => Ok(Derived::Excentral),
            "orthic" => Ok(Derived::Orthic),
            other => Err(GeometryError::Parse(format!("unknown derived triangle `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{circumellipse_orbit, confocal_orbit, incircle_orbit, poristic_orbit};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn equilateral() -> Triangle {
        Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 0.5 * 3f64.sqrt()),
        )
        .unwrap()
    }

    fn right_345() -> Triangle {
        Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(0.0, 3.0),
        )
        .unwrap()
    }

    fn triangle_from(c: [f64; 6]) -> Option<Triangle> {
        let t = Triangle::new(
            Point2::new(c[0], c[1]),
            Point2::new(c[2], c[3]),
            Point2::new(c[4], c[5]),
        )
        .ok()?;
        let m = t.metrics();
        (m.area > 0.02 * m.perimeter * m.perimeter).then_some(t)
    }

    fn circumcenter_oracle(t: &Triangle) -> Point2 {
        let [p, q, r] = t.vertices;
        let d = 2.0 * (p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y));
        let (p2, q2, r2) = (p.norm_sq(), q.norm_sq(), r.norm_sq());
        Point2::new(
            (p2 * (q.y - r.y) + q2 * (r.y - p.y) + r2 * (p.y - q.y)) / d,
            (p2 * (r.x - q.x) + q2 * (p.x - r.x) + r2 * (q.x - p.x)) / d,
        )
    }

    #[test]
    fn conversion_examples() {
        let eq = equilateral();
        let c = trilinear_to_cartesian(&eq, 1.0, 1.0, 1.0).unwrap();
        assert!(c.dist(eq.centroid()) < 1e-15);
        let t = right_345();
        let incenter = trilinear_to_cartesian(&t, 1.0, 1.0, 1.0).unwrap();
        assert!(incenter.dist(Point2::new(1.0, 1.0)) < 1e-14);
        let s = t.sides();
        let g = trilinear_to_cartesian(&t, 1.0 / s[0], 1.0 / s[1], 1.0 / s[2]).unwrap();
        assert!(g.dist(t.centroid()) < 1e-14);
        assert_eq!(
            trilinear_to_cartesian(&t, 0.0, 0.0, 0.0),
            Err(GeometryError::Infinity)
        );
    }

    #[test]
    fn stationary_centers() {
        for i in 0..40 {
            let t = 0.1 + i as f64 * 0.15;
            assert!(center(&incircle_orbit(2.0, 1.0, t).unwrap(), 1).unwrap().norm() < 1e-12);
            assert!(center(&circumellipse_orbit(2.0, 1.0, t).unwrap(), 3).unwrap().norm() < 1e-12);
        }
        let x9 = center(&confocal_orbit(2.0, 1.0, 0.3).unwrap(), 9).unwrap();
        for i in 0..40 {
            let t = 0.3 + i as f64 * 0.15;
            let p = center(&confocal_orbit(2.0, 1.0, t).unwrap(), 9).unwrap();
            assert!(p.dist(x9) < 1e-10);
        }
    }

    #[test]
    fn unknown_center() {
        assert_eq!(center(&equilateral(), 4000), Err(GeometryError::UnknownCenter(4000)));
    }

    #[test]
    fn excentral_examples() {
        let eq = equilateral();
        let ex = excentral_triangle(&eq).unwrap();
        assert_abs_diff_eq!(
            ex.metrics().circumradius,
            2.0 * eq.metrics().circumradius,
            epsilon = 1e-14
        );
        for i in 0..10 {
            let t = poristic_orbit(1.5, 2.0 / 3.0, 0.2 + 0.5 * i as f64).unwrap();
            let ex = excentral_triangle(&t).unwrap();
            let x40 = center(&t, 40).unwrap();
            for v in ex.vertices {
                assert_abs_diff_eq!(v.dist(x40), 3.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn orthic_examples() {
        for i in 0..20 {
            let t = circumellipse_orbit(2.0, 1.0, 0.05 + 0.3 * i as f64).unwrap();
            let m = orthic_triangle(&t).unwrap().metrics();
            assert_abs_diff_eq!(m.circumradius, 1.5, epsilon = 1e-9);
            assert_abs_diff_eq!(m.inradius, 2.0 / 3.0, epsilon = 1e-9);
        }
        let eq = equilateral();
        let o = orthic_triangle(&eq).unwrap();
        for i in 0..3 {
            let mid = eq.vertices[(i + 1) % 3].lerp(eq.vertices[(i + 2) % 3], 0.5);
            assert!(o.vertices[i].dist(mid) < 1e-15);
        }
        assert!(orthic_triangle(&right_345()).is_err());
    }

    #[test]
    fn brocard_point_examples() {
        let eq = equilateral();
        let (o1, o2) = brocard_points(&eq).unwrap();
        assert!(o1.dist(eq.centroid()) < 1e-14 && o2.dist(eq.centroid()) < 1e-14);
    }

    #[test]
    fn excenter_165_and_40_are_excentral_centroid_and_circumcenter() {
        let t = Triangle::new(
            Point2::new(0.3, -0.2),
            Point2::new(4.0, 0.7),
            Point2::new(1.1, 2.9),
        )
        .unwrap();
        let ex = excentral_triangle(&t).unwrap();
        assert!(center(&t, 165).unwrap().dist(ex.centroid()) < 1e-12);
        assert!(center(&t, 40).unwrap().dist(circumcenter_oracle(&ex)) < 1e-12);
        assert!(center(&ex, 4).unwrap().dist(center(&t, 1).unwrap()) < 1e-12);
    }

    #[test]
    fn midpoint_and_complement_centers() {
        let t = Triangle::new(
            Point2::new(0.3, -0.2),
            Point2::new(4.0, 0.7),
            Point2::new(1.1, 2.9),
        )
        .unwrap();
        let x = |k| center(&t, k).unwrap();
        let g = t.centroid();
        // complement: G + (G − P)/2, anticomplement: G + 2(G − P)
        let complement = |p: Point2| g + (g - p) * 0.5;
        let anticomplement = |p: Point2| g + (g - p) * 2.0;
        assert!(x(140).dist(x(3).lerp(x(5), 0.5)) < 1e-12);
        assert!(x(5).dist(x(3).lerp(x(4), 0.5)) < 1e-12);
        assert!(x(10).dist(complement(x(1))) < 1e-12);
        assert!(x(142).dist(complement(x(9))) < 1e-12);
        assert!(x(11).dist(complement(x(100))) < 1e-10);
        assert!(x(119).dist(complement(x(104))) < 1e-10);
        assert!(x(8).dist(anticomplement(x(1))) < 1e-12);
        assert!(x(144).dist(anticomplement(x(7))) < 1e-12);
        assert!(x(145).dist(anticomplement(x(8))) < 1e-12);
        assert!(x(149).dist(anticomplement(x(100))) < 1e-10);
        assert!(x(153).dist(anticomplement(x(104))) < 1e-10);
        assert!(x(20).dist(anticomplement(x(4))) < 1e-12);
        assert!(x(80).dist(x(11) * 2.0 - x(1)) < 1e-10);
        assert!(x(39).dist({
            let (o1, o2) = brocard_points(&t).unwrap();
            o1.lerp(o2, 0.5)
        }) < 1e-12);
    }

    #[test]
    fn circumcircle_points() {
        let t = Triangle::new(
            Point2::new(0.3, -0.2),
            Point2::new(4.0, 0.7),
            Point2::new(1.1, 2.9),
        )
        .unwrap();
        let o = circumcenter_oracle(&t);
        let big_r = t.metrics().circumradius;
        for k in [99, 100, 104, 110] {
            assert_abs_diff_eq!(center(&t, k).unwrap().dist(o), big_r, epsilon = 1e-10);
        }
        assert!(center(&t, 100).unwrap().lerp(center(&t, 104).unwrap(), 0.5).dist(o) < 1e-10);
    }

    #[test]
    fn fermat_point_angles() {
        let t = Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(4.0, 0.0),
            Point2::new(1.5, 2.0),
        )
        .unwrap();
        let f = center(&t, 13).unwrap();
        let v = t.vertices;
        for i in 0..3 {
            let u = v[i] - f;
            let w = v[(i + 1) % 3] - f;
            let ang = u.cross(w).abs().atan2(u.dot(w));
            assert_abs_diff_eq!(ang, 2.0 * std::f64::consts::PI / 3.0, epsilon = 1e-12);
        }
        // isodynamic points are isogonal conjugates of the isogonic centers,
        // and the two isodynamic points are inverse in the circumcircle
        let o = circumcenter_oracle(&t);
        let big_r = t.metrics().circumradius;
        let (p15, p16) = (center(&t, 15).unwrap(), center(&t, 16).unwrap());
        assert_abs_diff_eq!(p15.dist(o) * p16.dist(o), big_r * big_r, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn similarity_equivariance(
            c in proptest::array::uniform6(-3.0f64..3.0),
            scale in 0.1f64..10.0,
            angle in -3.2f64..3.2,
            dx in -5.0f64..5.0,
            dy in -5.0f64..5.0,
        ) {
            let Some(t) = triangle_from(c) else { return Ok(()); };
            let sigma = |p: Point2| p.rotate(angle) * scale + Point2::new(dx, dy);
            let image = t.map(sigma).unwrap();
            let reg = default_registry();
            for k in reg.indices() {
                let (Ok(p), Ok(q)) = (reg.center(&t, k), reg.center(&image, k)) else { continue; };
                let expect = sigma(p);
                let norm = 1.0 + expect.norm();
                if norm > 1e6 { continue; }
                prop_assert!(q.dist(expect) < 1e-10 * norm * scale.max(1.0), "X{} {} vs {}", k, q, expect);
            }
        }

        #[test]
        fn centroid_and_euler_line(c in proptest::array::uniform6(-3.0f64..3.0)) {
            let Some(t) = triangle_from(c) else { return Ok(()); };
            let x2 = center(&t, 2).unwrap();
            prop_assert!(x2.dist(t.centroid()) < 1e-12);
            let x3 = center(&t, 3).unwrap();
            let x4 = center(&t, 4).unwrap();
            prop_assert!((x4 - x2).cross(x3 - x2).abs() < 1e-10 * (1.0 + (x4 - x2).norm_sq()));
            prop_assert!((x2.dist(x4) - 2.0 * x2.dist(x3)).abs() < 1e-10 * (1.0 + x2.dist(x4)));
            let (o1, o2) = brocard_points(&t).unwrap();
            let omega = t.metrics().brocard_angle;
            let v = t.vertices;
            let ang = |from: Point2, to: Point2, x: Point2| {
                let u = to - from;
                let w = x - from;
                u.cross(w).abs().atan2(u.dot(w))
            };
            for o in [o1, o2] {
                let leading = (0..3).all(|i| (ang(v[i], v[(i + 1) % 3], o) - omega).abs() < 1e-9);
                let trailing = (0..3).all(|i| (ang(v[(i + 1) % 3], v[i], o) - omega).abs() < 1e-9);
                prop_assert!(leading || trailing);
            }
        }

        #[test]
        fn orthic_centers(c in proptest::array::uniform6(-3.0f64..3.0)) {
            let Some(t) = triangle_from(c) else { return Ok(()); };
            prop_assume!(t.is_acute());
            let h = orthic_triangle(&t).unwrap();
            prop_assert!(center(&t, 4).unwrap().dist(center(&h, 1).unwrap()) < 1e-9);
            prop_assert!(center(&t, 5).unwrap().dist(center(&h, 3).unwrap()) < 1e-9);
            let ex = excentral_triangle(&t).unwrap();
            let back = orthic_triangle(&ex).unwrap();
            for p in t.vertices {
                prop_assert!(back.vertices.iter().any(|q| q.dist(p) < 1e-9));
            }
        }
    }
}
