//! 3-periodic vertex parametrizations, a generic Poncelet iterator, the
//! poristic and Brocard constructions, and caustic tuning for N-periodics.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::centers::brocard_points;
use crate::conic::{AxisEllipse, ConicPair, Family, PairParams, Point2};
use crate::error::{domain, require_positive, GeometryError, Result};
use crate::triangle::Triangle;

/// Tolerance for "`P` lies on the outer conic" in [`poncelet_step`].
pub const ON_OUTER_TOL: f64 = 1e-10;

/// Which of the two tangents through a vertex continues the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Counter-clockwise about the inner conic's center.
    Forward,
    Backward,
}

/// Closed Poncelet polygon with its closure error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGonOrbit {
    pub vertices: Vec<Point2>,
    /// `|P_N − P_0|` after `N` steps, relative to the pair's scale.
    pub closure_residual: f64,
}

fn degenerate(msg: impl Into<String>) -> GeometryError {
    GeometryError::DegenerateParameter(msg.into())
}

fn check_quotient(q: f64, scale: f64, what: &str) -> Result<()> {
    if q.abs() <= 1e-12 * scale || !q.is_finite() {
        Err(degenerate(format!("{what} vanishes")))
    } else {
        Ok(())
    }
}

/// Billiard 3-periodic with first vertex `(a cos t, b sin t)`.
pub fn confocal_orbit(a: f64, b: f64, t: f64) -> Result<Triangle> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    if a <= b {
        return Err(domain(format!("confocal orbit needs a > b, got {a}, {b}")));
    }
    let (x1, y1) = (a * t.cos(), b * t.sin());
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let c2 = a2 - b2;
    let d1 = a2 * b2 / c2;
    let d2 = b4 * x1 * x1 + a4 * y1 * y1;
    let delta = (a4 + b4 - a2 * b2).sqrt();
    let delta1_sq = 2.0 * delta - a2 - b2;
    // cos²α and sin α cos α of the chord angle with the normal at P₁
    let k1 = (d1 * d1 * delta1_sq / d2).clamp(0.0, 1.0);
    let k2 = (k1 * (1.0 - k1)).sqrt();

    let (x1_2, y1_2) = (x1 * x1, y1 * y1);
    let (x1_3, y1_3) = (x1_2 * x1, y1_2 * y1);
    let a6 = a4 * a2;
    let b6 = b4 * b2;
    let common_x = b4 * (a2 - (a2 + b2) * k1) * x1_3 + a4 * ((a2 - 3.0 * b2) * k1 + b2) * x1 * y1_2;
    let odd_x = 2.0 * a4 * b2 * k2 * x1_2 * y1 + 2.0 * a6 * k2 * y1_3;
    let common_y = b4 * ((b2 - 3.0 * a2) * k1 + a2) * x1_2 * y1 - a4 * ((a2 + b2) * k1 - b2) * y1_3;
    let odd_y = 2.0 * b6 * k2 * x1_3 + 2.0 * a2 * b4 * k2 * x1 * y1_2;
    let q_even = b4 * (a2 - c2 * k1) * x1_2 + a4 * (b2 + c2 * k1) * y1_2;
    let q_odd = 2.0 * a2 * b2 * c2 * k2 * x1 * y1;

    let (x2, y2, q2) = (common_x - odd_x, common_y + odd_y, q_even - q_odd);
    let (x3, y3, q3) = (common_x + odd_x, common_y - odd_y, q_even + q_odd);
    let scale = a4 * a4;
    check_quotient(q2, scale, "q₂")?;
    check_quotient(q3, scale, "q₃")?;
    Triangle::new(
        Point2::new(x1, y1),
        Point2::new(x2 / q2, y2 / q2),
        Point2::new(x3 / q3, y3 / q3),
    )
}

/// 3-periodic of the ellipse `(a, b)` about the incircle `ab/(a+b)`.
pub fn incircle_orbit(a: f64, b: f64, t: f64) -> Result<Triangle> {
    check_ab(a, b)?;
    let (x1, y1) = (a * t.cos(), b * t.sin());
    let (a2, b2) = (a * a, b * b);
    let k = (a2 * a * (a + 2.0 * b) * x1 * x1 + a2 * b * (2.0 * a + b) * y1 * y1).sqrt();
    let q2 = 2.0 * b2 * (a + b) * ((a2 - b2) * x1 * x1 + a2 * b2);
    let q3 = (b2 * a2 * a2 - y1 * y1 * a2 * a2 + 2.0 * a2 * b2 * b2 + a2 * b2 * x1 * x1
        - 2.0 * x1 * x1 * b2 * b2)
        * (a + b);
    let scale = a2 * a2 * a2 * a;
    check_quotient(q2, scale, "q₂")?;
    check_quotient(q3, scale, "q₃")?;
    let x2 = 2.0 * a2 * b2 * (-a2 * b * x1 + k * y1) / q2;
    let y2 = -2.0 * a * b2 * b * (a2 * b * y1 + k * x1) / q2;
    let x3 = -2.0 * a2 * b2 * (a2 * b * x1 + k * y1) / q3;
    let y3 = 2.0 * b2 * b * a * (-a2 * b * y1 + k * x1) / q3;
    Triangle::new(Point2::new(x1, y1), Point2::new(x2, y2), Point2::new(x3, y3))
}

/// 3-periodic of the circle `a + b` about the inellipse `(a, b)`.
pub fn circumellipse_orbit(a: f64, b: f64, t: f64) -> Result<Triangle> {
    check_ab(a, b)?;
    let big_r = a + b;
    let (x1, y1) = (big_r * t.cos(), big_r * t.sin());
    let (a2, b2) = (a * a, b * b);
    let sx = (a2 * a * (a + 2.0 * b) - (a2 - b2) * x1 * x1).sqrt();
    let sy = ((a2 - b2) * y1 * y1 + b2 * b * (2.0 * a + b)).sqrt();
    let dx = (b - a) * x1 * x1 + a2 * (a + b);
    let dy = (a - b) * y1 * y1 + b2 * (a + b);
    let scale = big_r * big_r * big_r;
    check_quotient(dx, scale, "k_x denominator")?;
    check_quotient(dy, scale, "k_y denominator")?;
    let (kx, ky) = (a / dx, b / dy);
    let x2 = (-b2 * x1 + y1 * sx) * kx;
    let y2 = -(y1 * a2 + x1 * sy) * ky;
    let x3 = -(b2 * x1 + y1 * sx) * kx;
    let y3 = (-y1 * a2 + x1 * sy) * ky;
    Triangle::new(Point2::new(x1, y1), Point2::new(x2, y2), Point2::new(x3, y3))
}

/// 3-periodic of the ellipse `(a, b)` about the homothetic `(a/2, b/2)`.
pub fn homothetic_orbit(a: f64, b: f64, t: f64) -> Result<Triangle> {
    check_ab(a, b)?;
    let (x1, y1) = (a * t.cos(), b * t.sin());
    let s3 = 3f64.sqrt();
    let p2 = Point2::new(
        (s3 * a * y1 - b * x1) / (2.0 * b),
        (-s3 * b * x1 - a * y1) / (2.0 * a),
    );
    let p3 = Point2::new(
        (-s3 * a * y1 - b * x1) / (2.0 * b),
        (s3 * b * x1 - a * y1) / (2.0 * a),
    );
    Triangle::new(Point2::new(x1, y1), p2, p3)
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    if a < b {
        return Err(domain(format!("expected a ≥ b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Next polygon vertex: the far intersection with the outer conic of the
/// tangent from `p` to the inner conic selected by `branch`.
pub fn poncelet_step(pair: &ConicPair, p: Point2, branch: Branch) -> Result<Point2> {
    let res = pair.outer.implicit_residual(p);
    if !(res.abs() <= ON_OUTER_TOL) {
        return Err(GeometryError::NotOnConic(res));
    }
    let (t_plus, t_minus) = pair.inner.tangent_points(p)?;
    let c = pair.inner.center;
    let forward = |q: Point2| (p - c).cross(q - c) > 0.0;
    let next_plus = pair.outer.second_intersection(p, t_plus - p);
    let next_minus = pair.outer.second_intersection(p, t_minus - p);
    let chosen = match (branch, forward(next_plus)) {
        (Branch::Forward, true) | (Branch::Backward, false) => next_plus,
        _ => next_minus,
    };
    if !chosen.is_finite() {
        return Err(degenerate("tangent does not meet the outer conic"));
    }
    Ok(chosen)
}

/// The `n`-step forward orbit starting at `start`, with its closure residual.
pub fn iterate_orbit(pair: &ConicPair, start: Point2, n: usize) -> Result<NGonOrbit> {
    let mut vertices = Vec::with_capacity(n);
    let mut p = start;
    for _ in 0..n {
        vertices.push(p);
        p = poncelet_step(pair, p, Branch::Forward)?;
    }
    Ok(NGonOrbit {
        vertices,
        closure_residual: p.dist(start) / pair.scale(),
    })
}

/// Orbit of `pair` whose first vertex is the outer conic's point at parameter `t`.
pub fn ngon_orbit(pair: &ConicPair, t: f64) -> Result<NGonOrbit> {
    iterate_orbit(pair, pair.outer.point_at(t), pair.period)
}

/// The family member at parameter `t`: closed forms for the canonical
/// concentric pairs, the generic iterator otherwise.
pub fn family_triangle(pair: &ConicPair, t: f64) -> Result<Triangle> {
    if pair.period != 3 {
        return Err(domain(format!(
            "pair carries {}-periodics, not triangles",
            pair.period
        )));
    }
    if let PairParams::Canonical { a, b } = pair.params {
        return match pair.family {
            Family::Confocal => confocal_orbit(a, b, t),
            Family::Incircle => incircle_orbit(a, b, t),
            Family::Circumellipse => circumellipse_orbit(a, b, t),
            Family::Homothetic => homothetic_orbit(a, b, t),
            Family::Poristic | Family::Brocard => generic_triangle(pair, t),
        };
    }
    generic_triangle(pair, t)
}

/// Vertices of the family member at `t`, triangle or `N`-gon.
pub fn family_polygon(pair: &ConicPair, t: f64) -> Result<Vec<Point2>> {
    if pair.period == 3 {
        Ok(family_triangle(pair, t)?.vertices.to_vec())
    } else {
        Ok(ngon_orbit(pair, t)?.vertices)
    }
}

fn generic_triangle(pair: &ConicPair, t: f64) -> Result<Triangle> {
    let orbit = ngon_orbit(pair, t)?;
    let v = &orbit.vertices;
    Triangle::new(v[0], v[1], v[2])
}

/// Triangle with circumcircle `R` at the origin and incircle `r` centered at
/// `(√(R(R−2r)), 0)`, first vertex `R(cos t, sin t)`.
pub fn poristic_orbit(big_r: f64, r: f64, t: f64) -> Result<Triangle> {
    generic_triangle(&ConicPair::poristic(big_r, r)?, t)
}

/// Triangle of the Brocard porism: circumcircle `R` at the origin, Brocard
/// angle `omega`, first vertex `R(cos t, sin t)`.
pub fn brocard_orbit(big_r: f64, omega: f64, t: f64) -> Result<Triangle> {
    generic_triangle(&brocard_pair(big_r, omega)?, t)
}

/// Isosceles triangle with apex `(0, R)` inscribed in the circle `R` whose
/// Brocard angle is `omega`; apex angle below `π/3`.
pub fn brocard_seed(big_r: f64, omega: f64) -> Result<Triangle> {
    require_positive("R", big_r)?;
    if !(omega > 0.0 && omega < PI / 6.0) {
        return Err(domain(format!(
            "Brocard angle must lie in (0, π/6), got {omega}"
        )));
    }
    // u = tan(A/2) solves 3u² − 2u·cot ω + 1 = 0 for the apex angle A
    let cot = 1.0 / omega.tan();
    let disc = (cot * cot - 3.0).max(0.0);
    let u = (cot - disc.sqrt()) / 3.0;
    let apex = 2.0 * u.atan();
    Triangle::new(
        Point2::new(0.0, big_r),
        Point2::polar(big_r, -PI / 2.0 - apex),
        Point2::polar(big_r, -PI / 2.0 + apex),
    )
}

/// Circumcircle plus Brocard inellipse of the porism with angle `omega`,
/// derived from the isosceles seed: foci at its Brocard points, semi-minor
/// axis from the focal-distance product to a side.
pub fn brocard_pair(big_r: f64, omega: f64) -> Result<ConicPair> {
    let seed = brocard_seed(big_r, omega)?;
    let (f1, f2) = brocard_points(&seed)?;
    let center = f1.lerp(f2, 0.5);
    let c = 0.5 * f1.dist(f2);
    let [p1, p2, _] = seed.vertices;
    let dir = p2 - p1;
    let n = dir.perp() * (1.0 / dir.norm());
    let b2 = (n.dot(f1 - p1) * n.dot(f2 - p1)).abs();
    let semi_minor = b2.sqrt();
    let semi_major = (b2 + c * c).sqrt();
    // the seed is symmetric about the y-axis, so the foci share a y-coordinate
    let inner = AxisEllipse::new(Point2::new(0.0, center.y), semi_major, semi_minor)?;
    Ok(ConicPair {
        family: Family::Brocard,
        outer: AxisEllipse::circle(Point2::ORIGIN, big_r)?,
        inner,
        params: PairParams::Brocard { big_r, omega },
        period: 3,
    })
}

/// Inner conic of `family` with shape parameter `s`, for the outer `outer`.
fn tuned_inner(outer: &AxisEllipse, family: Family, s: f64) -> Result<(AxisEllipse, AxisEllipse)> {
    let (a, b) = (outer.a, outer.b);
    match family {
        Family::Incircle => Ok((*outer, AxisEllipse::circle(outer.center, s * a.min(b))?)),
        Family::Homothetic => Ok((*outer, AxisEllipse::new(outer.center, s * a, s * b)?)),
        Family::Confocal => {
            let lambda = s * b.min(a).powi(2);
            Ok((
                *outer,
                AxisEllipse::new(outer.center, (a * a - lambda).sqrt(), (b * b - lambda).sqrt())?,
            ))
        }
        Family::Circumellipse => {
            let circle = AxisEllipse::circle(outer.center, a + b)?;
            Ok((circle, AxisEllipse::new(outer.center, s * a, s * b)?))
        }
        Family::Poristic | Family::Brocard => Err(domain(format!(
            "caustic tuning is defined for the concentric families, not {family}"
        ))),
    }
}

/// Total forward advance of the outer-conic parameter over `n` steps from
/// the outer's rightmost point.
fn total_advance(pair: &ConicPair, n: usize) -> Result<(f64, f64)> {
    let start = pair.outer.point_at(0.0);
    let mut p = start;
    let mut total = 0.0;
    for _ in 0..n {
        let q = poncelet_step(pair, p, Branch::Forward)?;
        let step = (pair.outer.parameter_of(q) - pair.outer.parameter_of(p)).rem_euclid(TAU);
        total += step;
        p = q;
    }
    Ok((total, p.dist(start) / pair.scale()))
}

/// Bisects the inner conic's scale until the orbit from `(a, 0)` closes
/// after `n` steps with winding number one.
///
/// For `Circumellipse`, `outer` gives the shape `(a, b)` of the inner
/// ellipse; the outer circle is fixed at radius `a + b` and the inner ellipse
/// is scaled.
pub fn tune_caustic_for_closure(outer: &AxisEllipse, family: Family, n: usize) -> Result<ConicPair> {
    if n < 3 {
        return Err(domain(format!("need N ≥ 3, got {n}")));
    }
    let (lo0, hi0) = match family {
        Family::Incircle | Family::Homothetic => (1e-6, 1.0 - 1e-12),
        Family::Confocal => {
            if outer.a == outer.b {
                return Err(degenerate("confocal tuning needs a ≠ b"));
            }
            (1e-12, 1.0 - 1e-9)
        }
        Family::Circumellipse => (1e-6, (outer.a + outer.b) / outer.a.max(outer.b) * (1.0 - 1e-12)),
        _ => {
            tuned_inner(outer, family, 0.5)?;
            unreachable!()
        }
    };
    let make = |s: f64| -> Result<ConicPair> {
        let (o, i) = tuned_inner(outer, family, s)?;
        Ok(ConicPair::general(family, o, i, n))
    };
    let excess = |s: f64| -> Result<f64> { Ok(total_advance(&make(s)?, n)?.0 - TAU) };
    let (mut lo, mut hi) = (lo0, hi0);
    let f_lo = excess(lo)?;
    let f_hi = excess(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(GeometryError::NonConvergence(format!(
            "rotation number 1/{n} not bracketed"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = excess(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pair = make(0.5 * (lo + hi))?;
    let (_, closure) = total_advance(&pair, n)?;
    if closure > 1e-10 {
        return Err(GeometryError::NonConvergence(format!(
            "closure residual {closure:e} after bisection"
        )));
    }
    Ok(pair)
}
