//! Planar conic primitives and the concentric-pair closure relations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, GeometryError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3d cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Self {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Ellipse with axes parallel to the coordinate axes. `a` is the semi-axis
/// along x, `b` along y; either may be the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisEllipse {
    pub center: Point2,
    pub a: f64,
    pub b: f64,
}

impl AxisEllipse {
    pub fn new(center: Point2, a: f64, b: f64) -> Result<Self> {
        require_positive("semi-axis a", a)?;
        require_positive("semi-axis b", b)?;
        if !center.is_finite() {
            return Err(domain("ellipse center must be finite"));
        }
        Ok(Self { center, a, b })
    }

    pub fn centered(a: f64, b: f64) -> Result<Self> {
        Self::new(Point2::ORIGIN, a, b)
    }

    pub fn circle(center: Point2, radius: f64) -> Result<Self> {
        Self::new(center, radius, radius)
    }

    pub fn is_circle(&self) -> bool {
        (self.a - self.b).abs() <= 1e-15 * self.a.max(self.b)
    }

    pub fn major(&self) -> f64 {
        self.a.max(self.b)
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.center + Point2::new(self.a * t.cos(), self.b * t.sin())
    }

    /// Eccentric-anomaly parameter of `p` (exact for points on the ellipse).
    pub fn parameter_of(&self, p: Point2) -> f64 {
        let q = p - self.center;
        (q.y / self.b).atan2(q.x / self.a)
    }

    /// `(x/a)² + (y/b)² − 1` in the ellipse frame; dimensionless.
    pub fn implicit_residual(&self, p: Point2) -> f64 {
        let q = p - self.center;
        let u = q.x / self.a;
        let v = q.y / self.b;
        u * u + v * v - 1.0
    }

    /// Support distance of the ellipse about its own center along unit normal `n`.
    pub fn support(&self, n: Point2) -> f64 {
        (self.a * self.a * n.x * n.x + self.b * self.b * n.y * n.y).sqrt()
    }

    /// Distance of the line through `p` and `q` from the center minus the
    /// support distance along that line's normal; zero iff the line is tangent.
    pub fn tangency_residual(&self, p: Point2, q: Point2) -> f64 {
        let dir = q - p;
        let len = dir.norm();
        if len == 0.0 {
            return f64::INFINITY;
        }
        let n = dir.perp() * (1.0 / len);
        let h = n.dot(p - self.center).abs();
        h - self.support(n)
    }

    /// The two tangency points of the tangents through an exterior point,
    /// returned as (counter-clockwise side, clockwise side) in the unit-disk frame.
    pub fn tangent_points(&self, p: Point2) -> Result<(Point2, Point2)> {
        let q = p - self.center;
        let u = Point2::new(q.x / self.a, q.y / self.b);
        let m = u.norm_sq();
        if m <= 1.0 + 1e-14 {
            return Err(GeometryError::InsideCaustic);
        }
        let h = (m - 1.0).sqrt();
        let map = |w: Point2| self.center + Point2::new(self.a * w.x, self.b * w.y);
        let plus = (u + u.perp() * h) * (1.0 / m);
        let minus = (u - u.perp() * h) * (1.0 / m);
        Ok((map(plus), map(minus)))
    }

    /// Second intersection of the line `p + λ·dir` with this ellipse, given
    /// that `p` lies on it.
    pub fn second_intersection(&self, p: Point2, dir: Point2) -> Point2 {
        let q = p - self.center;
        let ia = 1.0 / (self.a * self.a);
        let ib = 1.0 / (self.b * self.b);
        let quad = dir.x * dir.x * ia + dir.y * dir.y * ib;
        let lin = q.x * dir.x * ia + q.y * dir.y * ib;
        p + dir * (-2.0 * lin / quad)
    }

    pub fn to_implicit(&self) -> ConicImplicit {
        let ia = 1.0 / (self.a * self.a);
        let ib = 1.0 / (self.b * self.b);
        let (cx, cy) = (self.center.x, self.center.y);
        ConicImplicit::new([
            ia,
            0.0,
            ib,
            -2.0 * cx * ia,
            -2.0 * cy * ib,
            cx * cx * ia + cy * cy * ib - 1.0,
        ])
    }
}

/// `A x² + B xy + C y² + D x + E y + F = 0`, stored with unit Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicImplicit {
    pub coeffs: [f64; 6],
}

/// Center, semi-axes and orientation of a central conic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicGeometry {
    pub center: Point2,
    /// Semi-axis along `angle`.
    pub semi_major: f64,
    /// Semi-axis perpendicular to `angle`.
    pub semi_minor: f64,
    /// Direction of the major axis, in `(-π/2, π/2]`.
    pub angle: f64,
}

impl ConicGeometry {
    /// Semi-axes along x and y, for conics whose axes are (close to) the
    /// coordinate axes.
    pub fn axis_aligned_semi_axes(&self) -> (f64, f64) {
        if self.angle.abs() < std::f64::consts::FRAC_PI_4 {
            (self.semi_major, self.semi_minor)
        } else {
            (self.semi_minor, self.semi_major)
        }
    }

    pub fn axis_ratio(&self) -> f64 {
        self.semi_major / self.semi_minor
    }
}

impl ConicImplicit {
    /// Normalizes to unit norm; the zero vector is kept as is.
    pub fn new(coeffs: [f64; 6]) -> Self {
        let n = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let coeffs = if n > 0.0 { coeffs.map(|c| c / n) } else { coeffs };
        Self { coeffs }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let [a, b, c, d, e, f] = self.coeffs;
        a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y + f
    }

    pub fn discriminant(&self) -> f64 {
        let [a, b, c, ..] = self.coeffs;
        b * b - 4.0 * a * c
    }

    /// Center, semi-axes and orientation; `None` unless the conic is a real ellipse.
    pub fn ellipse_geometry(&self) -> Option<ConicGeometry> {
        let [a, b, c, d, e, f] = self.coeffs;
        let det = 4.0 * a * c - b * b;
        if det <= 0.0 {
            return None;
        }
        let cx = (b * e - 2.0 * c * d) / det;
        let cy = (b * d - 2.0 * a * e) / det;
        let fc = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f;
        // eigen-decomposition of [[a, b/2], [b/2, c]]
        let mean = 0.5 * (a + c);
        let half_diff = 0.5 * (a - c);
        let rad = half_diff.hypot(0.5 * b);
        let (l_small, l_big) = (mean - rad, mean + rad);
        if fc == 0.0 || -fc / l_small <= 0.0 || -fc / l_big <= 0.0 {
            return None;
        }
        let semi_major = (-fc / l_small).sqrt();
        let semi_minor = (-fc / l_big).sqrt();
        // eigenvector of the smaller eigenvalue is the major-axis direction
        let mut angle = 0.5 * (-b).atan2(c - a);
        if angle <= -std::f64::consts::FRAC_PI_2 {
            angle += std::f64::consts::PI;
        }
        Some(ConicGeometry {
            center: Point2::new(cx, cy),
            semi_major,
            semi_minor,
            angle,
        })
    }
}

/// Number of monomials `x^i y^j` with `i + j ≤ 4`.
pub const QUARTIC_TERMS: usize = 15;

/// Monomial exponents in storage order: by total degree, then by falling
/// power of x.
pub fn quartic_monomials() -> [(u32, u32); QUARTIC_TERMS] {
    let mut out = [(0, 0); QUARTIC_TERMS];
    let mut k = 0;
    for deg in 0..=4u32 {
        for i in (0..=deg).rev() {
            out[k] = (i, deg - i);
            k += 1;
        }
    }
    out
}

pub fn monomial_index(i: u32, j: u32) -> usize {
    let deg = (i + j) as usize;
    deg * (deg + 1) / 2 + (deg - i as usize)
}

/// Monomials of the even-symmetric basis, in storage order of their coefficients.
pub const EVEN_MONOMIALS: [(u32, u32); 6] = [(4, 0), (2, 2), (0, 4), (2, 0), (0, 2), (0, 0)];

/// Implicit curve of degree at most four.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticImplicit {
    pub coeffs: [f64; QUARTIC_TERMS],
    /// Only even monomials carry non-zero coefficients.
    pub symmetric: bool,
}

impl QuarticImplicit {
    pub fn new(coeffs: [f64; QUARTIC_TERMS]) -> Self {
        let symmetric = quartic_monomials()
            .iter()
            .zip(coeffs.iter())
            .all(|(&(i, j), &c)| c == 0.0 || (i % 2 == 0 && j % 2 == 0));
        Self { coeffs, symmetric }.normalized()
    }

    /// Builds from the coefficients of `x⁴, x²y², y⁴, x², y², 1`.
    pub fn from_even(even: [f64; 6]) -> Self {
        let mut coeffs = [0.0; QUARTIC_TERMS];
        for (&(i, j), c) in EVEN_MONOMIALS.iter().zip(even) {
            coeffs[monomial_index(i, j)] = c;
        }
        Self::new(coeffs)
    }

    pub fn even_coeffs(&self) -> [f64; 6] {
        EVEN_MONOMIALS.map(|(i, j)| self.coeffs[monomial_index(i, j)])
    }

    /// Unit norm, with the first significant coefficient (highest degree first) positive.
    pub fn normalized(&self) -> Self {
        let n = self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n == 0.0 {
            return self.clone();
        }
        let mut coeffs = self.coeffs.map(|c| c / n);
        let lead = (0..QUARTIC_TERMS)
            .rev()
            .map(|k| coeffs[k])
            .find(|c| c.abs() > 1e-12)
            .unwrap_or(1.0);
        if lead < 0.0 {
            coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        Self {
            coeffs,
            symmetric: self.symmetric,
        }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        quartic_monomials()
            .iter()
            .zip(self.coeffs.iter())
            .map(|(&(i, j), c)| c * p.x.powi(i as i32) * p.y.powi(j as i32))
            .sum()
    }

    /// `|Q(p)|` divided by the sum of term magnitudes; scale-free.
    pub fn relative_residual(&self, p: Point2) -> f64 {
        let mut value = 0.0;
        let mut mag = 0.0;
        for (&(i, j), c) in quartic_monomials().iter().zip(self.coeffs.iter()) {
            let term = c * p.x.powi(i as i32) * p.y.powi(j as i32);
            value += term;
            mag += term.abs();
        }
        if mag == 0.0 {
            0.0
        } else {
            value.abs() / mag
        }
    }

    /// Angle between the coefficient vectors, ignoring sign.
    pub fn angle_to(&self, other: &QuarticImplicit) -> f64 {
        let u = self.normalized();
        let v = other.normalized();
        let diff = |s: f64| {
            u.coeffs
                .iter()
                .zip(v.coeffs.iter())
                .map(|(x, y)| (x - s * y).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let chord = diff(1.0).min(diff(-1.0));
        2.0 * (0.5 * chord).min(1.0).asin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Confocal,
    Incircle,
    Circumellipse,
    Homothetic,
    Poristic,
    Brocard,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Confocal,
        Family::Incircle,
        Family::Circumellipse,
        Family::Homothetic,
        Family::Poristic,
        Family::Brocard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Confocal => "confocal",
            Family::Incircle => "incircle",
            Family::Circumellipse => "circumellipse",
            Family::Homothetic => "homothetic",
            Family::Poristic => "poristic",
            Family::Brocard => "brocard",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "confocal" | "billiard" | "0" => Ok(Family::Confocal),
            "incircle" | "i" | "1" => Ok(Family::Incircle),
            "circumellipse" | "inellipse" | "ii" | "2" => Ok(Family::Circumellipse),
            "homothetic" | "iii" | "3" => Ok(Family::Homothetic),
            "poristic" => Ok(Family::Poristic),
            "brocard" => Ok(Family::Brocard),
            other => Err(GeometryError::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// Parameters that identify a pair beyond its two conics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairParams {
    /// One of the four concentric pairs built from the semi-axes `(a, b)`.
    Canonical { a: f64, b: f64 },
    Poristic { big_r: f64, r: f64, d: f64 },
    Brocard { big_r: f64, omega: f64 },
    /// Built from arbitrary conics (tuned or affine-image pairs).
    General,
}

/// An outer conic and an inner conic (the caustic) carrying a Poncelet family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicPair {
    pub family: Family,
    pub outer: AxisEllipse,
    pub inner: AxisEllipse,
    pub params: PairParams,
    /// Number of polygon vertices per orbit.
    pub period: usize,
}

impl ConicPair {
    /// Elliptic billiard: outer `(a, b)` and its 3-periodic confocal caustic.
    pub fn confocal(a: f64, b: f64) -> Result<Self> {
        let (ca, cb) = confocal_caustic(a, b)?;
        Ok(Self {
            family: Family::Confocal,
            outer: AxisEllipse::centered(a, b)?,
            inner: AxisEllipse::centered(ca, cb)?,
            params: PairParams::Canonical { a, b },
            period: 3,
        })
    }

    /// Outer ellipse `(a, b)` with the concentric incircle of radius `ab/(a+b)`.
    pub fn incircle(a: f64, b: f64) -> Result<Self> {
        check_axes(a, b)?;
        Ok(Self {
            family: Family::Incircle,
            outer: AxisEllipse::centered(a, b)?,
            inner: AxisEllipse::circle(Point2::ORIGIN, incircle_radius(a, b)?)?,
            params: PairParams::Canonical { a, b },
            period: 3,
        })
    }

    /// Inner ellipse `(a, b)` with the concentric circumcircle of radius `a + b`.
    pub fn circumellipse(a: f64, b: f64) -> Result<Self> {
        check_axes(a, b)?;
        Ok(Self {
            family: Family::Circumellipse,
            outer: AxisEllipse::circle(Point2::ORIGIN, a + b)?,
            inner: AxisEllipse::centered(a, b)?,
            params: PairParams::Canonical { a, b },
            period: 3,
        })
    }

    /// Outer ellipse `(a, b)` with the homothetic caustic `(a/2, b/2)`.
    pub fn homothetic(a: f64, b: f64) -> Result<Self> {
        check_axes(a, b)?;
        Ok(Self {
            family: Family::Homothetic,
            outer: AxisEllipse::centered(a, b)?,
            inner: AxisEllipse::centered(a / 2.0, b / 2.0)?,
            params: PairParams::Canonical { a, b },
            period: 3,
        })
    }

    /// Circumcircle of radius `big_r` at the origin, incircle of radius `r`
    /// centered at `(d, 0)` with `d = √(R(R−2r))`.
    pub fn poristic(big_r: f64, r: f64) -> Result<Self> {
        require_positive("circumradius R", big_r)?;
        require_positive("inradius r", r)?;
        let slack = big_r * (big_r - 2.0 * r);
        if slack < -1e-12 * big_r * big_r {
            return Err(domain(format!(
                "poristic family needs R ≥ 2r, got R = {big_r}, r = {r}"
            )));
        }
        let d = slack.max(0.0).sqrt();
        Ok(Self {
            family: Family::Poristic,
            outer: AxisEllipse::circle(Point2::ORIGIN, big_r)?,
            inner: AxisEllipse::circle(Point2::new(d, 0.0), r)?,
            params: PairParams::Poristic { big_r, r, d },
            period: 3,
        })
    }

    /// Circumcircle of radius `big_r` with the Brocard inellipse of the
    /// family whose Brocard angle is `omega`.
    pub fn brocard(big_r: f64, omega: f64) -> Result<Self> {
        crate::orbits::brocard_pair(big_r, omega)
    }

    /// Pair from arbitrary conics; orbits come from the generic iterator.
    pub fn general(family: Family, outer: AxisEllipse, inner: AxisEllipse, period: usize) -> Self {
        Self {
            family,
            outer,
            inner,
            params: PairParams::General,
            period,
        }
    }

    /// Length used to make thresholds dimensionless: the outer conic's major semi-axis.
    pub fn scale(&self) -> f64 {
        self.outer.major()
    }

    /// Canonical `(a, b)` if the pair was built by one of the concentric constructors.
    pub fn axes(&self) -> Option<(f64, f64)> {
        match self.params {
            PairParams::Canonical { a, b } => Some((a, b)),
            _ => None,
        }
    }

    /// Closure residual for concentric axis-aligned pairs.
    pub fn cayley_residual(&self) -> Result<f64> {
        cayley_residual(self.outer.a, self.outer.b, self.inner.a, self.inner.b)
    }
}

fn check_axes(a: f64, b: f64) -> Result<()> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    if a < b {
        return Err(domain(format!("expected a ≥ b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// `a'/a + b'/b − 1`; zero iff the concentric axis-aligned pair carries 3-periodics.
pub fn cayley_residual(outer_a: f64, outer_b: f64, inner_a: f64, inner_b: f64) -> Result<f64> {
    require_positive("outer a", outer_a)?;
    require_positive("outer b", outer_b)?;
    require_positive("inner a", inner_a)?;
    require_positive("inner b", inner_b)?;
    Ok(inner_a / outer_a + inner_b / outer_b - 1.0)
}

/// Radius `ab/(a+b)` of the circle admitting 3-periodics inside ellipse `(a, b)`.
pub fn incircle_radius(a: f64, b: f64) -> Result<f64> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    Ok(a * b / (a + b))
}

/// Semi-axes of the confocal caustic of 3-periodics in the billiard `(α, β)`.
pub fn confocal_caustic(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    require_positive("alpha", alpha)?;
    require_positive("beta", beta)?;
    if alpha <= beta {
        return Err(GeometryError::DegenerateParameter(format!(
            "confocal caustic needs alpha > beta, got {alpha}, {beta}"
        )));
    }
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let c2 = a2 - b2;
    let delta = billiard_delta(alpha, beta);
    Ok((alpha * (delta - b2) / c2, beta * (a2 - delta) / c2))
}

/// `δ = √(a⁴ − a²b² + b⁴)`.
pub fn billiard_delta(a: f64, b: f64) -> f64 {
    let a2 = a * a;
    let b2 = b * b;
    (a2 * a2 - a2 * b2 + b2 * b2).sqrt()
}

/// `r/R` of billiard 3-periodics.
pub fn billiard_r_over_big_r(alpha: f64, beta: f64) -> f64 {
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let delta = billiard_delta(alpha, beta);
    2.0 * (delta - b2) * (a2 - delta) / ((a2 - b2) * (a2 - b2))
}
