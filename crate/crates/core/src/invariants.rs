//! Metric invariants of the families, their closed-form values, and a sweep
//! that measures how far sampled values stray from them.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centers::{center, orthic_triangle};
use crate::conic::{billiard_r_over_big_r, ConicPair, Family, PairParams, Point2};
use crate::error::{domain, GeometryError, Result};
use crate::orbits::family_polygon;
use crate::triangle::Triangle;

/// Quantities measured on a polygon of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    SumCosines,
    ProductHalfSines,
    ProductCosines,
    Circumradius,
    Inradius,
    RadiusRatio,
    PowerOfCenter,
    SideProductOverSemiperimeter,
    SumSqSides,
    Area,
    SumCotangents,
    BrocardAngle,
    Perimeter,
    OrthicInradius,
    OrthicCircumradius,
}

impl Invariant {
    pub const ALL: [Invariant; 15] = [
        Invariant::SumCosines,
        Invariant::ProductHalfSines,
        Invariant::ProductCosines,
        Invariant::Circumradius,
        Invariant::Inradius,
        Invariant::RadiusRatio,
        Invariant::PowerOfCenter,
        Invariant::SideProductOverSemiperimeter,
        Invariant::SumSqSides,
        Invariant::Area,
        Invariant::SumCotangents,
        Invariant::BrocardAngle,
        Invariant::Perimeter,
        Invariant::OrthicInradius,
        Invariant::OrthicCircumradius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::SumCosines => "sum_cosines",
            Invariant::ProductHalfSines => "product_half_sines",
            Invariant::ProductCosines => "product_cosines",
            Invariant::Circumradius => "circumradius",
            Invariant::Inradius => "inradius",
            Invariant::RadiusRatio => "r_over_R",
            Invariant::PowerOfCenter => "power_of_center",
            Invariant::SideProductOverSemiperimeter => "side_product_over_semiperimeter",
            Invariant::SumSqSides => "sum_sq_sides",
            Invariant::Area => "area",
            Invariant::SumCotangents => "sum_cotangents",
            Invariant::BrocardAngle => "brocard_angle",
            Invariant::Perimeter => "perimeter",
            Invariant::OrthicInradius => "orthic_inradius",
            Invariant::OrthicCircumradius => "orthic_circumradius",
        }
    }

    /// Whether the quantity is defined for `N`-gons with `N > 3`.
    pub fn polygonal(self) -> bool {
        matches!(
            self,
            Invariant::SumCosines
                | Invariant::ProductCosines
                | Invariant::SumSqSides
                | Invariant::Area
                | Invariant::SumCotangents
                | Invariant::Perimeter
        )
    }

    /// Value on the polygon `vertices`; `center` is the pair's common center,
    /// used by [`Invariant::PowerOfCenter`].
    pub fn measure(self, vertices: &[Point2], center: Point2) -> Result<f64> {
        if vertices.len() < 3 {
            return Err(GeometryError::Arity {
                needed: 3,
                got: vertices.len(),
            });
        }
        if vertices.len() > 3 && !self.polygonal() {
            return Err(domain(format!("{} is defined for triangles only", self.name())));
        }
        if self.polygonal() {
            let angles = interior_angles(vertices);
            return Ok(match self {
                Invariant::SumCosines => angles.iter().map(|a| a.cos()).sum(),
                Invariant::ProductCosines => angles.iter().map(|a| a.cos()).product(),
                Invariant::SumCotangents => angles.iter().map(|a| 1.0 / a.tan()).sum(),
                Invariant::SumSqSides => sides(vertices).iter().map(|s| s * s).sum(),
                Invariant::Perimeter => sides(vertices).iter().sum(),
                _ => polygon_area(vertices),
            });
        }
        let t = Triangle::new(vertices[0], vertices[1], vertices[2])?;
        match self {
            Invariant::ProductHalfSines => Ok(product_half_sines(&t)),
            Invariant::Circumradius => Ok(t.metrics().circumradius),
            Invariant::Inradius => Ok(t.metrics().inradius),
            Invariant::RadiusRatio => {
                let m = t.metrics();
                Ok(m.inradius / m.circumradius)
            }
            Invariant::PowerOfCenter => power_of_point(&t, center),
            Invariant::SideProductOverSemiperimeter => Ok(side_product_over_semiperimeter(&t)),
            Invariant::BrocardAngle => Ok(t.metrics().brocard_angle),
            Invariant::OrthicInradius => Ok(orthic_triangle(&t)?.metrics().inradius),
            Invariant::OrthicCircumradius => Ok(orthic_triangle(&t)?.metrics().circumradius),
            _ => unreachable!("polygonal invariants handled above"),
        }
    }

    /// Closed-form value over the family of `pair`, when one is known.
    pub fn expected(self, pair: &ConicPair) -> Option<f64> {
        if pair.period != 3 {
            return None;
        }
        match (pair.family, pair.params) {
            (family, PairParams::Canonical { a, b }) => canonical_expected(self, family, a, b),
            (Family::Poristic, PairParams::Poristic { big_r, r, .. }) => match self {
                Invariant::Circumradius => Some(big_r),
                Invariant::Inradius => Some(r),
                Invariant::RadiusRatio => Some(r / big_r),
                Invariant::SumCosines => Some(1.0 + r / big_r),
                _ => None,
            },
            (Family::Brocard, PairParams::Brocard { big_r, omega }) => match self {
                Invariant::Circumradius => Some(big_r),
                Invariant::BrocardAngle => Some(omega),
                Invariant::SumCotangents => Some(1.0 / omega.tan()),
                _ => None,
            },
            _ => None,
        }
    }
}

fn canonical_expected(inv: Invariant, family: Family, a: f64, b: f64) -> Option<f64> {
    let s = a + b;
    match family {
        Family::Confocal => {
            let ratio = billiard_r_over_big_r(a, b);
            match inv {
                Invariant::RadiusRatio => Some(ratio),
                Invariant::SumCosines => Some(1.0 + ratio),
                _ => None,
            }
        }
        Family::Incircle => match inv {
            Invariant::SumCosines => Some((a * a + 4.0 * a * b + b * b) / (s * s)),
            Invariant::ProductHalfSines => Some(a * b / (2.0 * s * s)),
            Invariant::Circumradius => Some(s / 2.0),
            Invariant::Inradius => Some(a * b / s),
            Invariant::RadiusRatio => Some(2.0 * a * b / (s * s)),
            Invariant::PowerOfCenter => Some(-a * b),
            Invariant::SideProductOverSemiperimeter => Some(a * b / 2.0),
            _ => None,
        },
        Family::Circumellipse => match inv {
            Invariant::SumSqSides => Some(4.0 * (a + 2.0 * b) * (2.0 * a + b)),
            Invariant::ProductCosines => Some(a * b / (2.0 * s * s)),
            Invariant::Circumradius => Some(s),
            Invariant::OrthicInradius => Some(a * b / s),
            Invariant::OrthicCircumradius => Some(s / 2.0),
            _ => None,
        },
        Family::Homothetic => {
            let cot = 3f64.sqrt() * (a * a + b * b) / (2.0 * a * b);
            match inv {
                Invariant::Area => Some(3.0 * 3f64.sqrt() / 4.0 * a * b),
                Invariant::SumSqSides => Some(4.5 * (a * a + b * b)),
                Invariant::SumCotangents => Some(cot),
                Invariant::BrocardAngle => Some((1.0 / cot).atan()),
                _ => None,
            }
        }
        Family::Poristic | Family::Brocard => None,
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Invariant {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        Invariant::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GeometryError::Parse(format!("unknown invariant `{s}`")))
    }
}

/// Invariants with a closed form for `family`'s 3-periodics.
pub fn family_invariants(family: Family) -> Vec<Invariant> {
    let probe = match family {
        Family::Poristic => ConicPair::poristic(1.5, 2.0 / 3.0),
        Family::Brocard => ConicPair::brocard(1.0, 0.4),
        Family::Confocal => ConicPair::confocal(2.0, 1.0),
        Family::Incircle => ConicPair::incircle(2.0, 1.0),
        Family::Circumellipse => ConicPair::circumellipse(2.0, 1.0),
        Family::Homothetic => ConicPair::homothetic(2.0, 1.0),
    };
    let Ok(pair) = probe else { return Vec::new() };
    Invariant::ALL
        .into_iter()
        .filter(|i| i.expected(&pair).is_some())
        .collect()
}

fn sides(v: &[Point2]) -> Vec<f64> {
    (0..v.len()).map(|i| v[i].dist(v[(i + 1) % v.len()])).collect()
}

fn interior_angles(v: &[Point2]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let p = v[i];
            let u = v[(i + n - 1) % n] - p;
            let w = v[(i + 1) % n] - p;
            u.cross(w).abs().atan2(u.dot(w))
        })
        .collect()
}

fn polygon_area(v: &[Point2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>().abs()
}

pub fn sum_cosines(t: &Triangle) -> f64 {
    t.angles().iter().map(|a| a.cos()).sum()
}

pub fn product_half_sines(t: &Triangle) -> f64 {
    t.angles().iter().map(|a| (0.5 * a).sin()).product()
}

pub fn product_cosines(t: &Triangle) -> f64 {
    t.angles().iter().map(|a| a.cos()).product()
}

pub fn sum_cotangents(t: &Triangle) -> f64 {
    t.angles().iter().map(|a| 1.0 / a.tan()).sum()
}

/// `|X₃ − p|² − R²`.
pub fn power_of_point(t: &Triangle, p: Point2) -> Result<f64> {
    let x3 = center(t, 3)?;
    let big_r = t.metrics().circumradius;
    Ok((x3 - p).norm_sq() - big_r * big_r)
}

/// `s₁s₂s₃/(4s)`.
pub fn side_product_over_semiperimeter(t: &Triangle) -> f64 {
    let m = t.metrics();
    m.sides.iter().product::<f64>() / (4.0 * m.semiperimeter)
}

/// Outcome of an invariant sweep over a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub invariant: String,
    pub family: Family,
    pub period: usize,
    pub samples: usize,
    pub skipped: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Closed form, if known; otherwise the report measures constancy about the mean.
    pub expected: Option<f64>,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    /// Whether [`InvariantReport::deviation`] is the relative one.
    pub relative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InvariantReport {
    /// Relative deviation when the reference value is not tiny for the
    /// pair's scale, absolute otherwise.
    pub fn deviation(&self) -> f64 {
        if self.relative {
            self.max_rel_deviation
        } else {
            self.max_abs_deviation
        }
    }

    pub fn reference(&self) -> f64 {
        self.expected.unwrap_or(self.mean)
    }
}

/// The `n` uniformly spaced parameters used by sweeps.
pub fn sweep_parameters(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * (i as f64 + 0.25) / n as f64).collect()
}

/// Measures `inv` over `samples` members of `pair`'s family.
pub fn sweep(pair: &ConicPair, inv: Invariant, samples: usize) -> Result<InvariantReport> {
    if samples < 16 {
        return Err(domain(format!("a sweep needs at least 16 samples, got {samples}")));
    }
    let mut values = Vec::with_capacity(samples);
    let mut skipped = 0;
    for t in sweep_parameters(samples) {
        match family_polygon(pair, t).and_then(|v| inv.measure(&v, pair.outer.center)) {
            Ok(x) if x.is_finite() => values.push(x),
            _ => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(GeometryError::AllSamplesDegenerate);
    }
    Ok(report(pair, inv, &values, skipped))
}

fn report(pair: &ConicPair, inv: Invariant, values: &[f64], skipped: usize) -> InvariantReport {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let expected = inv.expected(pair);
    let reference = expected.unwrap_or(mean);
    let max_abs = values
        .iter()
        .map(|v| (v - reference).abs())
        .fold(0.0, f64::max);
    let scale = pair.scale();
    let relative = reference.abs() > 1e-6 * scale * scale;
    let max_rel = if reference != 0.0 {
        max_abs / reference.abs()
    } else {
        f64::INFINITY
    };
    InvariantReport {
        invariant: inv.name().to_string(),
        family: pair.family,
        period: pair.period,
        samples: values.len(),
        skipped,
        mean,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        expected,
        max_abs_deviation: max_abs,
        max_rel_deviation: max_rel,
        relative,
        note: note(pair, inv, expected),
    }
}

/// Quantities that stay constant over `family`'s `N`-periodics for `N > 3`.
pub fn polygon_invariants(family: Family) -> Vec<Invariant> {
    match family {
        Family::Confocal => vec![Invariant::Perimeter, Invariant::SumCosines],
        Family::Incircle => vec![Invariant::SumCosines],
        Family::Circumellipse => vec![Invariant::SumSqSides, Invariant::ProductCosines],
        Family::Homothetic => vec![Invariant::Area, Invariant::SumSqSides, Invariant::SumCotangents],
        Family::Poristic | Family::Brocard => Vec::new(),
    }
}

fn note(pair: &ConicPair, inv: Invariant, expected: Option<f64>) -> Option<String> {
    match (pair.family, inv, expected) {
        (Family::Homothetic, Invariant::SumCotangents, Some(_)) => Some(
            "closed form from Σcot = L₂/(4A) with the invariant L₂ and A: √3(a²+b²)/(2ab)".to_string(),
        ),
        (_, _, None) => Some("no closed form; deviation is about the sample mean".to_string()),
        _ => None,
    }
}

/// Sweeps every invariant of [`family_invariants`] (or, for `N > 3`, of
/// [`polygon_invariants`]) over `pair`.
pub fn sweep_all(pair: &ConicPair, samples: usize) -> Result<Vec<InvariantReport>> {
    let list: Vec<Invariant> = if pair.period == 3 {
        family_invariants(pair.family)
    } else {
        polygon_invariants(pair.family)
    };
    list.into_iter().map(|i| sweep(pair, i, samples)).collect()
}

/// Brocard angle `ω` of Family III 3-periodics in the ellipse `(a, b)`.
pub fn homothetic_brocard_angle(a: f64, b: f64) -> f64 {
    (2.0 * a * b / (3f64.sqrt() * (a * a + b * b))).atan().clamp(0.0, PI / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{homothetic_orbit, incircle_orbit, tune_caustic_for_closure};
    use crate::conic::AxisEllipse;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn equilateral() -> Triangle {
        Triangle::new(
            Point2::polar(1.0, PI / 2.0),
            Point2::polar(1.0, PI / 2.0 + TAU / 3.0),
            Point2::polar(1.0, PI / 2.0 - TAU / 3.0),
        )
        .unwrap()
    }

    #[test]
    fn equilateral_values() {
        let t = equilateral();
        assert_abs_diff_eq!(sum_cosines(&t), 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(product_half_sines(&t), 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(product_cosines(&t), 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(sum_cotangents(&t), 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.metrics().circumradius, 1.0, epsilon = 1e-14);
        let side = 3f64.sqrt();
        assert_abs_diff_eq!(
            side_product_over_semiperimeter(&t),
            side * side / 6.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn closed_form_examples() {
        let i = ConicPair::incircle(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(Invariant::SumCosines.expected(&i).unwrap(), 13.0 / 9.0);
        assert_abs_diff_eq!(Invariant::ProductHalfSines.expected(&i).unwrap(), 1.0 / 9.0);
        assert_abs_diff_eq!(Invariant::PowerOfCenter.expected(&i).unwrap(), -2.0);
        assert_abs_diff_eq!(
            Invariant::SideProductOverSemiperimeter.expected(&i).unwrap(),
            1.0
        );
        let ii = ConicPair::circumellipse(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(Invariant::SumSqSides.expected(&ii).unwrap(), 80.0);
        assert_abs_diff_eq!(Invariant::Circumradius.expected(&ii).unwrap(), 3.0);
        let iii = ConicPair::homothetic(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(Invariant::SumSqSides.expected(&iii).unwrap(), 22.5);
        assert_abs_diff_eq!(
            Invariant::SumCotangents.expected(&iii).unwrap(),
            5.0 * 3f64.sqrt() / 4.0,
            epsilon = 1e-15
        );
        // cot ω = L₂/(4A) with the closed forms for L₂ and A
        let l2 = Invariant::SumSqSides.expected(&iii).unwrap();
        let area = Invariant::Area.expected(&iii).unwrap();
        assert_abs_diff_eq!(
            Invariant::SumCotangents.expected(&iii).unwrap(),
            l2 / (4.0 * area),
            epsilon = 1e-14
        );
        let conf = ConicPair::confocal(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            Invariant::SumCosines.expected(&conf).unwrap(),
            1.0 + 2.0 * (13f64.sqrt() - 1.0) * (4.0 - 13f64.sqrt()) / 9.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn sweeps_match_closed_forms() {
        for (a, b) in [(2.0, 1.0), (3.0, 1.0), (1.5, 1.0), (5.0, 4.0)] {
            for pair in [
                ConicPair::confocal(a, b).unwrap(),
                ConicPair::incircle(a, b).unwrap(),
                ConicPair::circumellipse(a, b).unwrap(),
                ConicPair::homothetic(a, b).unwrap(),
            ] {
                for inv in family_invariants(pair.family) {
                    let r = sweep(&pair, inv, 1000).unwrap();
                    assert!(r.deviation() < 1e-9, "{:?} {inv} at ({a},{b}): {r:?}", pair.family);
                    assert_eq!(r.skipped, 0);
                }
            }
        }
    }

    #[test]
    fn porisms_sweep() {
        let p = ConicPair::poristic(1.5, 2.0 / 3.0).unwrap();
        for r in sweep_all(&p, 200).unwrap() {
            assert!(r.deviation() < 1e-9, "{r:?}");
        }
        let p = ConicPair::brocard(1.0, 0.35).unwrap();
        for r in sweep_all(&p, 200).unwrap() {
            assert!(r.deviation() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn perimeter_of_homothetic_is_not_invariant() {
        let r = sweep(&ConicPair::homothetic(2.0, 1.0).unwrap(), Invariant::Perimeter, 500).unwrap();
        assert!(r.expected.is_none());
        assert!(r.max_rel_deviation > 1e-3);
    }

    #[test]
    fn power_matches_direct_computation() {
        for i in 0..20 {
            let t = incircle_orbit(2.0, 1.0, 0.3 * i as f64 + 0.1).unwrap();
            let x3 = center(&t, 3).unwrap();
            let big_r = t.metrics().circumradius;
            assert_abs_diff_eq!(x3.norm_sq() - big_r * big_r, -2.0, epsilon = 1e-12);
        }
        let t = incircle_orbit(1.0, 1.0, 0.4).unwrap();
        assert_abs_diff_eq!(power_of_point(&t, Point2::ORIGIN).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn homothetic_area_constant() {
        for i in 0..30 {
            let t = homothetic_orbit(2.0, 1.0, 0.2 * i as f64).unwrap();
            assert_abs_diff_eq!(t.area(), 3.0 * 3f64.sqrt() / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tuned_pairs_keep_polygonal_invariants() {
        let outer = AxisEllipse::centered(2.0, 1.0).unwrap();
        let p5 = tune_caustic_for_closure(&outer, Family::Incircle, 5).unwrap();
        let r = sweep(&p5, Invariant::SumCosines, 500).unwrap();
        assert!(r.deviation() < 1e-8, "{r:?}");
        let h5 = tune_caustic_for_closure(&outer, Family::Homothetic, 5).unwrap();
        for inv in [Invariant::Area, Invariant::SumSqSides, Invariant::SumCotangents] {
            let r = sweep(&h5, inv, 200).unwrap();
            assert!(r.deviation() < 1e-8, "{r:?}");
        }
        // homothetic N-gons are affine images of regular N-gons
        let n = 5.0;
        let area = sweep(&h5, Invariant::Area, 50).unwrap().mean;
        assert_abs_diff_eq!(area, 0.5 * n * (TAU / n).sin() * 2.0, epsilon = 1e-9);
        let l2 = sweep(&h5, Invariant::SumSqSides, 50).unwrap().mean;
        assert_abs_diff_eq!(l2, 2.0 * n * (PI / n).sin().powi(2) * 5.0, epsilon = 1e-9);
        let c5 = tune_caustic_for_closure(
            &AxisEllipse::centered(2.0, 1.0).unwrap(),
            Family::Circumellipse,
            5,
        )
        .unwrap();
        for inv in [Invariant::SumSqSides, Invariant::ProductCosines] {
            let r = sweep(&c5, inv, 200).unwrap();
            assert!(r.deviation() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn incircle_sum_cosines_equals_billiard_affine_image_for_n4() {
        // incircle pair (a, b, r) is the image of the billiard (α, b) with
        // caustic (rα/a, r) under x ↦ (a/α)x
        let outer = AxisEllipse::centered(2.0, 1.0).unwrap();
        let p4 = tune_caustic_for_closure(&outer, Family::Incircle, 4).unwrap();
        let r = p4.inner.a;
        let (a, b) = (2.0, 1.0);
        let alpha = (a * a * (b * b - r * r) / (a * a - r * r)).sqrt();
        let billiard = ConicPair::general(
            Family::Confocal,
            AxisEllipse::centered(alpha, b).unwrap(),
            AxisEllipse::centered(r * alpha / a, r).unwrap(),
            4,
        );
        let lhs = sweep(&p4, Invariant::SumCosines, 100).unwrap().mean;
        let rhs = sweep(&billiard, Invariant::SumCosines, 100).unwrap();
        assert!(rhs.deviation() < 1e-8);
        assert_abs_diff_eq!(lhs, rhs.mean, epsilon = 1e-9);
    }

    #[test]
    fn sweep_errors() {
        let p = ConicPair::incircle(2.0, 1.0).unwrap();
        assert!(sweep(&p, Invariant::Area, 8).is_err());
        assert_eq!(
            "sum_cosines".parse::<Invariant>().unwrap(),
            Invariant::SumCosines
        );
    }

    proptest! {
        #[test]
        fn cross_identities(c in proptest::array::uniform6(-3.0f64..3.0)) {
            let Ok(t) = Triangle::new(Point2::new(c[0], c[1]), Point2::new(c[2], c[3]), Point2::new(c[4], c[5])) else {
                return Ok(());
            };
            let m = t.metrics();
            prop_assume!(m.area > 1e-2 * m.perimeter * m.perimeter);
            prop_assert!((sum_cosines(&t) - 1.0 - m.inradius / m.circumradius).abs() < 1e-12);
            prop_assert!((sum_cosines(&t) - 1.0 - 4.0 * product_half_sines(&t)).abs() < 1e-12);
            prop_assert!((sum_cotangents(&t) - m.sum_sq_sides / (4.0 * m.area)).abs() < 1e-9 * sum_cotangents(&t));
            let rr = m.inradius * m.circumradius;
            prop_assert!((rr - side_product_over_semiperimeter(&t)).abs() < 1e-12 * rr.max(1.0));
            prop_assert!((m.brocard_angle.tan() - 4.0 * m.area / m.sum_sq_sides).abs() < 1e-12);
        }
    }
}
