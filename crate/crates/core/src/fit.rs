//! Least-squares implicit conic and quartic fitting, and locus classification.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conic::{
    monomial_index, quartic_monomials, ConicGeometry, ConicImplicit, Point2, QuarticImplicit,
    EVEN_MONOMIALS, QUARTIC_TERMS,
};
use crate::error::{GeometryError, Result};

/// Thresholds used by [`classify_locus_with`]. All are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitThresholds {
    /// Point-cloud diameter, relative to the scale, below which a locus is stationary.
    pub point: f64,
    /// RMS algebraic residual below which a fit is accepted.
    pub residual: f64,
    /// Maximum deviation of the fitted axis ratio from 1 for a circle.
    pub circle_ratio: f64,
}

impl Default for FitThresholds {
    fn default() -> Self {
        Self {
            point: 1e-9,
            residual: 1e-7,
            circle_ratio: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocusClass {
    StationaryPoint,
    Circle,
    Ellipse,
    Quartic,
    NonConic,
}

impl LocusClass {
    /// One-letter label used by the locus-type table.
    pub fn label(self) -> &'static str {
        match self {
            LocusClass::StationaryPoint => "P",
            LocusClass::Circle => "C",
            LocusClass::Ellipse => "E",
            LocusClass::Quartic => "4",
            LocusClass::NonConic => "X",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicFit {
    /// Fitted conic in the input coordinates.
    pub conic: ConicImplicit,
    /// RMS of the conic on centered, unit-RMS-radius coordinates.
    pub residual: f64,
    /// Center/axes in the input coordinates, when the fit is a real ellipse.
    pub geometry: Option<ConicGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarticFit {
    pub quartic: QuarticImplicit,
    pub residual: f64,
}

/// Translation and scale applied before fitting.
#[derive(Debug, Clone, Copy)]
struct Frame {
    center: Point2,
    scale: f64,
}

impl Frame {
    fn about(points: &[Point2], center: Point2) -> Result<Self> {
        let ms = points.iter().map(|&p| (p - center).norm_sq()).sum::<f64>() / points.len() as f64;
        let scale = ms.sqrt();
        let magnitude = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if !scale.is_finite() || scale <= 1e-14 * magnitude.max(f64::MIN_POSITIVE) || scale == 0.0 {
            return Err(GeometryError::DegenerateFit(
                "points are coincident".to_string(),
            ));
        }
        Ok(Self { center, scale })
    }

    fn centroid(points: &[Point2]) -> Result<Self> {
        let n = points.len() as f64;
        let c = points.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) * (1.0 / n);
        Self::about(points, c)
    }

    fn apply(&self, p: Point2) -> Point2 {
        (p - self.center) * (1.0 / self.scale)
    }
}

fn check_finite(points: &[Point2]) -> Result<()> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::Domain("non-finite sample".to_string()))
    }
}

/// Unit-norm right singular vector of the smallest singular value, and the
/// RMS residual it produces.
fn smallest_direction(design: DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    let rows = design.nrows() as f64;
    let cols = design.ncols();
    let svd = design.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| GeometryError::DegenerateFit("SVD did not converge".to_string()))?;
    let (k, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| GeometryError::DegenerateFit("empty design".to_string()))?;
    let v: Vec<f64> = (0..cols).map(|j| v_t[(k, j)]).collect();
    Ok((v, sigma / rows.sqrt()))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rewrites `Σ c·((x−cx)/s)^i ((y−cy)/s)^j` in powers of `x, y`.
fn denormalize(frame: &Frame, coeffs: &[f64; QUARTIC_TERMS]) -> [f64; QUARTIC_TERMS] {
    let mut out = [0.0; QUARTIC_TERMS];
    let (cx, cy, s) = (frame.center.x, frame.center.y, frame.scale);
    for (&(i, j), &c) in quartic_monomials().iter().zip(coeffs.iter()) {
        if c == 0.0 {
            continue;
        }
        let k = c / s.powi((i + j) as i32);
        for p in 0..=i {
            let xp = binomial(i, p) * (-cx).powi((i - p) as i32);
            for q in 0..=j {
                let yq = binomial(j, q) * (-cy).powi((j - q) as i32);
                out[monomial_index(p, q)] += k * xp * yq;
            }
        }
    }
    out
}

const CONIC_SLOTS: [(u32, u32); 6] = [(2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)];

/// Least-squares implicit conic through `points` (at least six).
pub fn fit_conic(points: &[Point2]) -> Result<ConicFit> {
    if points.len() < 6 {
        return Err(GeometryError::Arity {
            needed: 6,
            got: points.len(),
        });
    }
    check_finite(points)?;
    let frame = Frame::centroid(points)?;
    let design = DMatrix::from_fn(points.len(), 6, |r, c| {
        let p = frame.apply(points[r]);
        let (i, j) = CONIC_SLOTS[c];
        p.x.powi(i as i32) * p.y.powi(j as i32)
    });
    let (v, residual) = smallest_direction(design)?;
    let local = ConicImplicit::new([v[0], v[1], v[2], v[3], v[4], v[5]]);
    let geometry = local.ellipse_geometry().map(|g| ConicGeometry {
        center: frame.center + g.center * frame.scale,
        semi_major: g.semi_major * frame.scale,
        semi_minor: g.semi_minor * frame.scale,
        angle: g.angle,
    });
    let mut full = [0.0; QUARTIC_TERMS];
    for (&(i, j), &c) in CONIC_SLOTS.iter().zip(local.coeffs.iter()) {
        full[monomial_index(i, j)] = c;
    }
    let global = denormalize(&frame, &full);
    let conic = ConicImplicit::new(CONIC_SLOTS.map(|(i, j)| global[monomial_index(i, j)]));
    Ok(ConicFit {
        conic,
        residual,
        geometry,
    })
}

/// Least-squares implicit quartic. With `symmetric`, the basis is
/// `{x⁴, x²y², y⁴, x², y², 1}` about the origin (six points suffice);
/// otherwise all fifteen monomials about the centroid.
pub fn fit_quartic(points: &[Point2], symmetric: bool) -> Result<QuarticFit> {
    let needed = if symmetric { 6 } else { QUARTIC_TERMS };
    if points.len() < needed {
        return Err(GeometryError::Arity {
            needed,
            got: points.len(),
        });
    }
    check_finite(points)?;
    let basis: Vec<(u32, u32)> = if symmetric {
        EVEN_MONOMIALS.to_vec()
    } else {
        quartic_monomials().to_vec()
    };
    let frame = if symmetric {
        Frame::about(points, Point2::ORIGIN)?
    } else {
        Frame::centroid(points)?
    };
    let design = DMatrix::from_fn(points.len(), basis.len(), |r, c| {
        let p = frame.apply(points[r]);
        let (i, j) = basis[c];
        p.x.powi(i as i32) * p.y.powi(j as i32)
    });
    let (v, residual) = smallest_direction(design)?;
    let mut local = [0.0; QUARTIC_TERMS];
    for (&(i, j), c) in basis.iter().zip(v) {
        local[monomial_index(i, j)] = c;
    }
    let mut quartic = QuarticImplicit::new(denormalize(&frame, &local));
    quartic.symmetric = symmetric || quartic.symmetric;
    Ok(QuarticFit { quartic, residual })
}

/// Result of [`classify_locus`] with the diagnostics that led to the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: LocusClass,
    /// Largest pairwise distance among the samples.
    pub diameter: f64,
    pub conic: Option<ConicFit>,
    pub quartic: Option<QuarticFit>,
}

impl Classification {
    pub fn conic_residual(&self) -> Option<f64> {
        self.conic.as_ref().map(|c| c.residual)
    }

    pub fn geometry(&self) -> Option<ConicGeometry> {
        self.conic.as_ref().and_then(|c| c.geometry)
    }
}

pub fn classify_locus(points: &[Point2], scale: f64) -> Result<Classification> {
    classify_locus_with(points, scale, &FitThresholds::default())
}

/// Labels a sampled locus. `scale` (the outer semi-axis) makes the
/// stationarity test dimensionless.
pub fn classify_locus_with(
    points: &[Point2],
    scale: f64,
    thresholds: &FitThresholds,
) -> Result<Classification> {
    if points.is_empty() {
        return Err(GeometryError::Arity { needed: 1, got: 0 });
    }
    check_finite(points)?;
    let diameter = diameter(points);
    let mut out = Classification {
        class: LocusClass::NonConic,
        diameter,
        conic: None,
        quartic: None,
    };
    if diameter < thresholds.point * scale.abs() {
        out.class = LocusClass::StationaryPoint;
        return Ok(out);
    }
    if points.len() < 6 {
        return Err(GeometryError::Arity {
            needed: 6,
            got: points.len(),
        });
    }
    let conic = fit_conic(points)?;
    let conic_ok = conic.residual < thresholds.residual;
    let geometry = conic.geometry;
    let is_ellipse = conic.conic.discriminant() < 0.0 && geometry.is_some();
    out.conic = Some(conic);
    if conic_ok && is_ellipse {
        let ratio = geometry.map(|g| g.axis_ratio()).unwrap_or(f64::INFINITY);
        out.class = if (ratio - 1.0).abs() < thresholds.circle_ratio {
            LocusClass::Circle
        } else {
            LocusClass::Ellipse
        };
        return Ok(out);
    }
    let mut quartic = fit_quartic(points, true)?;
    if quartic.residual >= thresholds.residual && points.len() >= QUARTIC_TERMS {
        let full = fit_quartic(points, false)?;
        if full.residual < quartic.residual {
            quartic = full;
        }
    }
    if quartic.residual < thresholds.residual {
        out.class = LocusClass::Quartic;
    }
    out.quartic = Some(quartic);
    Ok(out)
}

fn diameter(points: &[Point2]) -> f64 {
    let mut best = 0.0f64;
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            best = best.max(p.dist(q));
        }
    }
    best
}
