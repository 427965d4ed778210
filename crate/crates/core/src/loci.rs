//! Sampled loci of triangle centers over a family, their classification and
//! comparison with closed forms, and the locus-type table.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centers::{default_registry, CenterRegistry};
use crate::centers::Derived;
use crate::conic::{
    billiard_delta, confocal_caustic, AxisEllipse, ConicGeometry, ConicPair, Family, Point2,
    QuarticImplicit,
};
use crate::error::{GeometryError, Result};
use crate::fit::{classify_locus, fit_conic, Classification, LocusClass};
use crate::invariants::{homothetic_brocard_angle, sweep_parameters};
use crate::orbits::family_triangle;
use crate::triangle::Triangle;

pub const DEFAULT_SAMPLES: usize = 240;

/// Centers of the derived triangles over a sweep, with the number of parameter
/// values that produced no point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusSamples {
    pub params: Vec<f64>,
    pub points: Vec<Point2>,
    pub skipped: usize,
}

pub fn sample_locus(pair: &ConicPair, k: u32, derived: Derived, n: usize) -> Result<LocusSamples> {
    sample_locus_with(default_registry(), pair, k, derived, n)
}

/// `center(derived(T(tᵢ)), k)` for `n` uniformly spaced parameters; degenerate
/// triangles, right triangles under `Orthic` and centers at infinity are skipped.
pub fn sample_locus_with(
    registry: &CenterRegistry,
    pair: &ConicPair,
    k: u32,
    derived: Derived,
    n: usize,
) -> Result<LocusSamples> {
    if n < 8 {
        return Err(GeometryError::Arity { needed: 8, got: n });
    }
    let spec = registry.get(k)?;
    let mut out = LocusSamples {
        params: Vec::with_capacity(n),
        points: Vec::with_capacity(n),
        skipped: 0,
    };
    for t in sweep_parameters(n) {
        let p = family_triangle(pair, t)
            .and_then(|tri| derived.apply(&tri))
            .and_then(|tri| spec.eval(&tri));
        match p {
            Ok(p) if p.is_finite() => {
                out.params.push(t);
                out.points.push(p);
            }
            Ok(_) | Err(_) => out.skipped += 1,
        }
    }
    if out.points.is_empty() {
        return Err(GeometryError::AllSamplesDegenerate);
    }
    Ok(out)
}

/// Closed-form locus shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LocusKind {
    Point { at: Point2 },
    Circle { center: Point2, radius: f64 },
    /// `a` is the semi-axis along x, `b` along y.
    Ellipse { center: Point2, a: f64, b: f64 },
    Quartic { curve: QuarticImplicit },
}

impl LocusKind {
    pub fn class(&self) -> LocusClass {
        match self {
            LocusKind::Point { .. } => LocusClass::StationaryPoint,
            LocusKind::Circle { .. } => LocusClass::Circle,
            LocusKind::Ellipse { .. } => LocusClass::Ellipse,
            LocusKind::Quartic { .. } => LocusClass::Quartic,
        }
    }

    /// Implicit value at `p`, normalized so that it is scale-free.
    pub fn residual_at(&self, p: Point2) -> f64 {
        match self {
            LocusKind::Point { at } => p.dist(*at),
            LocusKind::Circle { center, radius } => {
                AxisEllipse { center: *center, a: *radius, b: *radius }.implicit_residual(p).abs()
            }
            LocusKind::Ellipse { center, a, b } => {
                AxisEllipse { center: *center, a: *a, b: *b }.implicit_residual(p).abs()
            }
            LocusKind::Quartic { curve } => curve.relative_residual(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedLocus {
    pub kind: LocusKind,
    /// Short human-readable formula.
    pub label: String,
}

fn point(label: &str) -> Option<ExpectedLocus> {
    Some(ExpectedLocus {
        kind: LocusKind::Point { at: Point2::ORIGIN },
        label: label.to_string(),
    })
}

fn circle(radius: f64, label: &str) -> Option<ExpectedLocus> {
    Some(ExpectedLocus {
        kind: LocusKind::Circle { center: Point2::ORIGIN, radius },
        label: label.to_string(),
    })
}

fn ellipse(a: f64, b: f64, label: &str) -> Option<ExpectedLocus> {
    Some(ExpectedLocus {
        kind: LocusKind::Ellipse { center: Point2::ORIGIN, a, b },
        label: label.to_string(),
    })
}

fn quartic(even: [f64; 6], label: &str) -> Option<ExpectedLocus> {
    Some(ExpectedLocus {
        kind: LocusKind::Quartic { curve: QuarticImplicit::from_even(even) },
        label: label.to_string(),
    })
}

/// Closed-form locus of `X_k` over the concentric family built from `(a, b)`,
/// when one is known.
pub fn expected_locus(family: Family, k: u32, a: f64, b: f64) -> Option<ExpectedLocus> {
    let (a2, b2) = (a * a, b * b);
    match (family, k) {
        (Family::Confocal, 9) => point("stationary at the center"),
        (Family::Confocal, 1) => {
            let d = billiard_delta(a, b);
            ellipse((d - b2) / a, (a2 - d) / b, "ellipse ((δ−b²)/a, (a²−δ)/b)")
        }
        (Family::Confocal, 6) => {
            let d = billiard_delta(a, b);
            let d2 = d * d;
            let c = a2 - b2;
            quartic(
                [
                    b2 * b2 * (5.0 * d2 - 4.0 * c * d - a2 * b2),
                    2.0 * a2 * b2 * (a2 * b2 + 3.0 * d2),
                    a2 * a2 * (5.0 * d2 + 4.0 * c * d - a2 * b2),
                    a2 * b2 * b2 * (3.0 * b2 * b2 + 2.0 * (2.0 * a2 - b2) * d - 5.0 * d2),
                    a2 * a2 * b2 * (3.0 * a2 * a2 + 2.0 * (2.0 * b2 - a2) * d - 5.0 * d2),
                    0.0,
                ],
                "even quartic with an isolated point at the center",
            )
        }
        (Family::Incircle, 1) => point("stationary at the center"),
        (Family::Incircle, 2) => {
            let s = (a - b) / (3.0 * (a + b));
            ellipse(a * s, b * s, "ellipse a(a−b)/(3(a+b)), b(a−b)/(3(a+b))")
        }
        (Family::Incircle, 3) => circle((a - b) / 2.0, "circle (a−b)/2"),
        (Family::Incircle, 4) => {
            let s = (a - b) / (a + b);
            ellipse(b * s, a * s, "ellipse (a−b)b/(a+b), (a−b)a/(a+b)")
        }
        (Family::Incircle, 5) => circle((a - b).powi(2) / (4.0 * (a + b)), "circle (a−b)²/(4(a+b))"),
        (Family::Incircle, 6) => {
            let p = b * (b + 2.0 * a) * (a2 + 2.0 * a * b + 3.0 * b2);
            let q = a * (a + 2.0 * b) * (3.0 * a2 + 2.0 * a * b + b2);
            let kk = a2 * b2 * (a - b).powi(2);
            quartic(
                [
                    p * p,
                    2.0 * p * q,
                    q * q,
                    -kk * b2 * (b + 2.0 * a).powi(2),
                    -kk * a2 * (a + 2.0 * b).powi(2),
                    0.0,
                ],
                "even quartic (P x² + Q y²)² = K (U x² + V y²)",
            )
        }
        (Family::Circumellipse, 3) => point("stationary at the center"),
        (Family::Circumellipse, 4) => circle(a - b, "circle a−b"),
        (Family::Circumellipse, 5) => circle((a - b) / 2.0, "circle (a−b)/2"),
        (Family::Circumellipse, 6) => ellipse(
            (a2 - b2) / (a + 2.0 * b),
            (a2 - b2) / (2.0 * a + b),
            "ellipse (a²−b²)/(a+2b), (a²−b²)/(2a+b)",
        ),
        (Family::Circumellipse, 1) => quartic(
            [
                1.0,
                2.0,
                1.0,
                -2.0 * (a + 3.0 * b) * (a + b),
                -2.0 * (a + b) * (3.0 * a + b),
                (a2 - b2).powi(2),
            ],
            "quartic (x²+y²)² − 2(a+3b)(a+b)x² − 2(a+b)(3a+b)y² + (a²−b²)²",
        ),
        (Family::Homothetic, 2) => point("stationary at the center"),
        (Family::Homothetic, 6) => {
            let s = (a2 - b2) / (2.0 * (a2 + b2));
            ellipse(a * s, b * s, "ellipse a(a²−b²)/(2(a²+b²)), b(a²−b²)/(2(a²+b²))")
        }
        (Family::Homothetic, 1) => quartic(
            [
                16.0 * a2 * b2,
                16.0 * (a2 * a2 + b2 * b2),
                16.0 * a2 * b2,
                -8.0 * b2 * (a2 * a2 + 5.0 * a2 * b2 + 2.0 * b2 * b2),
                -8.0 * a2 * (2.0 * a2 * a2 + 5.0 * a2 * b2 + b2 * b2),
                a2 * b2 * (a2 - b2).powi(2),
            ],
            "quartic 16(a²y²+b²x²)(a²x²+b²y²) − 8b²(a⁴+5a²b²+2b⁴)x² − 8a²(2a⁴+5a²b²+b⁴)y² + a²b²(a²−b²)²",
        ),
        (Family::Homothetic, 13) => circle((a - b) / 2.0, "circle (a−b)/2"),
        (Family::Homothetic, 14) => circle((a + b) / 2.0, "circle (a+b)/2"),
        (Family::Homothetic, 15) => circle((a - b).powi(2) / (2.0 * (a + b)), "circle (a−b)²/(2(a+b))"),
        (Family::Homothetic, 16) => circle((a + b).powi(2) / (2.0 * (a - b)), "circle (a+b)²/(2(a−b))"),
        _ => None,
    }
}

/// Classification of a sampled locus, with the comparison against its closed
/// form when there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusFit {
    pub family: Family,
    pub k: u32,
    pub derived: Derived,
    pub samples: usize,
    pub skipped: usize,
    pub class: LocusClass,
    pub label: String,
    pub diameter: f64,
    /// Residual of the fit backing the label (zero for stationary points).
    pub residual: f64,
    pub conic_residual: Option<f64>,
    pub quartic_residual: Option<f64>,
    pub geometry: Option<ConicGeometry>,
    pub centroid: Point2,
    pub expected: Option<ExpectedLocus>,
    pub class_matches: Option<bool>,
    /// Largest relative error of the fitted center/radii/axes.
    pub relative_error: Option<f64>,
    /// Angle between fitted and expected quartic coefficient vectors.
    pub quartic_angle: Option<f64>,
    /// Largest normalized residual of the expected curve on the samples.
    pub implicit_residual: Option<f64>,
    #[serde(skip)]
    pub points: Vec<Point2>,
    #[serde(skip)]
    pub params: Vec<f64>,
}

impl LocusFit {
    /// True when the class and, if known, the closed form agree within `tol`.
    pub fn matches_expected(&self, tol: f64) -> Option<bool> {
        let exp = self.expected.as_ref()?;
        let ok_class = self.class_matches.unwrap_or(false);
        let ok_params = match exp.kind {
            LocusKind::Quartic { .. } => self.implicit_residual.is_some_and(|r| r < tol),
            _ => self.relative_error.is_some_and(|e| e < tol),
        };
        Some(ok_class && ok_params)
    }
}

pub fn verify_locus(pair: &ConicPair, k: u32, derived: Derived, n: usize) -> Result<LocusFit> {
    verify_locus_with(default_registry(), pair, k, derived, n)
}

pub fn verify_locus_with(
    registry: &CenterRegistry,
    pair: &ConicPair,
    k: u32,
    derived: Derived,
    n: usize,
) -> Result<LocusFit> {
    let samples = sample_locus_with(registry, pair, k, derived, n)?;
    let scale = pair.scale();
    let cls = classify_locus(&samples.points, scale)?;
    let expected = match (derived, pair.axes()) {
        (Derived::Reference, Some((a, b))) => expected_locus(pair.family, k, a, b),
        _ => None,
    };
    Ok(assemble(pair.family, k, derived, samples, cls, expected, scale))
}

fn assemble(
    family: Family,
    k: u32,
    derived: Derived,
    samples: LocusSamples,
    cls: Classification,
    expected: Option<ExpectedLocus>,
    scale: f64,
) -> LocusFit {
    let pts = &samples.points;
    let centroid = pts.iter().fold(Point2::ORIGIN, |acc, &p| acc + p) * (1.0 / pts.len() as f64);
    let geometry = cls.geometry();
    let conic_residual = cls.conic_residual();
    let quartic_residual = cls.quartic.as_ref().map(|q| q.residual);
    let residual = match cls.class {
        LocusClass::StationaryPoint => 0.0,
        LocusClass::Circle | LocusClass::Ellipse => conic_residual.unwrap_or(0.0),
        LocusClass::Quartic => quartic_residual.unwrap_or(0.0),
        LocusClass::NonConic => conic_residual
            .into_iter()
            .chain(quartic_residual)
            .fold(f64::INFINITY, f64::min),
    };
    let mut fit = LocusFit {
        family,
        k,
        derived,
        samples: pts.len(),
        skipped: samples.skipped,
        class: cls.class,
        label: cls.class.label().to_string(),
        diameter: cls.diameter,
        residual,
        conic_residual,
        quartic_residual,
        geometry,
        centroid,
        expected: None,
        class_matches: None,
        relative_error: None,
        quartic_angle: None,
        implicit_residual: None,
        points: samples.points.clone(),
        params: samples.params.clone(),
    };
    let Some(exp) = expected else {
        return fit;
    };
    let implicit = pts.iter().map(|&p| exp.kind.residual_at(p)).fold(0.0, f64::max);
    fit.class_matches = Some(match exp.kind {
        LocusKind::Ellipse { a, b, .. } if (a - b).abs() < 1e-6 * a.max(b) => {
            matches!(cls.class, LocusClass::Circle | LocusClass::Ellipse)
        }
        ref kind => kind.class() == cls.class,
    });
    match &exp.kind {
        LocusKind::Point { at } => {
            let spread = pts.iter().map(|p| p.dist(*at)).fold(0.0, f64::max);
            fit.relative_error = Some(spread / scale);
            fit.implicit_residual = Some(spread / scale);
        }
        LocusKind::Circle { center, radius } => {
            fit.relative_error = geometry.map(|g| {
                (g.center.dist(*center) / scale)
                    .max((g.semi_major - radius).abs() / radius)
                    .max((g.semi_minor - radius).abs() / radius)
            });
            fit.implicit_residual = Some(implicit);
        }
        LocusKind::Ellipse { center, a, b } => {
            fit.relative_error = geometry.map(|g| {
                let (gx, gy) = g.axis_aligned_semi_axes();
                (g.center.dist(*center) / scale)
                    .max((gx - a).abs() / a)
                    .max((gy - b).abs() / b)
            });
            fit.implicit_residual = Some(implicit);
        }
        LocusKind::Quartic { curve } => {
            fit.quartic_angle = cls.quartic.as_ref().map(|q| q.quartic.angle_to(curve));
            fit.implicit_residual = Some(implicit);
        }
    }
    fit.expected = Some(exp);
    fit
}

/// Columns of the locus-type table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableColumn {
    Confocal,
    FamilyI,
    Poristic,
    ConfocalExcentral,
    FamilyII,
    PoristicExcentral,
    FamilyIII,
    Brocard,
}

impl TableColumn {
    pub const ALL: [TableColumn; 8] = [
        TableColumn::Confocal,
        TableColumn::FamilyI,
        TableColumn::Poristic,
        TableColumn::ConfocalExcentral,
        TableColumn::FamilyII,
        TableColumn::PoristicExcentral,
        TableColumn::FamilyIII,
        TableColumn::Brocard,
    ];

    pub fn header(self) -> &'static str {
        match self {
            TableColumn::Confocal => "Conf.",
            TableColumn::FamilyI => "F.I",
            TableColumn::Poristic => "Por.",
            TableColumn::ConfocalExcentral => "Conf.Exc.",
            TableColumn::FamilyII => "F.II",
            TableColumn::PoristicExcentral => "Por.Exc.",
            TableColumn::FamilyIII => "F.III",
            TableColumn::Brocard => "Broc.",
        }
    }

    /// Pair and derived triangle sampled for this column. The poristic pair
    /// has `R = (a+b)/2`, `r = ab/(a+b)`; the Brocard pair has circumradius
    /// `a` and the Brocard angle of the homothetic family.
    pub fn pair(self, a: f64, b: f64) -> Result<(ConicPair, Derived)> {
        let poristic = || ConicPair::poristic((a + b) / 2.0, a * b / (a + b));
        Ok(match self {
            TableColumn::Confocal => (ConicPair::confocal(a, b)?, Derived::Reference),
            TableColumn::FamilyI => (ConicPair::incircle(a, b)?, Derived::Reference),
            TableColumn::Poristic => (poristic()?, Derived::Reference),
            TableColumn::ConfocalExcentral => (ConicPair::confocal(a, b)?, Derived::Excentral),
            TableColumn::FamilyII => (ConicPair::circumellipse(a, b)?, Derived::Reference),
            TableColumn::PoristicExcentral => (poristic()?, Derived::Excentral),
            TableColumn::FamilyIII => (ConicPair::homothetic(a, b)?, Derived::Reference),
            TableColumn::Brocard => {
                (ConicPair::brocard(a, homothetic_brocard_angle(a, b))?, Derived::Reference)
            }
        })
    }
}

impl fmt::Display for TableColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header())
    }
}

impl FromStr for TableColumn {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "conf" | "confocal" => Ok(TableColumn::Confocal),
            "fi" | "i" | "incircle" => Ok(TableColumn::FamilyI),
            "por" | "poristic" => Ok(TableColumn::Poristic),
            "confexc" => Ok(TableColumn::ConfocalExcentral),
            "fii" | "ii" | "circumellipse" => Ok(TableColumn::FamilyII),
            "porexc" => Ok(TableColumn::PoristicExcentral),
            "fiii" | "iii" | "homothetic" => Ok(TableColumn::FamilyIII),
            "broc" | "brocard" => Ok(TableColumn::Brocard),
            _ => Err(GeometryError::Parse(format!("unknown table column `{s}`"))),
        }
    }
}

/// Expected labels, one row per center, columns in [`TableColumn::ALL`] order.
/// A trailing `'` means the locus is the conic carrying the (derived)
/// vertices, `''` that it is the inner conic, `C_5` that it is the circumcircle.
pub const TABLE1: [(u32, [&str; 8]); 19] = [
    (1, ["E", "P", "P", "X", "X", "X", "4", "X"]),
    (2, ["E", "E", "C", "E", "C", "P", "P", "C"]),
    (3, ["E", "C", "P", "E", "P", "P", "E", "P"]),
    (4, ["E", "E", "C", "E", "C", "P", "E", "C"]),
    (5, ["E", "C", "C", "E", "C", "P", "E", "C"]),
    (6, ["4", "4", "E", "P", "E", "C", "E", "P"]),
    (7, ["E", "E", "C", "X", "X", "X", "X", "X"]),
    (8, ["E", "E", "C", "X", "X", "X", "X", "X"]),
    (9, ["P", "E", "C", "X", "X", "X", "X", "X"]),
    (10, ["E", "E", "C", "X", "X", "X", "X", "X"]),
    (11, ["E''", "C''", "C''", "X", "X", "C_5", "X", "X"]),
    (12, ["E", "C", "C", "X", "X", "X", "X", "X"]),
    (13, ["X", "X", "X", "X", "X", "X", "C", "C"]),
    (14, ["X", "X", "X", "X", "X", "X", "C", "C"]),
    (15, ["X", "X", "X", "X", "X", "X", "C", "P"]),
    (16, ["X", "X", "X", "X", "X", "X", "C", "P"]),
    (99, ["X", "X", "C'", "X", "C'", "C'", "E'", "C'"]),
    (100, ["E'", "E'", "C'", "X", "C'", "C'", "X", "C'"]),
    (110, ["X", "X", "C'", "E'", "C'", "C'", "X", "C'"]),
];

/// Expected row of [`TABLE1`] for `X_k`.
pub fn table1_row(k: u32) -> Option<[&'static str; 8]> {
    TABLE1.iter().find(|(kk, _)| *kk == k).map(|(_, row)| *row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Incidence {
    /// On the conic through the vertices of the sampled (derived) triangles.
    VertexConic,
    /// On the inner conic of the pair.
    Caustic,
    /// On the outer circle of the pair.
    Circumcircle,
}

/// Parses a table label into its shape and incidence decoration.
pub fn parse_label(label: &str) -> (String, Option<Incidence>) {
    if let Some(base) = label.strip_suffix("''") {
        (base.to_string(), Some(Incidence::Caustic))
    } else if let Some(base) = label.strip_suffix('\'') {
        (base.to_string(), Some(Incidence::VertexConic))
    } else if let Some(base) = label.strip_suffix("_5") {
        (base.to_string(), Some(Incidence::Circumcircle))
    } else {
        (label.to_string(), None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub k: u32,
    pub column: TableColumn,
    pub expected: Option<String>,
    /// Observed label, or `?` when the locus could not be evaluated.
    pub observed: String,
    pub incidence: Option<Incidence>,
    /// Largest normalized residual of the locus on the conic named by the decoration.
    pub incidence_residual: Option<f64>,
    pub conic_residual: Option<f64>,
    pub skipped: usize,
    pub error: Option<String>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusTable {
    pub a: f64,
    pub b: f64,
    pub samples: usize,
    pub columns: Vec<TableColumn>,
    pub ks: Vec<u32>,
    /// Row-major: `cells[i * columns.len() + j]`.
    pub cells: Vec<TableCell>,
}

impl LocusTable {
    pub fn cell(&self, k: u32, column: TableColumn) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.k == k && c.column == column)
    }

    pub fn failures(&self) -> Vec<&TableCell> {
        self.cells.iter().filter(|c| c.pass == Some(false)).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    /// Plain-text grid of observed labels; mismatches are marked with `*`.
    pub fn render(&self) -> String {
        let mut out = format!("{:>6}", "");
        for c in &self.columns {
            out.push_str(&format!("{:>11}", c.header()));
        }
        out.push('\n');
        for (i, k) in self.ks.iter().enumerate() {
            out.push_str(&format!("{:>6}", format!("X{k}")));
            for j in 0..self.columns.len() {
                let cell = &self.cells[i * self.columns.len() + j];
                let mut s = cell.observed.clone();
                if let Some(exp) = &cell.expected {
                    let (_, inc) = parse_label(exp);
                    if inc.is_some() && cell.pass == Some(true) {
                        s = exp.clone();
                    }
                }
                if cell.pass == Some(false) {
                    s.push('*');
                }
                out.push_str(&format!("{s:>11}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Incidence residuals above this are reported as failures.
pub const INCIDENCE_TOL: f64 = 1e-8;

pub fn locus_table(columns: &[TableColumn], ks: &[u32], a: f64, b: f64, n: usize) -> Result<LocusTable> {
    locus_table_with(default_registry(), columns, ks, a, b, n)
}

pub fn locus_table_with(
    registry: &CenterRegistry,
    columns: &[TableColumn],
    ks: &[u32],
    a: f64,
    b: f64,
    n: usize,
) -> Result<LocusTable> {
    for &k in ks {
        registry.get(k)?;
    }
    let pairs = columns
        .iter()
        .map(|c| c.pair(a, b))
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::with_capacity(ks.len() * columns.len());
    for &k in ks {
        let row = table1_row(k);
        for (j, &column) in columns.iter().enumerate() {
            let idx = TableColumn::ALL.iter().position(|&c| c == column).unwrap_or(0);
            let expected = row.map(|r| r[idx].to_string());
            let (pair, derived) = &pairs[j];
            cells.push(table_cell(registry, k, column, pair, *derived, expected, n));
        }
    }
    Ok(LocusTable {
        a,
        b,
        samples: n,
        columns: columns.to_vec(),
        ks: ks.to_vec(),
        cells,
    })
}

fn table_cell(
    registry: &CenterRegistry,
    k: u32,
    column: TableColumn,
    pair: &ConicPair,
    derived: Derived,
    expected: Option<String>,
    n: usize,
) -> TableCell {
    let mut cell = TableCell {
        k,
        column,
        expected: expected.clone(),
        observed: "?".to_string(),
        incidence: None,
        incidence_residual: None,
        conic_residual: None,
        skipped: 0,
        error: None,
        pass: None,
    };
    let sampled = sample_locus_with(registry, pair, k, derived, n)
        .and_then(|s| classify_locus(&s.points, pair.scale()).map(|c| (s, c)));
    let (samples, cls) = match sampled {
        Ok(v) => v,
        Err(e) => {
            cell.error = Some(e.to_string());
            cell.pass = expected.map(|_| false);
            return cell;
        }
    };
    cell.observed = cls.class.label().to_string();
    cell.conic_residual = cls.conic_residual();
    cell.skipped = samples.skipped;
    let Some(exp) = expected else {
        return cell;
    };
    let (base, incidence) = parse_label(&exp);
    let shape_ok = match base.as_str() {
        "X" => matches!(cls.class, LocusClass::Quartic | LocusClass::NonConic),
        other => other == cls.class.label(),
    };
    let mut pass = shape_ok;
    if let Some(inc) = incidence {
        cell.incidence = Some(inc);
        match incidence_residual(pair, derived, inc, &samples.points, n) {
            Ok(r) => {
                cell.incidence_residual = Some(r);
                pass &= r < INCIDENCE_TOL;
            }
            Err(e) => {
                cell.error = Some(e.to_string());
                pass = false;
            }
        }
    }
    cell.pass = Some(pass);
    cell
}

fn incidence_residual(
    pair: &ConicPair,
    derived: Derived,
    incidence: Incidence,
    points: &[Point2],
    n: usize,
) -> Result<f64> {
    let on = |e: &AxisEllipse| points.iter().map(|&p| e.implicit_residual(p).abs()).fold(0.0, f64::max);
    match incidence {
        Incidence::Caustic => Ok(on(&pair.inner)),
        Incidence::Circumcircle => Ok(on(&pair.outer)),
        Incidence::VertexConic => {
            let vertices: Vec<Point2> = sweep_parameters(n)
                .into_iter()
                .filter_map(|t| family_triangle(pair, t).and_then(|tri| derived.apply(&tri)).ok())
                .flat_map(|tri| tri.vertices)
                .collect();
            let fit = fit_conic(&vertices)?;
            let g = fit.geometry.ok_or_else(|| {
                GeometryError::DegenerateFit("vertex locus is not an ellipse".to_string())
            })?;
            let scale = g.semi_major;
            // normalize by the gradient magnitude so the value is a distance over the scale
            let c = fit.conic;
            Ok(points
                .iter()
                .map(|&p| {
                    let [ca, cb, cc, cd, ce, _] = c.coeffs;
                    let gx = 2.0 * ca * p.x + cb * p.y + cd;
                    let gy = cb * p.x + 2.0 * cc * p.y + ce;
                    let grad = gx.hypot(gy).max(f64::MIN_POSITIVE);
                    (c.eval(p) / grad).abs() / scale
                })
                .fold(0.0, f64::max))
        }
    }
}

/// Centers with a row in [`TABLE1`].
pub fn table1_centers() -> Vec<u32> {
    TABLE1.iter().map(|(k, _)| *k).collect()
}

/// Result of one conjecture probe: the X₁ locus label and conic residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureProbe {
    pub outer: (f64, f64),
    pub inner: (f64, f64),
    pub confocal: bool,
    pub class: LocusClass,
    pub conic_residual: f64,
}

/// Classifies the X₁ locus of `pair`.
pub fn probe_conjecture1(pair: &ConicPair, n: usize) -> Result<ConjectureProbe> {
    let samples = sample_locus(pair, 1, Derived::Reference, n)?;
    let cls = classify_locus(&samples.points, pair.scale())?;
    let conic_residual = match cls.class {
        LocusClass::StationaryPoint => 0.0,
        _ => cls.conic_residual().unwrap_or(f64::INFINITY),
    };
    Ok(ConjectureProbe {
        outer: (pair.outer.a, pair.outer.b),
        inner: (pair.inner.a, pair.inner.b),
        confocal: pair.family == Family::Confocal,
        class: cls.class,
        conic_residual,
    })
}

pub const CONJECTURE_SEED: u64 = 0x00c0_ffee_2020;

/// Probes over random concentric, axis-aligned pairs satisfying the triangle
/// closure condition. This is numerical evidence only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureBatch {
    pub seed: u64,
    pub non_confocal: Vec<ConjectureProbe>,
    pub confocal: Vec<ConjectureProbe>,
    /// Non-confocal probes must have a conic residual above this (or be stationary).
    pub non_conic_floor: f64,
    /// Confocal probes must have a conic residual below this.
    pub conic_ceiling: f64,
}

impl ConjectureBatch {
    pub fn non_confocal_ok(&self) -> bool {
        self.non_confocal.iter().all(|p| {
            p.class == LocusClass::StationaryPoint || p.conic_residual > self.non_conic_floor
        })
    }

    pub fn confocal_ok(&self) -> bool {
        self.confocal
            .iter()
            .all(|p| p.class == LocusClass::Ellipse && p.conic_residual < self.conic_ceiling)
    }

    pub fn min_non_confocal_residual(&self) -> f64 {
        self.non_confocal
            .iter()
            .filter(|p| p.class != LocusClass::StationaryPoint)
            .map(|p| p.conic_residual)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_confocal_residual(&self) -> f64 {
        self.confocal.iter().map(|p| p.conic_residual).fold(0.0, f64::max)
    }
}

/// Outer semi-axes `a ∈ [1, 3]`, `b/a ∈ [0.35, 0.85]`. Non-confocal inner
/// semi-axes are `a' ∈ [0.15a, 0.85a]`, `b' = b(1 − a'/a)`, kept at least
/// `0.05a` away from the confocal caustic.
pub fn conjecture1_batch(seed: u64, non_confocal: usize, confocal: usize, n: usize) -> Result<ConjectureBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ConjectureBatch {
        seed,
        non_confocal: Vec::with_capacity(non_confocal),
        confocal: Vec::with_capacity(confocal),
        non_conic_floor: 1e-3,
        conic_ceiling: 1e-9,
    };
    while out.non_confocal.len() < non_confocal {
        let a = rng.random_range(1.0..3.0);
        let b = a * rng.random_range(0.35..0.85);
        let ia = a * rng.random_range(0.15..0.85);
        let ib = b * (1.0 - ia / a);
        let (ca, _) = confocal_caustic(a, b)?;
        if (ia - ca).abs() < 0.05 * a {
            continue;
        }
        let pair = ConicPair::general(
            Family::Incircle,
            AxisEllipse::centered(a, b)?,
            AxisEllipse::centered(ia, ib)?,
            3,
        );
        let mut probe = probe_conjecture1(&pair, n)?;
        probe.confocal = false;
        out.non_confocal.push(probe);
    }
    while out.confocal.len() < confocal {
        let a = rng.random_range(1.0..3.0);
        let b = a * rng.random_range(0.35..0.85);
        out.confocal.push(probe_conjecture1(&ConicPair::confocal(a, b)?, n)?);
    }
    Ok(out)
}

/// How `(a, b)` is fixed for a given ratio `ρ = a/b` in the X₁₆ scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `b = 1`.
    FixB,
    /// `a = 1`.
    FixA,
    /// `ab = 1`.
    FixArea,
    /// `a + b = 2`.
    FixPerimeterlike,
    /// `a² + b² = 2`.
    FixSumSquares,
}

impl Normalization {
    pub const ALL: [Normalization; 5] = [
        Normalization::FixB,
        Normalization::FixA,
        Normalization::FixArea,
        Normalization::FixPerimeterlike,
        Normalization::FixSumSquares,
    ];

    pub fn axes(self, ratio: f64) -> (f64, f64) {
        match self {
            Normalization::FixB => (ratio, 1.0),
            Normalization::FixA => (1.0, 1.0 / ratio),
            Normalization::FixArea => (ratio.sqrt(), 1.0 / ratio.sqrt()),
            Normalization::FixPerimeterlike => {
                let b = 2.0 / (1.0 + ratio);
                (ratio * b, b)
            }
            Normalization::FixSumSquares => {
                let b = (2.0 / (1.0 + ratio * ratio)).sqrt();
                (ratio * b, b)
            }
        }
    }
}

impl FromStr for Normalization {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fixb" => Ok(Normalization::FixB),
            "fixa" => Ok(Normalization::FixA),
            "fixarea" => Ok(Normalization::FixArea),
            "fixperimeterlike" | "fixsum" => Ok(Normalization::FixPerimeterlike),
            "fixsumsquares" => Ok(Normalization::FixSumSquares),
            _ => Err(GeometryError::Parse(format!("unknown normalization `{s}`"))),
        }
    }
}

/// Stretch of a sampled radius curve on which it is monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSegment {
    pub from: f64,
    pub to: f64,
    pub increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct X16Scan {
    pub normalization: Normalization,
    /// `(a/b, radius)` pairs.
    pub curve: Vec<(f64, f64)>,
    /// Refined location of an interior minimum, if the curve has one.
    pub argmin: Option<f64>,
    pub min_radius: Option<f64>,
    pub segments: Vec<MonotoneSegment>,
}

/// Measured radius of the X₁₆ locus (fitted circle) over the homothetic family.
pub fn x16_radius(a: f64, b: f64, n: usize) -> Result<f64> {
    let pair = ConicPair::homothetic(a, b)?;
    let samples = sample_locus(&pair, 16, Derived::Reference, n)?;
    let fit = fit_conic(&samples.points)?;
    match fit.geometry {
        Some(g) => Ok(0.5 * (g.semi_major + g.semi_minor)),
        None => Err(GeometryError::DegenerateFit("X16 locus is not an ellipse".to_string())),
    }
}

pub fn x16_radius_scan(ratios: &[f64], normalization: Normalization) -> Result<X16Scan> {
    const N: usize = 120;
    if ratios.iter().any(|&r| !(r > 1.0 && r.is_finite())) {
        return Err(GeometryError::Domain("ratios must lie in (1, ∞)".to_string()));
    }
    let mut ratios = ratios.to_vec();
    ratios.sort_by(f64::total_cmp);
    let radius = |rho: f64| {
        let (a, b) = normalization.axes(rho);
        x16_radius(a, b, N)
    };
    let curve = ratios
        .iter()
        .map(|&r| radius(r).map(|v| (r, v)))
        .collect::<Result<Vec<_>>>()?;
    let mut segments: Vec<MonotoneSegment> = Vec::new();
    for w in curve.windows(2) {
        let increasing = w[1].1 > w[0].1;
        match segments.last_mut() {
            Some(s) if s.increasing == increasing => s.to = w[1].0,
            _ => segments.push(MonotoneSegment { from: w[0].0, to: w[1].0, increasing }),
        }
    }
    let mut argmin = None;
    let mut min_radius = None;
    if let Some((i, _)) = curve
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
    {
        if i > 0 && i + 1 < curve.len() {
            let (x, v) = golden_section(curve[i - 1].0, curve[i + 1].0, 1e-7, |r| {
                radius(r).unwrap_or(f64::INFINITY)
            });
            argmin = Some(x);
            min_radius = Some(v);
        }
    }
    Ok(X16Scan {
        normalization,
        curve,
        argmin,
        min_radius,
        segments,
    })
}

/// Ratios `1 + step·i` for `i = 1..=count`.
pub fn ratio_grid(step: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| 1.0 + step * i as f64).collect()
}

fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// A center whose locus over a family should have a given class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub family: Family,
    pub k: u32,
    pub expected: LocusClass,
    pub observed: Option<LocusClass>,
    pub conic_residual: Option<f64>,
}

impl SpotCheck {
    pub fn pass(&self) -> bool {
        self.observed == Some(self.expected)
    }
}

/// X₄₀ and X₅₇ trace circles over the incircle family; X₃₉ an ellipse over
/// the homothetic family.
pub fn spot_checks(a: f64, b: f64, n: usize) -> Result<Vec<SpotCheck>> {
    let cases = [
        (ConicPair::incircle(a, b)?, 40, LocusClass::Circle),
        (ConicPair::incircle(a, b)?, 57, LocusClass::Circle),
        (ConicPair::homothetic(a, b)?, 39, LocusClass::Ellipse),
    ];
    Ok(cases
        .into_iter()
        .map(|(pair, k, expected)| {
            let cls = sample_locus(&pair, k, Derived::Reference, n)
                .and_then(|s| classify_locus(&s.points, pair.scale()))
                .ok();
            SpotCheck {
                family: pair.family,
                k,
                expected,
                observed: cls.as_ref().map(|c| c.class),
                conic_residual: cls.as_ref().and_then(|c| c.conic_residual()),
            }
        })
        .collect())
}

/// Every center of `triangle` that the registry can evaluate.
pub fn all_centers(registry: &CenterRegistry, triangle: &Triangle) -> Vec<(u32, Point2)> {
    registry
        .indices()
        .filter_map(|k| registry.center(triangle, k).ok().map(|p| (k, p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fit(pair: &ConicPair, k: u32) -> LocusFit {
        verify_locus(pair, k, Derived::Reference, DEFAULT_SAMPLES).unwrap()
    }

    #[test]
    fn closed_forms_at_two_shapes() {
        for (a, b) in [(2.0, 1.0), (3.0, 2.0)] {
            let pairs = [
                ConicPair::confocal(a, b).unwrap(),
                ConicPair::incircle(a, b).unwrap(),
                ConicPair::circumellipse(a, b).unwrap(),
                ConicPair::homothetic(a, b).unwrap(),
            ];
            for pair in &pairs {
                for k in [1, 2, 3, 4, 5, 6, 9, 13, 14, 15, 16] {
                    if expected_locus(pair.family, k, a, b).is_none() {
                        continue;
                    }
                    let f = fit(pair, k);
                    assert_eq!(f.matches_expected(1e-6), Some(true), "{} X{k} at ({a},{b}): {f:?}", pair.family);
                }
            }
        }
    }

    #[test]
    fn sample_examples() {
        let f = fit(&ConicPair::incircle(2.0, 1.0).unwrap(), 2);
        let (x, y) = f.geometry.unwrap().axis_aligned_semi_axes();
        assert_relative_eq!(x, 2.0 / 9.0, max_relative = 1e-9);
        assert_relative_eq!(y, 1.0 / 9.0, max_relative = 1e-9);
        let f = fit(&ConicPair::incircle(2.0, 1.0).unwrap(), 4);
        let (x, y) = f.geometry.unwrap().axis_aligned_semi_axes();
        assert_relative_eq!(x, 1.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(y, 2.0 / 3.0, max_relative = 1e-9);
        let f = fit(&ConicPair::circumellipse(2.0, 1.0).unwrap(), 4);
        assert_eq!(f.class, LocusClass::Circle);
        assert_relative_eq!(f.geometry.unwrap().semi_major, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn expected_examples() {
        let LocusKind::Circle { radius, .. } = expected_locus(Family::Incircle, 5, 2.0, 1.0).unwrap().kind else {
            panic!()
        };
        assert_relative_eq!(radius, 1.0 / 12.0);
        let LocusKind::Ellipse { a, b, .. } = expected_locus(Family::Circumellipse, 6, 2.0, 1.0).unwrap().kind else {
            panic!()
        };
        assert_relative_eq!(a, 0.75);
        assert_relative_eq!(b, 0.6);
        let LocusKind::Ellipse { a, b, .. } = expected_locus(Family::Homothetic, 6, 2.0, 1.0).unwrap().kind else {
            panic!()
        };
        assert_relative_eq!(a, 0.6);
        assert_relative_eq!(b, 0.3);
        let LocusKind::Ellipse { a, b, .. } = expected_locus(Family::Confocal, 1, 2.0, 1.0).unwrap().kind else {
            panic!()
        };
        let s13 = 13f64.sqrt();
        assert_relative_eq!(a, (s13 - 1.0) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(b, 4.0 - s13, max_relative = 1e-14);
        assert!(expected_locus(Family::Poristic, 1, 2.0, 1.0).is_none());
    }

    #[test]
    fn circumellipse_incenter_quartic_literal() {
        let exp = expected_locus(Family::Circumellipse, 1, 2.0, 1.0).unwrap();
        let LocusKind::Quartic { curve } = &exp.kind else { panic!() };
        let lit = QuarticImplicit::from_even([1.0, 2.0, 1.0, -30.0, -42.0, 9.0]);
        assert!(curve.angle_to(&lit) < 1e-14);
        let f = fit(&ConicPair::circumellipse(2.0, 1.0).unwrap(), 1);
        assert_eq!(f.class, LocusClass::Quartic);
        assert!(f.quartic_angle.unwrap() < 1e-6);
    }

    #[test]
    fn quartics_hold_on_every_sample() {
        let cases = [
            (ConicPair::incircle(2.0, 1.0).unwrap(), 6),
            (ConicPair::circumellipse(2.0, 1.0).unwrap(), 1),
            (ConicPair::homothetic(2.0, 1.0).unwrap(), 1),
            (ConicPair::confocal(2.0, 1.0).unwrap(), 6),
        ];
        for (pair, k) in cases {
            let f = fit(&pair, k);
            assert!(f.implicit_residual.unwrap() < 1e-8, "{} X{k}: {f:?}", pair.family);
            assert!(f.quartic_angle.unwrap() < 1e-6, "{} X{k}: {f:?}", pair.family);
            // the isolated origin point is never approached
            let nearest = f.points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest > 1e-3);
        }
    }

    #[test]
    fn circumcenter_circle_is_euler_distance() {
        let (a, b) = (2.0, 1.0);
        let big_r: f64 = (a + b) / 2.0;
        let r = a * b / (a + b);
        let f = fit(&ConicPair::incircle(a, b).unwrap(), 3);
        assert_relative_eq!(
            f.geometry.unwrap().semi_major,
            (big_r * (big_r - 2.0 * r)).sqrt(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn orthic_skip_counted() {
        let pair = ConicPair::confocal(2.0, 1.0).unwrap();
        let s = sample_locus(&pair, 1, Derived::Orthic, 64).unwrap();
        assert_eq!(s.points.len() + s.skipped, 64);
        assert!(sample_locus(&pair, 1, Derived::Reference, 4).is_err());
        assert!(matches!(
            sample_locus(&pair, 9999, Derived::Reference, 64),
            Err(GeometryError::UnknownCenter(9999))
        ));
    }

    #[test]
    fn table_reproduced() {
        let t = locus_table(&TableColumn::ALL, &table1_centers(), 2.0, 1.0, DEFAULT_SAMPLES).unwrap();
        let bad: Vec<_> = t.failures().into_iter().map(|c| (c.k, c.column, c.expected.clone(), c.observed.clone(), c.incidence_residual)).collect();
        assert!(bad.is_empty(), "{bad:?}\n{}", t.render());
        assert_eq!(t.cell(1, TableColumn::FamilyI).unwrap().observed, "P");
        assert_eq!(t.cell(4, TableColumn::FamilyIII).unwrap().observed, "E");
        assert_eq!(t.cell(15, TableColumn::Brocard).unwrap().observed, "P");
    }

    #[test]
    fn spot_checks_pass() {
        for c in spot_checks(2.0, 1.0, DEFAULT_SAMPLES).unwrap() {
            assert!(c.pass(), "{c:?}");
        }
    }

    #[test]
    fn conjecture_examples() {
        let p = probe_conjecture1(&ConicPair::confocal(2.0, 1.0).unwrap(), DEFAULT_SAMPLES).unwrap();
        assert_eq!(p.class, LocusClass::Ellipse);
        assert!(p.conic_residual < 1e-9);
        let p = probe_conjecture1(&ConicPair::incircle(2.0, 1.0).unwrap(), DEFAULT_SAMPLES).unwrap();
        assert_eq!(p.class, LocusClass::StationaryPoint);
        let p = probe_conjecture1(&ConicPair::homothetic(2.0, 1.0).unwrap(), DEFAULT_SAMPLES).unwrap();
        assert_eq!(p.class, LocusClass::Quartic);
        assert!(p.conic_residual > 1e-4);
    }

    #[test]
    fn random_batch_separates_confocal() {
        let batch = conjecture1_batch(CONJECTURE_SEED, 20, 5, 120).unwrap();
        assert!(batch.confocal_ok());
        assert!(batch.non_confocal.iter().all(|p| p.class != LocusClass::Ellipse && p.class != LocusClass::Circle));
        assert!(batch.min_non_confocal_residual() > 1e3 * batch.max_confocal_residual());
    }

    #[test]
    fn x16_radius_closed_form() {
        for (a, b) in [(2.0, 1.0), (3.0, 1.0), (3.0, 2.0), (5.0, 1.0)] {
            assert_relative_eq!(x16_radius(a, b, 120).unwrap(), (a + b).powi(2) / (2.0 * (a - b)), max_relative = 1e-9);
        }
    }

    #[test]
    fn x16_scan_fix_b() {
        let scan = x16_radius_scan(&ratio_grid(0.25, 24), Normalization::FixB).unwrap();
        assert!((scan.argmin.unwrap() - 3.0).abs() < 1e-3, "{scan:?}");
        assert_eq!(scan.segments.len(), 2);
        assert!(!scan.segments[0].increasing && scan.segments[1].increasing);
    }
}
