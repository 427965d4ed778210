//! Trilinear expressions in the sidelengths, evaluated with cyclic rotation.

use exmex::prelude::*;
use exmex::FlatEx;

use crate::error::{GeometryError, Result};

/// Names an expression may refer to.
pub const SYMBOLS: [&str; 23] = [
    "a", "b", "c", "s1", "s2", "s3", "A", "B", "C", "cosA", "cosB", "cosC", "sinA", "sinB",
    "sinC", "SA", "SB", "SC", "area", "S", "pi", "PI", "sqrt3",
];

/// The first trilinear coordinate as a function of `(s₁, s₂, s₃)`; the other
/// two follow by rotating the sidelengths.
#[derive(Debug, Clone)]
pub struct TrilinearExpr {
    source: String,
    ex: FlatEx<f64>,
    slots: Vec<usize>,
}

impl PartialEq for TrilinearExpr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl TrilinearExpr {
    pub fn parse(source: &str) -> Result<Self> {
        let ex = FlatEx::<f64>::parse(source)
            .map_err(|e| GeometryError::Parse(format!("`{source}`: {}", e.msg())))?;
        let slots = ex
            .var_names()
            .iter()
            .map(|v| {
                SYMBOLS
                    .iter()
                    .position(|s| s == v)
                    .ok_or_else(|| GeometryError::Parse(format!("unknown symbol `{v}` in `{source}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source: source.to_string(),
            ex,
            slots,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value with the sidelengths in the given order; angles and the
    /// Conway symbols are computed for that order.
    pub fn eval(&self, sides: [f64; 3]) -> Result<f64> {
        let env = environment(sides);
        let vals: Vec<f64> = self.slots.iter().map(|&i| env[i]).collect();
        self.ex
            .eval(&vals)
            .map_err(|e| GeometryError::Parse(format!("`{}`: {}", self.source, e.msg())))
    }

    /// `(u : v : w)` by cyclic rotation `(a,b,c) → (b,c,a) → (c,a,b)`.
    pub fn trilinears(&self, sides: [f64; 3]) -> Result<[f64; 3]> {
        let [a, b, c] = sides;
        Ok([
            self.eval([a, b, c])?,
            self.eval([b, c, a])?,
            self.eval([c, a, b])?,
        ])
    }
}

fn environment([a, b, c]: [f64; 3]) -> [f64; 23] {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let cos_a = ((b2 + c2 - a2) / (2.0 * b * c)).clamp(-1.0, 1.0);
    let cos_b = ((c2 + a2 - b2) / (2.0 * c * a)).clamp(-1.0, 1.0);
    let cos_c = ((a2 + b2 - c2) / (2.0 * a * b)).clamp(-1.0, 1.0);
    let s = 0.5 * (a + b + c);
    let area = (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt();
    // sines from the area keep them consistent with the cosines
    let sin_a = 2.0 * area / (b * c);
    let sin_b = 2.0 * area / (c * a);
    let sin_c = 2.0 * area / (a * b);
    [
        a,
        b,
        c,
        a,
        b,
        c,
        cos_a.acos(),
        cos_b.acos(),
        cos_c.acos(),
        cos_a,
        cos_b,
        cos_c,
        sin_a,
        sin_b,
        sin_c,
        0.5 * (b2 + c2 - a2),
        0.5 * (c2 + a2 - b2),
        0.5 * (a2 + b2 - c2),
        area,
        2.0 * area,
        std::f64::consts::PI,
        std::f64::consts::PI,
        3f64.sqrt(),
    ]
}
