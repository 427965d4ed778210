//! Poncelet 3-periodic families in concentric conic pairs, the poristic and
//! Brocard porisms, and numerical checks of their invariants, loci and
//! mutual transformations.

pub mod centers;
pub mod cli;
pub mod conic;
pub mod error;
pub mod fit;
pub mod invariants;
pub mod loci;
pub mod orbits;
pub mod transforms;
pub mod triangle;

pub use centers::{center, CenterRegistry, Derived};
pub use conic::{confocal_caustic, AxisEllipse, ConicImplicit, ConicPair, Family, PairParams, Point2, QuarticImplicit};
pub use error::{GeometryError, Result};
pub use fit::{classify_locus, fit_conic, fit_quartic, LocusClass};
pub use orbits::{Branch, NGonOrbit};
pub use triangle::{Triangle, TriangleMetrics};
