//! Exact-arithmetic engine for genus-zero quasimap invariants of smooth
//! projective toric varieties and the restricted invariants of their very
//! ample hypersurfaces.
//!
//! The pipeline: validate a fan and a hypersurface class (`toric`), build the
//! rational Chow ring with exact Groebner normal forms (`chow`), assemble the
//! closed-form two-pointed S-function (`givental`) inside z-Laurent and
//! Novikov series arithmetic (`series`), run the quantum Lefschetz division
//! and the relative ladder (`lefschetz`), and drive the general tangency
//! recursion symbolically (`recursion`). Every coefficient anywhere is a
//! `BigRational`; there is no floating point in the engine.

pub mod acceptance;
pub mod chow;
pub mod error;
pub mod givental;
pub mod lefschetz;
pub mod recursion;
pub mod series;
pub mod toric;

pub use chow::{ChowElement, ChowRing, PairedBasis, Rat};
pub use error::{EngineError, Result};
pub use series::{NovikovSeries, ScalarQSeries, ZElement};
pub use toric::{CurveClass, DivisorClass, Fan, Geometry, GeometryFlags};

/// Named geometries used throughout the verification suite.
pub const BUILTIN_GEOMETRIES: [&str; 5] = [
    "p2-line",
    "p3-quadric",
    "p3-cubic",
    "p3-quartic",
    "quintic",
];

/// Construct a built-in geometry by name: a projective space together with a
/// hypersurface degree, flags asserted.
pub fn builtin_geometry(name: &str) -> Result<Geometry> {
    let (n, y) = match name {
        "p2-line" => (2usize, 1i64),
        "p3-quadric" => (3, 2),
        "p3-cubic" => (3, 3),
        "p3-quartic" => (3, 4),
        "quintic" => (4, 5),
        other => {
            return Err(EngineError::InvalidInput(format!(
                "unknown geometry '{other}'; built-ins are {}",
                BUILTIN_GEOMETRIES.join(", ")
            )))
        }
    };
    Geometry::new(
        toric::projective_space(n),
        toric::pn_divisor(n, y),
        toric::pn_divisor(n, 1),
        GeometryFlags {
            very_ample_y: true,
            contains_all_curve_classes: true,
        },
    )
}
