//! Locating exceptional Dehn-surgery curves in triangulated 3-manifolds.
//!
//! The pipeline: ingest a generalised triangulation and dualize it to a
//! handle structure (`triangulation`), model each 0-handle boundary as a
//! labeled sphere complex (`surface`), measure states with the well-ordered
//! complexity calculus (`complexity`), enumerate the per-tetrahedron catalog
//! of graphs and tangles by strict descent (`engine`), then tile a given
//! triangulation with catalog pieces and certify candidates homologically
//! (`assemble`, `homology`).

pub mod complexity;
pub mod engine;
pub mod homology;
pub mod surface;
pub mod triangulation;
pub mod util;

pub use complexity::{Complexity, ComplexitySet, ComplexityTriple, ExtendedComplexity};
pub use homology::{IntMatrix, TorusSlope};
