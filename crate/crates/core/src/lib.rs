//! Geometric preferential-attachment networks on the unit-area sphere.
//!
//! Three growth models (base, hybrid, self-loop) and the measurements used to
//! study them: degree laws, diameter, conductance of geometric
//! neighbourhoods, recursive-tree statistics and concentration of the local
//! attachment mass.

pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod index;
pub mod metrics;
pub mod params;
pub mod sphere;

pub use error::{Error, Result};
pub use generators::{generate, ModelConfig, ModelKind};
pub use graph::{DegreeKind, EdgeKind, EvolvingGraph, VertexId};
pub use index::CapIndex;
pub use sphere::{angular_distance, cap_area, sample_uniform, AngularRadius, SpherePoint};
