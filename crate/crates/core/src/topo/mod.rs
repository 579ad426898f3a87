//! Combinatorial manifolds in dimensions 0, 1 and 2.

pub mod builders;
pub mod canonical;
pub mod classes;
pub mod classify;
pub mod homology;
pub mod loops;
pub mod pachner;
pub mod text;
pub mod triangulation;

pub use canonical::surface_code;
pub use classes::{Closed0Class, Closed1Class, ClosedSurfaceClass};
pub use classify::{classify_points, classify_surface, count_circles, euler_characteristic};
pub use homology::{homology_ranks, Homology};
pub use loops::LoopKey;
pub use pachner::{apply_pachner, PachnerKind, PachnerMove};
pub use text::{parse_triangulation, write_triangulation};
pub use triangulation::{edge, BoundarySide, Cell, Edge, Triangulation, VertexId, EPS_GEOM};
