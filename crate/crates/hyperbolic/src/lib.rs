//! Numerical laboratory for hyperbolic triangle groups: reflection
//! matrices in the hyperboloid model, breadth-first Cayley balls, and
//! empirical checks of slim triangles, quasigeodesic periodic words and
//! aperiodic elements in the word metric.

pub mod aperiodic;
pub mod ball;
pub mod error;
pub mod isometry;
pub mod quasi;
pub mod slimness;
pub mod torsion;
pub mod triangle;

pub use aperiodic::{aperiodicity_scan, Aperiodicity};
pub use ball::{cayley_ball, CayleyBall};
pub use error::{LabError, Result};
pub use isometry::Isometry;
pub use quasi::{quasigeodesic_fit, QuasiFit};
pub use slimness::{empirical_slimness, SlimnessReport};
pub use torsion::{torsion_profile, TorsionProfile};
pub use triangle::{build_reflections, reflection_ball, rotation_ball, TriangleGroupSpec};
