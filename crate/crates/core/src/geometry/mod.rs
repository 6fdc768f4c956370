//! Model geometries and their homogeneous curvature packages.

mod catalog;
pub mod lie;
mod spec;

pub use catalog::{
    curvature_of, riemann_of, unit_sphere_volume, volume_of, HomogeneousCurvature, Volume,
};
pub use lie::{koszul_connection, Connection, StructureConstants};
pub use spec::{Algebra, GeometrySpec, NamedAlgebra};
