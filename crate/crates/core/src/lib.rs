//! Gromov–Hausdorff distances between spheres: geometry of `S^n`, finite
//! metric spaces, coverings, Vietoris–Rips complexes, odd maps and the
//! resulting table of bounds.

pub mod covering;
pub mod error;
pub mod finite_metric;
pub mod gh_bounds;
pub mod io;
pub mod odd_maps;
pub mod sampling;
pub mod sphere_geom;
pub mod vr_complex;

pub use error::{Error, Result};
pub use sphere_geom::SpherePoint;
