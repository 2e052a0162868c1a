//! An explicit symplectic embedding of the open unit cube `(0,1)^{2n}` into
//! the polydisc `(0,1)^{2n−1} × (0,c)` whose sections all have area `1/c`
//! and path-connected complements, built from a Lagrangian shear, wrapping,
//! and area-preserving cylinder-to-square maps. Also the derived embedding of
//! the ball whose section hulls have area at most `a = 1/c`.
//!
//! The crate evaluates the maps in closed form and ships the numerical
//! checks: symplecticity, injectivity, containment, section areas, raster
//! topology of section complements and bounded hulls.

pub mod config;
pub mod error;
pub mod maps;
pub mod quotient;
pub mod sampling;
pub mod sections;
pub mod topology;

pub use config::EmbeddingConfig;
pub use error::{Error, Result};
