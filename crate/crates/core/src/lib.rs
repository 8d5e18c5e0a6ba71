//! Surfaces in the homogeneous 3-manifolds E(κ, τ).
//!
//! Fundamental data `(λ, u, H, p, A)` of a conformally parametrized surface
//! are sampled on a grid, checked against the integrability equations by
//! finite differences, fed to the Abresch–Rosenberg differential and, when
//! integrable, turned back into a surface by integrating an adapted frame.

pub mod error;
pub mod differentials;
pub mod families;
pub mod fundamental;
pub mod grid;
pub mod io;
pub mod reconstruction;
pub mod space;

pub use error::{Error, Result};
pub use fundamental::{check_all, FundamentalField, ResidualReport, ToleranceProfile};
pub use grid::{ConformalGrid, ScalarField};
pub use space::{AmbientChart, SpaceFamily, SpaceParams};
