//! Hard-pulse design by discrete inverse scattering.
//!
//! A hard pulse `Σ ωⱼ δ(t - jΔ)` acts on magnetization through a recursion on
//! Laurent polynomials in `w = e^{iΔz}`. This crate runs that recursion forward
//! (pulse → scattering data), inverts it (scattering data → pulse) and builds the
//! scattering data for common excitation targets.

pub mod bridge;
pub mod design;
pub mod dist;
pub mod error;
pub mod finite_rephasing;
pub mod forward;
pub mod pulse;
pub mod spectral;

mod poly;

pub use error::{Error, Result};
