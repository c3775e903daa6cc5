//! Construction and singularity classification of pseudospherical frontals.
//!
//! Surfaces of constant Gauss curvature -1 are built from their Lorentzian
//! harmonic Gauss maps by a loop-group d'Alembert scheme: characteristic
//! potentials are integrated by ODEs, combined by Birkhoff factorization, and
//! the surface is recovered from the Sym formula. Alongside the analytic
//! pipeline the crate classifies the wave-front and non-wave-front
//! singularities of such surfaces (cuspidal edge through cuspidal butterfly,
//! lips, beaks, 2/5-cuspidal edge, Shcherbak surface) from jet data of the
//! Gauss map, from normalized curve data, or numerically from a sampled grid.

pub mod algebra;
pub mod builder;
pub mod cauchy;
pub mod classify;
pub mod planar;
pub mod jets;
pub mod loops;
pub mod poly;

pub use algebra::{Mat2C, Vec3};
