//! Spectral toolkit for the rescaled parabolic scalar curvature flow on the
//! round two-sphere: real spherical harmonics, Gaunt couplings, O(3) isotropy,
//! equilibrium branches, spectra, flows and the blow-up geometry.
#![no_std]
// `num_traits::Float` is shadowed by inherent float methods in builds that pull in std.
#![allow(unused_imports)]

extern crate alloc;

pub mod bifurcation;
pub mod coupling;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod galerkin;
pub mod geometry;
mod linalg;
pub mod nonlinearity;
pub mod quadrature;
pub mod spectral;
pub mod stability;
pub mod symmetry;

pub use error::{Error, Result};
pub use spectral::{GridField, QuadratureGrid, SpectralField, DELTA_MIN};

/// Eigenvalue ℓ(ℓ+1) of −Δ on degree-ℓ harmonics, which is also the bifurcation value λ_ℓ.
pub fn lambda_ell(ell: usize) -> f64 {
    (ell * (ell + 1)) as f64
}
