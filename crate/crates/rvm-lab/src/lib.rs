//! A desk-scale numerical laboratory for the 3D relativistic Vlasov-Maxwell
//! system
//!
//! ```text
//! ∂_t f + v̂·∇_x f + (E + v̂×B)·∇_v f = 0,
//! ∇·E = 4π ∫ f dv,   ∇·B = 0,
//! ∂_t E = ∇×B − 4π ∫ v̂ f dv,   ∂_t B = −∇×E,
//! ```
//!
//! with momentum v, relativistic velocity v̂ = v/√(1+|v|²), and units m = c = 1.
//!
//! The crate has three jobs:
//!
//! 1. **Simulate** the coupled kinetic/electromagnetic dynamics for small
//!    smooth data: a pseudo-spectral Maxwell solver on a periodic box
//!    ([`maxwell`]) coupled to a relativistic particle discretization of the
//!    Vlasov equation ([`particles`]).
//! 2. **Execute the light-cone vector-field machinery as code**: smooth dyadic
//!    cutoffs, modulation functions measuring distance to the light cone, the
//!    good unknown ω(x,v), weight functions ([`geometry`]), and the commuting
//!    vector-field families with their exact decompositions of the bulk
//!    derivative D_v ([`vector_fields`]).
//! 3. **Verify**: every algebraically exact identity is checked to roundoff,
//!    every commutation relation by a finite-difference convergence study, and
//!    the quantitative dispersive decay rates (density t⁻³, fields t⁻¹ on the
//!    light cone, extra decay away from it) by power-law fits against
//!    independent oracles ([`diagnostics`], [`harness`]).
//!
//! Entry points: the runnable programs in `examples/`, the `rvm-lab` binary
//! (`identities`, `run`, `fit`, `dump-info` subcommands), and the `acceptance`
//! integration test.

pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod maxwell;
pub mod particles;
pub mod rng;
pub mod vector_fields;

pub use error::{Error, Result};

/// 3-vector of f64, the workhorse type for positions, momenta, fields.
pub type Vec3 = [f64; 3];

/// Dot product.
#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm.
#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Cross product a × b.
#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Standard basis vector e_i, i ∈ {0,1,2}.
#[inline]
pub fn basis(i: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[i] = 1.0;
    e
}
