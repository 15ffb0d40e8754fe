//! Relativistic velocity and the moving orthogonal-ish frame attached to a
//! momentum direction.
//!
//! For momentum v (units m = c = 1) the velocity is v̂ = v/√(1+|v|²), always
//! strictly subluminal. The frame consists of ṽ = v/|v| and the three vectors
//! Ṽ_i = e_i × ṽ. They overdetermine the plane orthogonal to ṽ: for every u,
//!
//!   u = ṽ (ṽ·u) + Σ_i Ṽ_i (Ṽ_i·u),
//!
//! and v̂ contracts differently along and across ṽ:
//!
//!   (ṽ·∇_v) v̂ = ṽ/(1+|v|²)^{3/2},   (Ṽ_i·∇_v) v̂ = Ṽ_i/(1+|v|²)^{1/2}.

use crate::error::{Error, Result};
use crate::{basis, cross, dot, norm, scale, Vec3};

/// Lorentz factor √(1+|v|²).
#[inline]
pub fn gamma(v: Vec3) -> f64 {
    (1.0 + dot(v, v)).sqrt()
}

/// Relativistic velocity v̂ = v/√(1+|v|²); |v̂| < 1 strictly.
#[inline]
pub fn hat_v(v: Vec3) -> Vec3 {
    scale(v, 1.0 / gamma(v))
}

/// Jacobian matrix J_ij = ∂v̂_j/∂v_i = δ_ij/γ − v_i v_j/γ³ (symmetric).
pub fn hat_v_jacobian(v: Vec3) -> [[f64; 3]; 3] {
    let g = gamma(v);
    let g3 = g * g * g;
    let mut j = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            j[i][k] = if i == k { 1.0 / g } else { 0.0 } - v[i] * v[k] / g3;
        }
    }
    j
}

/// (a·∇_v) v̂ for an arbitrary direction a, via the Jacobian.
pub fn dir_grad_hat_v(v: Vec3, a: Vec3) -> Vec3 {
    let j = hat_v_jacobian(v);
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = a[0] * j[0][k] + a[1] * j[1][k] + a[2] * j[2][k];
    }
    out
}

/// The unit direction ṽ = v/|v| and the three companions Ṽ_i = e_i × ṽ.
///
/// When v is parallel to e_i the corresponding Ṽ_i is the zero vector;
/// consumers must tolerate zero columns (the reconstruction identity still
/// holds). v = 0 has no direction at all and is an error.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub v_dir: Vec3,
    pub companions: [Vec3; 3],
}

pub fn frame_vectors(v: Vec3) -> Result<Frame> {
    let n = norm(v);
    if n == 0.0 {
        return Err(Error::DegenerateDirection("v/|v| at v = 0"));
    }
    let v_dir = scale(v, 1.0 / n);
    let companions = [
        cross(basis(0), v_dir),
        cross(basis(1), v_dir),
        cross(basis(2), v_dir),
    ];
    Ok(Frame { v_dir, companions })
}

impl Frame {
    /// Reconstruct u from its frame components: ṽ(ṽ·u) + Σ Ṽ_i (Ṽ_i·u).
    pub fn reconstruct(&self, u: Vec3) -> Vec3 {
        let mut out = scale(self.v_dir, dot(self.v_dir, u));
        for w in self.companions {
            let c = dot(w, u);
            out = crate::add(out, scale(w, c));
        }
        out
    }
}
