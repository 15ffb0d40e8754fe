//! Exact decompositions of the bulk derivative D_v = ∇_v − t ∇_v v̂·∇_x over
//! the seventeen profile fields, the derivative-trading identity, and the
//! pointwise force-divergence identity.
//!
//! Both decompositions D_v = Σ_ρ coeff_ρ(t,x,v) Λ^ρ are algebraically exact:
//! the first routes the rotational directions through the good derivatives
//! Ω̂^v_i at the price of a coefficient of size (1+|v|) d̃ on Ω^x_i, the second
//! through the rotations Ω̃_i with coefficients of size |x|/|v|. The residual
//! of either, evaluated with analytic derivatives everywhere, is pure
//! roundoff.

use crate::error::{Error, Result};
use crate::geometry::cutoff::SmoothCutoff;
use crate::geometry::frame::{frame_vectors, gamma, hat_v, hat_v_jacobian};
use crate::geometry::modulation::{d_tilde_gradients, modulation_d_tilde};
use crate::vector_fields::operator::{profile_field, slot_c_index};
use crate::vector_fields::testfn::TestFunction;
use crate::{add, basis, cross, dot, norm, scale, sub, Vec3};

const PSI: SmoothCutoff = SmoothCutoff;

/// Which of the two decompositions of D_v.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DvTable {
    /// Rotational directions through Ω̂^v_i, modulation-weighted Ω^x_i.
    GoodDerivative,
    /// Rotational directions through Ω̃_i, position-weighted S^x/Ω^x_i.
    Rotation,
}

/// The 3-vector coefficient of slot ρ (1..=17) in the chosen decomposition.
pub fn dv_coefficient(table: DvTable, slot: usize, t: f64, x: Vec3, v: Vec3) -> Vec3 {
    let nv = norm(v);
    let mid = PSI.ge(-1, nv); // support pad around the high-|v| group
    let low = PSI.le(2, nv); //  support pad around the low-|v| group
    match slot {
        1..=8 | 15..=17 if mid == 0.0 => [0.0; 3],
        9..=14 if low == 0.0 => [0.0; 3],
        1 => {
            let f = frame_vectors(v).expect("mid cutoff guards v = 0");
            scale(f.v_dir, mid)
        }
        2 => {
            let f = frame_vectors(v).expect("mid cutoff guards v = 0");
            let dt = modulation_d_tilde(t, x, v);
            match table {
                DvTable::GoodDerivative => scale(f.v_dir, -mid * dt / gamma(v)),
                DvTable::Rotation => {
                    let mut c = scale(f.v_dir, dt / gamma(v));
                    for i in 0..3 {
                        let xi = cross(basis(i), x);
                        c = add(c, scale(f.companions[i], dot(xi, f.v_dir) / nv));
                    }
                    scale(c, -mid)
                }
            }
        }
        3..=5 => match table {
            DvTable::GoodDerivative => {
                let f = frame_vectors(v).expect("mid cutoff guards v = 0");
                scale(f.companions[slot - 3], mid)
            }
            DvTable::Rotation => [0.0; 3],
        },
        6..=8 => {
            let i = slot - 6;
            let f = frame_vectors(v).expect("mid cutoff guards v = 0");
            match table {
                DvTable::GoodDerivative => {
                    let dt = modulation_d_tilde(t, x, v);
                    scale(f.companions[i], -mid * dt * gamma(v))
                }
                DvTable::Rotation => {
                    let vh = hat_v(v);
                    let mut c = [0.0; 3];
                    for j in 0..3 {
                        let xj = cross(basis(j), x);
                        let vhj = cross(basis(j), vh);
                        let w = dot(add(xj, scale(vhj, t)), f.companions[i]);
                        c = add(c, scale(f.companions[j], w));
                    }
                    scale(c, -mid / nv)
                }
            }
        }
        9..=11 => scale(basis(slot - 9), low),
        12..=14 => {
            let i = slot - 12;
            let dt = modulation_d_tilde(t, x, v);
            let j = hat_v_jacobian(v);
            let g = gamma(v);
            // ∇_v v̂_i is the i-th column of the (symmetric) Jacobian
            scale(j[i], -low * dt * g * g)
        }
        15..=17 => match table {
            DvTable::GoodDerivative => [0.0; 3],
            DvTable::Rotation => {
                // the rotation slot carries the same |v|-split as the rest of
                // the high group, so that Σ_ρ e_ρ Λ^ρ telescopes exactly
                let hi = PSI.ge(1, nv);
                if hi == 0.0 {
                    return [0.0; 3];
                }
                let f = frame_vectors(v).expect("hi cutoff guards v = 0");
                scale(f.companions[slot - 15], hi / nv)
            }
        },
        _ => panic!("slot must be 1..=17, got {slot}"),
    }
}

/// D_v f as a 3-vector, from analytic derivatives.
pub fn apply_dv_to(f: &TestFunction, t: f64, x: Vec3, v: Vec3) -> Vec3 {
    let jet = f.jet(t, x, v);
    let j = hat_v_jacobian(v);
    let mut out = jet.d_v;
    for i in 0..3 {
        for k in 0..3 {
            out[i] -= t * j[i][k] * jet.d_x[k];
        }
    }
    out
}

/// |D_v f − Σ_ρ coeff_ρ (Λ^ρ f)| with everything analytic; roundoff-sized.
pub fn decompose_dv_residual(
    table: DvTable,
    f: &TestFunction,
    t: f64,
    x: Vec3,
    v: Vec3,
) -> f64 {
    let lhs = apply_dv_to(f, t, x, v);
    let jet = f.jet(t, x, v);
    let mut rhs = [0.0; 3];
    for slot in 1..=17 {
        let c = dv_coefficient(table, slot, t, x, v);
        if c == [0.0; 3] {
            continue;
        }
        let lam = profile_field(slot).apply_jet(&jet, t, x, v);
        rhs = add(rhs, scale(c, lam));
    }
    norm(sub(lhs, rhs))
}

/// Σ_ρ |coeff_ρ| (1+|v|)^{−c(ρ)} / (1 + |d̃|): the weighted coefficient mass
/// of the good-derivative table, bounded by a sampled calibration constant.
pub fn dv_table_weighted_mass_ratio(t: f64, x: Vec3, v: Vec3) -> f64 {
    let mut mass = 0.0;
    for slot in 1..=17 {
        let c = dv_coefficient(DvTable::GoodDerivative, slot, t, x, v);
        mass += norm(c) * (1.0 + norm(v)).powi(-(slot_c_index(slot) as i32));
    }
    mass / (1.0 + modulation_d_tilde(t, x, v).abs())
}

/// Residual of the derivative-trading identity
///
///   (|t|−|x|) ∂_{x_i} f = Σ_j x_j/(|t|+|x|) Ω_{ij} f + t/(|t|+|x|) L_i f
///                         − x_i/(|t|+|x|) S f,
///
/// with Ω_{ij} = x_i ∂_{x_j} − x_j ∂_{x_i}; spatial decay traded for distance
/// to the cone. Exact for every differentiable f(t,x); error at t = x = 0.
pub fn trading_identity_residual(i: usize, f: &TestFunction, t: f64, x: Vec3) -> Result<f64> {
    let denom = t.abs() + norm(x);
    if denom == 0.0 {
        return Err(Error::DegenerateDirection("trading identity at t = x = 0"));
    }
    let v = [0.0; 3];
    let jet = f.jet(t, x, v);
    let lhs = (t.abs() - norm(x)) * jet.d_x[i];
    let mut rhs = 0.0;
    for j in 0..3 {
        // Ω_{ij} f = x_i ∂_j f − x_j ∂_i f
        let rot = x[i] * jet.d_x[j] - x[j] * jet.d_x[i];
        rhs += x[j] / denom * rot;
    }
    rhs += t / denom * (t * jet.d_x[i] + x[i] * jet.d_t);
    rhs -= x[i] / denom * (t * jet.d_t + dot(x, jet.d_x));
    Ok(lhs - rhs)
}

/// |Λ^ρ d̃| / (1 + |d̃|) for a single profile field; a sampled-boundedness
/// diagnostic for the structural stability of the modulation.
pub fn lambda_rho_d_tilde_ratio(slot: usize, t: f64, x: Vec3, v: Vec3) -> f64 {
    let (g_t, g_x, g_v) = d_tilde_gradients(t, x, v);
    let op = profile_field(slot);
    let c = op.coefficients(t, x, v);
    let val = c.c_t * g_t + dot(c.c_x, g_x) + dot(c.c_v, g_v);
    val.abs() / (1.0 + modulation_d_tilde(t, x, v).abs())
}

/// ∇_v·(E + v̂×B) for field closures E(t,x), B(t,x); identically zero because
/// the Jacobian of v̂ is symmetric and E carries no v-dependence.
pub fn div_v_force_residual(
    _e_fn: &dyn Fn(f64, Vec3) -> Vec3,
    b_fn: &dyn Fn(f64, Vec3) -> Vec3,
    t: f64,
    x: Vec3,
    v: Vec3,
) -> f64 {
    let b = b_fn(t, x);
    let j = hat_v_jacobian(v);
    // Σ_{i,j,k} ε_{ijk} (∂_{v_i} v̂_j) B_k
    let mut r = 0.0;
    const EPS: [(usize, usize, usize, f64); 6] = [
        (0, 1, 2, 1.0),
        (1, 2, 0, 1.0),
        (2, 0, 1, 1.0),
        (0, 2, 1, -1.0),
        (1, 0, 2, -1.0),
        (2, 1, 0, -1.0),
    ];
    for (i, jj, k, s) in EPS {
        r += s * (j[i][jj] - j[jj][i]) * b[k] * 0.5;
    }
    r
}
