//! Quadrature oracle for free-transport density decay.
//!
//! With E = B = 0 the exact solution is f(t,x,v) = f₀(x − v̂t, v), so the
//! density is ∫ f₀(x − v̂t, v) dv. Substituting w = v̂ (unit ball, Jacobian
//! (1−|w|²)^{−5/2}) and then y = x − wt turns this into an integral of a
//! fixed Gaussian against smooth factors,
//!
//!   ρ(t,x) = t⁻³ ∫ f₀ˣ(y) f₀ᵛ(v((x−y)/t)) (1−|(x−y)/t|²)^{−5/2} dy,
//!
//! which makes the t⁻³ decay (and t⁻⁴ for one spatial derivative, whose
//! leading moment vanishes) explicit and is ideal for tensor Gauss-Legendre
//! quadrature. Convergence is certified by node doubling; failure to
//! converge is an error, never a silent wrong number.

use crate::error::{Error, Result};
use crate::particles::ensemble::GaussianPhaseSpace;
use crate::{dot, norm, scale, sub, Vec3};

/// Gauss-Legendre nodes and weights on (−1, 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Momentum for a velocity w inside the unit ball: v = w/√(1−|w|²).
#[inline]
pub fn momentum_of_velocity(w: Vec3) -> Vec3 {
    scale(w, 1.0 / (1.0 - dot(w, w)).sqrt())
}

/// Which moment of the free-streamed data to evaluate.
#[derive(Clone, Copy, Debug)]
pub enum Moment {
    Density,
    /// ∂_{x_d} of the density.
    Gradient(usize),
}

/// ∫ f₀(x − v̂t, v) dv (or one spatial derivative of it) by certified
/// tensor Gauss-Legendre quadrature.
pub fn free_transport_density(
    t: f64,
    x_query: Vec3,
    data: &GaussianPhaseSpace,
    moment: Moment,
) -> Result<f64> {
    free_transport_density_with(t, x_query, data, moment, 1e-7, 160)
}

pub fn free_transport_density_with(
    t: f64,
    x_query: Vec3,
    data: &GaussianPhaseSpace,
    moment: Moment,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<f64> {
    let spatial = |y: Vec3| -> f64 {
        match moment {
            Moment::Density => data.spatial(y),
            Moment::Gradient(d) => data.spatial_gradient(y)[d],
        }
    };
    // switch between velocity-space and streamed-position parametrizations:
    // the y-form needs its whole Gaussian box strictly inside the light ball
    let y_box_half = 6.0 * data.sigma_x;
    let use_y_form = t > norm(sub(x_query, data.center)) + y_box_half + 1.0;

    let eval = |n: usize| -> f64 {
        let (nodes, wts) = gauss_legendre(n);
        let mut sum = 0.0;
        if use_y_form {
            let c = data.center;
            for (iz, &nz) in nodes.iter().enumerate() {
                let y3 = c[2] + y_box_half * nz;
                for (iy, &ny) in nodes.iter().enumerate() {
                    let y2 = c[1] + y_box_half * ny;
                    for (ix, &nx) in nodes.iter().enumerate() {
                        let y = [c[0] + y_box_half * nx, y2, y3];
                        let w_vel = scale(sub(x_query, y), 1.0 / t);
                        let w2 = dot(w_vel, w_vel);
                        if w2 >= 1.0 {
                            continue;
                        }
                        let v = momentum_of_velocity(w_vel);
                        let jac = (1.0 - w2).powf(-2.5);
                        sum += wts[ix] * wts[iy] * wts[iz]
                            * spatial(y)
                            * data.velocity(v)
                            * jac;
                    }
                }
            }
            sum * (y_box_half / t).powi(3)
        } else {
            // direct momentum-space integration: smooth everywhere, no
            // Jacobian singularity. Two panels per axis split at v = 0 put
            // the node-dense panel edges on the streamed spatial feature,
            // which concentrates near small v at moderate t.
            let v_box = 5.0 * data.sigma_v;
            let mut ax_nodes = Vec::with_capacity(nodes.len());
            let mut ax_wts = Vec::with_capacity(nodes.len());
            let half = v_box / 2.0;
            for (&u, &w) in nodes.iter().zip(&wts) {
                ax_nodes.push(-half + half * u); // panel [−v_box, 0]
                ax_wts.push(w * half);
            }
            for (&u, &w) in nodes.iter().zip(&wts) {
                ax_nodes.push(half + half * u); // panel [0, v_box]
                ax_wts.push(w * half);
            }
            for (iz, &v3) in ax_nodes.iter().enumerate() {
                for (iy, &v2) in ax_nodes.iter().enumerate() {
                    for (ix, &v1) in ax_nodes.iter().enumerate() {
                        let v = [v1, v2, v3];
                        let g = (1.0 + dot(v, v)).sqrt();
                        let y = sub(x_query, scale(v, t / g));
                        sum += ax_wts[ix] * ax_wts[iy] * ax_wts[iz]
                            * spatial(y)
                            * data.velocity(v);
                    }
                }
            }
            sum
        }
    };

    // near-zeros of the integrand (e.g. a gradient at a symmetry point)
    // cannot converge in relative terms; an absolute floor tied to the data
    // amplitude covers them
    let abs_floor = 1e-12 * data.amplitude;
    let mut n = 32.min(max_nodes);
    let mut prev = eval(n);
    let mut last_err = f64::INFINITY;
    while 2 * n <= max_nodes {
        n *= 2;
        let cur = eval(n);
        let diff = (cur - prev).abs();
        last_err = diff / cur.abs().max(1e-300);
        if last_err <= rel_tol || diff <= abs_floor {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureDiverged {
        achieved: last_err,
        requested: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_data() -> GaussianPhaseSpace {
        GaussianPhaseSpace {
            amplitude: 1e-3,
            center: [0.0; 3],
            sigma_x: 2.0,
            sigma_v: 1.0,
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, wts) = gauss_legendre(8);
        // ∫_{−1}^{1} x^k dx
        for k in 0..15usize {
            let num: f64 = nodes
                .iter()
                .zip(&wts)
                .map(|(&x, &w)| w * x.powi(k as i32))
                .sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((num - exact).abs() < 1e-13, "k={k}: {num} vs {exact}");
        }
    }

    #[test]
    fn density_at_time_zero_matches_closed_form() {
        let data = test_data();
        for x in [[0.0; 3], [1.0, -2.0, 0.5]] {
            let got = free_transport_density(0.0, x, &data, Moment::Density).unwrap();
            let expect = data.spatial(x)
                * std::f64::consts::PI.powf(1.5)
                * data.sigma_v.powi(3);
            assert!(
                (got - expect).abs() < 1e-6 * expect,
                "t=0 density {got} vs {expect}"
            );
        }
    }

    #[test]
    fn late_time_density_times_t_cubed_converges() {
        // t³ ρ(t, x₀) → ε π^{3/2} σ_x³ at any fixed point
        let data = test_data();
        let limit = data.amplitude * std::f64::consts::PI.powf(1.5) * data.sigma_x.powi(3);
        let a = free_transport_density(100.0, [0.5, 0.0, 0.0], &data, Moment::Density).unwrap()
            * 100f64.powi(3);
        let b = free_transport_density(200.0, [0.5, 0.0, 0.0], &data, Moment::Density).unwrap()
            * 200f64.powi(3);
        assert!((a - limit).abs() < 0.01 * limit, "t³ρ at t=100: {a} vs {limit}");
        assert!((b - limit).abs() < 0.003 * limit);
        // and the approach is from the correct side, monotone in t
        assert!((b - limit).abs() < (a - limit).abs());
    }

    #[test]
    fn gradient_gains_one_extra_power_on_comoving_ray() {
        // along x(t) = x_c + û t the gradient decays at exactly one power
        // beyond the density (the fixed-point rate for velocity-even data is
        // faster still, by another even-symmetry cancellation; the generic
        // (3+|α|) law lives on the self-similar profile, i.e. on rays)
        let data = test_data();
        let ray = [0.35, 0.0, 0.0];
        let probe = |t: f64| {
            let x = [ray[0] * t, ray[1] * t, ray[2] * t];
            free_transport_density(t, x, &data, Moment::Gradient(0)).unwrap()
        };
        let g1 = probe(80.0);
        let g2 = probe(160.0);
        let p = (g1.abs() / g2.abs()).log2();
        assert!(
            (p - 4.0).abs() < 0.1,
            "ray gradient decay exponent between t=80,160: {p}"
        );
        // densities on the same ray keep the base rate
        let d1 = free_transport_density(80.0, [28.0, 0.0, 0.0], &data, Moment::Density).unwrap();
        let d2 = free_transport_density(160.0, [56.0, 0.0, 0.0], &data, Moment::Density).unwrap();
        let p = (d1 / d2).log2();
        assert!((p - 3.0).abs() < 0.1, "ray density exponent: {p}");
    }

    #[test]
    fn fixed_point_gradient_of_even_data_decays_faster() {
        // the even velocity distribution kills the t⁻⁴ moment at fixed x
        let data = test_data();
        let x = [1.0, 0.0, 0.0];
        let g1 = free_transport_density(80.0, x, &data, Moment::Gradient(0)).unwrap();
        let g2 = free_transport_density(160.0, x, &data, Moment::Gradient(0)).unwrap();
        let p = (g1.abs() / g2.abs()).log2();
        assert!((p - 5.0).abs() < 0.1, "fixed-point exponent: {p}");
    }

    #[test]
    fn quadrature_failure_is_reported() {
        // starved of nodes, the under-resolved integrand must refuse:
        // spatial scale 0.02 streamed over t=2 is invisible to ≤64 nodes
        let data = GaussianPhaseSpace {
            amplitude: 1.0,
            center: [0.0; 3],
            sigma_x: 0.02,
            sigma_v: 1.5,
        };
        let r = free_transport_density_with(
            1.2,
            [0.3, 0.1, 0.0],
            &data,
            Moment::Density,
            1e-9,
            64,
        );
        assert!(matches!(r, Err(Error::QuadratureDiverged { .. })));
    }

    #[test]
    fn parametrization_switch_is_seamless() {
        // values straddling the y-form/w-form switch agree through it
        let data = test_data();
        let x = [0.5, 0.2, -0.1];
        let mut prev = None;
        for t in [10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0] {
            let val = free_transport_density(t, x, &data, Moment::Density).unwrap();
            if let Some(p) = prev {
                let ratio: f64 = val / p;
                // t⁻³ locally: ratio within sane band, no jumps
                assert!(ratio > 0.4 && ratio < 1.0, "jump at t={t}: ratio {ratio}");
            }
            prev = Some(val);
        }
    }
}
