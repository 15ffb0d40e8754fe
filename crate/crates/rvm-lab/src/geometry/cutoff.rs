//! Smooth dyadic cutoffs.
//!
//! A fixed even C^∞ plateau ψ̃: ℝ → [0,1] with ψ̃ ≡ 1 on [−5/4, 5/4] and
//! supp ψ̃ ⊂ [−3/2, 3/2] generates the whole dyadic family
//!
//!   ψ_k(x)  = ψ̃(x/2^k) − ψ̃(x/2^{k−1}),
//!   ψ_{≤k}  = ψ̃(x/2^k),
//!   ψ_{≥k}  = 1 − ψ_{≤k−1},
//!
//! so Σ_k ψ_k(x) = 1 for x ≠ 0 by telescoping, independent of the precise
//! transition profile.

/// Lower edge of the transition region.
pub const TRANSITION_LO: f64 = 1.25;
/// Upper edge of the transition region (support edge).
pub const TRANSITION_HI: f64 = 1.5;

/// e^{−1/s} for s > 0, 0 otherwise. The basic C^∞ one-sided bump.
#[inline]
fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// d/ds of `ramp`.
#[inline]
fn ramp_d(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp() / (s * s)
    }
}

/// The smooth even plateau ψ̃ and its derivative.
///
/// On the transition band |x| ∈ [5/4, 3/2] the profile is the exponential
/// smoothstep g(s) = f(s)/(f(s)+f(1−s)) with f(s) = e^{−1/s}, reparametrized
/// so that s = 1 at |x| = 5/4 and s = 0 at |x| = 3/2. All derivatives vanish
/// at both edges, so the extension by 1 and 0 is C^∞.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmoothCutoff;

impl SmoothCutoff {
    /// ψ̃(x): 1 for |x| ≤ 5/4, 0 for |x| ≥ 3/2, smooth monotone in between.
    pub fn plateau(self, x: f64) -> f64 {
        let a = x.abs();
        if a <= TRANSITION_LO {
            1.0
        } else if a >= TRANSITION_HI {
            0.0
        } else {
            let s = (TRANSITION_HI - a) / (TRANSITION_HI - TRANSITION_LO);
            let f1 = ramp(s);
            let f2 = ramp(1.0 - s);
            f1 / (f1 + f2)
        }
    }

    /// dψ̃/dx.
    pub fn plateau_d(self, x: f64) -> f64 {
        let a = x.abs();
        if a <= TRANSITION_LO || a >= TRANSITION_HI {
            0.0
        } else {
            let w = TRANSITION_HI - TRANSITION_LO;
            let s = (TRANSITION_HI - a) / w;
            let f1 = ramp(s);
            let f2 = ramp(1.0 - s);
            let g_ds = (ramp_d(s) * f2 + f1 * ramp_d(1.0 - s)) / ((f1 + f2) * (f1 + f2));
            // ds/dx = −sign(x)/w
            -x.signum() * g_ds / w
        }
    }

    /// ψ_{≤k}(x) = ψ̃(x / 2^k).
    pub fn le(self, k: i32, x: f64) -> f64 {
        self.plateau(x * pow2(-k))
    }

    /// d/dx ψ_{≤k}(x).
    pub fn le_d(self, k: i32, x: f64) -> f64 {
        let s = pow2(-k);
        self.plateau_d(x * s) * s
    }

    /// ψ_k(x) = ψ_{≤k}(x) − ψ_{≤k−1}(x), the dyadic annulus cutoff.
    pub fn shell(self, k: i32, x: f64) -> f64 {
        self.le(k, x) - self.le(k - 1, x)
    }

    /// d/dx ψ_k(x).
    pub fn shell_d(self, k: i32, x: f64) -> f64 {
        self.le_d(k, x) - self.le_d(k - 1, x)
    }

    /// ψ_{≥k}(x) = 1 − ψ_{≤k−1}(x).
    pub fn ge(self, k: i32, x: f64) -> f64 {
        1.0 - self.le(k - 1, x)
    }

    /// d/dx ψ_{≥k}(x).
    pub fn ge_d(self, k: i32, x: f64) -> f64 {
        -self.le_d(k - 1, x)
    }
}

#[inline]
fn pow2(k: i32) -> f64 {
    (k as f64).exp2()
}

/// Mollified step η: ≡ 1 on (−∞, −20], support in (−∞, −10], built from the
/// same smoothstep. Used by the time-dependent weight φ.
#[derive(Clone, Copy, Debug, Default)]
pub struct MollifiedStep;

impl MollifiedStep {
    pub fn value(self, x: f64) -> f64 {
        if x <= -20.0 {
            1.0
        } else if x >= -10.0 {
            0.0
        } else {
            let s = (-10.0 - x) / 10.0; // 1 at x=−20, 0 at x=−10
            let f1 = ramp(s);
            let f2 = ramp(1.0 - s);
            f1 / (f1 + f2)
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        if x <= -20.0 || x >= -10.0 {
            0.0
        } else {
            let s = (-10.0 - x) / 10.0;
            let f1 = ramp(s);
            let f2 = ramp(1.0 - s);
            let g_ds = (ramp_d(s) * f2 + f1 * ramp_d(1.0 - s)) / ((f1 + f2) * (f1 + f2));
            -g_ds / 10.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    const PSI: SmoothCutoff = SmoothCutoff;

    #[test]
    fn plateau_supports() {
        assert_eq!(PSI.plateau(0.0), 1.0);
        assert_eq!(PSI.plateau(1.25), 1.0);
        assert_eq!(PSI.plateau(-1.2), 1.0);
        assert_eq!(PSI.plateau(1.5), 0.0);
        assert_eq!(PSI.plateau(-7.0), 0.0);
        let mid = PSI.plateau(1.375);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn plateau_monotone_on_transition() {
        let mut prev = 1.0;
        let mut x = TRANSITION_LO;
        while x <= TRANSITION_HI {
            let v = PSI.plateau(x);
            assert!(v <= prev + 1e-15, "not monotone at {x}");
            prev = v;
            x += 1e-3;
        }
    }

    #[test]
    fn derivative_matches_centered_difference() {
        // second-order agreement of the analytic derivative on the band,
        // including both edges where all derivatives vanish
        let h = 1e-5;
        for i in 0..200 {
            let x = 1.2 + 0.35 * (i as f64) / 200.0;
            let fd = (PSI.plateau(x + h) - PSI.plateau(x - h)) / (2.0 * h);
            assert!(
                (fd - PSI.plateau_d(x)).abs() < 1e-6,
                "x={x} fd={fd} an={}",
                PSI.plateau_d(x)
            );
        }
    }

    #[test]
    fn partition_of_unity() {
        // Σ_{k=−40}^{40} ψ_k(x) = 1 for 2^{−38} < |x| < 2^{38}
        let mut rng = Rng::seed_from(123);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let expo = rng.range(-38.0, 38.0);
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            let x = sign * expo.exp2();
            let mut sum = 0.0;
            for k in -40..=40 {
                sum += PSI.shell(k, x);
            }
            worst = worst.max((sum - 1.0).abs());
        }
        assert!(worst < 1e-12, "partition defect {worst}");
    }

    #[test]
    fn shell_against_ge_le_consistency() {
        let mut rng = Rng::seed_from(5);
        for _ in 0..1000 {
            let x = rng.range(-40.0, 40.0);
            // ψ_{≥k} + ψ_{≤k−1} = 1
            for k in [-3, 0, 1, 4] {
                let s = PSI.ge(k, x) + PSI.le(k - 1, x);
                assert!((s - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mollified_step_supports() {
        let eta = MollifiedStep;
        assert_eq!(eta.value(-25.0), 1.0);
        assert_eq!(eta.value(-20.0), 1.0);
        assert_eq!(eta.value(-10.0), 0.0);
        assert_eq!(eta.value(3.0), 0.0);
        let v = eta.value(-15.0);
        assert!(v > 0.0 && v < 1.0);
        let h = 1e-5;
        let fd = (eta.value(-15.0 + h) - eta.value(-15.0 - h)) / (2.0 * h);
        assert!((fd - eta.derivative(-15.0)).abs() < 1e-6);
    }
}
