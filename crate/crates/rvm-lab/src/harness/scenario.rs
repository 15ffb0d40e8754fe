//! Scenario drivers: vacuum wave decay, free particle transport, and the
//! fully coupled small-data run, each emitting time series, fits, checks,
//! and conservation monitors.

use crate::diagnostics::observe::{
    density_moment, energy_surrogates, total_energy, ConeSampler, ConservationReport, Offset,
    SampleKind,
};
use crate::diagnostics::series::{fit_decay_exponent, DecaySeries, FitResult};
use crate::error::Result;
use crate::fft::Fft3;
use crate::harness::config::RunConfig;
use crate::harness::suite::Check;
use crate::maxwell::profile::{extract_profiles, low_mode_bins, modified_profile_correction};
use crate::maxwell::state::{FieldState, Grid};
use crate::particles::deposit::{charge_conserving_sources, deposit, deposit_charge};
use crate::particles::ensemble::{GaussianPhaseSpace, ParticleEnsemble};
use crate::particles::oracle::{free_transport_density, Moment};
use crate::maxwell::state::trilinear;
use crate::{cross, dot, norm, scale, Vec3};
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct RunOutput {
    pub series: BTreeMap<String, DecaySeries>,
    pub fits: BTreeMap<String, FitResult>,
    pub fit_errors: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub conservation: ConservationReport,
    pub notes: Vec<String>,
    /// Final field state for the on-disk dump, when the scenario has one.
    pub final_fields: Option<(Grid, f64, crate::maxwell::state::RealFields)>,
    /// Final particle state for the checkpoint, when the scenario has one.
    pub final_ensemble: Option<(f64, ParticleEnsemble)>,
}

impl RunOutput {
    fn fit(&mut self, name: &str) {
        match self.series.get(name) {
            Some(s) if !s.is_all_zero() => match fit_decay_exponent(s) {
                Ok(fit) => {
                    self.fits.insert(name.into(), fit);
                }
                Err(e) => {
                    self.fit_errors.insert(name.into(), e.to_string());
                }
            },
            Some(_) => {
                self.fit_errors
                    .insert(name.into(), "all-zero series (flagged, not fitted)".into());
            }
            None => {
                self.fit_errors.insert(name.into(), "missing series".into());
            }
        }
    }

    pub fn series_csv(&self) -> String {
        let mut out = String::from("t,observable,value\n");
        for (name, s) in &self.series {
            for (&t, &v) in s.times.iter().zip(&s.values) {
                out.push_str(&format!("{t},{name},{v}\n"));
            }
        }
        out
    }

    pub fn report_text(&self) -> String {
        let mut out = String::new();
        for (name, fit) in &self.fits {
            out.push_str(&format!(
                "fit {name}: exponent = {:.4} +- {:.4} over {} samples\n",
                fit.exponent, fit.stderr, fit.samples
            ));
        }
        for (name, err) in &self.fit_errors {
            out.push_str(&format!("fit {name}: {err}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check {}: value = {:.6e}, threshold = {:.3e}, {}\n",
                c.name,
                c.value,
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&format!(
            "conservation: charge_drift = {:.3e}, energy_drift = {:.3e}, gauss_max = {:.3e}, div_b_max = {:.3e}\n",
            self.conservation.charge_drift,
            self.conservation.energy_drift,
            self.conservation.gauss_max,
            self.conservation.div_b_max
        ));
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}

/// Transverse pulse from a Gaussian vector potential A = χ ẑ: in spectral
/// space Ê = i Â(|ξ|) e^{−iξ·c} (ξ × ẑ), rescaled so max|E| = amplitude.
pub fn gaussian_curl_pulse(
    grid: Grid,
    fft: &mut Fft3,
    center: Vec3,
    sigma: f64,
    amplitude: f64,
) -> FieldState {
    let mut state = FieldState::zero(grid);
    let zhat = [0.0, 0.0, 1.0];
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let xi = grid.xi(ix, iy, iz);
        let k2 = dot(xi, xi);
        let a_hat = (-sigma * sigma * k2 / 4.0).exp();
        let phase = Complex64::from_polar(1.0, -dot(xi, center));
        let dir = cross(xi, zhat);
        let i = Complex64::new(0.0, 1.0);
        for d in 0..3 {
            state.e_hat[d][flat] = i * phase * (a_hat * dir[d]);
        }
    }
    let peak = state.max_abs_e(fft);
    if peak > 0.0 {
        let s = amplitude / peak;
        for d in 0..3 {
            for z in state.e_hat[d].iter_mut() {
                *z *= s;
            }
        }
        state.invalidate_real();
    }
    state
}

/// Band-limited field with the low-frequency |ξ|⁻¹ amplitude profile (the
/// data class whose interior decay saturates the off-cone bound), transverse
/// and hermitian.
pub fn low_frequency_field(
    grid: Grid,
    fft: &mut Fft3,
    center: Vec3,
    k_cut: f64,
    amplitude: f64,
) -> FieldState {
    let mut state = FieldState::zero(grid);
    let u0 = {
        let u = [0.31, 0.55, 0.78];
        scale(u, 1.0 / norm(u))
    };
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let xi = grid.xi(ix, iy, iz);
        let k = norm(xi);
        let e1 = cross(xi, u0);
        let n1 = norm(e1);
        if n1 < 1e-12 {
            continue;
        }
        let e1 = scale(e1, 1.0 / n1);
        let e2 = {
            let c = cross(scale(xi, 1.0 / k), e1);
            scale(c, 1.0 / norm(c))
        };
        // i·(odd direction) + (even direction): hermitian, localized at the
        // center, and with both parities populated so no sphere-mean
        // cancellation suppresses the interior tail
        let a = (-(k * k) / (k_cut * k_cut)).exp() / k;
        let phase = Complex64::from_polar(1.0, -dot(xi, center));
        let i = Complex64::new(0.0, 1.0);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for d in 0..3 {
            state.e_hat[d][flat] =
                phase * (i * (a * e1[d] * inv_sqrt2) + a * e2[d] * inv_sqrt2);
        }
    }
    let peak = state.max_abs_e(fft);
    if peak > 0.0 {
        let s = amplitude / peak;
        for d in 0..3 {
            for z in state.e_hat[d].iter_mut() {
                *z *= s;
            }
        }
        state.invalidate_real();
    }
    state
}

fn box_center(cfg: &RunConfig) -> Vec3 {
    [cfg.box_length / 2.0; 3]
}

/// Fit window for cone-following observables: [10, 0.9 (L/2 − R)].
fn cone_window(cfg: &RunConfig) -> (f64, f64) {
    (10.0, 0.9 * (cfg.box_length / 2.0 - cfg.data_radius))
}

/// Default window for density observables: [max(10, 2R), 0.9 (L/2 − R)]
/// with the transport data radius R ≈ 3σ_x.
fn density_window(cfg: &RunConfig) -> (f64, f64) {
    let r = 3.0 * cfg.sigma_x;
    (
        (2.0 * r).max(10.0),
        0.9 * (cfg.box_length / 2.0 - r),
    )
}

/// Vacuum Maxwell decay scenario: a compact pulse channel (on-cone decay and
/// strong Huygens) and a low-frequency channel (off-cone enhancement), both
/// evolved with the exact free propagator in one run.
pub fn run_free_wave(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid_n, cfg.box_length);
    let mut fft = Fft3::new(grid.n);
    let center = box_center(cfg);
    let mut pulse = gaussian_curl_pulse(grid, &mut fft, center, cfg.pulse_sigma, cfg.epsilon);
    let mut lowf = low_frequency_field(grid, &mut fft, center, 0.7, cfg.epsilon);
    let initial_max = pulse.max_abs_e(&mut fft);
    let initial_energy = pulse.field_energy();
    let initial_l2 = pulse.spectral_l2();

    let dt = cfg.dt();
    let steps = (cfg.t_end / dt).round() as usize;
    let window = cone_window(cfg);
    // the off-cone window dodges the refocusing transit of the ingoing half
    // wave at the front, and the on-cone reference sample's own validity
    // bound t + |x| < L/2 (with |x| = t) at the back
    let off_window = (16.0, (cfg.box_length / 4.0 - 1.0).min(window.1));
    let mut out = RunOutput::default();
    let mut series: BTreeMap<String, DecaySeries> = BTreeMap::new();
    for name in ["field_cone", "field_max"] {
        series.insert(name.into(), DecaySeries::new(window));
    }
    for name in ["offcone_ref", "offcone_half", "offcone_ratio"] {
        series.insert(name.into(), DecaySeries::new(off_window));
    }
    series.insert("field_interior".into(), DecaySeries::new(window));

    let cone = ConeSampler::axes(center, vec![Offset::Fixed(0.0)]);
    let off = ConeSampler::axes(
        center,
        vec![Offset::Fixed(0.0), Offset::FractionOfT(0.5)],
    );
    let interior_point = [center[0] + 4.0, center[1], center[2]];
    let mut interior_late_max: f64 = 0.0;
    let huygens_after =
        4.0 + cfg.data_radius + 2.0 * grid.dx();

    for step in 1..=steps {
        pulse.propagate_free(dt);
        lowf.propagate_free(dt);
        if step % cfg.snapshot_every != 0 {
            continue;
        }
        let t = pulse.time;
        if let Some(v) = cone.sample(&mut pulse, &mut fft)[0].1 {
            series.get_mut("field_cone").unwrap().push(t, v);
        }
        series
            .get_mut("field_max")
            .unwrap()
            .push(t, pulse.max_abs_e(&mut fft));
        let (e_i, b_i) = pulse.sample(interior_point, &mut fft);
        let interior = norm(e_i) + norm(b_i);
        series.get_mut("field_interior").unwrap().push(t, interior);
        if t > huygens_after {
            interior_late_max = interior_late_max.max(interior);
        }
        let samples = off.sample(&mut lowf, &mut fft);
        if let Some(v) = samples[0].1 {
            series.get_mut("offcone_ref").unwrap().push(t, v);
        }
        if let Some(v) = samples[1].1 {
            series.get_mut("offcone_half").unwrap().push(t, v);
        }
        if let (Some(r), Some(h)) = (samples[0].1, samples[1].1) {
            if r > 0.0 {
                series.get_mut("offcone_ratio").unwrap().push(t, h / r);
            }
        }
        out.conservation.update(
            1.0,
            1.0,
            initial_energy,
            pulse.field_energy(),
            0.0,
            pulse.div_b_residual(),
        );
    }
    // free flow is unitary: the spectral mass must not move at all
    let l2_drift = (pulse.spectral_l2() - initial_l2).abs() / initial_l2;
    out.checks
        .push(Check::bound_pub("free_flow_unitarity", l2_drift, 1e-12));
    out.checks.push(Check::bound_pub(
        "interior_after_cone_rel",
        interior_late_max / initial_max,
        1e-8,
    ));
    out.series = series;
    out.fit("field_cone");
    out.fit("field_max");
    out.fit("offcone_ref");
    out.fit("offcone_half");
    out.fit("offcone_ratio");
    if let Some(ratio) = out.fits.get("offcone_ratio") {
        out.notes.push(format!(
            "offcone extra exponent (fit of half/ref) = {:.4} +- {:.4}",
            ratio.exponent, ratio.stderr
        ));
        out.checks.push(Check::range_pub(
            "offcone_extra_exponent",
            ratio.exponent,
            -1.3,
            -0.7,
        ));
    }
    if let Some(fit) = out.fits.get("field_cone") {
        out.checks.push(Check::range_pub(
            "cone_exponent",
            fit.exponent,
            -1.1,
            -0.9,
        ));
    }
    out.notes.push(format!(
        "huygens: max interior |E|+|B| for t > {huygens_after:.1} is {:.3e} of the initial max",
        interior_late_max / initial_max
    ));
    let t_final = pulse.time;
    out.final_fields = Some((grid, t_final, pulse.real(&mut fft).clone()));
    Ok(out)
}

/// Free-transport decay scenario: particles stream, no fields; the deposited
/// density is checked against the quadrature oracle with Monte-Carlo bars.
pub fn run_free_transport(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid_n, cfg.box_length);
    let center = box_center(cfg);
    let data = GaussianPhaseSpace {
        amplitude: cfg.epsilon,
        center,
        sigma_x: cfg.sigma_x,
        sigma_v: cfg.sigma_v,
    };
    let mut ensemble =
        ParticleEnsemble::gaussian(cfg.box_length, &data, cfg.particles, cfg.seed);
    let w_particle = data.total_mass() / cfg.particles as f64;

    let dt = cfg.dt();
    let steps = (cfg.t_end / dt).round() as usize;
    let window = density_window(cfg);
    let mut out = RunOutput::default();
    for name in [
        "density_center",
        "density_oracle",
        "density_grad_oracle",
        "density_grad_ray",
    ] {
        out.series.insert(name.into(), DecaySeries::new(window));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    // probe ray comoving with the expanding profile: on it the gradient
    // carries the generic one-extra-power decay (at a fixed point the
    // velocity-even data cancels the leading moment and decays faster)
    let ray = [0.35, 0.0, 0.0];
    let mut worst_z = 0.0f64;
    let mut worst_gz = 0.0f64;
    for step in 1..=steps {
        ensemble.push_position(dt);
        if step % cfg.snapshot_every != 0 {
            continue;
        }
        let t = step as f64 * dt;
        let rho = deposit_charge(&ensemble, grid);
        let rho_field = [rho.clone(), rho.clone(), rho.clone()];
        let at_center = trilinear(grid, &rho_field, center)[0];
        out.series.get_mut("density_center").unwrap().push(t, at_center);
        let oracle = four_pi * free_transport_density(t, center, &data, Moment::Density)?;
        out.series.get_mut("density_oracle").unwrap().push(t, oracle);
        // gradient at the snapped ray node, oracle and deposited grid; the
        // early snapshots sit on the flat top where the gradient vanishes
        if t >= 4.0 {
            let node = snap_to_node(grid, [center[0] + ray[0] * t, center[1], center[2]]);
            let g_oracle =
                four_pi * free_transport_density(t, node, &data, Moment::Gradient(0))?;
            out.series
                .get_mut("density_grad_oracle")
                .unwrap()
                .push(t, g_oracle.abs().max(1e-300));
            let g_grid = grid_gradient_component(&rho, grid, node, 0);
            out.series
                .get_mut("density_grad_ray")
                .unwrap()
                .push(t, g_grid.abs().max(1e-300));
            // the grid gradient is a centered difference of the CIC-smoothed
            // density; compare it against the same stencil applied to the
            // oracle (like for like), with Monte-Carlo bars plus a small
            // allowance for the residual CIC smoothing, on the window where
            // the signal is resolvable
            if (8.0..=24.0).contains(&t) {
                let mut hi = node;
                let mut lo = node;
                hi[0] += grid.dx();
                lo[0] -= grid.dx();
                let g_fd_oracle = four_pi
                    * (free_transport_density(t, hi, &data, Moment::Density)?
                        - free_transport_density(t, lo, &data, Moment::Density)?)
                    / (2.0 * grid.dx());
                let rho_node = trilinear(grid, &rho_field, node)[0].max(1e-300);
                let n_cell =
                    (rho_node * grid.dx().powi(3) / (four_pi * w_particle)).max(1.0);
                let sigma_grad =
                    rho_node / n_cell.sqrt() * std::f64::consts::SQRT_2 / (2.0 * grid.dx());
                let bars = sigma_grad + 0.03 * g_fd_oracle.abs();
                worst_gz = worst_gz.max((g_grid - g_fd_oracle).abs() / bars.max(1e-300));
            }
        }
        // Monte-Carlo bars at the center, against the CIC-smoothed oracle
        // (the deposit reads (ρ ∗ triangle)(node): once the cloud becomes an
        // expanding shell the center is a local minimum and the smoothing
        // bias flips positive, several percent at this resolution)
        if t >= 5.0 && step % (2 * cfg.snapshot_every) == 0 {
            let mut lap = 0.0;
            for d in 0..3 {
                for sgn in [-1.0, 1.0] {
                    let mut p = center;
                    p[d] += sgn * grid.dx();
                    lap += four_pi * free_transport_density(t, p, &data, Moment::Density)?;
                }
            }
            let oracle_smoothed = oracle + (lap - 6.0 * oracle) / 12.0;
            let n_cell = (at_center * grid.dx().powi(3) / (four_pi * w_particle)).max(1.0);
            let sigma = at_center / n_cell.sqrt();
            let bars = sigma + 0.01 * oracle_smoothed;
            worst_z = worst_z.max((at_center - oracle_smoothed).abs() / bars.max(1e-300));
        }
    }
    out.checks
        .push(Check::bound_pub("density_vs_oracle_zscore", worst_z, 4.5));
    out.checks
        .push(Check::bound_pub("gradient_vs_oracle_zscore", worst_gz, 5.0));
    out.conservation.update(
        data.total_mass(),
        ensemble.total_weight(),
        1.0,
        1.0,
        0.0,
        0.0,
    );
    out.final_ensemble = Some((cfg.t_end, ensemble));
    out.fit("density_center");
    out.fit("density_oracle");
    out.fit("density_grad_oracle");
    out.fit("density_grad_ray");
    if let Some(f) = out.fits.get("density_center") {
        out.checks
            .push(Check::range_pub("density_exponent", f.exponent, -3.1, -2.9));
    }
    if let Some(f) = out.fits.get("density_grad_oracle") {
        out.checks.push(Check::range_pub(
            "density_gradient_exponent",
            f.exponent,
            -4.15,
            -3.85,
        ));
    }
    Ok(out)
}

/// The linear test for the modified profiles: particles stream freely (their
/// profile is exactly constant) while their current drives Maxwell. The raw
/// profile ĥ₁ then grows linearly through the density source; the corrected
/// ĥ̃₁ = ĥ₁ − corr varies only through discretization residue. Returns the
/// (raw, corrected) low-frequency time variations, whose ratio is the
/// construction's purpose (≥ 10× reduction expected).
pub fn profile_correction_comparison(particles: usize, seed: u64) -> Result<(f64, f64)> {
    let grid = Grid::new(32, 32.0);
    let mut fft = Fft3::new(grid.n);
    let center = [16.0; 3];
    let data = GaussianPhaseSpace {
        amplitude: 1e-2,
        center,
        sigma_x: 3.0,
        sigma_v: 0.5,
    };
    let mut ensemble = ParticleEnsemble::gaussian(grid.length, &data, particles, seed);
    let mut state = FieldState::zero(grid);
    // start from the Coulomb field of the deposited density so the Gauss
    // constraint holds from the first step
    let mut rho_hat_old =
        crate::maxwell::state::to_spectral(&deposit_charge(&ensemble, grid), &mut fft);
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let xi = grid.xi(ix, iy, iz);
        let m = Complex64::new(0.0, -1.0) * rho_hat_old[flat] / dot(xi, xi);
        for d in 0..3 {
            state.e_hat[d][flat] = m * xi[d];
        }
    }
    state.invalidate_real();
    let dt = 0.25 * grid.dx();
    let steps = 32usize; // t_end = 8
    let bins = low_mode_bins(grid, 4);
    let mut raw_ref: Option<Vec<[Complex64; 3]>> = None;
    let mut mod_ref: Option<Vec<[Complex64; 3]>> = None;
    let mut raw_var = 0.0f64;
    let mut mod_var = 0.0f64;
    for step in 1..=steps {
        let mut mid = ensemble.clone();
        mid.push_position(0.5 * dt);
        let j_mid = deposit(&mid, grid).j;
        ensemble.push_position(dt);
        let rho_new = deposit_charge(&ensemble, grid);
        let (src, rho_hat_new) =
            charge_conserving_sources(grid, &mut fft, &rho_hat_old, &rho_new, &j_mid, dt);
        rho_hat_old = rho_hat_new;
        state.propagate_free(0.5 * dt);
        state.apply_sources(&src, dt)?;
        state.propagate_free(0.5 * dt);
        if step % 4 != 0 {
            continue;
        }
        let t = state.time;
        let profile = extract_profiles(&state, &src);
        let corr = modified_profile_correction(
            grid,
            t,
            &ensemble.x,
            &ensemble.v,
            &ensemble.w,
            &bins,
            Some(grid.dx()),
        );
        let raw: Vec<[Complex64; 3]> = bins
            .iter()
            .map(|&flat| [profile.h1[0][flat], profile.h1[1][flat], profile.h1[2][flat]])
            .collect();
        let modified: Vec<[Complex64; 3]> = raw
            .iter()
            .zip(&corr)
            .map(|(h, c)| [h[0] - c.0[0], h[1] - c.0[1], h[2] - c.0[2]])
            .collect();
        match (&raw_ref, &mod_ref) {
            (Some(r0), Some(m0)) => {
                for ((a, b), (c, d)) in raw.iter().zip(r0).zip(modified.iter().zip(m0)) {
                    for dcomp in 0..3 {
                        raw_var = raw_var.max((a[dcomp] - b[dcomp]).norm());
                        mod_var = mod_var.max((c[dcomp] - d[dcomp]).norm());
                    }
                }
            }
            _ => {
                raw_ref = Some(raw);
                mod_ref = Some(modified);
            }
        }
    }
    Ok((raw_var, mod_var))
}

fn snap_to_node(grid: Grid, pos: Vec3) -> Vec3 {
    let dx = grid.dx();
    [
        (pos[0] / dx).round() * dx,
        (pos[1] / dx).round() * dx,
        (pos[2] / dx).round() * dx,
    ]
}

/// Centered-difference ∂_d of a scalar grid field at a node position.
fn grid_gradient_component(rho: &[f64], grid: Grid, node: Vec3, d: usize) -> f64 {
    let n = grid.n;
    let dx = grid.dx();
    let mut bin = [0usize; 3];
    for c in 0..3 {
        bin[c] = ((node[c] / dx).round() as i64).rem_euclid(n as i64) as usize;
    }
    let mut hi = bin;
    let mut lo = bin;
    hi[d] = (bin[d] + 1) % n;
    lo[d] = (bin[d] + n - 1) % n;
    (rho[crate::fft::idx(n, hi[0], hi[1], hi[2])] - rho[crate::fft::idx(n, lo[0], lo[1], lo[2])])
        / (2.0 * dx)
}

/// The coupled small-data run: Vlasov particles against the pseudo-spectral
/// Maxwell solver, charge-conserving sources, conservation monitors, decay
/// fits, and the truncated low-order energy surrogate.
pub fn run_rvm(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid_n, cfg.box_length);
    let mut fft = Fft3::new(grid.n);
    let center = box_center(cfg);
    let data = GaussianPhaseSpace {
        amplitude: cfg.epsilon,
        center,
        sigma_x: cfg.sigma_x,
        sigma_v: cfg.sigma_v,
    };
    let mut ensemble =
        ParticleEnsemble::gaussian(cfg.box_length, &data, cfg.particles, cfg.seed);

    // fields: Coulomb solution of the deposited density plus a transverse
    // seed pulse of the same smallness
    let rho0 = deposit_charge(&ensemble, grid);
    let rho0_hat = crate::maxwell::state::to_spectral(&rho0, &mut fft);
    let mut state = gaussian_curl_pulse(grid, &mut fft, center, cfg.pulse_sigma, cfg.epsilon);
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let xi = grid.xi(ix, iy, iz);
        let k2 = dot(xi, xi);
        let m = Complex64::new(0.0, -1.0) * rho0_hat[flat] / k2;
        for d in 0..3 {
            state.e_hat[d][flat] += m * xi[d];
        }
    }
    state.invalidate_real();

    let dt = cfg.dt();
    let steps = (cfg.t_end / dt).round() as usize;
    let initial_charge = ensemble.total_weight();
    let initial_energy = total_energy(&state, &ensemble);

    let mut out = RunOutput::default();
    let window = cone_window(cfg);
    let dwindow = density_window(cfg);
    out.series
        .insert("field_cone".into(), DecaySeries::new(window));
    for name in ["density_center", "density_max", "density_grad_max"] {
        out.series.insert(name.into(), DecaySeries::new(dwindow));
    }
    out.series
        .insert("low_order_energy".into(), DecaySeries::new(window));
    out.series
        .insert("high_order_energy".into(), DecaySeries::new(window));
    out.series
        .insert("weighted_l2_f".into(), DecaySeries::new(window));
    let cone = ConeSampler::axes(center, vec![Offset::Fixed(0.0)]);

    let low_bins = low_mode_bins(grid, 6);
    let mut rho_hat_old = rho0_hat;
    let mut prev_profile: Option<crate::maxwell::profile::HalfWaveProfile> = None;
    let mut prev_prev: Option<crate::maxwell::profile::HalfWaveProfile> = None;
    let mut low_series_for_var: Vec<(f64, f64)> = Vec::new();

    for step in 1..=steps {
        // half kick with fields at the current positions
        {
            let real = state.real(&mut fft).clone();
            let (e_at, b_at) = ensemble.gather_fields(grid, &real);
            ensemble.push_momentum(&e_at, &b_at, 0.5 * dt);
        }
        // midpoint current from the half-updated momenta
        let mut mid = ensemble.clone();
        mid.push_position(0.5 * dt);
        let j_mid = deposit(&mid, grid).j;
        // full drift
        ensemble.push_position(dt);
        let rho_new = deposit_charge(&ensemble, grid);
        let (src, rho_hat_new) =
            charge_conserving_sources(grid, &mut fft, &rho_hat_old, &rho_new, &j_mid, dt);
        rho_hat_old = rho_hat_new;
        // Strang field step
        state.propagate_free(0.5 * dt);
        state.apply_sources(&src, dt)?;
        state.propagate_free(0.5 * dt);
        // closing half kick at the new positions
        {
            let real = state.real(&mut fft).clone();
            let (e_at, b_at) = ensemble.gather_fields(grid, &real);
            ensemble.push_momentum(&e_at, &b_at, 0.5 * dt);
        }

        if step % cfg.snapshot_every != 0 {
            continue;
        }
        let t = state.time;
        let gauss = state.gauss_residual(&rho_hat_old);
        let div_b = state.div_b_residual();
        out.conservation.update(
            initial_charge,
            ensemble.total_weight(),
            initial_energy,
            total_energy(&state, &ensemble),
            gauss,
            div_b,
        );
        // |B| isolates the radiated field: the cloud's quasi-static Coulomb
        // field falls one power faster along the cone ray and would bury the
        // t⁻¹ rate within this horizon
        if let Some(v) = cone.sample_kind(&mut state, &mut fft, SampleKind::MagneticOnly)[0].1 {
            out.series.get_mut("field_cone").unwrap().push(t, v);
        }
        let rho_field = [rho_new.clone(), rho_new.clone(), rho_new.clone()];
        out.series
            .get_mut("density_center")
            .unwrap()
            .push(t, trilinear(grid, &rho_field, center)[0]);
        out.series
            .get_mut("density_max")
            .unwrap()
            .push(t, density_moment(&rho_new, grid, 0));
        out.series
            .get_mut("density_grad_max")
            .unwrap()
            .push(t, density_moment(&rho_new, grid, 1));
        // profile energies on the zeroth-order MODIFIED profiles (the
        // uncorrected low modes grow secularly within the horizon because
        // the lattice resonance phase cannot complete an oscillation; the
        // correction removes exactly that linear part), ∂_t by snapshot
        // differencing, one behind
        let mut profile = extract_profiles(&state, &src);
        {
            let stride = (ensemble.len() / 20_000).max(1);
            let xs: Vec<crate::Vec3> = ensemble.x.iter().step_by(stride).cloned().collect();
            let vs: Vec<crate::Vec3> = ensemble.v.iter().step_by(stride).cloned().collect();
            let ws: Vec<f64> = ensemble
                .w
                .iter()
                .step_by(stride)
                .map(|&w| w * stride as f64)
                .collect();
            let corr = modified_profile_correction(
                grid,
                t,
                &xs,
                &vs,
                &ws,
                &low_bins,
                Some(grid.dx()),
            );
            for (slot, &flat) in low_bins.iter().enumerate() {
                for d in 0..3 {
                    profile.h1[d][flat] -= corr[slot].0[d];
                    profile.h2[d][flat] -= corr[slot].1[d];
                }
            }
        }
        if let (Some(pp), Some(p)) = (&prev_prev, &prev_profile) {
            let s = energy_surrogates(p, Some((pp, &profile)), Some(&ensemble), cfg.sigma_v);
            out.series
                .get_mut("low_order_energy")
                .unwrap()
                .push(p.time, s.low_eb);
            out.series
                .get_mut("high_order_energy")
                .unwrap()
                .push(p.time, s.high_eb);
            out.series
                .get_mut("weighted_l2_f")
                .unwrap()
                .push(p.time, s.weighted_l2_f);
            if p.time >= 4.0 {
                low_series_for_var.push((p.time, s.low_eb));
            }
        }
        prev_prev = prev_profile.take();
        prev_profile = Some(profile);
    }

    let t_final = state.time;
    out.final_fields = Some((grid, t_final, state.real(&mut fft).clone()));
    out.final_ensemble = Some((t_final, ensemble.clone()));
    out.fit("field_cone");
    out.fit("density_center");
    out.fit("density_grad_max");
    if let Some(f) = out.fits.get("field_cone") {
        out.checks.push(Check::range_pub(
            "rvm_cone_exponent",
            f.exponent,
            -1.2,
            -0.8,
        ));
    }
    if let Some(f) = out.fits.get("density_center") {
        out.checks.push(Check::range_pub(
            "rvm_density_exponent",
            f.exponent,
            -3.2,
            -2.8,
        ));
    }
    out.checks.push(Check::bound_pub(
        "gauss_residual_max",
        out.conservation.gauss_max,
        1e-6,
    ));
    out.checks.push(Check::bound_pub(
        "energy_drift",
        out.conservation.energy_drift,
        1e-3,
    ));
    out.checks.push(Check::bound_pub(
        "charge_drift",
        out.conservation.charge_drift,
        1e-12,
    ));
    if low_series_for_var.len() >= 4 {
        // "doesn't grow" is about the trend, not the bounded oscillation:
        // compare the mean over the first and second halves of the run
        let mid = low_series_for_var.len() / 2;
        let mean = |s: &[(f64, f64)]| s.iter().map(|&(_, v)| v).sum::<f64>() / s.len() as f64;
        let first = mean(&low_series_for_var[..mid]);
        let second = mean(&low_series_for_var[mid..]);
        let overall = mean(&low_series_for_var);
        let growth = (second - first).abs() / overall.max(1e-300);
        out.checks.push(Check::bound_pub(
            "low_order_energy_variation",
            growth,
            0.2,
        ));
        let lo = low_series_for_var
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min);
        let hi = low_series_for_var
            .iter()
            .map(|&(_, v)| v)
            .fold(0.0f64, f64::max);
        out.notes.push(format!(
            "low-order energy: half-mean growth {:.1}% (first {:.4e}, second {:.4e}), oscillation range {:.1}%",
            100.0 * growth,
            first,
            second,
            100.0 * (hi - lo) / hi.max(1e-300)
        ));
    }
    Ok(out)
}

impl Check {
    pub fn bound_pub(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold && value.is_finite(),
            note: String::new(),
        }
    }

    pub fn range_pub(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: hi,
            pass: value >= lo && value <= hi,
            note: format!("expected in [{lo}, {hi}]"),
        }
    }
}
