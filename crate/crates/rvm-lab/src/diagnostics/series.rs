//! Time series of positive observables and power-law exponent fitting.

use crate::error::{Error, Result};

/// A time-stamped scalar observable with its fit window.
#[derive(Clone, Debug)]
pub struct DecaySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Only samples with t ∈ [window.0, window.1] enter the fit.
    pub window: (f64, f64),
}

impl DecaySeries {
    pub fn new(window: (f64, f64)) -> Self {
        DecaySeries {
            times: vec![],
            values: vec![],
            window,
        }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        debug_assert!(
            self.times.last().map_or(true, |&last| t > last),
            "times must be strictly increasing"
        );
        self.times.push(t);
        self.values.push(value);
    }

    /// All values identically zero (e.g. a vacuum run): flagged, not fitted.
    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    /// Least-squares slope of log value against log t.
    pub exponent: f64,
    /// Standard error of the slope from residual variance.
    pub stderr: f64,
    pub samples: usize,
    /// Max absolute log-residual of the fit (0 for an exact power law).
    pub max_residual: f64,
}

/// Least-squares power-law fit inside the series window.
pub fn fit_decay_exponent(series: &DecaySeries) -> Result<FitResult> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if t < series.window.0 || t > series.window.1 {
            continue;
        }
        if !(t > 0.0) {
            return Err(Error::FitRejected(format!("nonpositive time {t}")));
        }
        if !(v > 0.0) {
            return Err(Error::FitRejected(format!(
                "nonpositive value {v} at t = {t}"
            )));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < 8 {
        return Err(Error::FitRejected(format!(
            "window [{}, {}] holds only {n} samples (need 8)",
            series.window.0, series.window.1
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitRejected("zero time spread in window".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut max_residual = 0.0f64;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
        max_residual = max_residual.max(r.abs());
    }
    let stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        exponent: slope,
        stderr,
        samples: n,
        max_residual,
    })
}

/// Fit with the window shrunk by the given fraction on both sides
/// (robustness probe: a genuine power law barely moves).
pub fn fit_with_shrunk_window(series: &DecaySeries, fraction: f64) -> Result<FitResult> {
    let (a, b) = series.window;
    let span = b - a;
    let shrunk = DecaySeries {
        times: series.times.clone(),
        values: series.values.clone(),
        window: (a + fraction * span, b - fraction * span),
    };
    fit_decay_exponent(&shrunk)
}
