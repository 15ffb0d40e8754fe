//! The power-law fitter on synthetic series: exact recovery on pure power
//! laws, graceful rejection of bad input, and window-robustness.
//!
//!     cargo run --release --example decay_fitting

use rvm_lab::diagnostics::series::{fit_decay_exponent, fit_with_shrunk_window, DecaySeries};

fn series(f: impl Fn(f64) -> f64, t0: f64, t1: f64, n: usize) -> DecaySeries {
    let mut s = DecaySeries::new((t0, t1));
    for k in 0..n {
        let t = t0 + (t1 - t0) * k as f64 / (n - 1) as f64;
        s.push(t, f(t));
    }
    s
}

fn main() {
    let pure = series(|t| 3.0 * t.powi(-2), 10.0, 80.0, 40);
    let fit = fit_decay_exponent(&pure).unwrap();
    println!(
        "pure t^-2:       exponent = {:+.6} +- {:.1e}, max log-residual {:.1e}",
        fit.exponent, fit.stderr, fit.max_residual
    );

    let wobbly = series(|t| t.powi(-1) * (1.0 + 0.01 * t.ln().sin()), 10.0, 80.0, 40);
    let fit = fit_decay_exponent(&wobbly).unwrap();
    println!(
        "t^-1 (1% wobble): exponent = {:+.6} +- {:.1e}",
        fit.exponent, fit.stderr
    );

    let flat = series(|_| 4.2, 10.0, 80.0, 40);
    let fit = fit_decay_exponent(&flat).unwrap();
    println!("constant:        exponent = {:+.6}", fit.exponent);

    // shrinking the window barely moves a genuine power law
    let full = fit_decay_exponent(&pure).unwrap();
    let shrunk = fit_with_shrunk_window(&pure, 0.125).unwrap();
    println!(
        "window shrink:   {:+.6} -> {:+.6}",
        full.exponent, shrunk.exponent
    );

    // rejection paths stay loud
    let narrow = DecaySeries {
        window: (10.0, 11.0),
        ..pure
    };
    println!("narrow window:   {}", fit_decay_exponent(&narrow).unwrap_err());
}
