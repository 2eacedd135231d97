//! Real-to-trigonometric transforms on uniform grids of `[0, 2π)`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Cosine/sine amplitudes for modes `0..=n_out` of grid samples.
///
/// `n_out` must be strictly below `values.len() / 2`; the Nyquist bin is
/// never reported.
pub(crate) fn analyze(values: &[f64], n_out: usize) -> (Vec<f64>, Vec<f64>) {
    let m = values.len();
    debug_assert!(2 * n_out < m);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    let mut cos = vec![0.0; n_out + 1];
    let mut sin = vec![0.0; n_out + 1];
    cos[0] = buf[0].re * inv;
    for k in 1..=n_out {
        cos[k] = 2.0 * buf[k].re * inv;
        sin[k] = -2.0 * buf[k].im * inv;
    }
    (cos, sin)
}

/// Values at `x_j = 2πj/m` of the trigonometric polynomial with the given
/// amplitudes. Modes above `m/2` are folded onto the grid, so this is exact
/// pointwise evaluation for any `m ≥ 1`.
pub(crate) fn synthesize(cos: &[f64], sin: &[f64], m: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[0].re += cos[0];
    for k in 1..cos.len() {
        buf[k % m] += Complex64::new(cos[k], -sin[k]);
    }
    inverse(m).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}
