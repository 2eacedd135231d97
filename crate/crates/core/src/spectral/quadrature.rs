//! Slow principal-value quadratures of the singular-integral forms of `H`
//! and `Λ`. These are cross-checks for the Fourier multipliers in the parent
//! module and are never used on the production path.
//!
//! Both rules use the midpoint nodes `y_j = −π + (j + ½)h` with an even
//! node count, so the nodes come in symmetric pairs `±y` and `y = 0` is
//! excluded. Pairing the nodes is exactly the symmetric exclusion that
//! defines the principal value; what remains is a smooth periodic integrand
//! for which the midpoint rule converges spectrally.

use std::f64::consts::PI;

/// `H[f](x) = (1/2π) p.v.∫_{−π}^{π} f(x − y) cot(y/2) dy`.
pub fn hilbert_pv(f: impl Fn(f64) -> f64, x: f64, nodes: usize) -> f64 {
    let q = nodes.max(2) / 2;
    let h = PI / q as f64;
    let mut acc = 0.0;
    for j in 0..q {
        let y = (j as f64 + 0.5) * h;
        acc += (f(x - y) - f(x + y)) / (0.5 * y).tan();
    }
    acc * h / (2.0 * PI)
}

/// `Λ[f](x) = (1/4π) p.v.∫_{−π}^{π} (f(x) − f(x − y)) / sin²(y/2) dy`.
pub fn zygmund_pv(f: impl Fn(f64) -> f64, x: f64, nodes: usize) -> f64 {
    let q = nodes.max(2) / 2;
    let h = PI / q as f64;
    let fx = f(x);
    let mut acc = 0.0;
    for j in 0..q {
        let y = (j as f64 + 0.5) * h;
        let s = (0.5 * y).sin();
        acc += (2.0 * fx - f(x - y) - f(x + y)) / (s * s);
    }
    acc * h / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_of_cosine_is_sine() {
        for k in 1..5 {
            for &x in &[0.0, 0.3, 1.7, 4.0] {
                let v = hilbert_pv(|y| (k as f64 * y).cos(), x, 2048);
                assert!((v - (k as f64 * x).sin()).abs() < 1e-10, "k={k} x={x} v={v}");
            }
        }
    }

    #[test]
    fn zygmund_of_cosine_is_k_cosine() {
        for k in 1..5 {
            let x = 0.9;
            let v = zygmund_pv(|y| (k as f64 * y).cos(), x, 2048);
            assert!((v - k as f64 * (k as f64 * x).cos()).abs() < 1e-8);
        }
    }
}
