#![allow(dead_code)]

use oddwave::spectral::to_spectral;
use oddwave::{ModelParams, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Even field with standard normal amplitudes on frequencies `m, 2m, …` up
/// to `degree`, damped by `decay^j` on the j-th harmonic.
pub fn random_even_fold(rng: &mut impl Rng, m: usize, degree: usize, decay: f64) -> SpectralField {
    let mut a = vec![0.0; degree + 1];
    let mut j = 1;
    while m * j <= degree {
        let z: f64 = rng.sample(StandardNormal);
        a[m * j] = z * decay.powi(j as i32 - 1);
        j += 1;
    }
    SpectralField::even(a).unwrap()
}

/// Field with mean, cosine and sine amplitudes, all standard normal.
pub fn random_field(rng: &mut impl Rng, degree: usize) -> SpectralField {
    let cos: Vec<f64> = (0..=degree).map(|_| rng.sample(StandardNormal)).collect();
    let mut sin: Vec<f64> = (0..=degree).map(|_| rng.sample(StandardNormal)).collect();
    sin[0] = 0.0;
    SpectralField::from_coefficients(cos, sin).unwrap()
}

/// Pointwise product on a grid fine enough to hold the full product, then
/// truncated to `n_out` modes.
pub fn grid_product(f: &SpectralField, g: &SpectralField, n_out: usize) -> SpectralField {
    let m = 2 * (f.n_modes() + g.n_modes()) + 4;
    let values: Vec<f64> = f
        .values_on(m)
        .iter()
        .zip(g.values_on(m))
        .map(|(a, b)| a * b)
        .collect();
    to_spectral(&values).unwrap().resized(n_out)
}

/// `H(fg) − f·H(g)` straight from the definition.
pub fn grid_commutator(f: &SpectralField, g: &SpectralField, n_out: usize) -> SpectralField {
    let full = f.n_modes() + g.n_modes();
    let hfg = grid_product(f, g, full).hilbert();
    let fhg = grid_product(f, &g.hilbert(), full);
    (hfg - fhg).resized(n_out)
}

/// The residual written with the Zygmund operator `Λ`,
///
/// ```text
/// 2cφ' + (cα0 + (α0−β)/ε) Λφ' + (1/ε)(φ' + Hφ)
///   + H[(Λφ)²] − ⟦H,φ⟧[Λφ] + (α0−β)⟦H,φ⟧[Λ³φ]
/// ```
///
/// with grid products. Independent of the library's evaluation path.
pub fn oracle_residual(c: f64, phi: &SpectralField, p: &ModelParams) -> SpectralField {
    let n = phi.n_modes();
    let phi = phi.without_mean();
    let d1 = phi.derivative(1).unwrap();
    let lam = phi.zygmund();
    let lam3 = phi.zygmund_pow(3);
    let gap = p.alpha0() - p.beta();
    let inv_eps = 1.0 / p.epsilon();

    let linear = &d1 * (2.0 * c + inv_eps)
        + d1.zygmund() * (c * p.alpha0() + gap * inv_eps)
        + phi.hilbert() * inv_eps;
    let square = grid_product(&lam, &lam, n).hilbert();
    let comm1 = grid_commutator(&phi, &lam, n);
    let comm3 = grid_commutator(&phi, &lam3, n);
    linear.resized(n) + square - comm1 + comm3 * gap
}

pub fn max_abs_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_coeff()
}

/// Largest cosine amplitude and largest amplitude at a frequency that is
/// not a multiple of `m`.
pub fn symmetry_defects(f: &SpectralField, m: usize) -> (f64, f64) {
    let cos_part = f.max_cos_coeff();
    let off = f
        .cos_coeffs()
        .iter()
        .zip(f.sin_coeffs())
        .enumerate()
        .filter(|(k, _)| k % m != 0)
        .map(|(_, (a, b))| a.abs().max(b.abs()))
        .fold(0.0, f64::max);
    (cos_part, off)
}

pub const EPSILONS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
pub const ALPHA0S: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
pub const BETAS: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];
