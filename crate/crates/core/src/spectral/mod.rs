//! Trigonometric fields on the torus `[0, 2π)` and the nonlocal operators
//! acting on them.
//!
//! A [`SpectralField`] stores the amplitudes of
//!
//! ```text
//! f(x) = a_0 + Σ_{k=1..N} ( a_k cos(kx) + b_k sin(kx) )
//! ```
//!
//! All linear operators (Hilbert transform, Zygmund operator, derivatives)
//! act diagonally on these amplitudes and are exact. Pointwise products are
//! evaluated on a zero-padded collocation grid large enough that no
//! aliasing reaches the retained modes.

mod fft;
pub mod quadrature;

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared symmetry class of a field.
///
/// `Even` fields carry only cosine amplitudes and `Odd` fields only sine
/// amplitudes (their mean is zero). Pointwise products always come back as
/// `Mixed`: their parity is something callers verify, not assume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    fn swapped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }

    fn join(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            Parity::Mixed
        }
    }
}

/// A real 2π-periodic trigonometric polynomial of degree at most `n_modes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    cos: Vec<f64>,
    sin: Vec<f64>,
    grid_size: usize,
    parity: Parity,
}

/// Smallest grid that represents `n` modes without touching the Nyquist bin.
pub fn min_grid(n_modes: usize) -> usize {
    2 * n_modes + 2
}

/// Grid used for pointwise products whose `n_out` lowest modes must be
/// alias-free.
fn product_grid(n_f: usize, n_g: usize, n_out: usize) -> usize {
    (n_f + n_g + n_out + 1)
        .max(min_grid(n_out))
        .next_power_of_two()
        .max(4)
}

impl SpectralField {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            cos: vec![0.0; n_modes + 1],
            sin: vec![0.0; n_modes + 1],
            grid_size: min_grid(n_modes),
            parity: Parity::Mixed,
        }
    }

    pub fn constant(n_modes: usize, value: f64) -> Self {
        let mut f = Self::zeros(n_modes);
        f.cos[0] = value;
        f.parity = Parity::Even;
        f
    }

    /// `amplitude · cos(kx)` truncated at `n_modes` (requires `k ≤ n_modes`).
    pub fn cos_mode(n_modes: usize, k: usize, amplitude: f64) -> Self {
        assert!(k <= n_modes, "mode {k} beyond truncation {n_modes}");
        let mut f = Self::zeros(n_modes);
        f.cos[k] = amplitude;
        f.parity = Parity::Even;
        f
    }

    /// `amplitude · sin(kx)`, `1 ≤ k ≤ n_modes`.
    pub fn sin_mode(n_modes: usize, k: usize, amplitude: f64) -> Self {
        assert!(k >= 1 && k <= n_modes, "mode {k} outside 1..={n_modes}");
        let mut f = Self::zeros(n_modes);
        f.sin[k] = amplitude;
        f.parity = Parity::Odd;
        f
    }

    /// Builds a field from amplitude arrays of equal length `N + 1`.
    pub fn from_coefficients(cos: Vec<f64>, mut sin: Vec<f64>) -> Result<Self> {
        if cos.is_empty() || cos.len() != sin.len() {
            return Err(Error::Dimension(format!(
                "cosine/sine arrays have lengths {} and {}",
                cos.len(),
                sin.len()
            )));
        }
        if sin[0] != 0.0 {
            return Err(Error::Dimension("sine amplitude b_0 must be zero".into()));
        }
        sin[0] = 0.0;
        let n = cos.len() - 1;
        Ok(Self {
            cos,
            sin,
            grid_size: min_grid(n),
            parity: Parity::Mixed,
        })
    }

    /// Pure cosine series `Σ a_k cos(kx)`, with `a_0` the mean.
    pub fn even(cos: Vec<f64>) -> Result<Self> {
        let n = cos.len().checked_sub(1).ok_or_else(|| {
            Error::Dimension("cosine series needs at least the mean amplitude".into())
        })?;
        let mut f = Self::from_coefficients(cos, vec![0.0; n + 1])?;
        f.parity = Parity::Even;
        Ok(f)
    }

    /// Pure sine series; `sin[0]` must be zero.
    pub fn odd(sin: Vec<f64>) -> Result<Self> {
        let n = sin.len().checked_sub(1).ok_or_else(|| {
            Error::Dimension("sine series needs at least one slot".into())
        })?;
        let mut f = Self::from_coefficients(vec![0.0; n + 1], sin)?;
        f.parity = Parity::Odd;
        Ok(f)
    }

    /// Trigonometric interpolant of samples on `x_j = 2πj/M`.
    ///
    /// `M` must be even and at least 4. The result has `M/2 − 1` modes; the
    /// Nyquist component is not representable as a cosine/sine pair and is
    /// discarded.
    pub fn to_spectral(values: &[f64]) -> Result<Self> {
        let m = values.len();
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid length must be even and at least 4, got {m}"
            )));
        }
        let n = m / 2 - 1;
        let (cos, sin) = fft::analyze(values, n);
        Ok(Self {
            cos,
            sin,
            grid_size: m,
            parity: Parity::Mixed,
        })
    }

    /// Samples `f` on `min_grid(n_modes)` points and interpolates.
    pub fn from_fn(n_modes: usize, f: impl Fn(f64) -> f64) -> Self {
        let m = min_grid(n_modes);
        let values: Vec<f64> = grid_points(m).map(f).collect();
        Self::to_spectral(&values).expect("grid is valid by construction")
    }

    pub fn n_modes(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Result<Self> {
        if grid_size < min_grid(self.n_modes()) {
            return Err(Error::Config(format!(
                "grid size {grid_size} below minimum {} for {} modes",
                min_grid(self.n_modes()),
                self.n_modes()
            )));
        }
        self.grid_size = grid_size;
        Ok(self)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn mean(&self) -> f64 {
        self.cos[0]
    }

    /// Grid values on the field's own `grid_size`.
    pub fn values(&self) -> Vec<f64> {
        self.values_on(self.grid_size)
    }

    /// Grid values on `m` equispaced points of `[0, 2π)`.
    pub fn values_on(&self, m: usize) -> Vec<f64> {
        fft::synthesize(&self.cos, &self.sin, m)
    }

    /// Direct evaluation at a single point (no transform).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.cos[0];
        for k in 1..=self.n_modes() {
            let (s, c) = (k as f64 * x).sin_cos();
            acc += self.cos[k] * c + self.sin[k] * s;
        }
        acc
    }

    /// Supremum norm estimated on a grid oversampled four times.
    pub fn sup_norm(&self) -> f64 {
        let m = self.grid_size.max(4 * min_grid(self.n_modes()));
        self.values_on(m).iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute amplitude.
    pub fn max_coeff(&self) -> f64 {
        self.cos
            .iter()
            .chain(self.sin.iter())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_cos_coeff(&self) -> f64 {
        self.cos.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_sin_coeff(&self) -> f64 {
        self.sin.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pads with zeros or truncates to `n_modes`.
    pub fn resized(&self, n_modes: usize) -> Self {
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        cos.resize(n_modes + 1, 0.0);
        sin.resize(n_modes + 1, 0.0);
        Self {
            cos,
            sin,
            grid_size: min_grid(n_modes),
            parity: self.parity,
        }
    }

    /// Cosine part, flagged even.
    pub fn even_part(&self) -> Self {
        let mut f = self.clone();
        f.sin.iter_mut().for_each(|b| *b = 0.0);
        f.parity = Parity::Even;
        f
    }

    /// Sine part, flagged odd.
    pub fn odd_part(&self) -> Self {
        let mut f = self.clone();
        f.cos.iter_mut().for_each(|a| *a = 0.0);
        f.parity = Parity::Odd;
        f
    }

    pub fn without_mean(&self) -> Self {
        let mut f = self.clone();
        f.cos[0] = 0.0;
        f
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut f = self.clone();
        f.cos.iter_mut().for_each(|a| *a *= t);
        f.sin.iter_mut().for_each(|b| *b *= t);
        f
    }

    /// `self + t·other`, truncated at the larger of the two degrees.
    pub fn axpy(&self, t: f64, other: &Self) -> Self {
        let n = self.n_modes().max(other.n_modes());
        let mut f = self.resized(n);
        for k in 0..=other.n_modes() {
            f.cos[k] += t * other.cos[k];
            f.sin[k] += t * other.sin[k];
        }
        f.grid_size = self.grid_size.max(other.grid_size);
        f.parity = self.parity.join(other.parity);
        f
    }

    /// Rigid translation `x ↦ f(x − shift)`, exact mode by mode.
    pub fn translated(&self, shift: f64) -> Self {
        let mut f = self.clone();
        for k in 1..=self.n_modes() {
            let (s, c) = (k as f64 * shift).sin_cos();
            let (a, b) = (self.cos[k], self.sin[k]);
            f.cos[k] = a * c - b * s;
            f.sin[k] = a * s + b * c;
        }
        if shift != 0.0 {
            f.parity = Parity::Mixed;
        }
        f
    }

    /// Periodic Hilbert transform: `cos(kx) ↦ sin(kx)`, `sin(kx) ↦ −cos(kx)`,
    /// constants ↦ 0.
    pub fn hilbert(&self) -> Self {
        let n = self.n_modes();
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n + 1];
        for k in 1..=n {
            cos[k] = -self.sin[k];
            sin[k] = self.cos[k];
        }
        Self {
            cos,
            sin,
            grid_size: self.grid_size,
            parity: self.parity.swapped(),
        }
    }

    /// Zygmund operator `Λ = H∂x`, the Fourier multiplier `|k|`.
    pub fn zygmund(&self) -> Self {
        self.zygmund_pow(1)
    }

    /// `Λ^p` for integer `p ≥ 0`.
    pub fn zygmund_pow(&self, p: u32) -> Self {
        let mut f = self.clone();
        if p > 0 {
            f.cos[0] = 0.0;
        }
        for k in 1..=self.n_modes() {
            let w = (k as f64).powi(p as i32);
            f.cos[k] *= w;
            f.sin[k] *= w;
        }
        f
    }

    /// Spectral derivative of order 1, 2 or 3.
    pub fn derivative(&self, order: u32) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder(order));
        }
        let n = self.n_modes();
        let mut cos = vec![0.0; n + 1];
        let mut sin = vec![0.0; n + 1];
        for k in 1..=n {
            let kf = k as f64;
            let (a, b) = (self.cos[k], self.sin[k]);
            match order {
                1 => {
                    cos[k] = kf * b;
                    sin[k] = -kf * a;
                }
                2 => {
                    let w = -kf * kf;
                    cos[k] = w * a;
                    sin[k] = w * b;
                }
                _ => {
                    let w = kf * kf * kf;
                    cos[k] = -w * b;
                    sin[k] = w * a;
                }
            }
        }
        let parity = if order % 2 == 1 {
            self.parity.swapped()
        } else {
            self.parity
        };
        Ok(Self {
            cos,
            sin,
            grid_size: self.grid_size,
            parity,
        })
    }

    /// Dealiased pointwise product truncated at the larger input degree.
    pub fn multiply(&self, other: &Self) -> Self {
        self.multiply_to(other, self.n_modes().max(other.n_modes()))
    }

    /// Dealiased pointwise product, keeping modes `0..=n_out`.
    ///
    /// The product is formed on a padded grid of more than
    /// `deg f + deg g + n_out` points, so every retained amplitude is exact.
    pub fn multiply_to(&self, other: &Self, n_out: usize) -> Self {
        let m = product_grid(self.n_modes(), other.n_modes(), n_out);
        let fv = self.values_on(m);
        let gv = other.values_on(m);
        let prod: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
        let (cos, sin) = fft::analyze(&prod, n_out);
        Self {
            cos,
            sin,
            grid_size: min_grid(n_out).max(self.grid_size.max(other.grid_size)),
            parity: Parity::Mixed,
        }
    }

    /// Commutator `⟦H, f⟧[g] = H(f·g) − f·H(g)` with `f = self`, truncated
    /// at the larger input degree.
    pub fn commutator_h(&self, g: &Self) -> Self {
        self.commutator_h_to(g, self.n_modes().max(g.n_modes()))
    }

    /// Commutator keeping modes `0..=n_out`.
    pub fn commutator_h_to(&self, g: &Self, n_out: usize) -> Self {
        let fg = self.multiply_to(g, n_out).hilbert();
        let f_hg = self.multiply_to(&g.hilbert(), n_out);
        fg - f_hg
    }
}

/// Points `x_j = 2πj/m`, `j = 0..m`.
pub fn grid_points(m: usize) -> impl Iterator<Item = f64> {
    let h = 2.0 * PI / m as f64;
    (0..m).map(move |j| j as f64 * h)
}

/// Free-function form of [`SpectralField::to_spectral`].
pub fn to_spectral(values: &[f64]) -> Result<SpectralField> {
    SpectralField::to_spectral(values)
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Add for SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(1.0, &rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Sub for SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(-1.0, &rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, t: f64) -> SpectralField {
        self.scaled(t)
    }
}

impl Mul<f64> for SpectralField {
    type Output = SpectralField;
    fn mul(self, t: f64) -> SpectralField {
        self.scaled(t)
    }
}

impl Neg for SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "index {i}: {x} vs {y}");
        }
    }

    #[test]
    fn to_spectral_cos2_on_16_points() {
        let v: Vec<f64> = grid_points(16).map(|x| (2.0 * x).cos()).collect();
        let f = to_spectral(&v).unwrap();
        assert_eq!(f.n_modes(), 7);
        let mut expect = vec![0.0; 8];
        expect[2] = 1.0;
        assert_close(f.cos_coeffs(), &expect, 1e-15);
        assert_close(f.sin_coeffs(), &[0.0; 8], 1e-15);
    }

    #[test]
    fn to_spectral_constant_and_linear_combination() {
        let f = to_spectral(&[3.0; 12]).unwrap();
        assert!((f.mean() - 3.0).abs() < 1e-15);
        assert!(f.cos_coeffs()[1..].iter().all(|a| a.abs() < 1e-15));
        assert!(f.max_sin_coeff() < 1e-15);

        let v: Vec<f64> = grid_points(32).map(|x| x.sin() + x.cos()).collect();
        let f = to_spectral(&v).unwrap();
        assert!((f.cos_coeffs()[1] - 1.0).abs() < 1e-15);
        assert!((f.sin_coeffs()[1] - 1.0).abs() < 1e-15);
        assert!(f.mean().abs() < 1e-15);
    }

    #[test]
    fn to_spectral_rejects_bad_grids() {
        assert!(matches!(to_spectral(&[1.0, 2.0]), Err(Error::Config(_))));
        assert!(matches!(to_spectral(&[1.0; 7]), Err(Error::Config(_))));
    }

    #[test]
    fn round_trip_grid_coefficients_grid() {
        let f = SpectralField::from_fn(20, |x| (x.sin()).exp() - 0.3 * (5.0 * x).cos());
        let v = f.values();
        let g = to_spectral(&v).unwrap();
        let w = g.values();
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).abs() <= 10.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn hilbert_mode_action() {
        for k in 1..6 {
            let h = SpectralField::cos_mode(8, k, 1.0).hilbert();
            assert_eq!(h.sin_coeffs()[k], 1.0);
            assert_eq!(h.max_cos_coeff(), 0.0);
            assert_eq!(h.parity(), Parity::Odd);
        }
        let h = SpectralField::sin_mode(4, 1, 1.0).hilbert();
        assert_eq!(h.cos_coeffs()[1], -1.0);
        assert_eq!(SpectralField::constant(4, 2.5).hilbert().max_coeff(), 0.0);
    }

    #[test]
    fn zygmund_and_derivatives_of_modes() {
        let z = SpectralField::cos_mode(5, 3, 1.0).zygmund();
        assert_eq!(z.cos_coeffs()[3], 3.0);
        let z = SpectralField::sin_mode(5, 2, 1.0).zygmund();
        assert_eq!(z.sin_coeffs()[2], 2.0);
        assert_eq!(SpectralField::constant(5, 1.0).zygmund().max_coeff(), 0.0);

        let k = 4;
        let f = SpectralField::cos_mode(6, k, 1.0);
        let kf = k as f64;
        assert_eq!(f.derivative(1).unwrap().sin_coeffs()[k], -kf);
        assert_eq!(f.derivative(2).unwrap().cos_coeffs()[k], -kf * kf);
        assert_eq!(f.derivative(3).unwrap().sin_coeffs()[k], kf * kf * kf);
        assert!(matches!(f.derivative(0), Err(Error::DerivativeOrder(0))));
        assert!(matches!(f.derivative(4), Err(Error::DerivativeOrder(4))));
    }

    #[test]
    fn products_by_identity() {
        let c = SpectralField::cos_mode(4, 1, 1.0);
        let s = SpectralField::sin_mode(4, 1, 1.0);
        let cc = c.multiply(&c);
        assert!((cc.mean() - 0.5).abs() < 1e-15);
        assert!((cc.cos_coeffs()[2] - 0.5).abs() < 1e-15);
        let cs = c.multiply(&s);
        assert!((cs.sin_coeffs()[2] - 0.5).abs() < 1e-15);
        assert!(cs.max_cos_coeff() < 1e-15);
        assert_eq!(c.multiply(&SpectralField::zeros(4)).max_coeff(), 0.0);
    }

    #[test]
    fn commutator_examples() {
        let c = SpectralField::cos_mode(6, 1, 1.0);
        let one = SpectralField::constant(6, 1.0);
        let r = c.commutator_h(&one);
        assert!((r.sin_coeffs()[1] - 1.0).abs() < 1e-15);
        assert!(r.max_cos_coeff() < 1e-15);
        assert!(c.commutator_h(&c).max_coeff() < 1e-15);
        let g = SpectralField::from_fn(6, |x| (2.0 * x).sin() + x.cos());
        assert!(SpectralField::constant(6, 4.0).commutator_h(&g).max_coeff() < 1e-14);
    }

    #[test]
    fn translation_is_exact() {
        let f = SpectralField::cos_mode(6, 3, 1.0);
        let t = f.translated(0.4);
        for x in grid_points(13) {
            assert!((t.eval(x) - (3.0 * (x - 0.4)).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn mismatched_coefficient_arrays_are_rejected() {
        assert!(SpectralField::from_coefficients(vec![0.0; 3], vec![0.0; 2]).is_err());
        assert!(SpectralField::from_coefficients(vec![0.0; 3], vec![1.0, 0.0, 0.0]).is_err());
    }
}
