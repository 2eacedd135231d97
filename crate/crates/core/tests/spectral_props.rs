mod common;

use std::f64::consts::PI;

use common::*;
use oddwave::spectral::quadrature::{hilbert_pv, zygmund_pv};
use oddwave::spectral::to_spectral;
use oddwave::{Parity, SpectralField};
use proptest::prelude::*;

fn field(degree: usize) -> impl Strategy<Value = SpectralField> {
    (
        prop::collection::vec(-1.0f64..1.0, degree + 1),
        prop::collection::vec(-1.0f64..1.0, degree + 1),
    )
        .prop_map(|(cos, mut sin)| {
            sin[0] = 0.0;
            SpectralField::from_coefficients(cos, sin).unwrap()
        })
}

fn any_field(max_degree: usize) -> impl Strategy<Value = SpectralField> {
    (1..=max_degree).prop_flat_map(field)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_squared_is_minus_identity(f in any_field(256)) {
        let f = f.without_mean();
        let back = f.hilbert().hilbert();
        prop_assert!(max_abs_diff(&back, &(-f.clone())) < 1e-12);
    }

    #[test]
    fn hilbert_swaps_parity(cos in prop::collection::vec(-1.0f64..1.0, 2..40)) {
        let even = SpectralField::even(cos.clone()).unwrap();
        let h = even.hilbert();
        prop_assert_eq!(h.parity(), Parity::Odd);
        prop_assert!(h.cos_coeffs().iter().all(|&a| a == 0.0));
        for (hb, a) in h.sin_coeffs().iter().zip(&cos).skip(1) {
            prop_assert_eq!(*hb, *a);
        }
        let back = h.hilbert();
        prop_assert_eq!(back.parity(), Parity::Even);
        prop_assert!(back.sin_coeffs().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn zygmund_is_hilbert_of_derivative(f in any_field(128)) {
        let lam = f.zygmund();
        let hd = f.derivative(1).unwrap().hilbert();
        let scale = f.max_coeff() * f.n_modes() as f64;
        prop_assert!(max_abs_diff(&lam, &hd) <= 1e-15 * scale);
    }

    #[test]
    fn commutator_matches_definition(f in any_field(40), g in any_field(40)) {
        let n = f.n_modes().max(g.n_modes());
        let fast = f.commutator_h(&g);
        let slow = grid_commutator(&f, &g, n);
        prop_assert!(max_abs_diff(&fast, &slow) < 1e-12 * (1.0 + n as f64));
    }

    #[test]
    fn multiply_is_commutative_and_bilinear(
        f in any_field(64),
        g in any_field(64),
        h in any_field(64),
        s in -3.0f64..3.0,
    ) {
        prop_assert_eq!(f.multiply(&g), g.multiply(&f));
        let n = 128;
        let lhs = f.axpy(s, &h).multiply_to(&g, n);
        let rhs = f.multiply_to(&g, n).axpy(s, &h.multiply_to(&g, n));
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12 * (1.0 + n as f64));
    }

    #[test]
    fn product_agrees_with_grid_oracle(f in any_field(30), g in any_field(30)) {
        let n = f.n_modes() + g.n_modes();
        let fast = f.multiply_to(&g, n);
        let slow = grid_product(&f, &g, n);
        prop_assert!(max_abs_diff(&fast, &slow) < 1e-12 * (1.0 + n as f64));
    }

    #[test]
    fn grid_round_trip(f in any_field(100)) {
        let back = to_spectral(&f.values()).unwrap().resized(f.n_modes());
        prop_assert!(max_abs_diff(&back, &f) < 1e-13 * (1.0 + f.n_modes() as f64));
    }

    #[test]
    fn translation_is_exact(f in any_field(20), shift in -7.0f64..7.0, x in 0.0f64..(2.0 * PI)) {
        let moved = f.translated(shift);
        prop_assert!((moved.eval(x) - f.eval(x - shift)).abs() < 1e-12 * (1.0 + f.n_modes() as f64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hilbert_agrees_with_principal_value(f in any_field(8), x in 0.0f64..(2.0 * PI)) {
        let pv = hilbert_pv(|y| f.eval(y), x, 2048);
        prop_assert!((f.hilbert().eval(x) - pv).abs() < 1e-10);
    }

    #[test]
    fn zygmund_agrees_with_singular_integral(f in any_field(8), x in 0.0f64..(2.0 * PI)) {
        let pv = zygmund_pv(|y| f.eval(y), x, 2048);
        prop_assert!((f.zygmund().eval(x) - pv).abs() < 1e-8);
    }
}

#[test]
fn hilbert_of_a_smooth_non_polynomial() {
    // H[1/(a − cos x)] for a > 1 has the closed form sin x / ((a − cos x) √(a² − 1)).
    let a = 2.0;
    let f = SpectralField::from_fn(64, |x| 1.0 / (a - x.cos()));
    let h = f.hilbert();
    let root = (a * a - 1.0f64).sqrt();
    for i in 0..17 {
        let x = 0.37 * i as f64;
        let exact = x.sin() / ((a - x.cos()) * root);
        assert!((h.eval(x) - exact).abs() < 1e-13, "x = {x}");
    }
}

#[test]
fn derivatives_of_exponential_sine() {
    let f = SpectralField::from_fn(16, |x| x.sin().exp());
    let d1 = f.derivative(1).unwrap();
    let d2 = f.derivative(2).unwrap();
    let d3 = f.derivative(3).unwrap();
    for i in 0..11 {
        let x = 0.59 * i as f64;
        let e = x.sin().exp();
        let (s, c) = x.sin_cos();
        assert!((d1.eval(x) - c * e).abs() < 1e-12);
        assert!((d2.eval(x) - (c * c - s) * e).abs() < 1e-12);
        assert!((d3.eval(x) - (c * c * c - 3.0 * s * c - c) * e).abs() < 1e-12);
    }
}

#[test]
fn derivative_order_outside_range_is_rejected() {
    let f = SpectralField::cos_mode(4, 1, 1.0);
    assert!(f.derivative(0).is_err());
    assert!(f.derivative(4).is_err());
}

#[test]
fn hilbert_on_random_ensemble_against_quadrature() {
    let mut r = rng(7);
    for _ in 0..5 {
        let f = random_field(&mut r, 6);
        let h = f.hilbert();
        for j in 0..8 {
            let x = 0.8 * j as f64;
            assert!((h.eval(x) - hilbert_pv(|y| f.eval(y), x, 2048)).abs() < 1e-10);
        }
    }
}
