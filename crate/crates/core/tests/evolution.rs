mod common;

use common::*;
use oddwave::evolution::{dt_max, inverse_mass, linear_frequency, traveling_error_of};
use oddwave::model::residual_field;
use oddwave::{continue_branch, evolve, rhs, ContinuationSettings, Error, EvolutionConfig, ModelParams, SpectralField};

fn p() -> ModelParams {
    ModelParams::new(0.5, 1.0, 0.5).unwrap()
}

#[test]
fn mass_is_conserved() {
    let q = p();
    let f0 = random_even_fold(&mut rng(11), 1, 12, 0.5) * 0.05 + SpectralField::constant(12, 0.4);
    let f0 = &f0 + &(random_field(&mut rng(12), 12) * 0.01);
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_final: 1.0,
        n: 32,
        save_every: 100,
        ..Default::default()
    };
    let traj = evolve(&f0, &q, &cfg).unwrap();
    for (&t, f) in traj.times.iter().zip(&traj.states) {
        assert!((f.mean() - f0.mean()).abs() < 1e-12 * (1.0 + t));
    }
}

#[test]
fn infinitesimal_modes_follow_the_dispersion_relation() {
    let q = p();
    let delta = 1e-9;
    for k in [1, 2, 5, 9] {
        let cfg = EvolutionConfig {
            dt: 1e-3,
            t_final: 1.0,
            n: 16,
            save_every: 250,
            ..Default::default()
        };
        let traj = evolve(&SpectralField::cos_mode(16, k, delta), &q, &cfg).unwrap();
        let w = linear_frequency(k, &q);
        for (&t, f) in traj.times.iter().zip(&traj.states) {
            let (a, b) = (delta * (w * t).cos(), -delta * (w * t).sin());
            let err = (f.cos_coeffs()[k] - a).hypot(f.sin_coeffs()[k] - b);
            assert!(err < 1e-6 * delta, "k = {k}, t = {t}: {err:e}");
        }
    }
}

#[test]
fn traveling_relation_holds_for_the_flow_operator() {
    // rhs(φ) + cφ' equals the inverted mass applied to the residual
    let q = p();
    let phi = random_even_fold(&mut rng(5), 1, 10, 0.5) * 0.1;
    let c = -0.2;
    let lhs = rhs(&phi, &q).axpy(c, &phi.derivative(1).unwrap());
    let want = inverse_mass(&residual_field(c, &phi, &q), &q);
    assert!(max_abs_diff(&lhs, &want) < 1e-13);
}

#[test]
fn zero_data_stays_zero() {
    let traj = evolve(&SpectralField::zeros(8), &p(), &EvolutionConfig::default()).unwrap();
    assert!(traj.states.iter().all(|f| f.max_coeff() == 0.0));
}

#[test]
fn branch_profiles_translate_rigidly() {
    let q = p();
    let settings = ContinuationSettings {
        s_max: 0.02,
        n: 32,
        ..Default::default()
    };
    let b = continue_branch(2, &q, &settings).unwrap();
    let pt = b.points.last().unwrap();
    let cfg = EvolutionConfig {
        dt: 1e-3,
        t_final: 0.5,
        n: 64,
        save_every: 50,
        ..Default::default()
    };
    let traj = evolve(pt.phi.field(), &q, &cfg).unwrap();
    assert!(traveling_error_of(&traj, pt) < 1e-10);
}

#[test]
fn steps_beyond_stability_limit_blow_up_with_last_state() {
    let q = p();
    let cfg = EvolutionConfig {
        dt: 20.0 * dt_max(64, &q),
        t_final: 50.0,
        n: 64,
        ..Default::default()
    };
    match evolve(&SpectralField::cos_mode(64, 40, 1e-3), &q, &cfg) {
        Err(Error::NonFinite { last_finite, last_time, t }) => {
            assert!(last_time < t);
            assert!(last_finite.max_coeff().is_finite());
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}
