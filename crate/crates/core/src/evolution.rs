//! Time integration of the surface-wave equation, used to check that branch
//! profiles really translate rigidly at their computed speed.
//!
//! The equation is solved for `f_t` by inverting the mass operator
//! `2 + α0Λ`, which is diagonal in Fourier space, and advanced with the
//! classical four-stage Runge–Kutta scheme.

use serde::{Deserialize, Serialize};

use crate::bifurcation::BranchPoint;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::SpectralField;

/// Radius of the RK4 stability region along the imaginary axis.
const RK4_IMAG_LIMIT: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Number of Fourier modes carried.
    pub n: usize,
    /// Store the state every this many steps (the final state is always kept).
    pub save_every: usize,
    pub scheme: Scheme,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: 2e-4,
            t_final: 1.0,
            n: 64,
            save_every: 500,
            scheme: Scheme::Rk4,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::Config(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if self.n == 0 {
            return Err(Error::Config("truncation must be positive".into()));
        }
        if self.save_every == 0 {
            return Err(Error::Config("save_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; the step is shortened slightly so that they land
    /// exactly on `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => 0.0,
            s => self.t_final / s as f64,
        }
    }
}

/// Angular frequency of `cos(kx)` under the linearized flow:
/// `f = δ cos(kx + ω_k t)` with `ω_k = (k − 1 + (α0−β)k²) / (ε(2 + α0k))`.
pub fn linear_frequency(k: usize, p: &ModelParams) -> f64 {
    let k = k as f64;
    (k - 1.0 + p.gap() * k * k) / (p.epsilon() * (2.0 + p.alpha0() * k))
}

/// Largest stable RK4 step for the linear part with `n` modes.
pub fn dt_max(n: usize, p: &ModelParams) -> f64 {
    let w = (1..=n)
        .map(|k| linear_frequency(k, p).abs())
        .fold(0.0, f64::max);
    if w == 0.0 {
        f64::INFINITY
    } else {
        RK4_IMAG_LIMIT / w
    }
}

/// Applies `(2 + α0Λ)⁻¹`.
pub fn inverse_mass(f: &SpectralField, p: &ModelParams) -> SpectralField {
    let n = f.n_modes();
    let mut cos = f.cos_coeffs().to_vec();
    let mut sin = f.sin_coeffs().to_vec();
    for k in 0..=n {
        let w = 1.0 / (2.0 + p.alpha0() * k as f64);
        cos[k] *= w;
        sin[k] *= w;
    }
    SpectralField::from_coefficients(cos, sin).expect("same shape")
}

/// Right-hand side `f_t` of the evolution equation.
pub fn rhs(f: &SpectralField, p: &ModelParams) -> SpectralField {
    let gap = p.gap();
    let fx = f.derivative(1).expect("order 1");
    let mut linear = &fx + &f.hilbert();
    if gap != 0.0 {
        linear = linear.axpy(gap, &f.derivative(2).expect("order 2").hilbert());
    }
    let lam = f.zygmund();
    let square = lam.multiply(&lam).hilbert();
    let arg = if gap == 0.0 {
        lam
    } else {
        lam.axpy(-gap, &f.zygmund_pow(3))
    };
    let bracket = linear * (1.0 / p.epsilon()) + square - f.commutator_h(&arg);
    inverse_mass(&bracket, p)
}

/// States at the save times of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub dt: f64,
    pub steps: usize,
    /// Linear RK4 stability bound for this truncation.
    pub dt_max: f64,
    pub initial_mass: f64,
    /// `max_t |mean f(t) − mean f(0)|` over all steps.
    pub max_mass_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("at least the initial state")
    }
}

fn is_finite(f: &SpectralField) -> bool {
    f.cos_coeffs().iter().chain(f.sin_coeffs()).all(|v| v.is_finite())
}

fn rk4_step(f: &SpectralField, dt: f64, p: &ModelParams) -> SpectralField {
    let k1 = rhs(f, p);
    let k2 = rhs(&f.axpy(0.5 * dt, &k1), p);
    let k3 = rhs(&f.axpy(0.5 * dt, &k2), p);
    let k4 = rhs(&f.axpy(dt, &k3), p);
    let incr = (k1 + k4).axpy(2.0, &(k2 + k3));
    f.axpy(dt / 6.0, &incr)
}

/// Integrates from `f0` (resized to `cfg.n` modes) up to `cfg.t_final`.
pub fn evolve(f0: &SpectralField, p: &ModelParams, cfg: &EvolutionConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let mut f = f0.resized(cfg.n);
    let mass0 = f.mean();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![f.clone()],
        dt,
        steps,
        dt_max: dt_max(cfg.n, p),
        initial_mass: mass0,
        max_mass_drift: 0.0,
    };
    let mut t = 0.0;
    for step in 1..=steps {
        let next = match cfg.scheme {
            Scheme::Rk4 => rk4_step(&f, dt, p),
        };
        let t_next = step as f64 * dt;
        if !is_finite(&next) {
            return Err(Error::NonFinite {
                t: t_next,
                last_finite: Box::new(f),
                last_time: t,
            });
        }
        f = next;
        t = t_next;
        traj.max_mass_drift = traj.max_mass_drift.max((f.mean() - mass0).abs());
        if step % cfg.save_every == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(f.clone());
        }
    }
    Ok(traj)
}

/// Largest sup-norm distance, over the save times, between the evolved
/// profile and the profile translated by `c_s t`.
pub fn traveling_error(point: &BranchPoint, p: &ModelParams, cfg: &EvolutionConfig) -> Result<f64> {
    let traj = evolve(point.phi.field(), p, cfg)?;
    Ok(traveling_error_of(&traj, point))
}

pub fn traveling_error_of(traj: &Trajectory, point: &BranchPoint) -> f64 {
    let start = &traj.states[0];
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, f)| (f - &start.translated(point.c * t)).sup_norm())
        .fold(0.0, f64::max)
}

/// Temporal convergence measured over a ladder of halved steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStudy {
    pub dts: Vec<f64>,
    /// Traveling error of each run.
    pub errors: Vec<f64>,
    /// `‖f_dt(T) − f_{dt/2}(T)‖_∞` for consecutive rungs.
    pub increments: Vec<f64>,
    /// Least-squares slope of `log increment` against `log dt`.
    pub order: f64,
}

/// Runs `levels ≥ 3` integrations with `dt, dt/2, dt/4, …` and estimates
/// the order from successive differences of the final states, which
/// cancels the (step-independent) error of the profile itself.
pub fn order_study(
    point: &BranchPoint,
    p: &ModelParams,
    cfg: &EvolutionConfig,
    levels: usize,
) -> Result<OrderStudy> {
    if levels < 3 {
        return Err(Error::Config(format!("order study needs at least 3 levels, got {levels}")));
    }
    let mut dts = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    let mut finals: Vec<SpectralField> = Vec::with_capacity(levels);
    for l in 0..levels {
        let dt = cfg.dt / (1u64 << l) as f64;
        let run = EvolutionConfig {
            dt,
            save_every: usize::MAX,
            ..*cfg
        };
        let traj = evolve(point.phi.field(), p, &run)?;
        errors.push(traveling_error_of(&traj, point));
        finals.push(traj.final_state().clone());
        dts.push(run.effective_dt());
    }
    let increments: Vec<f64> = finals.windows(2).map(|w| (&w[0] - &w[1]).sup_norm()).collect();
    let xs: Vec<f64> = dts[..levels - 1].iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = increments.iter().map(|e| e.ln()).collect();
    Ok(OrderStudy {
        order: fit_slope(&xs, &ys),
        dts,
        errors,
        increments,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::new(0.5, 1.0, 0.5).unwrap()
    }

    #[test]
    fn rhs_of_trivial_data() {
        assert_eq!(rhs(&SpectralField::zeros(8), &p()).max_coeff(), 0.0);
        assert!(rhs(&SpectralField::constant(8, 3.0), &p()).max_coeff() < 1e-15);
    }

    #[test]
    fn rhs_linear_part_matches_frequency() {
        let q = p();
        for k in 1..6 {
            let delta = 1e-9;
            let f = SpectralField::cos_mode(8, k, delta);
            let r = rhs(&f, &q);
            let w = linear_frequency(k, &q);
            assert!((r.sin_coeffs()[k] / delta + w).abs() < 1e-6 * w.abs().max(1.0));
        }
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let cfg = EvolutionConfig {
            dt: 1e-2,
            t_final: 0.1,
            n: 8,
            save_every: 1,
            ..Default::default()
        };
        let traj = evolve(&SpectralField::zeros(8), &p(), &cfg).unwrap();
        assert_eq!(traj.states.len(), 11);
        assert!(traj.states.iter().all(|f| f.max_coeff() == 0.0));
    }

    #[test]
    fn config_validation() {
        let base = EvolutionConfig::default();
        assert!(EvolutionConfig { dt: 0.0, ..base }.validate().is_err());
        assert!(EvolutionConfig { t_final: -1.0, ..base }.validate().is_err());
        assert!(EvolutionConfig { save_every: 0, ..base }.validate().is_err());
        assert_eq!(EvolutionConfig { dt: 0.3, t_final: 1.0, ..base }.steps(), 4);
        assert_eq!(base.steps(), 5000);
    }

    #[test]
    fn blow_up_is_reported_with_last_finite_state() {
        let cfg = EvolutionConfig {
            dt: 5.0,
            t_final: 2000.0,
            n: 32,
            save_every: 1,
            ..Default::default()
        };
        let f0 = SpectralField::cos_mode(32, 32, 1.0);
        match evolve(&f0, &p(), &cfg) {
            Err(Error::NonFinite { t, last_finite, last_time }) => {
                assert!(t > last_time);
                assert!(last_finite.max_coeff().is_finite());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
