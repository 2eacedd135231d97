//! Discrete Hölder norms and a randomized harness for the commutator
//! estimate
//!
//! ```text
//! ‖⟦H, a⟧[b']‖_{C^{1,α}} ≤ C ‖a‖_{C^{2,α}} ‖b‖_{C^{1,α}}.
//! ```
//!
//! Norms follow
//! `‖f‖_{C^{k,α}} = Σ_{l<k} ‖∂^l f‖_∞ + ‖∂^k f‖_∞ + [∂^k f]_α`, where the
//! seminorm `[g]_α = sup |g(x) − g(y)| / d(x, y)^α` uses the periodic
//! distance. Everything is evaluated on a fixed uniform grid, so the
//! estimates are lower bounds of the continuous norms that increase under
//! nested refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const DEFAULT_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub k: u32,
    pub alpha: f64,
    pub value: f64,
    pub grid_size: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("Hölder exponent must lie in (0, 1), got {alpha}")))
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `max_{i ≠ j} |g_i − g_j| / d(x_i, x_j)^α` over all pairs of a uniform
/// periodic grid.
pub fn holder_seminorm(values: &[f64], alpha: f64) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let h = 2.0 * std::f64::consts::PI / m as f64;
    // wrap-around copy so that offset d never needs a modulo
    let mut ext = Vec::with_capacity(m + m / 2);
    ext.extend_from_slice(values);
    ext.extend_from_slice(&values[..m / 2]);
    let mut best = 0.0f64;
    for d in 1..=m / 2 {
        let w = (d as f64 * h).powf(-alpha);
        let spread = values
            .iter()
            .zip(&ext[d..d + m])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        best = best.max(spread * w);
    }
    best
}

/// `‖f‖_{C^{k,α}}` for `k ∈ {0, 1, 2, 3}` on the default grid.
pub fn holder_norm(f: &SpectralField, k: u32, alpha: f64) -> Result<HolderEstimate> {
    holder_norm_on(f, k, alpha, DEFAULT_GRID)
}

pub fn holder_norm_on(f: &SpectralField, k: u32, alpha: f64, grid: usize) -> Result<HolderEstimate> {
    check_alpha(alpha)?;
    if k > 3 {
        return Err(Error::Config(format!("derivative count must be at most 3, got {k}")));
    }
    if grid < 2 {
        return Err(Error::Config(format!("grid must have at least 2 points, got {grid}")));
    }
    let mut value = sup(&f.values_on(grid));
    let mut top = f.clone();
    for order in 1..=k {
        top = f.derivative(order)?;
        value += sup(&top.values_on(grid));
    }
    value += holder_seminorm(&top.values_on(grid), alpha);
    Ok(HolderEstimate {
        k,
        alpha,
        value,
        grid_size: grid,
    })
}

/// `‖⟦H,a⟧[b']‖_{C^{1,α}} / (‖a‖_{C^{2,α}} ‖b‖_{C^{1,α}})`.
pub fn commutator_ratio(a: &SpectralField, b: &SpectralField, alpha: f64) -> Result<f64> {
    commutator_ratio_on(a, b, alpha, DEFAULT_GRID)
}

pub fn commutator_ratio_on(a: &SpectralField, b: &SpectralField, alpha: f64, grid: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if a.max_coeff() == 0.0 {
        return Err(Error::ZeroDenominator("commutator ratio: a vanishes"));
    }
    if b.max_coeff() == 0.0 {
        return Err(Error::ZeroDenominator("commutator ratio: b vanishes"));
    }
    let n_out = a.n_modes() + b.n_modes();
    let theta = a.commutator_h_to(&b.derivative(1)?, n_out);
    let num = holder_norm_on(&theta, 1, alpha, grid)?.value;
    let den = holder_norm_on(a, 2, alpha, grid)?.value * holder_norm_on(b, 1, alpha, grid)?.value;
    Ok(num / den)
}

/// Trigonometric polynomial with standard normal amplitudes up to `degree`.
pub fn random_trig_poly(rng: &mut impl Rng, degree: usize) -> SpectralField {
    let mut cos = vec![0.0; degree + 1];
    let mut sin = vec![0.0; degree + 1];
    cos[0] = rng.sample(StandardNormal);
    for k in 1..=degree {
        cos[k] = rng.sample(StandardNormal);
        sin[k] = rng.sample(StandardNormal);
    }
    SpectralField::from_coefficients(cos, sin).expect("matching lengths")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub members: usize,
    /// Maximum degree of each tier; member degrees are drawn from `1..=tier`.
    pub degree_tiers: Vec<usize>,
    pub alpha: f64,
    pub seed: u64,
    pub grid: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            members: 200,
            degree_tiers: vec![20, 40],
            alpha: 0.5,
            seed: 1,
            grid: DEFAULT_GRID,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.members == 0 {
            return Err(Error::Config("ensemble size must be positive".into()));
        }
        if self.degree_tiers.is_empty() || self.degree_tiers.contains(&0) {
            return Err(Error::Config("degree tiers must be non-empty and positive".into()));
        }
        let widest = 2 * self.degree_tiers.iter().max().expect("non-empty");
        if self.grid < 2 * widest + 2 {
            return Err(Error::Config(format!(
                "grid {} too coarse for commutators of degree {widest}",
                self.grid
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub seed: u64,
    pub tier: usize,
    pub degree_a: usize,
    pub degree_b: usize,
    pub alpha: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierSummary {
    pub max_degree: usize,
    pub members: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub all_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub alpha: f64,
    pub seed: u64,
    pub tiers: Vec<TierSummary>,
}

impl SweepSummary {
    /// `max ratio of the last tier / max ratio of the first tier`.
    pub fn growth(&self) -> f64 {
        let first = self.tiers.first().expect("non-empty").max_ratio;
        let last = self.tiers.last().expect("non-empty").max_ratio;
        last / first
    }
}

fn member_seed(seed: u64, tier: usize, member: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((tier as u64) << 32)
        .wrapping_add(member as u64)
}

/// Evaluates the commutator ratio over random pairs `(a, b)` for every
/// degree tier. Results depend only on the configuration.
pub fn commutator_sweep(cfg: &SweepConfig) -> Result<(Vec<SweepRecord>, SweepSummary)> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.members * cfg.degree_tiers.len());
    let mut tiers = Vec::with_capacity(cfg.degree_tiers.len());
    for &tier in &cfg.degree_tiers {
        let mut max_ratio = 0.0f64;
        let mut sum = 0.0;
        let mut all_finite = true;
        for member in 0..cfg.members {
            let seed = member_seed(cfg.seed, tier, member);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let degree_a = rng.random_range(1..=tier);
            let degree_b = rng.random_range(1..=tier);
            let a = random_trig_poly(&mut rng, degree_a);
            let b = random_trig_poly(&mut rng, degree_b);
            let ratio = commutator_ratio_on(&a, &b, cfg.alpha, cfg.grid)?;
            all_finite &= ratio.is_finite();
            max_ratio = max_ratio.max(ratio);
            sum += ratio;
            records.push(SweepRecord {
                seed,
                tier,
                degree_a,
                degree_b,
                alpha: cfg.alpha,
                ratio,
            });
        }
        tiers.push(TierSummary {
            max_degree: tier,
            members: cfg.members,
            max_ratio,
            mean_ratio: sum / cfg.members as f64,
            all_finite,
        });
    }
    Ok((
        records,
        SweepSummary {
            alpha: cfg.alpha,
            seed: cfg.seed,
            tiers,
        },
    ))
}
