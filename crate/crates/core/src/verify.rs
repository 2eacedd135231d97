//! Invariant suite run by the command-line `verify` and `selftest`
//! commands. Each family reports its measured maximum against a tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bifurcation::kernel_dimension;
use crate::error::Result;
use crate::holder::{commutator_sweep, random_trig_poly, SweepConfig, SweepRecord, SweepSummary};
use crate::model::{critical_speed, gateaux_field, residual_field_with, symbol_at, Fault, ModelParams};
use crate::spectral::{to_spectral, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub family: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn below(family: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            family: family.into(),
            pass: measured.is_finite() && measured < tolerance,
            measured,
            tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    pub samples: usize,
    pub degree: usize,
    pub seed: u64,
    pub fault: Fault,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub sweep_summary: SweepSummary,
    #[serde(skip)]
    pub sweep_records: Vec<SweepRecord>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn random_even_fold(rng: &mut impl Rng, m: usize, degree: usize) -> SpectralField {
    let mut a = vec![0.0; degree + 1];
    for (j, k) in (m..=degree).step_by(m).enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        a[k] = z * 0.7f64.powi(j as i32);
    }
    SpectralField::even(a).expect("non-empty")
}

/// Product by direct grid multiplication, used as the definition of the
/// commutator.
fn grid_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let m = 2 * (f.n_modes() + g.n_modes()) + 4;
    let values: Vec<f64> = f.values_on(m).iter().zip(g.values_on(m)).map(|(a, b)| a * b).collect();
    to_spectral(&values).expect("even grid")
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_coeff()
}

/// Runs every invariant family. `fault` is applied to the residual used by
/// the model families.
pub fn run_invariants(p: &ModelParams, settings: &VerifySettings) -> Result<VerifyReport> {
    settings.sweep.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let n = settings.samples.max(1);
    let deg = settings.degree.max(5);
    let fault = settings.fault;
    let mut checks = Vec::new();

    let mut inv = 0.0f64;
    let mut zyg = 0.0f64;
    let mut comm = 0.0f64;
    for _ in 0..n {
        let f = random_trig_poly(&mut rng, deg);
        let g = random_trig_poly(&mut rng, deg / 3);
        let mean_free = f.without_mean();
        inv = inv.max(max_diff(&mean_free.hilbert().hilbert(), &mean_free.scaled(-1.0)));
        let d1 = f.derivative(1)?;
        zyg = zyg.max(max_diff(&f.zygmund(), &d1.hilbert()) / d1.max_coeff());
        let full = f.n_modes() + g.n_modes();
        let by_def = grid_product(&f, &g).resized(full).hilbert() - grid_product(&f, &g.hilbert()).resized(full);
        comm = comm.max(max_diff(&f.commutator_h_to(&g, full), &by_def));
    }
    checks.push(CheckResult::below("hilbert-involution", inv, 1e-12, format!("max |H²f + f| over {n} fields")));
    checks.push(CheckResult::below("zygmund-identity", zyg, 1e-14, format!("max |Λf − H∂f| / |∂f| over {n} fields")));
    checks.push(CheckResult::below("commutator-definition", comm, 1e-11, format!("max |⟦H,f⟧g − (H(fg) − fHg)| over {n} pairs")));

    let mut parity = 0.0f64;
    let mut closure = 0.0f64;
    let mut constants = 0.0f64;
    let mut linear = 0.0f64;
    for i in 0..n {
        let m = [1, 2, 3, 5][i % 4];
        let phi = random_even_fold(&mut rng, m, deg) * 0.3;
        let h = random_even_fold(&mut rng, m, deg);
        let c = rng.random_range(-1.0..1.0);
        let r = residual_field_with(c, &phi, p, fault);
        let scale = r.max_coeff().max(f64::MIN_POSITIVE);
        parity = parity.max(r.max_cos_coeff() / scale);
        let off = r
            .sin_coeffs()
            .iter()
            .enumerate()
            .filter(|(k, _)| k % m != 0)
            .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
        closure = closure.max(off / scale);
        let a = rng.random_range(-5.0..5.0);
        let lifted = &phi + &SpectralField::constant(phi.n_modes(), a);
        constants = constants.max(max_diff(&residual_field_with(c, &lifted, p, fault), &r) / scale);
        let delta = 1e-5;
        let fd = (residual_field_with(c, &phi.axpy(delta, &h), p, fault)
            - residual_field_with(c, &phi.axpy(-delta, &h), p, fault))
            * (0.5 / delta);
        let exact = gateaux_field(c, &phi, &h, p);
        linear = linear.max(max_diff(&fd, &exact) / exact.max_coeff());
    }
    checks.push(CheckResult::below("residual-parity", parity, 1e-12, "max cosine amplitude / output".into()));
    checks.push(CheckResult::below("m-fold-closure", closure, 1e-12, "max off-lattice amplitude / output".into()));
    checks.push(CheckResult::below("constant-invariance", constants, 1e-13, "max |F(φ + a) − F(φ)| / |F(φ)|".into()));
    checks.push(CheckResult::below("linearization", linear, 1e-6, "gateaux vs central differences, δ = 1e-5".into()));

    let mut roots = 0.0f64;
    for k in 1..=50 {
        let c = critical_speed(k, p)?;
        roots = roots.max(symbol_at(k, c, p)?.abs() / (1.0 + c.abs() * (k * k) as f64));
    }
    checks.push(CheckResult::below("symbol-roots", roots, 1e-12, "max |symbol(k, c_k)| / (1 + |c_k| k²), k ≤ 50".into()));

    let dims: Vec<usize> = (1..=3)
        .map(|m| kernel_dimension(critical_speed(m, p)?, p, m, 64))
        .collect::<Result<_>>()?;
    let defects = dims.iter().filter(|&&d| d != 1).count();
    checks.push(CheckResult::below(
        "kernel-simplicity",
        defects as f64,
        0.5,
        format!("kernel dimensions at (c_m, 0), m = 1,2,3: {dims:?}"),
    ));

    let (records, summary) = commutator_sweep(&settings.sweep)?;
    let finite = summary.tiers.iter().all(|t| t.all_finite);
    let growth = if finite { summary.growth() } else { f64::INFINITY };
    let maxima: Vec<String> = summary
        .tiers
        .iter()
        .map(|t| format!("deg ≤ {}: {:.4}", t.max_degree, t.max_ratio))
        .collect();
    checks.push(CheckResult::below(
        "commutator-ratio",
        growth,
        1.25 + 1e-12,
        format!("max ratios {}; growth last/first", maxima.join(", ")),
    ));

    Ok(VerifyReport {
        checks,
        sweep_summary: summary,
        sweep_records: records,
    })
}
