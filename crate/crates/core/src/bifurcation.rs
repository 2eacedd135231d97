//! Bifurcation from the line of trivial solutions and local branch tracing.
//!
//! At `c = c_k` the linearization `∂_φ F[c_k, 0]` has the one-dimensional
//! kernel `⟨cos(kx)⟩`, and `∂_c∂_φ F` applied to it is a nonzero multiple of
//! `sin(kx)`, which is not in the range. Restricting to m-fold profiles
//! `Σ φ_j cos(mjx)` isolates the mode `k = m`, and the nontrivial solutions
//! near `(c_m, 0)` form a curve parameterized by the amplitude `s` of
//! `cos(mx)`.
//!
//! [`continue_branch`] follows that curve with a bordered Newton method:
//! the unknowns are the speed `c` and the complement coefficients
//! `φ_2, …, φ_n`, while `φ_1 = s` is held fixed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, critical_speed, d_c_symbol, symbol_at, CosineSeries, Linearization, ModelParams,
};
use crate::spectral::SpectralField;

/// Relative threshold below which a symbol value counts as a root.
pub const SIMPLE_ROOT_TOL: f64 = 1e-10;

/// Relative threshold below which a singular value counts as zero.
pub const KERNEL_SV_TOL: f64 = 1e-8;

/// Dense matrix of a linearized operator on a truncated m-fold basis.
///
/// Column `j` is the image of `cos(m(j+1)x)`, row `i` the amplitude of
/// `sin(m(i+1)x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    fold: usize,
    truncation: usize,
    matrix: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn from_row_major(fold: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries for a {n}x{n} operator",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("operator matrix has non-finite entries".into()));
        }
        Ok(Self {
            fold,
            truncation: n,
            matrix: DMatrix::from_row_slice(n, n, &entries),
        })
    }

    pub fn fold(&self) -> usize {
        self.fold
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        sorted_singular_values(&self.matrix)
    }
}

fn sorted_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// One candidate bifurcation point `(c_k, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub k: usize,
    pub speed: f64,
    /// No other mode `j ≤` the checked truncation has a vanishing symbol.
    pub simple: bool,
    pub transversal: bool,
    /// Modes sharing the root, if any.
    pub resonant_with: Vec<usize>,
}

fn symbol_scale(j: usize, c: f64, p: &ModelParams) -> f64 {
    let j = j as f64;
    let inv_eps = 1.0 / p.epsilon();
    (2.0 * c + inv_eps).abs() * j + inv_eps + p.principal_coefficient(c).abs() * j * j
}

/// Critical speeds `c_1, …, c_{k_max}` with simplicity and transversality
/// flags. Simplicity is checked against every mode `j ≤ max(k_max, n_check)`.
pub fn detect_bifurcations(p: &ModelParams, k_max: usize, n_check: usize) -> Result<Vec<Candidate>> {
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    let upper = k_max.max(n_check);
    (1..=k_max)
        .map(|k| {
            let speed = critical_speed(k, p)?;
            let resonant_with: Vec<usize> = (1..=upper)
                .filter(|&j| j != k)
                .filter(|&j| {
                    let v = symbol_at(j, speed, p).expect("j >= 1");
                    v.abs() <= SIMPLE_ROOT_TOL * symbol_scale(j, speed, p)
                })
                .collect();
            Ok(Candidate {
                k,
                speed,
                simple: resonant_with.is_empty(),
                transversal: transversality(k, p)?,
                resonant_with,
            })
        })
        .collect()
}

/// Number of singular values of `∂_φ F[c, 0]` on the m-fold basis of size `n`
/// below `KERNEL_SV_TOL · σ_max`.
pub fn kernel_dimension(c: f64, p: &ModelParams, m: usize, n: usize) -> Result<usize> {
    if n < 4 {
        return Err(Error::Config(format!("truncation must be at least 4, got {n}")));
    }
    let jac = model::assemble_jacobian(c, &CosineSeries::zeros(m * n), p, n, m)?;
    let sv = jac.singular_values();
    let cutoff = KERNEL_SV_TOL * sv[0];
    Ok(sv.iter().filter(|&&s| s <= cutoff).count())
}

/// `∂_c∂_φ F[c_k, 0] cos(kx) ∉ Range`, i.e. `−2k − α0k² ≠ 0`.
pub fn transversality(k: usize, p: &ModelParams) -> Result<bool> {
    Ok(d_c_symbol(k, p)? != 0.0)
}

/// Step control and Newton settings for [`continue_branch`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSettings {
    /// Largest `|s|` to reach.
    pub s_max: f64,
    /// First step; its sign selects the direction of the branch.
    pub ds: f64,
    /// Cap on `|ds|` after geometric growth.
    pub ds_max: f64,
    /// Growth factor applied after every accepted step.
    pub growth: f64,
    /// Floor for step halving after a singular Newton matrix.
    pub ds_min: f64,
    /// Number of m-fold cosine modes.
    pub n: usize,
    /// Newton tolerance on the residual sup-norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            s_max: 0.05,
            ds: 1e-3,
            ds_max: 1e-2,
            growth: 1.5,
            ds_min: 1e-7,
            n: 64,
            tol: 1e-11,
            max_iter: 25,
        }
    }
}

impl ContinuationSettings {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.s_max.is_finite() && self.s_max >= 0.0) {
            return fail(format!("s_max must be non-negative, got {}", self.s_max));
        }
        if !(self.ds.is_finite() && self.ds != 0.0) {
            return fail(format!("ds must be nonzero, got {}", self.ds));
        }
        if !(self.ds_max.is_finite() && self.ds_max >= self.ds.abs()) {
            return fail(format!("ds_max {} must be at least |ds| {}", self.ds_max, self.ds.abs()));
        }
        if !(self.growth.is_finite() && self.growth >= 1.0) {
            return fail(format!("growth must be at least 1, got {}", self.growth));
        }
        if !(self.ds_min > 0.0 && self.ds_min <= self.ds.abs()) {
            return fail(format!("ds_min must lie in (0, |ds|], got {}", self.ds_min));
        }
        if self.n < 2 {
            return fail(format!("truncation must be at least 2, got {}", self.n));
        }
        if !(self.tol.is_finite() && self.tol >= 1e-12) {
            return fail(format!("tol must be at least 1e-12, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return fail("max_iter must be positive".into());
        }
        Ok(())
    }
}

/// A converged solution `(s, c_s, φ_s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    /// Amplitude of `cos(mx)` in `φ`.
    pub s: f64,
    pub c: f64,
    /// Profile with `m·n` modes, supported on multiples of `m`.
    pub phi: CosineSeries,
    pub residual_norm: f64,
    pub newton_iters: usize,
}

impl BranchPoint {
    /// Amplitudes `φ_1, …, φ_n` of `cos(mjx)`.
    pub fn fold_coeffs(&self, m: usize) -> Vec<f64> {
        let a = self.phi.coeffs();
        (1..a.len()).filter(|k| k % m == 0).map(|k| a[k]).collect()
    }

    /// Residual sup-norm re-evaluated with the truncation doubled.
    pub fn refined_residual(&self, p: &ModelParams) -> f64 {
        let wide = self.phi.field().resized(2 * self.phi.n_modes());
        model::residual_field(self.c, &wide, p).sup_norm()
    }

    /// `‖φ_s − s·cos(mx)‖_∞`.
    pub fn deviation_from_kernel(&self, m: usize) -> f64 {
        let lead = SpectralField::cos_mode(self.phi.n_modes(), m, self.s);
        (self.phi.field() - &lead).sup_norm()
    }
}

/// Why continuation stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BranchStatus {
    Completed,
    /// Newton did not reach the tolerance; the branch ends at the last
    /// converged point.
    NewtonFailed { s: f64, residual: f64, iters: usize },
    /// Repeated singular Newton matrices drove the step below the floor.
    StepUnderflow { s: f64 },
}

/// Points on the local curve through `(c_m, 0)`, ordered by increasing `|s|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub m: usize,
    pub params: ModelParams,
    pub settings: ContinuationSettings,
    pub points: Vec<BranchPoint>,
    pub status: BranchStatus,
}

impl Branch {
    pub fn is_complete(&self) -> bool {
        self.status == BranchStatus::Completed
    }

    /// Point with amplitude closest to `s`.
    pub fn nearest(&self, s: f64) -> Option<&BranchPoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs()))
    }
}

struct Newton<'a> {
    m: usize,
    p: &'a ModelParams,
    settings: &'a ContinuationSettings,
}

enum NewtonFailure {
    Singular,
    Diverged { residual: f64, iters: usize },
}

impl Newton<'_> {
    fn profile(&self, coeffs: &[f64]) -> SpectralField {
        let n = coeffs.len();
        let mut a = vec![0.0; self.m * n + 1];
        for (j, &v) in coeffs.iter().enumerate() {
            a[self.m * (j + 1)] = v;
        }
        SpectralField::even(a).expect("non-empty")
    }

    /// Bordered Jacobian: column 0 is `∂F/∂c`, columns `1..n` the images of
    /// `cos(mjx)` for `j = 2..=n`.
    fn bordered(&self, c: f64, phi: &SpectralField, coeffs: &[f64]) -> Result<DMatrix<f64>> {
        let n = coeffs.len();
        let jac = model::jacobian_from(&Linearization::new(c, phi, self.p), self.m, n)?;
        let mut a = jac.matrix().clone();
        for i in 0..n {
            a[(i, 0)] = d_c_symbol(self.m * (i + 1), self.p)? * coeffs[i];
        }
        Ok(a)
    }

    fn solve(&self, c0: f64, mut coeffs: Vec<f64>) -> std::result::Result<BranchPoint, NewtonFailure> {
        let n = coeffs.len();
        let mut c = c0;
        let mut last = f64::INFINITY;
        for iter in 0..=self.settings.max_iter {
            let phi = self.profile(&coeffs);
            let res = model::residual_field(c, &phi, self.p);
            let norm = res.sup_norm();
            if !norm.is_finite() {
                return Err(NewtonFailure::Diverged { residual: norm, iters: iter });
            }
            last = norm;
            if norm < self.settings.tol {
                return Ok(BranchPoint {
                    s: coeffs[0],
                    c,
                    phi: CosineSeries::from_field(phi).expect("profile is even"),
                    residual_norm: norm,
                    newton_iters: iter,
                });
            }
            if iter == self.settings.max_iter {
                break;
            }
            let a = self.bordered(c, &phi, &coeffs).map_err(|_| NewtonFailure::Singular)?;
            let sines = res.sin_coeffs();
            let rhs = DVector::from_iterator(n, (1..=n).map(|i| -sines[self.m * i]));
            let delta = a.lu().solve(&rhs).ok_or(NewtonFailure::Singular)?;
            if delta.iter().any(|v| !v.is_finite()) {
                return Err(NewtonFailure::Singular);
            }
            c += delta[0];
            for j in 1..n {
                coeffs[j] += delta[j];
            }
        }
        Err(NewtonFailure::Diverged {
            residual: last,
            iters: self.settings.max_iter,
        })
    }
}

/// Traces the m-fold branch bifurcating from `(c_m, 0)`.
///
/// `points[0]` is the trivial point `(0, c_m, 0)`. Each subsequent step
/// starts Newton from the previous solution with its `cos(mx)` amplitude
/// moved to the new `s`; the first nontrivial step starts from
/// `s·cos(mx)` at `c = c_m`. Steps grow by `growth` up to `ds_max`.
pub fn continue_branch(m: usize, p: &ModelParams, settings: &ContinuationSettings) -> Result<Branch> {
    settings.validate()?;
    if m == 0 {
        return Err(Error::Config("fold m must be at least 1".into()));
    }
    let n = settings.n;
    let c_m = critical_speed(m, p)?;
    let kdim = kernel_dimension(c_m, p, m, n.max(4))?;
    if kdim != 1 || !transversality(m, p)? {
        return Err(Error::Config(format!(
            "(c_{m}, 0) is not a simple transversal bifurcation point: kernel dimension {kdim}"
        )));
    }

    let newton = Newton { m, p, settings };
    let mut points = vec![BranchPoint {
        s: 0.0,
        c: c_m,
        phi: CosineSeries::zeros(m * n),
        residual_norm: 0.0,
        newton_iters: 0,
    }];
    let dir = settings.ds.signum();
    let mut step = settings.ds.abs();
    let mut status = BranchStatus::Completed;

    while points.last().map_or(0.0, |pt| pt.s.abs()) < settings.s_max {
        let prev = points.last().expect("non-empty");
        let target = dir * (prev.s.abs() + step).min(settings.s_max);
        let (c0, mut coeffs) = if points.len() == 1 {
            (c_m, vec![0.0; n])
        } else {
            (prev.c, prev.fold_coeffs(m))
        };
        coeffs[0] = target;

        match newton.solve(c0, coeffs) {
            Ok(pt) => {
                points.push(pt);
                step = (step * settings.growth).min(settings.ds_max);
            }
            Err(NewtonFailure::Singular) => {
                step *= 0.5;
                if step < settings.ds_min {
                    status = BranchStatus::StepUnderflow { s: target };
                    break;
                }
            }
            Err(NewtonFailure::Diverged { residual, iters }) => {
                status = BranchStatus::NewtonFailed {
                    s: target,
                    residual,
                    iters,
                };
                break;
            }
        }
    }

    Ok(Branch {
        m,
        params: *p,
        settings: *settings,
        points,
        status,
    })
}

/// Full Newton matrix at a branch point with the amplitude constraint row
/// appended: unknowns `(c, φ_1, …, φ_n)`, rows `F_1, …, F_n, φ_1 − s`.
pub fn augmented_jacobian(point: &BranchPoint, m: usize, p: &ModelParams) -> Result<DMatrix<f64>> {
    let coeffs = point.fold_coeffs(m);
    let n = coeffs.len();
    let lin = Linearization::new(point.c, point.phi.field(), p);
    let jac = model::jacobian_from(&lin, m, n)?;
    let mut a = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        a[(i, 0)] = d_c_symbol(m * (i + 1), p)? * coeffs[i];
        for j in 0..n {
            a[(i, j + 1)] = jac.get(i, j);
        }
    }
    a[(n, 1)] = 1.0;
    Ok(a)
}

/// Ratio `σ_min / σ_max` of a matrix.
pub fn inverse_condition(a: &DMatrix<f64>) -> f64 {
    let sv = sorted_singular_values(a);
    sv[sv.len() - 1] / sv[0]
}
