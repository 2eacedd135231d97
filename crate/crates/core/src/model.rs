//! The traveling-wave residual of the odd-viscosity surface-wave equation
//! and its linearization.
//!
//! Substituting `f(t, x) = φ(x − ct)` into
//!
//! ```text
//! 2f_t + α0 Λ f_t = (1/ε){ f_x + H f + (α0−β) H f_xx }
//!                   + H[(Λf)²] − ⟦H,f⟧[Λf] + (α0−β) ⟦H,f⟧[Λ³f]
//! ```
//!
//! gives `F[c, φ] = 0` with
//!
//! ```text
//! F[c,φ] = 2cφ' + (cα0 + (α0−β)/ε) H[φ''] + (1/ε){φ' + H[φ]}
//!          + H[(Hφ')²] − ⟦H,φ⟧[Hφ'] − (α0−β) ⟦H,φ⟧[Hφ''']
//! ```
//!
//! which maps even profiles to odd functions. On a single cosine the linear
//! part is diagonal with symbol
//! `−(2c + 1/ε)k + 1/ε − (cα0 + (α0−β)/ε)k²`.

use serde::{Deserialize, Serialize};

use crate::bifurcation::OperatorMatrix;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Relative bound on cosine amplitudes tolerated in a residual of an even
/// profile before it is rejected.
pub const RESIDUAL_PARITY_TOL: f64 = 1e-12;

/// Physical parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    epsilon: f64,
    alpha0: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    epsilon: f64,
    alpha0: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.epsilon, r.alpha0, r.beta)
    }
}

/// Whether the third-order commutator term is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `α0 ≠ β`.
    Generic,
    /// `α0 = β`: the `⟦H,φ⟧[Λ³φ]` coefficient vanishes identically.
    Degenerate,
}

impl ModelParams {
    /// Steepness `ε > 0`, odd Reynolds ratio `α0 > 0`, Bond number `β`.
    pub fn new(epsilon: f64, alpha0: f64, beta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Params(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(alpha0.is_finite() && alpha0 > 0.0) {
            return Err(Error::Params(format!("alpha0 must be positive, got {alpha0}")));
        }
        if !beta.is_finite() {
            return Err(Error::Params(format!("beta must be finite, got {beta}")));
        }
        Ok(Self {
            epsilon,
            alpha0,
            beta,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `α0 − β`, the coefficient of the third-order commutator.
    pub fn gap(&self) -> f64 {
        self.alpha0 - self.beta
    }

    pub fn regime(&self) -> Regime {
        if self.alpha0 == self.beta {
            Regime::Degenerate
        } else {
            Regime::Generic
        }
    }

    /// Coefficient `cα0 + (α0−β)/ε` of `H[φ'']`.
    pub fn principal_coefficient(&self, c: f64) -> f64 {
        c * self.alpha0 + self.gap() / self.epsilon
    }
}

/// An even profile (space `X`): a pure cosine series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSeries(SpectralField);

/// An odd function (space `Y`): a pure sine series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSeries(SpectralField);

impl CosineSeries {
    /// From amplitudes `a_0, …, a_N`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        SpectralField::even(coeffs).map(Self)
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self(SpectralField::constant(n_modes, 0.0))
    }

    pub fn mode(n_modes: usize, k: usize, amplitude: f64) -> Self {
        Self(SpectralField::cos_mode(n_modes, k, amplitude))
    }

    /// Accepts a field whose sine amplitudes are all exactly zero.
    pub fn from_field(field: SpectralField) -> Result<Self> {
        let bad = field.max_sin_coeff();
        if bad != 0.0 {
            return Err(Error::Parity {
                expected: "even",
                max_violation: bad,
            });
        }
        Ok(Self(field.even_part()))
    }

    pub fn field(&self) -> &SpectralField {
        &self.0
    }

    pub fn into_field(self) -> SpectralField {
        self.0
    }

    /// Amplitudes `a_0, …, a_N`.
    pub fn coeffs(&self) -> &[f64] {
        self.0.cos_coeffs()
    }

    pub fn n_modes(&self) -> usize {
        self.0.n_modes()
    }
}

impl SineSeries {
    /// From amplitudes `b_0 = 0, b_1, …, b_N`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        SpectralField::odd(coeffs).map(Self)
    }

    pub fn from_field(field: SpectralField) -> Result<Self> {
        let bad = field.max_cos_coeff();
        if bad != 0.0 {
            return Err(Error::Parity {
                expected: "odd",
                max_violation: bad,
            });
        }
        Ok(Self(field.odd_part()))
    }

    pub fn field(&self) -> &SpectralField {
        &self.0
    }

    pub fn into_field(self) -> SpectralField {
        self.0
    }

    /// Amplitudes `b_0 = 0, b_1, …, b_N`.
    pub fn coeffs(&self) -> &[f64] {
        self.0.sin_coeffs()
    }

    pub fn n_modes(&self) -> usize {
        self.0.n_modes()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }
}

/// Deliberate defects for exercising the verification harness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Flips the sign of `f·H(g)` inside the residual's commutator.
    CommutatorSign,
    /// Evaluates one factor of `(Hφ')²` half a grid cell off.
    GridShift,
}

/// The linear part `2ch' + (cα0 + (α0−β)/ε) H[h''] + (1/ε){h' + H[h]}`,
/// i.e. the linearization at the trivial solution.
pub fn linear_part(c: f64, h: &SpectralField, p: &ModelParams) -> SpectralField {
    let d1 = h.derivative(1).expect("order 1");
    let d2 = h.derivative(2).expect("order 2");
    let transport = &d1 * (2.0 * c + 1.0 / p.epsilon());
    let dispersive = d2.hilbert() * p.principal_coefficient(c);
    let source = h.hilbert() * (1.0 / p.epsilon());
    transport + dispersive + source
}

/// `Hφ' + (α0−β) Hφ'''`, the argument of the residual's commutator.
fn commutator_drive(phi: &SpectralField, gap: f64) -> SpectralField {
    let drive = phi.derivative(1).expect("order 1").hilbert();
    if gap == 0.0 {
        drive
    } else {
        drive.axpy(gap, &phi.derivative(3).expect("order 3").hilbert())
    }
}

/// Residual `F[c, φ]` of an arbitrary field, without symmetry checks.
///
/// The mean of `φ` is discarded (constants are trivial solutions). The
/// result has the truncation of `φ`.
pub fn residual_field(c: f64, phi: &SpectralField, p: &ModelParams) -> SpectralField {
    residual_field_with(c, phi, p, Fault::None)
}

/// [`residual_field`] with an optional injected defect.
pub fn residual_field_with(
    c: f64,
    phi: &SpectralField,
    p: &ModelParams,
    fault: Fault,
) -> SpectralField {
    let phi = phi.without_mean();
    let slope = phi.derivative(1).expect("order 1").hilbert();

    let square = match fault {
        Fault::GridShift => {
            let half_cell = std::f64::consts::PI / phi.grid_size() as f64;
            slope.multiply(&slope.translated(half_cell))
        }
        _ => slope.multiply(&slope),
    };

    let drive = commutator_drive(&phi, p.gap());
    let commutator = match fault {
        Fault::CommutatorSign => {
            let n = phi.n_modes();
            phi.multiply_to(&drive, n).hilbert() + phi.multiply_to(&drive.hilbert(), n)
        }
        _ => phi.commutator_h(&drive),
    };

    linear_part(c, &phi, p) + square.hilbert() - commutator
}

/// Residual of an even profile, returned as a sine series.
///
/// Fails with [`Error::ResidualParity`] if the computed cosine amplitudes
/// exceed [`RESIDUAL_PARITY_TOL`] relative to the output.
pub fn residual(c: f64, phi: &CosineSeries, p: &ModelParams) -> Result<SineSeries> {
    residual_checked(c, phi, p, Fault::None)
}

pub fn residual_checked(
    c: f64,
    phi: &CosineSeries,
    p: &ModelParams,
    fault: Fault,
) -> Result<SineSeries> {
    let raw = residual_field_with(c, phi.field(), p, fault);
    let max_cos = raw.max_cos_coeff();
    let bound = RESIDUAL_PARITY_TOL * raw.max_sin_coeff().max(1.0);
    if max_cos > bound {
        return Err(Error::ResidualParity { max_cos, bound });
    }
    Ok(SineSeries(raw.odd_part()))
}

/// Gateaux derivative `∂_φ F[c, φ]` frozen at one profile, applicable to
/// many directions.
#[derive(Debug, Clone)]
pub struct Linearization {
    c: f64,
    params: ModelParams,
    phi: SpectralField,
    /// `Hφ'`
    slope: SpectralField,
    /// `Hφ' + (α0−β)Hφ'''`
    drive: SpectralField,
}

impl Linearization {
    pub fn new(c: f64, phi: &SpectralField, p: &ModelParams) -> Self {
        let phi = phi.without_mean();
        let slope = phi.derivative(1).expect("order 1").hilbert();
        let drive = commutator_drive(&phi, p.gap());
        Self {
            c,
            params: *p,
            phi,
            slope,
            drive,
        }
    }

    /// `∂_φ F[c, φ] h`, truncated at the larger of the two degrees.
    ///
    /// ```text
    /// L_c h + 2H[Hφ'·Hh'] − ⟦H,h⟧[Hφ' + (α0−β)Hφ'''] − ⟦H,φ⟧[Hh' + (α0−β)Hh''']
    /// ```
    pub fn apply(&self, h: &SpectralField) -> SpectralField {
        let h = h.without_mean();
        let n = self.phi.n_modes().max(h.n_modes());
        let h_slope = h.derivative(1).expect("order 1").hilbert();
        let h_drive = commutator_drive(&h, self.params.gap());

        let cross = self.slope.multiply_to(&h_slope, n).hilbert() * 2.0;
        let comm_h = h.commutator_h_to(&self.drive, n);
        let comm_phi = self.phi.commutator_h_to(&h_drive, n);
        linear_part(self.c, &h, &self.params).resized(n) + cross - comm_h - comm_phi
    }
}

/// `∂_φ F[c, φ] h` for a single direction.
pub fn gateaux(c: f64, phi: &CosineSeries, h: &CosineSeries, p: &ModelParams) -> SineSeries {
    let out = Linearization::new(c, phi.field(), p).apply(h.field());
    SineSeries(out.odd_part())
}

/// Raw Gateaux derivative on arbitrary fields.
pub fn gateaux_field(
    c: f64,
    phi: &SpectralField,
    h: &SpectralField,
    p: &ModelParams,
) -> SpectralField {
    Linearization::new(c, phi, p).apply(h)
}

fn check_mode(k: usize) -> Result<f64> {
    if k == 0 {
        Err(Error::ModeIndex(k))
    } else {
        Ok(k as f64)
    }
}

/// Multiplier sending `cos(kx)` to `value · sin(kx)` under `∂_φ F[c, 0]`.
pub fn symbol_at(k: usize, c: f64, p: &ModelParams) -> Result<f64> {
    let k = check_mode(k)?;
    let inv_eps = 1.0 / p.epsilon();
    Ok(-(2.0 * c + inv_eps) * k + inv_eps - p.principal_coefficient(c) * k * k)
}

/// Speed at which mode `k` enters the kernel:
/// `c_k = (1 − k − (α0−β)k²) / (ε k (2 + α0 k))`.
pub fn critical_speed(k: usize, p: &ModelParams) -> Result<f64> {
    let k = check_mode(k)?;
    let num = 1.0 - k - p.gap() * k * k;
    Ok(num / (p.epsilon() * k * (2.0 + p.alpha0() * k)))
}

/// `∂_c` of the symbol: `−2k − α0k²`.
pub fn d_c_symbol(k: usize, p: &ModelParams) -> Result<f64> {
    let k = check_mode(k)?;
    Ok(-2.0 * k - p.alpha0() * k * k)
}

/// Matrix of `∂_φ F[c, φ]` from `{cos(mjx)}_{j=1..n}` to `{sin(mix)}_{i=1..n}`.
pub fn assemble_jacobian(
    c: f64,
    phi: &CosineSeries,
    p: &ModelParams,
    n: usize,
    m: usize,
) -> Result<OperatorMatrix> {
    let phi = fold_restricted(phi.field(), m, n)?;
    let lin = Linearization::new(c, &phi, p);
    jacobian_from(&lin, m, n)
}

/// Restricts `phi` to `m·n` modes, checking it is m-fold and fits.
pub(crate) fn fold_restricted(phi: &SpectralField, m: usize, n: usize) -> Result<SpectralField> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("fold {m} and truncation {n} must be positive")));
    }
    let cap = m * n;
    let coeffs = phi.cos_coeffs();
    for (k, &a) in coeffs.iter().enumerate().skip(1) {
        if a != 0.0 && (k > cap || k % m != 0) {
            return Err(Error::Dimension(format!(
                "profile has amplitude {a:.3e} at frequency {k}, outside the {m}-fold space of {n} modes"
            )));
        }
    }
    Ok(phi.resized(cap))
}

pub(crate) fn jacobian_from(lin: &Linearization, m: usize, n: usize) -> Result<OperatorMatrix> {
    let cap = m * n;
    let mut entries = vec![0.0; n * n];
    for j in 1..=n {
        let col = lin.apply(&SpectralField::cos_mode(cap, m * j, 1.0));
        let sines = col.sin_coeffs();
        for i in 1..=n {
            entries[(i - 1) * n + (j - 1)] = sines[m * i];
        }
    }
    OperatorMatrix::from_row_major(m, n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
        assert_eq!(ModelParams::new(1.0, 2.0, 2.0).unwrap().regime(), Regime::Degenerate);
        assert_eq!(params().regime(), Regime::Generic);
        let bad: std::result::Result<ModelParams, _> =
            serde_json::from_str(r#"{"epsilon":1.0,"alpha0":0.0,"beta":0.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn symbol_direct_substitution() {
        assert_eq!(symbol_at(1, 0.0, &params()).unwrap(), -1.0);
        assert!(symbol_at(0, 0.0, &params()).is_err());
    }

    #[test]
    fn critical_speeds_by_substitution() {
        let p = params();
        assert!((critical_speed(1, &p).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!((critical_speed(2, &p).unwrap() + 5.0 / 8.0).abs() < 1e-15);
        assert!((critical_speed(3, &p).unwrap() + 11.0 / 15.0).abs() < 1e-15);
        let q = ModelParams::new(0.7, 1.3, 1.3).unwrap();
        assert_eq!(critical_speed(1, &q).unwrap(), 0.0);
    }

    #[test]
    fn d_c_symbol_is_negative_and_is_the_slope() {
        let p = params();
        assert_eq!(d_c_symbol(1, &p).unwrap(), -3.0);
        for k in 1..20 {
            let d = d_c_symbol(k, &p).unwrap();
            assert!(d < 0.0);
            let fd = (symbol_at(k, 0.5, &p).unwrap() - symbol_at(k, -0.5, &p).unwrap()) / 1.0;
            assert!((fd - d).abs() <= 1e-12 * d.abs());
        }
    }

    #[test]
    fn trivial_solutions() {
        let p = params();
        let zero = CosineSeries::zeros(16);
        assert_eq!(residual(0.3, &zero, &p).unwrap().field().max_coeff(), 0.0);
        let a = CosineSeries::new({
            let mut v = vec![0.0; 17];
            v[0] = 7.0;
            v
        })
        .unwrap();
        assert_eq!(residual(-1.0, &a, &p).unwrap().field().max_coeff(), 0.0);
    }

    #[test]
    fn gateaux_at_zero_is_the_linear_operator() {
        let p = ModelParams::new(0.5, 1.0, 0.5).unwrap();
        let c = -0.2;
        for k in 1..8 {
            let h = CosineSeries::mode(8, k, 1.0);
            let g = gateaux(c, &CosineSeries::zeros(8), &h, &p);
            let s = symbol_at(k, c, &p).unwrap();
            assert!((g.coeffs()[k] - s).abs() < 1e-12 * s.abs().max(1.0));
            let lin = linear_part(c, h.field(), &p);
            assert!((&lin - g.field()).max_coeff() < 1e-12);
        }
        let phi = CosineSeries::mode(8, 2, 0.1);
        let g = gateaux(c, &phi, &CosineSeries::zeros(8), &p);
        assert_eq!(g.field().max_coeff(), 0.0);
    }

    #[test]
    fn jacobian_at_zero_is_diagonal_symbol() {
        let p = ModelParams::new(0.5, 1.0, 0.5).unwrap();
        let (m, n) = (2, 6);
        let c = -0.4;
        let j = assemble_jacobian(c, &CosineSeries::zeros(m * n), &p, n, m).unwrap();
        for r in 0..n {
            for col in 0..n {
                let v = j.get(r, col);
                if r == col {
                    let s = symbol_at(m * (r + 1), c, &p).unwrap();
                    assert!((v - s).abs() < 1e-12 * s.abs());
                } else {
                    assert!(v.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn jacobian_rejects_off_fold_profiles() {
        let p = params();
        let phi = CosineSeries::mode(12, 3, 0.1);
        assert!(matches!(
            assemble_jacobian(0.0, &phi, &p, 6, 2),
            Err(Error::Dimension(_))
        ));
        let phi = CosineSeries::mode(20, 20, 0.1);
        assert!(matches!(
            assemble_jacobian(0.0, &phi, &p, 4, 2),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn injected_grid_shift_breaks_parity() {
        let p = params();
        let phi = CosineSeries::new(vec![0.0, 0.3, 0.1, -0.05]).unwrap();
        assert!(residual_checked(0.1, &phi, &p, Fault::None).is_ok());
        assert!(matches!(
            residual_checked(0.1, &phi, &p, Fault::GridShift),
            Err(Error::ResidualParity { .. })
        ));
    }

    #[test]
    fn non_even_fields_are_rejected() {
        let f = SpectralField::sin_mode(4, 1, 1.0);
        assert!(CosineSeries::from_field(f.clone()).is_err());
        assert!(SineSeries::from_field(f).is_ok());
    }
}
