//! Traveling waves of the odd-viscosity surface-wave model
//!
//! ```text
//! 2f_t + α0 Λ f_t = (1/ε){ f_x + H f + (α0−β) H f_xx }
//!                   + H[(Λf)²] − ⟦H,f⟧[Λf] + (α0−β) ⟦H,f⟧[Λ³f]
//! ```
//!
//! on the torus, computed by Fourier-pseudospectral continuation from the
//! bifurcation points `(c_m, 0)` of the trivial solution line.
//!
//! * [`spectral`]: trigonometric fields, `H`, `Λ`, derivatives, dealiased
//!   products and commutators.
//! * [`model`]: the traveling-wave residual, its Gateaux derivative, the
//!   linear symbol and the critical speeds.
//! * [`bifurcation`]: kernel/transversality checks and branch continuation.
//! * [`evolution`]: RK4 time integration used as an independent check.
//! * [`holder`]: discrete Hölder norms and the commutator-ratio harness.
//! * [`io`]: CSV/JSON formats.
//! * [`verify`]: the invariant suite behind the command-line checks.

pub mod bifurcation;
pub mod error;
pub mod evolution;
pub mod holder;
pub mod io;
pub mod model;
pub mod spectral;
pub mod verify;

pub use bifurcation::{
    continue_branch, detect_bifurcations, kernel_dimension, transversality, Branch, BranchPoint,
    BranchStatus, Candidate, ContinuationSettings, OperatorMatrix,
};
pub use error::{Error, Result};
pub use evolution::{evolve, rhs, traveling_error, EvolutionConfig, Scheme, Trajectory};
pub use holder::{commutator_ratio, holder_norm, HolderEstimate};
pub use model::{
    assemble_jacobian, critical_speed, d_c_symbol, gateaux, residual, symbol_at, CosineSeries,
    Fault, ModelParams, Regime, SineSeries,
};
pub use spectral::{Parity, SpectralField};
