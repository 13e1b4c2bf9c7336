//! Default numerical thresholds. Every tolerance used by the certificates
//! and the CLI defaults lives here.

/// Asymmetry accepted (and then removed) by the `SymMatrix`/`SkewMatrix`
/// constructors, relative to `max(1, ‖m‖_max)`.
pub const SYM_REJECT: f64 = 1e-8;

/// Target symmetry defect on unit-normalized inputs.
pub const SYM_TOL: f64 = 1e-12;

/// Default relative tolerance of the Jacobi eigensolver.
pub const EIG_TOL: f64 = 1e-14;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Relative numerical-rank threshold.
pub const RANK_TOL: f64 = 1e-9;

/// Relative closeness under which two eigenvalue pairs `v_i` of `N` are
/// treated as equal.
pub const TIE_TOL: f64 = 1e-8;

/// Invariants that the canonical form of `N` must satisfy.
pub const CANONICAL_TOL: f64 = 1e-10;

/// Identity-type residuals (involution, Jacobi of the bracket pencil).
pub const IDENTITY_TOL: f64 = 1e-10;

/// Casimir annihilation residuals.
pub const CASIMIR_TOL: f64 = 1e-11;

/// Bi-Hamiltonian recursion residuals.
pub const RECURSION_TOL: f64 = 1e-11;

/// Lax-pair and structural algebra residuals.
pub const LAX_TOL: f64 = 1e-12;

/// Vanishing of odd-power trace coefficients, relative to the natural scale
/// `(‖X‖_F + ‖N‖_F)^k`.
pub const ODD_COEFF_TOL: f64 = 1e-12;

/// Minimal `‖·‖_max` separation for the 2x2 sectional-operator comparison.
pub const SECTIONAL_SEPARATION: f64 = 1e-3;

/// Re-symmetrization corrections above this are logged during integration.
pub const RESYM_LOG: f64 = 1e-10;

/// Monitored quantities smaller than this at `t = 0` use absolute drift.
pub const DRIFT_ABS_FLOOR: f64 = 1e-12;
