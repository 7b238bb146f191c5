//! Density-increment machinery for three-term progressions on finite abelian
//! groups, with brute-force oracles that certify each step numerically.
//!
//! Module layout follows the data flow of the increment argument:
//! [`group`] and [`subspace`] describe the ambient group, [`harmonic`] holds
//! the analytic toolkit, [`bohr`] the approximate subgroups, [`sifting`] and
//! [`periodicity`] the two middle stages, [`increment`] the steps and drivers,
//! and [`extremal`] the exact counting oracles everything is checked against.

pub mod bohr;
pub mod error;
pub mod extremal;
pub mod group;
pub mod harmonic;
pub mod increment;
pub mod io;
pub mod periodicity;
pub mod rng;
pub mod sifting;
pub mod subspace;

pub use error::{ApcError, Result};
pub use group::{Character, GroupElement, GroupSpec};
pub use harmonic::{ConvMode, FourierFn, GroupFn, ProbMeasure};

/// lo(α) = log(2/α).
pub fn lo(alpha: f64) -> f64 {
    (2.0 / alpha).ln()
}

/// Relative tolerance for real equalities.
pub const REL_TOL: f64 = 1e-9;
/// Absolute tolerance near zero.
pub const ABS_TOL: f64 = 1e-12;

/// |a − b| ≤ REL_TOL·max(1, |a|, |b|), with a floor of ABS_TOL.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= (REL_TOL * a.abs().max(b.abs()).max(1.0)).max(ABS_TOL)
}

/// a ≥ b up to the shared relative tolerance.
pub fn approx_ge(a: f64, b: f64) -> bool {
    a >= b - REL_TOL * a.abs().max(b.abs()).max(1.0)
}
