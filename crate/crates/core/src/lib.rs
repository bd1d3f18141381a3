//! Rational simple-pole solutions of the half-wave maps equation
//!
//! ```text
//! ∂ₜ m = m × |∇| m,    m(t, x) ∈ S²,  x ∈ ℝ
//! ```
//!
//! A datum is a real unit vector `m₀` plus poles `x_j` in the upper half-plane
//! with complex null spins `s_j`; in Pauli form the field is
//! `M = M₀ + Σ A_j/(x − x_j) + Σ A_j*/(x − x̄_j)`. Valid data evolve in closed
//! form: the poles at time `t` are the eigenvalues of `X₀ + tL₀` for the Lax
//! matrix `L₀`, and the field comes from two linear solves per point.
//!
//! The crate is generic over the real scalar (`f32` or `f64`); the aliases at
//! the root fix it to `f64`, with `…32` variants for `f32`.
//!
//! ```
//! use hwm_core::{single_soliton, Evolution, Spin, Tolerances, full_field, c64};
//!
//! let data = single_soliton(c64(0.0, 1.0), Spin::real([0.0, 0.0, 1.0]), 0.0).unwrap();
//! let fe = Evolution::new(&data, &Tolerances::default()).unwrap();
//! let m = full_field(&fe, 3.0, 0.0).unwrap().m;
//! assert!((m[2] + 1.0).abs() < 1e-14);
//! ```

pub mod constraints;
pub mod error;
pub mod evolution;
pub mod halfspin;
pub mod lax;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod spin;
pub mod tolerance;

pub use constraints::search::{random_valid_datum, search_spins, SearchOptions};
pub use constraints::{
    b_matrix, initial_velocities, initial_velocity, moving_soliton, projected_velocity, require_valid,
    single_soliton, trace_velocity, validate, ConstraintReport, RationalData,
};
pub use error::{Error, Result};
pub use evolution::{
    full_field, halfwave_apply, hardy_rep_pi_plus, pde_residual, pi_minus, pi_plus, poles_and_spins_at,
    FieldSample, FrozenEvolution, HalfWaveCoefficients, PoleSnapshot,
};
pub use halfspin::{canonical_halfspins, HalfSpinPair, HalfSpinSet};
pub use lax::{build_lax, char_coefficients, conserved_traces, lax_residual, matsuno_consistency, LaxPair};
pub use linalg::CMatrix;
pub use oracle::{
    compare, integrate_halfspin, integrate_propagator, integrate_spin_cm, CompareReport, SampleGrid, Trajectory,
};
pub use scalar::{Real, C};
pub use spin::{matrix_to_spin, spin_to_matrix, ComplexSpin, Mat2};
pub use tolerance::Tolerances;

pub type Complex64 = C<f64>;
pub type Spin = ComplexSpin<f64>;
pub type Matrix2 = Mat2<f64>;
pub type Matrix = CMatrix<f64>;
pub type Datum = RationalData<f64>;
pub type Evolution = FrozenEvolution<f64>;

pub type Complex32 = C<f32>;
pub type Spin32 = ComplexSpin<f32>;
pub type Matrix2_32 = Mat2<f32>;
pub type Matrix32 = CMatrix<f32>;
pub type Datum32 = RationalData<f32>;
pub type Evolution32 = FrozenEvolution<f32>;

/// `f64` complex literal.
pub fn c64(re: f64, im: f64) -> Complex64 {
    C::new(re, im)
}
