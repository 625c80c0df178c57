//! Exact kernel for the Boolean algebra `𝔅 = K(ℓ²({#} ∪ ℕ)) + ℂI` and the
//! stochastic processes it generates.
//!
//! Elements of `𝔅` are finitely supported sparse complex matrices over the
//! index set `{#} ∪ {1, 2, 3, …}` plus a scalar multiple of the identity.
//! On top of that kernel the crate provides
//!
//! - the Boolean creation and annihilation operators, the matrix-unit
//!   dictionary and the embeddings `ι_j` of the sample algebra
//!   `M₂(ℂ) ⊕ ℂ` ([`fock`]);
//! - states `ω = γ ψ_T + (1 − γ) ω_∞` with finite-rank density `T`
//!   and process moments ([`states`]);
//! - the tail algebra `ℂP_# ⊕ ℂP_#^⊥`, the conditional expectations
//!   `F_φ` onto it, and the decision of whether a state is preserved by one
//!   of them ([`tail`]);
//! - randomized checkers for exchangeability, conditional independence and
//!   identical distribution, and the De Finetti classification of a state
//!   ([`verify`]), each of which can be re-run against a dense brute-force
//!   oracle ([`dense`]).
//!
//! The runnable programs under `examples/` walk through each capability;
//! the `boolefock` binary wraps the verification suites.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod cli;
pub mod dense;
pub mod error;
pub mod fock;
pub mod report;
pub mod sample;
pub mod states;
pub mod tail;
pub mod verify;

pub use algebra::{BooleanElement, FockVector, Index, Site};
pub use error::{Error, Result};
pub use fock::{annihilator, creator, embed, permute, FinitePermutation, TestAlgebraElement};
pub use states::{moment, BooleanState, TraceClassOperator};
pub use tail::{
    cond_expect, counterexample_ratio, is_expected, preserving_phi, theorem_preserving_f,
    Counterexample, PhiState, TailElement,
};
pub use verify::{CheckReport, Classification, SweepRow, Verifier, Witness};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;

/// Amplitudes smaller than this are dropped after every arithmetic operation.
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Default comparison tolerance of the kernel.
pub const KERNEL_TOLERANCE: f64 = 1e-10;

/// Default pass/fail tolerance of the verification checkers.
pub const CHECK_TOLERANCE: f64 = 1e-9;
