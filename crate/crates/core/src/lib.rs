//! Moments and nonclassicality witnesses for two-mode generalized binomial
//! states.
//!
//! - [`fock`]: truncated two-mode Fock states and the ladder-operator oracle.
//! - [`states`]: generalized binomial, binomial, Fock and coherent states.
//! - [`moments`]: closed-form moments and the two moment engines.
//! - [`witnesses`]: antibunching, squeezing and entanglement witnesses.
//! - [`sweep`]: parameter sweeps, figure data and the classification table.

pub mod fock;
pub mod moments;
pub mod states;
pub mod sweep;
pub mod witnesses;

pub use fock::{FixedTotalState, FockError, MomentSpec, TwoModeState};
pub use moments::{compare_engines, Engine, EngineKind, MomentReport, MomentSource};
pub use states::{binomial_state, coherent_product, fock_pair, ngbs, NgbsParams, StateError};
pub use witnesses::{evaluate, EprForm, WitnessKind, WitnessResult};
