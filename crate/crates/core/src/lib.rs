//! Core algorithms for simulating and analysing slowly-varying two-armed
//! bandits: reward-profile construction and validation, detectable-gap
//! profiles, the episodic SnoozeIt policy and its modified variant, a set of
//! baseline policies, a deterministic simulator, and theory-side calculators
//! (episode/regret bounds, KL machinery, lower-bound constructions).
//!
//! The crate is `no_std`-compatible (with `alloc`); IO, file formats and
//! parallel orchestration live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod bounds;
mod error;
pub mod gap;
pub mod instance;
mod num;
pub mod simulator;
pub mod snoozeit;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
