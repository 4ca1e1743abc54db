//! Energy-aware client scheduling for federated learning over a bandwidth-limited uplink.
//!
//! Each round only `N` of `K` user equipments (UEs) can upload. A schedule trades the
//! energy the chosen UEs spend (local computation plus transmission at a threshold rate)
//! against a concave convergence reference built from per-UE staleness and stale loss.
//! The main scheduler sorts UEs by energy, runs a small differential evolution inside every
//! window of `W` consecutive UEs and keeps the best window's answer.
//!
//! Modules, bottom-up:
//!
//! - [`scenario`]: configuration, UE population, per-round Rayleigh channel draws
//! - [`energy`]: rate, transmit and compute energy
//! - [`objective`]: scheduler state, convergence reference, objective, fitness scaling
//! - [`de`]: DE operators, sliding windows, the schedulers and the random baseline
//! - [`flsim`]: softmax-regression stand-in for the learning task
//! - [`harness`]: round loop, experiments, result files, brute-force oracle suite
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod de;
pub mod energy;
mod error;
pub mod flsim;
pub mod harness;
pub mod objective;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
