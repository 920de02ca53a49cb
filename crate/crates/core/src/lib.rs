//! phasekit: coupled phase oscillators with dynamical temporal attention.
//!
//! The crate covers the full pipeline for studying synchronization when
//! oscillators couple not only to the instantaneous states of their
//! neighbours but also to exponentially weighted summaries of past states
//! ("attention" states M_i obeying dM_i/dt = beta (e^{i theta_i} - M_i)):
//!
//! * [`net`] — interaction graphs (complete, small-world, random, scale-free,
//!   edge lists) with exact path-length diagnostics;
//! * [`dynamics`] — Euler–Maruyama integration of the coupled phase/attention
//!   system, plus opinion-anchor and Stuart–Landau variants;
//! * [`attention`] — the discrete query/key attention construction and its
//!   continuum exponential-kernel limit;
//! * [`meanfield`] — linear-stability thresholds of the incoherent state,
//!   in closed form where available and by quadrature + root bracketing
//!   otherwise;
//! * [`estimator`] — empirical critical-coupling estimation from finite-size
//!   ensembles;
//! * [`hopfield`] — an associative-memory network built on the same
//!   attention mechanism: Hebbian couplings, pattern stability maps, and
//!   corrupted-pattern recovery.
//!
//! Everything stochastic is driven by explicit `u64` seeds through
//! stream-separated ChaCha generators ([`rng`]), so every run — including
//! multi-threaded sweeps — is bitwise reproducible.

pub mod attention;
pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod hopfield;
pub mod meanfield;
pub mod net;
pub mod rng;

pub use error::{Error, Result};
pub use net::{Indexing, Network, NetworkKind, NetworkSpec};

/// Complex number alias used across the crate.
pub type C64 = num_complex::Complex64;
