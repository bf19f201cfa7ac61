//! Numerical toolkit for finite-blocklength channel simulation.
//!
//! The crate revolves around one operational task: synthesizing a noisy
//! channel `W` from `M` noiseless messages plus non-signaling correlations,
//! judged in worst-case purified distance. It provides
//!
//! * validated models for distributions, classical channels, and
//!   classical-quantum channels, together with tensor powers and
//!   type-class enumeration ([`chan`]);
//! * classical and sandwiched Rényi divergences, fidelities, pinching
//!   maps, and divergence variances ([`info`]);
//! * certified minimax solvers for channel Rényi mutual information and
//!   its bipartite analogue, with two-sided optimality certificates
//!   ([`capacity`]);
//! * error-exponent and strong-converse-exponent curves plus the
//!   finite-`n` achievability/converse envelopes around them
//!   ([`exponents`]);
//! * exact small-instance solvers for the one-shot non-signaling
//!   simulation error, classical and quantum ([`ns`]);
//! * the explicit smoothing/mixing constructions that witness the
//!   achievability bounds, with per-instance certificates
//!   ([`construct`]);
//! * randomized, seeded verification suites for the supporting
//!   inequalities ([`lab`]).
//!
//! All logarithms and exponents are natural (nats) unless a function says
//! otherwise. Infinite divergences are explicit values, never sentinel
//! floats.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod chan;
pub mod construct;
pub mod error;
pub mod exponents;
pub mod info;
pub mod lab;
pub mod linalg;
pub mod ns;
pub mod random;
pub mod sdp;

pub use error::{Error, Result};
