//! Electricity market equilibrium with conventional consumers, producers, a
//! grid operator, a hyperscale datacenter and modular datacenters (MDCs).
//!
//! The agents' optimality conditions are stacked into a mixed linear
//! complementarity problem
//!
//! ```text
//! 0 <= z  ⊥  M z + N π + q >= 0
//!            Nᵀ z + S π = r
//! ```
//!
//! which is solved with Lemke's method. On top of the solver sit the emission
//! disclosure schemes (ex post and ex ante), forward contracts for
//! conventional load and the δ sweeps over the hyperscaler's cost/emission
//! preference.
//!
//! Module map:
//!
//! * [`model`]: market instance types, validation and demand calibration.
//! * [`network`]: PTDFs, line flows and the congestion metric.
//! * [`kkt`]: variable layout and assembly of `(M, N, S, q, r)`.
//! * [`solver`]: Lemke pivoting, least-cost dispatch and batch feasibility.
//! * [`scenario`]: disclosure schemes, sweeps and report extraction.
//! * [`io`]: case files, bundled datasets and report writers.

// `!(x > 0.0)` is used on purpose so that NaN inputs fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kkt;
pub mod model;
pub mod network;
pub mod scenario;
pub mod solver;
pub mod sparse;

pub mod io;

pub use error::{Error, Result};
