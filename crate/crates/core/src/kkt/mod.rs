//! Assembly of the equilibrium conditions into a mixed LCP.
//!
//! Every complementarity row is stored in `>= 0` form. Besides the agents'
//! stationarity and feasibility rows, `M` carries skew pairs for the
//! generator capacity (λ), MDC capacity (ρ), spillover limit (υ) and forward
//! floor (β) multipliers, so its symmetric part is `diag(H_d, H_g, 0)`.
//!
//! The hyperscaler rows are divided by δ (floored at [`MIN_DELTA`]). This
//! keeps the leasing price α entering the hyperscaler and MDC rows with
//! opposite coefficients, which is what makes the system monotone.
//!
//! The equality block reads `Nᵀz + Sπ = r`. `S` couples the network duals:
//! the net injection `y`, the wheeling charges `ω` and the hub price `γ`.
//! Its symmetric part is `−1` on γ and zero elsewhere.

mod assemble;
mod dump;
mod forward;
mod layout;

pub use assemble::{assemble, residual, IntensityVector, MlcpInstance, CLEAN_SUPPLY_PREFERENCE, MIN_DELTA};
pub use dump::{dump_string, write_dump};
pub use forward::{apply_forward_bounds, ForwardBaseline};
pub use layout::{build_layout, BlockLayout, Key, PiBlock, ZBlock};
pub(crate) use layout::Roles;
