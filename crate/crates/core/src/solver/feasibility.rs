//! Deliverability of the batch load to the hyperscaler.

use serde::Serialize;

use super::{solve_mixed, MixedLcp, SolverConfig};
use crate::error::{Error, Result};
use crate::model::MarketCase;
use crate::network::compute_ptdf;
use crate::sparse::Triplets;

/// Largest total generation that can be delivered to the hyperscaler bus in
/// period `t` within generator capacities and line limits.
///
/// The linear program `max 1ᵀx s.t. x <= G, -F <= Hx <= F, x >= 0`, with
/// `H_kj = PTDF_{k,bus(j)} - PTDF_{k,hyperscaler}`, is solved through its
/// optimality conditions as an LCP with a skew-symmetric matrix.
pub fn throughput_limit(case: &MarketCase, t: usize, cfg: &SolverConfig) -> Result<f64> {
    let _ = t; // capacities and limits do not vary by period
    let Some(h) = &case.hyperscaler else { return Ok(0.0) };
    let ptdf = compute_ptdf(&case.network)?;
    let hb = case
        .bus_index(h.bus)
        .ok_or_else(|| Error::Assembly(format!("hyperscaler bus {} does not exist", h.bus)))?;
    let (ng, nl) = (case.generators.len(), case.network.lines.len());
    if ng == 0 {
        return Ok(0.0);
    }
    let (lam, m1, m2) = (ng, 2 * ng, 2 * ng + nl);
    let nz = 2 * ng + 2 * nl;
    let mut m = Triplets::new(nz, nz);
    let mut q = vec![0.0; nz];
    for (j, g) in case.generators.iter().enumerate() {
        let at = case
            .bus_index(g.bus)
            .ok_or_else(|| Error::Assembly(format!("generator {} on unknown bus", g.id)))?;
        m.push(j, lam + j, 1.0);
        m.push(lam + j, j, -1.0);
        for k in 0..nl {
            let hk = ptdf.get(k, at) - ptdf.get(k, hb);
            if hk.abs() < 1e-12 {
                continue;
            }
            m.push(j, m2 + k, hk);
            m.push(j, m1 + k, -hk);
            m.push(m2 + k, j, -hk);
            m.push(m1 + k, j, hk);
        }
        q[j] = -1.0;
        q[lam + j] = g.capacity;
    }
    for k in 0..nl {
        q[m1 + k] = case.network.lines[k].limit;
        q[m2 + k] = case.network.lines[k].limit;
    }
    let sol = solve_mixed(&MixedLcp::lcp(m.to_csr(), q), cfg)?.into_solved()?;
    Ok(sol.z[..ng].iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    pub period: usize,
    pub load: f64,
    pub limit: f64,
    pub feasible: bool,
}

/// Per-period comparison of the total batch load with [`throughput_limit`].
pub fn check_batch_feasibility(case: &MarketCase, cfg: &SolverConfig) -> Result<Vec<FeasibilityVerdict>> {
    let load = case.total_batch_load();
    (0..case.periods)
        .map(|t| {
            let limit = throughput_limit(case, t, cfg)?;
            Ok(FeasibilityVerdict {
                period: t,
                load,
                limit,
                feasible: load <= limit * (1.0 + 1e-9) + 1e-9,
            })
        })
        .collect()
}
