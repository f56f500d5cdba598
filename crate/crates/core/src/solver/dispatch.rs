//! Least-cost DC dispatch against fixed loads, used to price the calibration
//! point of the demand curves.

use super::{solve_mixed, MixedLcp, SolverConfig};
use crate::error::{Error, Result};
use crate::model::Generator;
use crate::network::{compute_ptdf, Network};
use crate::sparse::Triplets;

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchResult {
    /// MW per generator.
    pub output: Vec<f64>,
    /// $/MWh per bus, in network order.
    pub lmp: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
}

/// Minimizes `Σ c0 g + ½ c1 g²` subject to the energy balance, generator
/// capacities and line limits for one period of fixed `loads` (MW per bus,
/// network order).
///
/// The locational price is `LMP_i = γ + Σ_k PTDF_ki (μ¹_k − μ²_k)` where γ
/// prices the balance at the reference bus.
pub fn least_cost_dispatch(
    net: &Network,
    generators: &[Generator],
    loads: &[f64],
    cfg: &SolverConfig,
) -> Result<DispatchResult> {
    let ptdf = compute_ptdf(net)?;
    let (ng, nl, nb) = (generators.len(), net.lines.len(), net.buses.len());
    assert_eq!(loads.len(), nb);
    let at: Vec<usize> = generators
        .iter()
        .map(|g| {
            net.bus_index(g.bus)
                .ok_or_else(|| Error::Assembly(format!("generator {} on unknown bus {}", g.id, g.bus)))
        })
        .collect::<Result<_>>()?;
    let base_flow: Vec<f64> = (0..nl)
        .map(|k| (0..nb).map(|i| ptdf.get(k, i) * loads[i]).sum())
        .collect();

    // z = (g, λ, μ¹, μ²), π = γ
    let (lam, m1, m2) = (ng, 2 * ng, 2 * ng + nl);
    let nz = 2 * ng + 2 * nl;
    let mut m = Triplets::new(nz, nz);
    let mut n = Triplets::new(nz, 1);
    let mut q = vec![0.0; nz];
    for (j, g) in generators.iter().enumerate() {
        m.push(j, j, g.c1);
        m.push(j, lam + j, 1.0);
        m.push(lam + j, j, -1.0);
        for k in 0..nl {
            let p = ptdf.get(k, at[j]);
            m.push(j, m2 + k, p);
            m.push(j, m1 + k, -p);
            m.push(m2 + k, j, -p);
            m.push(m1 + k, j, p);
        }
        n.push(j, 0, -1.0);
        q[j] = g.c0;
        q[lam + j] = g.capacity;
    }
    for k in 0..nl {
        q[m1 + k] = net.lines[k].limit - base_flow[k];
        q[m2 + k] = net.lines[k].limit + base_flow[k];
    }
    let total: f64 = loads.iter().sum();
    let p = MixedLcp {
        m: m.to_csr(),
        n: n.to_csr(),
        s: crate::sparse::Csr::zeros(1, 1),
        q,
        r: vec![-total],
    };
    let sol = solve_mixed(&p, cfg)?.into_solved()?;
    let gamma = sol.pi[0];
    let mu1 = sol.z[m1..m1 + nl].to_vec();
    let mu2 = sol.z[m2..m2 + nl].to_vec();
    let lmp = (0..nb)
        .map(|i| gamma + (0..nl).map(|k| ptdf.get(k, i) * (mu1[k] - mu2[k])).sum::<f64>())
        .collect();
    Ok(DispatchResult {
        output: sol.z[..ng].to_vec(),
        lmp,
        mu1,
        mu2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bus, BusKind};
    use crate::network::Line;

    fn two_bus(limit: f64) -> (Network, Vec<Generator>) {
        let net = Network {
            buses: vec![
                Bus {
                    id: 1,
                    kind: BusKind::Transit,
                },
                Bus {
                    id: 2,
                    kind: BusKind::ConventionalLoad,
                },
            ],
            lines: vec![Line {
                id: "l".into(),
                from: 1,
                to: 2,
                reactance: 0.1,
                limit,
            }],
            reference_bus: 1,
        };
        let gen = |id: &str, bus, c0| Generator {
            id: id.into(),
            bus,
            c0,
            c1: 0.0,
            capacity: 500.0,
            emission_rate: 0.0,
        };
        (net, vec![gen("cheap", 1, 10.0), gen("dear", 2, 30.0)])
    }

    #[test]
    fn uncongested_single_price() {
        let (net, gens) = two_bus(500.0);
        let r = least_cost_dispatch(&net, &gens, &[0.0, 100.0], &SolverConfig::default()).unwrap();
        assert!((r.output[0] - 100.0).abs() < 1e-9);
        assert!((r.lmp[0] - 10.0).abs() < 1e-9);
        assert!((r.lmp[1] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn congestion_separates_prices() {
        let (net, gens) = two_bus(60.0);
        let r = least_cost_dispatch(&net, &gens, &[0.0, 100.0], &SolverConfig::default()).unwrap();
        assert!((r.output[0] - 60.0).abs() < 1e-9);
        assert!((r.output[1] - 40.0).abs() < 1e-9);
        assert!((r.lmp[0] - 10.0).abs() < 1e-9);
        assert!((r.lmp[1] - 30.0).abs() < 1e-9);
        assert!((r.mu2[0] - 20.0).abs() < 1e-9);
    }
}
