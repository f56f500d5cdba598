//! Lossless DC network: PTDFs, line flows and the congestion metric.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Bus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: String,
    pub from: u32,
    pub to: u32,
    /// p.u.
    pub reactance: f64,
    /// MW, symmetric thermal limit.
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub reference_bus: u32,
}

impl Network {
    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }
}

/// Flow sensitivities: `get(k, i)` is the MW on line `k` (from -> to) per MW
/// injected at bus `i` and withdrawn at the reference bus.
#[derive(Debug, Clone, PartialEq)]
pub struct Ptdf {
    lines: usize,
    buses: usize,
    reference: usize,
    data: Vec<f64>,
}

impl Ptdf {
    #[inline]
    pub fn get(&self, line: usize, bus: usize) -> f64 {
        self.data[line * self.buses + bus]
    }

    pub fn row(&self, line: usize) -> &[f64] {
        &self.data[line * self.buses..(line + 1) * self.buses]
    }

    pub fn n_lines(&self) -> usize {
        self.lines
    }

    pub fn n_buses(&self) -> usize {
        self.buses
    }

    /// Position of the reference bus in the bus list.
    pub fn reference(&self) -> usize {
        self.reference
    }
}

fn index_of(net: &Network, id: u32) -> Result<usize> {
    net.bus_index(id)
        .ok_or_else(|| Error::Assembly(format!("bus {id} referenced by the network does not exist")))
}

/// Builds the PTDF matrix from the reduced susceptance matrix.
pub fn compute_ptdf(net: &Network) -> Result<Ptdf> {
    let n = net.buses.len();
    let reference = index_of(net, net.reference_bus)?;
    let mut ends = Vec::with_capacity(net.lines.len());
    for l in &net.lines {
        let (f, t) = (index_of(net, l.from)?, index_of(net, l.to)?);
        if !(l.reactance > 0.0) {
            return Err(Error::Numerical(format!("line {} has nonpositive reactance", l.id)));
        }
        ends.push((f, t));
    }

    let mut adj = vec![Vec::new(); n];
    for &(f, t) in &ends {
        adj[f].push(t);
        adj[t].push(f);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([reference]);
    seen[reference] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Topology { bus: net.buses[i].id });
    }

    // reduced index: bus order with the reference removed
    let red = |i: usize| if i < reference { Some(i) } else if i > reference { Some(i - 1) } else { None };
    let m = n - 1;
    let mut b = DMatrix::<f64>::zeros(m, m);
    for (l, &(f, t)) in net.lines.iter().zip(&ends) {
        let y = 1.0 / l.reactance;
        if let Some(a) = red(f) {
            b[(a, a)] += y;
        }
        if let Some(c) = red(t) {
            b[(c, c)] += y;
        }
        if let (Some(a), Some(c)) = (red(f), red(t)) {
            b[(a, c)] -= y;
            b[(c, a)] -= y;
        }
    }
    let x = if m == 0 {
        DMatrix::zeros(0, 0)
    } else {
        b.cholesky()
            .ok_or_else(|| Error::Numerical("reduced susceptance matrix is singular".into()))?
            .inverse()
    };

    let mut data = vec![0.0; net.lines.len() * n];
    for (k, (l, &(f, t))) in net.lines.iter().zip(&ends).enumerate() {
        for i in 0..n {
            let Some(ri) = red(i) else { continue };
            let tf = red(f).map_or(0.0, |a| x[(a, ri)]);
            let tt = red(t).map_or(0.0, |c| x[(c, ri)]);
            data[k * n + i] = (tf - tt) / l.reactance;
        }
    }
    Ok(Ptdf {
        lines: net.lines.len(),
        buses: n,
        reference,
        data,
    })
}

/// Flows for one period's net injections `y` (one entry per bus).
pub fn line_flows(ptdf: &Ptdf, y: &[f64], period: usize) -> Result<Vec<f64>> {
    let sum: f64 = y.iter().sum();
    let scale = y.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if sum.abs() > 1e-6 * scale {
        return Err(Error::Unbalanced { period, sum });
    }
    Ok((0..ptdf.lines)
        .map(|k| ptdf.row(k).iter().zip(y).map(|(p, v)| p * v).sum())
        .collect())
}

/// `sum_k,t F_k (mu1_kt + mu2_kt)`; multipliers are ordered line-major,
/// `periods` entries per line.
pub fn congestion_cost(lines: &[Line], mu1: &[f64], mu2: &[f64], periods: usize) -> f64 {
    lines
        .iter()
        .enumerate()
        .map(|(k, l)| {
            (0..periods)
                .map(|t| l.limit * (mu1[k * periods + t] + mu2[k * periods + t]))
                .sum::<f64>()
        })
        .sum()
}
