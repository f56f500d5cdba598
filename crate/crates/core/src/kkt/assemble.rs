use serde::{Deserialize, Serialize};

use super::layout::{build_layout, BlockLayout, Key, PiBlock, Roles, ZBlock};
use crate::error::{Error, Result};
use crate::model::{validate_case, MarketCase, Scheme};
use crate::network::compute_ptdf;
use crate::solver::{MixedLcp, Residual};
use crate::sparse::Triplets;

/// Smallest δ used when normalizing the hyperscaler rows. The hyperscaler
/// stationarity conditions are divided by δ so that the leasing price enters
/// them with the same coefficient as in the MDC rows.
pub const MIN_DELTA: f64 = 1e-3;

/// Under ex ante disclosure an MDC facing several equally priced supply
/// contracts takes the cleanest: its purchase rows carry this premium in $/MWh
/// per t/MWh of the supplier's emission rate. Without it the disclosed
/// intensity can jump between extremes and the fixed point has no solution.
pub const CLEAN_SUPPLY_PREFERENCE: f64 = 1e-3;

/// Disclosed MDC emission intensities, t/MWh, indexed `[mdc * periods + t]`
/// with MDCs in case order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityVector {
    pub periods: usize,
    pub values: Vec<f64>,
}

impl IntensityVector {
    pub fn zeros(mdcs: usize, periods: usize) -> Self {
        IntensityVector {
            periods,
            values: vec![0.0; mdcs * periods],
        }
    }

    pub fn get(&self, mdc: usize, t: usize) -> f64 {
        self.values[mdc * self.periods + t]
    }

    pub fn max_abs_diff(&self, other: &IntensityVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Assembled complementarity system together with its index map.
#[derive(Debug, Clone)]
pub struct MlcpInstance {
    pub lcp: MixedLcp,
    pub layout: BlockLayout,
    pub scheme: Scheme,
    /// δ actually used in the normalized hyperscaler rows.
    pub delta_eff: f64,
}

impl MlcpInstance {
    pub fn residual(&self, z: &[f64], pi: &[f64]) -> Residual {
        self.lcp.residual(z, pi)
    }
}

/// `(complementarity, equality, nonnegativity)` residuals of a candidate point.
pub fn residual(instance: &MlcpInstance, z: &[f64], pi: &[f64]) -> Residual {
    instance.residual(z, pi)
}

pub(crate) fn effective_delta(case: &MarketCase) -> f64 {
    case.hyperscaler.as_ref().map_or(1.0, |h| h.delta.max(MIN_DELTA))
}

/// Builds `(M, N, S, q, r)` for the case. Under the ex ante scheme the
/// frozen intensities `intensity` are required; under ex post they must be
/// absent.
pub fn assemble(case: &MarketCase, intensity: Option<&IntensityVector>) -> Result<MlcpInstance> {
    let violations = validate_case(case);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    match (case.scheme, intensity) {
        (Scheme::ExAnte, None) => {
            return Err(Error::Assembly("ex ante assembly needs frozen MDC intensities".into()))
        }
        (Scheme::ExPost, Some(_)) => {
            return Err(Error::Assembly("intensities were supplied for an ex post assembly".into()))
        }
        (Scheme::ExAnte, Some(e)) if e.values.len() != case.mdcs.len() * case.periods || e.periods != case.periods => {
            return Err(Error::Assembly(format!(
                "intensity vector has {} entries, expected {}",
                e.values.len(),
                case.mdcs.len() * case.periods
            )))
        }
        _ => {}
    }

    let layout = build_layout(case);
    let roles = Roles::of(case);
    let ptdf = compute_ptdf(&case.network)?;
    let (nz, np) = (layout.n_z(), layout.n_pi());
    let mut m = Triplets::new(nz, nz);
    let mut n = Triplets::new(nz, np);
    let mut s = Triplets::new(np, np);
    let mut q = vec![0.0; nz];
    let mut r = vec![0.0; np];

    let zi = |b: ZBlock, k: Key| layout.z(b, k).unwrap_or_else(|| panic!("missing {b:?} {k}"));
    let pi = |b: PiBlock, k: Key| layout.pi(b, k).unwrap_or_else(|| panic!("missing {b:?} {k}"));
    let bus_of_gen: Vec<usize> = case
        .generators
        .iter()
        .map(|g| case.bus_index(g.bus).expect("validated"))
        .collect();

    // consumers: b1 * D_it - b0 + θᵈ >= 0
    for (row, k) in layout.z_entries(ZBlock::D) {
        let (i, t) = (k.bus.unwrap(), k.t);
        let curve = case.demand_curve(case.network.buses[i].id, t).expect("consumer bus has a curve");
        for j in 0..case.generators.len() {
            m.push(row, zi(ZBlock::D, Key::gen_bus(j, i, t)), curve.b1);
        }
        n.push(row, pi(PiBlock::ThetaD, k), 1.0);
        q[row] = -curve.b0;
    }

    // producers: c0 + c1 Σ_i g - θ + (ω_i - ω_j) + λ >= 0
    for (row, k) in layout.z_entries(ZBlock::G) {
        let (j, i, t) = (k.gen.unwrap(), k.bus.unwrap(), k.t);
        let gen = &case.generators[j];
        for &i2 in &roles.buyers(t) {
            m.push(row, zi(ZBlock::G, Key::gen_bus(j, i2, t)), gen.c1);
        }
        m.push(row, zi(ZBlock::Lambda, Key::gen(j, t)), 1.0);
        if roles.consumers[t].contains(&i) {
            n.push(row, pi(PiBlock::ThetaD, k), -1.0);
        } else if roles.mdcs.contains(&i) {
            n.push(row, pi(PiBlock::ThetaX, k), -1.0);
        } else {
            n.push(row, pi(PiBlock::ThetaK, k), -1.0);
        }
        if i != bus_of_gen[j] {
            n.push(row, pi(PiBlock::Omega, Key::bus(i, t)), 1.0);
            n.push(row, pi(PiBlock::Omega, Key::bus(bus_of_gen[j], t)), -1.0);
        }
        q[row] = gen.c0;
    }

    // capacity: G - Σ_i g >= 0
    for (row, k) in layout.z_entries(ZBlock::Lambda) {
        let (j, t) = (k.gen.unwrap(), k.t);
        for &i in &roles.buyers(t) {
            m.push(row, zi(ZBlock::G, Key::gen_bus(j, i, t)), -1.0);
        }
        q[row] = case.generators[j].capacity;
    }

    // flow limits: F + PTDF y >= 0 and F - PTDF y >= 0
    for (blk, sign) in [(ZBlock::Mu1, 1.0), (ZBlock::Mu2, -1.0)] {
        for (row, k) in layout.z_entries(blk) {
            let (l, t) = (k.line.unwrap(), k.t);
            for i in 0..ptdf.n_buses() {
                n.push(row, pi(PiBlock::Y, Key::bus(i, t)), sign * ptdf.get(l, i));
            }
            q[row] = case.network.lines[l].limit;
        }
    }

    // MDC purchases: θᵡ - η >= 0
    for (row, k) in layout.z_entries(ZBlock::P) {
        n.push(row, pi(PiBlock::ThetaX, k), 1.0);
        n.push(row, pi(PiBlock::Eta, Key::bus(k.bus.unwrap(), k.t)), -1.0);
        if case.scheme == Scheme::ExAnte {
            q[row] = CLEAN_SUPPLY_PREFERENCE * case.generators[k.gen.unwrap()].emission_rate;
        }
    }

    let h = case.hyperscaler.as_ref();
    let nu = h.map_or(1.0, |h| h.gpu_power_factor);
    let delta = effective_delta(case);
    // weight of the emission terms after dividing the hyperscaler rows by δ
    let ew = h.map_or(0.0, |h| (1.0 - h.delta) / delta * h.emission_weight);

    // MDC leasing: -ν α + η + ρ >= 0
    for (row, k) in layout.z_entries(ZBlock::Kr) {
        let (i, t) = (k.bus.unwrap(), k.t);
        n.push(row, pi(PiBlock::Alpha, k), -nu);
        n.push(row, pi(PiBlock::Eta, Key::bus(i, t)), 1.0);
        m.push(row, zi(ZBlock::Rho, Key::bus(i, t)), 1.0);
    }

    // spillover: η + υ >= 0
    for (row, k) in layout.z_entries(ZBlock::S) {
        n.push(row, pi(PiBlock::Eta, k), 1.0);
        m.push(row, zi(ZBlock::Upsilon, k), 1.0);
    }

    let mdc_pos = |i: usize| roles.mdcs.iter().position(|&x| x == i).expect("MDC bus");
    // MDC capacity: Cap - Σ_b kʳ >= 0
    for (row, k) in layout.z_entries(ZBlock::Rho) {
        let (i, t) = (k.bus.unwrap(), k.t);
        for (col, kk) in layout.z_entries(ZBlock::Kr) {
            if kk.bus == Some(i) && kk.t == t {
                m.push(row, col, -1.0);
            }
        }
        q[row] = case.mdcs[mdc_pos(i)].capacity;
    }

    // spillover limit: Σ g^c - s >= 0
    for (row, k) in layout.z_entries(ZBlock::Upsilon) {
        m.push(row, zi(ZBlock::S, k), -1.0);
        q[row] = case.mdcs[mdc_pos(k.bus.unwrap())].curtailed_total(k.t);
    }

    // hyperscaler leasing: ν α + w (1-δ)/δ ε̂ + ψ >= 0
    for (row, k) in layout.z_entries(ZBlock::Ks) {
        let (b, i, t) = (k.batch.unwrap(), k.bus.unwrap(), k.t);
        n.push(row, pi(PiBlock::Alpha, k), nu);
        n.push(row, pi(PiBlock::Psi, Key::batch(b, t)), 1.0);
        if let Some(e) = intensity {
            q[row] = ew * e.get(mdc_pos(i), t);
        }
    }

    // local processing: θᵏ + w (1-δ)/δ e_j + ψ >= 0
    if let Some(hb) = roles.hyperscaler {
        for (row, k) in layout.z_entries(ZBlock::L) {
            let (b, j, t) = (k.batch.unwrap(), k.gen.unwrap(), k.t);
            n.push(row, pi(PiBlock::ThetaK, Key::gen_bus(j, hb, t)), 1.0);
            n.push(row, pi(PiBlock::Psi, Key::batch(b, t)), 1.0);
            q[row] = ew * case.generators[j].emission_rate;
        }
    }

    // network coupling among free variables:
    //   ω_i:  (withdrawals - injections) + y_i = 0
    //   y_i:  Σ_k PTDF_ki (μ¹ - μ²) - ω_i - γ = 0
    //   γ:    Σ_i y_i - γ = 0
    for t in 0..case.periods {
        let gamma = pi(PiBlock::Gamma, Key::t(t));
        for i in 0..case.network.buses.len() {
            let (om, y) = (pi(PiBlock::Omega, Key::bus(i, t)), pi(PiBlock::Y, Key::bus(i, t)));
            s.push(om, y, 1.0);
            s.push(y, om, -1.0);
            s.push(y, gamma, -1.0);
            s.push(gamma, y, 1.0);
        }
        s.push(gamma, gamma, -1.0);
    }

    for (row, k) in layout.pi_entries(PiBlock::Eta) {
        r[row] = case.mdcs[mdc_pos(k.bus.unwrap())].curtailed_total(k.t);
    }
    if let Some(h) = h {
        for (row, k) in layout.pi_entries(PiBlock::Psi) {
            r[row] = h.batches[k.batch.unwrap()].load;
        }
    }

    Ok(MlcpInstance {
        lcp: MixedLcp {
            m: m.to_csr(),
            n: n.to_csr(),
            s: s.to_csr(),
            q,
            r,
        },
        layout,
        scheme: case.scheme,
        delta_eff: delta,
    })
}
