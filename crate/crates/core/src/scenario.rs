//! Disclosure schemes, forward contracts, δ sweeps and report extraction.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kkt::{apply_forward_bounds, assemble, ForwardBaseline, Key, MlcpInstance, PiBlock, Roles, ZBlock};
pub use crate::kkt::IntensityVector;
use crate::model::{MarketCase, Scheme};
use crate::network::{compute_ptdf, congestion_cost};
use crate::solver::{check_batch_feasibility, solve_mixed, EquilibriumSolution, SolveStatus, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointConfig {
    /// Weight σ of the new intensities in each update.
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            damping: 0.5,
            tolerance: 1e-6,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeasingPrice {
    pub batch: u32,
    pub mdc_bus: u32,
    pub period: usize,
    /// $/GPU
    pub alpha: f64,
    /// MW leased
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdcReport {
    pub bus: u32,
    /// MWh of GPU load hosted
    pub leased: f64,
    /// MWh bought under supply contracts
    pub purchased: f64,
    pub spilled: f64,
    /// kg/MWh of purchased energy
    pub intensity: f64,
    /// Mean leasing price over the MDC's admissible batches, $/GPU.
    pub leasing_price: f64,
    /// `Σ p θᵡ / Σ p`, absent when nothing is purchased.
    pub avg_procurement_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractPrice {
    pub generator: String,
    pub bus: u32,
    pub period: usize,
    pub price: f64,
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BusValue {
    pub bus: u32,
    pub period: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub case: String,
    pub scheme: Scheme,
    pub delta: f64,
    pub forward_fraction: Option<f64>,
    pub processing_cost_local: f64,
    pub processing_cost_mdc: f64,
    pub processing_cost_total: f64,
    pub emissions_local: f64,
    pub emissions_mdc: f64,
    pub emissions_workload_total: f64,
    pub emissions_system: f64,
    pub congestion_cost: f64,
    pub total_demand: f64,
    pub mdcs: Vec<MdcReport>,
    pub leasing_prices: Vec<LeasingPrice>,
    /// Converged disclosed intensities (t/MWh) under the ex ante scheme.
    pub intensities: Option<Vec<f64>>,
    pub fixed_point_iterations: Option<usize>,
    pub pivots: usize,
    pub theta_d: Vec<ContractPrice>,
    pub theta_x: Vec<ContractPrice>,
    pub theta_k: Vec<ContractPrice>,
    pub omega: Vec<BusValue>,
    pub demand: Vec<BusValue>,
}

/// Solve of one assembled instance plus the instance itself.
#[derive(Debug, Clone)]
pub struct SolvedInstance {
    pub instance: MlcpInstance,
    pub solution: EquilibriumSolution,
}

fn assemble_full(
    case: &MarketCase,
    intensity: Option<&IntensityVector>,
    baseline: Option<&ForwardBaseline>,
) -> Result<MlcpInstance> {
    let inst = assemble(case, intensity)?;
    match (&case.forward, baseline) {
        (Some(f), Some(b)) if f.fraction > 0.0 => apply_forward_bounds(&inst, case, b, f.fraction),
        (Some(f), None) if f.fraction > 0.0 => Err(Error::Assembly("forward policy without a baseline".into())),
        _ => Ok(inst),
    }
}

/// Assembles and solves once; non-`Solved` outcomes become errors, with the
/// throughput comparison when the batch load cannot be delivered.
pub fn solve_instance(
    case: &MarketCase,
    intensity: Option<&IntensityVector>,
    baseline: Option<&ForwardBaseline>,
    cfg: &SolverConfig,
) -> Result<SolvedInstance> {
    let instance = assemble_full(case, intensity, baseline)?;
    let mut solution = solve_mixed(&instance.lcp, cfg)?;
    if solution.status != SolveStatus::Solved {
        for v in check_batch_feasibility(case, cfg)? {
            if !v.feasible {
                return Err(Error::Infeasible {
                    period: v.period,
                    load: v.load,
                    limit: v.limit,
                });
            }
        }
        return Err(Error::Solver {
            status: solution.status,
            pivots: solution.pivots,
        });
    }
    normalize_leasing_prices(&instance, &mut solution);
    Ok(SolvedInstance { instance, solution })
}

/// Where an MDC takes no share of a batch its leasing price is only bounded
/// by the hyperscaler's offer from below and the MDC's reservation value
/// from above. The offer is reported, which keeps every condition satisfied.
fn normalize_leasing_prices(inst: &MlcpInstance, sol: &mut EquilibriumSolution) {
    let lay = &inst.layout;
    let w = inst.lcp.w(&sol.z, &sol.pi);
    let mut changed = false;
    for (row, k) in lay.z_entries(ZBlock::Ks) {
        if sol.z[row] > 0.0 {
            continue;
        }
        let a = lay.pi(PiBlock::Alpha, k).expect("alpha exists for each lease");
        let nu = inst.lcp.n.get(row, a);
        // hyperscaler row value is ν α + rest; make it zero
        let offer = sol.pi[a] - w[row] / nu;
        let kr = lay.z(ZBlock::Kr, k).expect("kr exists for each lease");
        // MDC row moves by +ν (α − offer) and must stay nonnegative
        if w[kr] + nu * (sol.pi[a] - offer) >= -1e-12 {
            sol.pi[a] = offer;
            changed = true;
        }
    }
    if changed {
        sol.residual = inst.lcp.residual(&sol.z, &sol.pi);
    }
}

/// Contracts to conventional load in the market without datacenter load.
pub fn forward_baseline(case: &MarketCase, cfg: &SolverConfig) -> Result<ForwardBaseline> {
    if let Some(Some(contracts)) = case.forward.as_ref().map(|f| f.baseline.as_ref()) {
        return ForwardBaseline::from_contracts(case, contracts);
    }
    let mut base = case.without_batch_load().with_scheme(Scheme::ExPost);
    base.forward = None;
    let s = solve_instance(&base, None, None, cfg)?;
    Ok(ForwardBaseline::from_solution(&s.instance, &s.solution.z))
}

fn baseline_for(case: &MarketCase, cfg: &SolverConfig) -> Result<Option<ForwardBaseline>> {
    match &case.forward {
        Some(f) if f.fraction > 0.0 => Ok(Some(forward_baseline(case, cfg)?)),
        _ => Ok(None),
    }
}

/// Ex post disclosure: one assembly and one solve.
pub fn solve_ex_post(case: &MarketCase, cfg: &SolverConfig) -> Result<(EquilibriumSolution, EquilibriumReport)> {
    let baseline = baseline_for(case, cfg)?;
    solve_ex_post_with(case, baseline.as_ref(), cfg)
}

fn solve_ex_post_with(
    case: &MarketCase,
    baseline: Option<&ForwardBaseline>,
    cfg: &SolverConfig,
) -> Result<(EquilibriumSolution, EquilibriumReport)> {
    let case = case.with_scheme(Scheme::ExPost);
    let s = solve_instance(&case, None, baseline, cfg)?;
    let report = extract_report(&case, &s.instance, &s.solution)?;
    Ok((s.solution, report))
}

/// `ε_it = Σ_j p e_j / Σ_j p`, zero where nothing is purchased.
pub fn mdc_intensities(case: &MarketCase, inst: &MlcpInstance, z: &[f64]) -> IntensityVector {
    let roles = Roles::of(case);
    let mut out = IntensityVector::zeros(case.mdcs.len(), case.periods);
    for (m, &bus) in roles.mdcs.iter().enumerate() {
        for t in 0..case.periods {
            let (mut pe, mut p) = (0.0, 0.0);
            for (j, g) in case.generators.iter().enumerate() {
                let x = z[inst.layout.z(ZBlock::P, Key::gen_bus(j, bus, t)).unwrap()].max(0.0);
                pe += x * g.emission_rate;
                p += x;
            }
            out.values[m * case.periods + t] = if p > 1e-9 { pe / p } else { 0.0 };
        }
    }
    out
}

/// Ex ante disclosure: damped fixed point on the disclosed intensities.
/// Returns the final solve, its report and the number of iterations.
pub fn solve_ex_ante(
    case: &MarketCase,
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Result<(EquilibriumSolution, EquilibriumReport, usize)> {
    let baseline = baseline_for(case, cfg)?;
    solve_ex_ante_with(case, baseline.as_ref(), cfg, fp)
}

fn solve_ex_ante_with(
    case: &MarketCase,
    baseline: Option<&ForwardBaseline>,
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Result<(EquilibriumSolution, EquilibriumReport, usize)> {
    let case = case.with_scheme(Scheme::ExAnte);
    let sigma = fp.damping;
    let mut hat = IntensityVector::zeros(case.mdcs.len(), case.periods);
    let mut trajectory = vec![hat.values.clone()];
    let mut step = f64::INFINITY;
    for it in 1..=fp.max_iterations {
        let s = solve_instance(&case, Some(&hat), baseline, cfg)?;
        let eps = mdc_intensities(&case, &s.instance, &s.solution.z);
        let next = IntensityVector {
            periods: hat.periods,
            values: hat
                .values
                .iter()
                .zip(&eps.values)
                .map(|(h, e)| (1.0 - sigma) * h + sigma * e)
                .collect(),
        };
        step = next.max_abs_diff(&hat);
        trajectory.push(next.values.clone());
        if step <= fp.tolerance {
            let mut report = extract_report(&case, &s.instance, &s.solution)?;
            report.intensities = Some(hat.values.clone());
            report.fixed_point_iterations = Some(it);
            return Ok((s.solution, report, it));
        }
        hat = next;
    }
    Err(Error::NoConvergence {
        iterations: fp.max_iterations,
        last_step: step,
        trajectory,
    })
}

/// Solves under the case's own scheme.
pub fn solve_case(case: &MarketCase, cfg: &SolverConfig, fp: &FixedPointConfig) -> Result<EquilibriumReport> {
    let baseline = baseline_for(case, cfg)?;
    solve_point(case, baseline.as_ref(), cfg, fp)
}

fn solve_point(
    case: &MarketCase,
    baseline: Option<&ForwardBaseline>,
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Result<EquilibriumReport> {
    match case.scheme {
        Scheme::ExPost => solve_ex_post_with(case, baseline, cfg).map(|x| x.1),
        Scheme::ExAnte => solve_ex_ante_with(case, baseline, cfg, fp).map(|x| x.1),
    }
}

/// Independent solves at each δ (run in parallel); errors are kept per point.
pub fn delta_sweep(
    case: &MarketCase,
    deltas: &[f64],
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Vec<Result<EquilibriumReport>> {
    let baseline = match baseline_for(case, cfg) {
        Ok(b) => b,
        Err(e) => {
            let msg = e.to_string();
            return deltas.iter().map(|_| Err(Error::Assembly(msg.clone()))).collect();
        }
    };
    sweep_with(case, deltas, baseline.as_ref(), cfg, fp)
}

fn sweep_with(
    case: &MarketCase,
    deltas: &[f64],
    baseline: Option<&ForwardBaseline>,
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Vec<Result<EquilibriumReport>> {
    deltas
        .par_iter()
        .map(|&d| {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Assembly(format!("delta {d} outside [0, 1]")));
            }
            solve_point(&case.with_delta(d), baseline, cfg, fp)
        })
        .collect()
}

#[derive(Debug)]
pub struct ForwardSweepRow {
    pub fraction: f64,
    pub points: Vec<Result<EquilibriumReport>>,
}

/// δ sweeps for each forward fraction. The baseline (no datacenter load) is
/// solved once; a fraction of zero means no forward bound at all.
pub fn forward_sweep(
    case: &MarketCase,
    fractions: &[f64],
    deltas: &[f64],
    cfg: &SolverConfig,
    fp: &FixedPointConfig,
) -> Result<Vec<ForwardSweepRow>> {
    let mut plain = case.clone();
    plain.forward = None;
    let baseline = if fractions.iter().any(|&f| f > 0.0) {
        Some(forward_baseline(&plain, cfg)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(fractions.len());
    for &f in fractions {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Assembly(format!("forward fraction {f} outside [0, 1]")));
        }
        let mut c = plain.clone();
        if f > 0.0 {
            c.forward = Some(crate::model::ForwardPolicy {
                fraction: f,
                baseline: None,
            });
        }
        rows.push(ForwardSweepRow {
            fraction: f,
            points: sweep_with(&c, deltas, baseline.as_ref(), cfg, fp),
        });
    }
    Ok(rows)
}

/// Aggregates that are unique across equilibria: `H_d d`, `H_g g`, and the
/// demand per consumer bus and period.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAggregates {
    pub hd_d: Vec<f64>,
    pub hg_g: Vec<f64>,
    pub demand: Vec<f64>,
}

pub fn weighted_aggregates(inst: &MlcpInstance, z: &[f64]) -> WeightedAggregates {
    let lay = &inst.layout;
    let block = |rows: std::ops::Range<usize>| -> Vec<f64> {
        rows.clone()
            .map(|r| {
                inst.lcp
                    .m
                    .row(r)
                    .filter(|(c, _)| rows.contains(c))
                    .map(|(c, v)| v * z[c])
                    .sum()
            })
            .collect()
    };
    let mut demand: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for (idx, k) in lay.z_entries(ZBlock::D) {
        *demand.entry((k.bus.unwrap(), k.t)).or_default() += z[idx];
    }
    WeightedAggregates {
        hd_d: block(lay.z_range(ZBlock::D)),
        hg_g: block(lay.z_range(ZBlock::G)),
        demand: demand.into_values().collect(),
    }
}

/// Worst violations of the clearing and balance conditions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClearingAudit {
    /// `|d − g|`, `|p − g|`, `|Σ_b ℓ − g|`
    pub contracts: f64,
    /// `|kˢ − kʳ|`
    pub leases: f64,
    /// `|Σ kˢ + Σ ℓ − q_b|`
    pub workload: f64,
    /// `|Σ kʳ − Σ p + s − Σ g^c|`
    pub mdc_balance: f64,
    /// `max(0, −s, s − Σ g^c)`
    pub spill_bounds: f64,
    /// `|Σ_i y_it|`
    pub injections: f64,
    /// `max(0, |flow| − F)`
    pub flow_limits: f64,
}

impl ClearingAudit {
    pub fn max(&self) -> f64 {
        [
            self.contracts,
            self.leases,
            self.workload,
            self.mdc_balance,
            self.spill_bounds,
            self.injections,
            self.flow_limits,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn audit_clearing(case: &MarketCase, inst: &MlcpInstance, sol: &EquilibriumSolution) -> Result<ClearingAudit> {
    let lay = &inst.layout;
    let (z, pi) = (&sol.z, &sol.pi);
    let roles = Roles::of(case);
    let mut a = ClearingAudit::default();
    let gz = |k: Key| z[lay.z(ZBlock::G, k).unwrap()];
    for (i, k) in lay.z_entries(ZBlock::D) {
        a.contracts = a.contracts.max((z[i] - gz(k)).abs());
    }
    for (i, k) in lay.z_entries(ZBlock::P) {
        a.contracts = a.contracts.max((z[i] - gz(k)).abs());
    }
    if let Some(hb) = roles.hyperscaler {
        for t in 0..case.periods {
            for j in 0..case.generators.len() {
                let l: f64 = (0..roles.batches)
                    .map(|b| z[lay.z(ZBlock::L, Key::batch_gen(b, j, t)).unwrap()])
                    .sum();
                a.contracts = a.contracts.max((l - gz(Key::gen_bus(j, hb, t))).abs());
            }
        }
    }
    for (i, k) in lay.z_entries(ZBlock::Ks) {
        a.leases = a.leases.max((z[i] - z[lay.z(ZBlock::Kr, k).unwrap()]).abs());
    }
    if let Some(h) = &case.hyperscaler {
        for (b, batch) in h.batches.iter().enumerate() {
            for t in 0..case.periods {
                let ks: f64 = lay
                    .z_entries(ZBlock::Ks)
                    .filter(|(_, k)| k.batch == Some(b) && k.t == t)
                    .map(|(i, _)| z[i])
                    .sum();
                let l: f64 = (0..case.generators.len())
                    .map(|j| z[lay.z(ZBlock::L, Key::batch_gen(b, j, t)).unwrap()])
                    .sum();
                a.workload = a.workload.max((ks + l - batch.load).abs());
            }
        }
    }
    for (m, &bus) in roles.mdcs.iter().enumerate() {
        for t in 0..case.periods {
            let kr: f64 = lay
                .z_entries(ZBlock::Kr)
                .filter(|(_, k)| k.bus == Some(bus) && k.t == t)
                .map(|(i, _)| z[i])
                .sum();
            let p: f64 = (0..case.generators.len())
                .map(|j| z[lay.z(ZBlock::P, Key::gen_bus(j, bus, t)).unwrap()])
                .sum();
            let s = z[lay.z(ZBlock::S, Key::bus(bus, t)).unwrap()];
            let gc = case.mdcs[m].curtailed_total(t);
            a.mdc_balance = a.mdc_balance.max((kr - p + s - gc).abs());
            a.spill_bounds = a.spill_bounds.max((-s).max(s - gc)).max(a.spill_bounds);
        }
    }
    let ptdf = compute_ptdf(&case.network)?;
    for t in 0..case.periods {
        let y: Vec<f64> = (0..case.network.buses.len())
            .map(|i| pi[lay.pi(PiBlock::Y, Key::bus(i, t)).unwrap()])
            .collect();
        a.injections = a.injections.max(y.iter().sum::<f64>().abs());
        for (k, l) in case.network.lines.iter().enumerate() {
            let f: f64 = ptdf.row(k).iter().zip(&y).map(|(p, v)| p * v).sum();
            a.flow_limits = a.flow_limits.max(f.abs() - l.limit);
        }
    }
    Ok(a)
}

/// Costs, emissions, prices and congestion of a solved instance.
pub fn extract_report(case: &MarketCase, inst: &MlcpInstance, sol: &EquilibriumSolution) -> Result<EquilibriumReport> {
    let lay = &inst.layout;
    let (z, pi) = (&sol.z, &sol.pi);
    let roles = Roles::of(case);
    let gens = &case.generators;
    let buses = &case.network.buses;
    let nu = case.hyperscaler.as_ref().map_or(1.0, |h| h.gpu_power_factor);

    let mut local_cost = 0.0;
    let mut local_em = 0.0;
    if let Some(hb) = roles.hyperscaler {
        for (i, k) in lay.z_entries(ZBlock::L) {
            let j = k.gen.unwrap();
            let th = pi[lay.pi(PiBlock::ThetaK, Key::gen_bus(j, hb, k.t)).unwrap()];
            local_cost += z[i] * th;
            local_em += z[i] * gens[j].emission_rate;
        }
    }
    let mut mdc_cost = 0.0;
    let mut leasing_prices = Vec::new();
    let batch_id = |b: usize| case.hyperscaler.as_ref().map_or(0, |h| h.batches[b].id);
    for (i, k) in lay.z_entries(ZBlock::Ks) {
        let alpha = pi[lay.pi(PiBlock::Alpha, k).unwrap()];
        mdc_cost += alpha * z[i] * nu;
        leasing_prices.push(LeasingPrice {
            batch: batch_id(k.batch.unwrap()),
            mdc_bus: buses[k.bus.unwrap()].id,
            period: k.t,
            alpha,
            quantity: z[i],
        });
    }

    let mut mdc_em = 0.0;
    let mut mdcs = Vec::new();
    for (m, &bus) in roles.mdcs.iter().enumerate() {
        let (mut p, mut pe, mut pc, mut kr, mut s) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for t in 0..case.periods {
            for (j, g) in gens.iter().enumerate() {
                let k = Key::gen_bus(j, bus, t);
                let x = z[lay.z(ZBlock::P, k).unwrap()];
                p += x;
                pe += x * g.emission_rate;
                pc += x * pi[lay.pi(PiBlock::ThetaX, k).unwrap()];
            }
            s += z[lay.z(ZBlock::S, Key::bus(bus, t)).unwrap()];
        }
        let mut alphas = Vec::new();
        for (i, k) in lay.z_entries(ZBlock::Kr) {
            if k.bus == Some(bus) {
                kr += z[i];
                alphas.push(pi[lay.pi(PiBlock::Alpha, k).unwrap()]);
            }
        }
        mdc_em += pe;
        mdcs.push(MdcReport {
            bus: case.mdcs[m].bus,
            leased: kr,
            purchased: p,
            spilled: s,
            intensity: if p > 1e-9 { 1000.0 * pe / p } else { 0.0 },
            leasing_price: if alphas.is_empty() {
                0.0
            } else {
                alphas.iter().sum::<f64>() / alphas.len() as f64
            },
            avg_procurement_cost: (p > 1e-9).then(|| pc / p),
        });
    }

    let system_em: f64 = lay
        .z_entries(ZBlock::G)
        .map(|(i, k)| z[i] * gens[k.gen.unwrap()].emission_rate)
        .sum();

    let mu1: Vec<f64> = lay.z_range(ZBlock::Mu1).map(|i| z[i]).collect();
    let mu2: Vec<f64> = lay.z_range(ZBlock::Mu2).map(|i| z[i]).collect();
    let congestion = congestion_cost(&case.network.lines, &mu1, &mu2, case.periods);

    let contract = |blk: PiBlock, k: Key| ContractPrice {
        generator: gens[k.gen.unwrap()].id.clone(),
        bus: buses[k.bus.unwrap()].id,
        period: k.t,
        price: pi[lay.pi(blk, k).unwrap()],
        quantity: z[lay.z(ZBlock::G, k).unwrap()],
    };
    let theta_d = lay.pi_keys(PiBlock::ThetaD).iter().map(|k| contract(PiBlock::ThetaD, *k)).collect();
    let theta_x = lay.pi_keys(PiBlock::ThetaX).iter().map(|k| contract(PiBlock::ThetaX, *k)).collect();
    let theta_k = lay.pi_keys(PiBlock::ThetaK).iter().map(|k| contract(PiBlock::ThetaK, *k)).collect();
    let omega = lay
        .pi_entries(PiBlock::Omega)
        .map(|(i, k)| BusValue {
            bus: buses[k.bus.unwrap()].id,
            period: k.t,
            value: pi[i],
        })
        .collect();
    let mut demand: Vec<BusValue> = Vec::new();
    for t in 0..case.periods {
        for &i in &roles.consumers[t] {
            let v: f64 = (0..gens.len())
                .map(|j| z[lay.z(ZBlock::D, Key::gen_bus(j, i, t)).unwrap()])
                .sum();
            demand.push(BusValue {
                bus: buses[i].id,
                period: t,
                value: v,
            });
        }
    }

    Ok(EquilibriumReport {
        case: case.name.clone(),
        scheme: case.scheme,
        delta: case.hyperscaler.as_ref().map_or(1.0, |h| h.delta),
        forward_fraction: case.forward.as_ref().map(|f| f.fraction).filter(|f| *f > 0.0),
        processing_cost_local: local_cost,
        processing_cost_mdc: mdc_cost,
        processing_cost_total: local_cost + mdc_cost,
        emissions_local: local_em,
        emissions_mdc: mdc_em,
        emissions_workload_total: local_em + mdc_em,
        emissions_system: system_em,
        congestion_cost: congestion,
        total_demand: demand.iter().map(|d| d.value).sum(),
        mdcs,
        leasing_prices,
        intensities: None,
        fixed_point_iterations: None,
        pivots: sol.pivots,
        theta_d,
        theta_x,
        theta_k,
        omega,
        demand,
    })
}
