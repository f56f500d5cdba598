//! Market instance types, validation and demand calibration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BusKind {
    ConventionalLoad,
    Hyperscaler,
    Mdc,
    Transit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: u32,
    pub kind: BusKind,
}

/// A (possibly aggregated) generating unit with affine marginal cost
/// `c0 + c1 * output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: String,
    pub bus: u32,
    pub c0: f64,
    pub c1: f64,
    /// MW
    pub capacity: f64,
    /// t/MWh
    pub emission_rate: f64,
}

/// Affine inverse demand `b0 - b1 * D` of the consumers at one bus and period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandCurve {
    pub bus: u32,
    #[serde(default)]
    pub period: usize,
    pub b0: f64,
    pub b1: f64,
}

impl DemandCurve {
    pub fn marginal_benefit(&self, demand: f64) -> f64 {
        self.b0 - self.b1 * demand
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdcSpec {
    pub bus: u32,
    /// MW of GPU load the facility can host.
    pub capacity: f64,
    /// Curtailed renewable energy available on site, `[unit][period]`, MWh.
    pub curtailed: Vec<Vec<f64>>,
    pub admissible_batches: Vec<u32>,
}

impl MdcSpec {
    pub fn curtailed_total(&self, t: usize) -> f64 {
        self.curtailed.iter().map(|u| u.get(t).copied().unwrap_or(0.0)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Batch {
    pub id: u32,
    /// MWh per period; the same load must be served in every period.
    pub load: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperscalerSpec {
    pub bus: u32,
    pub batches: Vec<Batch>,
    /// Weight on processing cost; `1 - delta` weighs emissions.
    pub delta: f64,
    /// ν, GPUs per MW.
    pub gpu_power_factor: f64,
    /// Dollars per emission unit in the hyperscaler objective. A value of 1000
    /// values emissions per kilogram when rates are given in t/MWh.
    #[serde(default = "one")]
    pub emission_weight: f64,
}

impl HyperscalerSpec {
    pub fn total_load(&self) -> f64 {
        self.batches.iter().map(|b| b.load).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    #[serde(alias = "ex-post")]
    ExPost,
    #[serde(alias = "ex-ante")]
    ExAnte,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ExPost => "expost",
            Scheme::ExAnte => "exante",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "expost" => Ok(Scheme::ExPost),
            "exante" => Ok(Scheme::ExAnte),
            _ => Err(format!("unknown scheme `{s}` (expected expost or exante)")),
        }
    }
}

/// Quantity contracted from one generator to one consumer bus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractQuantity {
    pub generator: String,
    pub bus: u32,
    #[serde(default)]
    pub period: usize,
    pub quantity: f64,
}

/// Lower bounds `g >= fraction * baseline` on supply contracts to
/// conventional load. Without an explicit baseline the scenario engine
/// computes one from the market without datacenter load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardPolicy {
    pub fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Vec<ContractQuantity>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketCase {
    pub name: String,
    pub network: Network,
    pub generators: Vec<Generator>,
    pub demand: Vec<DemandCurve>,
    pub hyperscaler: Option<HyperscalerSpec>,
    pub mdcs: Vec<MdcSpec>,
    pub periods: usize,
    pub scheme: Scheme,
    pub forward: Option<ForwardPolicy>,
}

impl MarketCase {
    pub fn bus_index(&self, id: u32) -> Option<usize> {
        self.network.bus_index(id)
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn demand_curve(&self, bus: u32, t: usize) -> Option<&DemandCurve> {
        self.demand.iter().find(|c| c.bus == bus && c.period == t)
    }

    /// Batch loads summed over the batch set (the same in every period).
    pub fn total_batch_load(&self) -> f64 {
        self.hyperscaler.as_ref().map_or(0.0, HyperscalerSpec::total_load)
    }

    pub fn with_delta(&self, delta: f64) -> MarketCase {
        let mut c = self.clone();
        if let Some(h) = c.hyperscaler.as_mut() {
            h.delta = delta;
        }
        c
    }

    pub fn with_scheme(&self, scheme: Scheme) -> MarketCase {
        MarketCase {
            scheme,
            ..self.clone()
        }
    }

    /// Same market with every batch load set to zero.
    pub fn without_batch_load(&self) -> MarketCase {
        let mut c = self.clone();
        if let Some(h) = c.hyperscaler.as_mut() {
            for b in &mut h.batches {
                b.load = 0.0;
            }
        }
        c
    }
}

/// One failed invariant found by [`validate_case`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

struct Checker(Vec<Violation>);

impl Checker {
    fn check(&mut self, ok: bool, field: impl Into<String>, message: impl FnOnce() -> String) {
        if !ok {
            self.0.push(Violation {
                field: field.into(),
                message: message(),
            });
        }
    }
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Checks every structural invariant of a case. Never fails; an empty list
/// means the case is usable.
pub fn validate_case(case: &MarketCase) -> Vec<Violation> {
    let mut c = Checker(Vec::new());
    let net = &case.network;
    let kind_of: BTreeMap<u32, BusKind> = net.buses.iter().map(|b| (b.id, b.kind)).collect();

    c.check(case.periods >= 1, "periods", || "at least one period is required".into());

    let mut seen = BTreeSet::new();
    for b in &net.buses {
        c.check(seen.insert(b.id), format!("buses[{}]", b.id), || "duplicate bus id".into());
    }
    c.check(kind_of.contains_key(&net.reference_bus), "network.reference_bus", || {
        format!("bus {} does not exist", net.reference_bus)
    });

    for (k, l) in net.lines.iter().enumerate() {
        let f = format!("lines[{k}]");
        c.check(kind_of.contains_key(&l.from), &f, || format!("from bus {} does not exist", l.from));
        c.check(kind_of.contains_key(&l.to), &f, || format!("to bus {} does not exist", l.to));
        c.check(l.from != l.to, &f, || "line connects a bus to itself".into());
        c.check(l.reactance.is_finite() && l.reactance > 0.0, &f, || {
            format!("reactance must be positive, got {}", l.reactance)
        });
        c.check(finite_nonneg(l.limit), &f, || format!("limit must be nonnegative, got {}", l.limit));
    }

    let mut gen_ids = BTreeSet::new();
    for g in &case.generators {
        let f = format!("generators[{}]", g.id);
        c.check(gen_ids.insert(g.id.as_str()), &f, || "duplicate generator id".into());
        c.check(kind_of.contains_key(&g.bus), &f, || format!("bus {} does not exist", g.bus));
        c.check(g.c0.is_finite(), &f, || "c0 must be finite".into());
        c.check(finite_nonneg(g.c1), &f, || format!("c1 must be nonnegative, got {}", g.c1));
        c.check(finite_nonneg(g.capacity), &f, || format!("capacity must be nonnegative, got {}", g.capacity));
        c.check(finite_nonneg(g.emission_rate), &f, || {
            format!("emission rate must be nonnegative, got {}", g.emission_rate)
        });
    }

    let mut curves = BTreeSet::new();
    for d in &case.demand {
        let f = format!("demand[bus {}, t {}]", d.bus, d.period);
        c.check(curves.insert((d.bus, d.period)), &f, || "duplicate demand curve".into());
        match kind_of.get(&d.bus) {
            None => c.check(false, &f, || format!("bus {} does not exist", d.bus)),
            Some(k) => c.check(*k == BusKind::ConventionalLoad, &f, || {
                format!("demand curve on a {k:?} bus")
            }),
        }
        c.check(d.period < case.periods, &f, || format!("period {} out of range", d.period));
        c.check(d.b0.is_finite(), &f, || "b0 must be finite".into());
        c.check(finite_nonneg(d.b1), &f, || format!("b1 must be nonnegative, got {}", d.b1));
    }

    let mdc_buses: BTreeSet<u32> = case.mdcs.iter().map(|m| m.bus).collect();
    let mut batch_ids = BTreeSet::new();
    let hyper_bus = case.hyperscaler.as_ref().map(|h| h.bus);
    if let Some(h) = &case.hyperscaler {
        let f = "hyperscaler";
        if mdc_buses.contains(&h.bus) {
            c.check(false, f, || format!("bus {} hosts both the hyperscaler and an MDC", h.bus));
        } else {
            match kind_of.get(&h.bus) {
                None => c.check(false, f, || format!("bus {} does not exist", h.bus)),
                Some(k) => c.check(*k == BusKind::Hyperscaler, f, || format!("placed on a {k:?} bus")),
            }
        }
        c.check((0.0..=1.0).contains(&h.delta), "hyperscaler.delta", || {
            format!("delta must lie in [0, 1], got {}", h.delta)
        });
        c.check(h.gpu_power_factor.is_finite() && h.gpu_power_factor > 0.0, "hyperscaler.gpu_power_factor", || {
            format!("must be positive, got {}", h.gpu_power_factor)
        });
        c.check(finite_nonneg(h.emission_weight), "hyperscaler.emission_weight", || {
            format!("must be nonnegative, got {}", h.emission_weight)
        });
        for b in &h.batches {
            let f = format!("hyperscaler.batches[{}]", b.id);
            c.check(batch_ids.insert(b.id), &f, || "duplicate batch id".into());
            c.check(finite_nonneg(b.load), &f, || format!("load must be nonnegative, got {}", b.load));
        }
    }
    for b in &net.buses {
        if b.kind == BusKind::Hyperscaler && hyper_bus != Some(b.id) {
            c.check(false, format!("buses[{}]", b.id), || "hyperscaler bus without a hyperscaler".into());
        }
        if b.kind == BusKind::Mdc && !mdc_buses.contains(&b.id) {
            c.check(false, format!("buses[{}]", b.id), || "MDC bus without an MDC".into());
        }
    }

    let mut mdc_seen = BTreeSet::new();
    for m in &case.mdcs {
        let f = format!("mdcs[bus {}]", m.bus);
        c.check(mdc_seen.insert(m.bus), &f, || "more than one MDC on the bus".into());
        if hyper_bus != Some(m.bus) {
            match kind_of.get(&m.bus) {
                None => c.check(false, &f, || format!("bus {} does not exist", m.bus)),
                Some(k) => c.check(*k == BusKind::Mdc, &f, || format!("placed on a {k:?} bus")),
            }
        }
        c.check(finite_nonneg(m.capacity), &f, || format!("capacity must be nonnegative, got {}", m.capacity));
        for (u, series) in m.curtailed.iter().enumerate() {
            c.check(series.len() == case.periods, &f, || {
                format!("curtailed unit {u} has {} periods, expected {}", series.len(), case.periods)
            });
            c.check(series.iter().all(|&x| finite_nonneg(x)), &f, || {
                format!("curtailed unit {u} has a negative entry")
            });
        }
        for b in &m.admissible_batches {
            c.check(batch_ids.contains(b), &f, || format!("admissible batch {b} does not exist"));
        }
    }

    if let Some(fw) = &case.forward {
        c.check((0.0..=1.0).contains(&fw.fraction), "forward.fraction", || {
            format!("fraction must lie in [0, 1], got {}", fw.fraction)
        });
        for q in fw.baseline.iter().flatten() {
            let f = format!("forward.baseline[{} -> {}]", q.generator, q.bus);
            c.check(gen_ids.contains(q.generator.as_str()), &f, || "unknown generator".into());
            c.check(kind_of.get(&q.bus) == Some(&BusKind::ConventionalLoad), &f, || {
                "baseline bus is not a conventional-load bus".into()
            });
            c.check(finite_nonneg(q.quantity), &f, || "quantity must be nonnegative".into());
        }
    }
    c.0
}

/// Fixed load of one bus in one period, MW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedLoad {
    pub bus: u32,
    #[serde(default)]
    pub period: usize,
    pub load: f64,
}

/// Fits affine inverse demand through `(load, price)` with the given point
/// elasticity: `b1 = -P / (e L)`, `b0 = P + b1 L`. `prices[k]` belongs to
/// `loads[k]`. An infinitely negative elasticity gives flat demand at `P`.
pub fn calibrate_demand(loads: &[FixedLoad], prices: &[f64], elasticity: f64) -> Result<Vec<DemandCurve>> {
    if !(elasticity < 0.0) {
        return Err(Error::Calibration {
            bus: loads.first().map_or(0, |l| l.bus),
            period: 0,
            reason: format!("elasticity must be negative, got {elasticity}"),
        });
    }
    if prices.len() != loads.len() {
        return Err(Error::Calibration {
            bus: 0,
            period: 0,
            reason: format!("{} loads but {} prices", loads.len(), prices.len()),
        });
    }
    loads
        .iter()
        .zip(prices)
        .map(|(l, &p)| {
            let fail = |reason: String| Error::Calibration {
                bus: l.bus,
                period: l.period,
                reason,
            };
            if !(l.load > 0.0) {
                return Err(fail(format!("load must be positive, got {}", l.load)));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(fail(format!("price must be positive, got {p}")));
            }
            let b1 = -p / (elasticity * l.load);
            Ok(DemandCurve {
                bus: l.bus,
                period: l.period,
                b0: p + b1 * l.load,
                b1,
            })
        })
        .collect()
}
