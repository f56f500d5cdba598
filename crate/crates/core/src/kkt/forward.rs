use std::collections::BTreeMap;

use super::assemble::MlcpInstance;
use super::layout::{Key, ZBlock};
use crate::error::{Error, Result};
use crate::model::{ContractQuantity, MarketCase};

/// Baseline supply contracts `g*` to conventional load, keyed by
/// (generator, bus, period) positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForwardBaseline {
    pub quantities: BTreeMap<(usize, usize, usize), f64>,
}

impl ForwardBaseline {
    /// Reads the consumer contracts out of a solved baseline `z`.
    pub fn from_solution(instance: &MlcpInstance, z: &[f64]) -> ForwardBaseline {
        let quantities = instance
            .layout
            .z_entries(ZBlock::D)
            .map(|(_, k)| {
                let g = instance.layout.z(ZBlock::G, k).expect("every d has a g");
                ((k.gen.unwrap(), k.bus.unwrap(), k.t), z[g].max(0.0))
            })
            .collect();
        ForwardBaseline { quantities }
    }

    pub fn from_contracts(case: &MarketCase, contracts: &[ContractQuantity]) -> Result<ForwardBaseline> {
        let mut quantities = BTreeMap::new();
        for c in contracts {
            let j = case
                .generator_index(&c.generator)
                .ok_or_else(|| Error::Assembly(format!("unknown generator {}", c.generator)))?;
            let i = case
                .bus_index(c.bus)
                .ok_or_else(|| Error::Assembly(format!("unknown bus {}", c.bus)))?;
            quantities.insert((j, i, c.period), c.quantity);
        }
        Ok(ForwardBaseline { quantities })
    }

    pub fn to_contracts(&self, case: &MarketCase) -> Vec<ContractQuantity> {
        self.quantities
            .iter()
            .map(|(&(j, i, t), &q)| ContractQuantity {
                generator: case.generators[j].id.clone(),
                bus: case.network.buses[i].id,
                period: t,
                quantity: q,
            })
            .collect()
    }
}

/// Adds `g >= fraction * g*` for every supply contract to conventional load.
/// A nonnegative multiplier block β is appended to `z`; it enters the
/// producer rows with coefficient −1.
pub fn apply_forward_bounds(
    instance: &MlcpInstance,
    case: &MarketCase,
    baseline: &ForwardBaseline,
    fraction: f64,
) -> Result<MlcpInstance> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Assembly(format!("forward fraction {fraction} outside [0, 1]")));
    }
    if instance.layout.has_beta() {
        return Err(Error::Assembly("forward bounds are already applied".into()));
    }
    let keys: Vec<Key> = instance.layout.z_keys(ZBlock::D).to_vec();
    let mut floors = Vec::with_capacity(keys.len());
    for k in &keys {
        let (j, i, t) = (k.gen.unwrap(), k.bus.unwrap(), k.t);
        let q = baseline
            .quantities
            .get(&(j, i, t))
            .ok_or_else(|| Error::MissingBaseline {
                generator: case.generators[j].id.clone(),
                bus: case.network.buses[i].id,
                period: t,
            })?;
        floors.push(fraction * q);
    }

    let layout = instance.layout.with_beta(keys.clone());
    let (nz, np) = (layout.n_z(), layout.n_pi());
    let mut extra = Vec::with_capacity(2 * keys.len());
    let mut q = instance.lcp.q.clone();
    for (k, floor) in keys.iter().zip(floors) {
        let b = layout.z(ZBlock::Beta, *k).unwrap();
        let g = layout.z(ZBlock::G, *k).unwrap();
        extra.push((g, b, -1.0));
        extra.push((b, g, 1.0));
        q.push(-floor);
        debug_assert_eq!(q.len() - 1, b);
    }
    let mut lcp = instance.lcp.clone();
    lcp.m = lcp.m.resized(nz, nz, &extra);
    lcp.n = lcp.n.resized(nz, np, &[]);
    lcp.q = q;
    Ok(MlcpInstance {
        lcp,
        layout,
        scheme: instance.scheme,
        delta_eff: instance.delta_eff,
    })
}
