//! Case builders shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use gridlease::model::{
    Batch, Bus, BusKind, DemandCurve, Generator, HyperscalerSpec, MarketCase, MdcSpec, Scheme,
};
use gridlease::network::{Line, Network};
use rand::Rng;

pub fn bus(id: u32, kind: BusKind) -> Bus {
    Bus { id, kind }
}

pub fn line(from: u32, to: u32, reactance: f64, limit: f64) -> Line {
    Line {
        id: format!("{from}-{to}"),
        from,
        to,
        reactance,
        limit,
    }
}

pub fn gen(id: &str, bus: u32, c0: f64, c1: f64, capacity: f64, emission_rate: f64) -> Generator {
    Generator {
        id: id.into(),
        bus,
        c0,
        c1,
        capacity,
        emission_rate,
    }
}

pub fn curve(bus: u32, b0: f64, b1: f64) -> DemandCurve {
    DemandCurve {
        bus,
        period: 0,
        b0,
        b1,
    }
}

pub fn hyperscaler(bus: u32, loads: &[f64], delta: f64) -> HyperscalerSpec {
    HyperscalerSpec {
        bus,
        batches: loads
            .iter()
            .enumerate()
            .map(|(i, &load)| Batch {
                id: i as u32 + 1,
                load,
            })
            .collect(),
        delta,
        gpu_power_factor: 500.0,
        emission_weight: 50.0,
    }
}

pub fn mdc(bus: u32, capacity: f64, curtailed: f64, admissible: &[u32]) -> MdcSpec {
    MdcSpec {
        bus,
        capacity,
        curtailed: vec![vec![curtailed]],
        admissible_batches: admissible.to_vec(),
    }
}

pub fn case(buses: Vec<Bus>, lines: Vec<Line>, generators: Vec<Generator>, demand: Vec<DemandCurve>) -> MarketCase {
    let reference_bus = buses[0].id;
    MarketCase {
        name: "test".into(),
        network: Network {
            buses,
            lines,
            reference_bus,
        },
        generators,
        demand,
        hyperscaler: None,
        mdcs: Vec::new(),
        periods: 1,
        scheme: Scheme::ExPost,
        forward: None,
    }
}

/// One bus, one generator (c0 = 10, c1 = 0.1), one consumer (b0 = 40,
/// b1 = 0.05), no lines and no datacenters.
pub fn micro(capacity: f64) -> MarketCase {
    case(
        vec![bus(1, BusKind::ConventionalLoad)],
        vec![],
        vec![gen("g1", 1, 10.0, 0.1, capacity, 0.5)],
        vec![curve(1, 40.0, 0.05)],
    )
}

/// The microcase plus a hyperscaler on a second bus behind an ample line.
pub fn micro_with_hyperscaler(load: f64) -> MarketCase {
    let mut c = case(
        vec![bus(1, BusKind::ConventionalLoad), bus(2, BusKind::Hyperscaler)],
        vec![line(1, 2, 0.1, 1000.0)],
        vec![gen("g1", 1, 10.0, 0.1, 500.0, 0.5)],
        vec![curve(1, 40.0, 0.05)],
    );
    c.hyperscaler = Some(hyperscaler(2, &[load], 0.5));
    c
}

/// Options for [`random_case`].
#[derive(Debug, Clone, Copy)]
pub struct RandomOpts {
    pub max_buses: u32,
    pub hyperscaler: bool,
    pub mdcs: bool,
    /// Draw batch loads around the deliverable throughput instead of well
    /// below it.
    pub stress_load: bool,
}

/// Small connected market. Bus 1 is a consumer bus and the reference; the
/// hyperscaler, if any, sits on the last bus and MDCs on the buses before it.
pub fn random_case<R: Rng>(rng: &mut R, o: RandomOpts) -> MarketCase {
    let nb = rng.gen_range(2..=o.max_buses.max(2));
    let mut kinds = vec![BusKind::ConventionalLoad; nb as usize];
    if o.hyperscaler {
        kinds[nb as usize - 1] = BusKind::Hyperscaler;
    }
    let mut mdc_buses = Vec::new();
    if o.mdcs && o.hyperscaler && nb >= 3 {
        let k = rng.gen_range(1..=(nb as usize - 2).min(2));
        for idx in (nb as usize - 1 - k)..(nb as usize - 1) {
            kinds[idx] = BusKind::Mdc;
            mdc_buses.push(idx as u32 + 1);
        }
    }
    let buses: Vec<Bus> = kinds.iter().enumerate().map(|(i, &k)| bus(i as u32 + 1, k)).collect();

    let mut lines = Vec::new();
    for i in 1..nb {
        let from = rng.gen_range(1..=i);
        lines.push(line(from, i + 1, rng.gen_range(0.05..0.3), rng.gen_range(10.0..120.0)));
    }
    if nb >= 3 && rng.gen_bool(0.5) {
        lines.push(line(1, nb, rng.gen_range(0.05..0.3), rng.gen_range(10.0..120.0)));
        lines.last_mut().unwrap().id = format!("1-{nb}b");
    }

    let ng = rng.gen_range(1..=3);
    let generators = (0..ng)
        .map(|j| {
            gen(
                &format!("g{j}"),
                rng.gen_range(1..=nb),
                rng.gen_range(5.0..40.0),
                rng.gen_range(0.0..0.1),
                rng.gen_range(30.0..200.0),
                rng.gen_range(0.0..1.2),
            )
        })
        .collect();

    let demand = buses
        .iter()
        .filter(|b| b.kind == BusKind::ConventionalLoad)
        .map(|b| curve(b.id, rng.gen_range(60.0..150.0), rng.gen_range(0.05..0.5)))
        .collect();

    let mut c = case(buses, lines, generators, demand);
    if o.hyperscaler {
        let nbatch = rng.gen_range(1..=2);
        let hi = if o.stress_load { 150.0 } else { 20.0 };
        let loads: Vec<f64> = (0..nbatch).map(|_| rng.gen_range(1.0..hi)).collect();
        let mut h = hyperscaler(nb, &loads, rng.gen_range(0.0..=1.0));
        h.emission_weight = rng.gen_range(0.0..100.0);
        let ids: Vec<u32> = h.batches.iter().map(|b| b.id).collect();
        c.hyperscaler = Some(h);
        c.mdcs = mdc_buses
            .iter()
            .map(|&b| mdc(b, rng.gen_range(5.0..40.0), rng.gen_range(0.0..10.0), &ids))
            .collect();
    }
    c
}
