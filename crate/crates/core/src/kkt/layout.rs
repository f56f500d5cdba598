//! Flat index map for the nonnegative block `z` and the free block `π`.
//!
//! Blocks appear in the fixed order of [`ZBlock::ALL`] and [`PiBlock::ALL`];
//! within a block, entries are sorted by [`Key`], i.e. lexicographically by
//! (batch, generator, bus, line, period).

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::model::{BusKind, MarketCase};

/// Index tuple of one variable. Positions refer to the case's own lists
/// (batches of the hyperscaler, generators, network buses, network lines).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Key {
    pub batch: Option<usize>,
    pub gen: Option<usize>,
    pub bus: Option<usize>,
    pub line: Option<usize>,
    pub t: usize,
}

impl Key {
    pub const fn t(t: usize) -> Key {
        Key {
            batch: None,
            gen: None,
            bus: None,
            line: None,
            t,
        }
    }

    pub const fn gen(g: usize, t: usize) -> Key {
        Key { gen: Some(g), ..Key::t(t) }
    }

    pub const fn bus(i: usize, t: usize) -> Key {
        Key { bus: Some(i), ..Key::t(t) }
    }

    pub const fn line(k: usize, t: usize) -> Key {
        Key { line: Some(k), ..Key::t(t) }
    }

    pub const fn batch(b: usize, t: usize) -> Key {
        Key { batch: Some(b), ..Key::t(t) }
    }

    pub const fn gen_bus(g: usize, i: usize, t: usize) -> Key {
        Key {
            gen: Some(g),
            bus: Some(i),
            ..Key::t(t)
        }
    }

    pub const fn batch_bus(b: usize, i: usize, t: usize) -> Key {
        Key {
            batch: Some(b),
            bus: Some(i),
            ..Key::t(t)
        }
    }

    pub const fn batch_gen(b: usize, g: usize, t: usize) -> Key {
        Key {
            batch: Some(b),
            gen: Some(g),
            ..Key::t(t)
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(b) = self.batch {
            parts.push(format!("b={b}"));
        }
        if let Some(g) = self.gen {
            parts.push(format!("j={g}"));
        }
        if let Some(i) = self.bus {
            parts.push(format!("i={i}"));
        }
        if let Some(k) = self.line {
            parts.push(format!("k={k}"));
        }
        parts.push(format!("t={}", self.t));
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ZBlock {
    /// consumer purchases per supply contract
    D,
    /// generation per supply contract
    G,
    /// generator capacity price
    Lambda,
    /// lower flow limit price
    Mu1,
    /// upper flow limit price
    Mu2,
    /// MDC purchases per supply contract
    P,
    /// GPU power leased out by MDCs
    Kr,
    /// MDC spillover
    S,
    /// MDC capacity price
    Rho,
    /// spillover limit price
    Upsilon,
    /// GPU power leased in by the hyperscaler
    Ks,
    /// local processing per batch and supplier
    L,
    /// forward-contract floor price
    Beta,
}

impl ZBlock {
    pub const ALL: [ZBlock; 13] = [
        ZBlock::D,
        ZBlock::G,
        ZBlock::Lambda,
        ZBlock::Mu1,
        ZBlock::Mu2,
        ZBlock::P,
        ZBlock::Kr,
        ZBlock::S,
        ZBlock::Rho,
        ZBlock::Upsilon,
        ZBlock::Ks,
        ZBlock::L,
        ZBlock::Beta,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            ZBlock::D => "d",
            ZBlock::G => "g",
            ZBlock::Lambda => "lambda",
            ZBlock::Mu1 => "mu1",
            ZBlock::Mu2 => "mu2",
            ZBlock::P => "p",
            ZBlock::Kr => "kr",
            ZBlock::S => "s",
            ZBlock::Rho => "rho",
            ZBlock::Upsilon => "upsilon",
            ZBlock::Ks => "ks",
            ZBlock::L => "l",
            ZBlock::Beta => "beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PiBlock {
    ThetaD,
    ThetaX,
    ThetaK,
    Omega,
    Alpha,
    Y,
    Gamma,
    Eta,
    Psi,
}

impl PiBlock {
    pub const ALL: [PiBlock; 9] = [
        PiBlock::ThetaD,
        PiBlock::ThetaX,
        PiBlock::ThetaK,
        PiBlock::Omega,
        PiBlock::Alpha,
        PiBlock::Y,
        PiBlock::Gamma,
        PiBlock::Eta,
        PiBlock::Psi,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            PiBlock::ThetaD => "theta_d",
            PiBlock::ThetaX => "theta_x",
            PiBlock::ThetaK => "theta_k",
            PiBlock::Omega => "omega",
            PiBlock::Alpha => "alpha",
            PiBlock::Y => "y",
            PiBlock::Gamma => "gamma",
            PiBlock::Eta => "eta",
            PiBlock::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    start: usize,
    keys: Vec<Key>,
    lookup: HashMap<Key, usize>,
}

impl Block {
    fn new(start: usize, mut keys: Vec<Key>) -> Block {
        keys.sort();
        keys.dedup();
        let lookup = keys.iter().enumerate().map(|(o, k)| (*k, start + o)).collect();
        Block { start, keys, lookup }
    }

    fn range(&self) -> Range<usize> {
        self.start..self.start + self.keys.len()
    }
}

#[derive(Debug, Clone)]
pub struct BlockLayout {
    z: Vec<(ZBlock, Block)>,
    pi: Vec<(PiBlock, Block)>,
    n_z: usize,
    n_pi: usize,
}

/// Bus roles by position, derived once from a case.
#[derive(Debug, Clone)]
pub(crate) struct Roles {
    pub consumers: Vec<Vec<usize>>,
    pub mdcs: Vec<usize>,
    pub hyperscaler: Option<usize>,
    pub batches: usize,
}

impl Roles {
    pub fn of(case: &MarketCase) -> Roles {
        let pos = |id| case.bus_index(id).expect("validated case");
        let consumers = (0..case.periods)
            .map(|t| {
                let mut v: Vec<usize> = case
                    .network
                    .buses
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.kind == BusKind::ConventionalLoad && case.demand_curve(b.id, t).is_some())
                    .map(|(i, _)| i)
                    .collect();
                v.sort_unstable();
                v
            })
            .collect();
        Roles {
            consumers,
            mdcs: case.mdcs.iter().map(|m| pos(m.bus)).collect(),
            hyperscaler: case.hyperscaler.as_ref().map(|h| pos(h.bus)),
            batches: case.hyperscaler.as_ref().map_or(0, |h| h.batches.len()),
        }
    }

    pub fn buyers(&self, t: usize) -> Vec<usize> {
        let mut v = self.consumers[t].clone();
        v.extend(&self.mdcs);
        v.extend(self.hyperscaler);
        v.sort_unstable();
        v
    }

    /// (batch position, MDC bus position) pairs allowed to trade.
    pub fn leases(&self, case: &MarketCase) -> Vec<(usize, usize)> {
        let Some(h) = &case.hyperscaler else { return Vec::new() };
        let mut out = Vec::new();
        for (m, spec) in case.mdcs.iter().enumerate() {
            for (b, batch) in h.batches.iter().enumerate() {
                if spec.admissible_batches.contains(&batch.id) {
                    out.push((b, self.mdcs[m]));
                }
            }
        }
        out
    }
}

/// Builds the deterministic layout of a validated case (without forward
/// bounds; see [`BlockLayout::with_beta`]).
pub fn build_layout(case: &MarketCase) -> BlockLayout {
    let roles = Roles::of(case);
    let n_gen = case.generators.len();
    let n_bus = case.network.buses.len();
    let n_line = case.network.lines.len();
    let periods = 0..case.periods;
    let leases = roles.leases(case);

    let mut zk: Vec<(ZBlock, Vec<Key>)> = Vec::new();
    let mut pk: Vec<(PiBlock, Vec<Key>)> = Vec::new();
    let per_gen = |f: &dyn Fn(usize, usize) -> Vec<Key>| -> Vec<Key> {
        periods.clone().flat_map(|t| (0..n_gen).flat_map(move |g| f(g, t))).collect()
    };

    let d = per_gen(&|g, t| roles.consumers[t].iter().map(|&i| Key::gen_bus(g, i, t)).collect());
    let gk = per_gen(&|g, t| roles.buyers(t).into_iter().map(|i| Key::gen_bus(g, i, t)).collect());
    let lam = per_gen(&|g, t| vec![Key::gen(g, t)]);
    let lines: Vec<Key> = periods.clone().flat_map(|t| (0..n_line).map(move |k| Key::line(k, t))).collect();
    let p = per_gen(&|g, t| roles.mdcs.iter().map(|&i| Key::gen_bus(g, i, t)).collect());
    let leases_t: Vec<Key> = periods
        .clone()
        .flat_map(|t| leases.iter().map(move |&(b, i)| Key::batch_bus(b, i, t)))
        .collect();
    let mdc_t: Vec<Key> = periods.clone().flat_map(|t| roles.mdcs.iter().map(move |&i| Key::bus(i, t))).collect();
    let local: Vec<Key> = if roles.hyperscaler.is_some() {
        periods
            .clone()
            .flat_map(|t| (0..roles.batches).flat_map(move |b| (0..n_gen).map(move |g| Key::batch_gen(b, g, t))))
            .collect()
    } else {
        Vec::new()
    };
    let theta_k = match roles.hyperscaler {
        Some(h) => per_gen(&|g, t| vec![Key::gen_bus(g, h, t)]),
        None => Vec::new(),
    };
    let buses_t: Vec<Key> = periods.clone().flat_map(|t| (0..n_bus).map(move |i| Key::bus(i, t))).collect();
    let batches_t: Vec<Key> = periods.clone().flat_map(|t| (0..roles.batches).map(move |b| Key::batch(b, t))).collect();

    zk.push((ZBlock::D, d.clone()));
    zk.push((ZBlock::G, gk));
    zk.push((ZBlock::Lambda, lam));
    zk.push((ZBlock::Mu1, lines.clone()));
    zk.push((ZBlock::Mu2, lines));
    zk.push((ZBlock::P, p.clone()));
    zk.push((ZBlock::Kr, leases_t.clone()));
    zk.push((ZBlock::S, mdc_t.clone()));
    zk.push((ZBlock::Rho, mdc_t.clone()));
    zk.push((ZBlock::Upsilon, mdc_t.clone()));
    zk.push((ZBlock::Ks, leases_t.clone()));
    zk.push((ZBlock::L, local));
    zk.push((ZBlock::Beta, Vec::new()));

    pk.push((PiBlock::ThetaD, d));
    pk.push((PiBlock::ThetaX, p));
    pk.push((PiBlock::ThetaK, theta_k));
    pk.push((PiBlock::Omega, buses_t.clone()));
    pk.push((PiBlock::Alpha, leases_t));
    pk.push((PiBlock::Y, buses_t));
    pk.push((PiBlock::Gamma, periods.clone().map(Key::t).collect()));
    pk.push((PiBlock::Eta, mdc_t));
    pk.push((PiBlock::Psi, batches_t));

    let mut start = 0;
    let z = zk
        .into_iter()
        .map(|(b, keys)| {
            let blk = Block::new(start, keys);
            start += blk.keys.len();
            (b, blk)
        })
        .collect();
    let n_z = start;
    start = 0;
    let pi = pk
        .into_iter()
        .map(|(b, keys)| {
            let blk = Block::new(start, keys);
            start += blk.keys.len();
            (b, blk)
        })
        .collect();
    BlockLayout { z, pi, n_z, n_pi: start }
}

impl BlockLayout {
    fn zb(&self, b: ZBlock) -> &Block {
        &self.z.iter().find(|(x, _)| *x == b).expect("every block is present").1
    }

    fn pb(&self, b: PiBlock) -> &Block {
        &self.pi.iter().find(|(x, _)| *x == b).expect("every block is present").1
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn n_pi(&self) -> usize {
        self.n_pi
    }

    pub fn z(&self, b: ZBlock, k: Key) -> Option<usize> {
        self.zb(b).lookup.get(&k).copied()
    }

    pub fn pi(&self, b: PiBlock, k: Key) -> Option<usize> {
        self.pb(b).lookup.get(&k).copied()
    }

    pub fn z_range(&self, b: ZBlock) -> Range<usize> {
        self.zb(b).range()
    }

    pub fn pi_range(&self, b: PiBlock) -> Range<usize> {
        self.pb(b).range()
    }

    pub fn z_keys(&self, b: ZBlock) -> &[Key] {
        &self.zb(b).keys
    }

    pub fn pi_keys(&self, b: PiBlock) -> &[Key] {
        &self.pb(b).keys
    }

    /// `(block, key)` pairs with their flat index, in flat order.
    pub fn z_entries(&self, b: ZBlock) -> impl Iterator<Item = (usize, Key)> + '_ {
        let blk = self.zb(b);
        blk.keys.iter().enumerate().map(move |(o, k)| (blk.start + o, *k))
    }

    pub fn pi_entries(&self, b: PiBlock) -> impl Iterator<Item = (usize, Key)> + '_ {
        let blk = self.pb(b);
        blk.keys.iter().enumerate().map(move |(o, k)| (blk.start + o, *k))
    }

    pub fn z_sizes(&self) -> Vec<(ZBlock, usize)> {
        self.z.iter().map(|(b, blk)| (*b, blk.keys.len())).collect()
    }

    pub fn pi_sizes(&self) -> Vec<(PiBlock, usize)> {
        self.pi.iter().map(|(b, blk)| (*b, blk.keys.len())).collect()
    }

    pub fn z_label(&self, idx: usize) -> String {
        for (b, blk) in &self.z {
            if blk.range().contains(&idx) {
                return format!("{}[{}]", b.symbol(), blk.keys[idx - blk.start]);
            }
        }
        format!("z?{idx}")
    }

    pub fn pi_label(&self, idx: usize) -> String {
        for (b, blk) in &self.pi {
            if blk.range().contains(&idx) {
                return format!("{}[{}]", b.symbol(), blk.keys[idx - blk.start]);
            }
        }
        format!("pi?{idx}")
    }

    pub fn has_beta(&self) -> bool {
        !self.zb(ZBlock::Beta).keys.is_empty()
    }

    /// Appends a forward-floor block at the end of `z`; earlier indices are
    /// unchanged.
    pub fn with_beta(&self, keys: Vec<Key>) -> BlockLayout {
        let mut out = self.clone();
        let beta = Block::new(self.n_z, keys);
        out.n_z += beta.keys.len();
        for (b, blk) in out.z.iter_mut() {
            if *b == ZBlock::Beta {
                *blk = beta;
                break;
            }
        }
        out
    }
}
