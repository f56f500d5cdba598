//! TOML case files.
//!
//! ```toml
//! name = "example"
//! periods = 1                 # optional, default 1
//! scheme = "expost"           # or "exante"
//! reference_bus = 13
//!
//! [[buses]]                   # kind: conventional-load | hyperscaler | mdc | transit
//! id = 1
//! kind = "conventional-load"
//!
//! [[lines]]                   # reactance in p.u., limit in MW
//! id = "1-2"
//! from = 1
//! to = 2
//! reactance = 0.0139
//! limit = 105.0
//!
//! [[generators]]              # marginal cost c0 + c1 g ($/MWh), capacity MW, t/MWh
//! id = "g1"
//! bus = 1
//! c0 = 16.08
//! c1 = 0.0141
//! capacity = 152.0
//! emission_rate = 1.146
//!
//! [demand]                    # either calibrated curves ...
//! curves = [{ bus = 1, b0 = 120.0, b1 = 1.0 }]
//! # ... or fixed loads priced by a least-cost dispatch
//! # elasticity = -0.2
//! # fixed = [{ bus = 1, load = 108.0 }]
//!
//! [hyperscaler]
//! bus = 24
//! delta = 0.5
//! gpu_power_factor = 551.0    # GPU per MW
//! emission_weight = 1000.0    # optional, default 1
//! batches = [{ id = 1, load = 75.0 }]
//!
//! [[mdcs]]
//! bus = 11
//! capacity = 40.0
//! curtailed = [[2.0]]         # [unit][period], MWh
//! admissible_batches = [1]
//!
//! [forward]                   # optional
//! fraction = 0.9
//!
//! [solver]                    # optional overrides
//! pivot_tolerance = 1e-9
//!
//! [fixed_point]               # optional overrides
//! damping = 0.5
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    calibrate_demand, validate_case, Bus, DemandCurve, FixedLoad, ForwardPolicy, Generator, HyperscalerSpec,
    MarketCase, MdcSpec, Scheme,
};
use crate::network::{Line, Network};
use crate::scenario::FixedPointConfig;
use crate::solver::{least_cost_dispatch, SolverConfig};

fn one_period() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<DemandCurve>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<FixedLoad>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elasticity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complementarity_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pivots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicographic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub name: String,
    #[serde(default = "one_period")]
    pub periods: usize,
    #[serde(default)]
    pub scheme: Scheme,
    pub reference_bus: u32,
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub demand: DemandSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperscaler: Option<HyperscalerSpec>,
    #[serde(default)]
    pub mdcs: Vec<MdcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward: Option<ForwardPolicy>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub solver: SolverOverrides,
    #[serde(default, skip_serializing_if = "is_default")]
    pub fixed_point: FixedPointOverrides,
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

impl CaseFile {
    pub fn parse(text: &str) -> Result<CaseFile> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<CaseFile> {
        let text = std::fs::read_to_string(path)?;
        CaseFile::parse(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("case files always serialize")
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        let o = &self.solver;
        if let Some(v) = o.pivot_tolerance {
            c.pivot_tolerance = v;
        }
        if let Some(v) = o.complementarity_tolerance {
            c.complementarity_tolerance = v;
        }
        if o.max_pivots.is_some() {
            c.max_pivots = o.max_pivots;
        }
        if let Some(v) = o.lexicographic {
            c.lexicographic = v;
        }
        if let Some(v) = o.scaling {
            c.scaling = v;
        }
        c
    }

    pub fn fixed_point_config(&self) -> FixedPointConfig {
        let mut c = FixedPointConfig::default();
        let o = &self.fixed_point;
        if let Some(v) = o.damping {
            c.damping = v;
        }
        if let Some(v) = o.tolerance {
            c.tolerance = v;
        }
        if let Some(v) = o.max_iterations {
            c.max_iterations = v;
        }
        c
    }

    /// Builds and validates the market; fixed loads are turned into demand
    /// curves through a least-cost dispatch and the given elasticity.
    pub fn to_case(&self) -> Result<MarketCase> {
        let network = Network {
            buses: self.buses.clone(),
            lines: self.lines.clone(),
            reference_bus: self.reference_bus,
        };
        let mut case = MarketCase {
            name: self.name.clone(),
            network,
            generators: self.generators.clone(),
            demand: Vec::new(),
            hyperscaler: self.hyperscaler.clone(),
            mdcs: self.mdcs.clone(),
            periods: self.periods,
            scheme: self.scheme,
            forward: self.forward.clone(),
        };
        let d = &self.demand;
        match (&d.curves, &d.fixed) {
            (Some(c), None) => {
                if d.elasticity.is_some() {
                    return Err(Error::Parse("demand.elasticity only applies to fixed loads".into()));
                }
                case.demand = c.clone();
            }
            (None, Some(fixed)) => {
                let e = d
                    .elasticity
                    .ok_or_else(|| Error::Parse("demand.fixed needs demand.elasticity".into()))?;
                // validate everything but the (not yet built) curves first
                let v = validate_case(&case);
                if !v.is_empty() {
                    return Err(Error::Invalid(v));
                }
                case.demand = calibrate_from_dispatch(&case, fixed, e, &self.solver_config())?;
            }
            (None, None) => {}
            (Some(_), Some(_)) => {
                return Err(Error::Parse("give either demand.curves or demand.fixed, not both".into()))
            }
        }
        let v = validate_case(&case);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        Ok(case)
    }

    /// Case file holding `case` with its demand curves spelled out.
    pub fn from_case(case: &MarketCase) -> CaseFile {
        CaseFile {
            name: case.name.clone(),
            periods: case.periods,
            scheme: case.scheme,
            reference_bus: case.network.reference_bus,
            buses: case.network.buses.clone(),
            lines: case.network.lines.clone(),
            generators: case.generators.clone(),
            demand: DemandSection {
                curves: Some(case.demand.clone()),
                fixed: None,
                elasticity: None,
            },
            hyperscaler: case.hyperscaler.clone(),
            mdcs: case.mdcs.clone(),
            forward: case.forward.clone(),
            solver: SolverOverrides::default(),
            fixed_point: FixedPointOverrides::default(),
        }
    }
}

/// Prices each fixed load at its bus's least-cost dispatch LMP and fits the
/// demand curve through that point.
pub fn calibrate_from_dispatch(
    case: &MarketCase,
    fixed: &[FixedLoad],
    elasticity: f64,
    cfg: &SolverConfig,
) -> Result<Vec<DemandCurve>> {
    let nb = case.network.buses.len();
    let mut prices = vec![0.0; fixed.len()];
    for t in 0..case.periods {
        let mut loads = vec![0.0; nb];
        for f in fixed.iter().filter(|f| f.period == t) {
            let i = case.bus_index(f.bus).ok_or_else(|| Error::Calibration {
                bus: f.bus,
                period: t,
                reason: "unknown bus".into(),
            })?;
            loads[i] += f.load;
        }
        let r = least_cost_dispatch(&case.network, &case.generators, &loads, cfg)?;
        for (k, f) in fixed.iter().enumerate().filter(|(_, f)| f.period == t) {
            prices[k] = r.lmp[case.bus_index(f.bus).unwrap()];
        }
    }
    calibrate_demand(fixed, &prices, elasticity)
}

/// Reads and builds a case from a file.
pub fn load_case(path: &Path) -> Result<MarketCase> {
    CaseFile::read(path)?.to_case()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXED: &str = r#"
name = "fixed"
reference_bus = 1

[[buses]]
id = 1
kind = "conventional-load"

[[generators]]
id = "g"
bus = 1
c0 = 10.0
c1 = 0.1
capacity = 500.0
emission_rate = 0.5

[demand]
elasticity = -1.0
fixed = [{ bus = 1, load = 100.0 }]

[solver]
max_pivots = 77
lexicographic = false

[fixed_point]
damping = 0.25
"#;

    #[test]
    fn fixed_loads_are_priced_by_dispatch() {
        // dispatch price 10 + 0.1 * 100 = 20; unit elasticity gives b1 = 0.2, b0 = 40
        let c = CaseFile::parse(FIXED).unwrap().to_case().unwrap();
        assert_eq!(c.demand.len(), 1);
        assert!((c.demand[0].b1 - 0.2).abs() < 1e-9);
        assert!((c.demand[0].b0 - 40.0).abs() < 1e-9);
    }

    #[test]
    fn overrides_reach_the_configs() {
        let f = CaseFile::parse(FIXED).unwrap();
        let s = f.solver_config();
        assert_eq!(s.max_pivots, Some(77));
        assert!(!s.lexicographic);
        assert_eq!(s.pivot_tolerance, SolverConfig::default().pivot_tolerance);
        assert_eq!(f.fixed_point_config().damping, 0.25);
        assert_eq!(f.fixed_point_config().max_iterations, 100);
        assert_eq!(f.periods, 1);
    }

    #[test]
    fn demand_section_must_be_unambiguous() {
        let both = FIXED.replace("[demand]", "[demand]\ncurves = [{ bus = 1, b0 = 40.0, b1 = 0.2 }]");
        assert!(matches!(CaseFile::parse(&both).unwrap().to_case(), Err(Error::Parse(_))));
        let no_e = FIXED.replace("elasticity = -1.0\n", "");
        assert!(matches!(CaseFile::parse(&no_e).unwrap().to_case(), Err(Error::Parse(_))));
    }

    #[test]
    fn from_case_spells_out_curves() {
        let c = CaseFile::parse(FIXED).unwrap().to_case().unwrap();
        let f = CaseFile::from_case(&c);
        assert!(f.demand.fixed.is_none());
        assert!(!f.to_toml().contains("[solver]"));
        assert_eq!(CaseFile::parse(&f.to_toml()).unwrap().to_case().unwrap(), c);
    }
}
