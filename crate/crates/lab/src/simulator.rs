//! Dynamic traffic: demands arrive one after another, are routed, and keep
//! their spectrum for good. The run stops at the target utilization or
//! after too many consecutive blocked demands.

use std::hint::black_box;
use std::time::Instant;

use eonpath::{
    Assignment, Demand, FilteredSolver, GenericSolver, ModulationTable, Network, SimRng, Topology,
    Window,
};
use serde::{Deserialize, Serialize};

use crate::LabError;

/// Salt for the stream of the untimed warm-up demand.
const WARMUP_SALT: u64 = 0xA5A5_5A5A_C3C3_3C3C;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Generic,
    Filtered,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Generic => "generic",
            Algorithm::Filtered => "filtered",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithms {
    Both,
    Only(Algorithm),
}

impl Algorithms {
    pub fn runs(self, a: Algorithm) -> bool {
        match self {
            Algorithms::Both => true,
            Algorithms::Only(x) => x == a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Accepted,
    Blocked,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub units: u32,
    /// Mean demand as a fraction of `units`.
    pub mean_demand_fraction: f64,
    pub seed: u64,
    pub max_utilization: f64,
    pub algorithms: Algorithms,
    /// Stop after this many blocked demands in a row.
    pub block_cap: u32,
    pub table: ModulationTable,
}

impl SimConfig {
    pub fn new(units: u32, mean_demand_fraction: f64, seed: u64, table: ModulationTable) -> Self {
        SimConfig {
            units,
            mean_demand_fraction,
            seed,
            max_utilization: 0.6,
            algorithms: Algorithms::Both,
            block_cap: 1000,
            table,
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.units == 0 {
            return Err(LabError::Config("units must be positive".into()));
        }
        if !(self.mean_demand_fraction > 0.0 && self.mean_demand_fraction < 1.0) {
            return Err(LabError::Config(format!(
                "mean demand fraction {} outside (0, 1)",
                self.mean_demand_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.max_utilization) {
            return Err(LabError::Config(format!(
                "max utilization {} outside [0, 1]",
                self.max_utilization
            )));
        }
        if self.block_cap == 0 {
            return Err(LabError::Config("block cap must be positive".into()));
        }
        Ok(())
    }

    /// Mean demand in units, at least 1.
    pub fn mean_units(&self) -> u32 {
        ((self.mean_demand_fraction * self.units as f64).round() as u32).max(1)
    }
}

/// Uniform source, uniform distinct destination, units uniform on
/// `[1, 2 * mean_units - 1]`.
pub fn next_demand(rng: &mut SimRng, vertices: usize, mean_units: u32) -> Demand {
    assert!(vertices >= 2 && mean_units >= 1);
    let n = vertices as u64;
    let src = rng.below(n) as u32;
    let mut dst = rng.below(n - 1) as u32;
    if dst >= src {
        dst += 1;
    }
    let units = rng.range_inclusive(1, 2 * mean_units as u64 - 1) as u32;
    Demand { src, dst, units }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CallRecord {
    pub call_index: u64,
    /// Utilization when the demand arrived.
    pub utilization: f64,
    pub algorithm: Algorithm,
    pub outcome: Outcome,
    pub cost: Option<f64>,
    pub level: Option<u8>,
    pub window: Option<Window>,
    pub hops: Option<u32>,
    pub elapsed_ns: u64,
}

impl CallRecord {
    fn new(
        call_index: u64,
        utilization: f64,
        algorithm: Algorithm,
        result: &Option<Assignment>,
        elapsed_ns: u64,
    ) -> Self {
        CallRecord {
            call_index,
            utilization,
            algorithm,
            outcome: if result.is_some() {
                Outcome::Accepted
            } else {
                Outcome::Blocked
            },
            cost: result.as_ref().map(|a| a.cost),
            level: result.as_ref().map(|a| a.level),
            window: result.as_ref().map(|a| a.window),
            hops: result.as_ref().map(|a| a.hops() as u32),
            elapsed_ns,
        }
    }
}

/// What an observer sees for each call, before the assignment is applied.
pub struct CallEvent<'a> {
    pub call_index: u64,
    pub utilization: f64,
    pub demand: Demand,
    pub network: &'a Network,
    pub generic: Option<&'a Option<Assignment>>,
    pub filtered: Option<&'a Option<Assignment>>,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = black_box(f());
    (out, start.elapsed().as_nanos() as u64)
}

pub fn run(topo: &Topology, cfg: &SimConfig) -> Result<Vec<CallRecord>, LabError> {
    run_observed(topo, cfg, |_| {})
}

/// Runs the simulation, calling `observe` once per demand.
///
/// With both algorithms configured, each demand is solved by both on the
/// same network state and Generic Dijkstra's assignment is applied. The
/// two calls alternate in order from one demand to the next.
pub fn run_observed<F>(
    topo: &Topology,
    cfg: &SimConfig,
    observe: F,
) -> Result<Vec<CallRecord>, LabError>
where
    F: FnMut(&CallEvent<'_>),
{
    run_with(topo, cfg, GenericSolver::new(), observe)
}

pub(crate) fn run_with<F>(
    topo: &Topology,
    cfg: &SimConfig,
    mut generic: GenericSolver,
    mut observe: F,
) -> Result<Vec<CallRecord>, LabError>
where
    F: FnMut(&CallEvent<'_>),
{
    cfg.validate()?;
    if topo.vertex_count() < 2 || topo.edge_count() == 0 {
        return Err(LabError::Config("topology needs at least one edge".into()));
    }
    let mut net = Network::new(topo.clone(), cfg.units);
    let mut filtered = FilteredSolver::new();
    let mean = cfg.mean_units();
    let run_generic = cfg.algorithms.runs(Algorithm::Generic);
    let run_filtered = cfg.algorithms.runs(Algorithm::Filtered);

    let warm = next_demand(
        &mut SimRng::new(cfg.seed ^ WARMUP_SALT),
        topo.vertex_count(),
        mean,
    );
    if run_generic {
        black_box(generic.solve(&net, &warm, &cfg.table));
    }
    if run_filtered {
        black_box(filtered.solve(&net, &warm, &cfg.table));
    }

    let mut rng = SimRng::new(cfg.seed);
    let mut records = Vec::new();
    let mut consecutive_blocks = 0;
    let mut call_index = 0u64;
    while net.utilization() < cfg.max_utilization && consecutive_blocks < cfg.block_cap {
        let demand = next_demand(&mut rng, topo.vertex_count(), mean);
        let utilization = net.utilization();
        let mut g = None;
        let mut f = None;
        let mut solve_generic = |net: &Network| timed(|| generic.solve(net, &demand, &cfg.table));
        let mut solve_filtered = |net: &Network| timed(|| filtered.solve(net, &demand, &cfg.table));
        if call_index.is_multiple_of(2) {
            if run_generic {
                g = Some(solve_generic(&net));
            }
            if run_filtered {
                f = Some(solve_filtered(&net));
            }
        } else {
            if run_filtered {
                f = Some(solve_filtered(&net));
            }
            if run_generic {
                g = Some(solve_generic(&net));
            }
        }
        observe(&CallEvent {
            call_index,
            utilization,
            demand,
            network: &net,
            generic: g.as_ref().map(|(r, _)| r),
            filtered: f.as_ref().map(|(r, _)| r),
        });
        if let Some((r, ns)) = &g {
            records.push(CallRecord::new(
                call_index,
                utilization,
                Algorithm::Generic,
                r,
                *ns,
            ));
        }
        if let Some((r, ns)) = &f {
            records.push(CallRecord::new(
                call_index,
                utilization,
                Algorithm::Filtered,
                r,
                *ns,
            ));
        }
        let applied = g.or(f).and_then(|(r, _)| r);
        match applied {
            Some(a) => {
                net.apply(&a)?;
                consecutive_blocks = 0;
            }
            None => consecutive_blocks += 1,
        }
        call_index += 1;
    }
    Ok(records)
}
