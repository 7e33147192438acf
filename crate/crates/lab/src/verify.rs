//! Cross-checks of the solvers in three phases:
//!
//! * spectrum algebra against a per-unit bitset model;
//! * both solvers against exhaustive search on small random instances;
//! * both solvers against each other over whole simulations.

use std::fmt;

use eonpath::generic::{dominates, Fault, Label};
use eonpath::oracle::{brute_force, random_instance};
use eonpath::{Assignment, FilteredSolver, GenericSolver, SimRng, SlotSet, Window};
use rayon::prelude::*;

use crate::campaign::{CampaignSpec, Cell};
use crate::simulator;
use crate::LabError;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub spectrum_ops: u64,
    pub instances: u64,
    pub instance_vertices: usize,
    pub instance_units: u32,
    pub simulations: CampaignSpec,
    pub fault: Fault,
    pub jobs: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            spectrum_ops: 1_000_000,
            instances: 5000,
            instance_vertices: 8,
            instance_units: 16,
            simulations: CampaignSpec {
                vertices: vec![25, 50, 100],
                graphs: 2,
                units: vec![100, 200],
                fractions: vec![0.1, 0.05],
                seeds: vec![1, 2, 3],
                ..Default::default()
            },
            fault: Fault::None,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseReport {
    pub name: &'static str,
    pub checked: u64,
    /// Disagreements on blocking or cost.
    pub cost_mismatches: u64,
    /// Disagreements on the full result, cost mismatches included.
    pub mismatches: u64,
    pub first_counterexample: Option<String>,
}

impl PhaseReport {
    fn new(name: &'static str) -> Self {
        PhaseReport {
            name,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }

    fn merge(&mut self, other: PhaseReport) {
        self.checked += other.checked;
        self.cost_mismatches += other.cost_mismatches;
        self.mismatches += other.mismatches;
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
        }
    }

    fn record(&mut self, cost_ok: bool, full_ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !cost_ok {
            self.cost_mismatches += 1;
        }
        if !full_ok {
            self.mismatches += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(describe());
            }
        }
    }
}

impl fmt::Display for PhaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<10} checked={} cost_mismatches={} mismatches={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.cost_mismatches,
            self.mismatches
        )?;
        if let Some(c) = &self.first_counterexample {
            write!(f, "\n  first counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub phases: Vec<PhaseReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.phases.iter().all(PhaseReport::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.phases {
            writeln!(f, "{p}")?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| LabError::Config(e.to_string()))?;
    pool.install(|| {
        Ok(VerifyReport {
            phases: vec![
                spectrum_phase(cfg.seed, cfg.spectrum_ops),
                oracle_phase(cfg),
                simulation_phase(cfg)?,
            ],
        })
    })
}

const CHUNK: u64 = 10_000;

fn chunks(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|i| (i, CHUNK.min(total - i * CHUNK)))
        .collect()
}

fn chunk_seed(seed: u64, phase: u64, chunk: u64) -> u64 {
    seed ^ phase.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ chunk.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

// ---- spectrum algebra against bitsets ----

fn to_mask(s: &SlotSet) -> u64 {
    s.spans()
        .iter()
        .flat_map(|sp| sp.lo..sp.hi)
        .fold(0, |m, u| m | 1 << u)
}

fn from_mask(m: u64) -> SlotSet {
    SlotSet::from_spans((0..64).filter(|u| m >> u & 1 == 1).map(|u| (u, u + 1)))
}

fn window_mask(w: Window) -> u64 {
    (w.start..w.end()).fold(0, |m, u| m | 1 << u)
}

fn runs(m: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut u = 0;
    while u < 64 {
        if m >> u & 1 == 1 {
            let lo = u;
            while u < 64 && m >> u & 1 == 1 {
                u += 1;
            }
            out.push((lo, u));
        } else {
            u += 1;
        }
    }
    out
}

fn mask_constrict(m: u64, width: u32) -> u64 {
    runs(m)
        .into_iter()
        .filter(|(lo, hi)| hi - lo >= width)
        .fold(0, |acc, (lo, hi)| {
            acc | window_mask(Window::new(lo, hi - lo))
        })
}

fn mask_fits(m: u64, width: u32) -> Vec<u32> {
    (0..=64u32.saturating_sub(width))
        .filter(|&s| {
            width > 0
                && s + width <= 64
                && m & window_mask(Window::new(s, width)) == window_mask(Window::new(s, width))
        })
        .collect()
}

fn random_mask(rng: &mut SimRng, units: u32) -> u64 {
    let density = rng.unit_f64();
    (0..units)
        .filter(|_| rng.unit_f64() < density)
        .fold(0, |m, u| m | 1 << u)
}

fn spectrum_chunk(seed: u64, ops: u64) -> PhaseReport {
    let mut rng = SimRng::new(seed);
    let mut rep = PhaseReport::new("spectrum");
    for _ in 0..ops {
        let units = rng.range_inclusive(1, 64) as u32;
        let (ma, mb, mc) = (
            random_mask(&mut rng, units),
            random_mask(&mut rng, units),
            random_mask(&mut rng, units),
        );
        let (a, b, c) = (from_mask(ma), from_mask(mb), from_mask(mc));
        let width = rng.range_inclusive(1, units as u64) as u32;
        let start = rng.below((units - width + 1) as u64) as u32;
        let w = Window::new(start, width);
        let op = rng.below(8);
        let ok = match op {
            0 => to_mask(&a.intersect(&b)) == ma & mb,
            1 => to_mask(&a.constrict(width)) == mask_constrict(ma, width),
            2 => to_mask(&a.intersect_constricted(&b, width)) == mask_constrict(ma & mb, width),
            3 => a.contains_window(w) == (ma & window_mask(w) == window_mask(w)),
            4 => {
                let fits = mask_fits(ma, width);
                a.first_fit(width).map(|w| w.start) == fits.first().copied()
                    && a.last_fit(width).map(|w| w.start) == fits.last().copied()
            }
            5 => match a.subtract(w) {
                Ok(s) => {
                    ma & window_mask(w) == window_mask(w) && to_mask(&s) == ma & !window_mask(w)
                }
                Err(_) => ma & window_mask(w) != window_mask(w),
            },
            6 => a.is_superset(&b) == (ma & mb == mb) && a.len() == ma.count_ones(),
            _ => {
                // order laws on a sampled triple
                let reflexive = a.is_superset(&a);
                let antisymmetric = !(a.is_superset(&b) && b.is_superset(&a)) || a == b;
                let transitive = !(a.is_superset(&b) && b.is_superset(&c)) || a.is_superset(&c);
                let costs = [
                    rng.below(4) as f64,
                    rng.below(4) as f64,
                    rng.below(4) as f64,
                ];
                let label = |i: usize, s: &SlotSet| Label {
                    cost: costs[i],
                    omega: s.clone(),
                    vertex: 0,
                };
                let (la, lb, lc) = (label(0, &a), label(1, &b), label(2, &c));
                let dom_reflexive = dominates(&la, &la);
                let dom_transitive =
                    !(dominates(&la, &lb) && dominates(&lb, &lc)) || dominates(&la, &lc);
                reflexive && antisymmetric && transitive && dom_reflexive && dom_transitive
            }
        };
        rep.record(ok, ok, || {
            format!("operation {op} on {a} / {b} / {c} with window {w:?}")
        });
    }
    rep
}

pub fn spectrum_phase(seed: u64, ops: u64) -> PhaseReport {
    chunks(ops)
        .into_par_iter()
        .map(|(i, n)| spectrum_chunk(chunk_seed(seed, 1, i), n))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PhaseReport::new("spectrum"), |mut acc, r| {
            acc.merge(r);
            acc
        })
}

// ---- solvers against exhaustive search ----

fn same_cost(a: &Option<Assignment>, b: &Option<Assignment>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.cost == y.cost,
        _ => false,
    }
}

fn oracle_chunk(cfg: &VerifyConfig, seed: u64, n: u64) -> PhaseReport {
    let mut rng = SimRng::new(seed);
    let mut rep = PhaseReport::new("oracle");
    let mut generic = GenericSolver::with_fault(cfg.fault);
    let mut filtered = FilteredSolver::new();
    for _ in 0..n {
        let inst = random_instance(&mut rng, cfg.instance_vertices, cfg.instance_units);
        let expect = brute_force(&inst.network, &inst.demand, &inst.table)
            .expect("instance within oracle bounds");
        let g = generic.solve(&inst.network, &inst.demand, &inst.table);
        let f = filtered.solve(&inst.network, &inst.demand, &inst.table);
        rep.record(
            same_cost(&g, &expect) && same_cost(&f, &expect),
            g == expect && f == expect,
            || {
                format!(
                    "demand {:?} table {} availability {:?}\n  oracle:   {expect:?}\n  generic:  {g:?}\n  filtered: {f:?}",
                    inst.demand,
                    inst.table,
                    inst.network.availability().iter().map(|s| s.to_string()).collect::<Vec<_>>()
                )
            },
        );
    }
    rep
}

pub fn oracle_phase(cfg: &VerifyConfig) -> PhaseReport {
    chunks(cfg.instances)
        .into_par_iter()
        .map(|(i, n)| oracle_chunk(cfg, chunk_seed(cfg.seed, 2, i), n.min(CHUNK)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PhaseReport::new("oracle"), |mut acc, r| {
            acc.merge(r);
            acc
        })
}

// ---- solvers against each other over simulations ----

fn simulate_cell(spec: &CampaignSpec, cell: &Cell, fault: Fault) -> Result<PhaseReport, LabError> {
    let topo = spec.topology(cell.vertices, cell.graph)?;
    let cfg = spec.sim_config(&topo, cell)?;
    let mut rep = PhaseReport::new("simulation");
    simulator::run_with(&topo, &cfg, GenericSolver::with_fault(fault), |ev| {
        let (g, f) = (ev.generic.unwrap(), ev.filtered.unwrap());
        rep.record(same_cost(g, f), g == f, || {
            format!(
                "topology {} (seed {}) units {} mean {} seed {} call {} demand {:?}\n  generic:  {g:?}\n  filtered: {f:?}",
                cell.topology_name(),
                topo.seed(),
                cell.units,
                cfg.mean_units(),
                cell.seed,
                ev.call_index,
                ev.demand
            )
        });
    })?;
    Ok(rep)
}

pub fn simulation_phase(cfg: &VerifyConfig) -> Result<PhaseReport, LabError> {
    cfg.simulations.validate()?;
    let reports = cfg
        .simulations
        .cells()
        .par_iter()
        .map(|c| simulate_cell(&cfg.simulations, c, cfg.fault))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports
        .into_iter()
        .fold(PhaseReport::new("simulation"), |mut acc, r| {
            acc.merge(r);
            acc
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            spectrum_ops: 20_000,
            instances: 300,
            simulations: CampaignSpec {
                vertices: vec![15],
                graphs: 1,
                units: vec![40],
                fractions: vec![0.1],
                seeds: vec![1, 2],
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn bitset_helpers() {
        assert_eq!(runs(0b0111_0110), [(1, 3), (4, 7)]);
        assert_eq!(mask_constrict(0b0111_0110, 3), 0b0111_0000);
        assert_eq!(mask_fits(0b0111_0110, 2), [1, 4, 5]);
        assert_eq!(to_mask(&from_mask(0xF0F0)), 0xF0F0);
    }

    #[test]
    fn small_run_passes() {
        let r = run(&small()).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.phases[0].checked, 20_000);
        assert_eq!(r.phases[1].checked, 300);
        assert!(r.phases[2].checked > 50);
    }

    #[test]
    fn cost_only_domination_is_caught() {
        let cfg = VerifyConfig {
            fault: Fault::CostOnlyDomination,
            ..small()
        };
        let r = run(&cfg).unwrap();
        assert!(!r.passed());
        assert!(r.phases[1].mismatches > 0, "{r}");
        assert!(r.phases[1].first_counterexample.is_some());
        // pruning a wider label loses feasible routes later in a simulation
        assert!(r.phases[2].cost_mismatches > 0, "{r}");
    }

    #[test]
    fn last_fit_changes_assignments_but_not_costs() {
        let cfg = VerifyConfig {
            fault: Fault::LastFit,
            ..small()
        };
        let r = run(&cfg).unwrap();
        assert!(!r.passed());
        for p in &r.phases[1..] {
            assert_eq!(p.cost_mismatches, 0, "{p}");
            assert!(p.mismatches > 0, "{p}");
        }
    }
}
