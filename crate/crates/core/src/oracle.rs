//! Exhaustive reference solver for small instances.
//!
//! Enumerates every simple path, every modulation level whose reach covers
//! the path, and every window start, using plain bitmasks for spectrum
//! membership. It shares nothing with the solvers beyond the network and
//! table types, which makes it a usable oracle for both.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::modulation::{Level, ModulationTable};
use crate::network::Network;
use crate::rng::SimRng;
use crate::solution::{Assignment, Demand};
use crate::spectrum::{SlotSet, Window};
use crate::topology::{gabriel_graph, random_points, Point, Topology};
use crate::Error;

/// Instances beyond these bounds are rejected.
pub const MAX_UNITS: u32 = 64;
pub const MAX_VERTICES: usize = 16;

fn mask_of(net: &Network, edge: u32) -> u64 {
    net.avail(edge)
        .spans()
        .iter()
        .flat_map(|s| s.lo..s.hi)
        .fold(0u64, |m, u| m | 1u64 << u)
}

fn window_mask(start: u32, width: u32) -> u64 {
    (((1u128 << width) - 1) << start) as u64
}

struct Search<'a> {
    net: &'a Network,
    table: &'a ModulationTable,
    demand: &'a Demand,
    masks: Vec<u64>,
    path: Vec<u32>,
    best: Option<Assignment>,
    paths_seen: u64,
}

impl Search<'_> {
    fn visit(&mut self, v: u32, cost: f64, free: u64, visited: u32) {
        if v == self.demand.dst {
            self.paths_seen += 1;
            self.score(cost, free);
            return;
        }
        let topo = self.net.topology();
        for &(w, e) in topo.neighbors(v) {
            if visited >> w & 1 == 1 {
                continue;
            }
            self.path.push(w);
            self.visit(
                w,
                cost + topo.edge(e).length,
                free & self.masks[e as usize],
                visited | 1 << w,
            );
            self.path.pop();
        }
    }

    fn score(&mut self, cost: f64, free: u64) {
        let units = self.net.units();
        for (i, level) in self.table.levels().iter().enumerate() {
            if cost > level.reach {
                continue;
            }
            let width = self.demand.units.div_ceil(level.divisor);
            if width > units {
                continue;
            }
            for start in 0..=units - width {
                let m = window_mask(start, width);
                if free & m != m {
                    continue;
                }
                let cand = Assignment {
                    path: self.path.clone(),
                    cost,
                    level: i as u8 + 1,
                    window: Window::new(start, width),
                };
                if self
                    .best
                    .as_ref()
                    .is_none_or(|b| cand.preference(b) == Ordering::Less)
                {
                    self.best = Some(cand);
                }
            }
        }
    }
}

/// Best assignment over all (simple path, level, window) triples, or `None`
/// when there is none.
pub fn brute_force(
    net: &Network,
    d: &Demand,
    table: &ModulationTable,
) -> Result<Option<Assignment>, Error> {
    Ok(brute_force_counted(net, d, table)?.0)
}

/// Like [`brute_force`], also returning the number of simple paths visited.
pub fn brute_force_counted(
    net: &Network,
    d: &Demand,
    table: &ModulationTable,
) -> Result<(Option<Assignment>, u64), Error> {
    let n = net.topology().vertex_count();
    if net.units() > MAX_UNITS || n > MAX_VERTICES {
        return Err(Error::DegenerateInput(alloc::format!(
            "oracle handles at most {MAX_VERTICES} vertices and {MAX_UNITS} units"
        )));
    }
    let masks = (0..net.topology().edge_count() as u32)
        .map(|e| mask_of(net, e))
        .collect();
    let mut s = Search {
        net,
        table,
        demand: d,
        masks,
        path: alloc::vec![d.src],
        best: None,
        paths_seen: 0,
    };
    let all = if net.units() == 64 {
        u64::MAX
    } else {
        (1u64 << net.units()) - 1
    };
    s.visit(d.src, 0.0, all, 1 << d.src);
    Ok((s.best, s.paths_seen))
}

/// A small randomized problem for oracle comparisons.
#[derive(Clone, Debug)]
pub struct Instance {
    pub network: Network,
    pub demand: Demand,
    pub table: ModulationTable,
}

/// Random instance with at most `max_vertices` vertices and `max_units`
/// units per edge.
///
/// Half of the instances put points on a 4x4 integer grid with arbitrary
/// edges, so equal-cost paths and costs landing exactly on a reach are
/// common; the other half are Gabriel graphs on uniform points. Edge
/// availability is a random bitmask, demands may exceed the spectrum, and
/// tables have 1 to 4 levels.
pub fn random_instance(rng: &mut SimRng, max_vertices: usize, max_units: u32) -> Instance {
    let max_vertices = max_vertices.clamp(2, 16);
    let max_units = max_units.clamp(1, MAX_UNITS);
    let n = rng.range_inclusive(2, max_vertices as u64) as usize;
    let topo = if rng.below(2) == 0 {
        let mut cells: Vec<u32> = (0..16).collect();
        for i in 0..n {
            let j = i + rng.below((16 - i) as u64) as usize;
            cells.swap(i, j);
        }
        let points = cells[..n]
            .iter()
            .map(|&c| Point::new((c % 4) as f64, (c / 4) as f64))
            .collect();
        let density = 0.2 + 0.7 * rng.unit_f64();
        let mut pairs = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                if rng.unit_f64() < density {
                    pairs.push((u, v));
                }
            }
        }
        Topology::new(points, &pairs).expect("distinct grid points")
    } else {
        loop {
            if let Ok(t) = gabriel_graph(random_points(n, rng)) {
                break t;
            }
        }
    };
    let units = rng.range_inclusive(1, max_units as u64) as u32;
    let density = 0.3 + 0.7 * rng.unit_f64();
    let avail = (0..topo.edge_count())
        .map(|_| {
            SlotSet::from_spans(
                (0..units)
                    .filter(|_| rng.unit_f64() < density)
                    .map(|u| (u, u + 1)),
            )
        })
        .collect();
    // typical path costs: a few units on the grid, below ~2 for Gabriel
    let scale = topo.edges().iter().map(|e| e.length).sum::<f64>().max(1.0);
    let levels = rng.range_inclusive(1, 4) as usize;
    let mut reach = if rng.below(2) == 0 {
        rng.range_inclusive(1, libm::ceil(scale) as u64 + 1) as f64
    } else {
        scale * (0.1 + rng.unit_f64())
    };
    let mut divisor = rng.range_inclusive(1, 2) as u32;
    let mut table = Vec::with_capacity(levels);
    for _ in 0..levels {
        table.push(Level { reach, divisor });
        reach *= 0.3 + 0.6 * rng.unit_f64();
        if rng.below(3) == 0 {
            reach = libm::floor(reach).max(table.last().unwrap().reach * 0.5);
        }
        divisor += rng.range_inclusive(1, 2) as u32;
    }
    let table = ModulationTable::new(table).expect("reaches decrease, divisors increase");
    let src = rng.below(n as u64) as u32;
    let mut dst = rng.below(n as u64 - 1) as u32;
    if dst >= src {
        dst += 1;
    }
    let demand_units = rng.range_inclusive(1, units as u64 + 2) as u32;
    Instance {
        network: Network::with_availability(topo, units, avail).expect("one set per edge"),
        demand: Demand::new(src, dst, demand_units).expect("src != dst"),
        table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn counts_simple_paths_of_a_square() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        let t = Topology::new(pts, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap();
        let net = Network::new(t, 8);
        let table: ModulationTable = "10:1".parse().unwrap();
        let (best, paths) =
            brute_force_counted(&net, &Demand::new(0, 3, 2).unwrap(), &table).unwrap();
        // 0-3, 0-1-3, 0-2-3
        assert_eq!(paths, 3);
        let best = best.unwrap();
        assert_eq!(best.path, [0, 3]);
        assert_eq!(best.window, Window::new(0, 2));
    }

    #[test]
    fn rejects_large_instances() {
        let t = crate::topology::generate_gabriel(20, 1).unwrap();
        let net = Network::new(t, 100);
        let table: ModulationTable = "10:1".parse().unwrap();
        assert!(brute_force(&net, &Demand::new(0, 1, 1).unwrap(), &table).is_err());
    }
}
