//! A topology together with the per-edge spectrum state.

use alloc::vec::Vec;

use crate::solution::Assignment;
use crate::spectrum::{SlotSet, Window};
use crate::topology::Topology;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    topo: Topology,
    units: u32,
    avail: Vec<SlotSet>,
    used: u64,
}

impl Network {
    /// Every edge starts with all `units` free.
    pub fn new(topo: Topology, units: u32) -> Self {
        let avail = alloc::vec![SlotSet::full(units); topo.edge_count()];
        Network {
            topo,
            units,
            avail,
            used: 0,
        }
    }

    /// Network with explicit per-edge availability, indexed like
    /// `topo.edges()`. Each set is clipped to `[0, units)`.
    pub fn with_availability(
        topo: Topology,
        units: u32,
        avail: Vec<SlotSet>,
    ) -> Result<Self, Error> {
        if avail.len() != topo.edge_count() {
            return Err(Error::DegenerateInput(alloc::format!(
                "{} availability sets for {} edges",
                avail.len(),
                topo.edge_count()
            )));
        }
        let full = SlotSet::full(units);
        let avail: Vec<SlotSet> = avail.iter().map(|a| a.intersect(&full)).collect();
        let free: u64 = avail.iter().map(|a| a.len() as u64).sum();
        let used = topo.edge_count() as u64 * units as u64 - free;
        Ok(Network {
            topo,
            units,
            avail,
            used,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    /// Units per edge.
    pub fn units(&self) -> u32 {
        self.units
    }

    #[inline]
    pub fn avail(&self, edge: u32) -> &SlotSet {
        &self.avail[edge as usize]
    }

    pub fn availability(&self) -> &[SlotSet] {
        &self.avail
    }

    pub fn used_units(&self) -> u64 {
        self.used
    }

    pub fn total_units(&self) -> u64 {
        self.topo.edge_count() as u64 * self.units as u64
    }

    /// Units in use over units on all edges.
    pub fn utilization(&self) -> f64 {
        let total = self.total_units();
        if total == 0 {
            return 0.0;
        }
        self.used as f64 / total as f64
    }

    /// Recounts used units from the availability sets.
    pub fn recount_used(&self) -> u64 {
        self.total_units() - self.avail.iter().map(|a| a.len() as u64).sum::<u64>()
    }

    /// Edge indices along a vertex path.
    pub fn path_edges(&self, path: &[u32]) -> Result<Vec<u32>, Error> {
        path.windows(2)
            .map(|w| {
                self.topo.edge_between(w[0], w[1]).ok_or_else(|| {
                    Error::DegenerateInput(alloc::format!("no edge between {} and {}", w[0], w[1]))
                })
            })
            .collect()
    }

    /// Takes `window` out of every edge of `path`. Nothing changes unless
    /// the window is free on all of them.
    pub fn allocate(&mut self, path: &[u32], window: Window) -> Result<(), Error> {
        let edges = self.path_edges(path)?;
        if edges
            .iter()
            .any(|&e| !self.avail[e as usize].contains_window(window))
        {
            return Err(Error::WindowNotContained {
                start: window.start,
                width: window.width,
            });
        }
        for e in edges {
            self.avail[e as usize].remove_window(window)?;
            self.used += window.width as u64;
        }
        Ok(())
    }

    pub fn apply(&mut self, a: &Assignment) -> Result<(), Error> {
        self.allocate(&a.path, a.window)
    }
}
