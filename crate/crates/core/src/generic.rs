//! Generic Dijkstra.
//!
//! A label is a partial path summarised by its cost and the set of units
//! free on every edge so far (`omega`). Relaxing an edge intersects `omega`
//! with the edge availability and then constricts it, dropping the runs
//! narrower than the width the best modulation usable at the new cost
//! needs. A label is kept only while no other label at the same vertex is
//! at least as cheap with at least as many units.
//!
//! Equal-cost ties follow the preference order of
//! [`Assignment::preference`], so the result is exactly the one the
//! Filtered Graphs search picks:
//!
//! * among labels of equal cost and nested `omega`, the one whose path is
//!   lexicographically smaller survives;
//! * the search drains every label of the optimal cost before answering and
//!   picks the destination label with the lowest first-fit start, then the
//!   smaller path.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::modulation::ModulationTable;
use crate::network::Network;
use crate::solution::{Assignment, Demand};
use crate::spectrum::SlotSet;

/// Cost and usable units of a partial path ending at `vertex`.
#[derive(Clone, Debug, PartialEq)]
pub struct Label {
    pub cost: f64,
    pub omega: SlotSet,
    pub vertex: u32,
}

/// `a` is at least as cheap as `b` and offers every unit `b` offers.
/// Both labels must sit at the same vertex.
pub fn dominates(a: &Label, b: &Label) -> bool {
    debug_assert_eq!(a.vertex, b.vertex);
    a.cost <= b.cost && a.omega.is_superset(&b.omega)
}

/// Deliberate defects for mutation testing of the verification harness.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Domination compares cost only.
    CostOnlyDomination,
    /// Answer with the highest-start window instead of the lowest.
    LastFit,
}

pub type LabelId = u32;
const NO_PARENT: LabelId = LabelId::MAX;

#[derive(Clone, Debug)]
struct Node {
    label: Label,
    parent: LabelId,
    alive: bool,
}

/// Per-vertex antichains of labels under domination, backed by an arena
/// so parent chains stay valid after a label is pruned.
#[derive(Default, Debug)]
pub struct LabelStore {
    nodes: Vec<Node>,
    at: Vec<Vec<LabelId>>,
    touched: Vec<u32>,
    chain_a: Vec<u32>,
    chain_b: Vec<u32>,
    fault: Fault,
}

impl LabelStore {
    pub fn new(vertices: usize) -> Self {
        let mut s = Self::default();
        s.reset(vertices);
        s
    }

    pub fn reset(&mut self, vertices: usize) {
        self.nodes.clear();
        if self.at.len() != vertices {
            self.at.clear();
            self.at.resize_with(vertices, Vec::new);
        } else {
            for &v in &self.touched {
                self.at[v as usize].clear();
            }
        }
        self.touched.clear();
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.nodes[id as usize].label
    }

    pub fn parent(&self, id: LabelId) -> Option<LabelId> {
        let p = self.nodes[id as usize].parent;
        (p != NO_PARENT).then_some(p)
    }

    pub fn is_alive(&self, id: LabelId) -> bool {
        self.nodes[id as usize].alive
    }

    /// Live labels at `v`.
    pub fn labels_at(&self, v: u32) -> &[LabelId] {
        &self.at[v as usize]
    }

    /// Labels ever inserted since the last reset.
    pub fn created(&self) -> usize {
        self.nodes.len()
    }

    /// Vertex sequence from the root to `id`.
    pub fn path(&self, id: LabelId) -> Vec<u32> {
        let mut out = Vec::new();
        self.fill_chain(id, &mut out);
        out.reverse();
        out
    }

    fn fill_chain(&self, mut id: LabelId, out: &mut Vec<u32>) {
        out.clear();
        while id != NO_PARENT {
            out.push(self.nodes[id as usize].label.vertex);
            id = self.nodes[id as usize].parent;
        }
    }

    /// Lexicographic comparison of the paths of two labels.
    fn path_cmp(&mut self, a: LabelId, b: LabelId) -> Ordering {
        let mut ca = core::mem::take(&mut self.chain_a);
        let mut cb = core::mem::take(&mut self.chain_b);
        self.fill_chain(a, &mut ca);
        self.fill_chain(b, &mut cb);
        let ord = ca.iter().rev().cmp(cb.iter().rev());
        self.chain_a = ca;
        self.chain_b = cb;
        ord
    }

    /// Domination with the equal-cost path tie-break.
    fn supersedes(&mut self, a: LabelId, b: LabelId) -> bool {
        let (la, lb) = (&self.nodes[a as usize].label, &self.nodes[b as usize].label);
        if la.cost > lb.cost {
            return false;
        }
        if self.fault != Fault::CostOnlyDomination && !la.omega.is_superset(&lb.omega) {
            return false;
        }
        la.cost < lb.cost || self.path_cmp(a, b) != Ordering::Greater
    }

    /// Stores `cand` unless a live label at its vertex supersedes it, and
    /// prunes the live labels `cand` supersedes.
    pub fn insert_pruned(&mut self, cand: Label, parent: Option<LabelId>) -> Option<LabelId> {
        let v = cand.vertex as usize;
        let id = self.nodes.len() as LabelId;
        self.nodes.push(Node {
            label: cand,
            parent: parent.unwrap_or(NO_PARENT),
            alive: true,
        });
        let mut residents = core::mem::take(&mut self.at[v]);
        if residents.iter().any(|&r| self.supersedes(r, id)) {
            self.at[v] = residents;
            self.nodes.pop();
            return None;
        }
        residents.retain(|&r| {
            let gone = self.supersedes(id, r);
            if gone {
                self.nodes[r as usize].alive = false;
            }
            !gone
        });
        if residents.is_empty() {
            self.touched.push(v as u32);
        }
        residents.push(id);
        self.at[v] = residents;
        Some(id)
    }

    fn set_fault(&mut self, fault: Fault) {
        self.fault = fault;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct QueueKey {
    cost: f64,
    vertex: u32,
    id: LabelId,
}

impl Eq for QueueKey {}

impl PartialOrd for QueueKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.vertex.cmp(&other.vertex))
            .then(self.id.cmp(&other.id))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub labels_created: usize,
    pub labels_popped: usize,
}

/// Reusable search state.
#[derive(Default, Debug)]
pub struct GenericSolver {
    store: LabelStore,
    heap: BinaryHeap<Reverse<QueueKey>>,
    found: Vec<LabelId>,
    stats: SearchStats,
    fault: Fault,
}

impl GenericSolver {
    pub fn new() -> Self {
        Self::default()
    }

    #[doc(hidden)]
    pub fn with_fault(fault: Fault) -> Self {
        let mut s = Self::new();
        s.fault = fault;
        s.store.set_fault(fault);
        s
    }

    /// Counters of the most recent solve.
    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Labels of the most recent solve.
    pub fn store(&self) -> &LabelStore {
        &self.store
    }

    pub fn solve(
        &mut self,
        net: &Network,
        d: &Demand,
        table: &ModulationTable,
    ) -> Option<Assignment> {
        let topo = net.topology();
        self.store.reset(topo.vertex_count());
        self.heap.clear();
        self.found.clear();
        self.stats = SearchStats::default();

        let root_width = table.required_width(d.units, 0.0)?;
        let root_omega = SlotSet::full(net.units()).constrict(root_width);
        if root_omega.is_empty() {
            return None;
        }
        let root = Label {
            cost: 0.0,
            omega: root_omega,
            vertex: d.src,
        };
        let root = self.store.insert_pruned(root, None)?;
        self.heap.push(Reverse(QueueKey {
            cost: 0.0,
            vertex: d.src,
            id: root,
        }));

        let mut best_cost: Option<f64> = None;
        while let Some(Reverse(key)) = self.heap.pop() {
            if best_cost.is_some_and(|c| key.cost > c) {
                break;
            }
            if !self.store.is_alive(key.id) {
                continue;
            }
            self.stats.labels_popped += 1;
            if key.vertex == d.dst {
                best_cost = Some(key.cost);
                self.found.push(key.id);
                continue;
            }
            if best_cost.is_some() {
                // lengths are positive: nothing cheaper can come from here
                continue;
            }
            let back = self
                .store
                .parent(key.id)
                .map(|p| self.store.label(p).vertex);
            for &(next, e) in topo.neighbors(key.vertex) {
                if Some(next) == back {
                    continue;
                }
                let cost = key.cost + topo.edge(e).length;
                let Some(width) = table.required_width(d.units, cost) else {
                    continue;
                };
                let omega = self
                    .store
                    .label(key.id)
                    .omega
                    .intersect_constricted(net.avail(e), width);
                if omega.is_empty() {
                    continue;
                }
                let cand = Label {
                    cost,
                    omega,
                    vertex: next,
                };
                if let Some(id) = self.store.insert_pruned(cand, Some(key.id)) {
                    self.heap.push(Reverse(QueueKey {
                        cost,
                        vertex: next,
                        id,
                    }));
                }
            }
        }
        self.stats.labels_created = self.store.created();

        let cost = best_cost?;
        let level = table.best_level(cost)?;
        let width = table.width_at(level, d.units);
        let found = core::mem::take(&mut self.found);
        let mut best: Option<(LabelId, u32)> = None;
        for &id in &found {
            let omega = &self.store.label(id).omega;
            let window = match self.fault {
                Fault::LastFit => omega.last_fit(width),
                _ => omega.first_fit(width),
            }
            .expect("destination labels hold a window of the required width");
            let better = match best {
                None => true,
                Some((b, start)) => window
                    .start
                    .cmp(&start)
                    .then_with(|| self.store.path_cmp(id, b))
                    .is_lt(),
            };
            if better {
                best = Some((id, window.start));
            }
        }
        self.found = found;
        let (id, start) = best?;
        Some(Assignment {
            path: self.store.path(id),
            cost,
            level,
            window: crate::spectrum::Window::new(start, width),
        })
    }
}

/// One-shot convenience wrapper around [`GenericSolver::solve`].
pub fn solve_generic(net: &Network, d: &Demand, table: &ModulationTable) -> Option<Assignment> {
    GenericSolver::new().solve(net, d, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered::solve_filtered;
    use crate::spectrum::Window;
    use crate::topology::{Point, Topology};
    use alloc::vec;
    use proptest::prelude::*;

    fn lbl(cost: f64, omega: &str) -> Label {
        Label {
            cost,
            omega: omega.parse().unwrap(),
            vertex: 0,
        }
    }

    fn diamond() -> Topology {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, -1.0),
            Point::new(2.0, 0.0),
        ];
        Topology::new(pts, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn dominates_examples() {
        assert!(dominates(&lbl(3.0, "0-10"), &lbl(5.0, "2-6")));
        let (a, b) = (lbl(3.0, "0-4"), lbl(5.0, "6-10"));
        assert!(!dominates(&a, &b) && !dominates(&b, &a));
        assert!(dominates(&a, &a));
    }

    #[test]
    fn store_insert_examples() {
        let mut s = LabelStore::new(1);
        let first = s.insert_pruned(lbl(3.0, "0-10"), None);
        assert!(first.is_some());
        assert_eq!(s.insert_pruned(lbl(4.0, "2-8"), None), None);
        assert_eq!(s.labels_at(0), &[first.unwrap()]);
        let cheaper = s.insert_pruned(lbl(1.0, "0-12"), None).unwrap();
        assert_eq!(s.labels_at(0), &[cheaper]);
        assert!(!s.is_alive(first.unwrap()));
    }

    #[test]
    fn single_edge_matches_filtered() {
        let t = Topology::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], &[(0, 1)]).unwrap();
        let net = Network::new(t, 20);
        let table = ModulationTable::default_for(100.0, 4).unwrap();
        let d = Demand::new(0, 1, 4).unwrap();
        let g = solve_generic(&net, &d, &table).unwrap();
        assert_eq!(Some(g.clone()), solve_filtered(&net, &d, &table));
        assert_eq!(g.window, Window::new(0, 1));
    }

    #[test]
    fn infeasible_at_zero_cost_is_blocked_without_search() {
        let t = Topology::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], &[(0, 1)]).unwrap();
        let net = Network::new(t, 4);
        let table: ModulationTable = "10:1".parse().unwrap();
        let mut s = GenericSolver::new();
        assert_eq!(s.solve(&net, &Demand::new(0, 1, 5).unwrap(), &table), None);
        assert_eq!(s.stats().labels_created, 0);
    }

    #[test]
    fn equal_cost_paths_resolve_like_filtered() {
        // top route offers a superset of the bottom route's units, but the
        // lexicographically smaller path goes through vertex 1 only when
        // its units fit
        let cases = [
            ["0-5", "0-10", "0-10", "0-10"],
            ["0-10", "0-5", "0-10", "0-10"],
            ["3-10", "0-10", "0-10", "0-10"],
            ["0-10", "0-10", "0-10", "0-10"],
        ];
        let table = ModulationTable::default_for(100.0, 2).unwrap();
        for avail in cases {
            let avail = avail.iter().map(|s| s.parse().unwrap()).collect();
            let net = Network::with_availability(diamond(), 10, avail).unwrap();
            for units in 1..=6 {
                let d = Demand::new(0, 3, units).unwrap();
                assert_eq!(
                    solve_generic(&net, &d, &table),
                    solve_filtered(&net, &d, &table)
                );
            }
        }
    }

    #[test]
    fn popped_labels_are_wide_enough() {
        let t = crate::topology::generate_gabriel(30, 2).unwrap();
        let mut rng = crate::rng::SimRng::new(5);
        let avail = (0..t.edge_count())
            .map(|_| {
                SlotSet::from_spans((0..6).map(|_| {
                    let lo = rng.below(40) as u32;
                    (lo, lo + 1 + rng.below(8) as u32)
                }))
            })
            .collect();
        let net = Network::with_availability(t, 40, avail).unwrap();
        let lsp = net.topology().longest_shortest_path().unwrap();
        let table = ModulationTable::default_for(lsp, 4).unwrap();
        let mut s = GenericSolver::new();
        for dst in 1..30 {
            let d = Demand::new(0, dst, 5).unwrap();
            s.solve(&net, &d, &table);
            let store = s.store();
            for id in 0..store.created() as LabelId {
                let l = store.label(id);
                let w = table.required_width(5, l.cost).unwrap();
                assert!(l.omega.spans().iter().all(|sp| sp.width() >= w));
                let path = store.path(id);
                let mut seen = path.clone();
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len(), path.len(), "labels describe simple paths");
            }
        }
    }

    proptest! {
        #[test]
        fn store_stays_an_antichain(ops in proptest::collection::vec((0u8..6, 0u64..u64::MAX), 1..40)) {
            let mut s = LabelStore::new(1);
            for (cost, mask) in ops {
                let omega = SlotSet::from_spans((0..16u32).filter(|u| mask >> u & 1 == 1).map(|u| (u, u + 1)));
                let cand = Label { cost: cost as f64, omega, vertex: 0 };
                s.insert_pruned(cand, None);
                let live = s.labels_at(0).to_vec();
                for &a in &live {
                    for &b in &live {
                        if a != b {
                            prop_assert!(!dominates(s.label(a), s.label(b)));
                        }
                    }
                }
            }
        }

        #[test]
        fn dominates_is_a_preorder(
            c in proptest::collection::vec(0u8..4, 3),
            m in proptest::collection::vec(any::<u16>(), 3),
        ) {
            let labels: Vec<Label> = c.iter().zip(&m).map(|(&c, &m)| Label {
                cost: c as f64,
                omega: SlotSet::from_spans((0..16u32).filter(|u| m >> u & 1 == 1).map(|u| (u, u + 1))),
                vertex: 0,
            }).collect();
            let (a, b, cc) = (&labels[0], &labels[1], &labels[2]);
            prop_assert!(dominates(a, a));
            if dominates(a, b) && dominates(b, a) {
                prop_assert!(a.cost == b.cost && a.omega == b.omega);
            }
            if dominates(a, b) && dominates(b, cc) {
                prop_assert!(dominates(a, cc));
            }
        }
    }
}
