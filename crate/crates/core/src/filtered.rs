//! Filtered Graphs: for every modulation level and every slot window, run
//! Dijkstra over the edges that can carry that window and keep the best
//! feasible result.
//!
//! Edges are filtered inline: the window check happens when an edge is
//! relaxed, so a run that dies near the source never looks at the rest of
//! the graph.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::modulation::ModulationTable;
use crate::network::Network;
use crate::solution::{Assignment, Demand};
use crate::spectrum::Window;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key {
    dist: f64,
    vertex: u32,
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.vertex.cmp(&other.vertex))
    }
}

/// Reusable buffers for repeated solves on networks of similar size.
#[derive(Default, Debug)]
pub struct FilteredSolver {
    dist: Vec<f64>,
    pred: Vec<u32>,
    settled: Vec<bool>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<Key>>,
    chain_a: Vec<u32>,
    chain_b: Vec<u32>,
    runs: u64,
}

impl FilteredSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Dijkstra runs performed since construction.
    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn solve(
        &mut self,
        net: &Network,
        d: &Demand,
        table: &ModulationTable,
    ) -> Option<Assignment> {
        let units = net.units();
        let mut best: Option<Assignment> = None;
        for level in 1..=table.len() as u8 {
            let width = table.width_at(level, d.units);
            if width > units {
                continue;
            }
            let reach = table.level(level).reach;
            for start in 0..=units - width {
                let window = Window::new(start, width);
                let Some(cost) = self.run(net, d.src, d.dst, window) else {
                    continue;
                };
                if cost > reach {
                    continue;
                }
                let head = best.as_ref().map_or(Ordering::Less, |b| {
                    cost.total_cmp(&b.cost)
                        .then(width.cmp(&b.window.width))
                        .then(start.cmp(&b.window.start))
                });
                if head == Ordering::Greater {
                    continue;
                }
                let cand = Assignment {
                    path: self.path_to(d.dst),
                    cost,
                    level,
                    window,
                };
                if best
                    .as_ref()
                    .is_none_or(|b| cand.preference(b) == Ordering::Less)
                {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// Shortest `src`-`dst` path over the edges whose availability contains
    /// `window`. Among equally short paths the lexicographically smallest
    /// vertex sequence wins.
    pub fn shortest_path(
        &mut self,
        net: &Network,
        src: u32,
        dst: u32,
        window: Window,
    ) -> Option<(f64, Vec<u32>)> {
        self.run(net, src, dst, window)
            .map(|d| (d, self.path_to(dst)))
    }

    fn reset(&mut self, n: usize) {
        if self.dist.len() != n {
            self.dist.clear();
            self.dist.resize(n, f64::INFINITY);
            self.pred.clear();
            self.pred.resize(n, NONE);
            self.settled.clear();
            self.settled.resize(n, false);
        } else {
            for &v in &self.touched {
                self.dist[v as usize] = f64::INFINITY;
                self.pred[v as usize] = NONE;
                self.settled[v as usize] = false;
            }
        }
        self.touched.clear();
        self.heap.clear();
    }

    fn run(&mut self, net: &Network, src: u32, dst: u32, window: Window) -> Option<f64> {
        let topo = net.topology();
        self.reset(topo.vertex_count());
        self.runs += 1;
        self.dist[src as usize] = 0.0;
        self.touched.push(src);
        self.heap.push(Reverse(Key {
            dist: 0.0,
            vertex: src,
        }));
        while let Some(Reverse(Key { dist, vertex: v })) = self.heap.pop() {
            if self.settled[v as usize] {
                continue;
            }
            self.settled[v as usize] = true;
            if v == dst {
                return Some(dist);
            }
            for &(w, e) in topo.neighbors(v) {
                if self.settled[w as usize] || !net.avail(e).contains_window(window) {
                    continue;
                }
                let nd = dist + topo.edge(e).length;
                let cur = self.dist[w as usize];
                if nd < cur {
                    if cur.is_infinite() {
                        self.touched.push(w);
                    }
                    self.dist[w as usize] = nd;
                    self.pred[w as usize] = v;
                    self.heap.push(Reverse(Key {
                        dist: nd,
                        vertex: w,
                    }));
                } else if nd == cur && self.via_is_smaller(v, self.pred[w as usize], w) {
                    self.pred[w as usize] = v;
                }
            }
        }
        None
    }

    /// Whether reaching `target` through `a` gives a lexicographically
    /// smaller vertex sequence than reaching it through `b`.
    fn via_is_smaller(&mut self, a: u32, b: u32, target: u32) -> bool {
        fill_chain(&self.pred, a, &mut self.chain_a);
        fill_chain(&self.pred, b, &mut self.chain_b);
        let end = core::iter::once(&target);
        self.chain_a
            .iter()
            .rev()
            .chain(end.clone())
            .lt(self.chain_b.iter().rev().chain(end))
    }

    fn path_to(&mut self, dst: u32) -> Vec<u32> {
        let mut path = Vec::new();
        fill_chain(&self.pred, dst, &mut path);
        path.reverse();
        path
    }
}

/// `v`, pred(v), pred(pred(v)), ... back to the source.
fn fill_chain(pred: &[u32], mut v: u32, out: &mut Vec<u32>) {
    out.clear();
    while v != NONE {
        out.push(v);
        v = pred[v as usize];
    }
}

/// One-shot convenience wrapper around [`FilteredSolver::solve`].
pub fn solve_filtered(net: &Network, d: &Demand, table: &ModulationTable) -> Option<Assignment> {
    FilteredSolver::new().solve(net, d, table)
}
