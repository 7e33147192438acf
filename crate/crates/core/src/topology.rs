//! Undirected geometric graphs and the Gabriel generator.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::rng::SimRng;
use crate::Error;

/// Step between the seeds of successive generation attempts when a sample
/// comes out disconnected.
pub const RETRY_SEED_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

/// Upper bound on disconnected samples before giving up.
pub const MAX_ATTEMPTS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        libm::sqrt(self.dist2(other))
    }
}

/// Undirected edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, x: u32) -> u32 {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Simple undirected graph on points in the plane. Edge lengths are the
/// Euclidean distances between endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    seed: u64,
    points: Vec<Point>,
    edges: Vec<Edge>,
    // CSR adjacency, neighbours sorted by id: (neighbour, edge index)
    offsets: Vec<u32>,
    adjacent: Vec<(u32, u32)>,
}

impl Topology {
    /// Builds a graph from points and vertex pairs. Pairs are normalised to
    /// `u < v` and sorted; self-loops, duplicates, out-of-range ids and
    /// zero-length edges are rejected.
    pub fn new(points: Vec<Point>, pairs: &[(u32, u32)]) -> Result<Self, Error> {
        let n = points.len();
        let mut norm = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a as usize >= n || b as usize >= n {
                return Err(Error::DegenerateInput(format!(
                    "edge ({a},{b}) references a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::DegenerateInput(format!("self-loop at {a}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DegenerateInput(format!(
                "duplicate edge ({},{})",
                w[0].0, w[0].1
            )));
        }
        let mut edges = Vec::with_capacity(norm.len());
        for (u, v) in norm {
            let length = points[u as usize].dist(&points[v as usize]);
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::DegenerateInput(format!(
                    "edge ({u},{v}) has non-positive length"
                )));
            }
            edges.push(Edge { u, v, length });
        }
        let mut degree = vec![0u32; n + 1];
        for e in &edges {
            degree[e.u as usize + 1] += 1;
            degree[e.v as usize + 1] += 1;
        }
        let mut offsets = degree;
        for i in 1..=n {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut adjacent = vec![(0, 0); offsets[n] as usize];
        for (k, e) in edges.iter().enumerate() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                let slot = &mut fill[a as usize];
                adjacent[*slot as usize] = (b, k as u32);
                *slot += 1;
            }
        }
        for v in 0..n {
            adjacent[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        Ok(Topology {
            seed: 0,
            points,
            edges,
            offsets,
            adjacent,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Seed the graph was generated from; 0 for hand-built graphs.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: u32) -> &Edge {
        &self.edges[e as usize]
    }

    /// `(neighbour, edge index)` pairs of `v`, by ascending neighbour.
    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, u32)] {
        let v = v as usize;
        &self.adjacent[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn edge_between(&self, a: u32, b: u32) -> Option<u32> {
        let nb = self.neighbors(a);
        nb.binary_search_by_key(&b, |&(x, _)| x)
            .ok()
            .map(|k| nb[k].1)
    }

    /// Single-source distances; unreachable vertices get `f64::INFINITY`.
    pub fn distances_from(&self, src: u32) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertex_count()];
        let mut heap = BinaryHeap::new();
        dist[src as usize] = 0.0;
        heap.push(Reverse(DistKey(0.0, src)));
        while let Some(Reverse(DistKey(d, v))) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, e) in self.neighbors(v) {
                let nd = d + self.edges[e as usize].length;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(Reverse(DistKey(nd, w)));
                }
            }
        }
        dist
    }

    /// Largest shortest-path distance over all vertex pairs.
    pub fn longest_shortest_path(&self) -> Result<f64, Error> {
        let mut best: f64 = 0.0;
        for s in 0..self.vertex_count() as u32 {
            for d in self.distances_from(s) {
                if d.is_infinite() {
                    return Err(Error::Disconnected);
                }
                best = best.max(d);
            }
        }
        Ok(best)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.distances_from(0).iter().all(|d| d.is_finite())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct DistKey(f64, u32);

impl Eq for DistKey {}

impl PartialOrd for DistKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DistKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Whether `(u, v)` passes the Gabriel test: no third point inside or on
/// the circle with diameter `uv`.
pub fn gabriel_pair(points: &[Point], u: usize, v: usize) -> bool {
    let duv = points[u].dist2(&points[v]);
    points
        .iter()
        .enumerate()
        .all(|(w, p)| w == u || w == v || points[u].dist2(p) + p.dist2(&points[v]) > duv)
}

/// Gabriel graph over the given points.
pub fn gabriel_graph(points: Vec<Point>) -> Result<Topology, Error> {
    let n = points.len();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if gabriel_pair(&points, u, v) {
                pairs.push((u as u32, v as u32));
            }
        }
    }
    Topology::new(points, &pairs)
}

/// `n` points uniform in the unit square, x then y per point.
pub fn random_points(n: usize, rng: &mut SimRng) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let x = rng.unit_f64();
            let y = rng.unit_f64();
            Point::new(x, y)
        })
        .collect()
}

/// Connected Gabriel graph on `n` random points.
///
/// Attempt `k` (from 0) draws its points from seed
/// `seed + k * RETRY_SEED_STEP` (wrapping); the first connected sample wins.
pub fn generate_gabriel(n: usize, seed: u64) -> Result<Topology, Error> {
    if n < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = SimRng::new(seed.wrapping_add(attempt.wrapping_mul(RETRY_SEED_STEP)));
        let topo = match gabriel_graph(random_points(n, &mut rng)) {
            Ok(t) => t,
            // coincident points
            Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        };
        if topo.is_connected() {
            return Ok(topo.with_seed(seed));
        }
    }
    Err(Error::Disconnected)
}
