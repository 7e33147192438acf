//! Grids of simulations. Each cell writes its own CSV, so an interrupted
//! campaign picks up where it stopped.

use std::fs;
use std::path::{Path, PathBuf};

use eonpath::topology::generate_gabriel;
use eonpath::{ModulationTable, Topology};
use rayon::prelude::*;

use crate::records::{self, CallRow, SimMeta};
use crate::simulator::{self, Algorithms, SimConfig};
use crate::topo_io::{self, topology_name};
use crate::LabError;

/// How each simulation gets its modulation table.
#[derive(Clone, Debug, PartialEq)]
pub enum Modulation {
    /// `levels` levels, the first reaching `reach_factor` times the
    /// longest shortest path of the topology, each next one half as far.
    Scaled {
        levels: u32,
        reach_factor: f64,
    },
    Fixed(ModulationTable),
}

impl Default for Modulation {
    fn default() -> Self {
        Modulation::Scaled {
            levels: 4,
            reach_factor: 1.5,
        }
    }
}

impl Modulation {
    pub fn table_for(&self, topo: &Topology) -> Result<ModulationTable, LabError> {
        match self {
            Modulation::Scaled {
                levels,
                reach_factor,
            } => Ok(ModulationTable::with_reach_factor(
                topo.longest_shortest_path()?,
                *levels,
                *reach_factor,
            )?),
            Modulation::Fixed(t) => Ok(t.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSpec {
    pub vertices: Vec<usize>,
    pub graphs: usize,
    pub units: Vec<u32>,
    pub fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Graph `i` of every size uses seed `topology_seed + i`.
    pub topology_seed: u64,
    pub modulation: Modulation,
    pub max_utilization: f64,
    pub block_cap: u32,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            vertices: vec![25, 50, 100, 200],
            graphs: 2,
            units: vec![100, 200, 400],
            fractions: vec![0.1, 0.05],
            seeds: vec![1, 2, 3],
            topology_seed: 1,
            modulation: Modulation::default(),
            max_utilization: 0.6,
            block_cap: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub vertices: usize,
    pub graph: usize,
    pub units: u32,
    pub fraction: f64,
    pub seed: u64,
}

impl Cell {
    pub fn topology_name(&self) -> String {
        topology_name(self.vertices, self.graph)
    }

    pub fn file_name(&self) -> String {
        format!(
            "{}_S{}_f{}_s{}.csv",
            self.topology_name(),
            self.units,
            self.fraction,
            self.seed
        )
    }
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.vertices.iter().any(|&v| v < 2) {
            return Err(LabError::Config(
                "every graph needs at least 2 vertices".into(),
            ));
        }
        if self.graphs == 0
            || self.vertices.is_empty()
            || self.units.is_empty()
            || self.fractions.is_empty()
            || self.seeds.is_empty()
        {
            return Err(LabError::Config("empty campaign grid".into()));
        }
        Ok(())
    }

    /// The full cross-product, ordered by vertices, graph, units, fraction
    /// and seed.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.size());
        for &vertices in &self.vertices {
            for graph in 0..self.graphs {
                for &units in &self.units {
                    for &fraction in &self.fractions {
                        for &seed in &self.seeds {
                            out.push(Cell {
                                vertices,
                                graph,
                                units,
                                fraction,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
            * self.graphs
            * self.units.len()
            * self.fractions.len()
            * self.seeds.len()
    }

    pub fn topology(&self, vertices: usize, graph: usize) -> Result<Topology, LabError> {
        Ok(generate_gabriel(
            vertices,
            self.topology_seed.wrapping_add(graph as u64),
        )?)
    }

    pub fn sim_config(&self, topo: &Topology, cell: &Cell) -> Result<SimConfig, LabError> {
        let mut cfg = SimConfig::new(
            cell.units,
            cell.fraction,
            cell.seed,
            self.modulation.table_for(topo)?,
        );
        cfg.max_utilization = self.max_utilization;
        cfg.block_cap = self.block_cap;
        cfg.algorithms = Algorithms::Both;
        Ok(cfg)
    }

    /// Simulates one cell on the given topology.
    pub fn run_cell(&self, topo: &Topology, cell: &Cell) -> Result<Vec<CallRow>, LabError> {
        let cfg = self.sim_config(topo, cell)?;
        let meta = SimMeta {
            topology: cell.topology_name(),
            vertices: topo.vertex_count() as u32,
            edges: topo.edge_count() as u32,
            units: cell.units,
            mean_demand: cfg.mean_units(),
            seed: cell.seed,
        };
        Ok(simulator::run(topo, &cfg)?
            .iter()
            .map(|r| meta.row(r))
            .collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignReport {
    pub ran: usize,
    pub skipped: usize,
    pub failed: Vec<(String, String)>,
    pub merged_rows: usize,
}

pub const MERGED_FILE: &str = "calls.csv";
pub const FAILED_FILE: &str = "failed.txt";
pub const TOPOLOGY_DIR: &str = "topologies";
pub const CELL_DIR: &str = "cells";

fn write_atomically(path: &Path, rows: &[CallRow]) -> Result<(), LabError> {
    let tmp = path.with_extension("csv.tmp");
    records::save(&tmp, rows)?;
    fs::rename(&tmp, path).map_err(LabError::io(path))
}

/// Runs every missing cell of `spec` under `out` with `jobs` workers and
/// merges all cell files into `out/calls.csv`.
///
/// Cells whose CSV already exists are not rerun. Failed cells are listed in
/// `out/failed.txt` and left out of the merged file.
pub fn run(spec: &CampaignSpec, out: &Path, jobs: usize) -> Result<CampaignReport, LabError> {
    spec.validate()?;
    let topo_dir = out.join(TOPOLOGY_DIR);
    let cell_dir = out.join(CELL_DIR);
    fs::create_dir_all(&topo_dir).map_err(LabError::io(&topo_dir))?;
    fs::create_dir_all(&cell_dir).map_err(LabError::io(&cell_dir))?;

    let mut topologies = Vec::new();
    for &v in &spec.vertices {
        for g in 0..spec.graphs {
            let topo = spec.topology(v, g)?;
            topo_io::save(
                &topo,
                &topo_dir.join(format!("{}.topo", topology_name(v, g))),
            )?;
            topologies.push(((v, g), topo));
        }
    }
    let topo_of = |c: &Cell| {
        &topologies
            .iter()
            .find(|(k, _)| *k == (c.vertices, c.graph))
            .unwrap()
            .1
    };

    let cells = spec.cells();
    let pending: Vec<&Cell> = cells
        .iter()
        .filter(|c| !cell_dir.join(c.file_name()).exists())
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| LabError::Config(e.to_string()))?;
    let results: Vec<(String, Result<(), LabError>)> = pool.install(|| {
        pending
            .par_iter()
            .map(|c| {
                let path = cell_dir.join(c.file_name());
                let res = spec
                    .run_cell(topo_of(c), c)
                    .and_then(|rows| write_atomically(&path, &rows));
                (c.file_name(), res)
            })
            .collect()
    });

    let mut report = CampaignReport {
        skipped: cells.len() - pending.len(),
        ..Default::default()
    };
    for (name, res) in results {
        match res {
            Ok(()) => report.ran += 1,
            Err(e) => report.failed.push((name, e.to_string())),
        }
    }

    let failed_path = out.join(FAILED_FILE);
    if report.failed.is_empty() {
        if failed_path.exists() {
            fs::remove_file(&failed_path).map_err(LabError::io(&failed_path))?;
        }
    } else {
        let text: String = report
            .failed
            .iter()
            .map(|(n, e)| format!("{n}\t{e}\n"))
            .collect();
        fs::write(&failed_path, text).map_err(LabError::io(&failed_path))?;
    }

    let mut merged = Vec::new();
    for c in &cells {
        let path = cell_dir.join(c.file_name());
        if path.exists() {
            merged.extend(records::load(&path)?);
        }
    }
    report.merged_rows = merged.len();
    write_atomically(&out.join(MERGED_FILE), &merged)?;
    Ok(report)
}

/// Paths of the per-cell files `spec` produces under `out`.
pub fn cell_paths(spec: &CampaignSpec, out: &Path) -> Vec<PathBuf> {
    spec.cells()
        .iter()
        .map(|c| out.join(CELL_DIR).join(c.file_name()))
        .collect()
}
