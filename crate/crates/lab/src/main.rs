use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eonlab::benchlab::{self, Dimension};
use eonlab::campaign::{self, CampaignSpec, Modulation};
use eonlab::plot::{line_chart, Series};
use eonlab::records::{self, SimMeta};
use eonlab::simulator::{self, Algorithm, Algorithms, Outcome, SimConfig};
use eonlab::verify::{self, VerifyConfig};
use eonlab::{topo_io, LabError};
use eonpath::generic::Fault;
use eonpath::topology::generate_gabriel;
use eonpath::ModulationTable;

/// Routing, modulation and spectrum assignment experiments with Generic
/// Dijkstra and Filtered Graphs.
#[derive(Parser)]
#[command(name = "eonpath", version)]
struct Cli {
    /// Base seed; its meaning depends on the command.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate Gabriel graphs; graph i uses seed SEED + i.
    GenTopo {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run one simulation and write its calls as CSV.
    Simulate {
        #[arg(long)]
        topo: PathBuf,
        #[arg(long)]
        units: u32,
        #[arg(long)]
        mean_demand_frac: f64,
        #[arg(long, default_value_t = 0.6)]
        max_util: f64,
        #[arg(long, value_enum, default_value_t = AlgoArg::Both)]
        algo: AlgoArg,
        #[arg(long, default_value_t = 1000)]
        block_cap: u32,
        #[command(flatten)]
        modulation: ModulationArgs,
    },
    /// Check the spectrum algebra and both solvers.
    Verify {
        #[arg(long, default_value_t = 1_000_000)]
        spectrum_ops: u64,
        #[arg(long, default_value_t = 5000)]
        instances: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
    /// Run a grid of simulations into a directory, skipping finished cells.
    Campaign {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Fit growth models to mean call times.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_dimension)]
        dimension: Dimension,
        #[arg(long, value_enum)]
        algo: SingleAlgo,
    },
    /// Distribution of t_filtered / t_generic over matched calls.
    Cdf {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModulationArgs {
    #[arg(long, default_value_t = 4)]
    mod_levels: u32,
    /// First level reach as a multiple of the longest shortest path.
    #[arg(long, default_value_t = 1.5)]
    mod_reach_factor: f64,
    /// Explicit table `reach:divisor,...`; overrides the two flags above.
    #[arg(long)]
    mod_table: Option<ModulationTable>,
}

impl ModulationArgs {
    fn modulation(&self) -> Modulation {
        match &self.mod_table {
            Some(t) => Modulation::Fixed(t.clone()),
            None => Modulation::Scaled {
                levels: self.mod_levels,
                reach_factor: self.mod_reach_factor,
            },
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
    vertices: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    graphs: usize,
    #[arg(long, value_delimiter = ',', default_value = "100,200")]
    units: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05")]
    fractions: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 0.6)]
    max_util: f64,
    #[arg(long, default_value_t = 1000)]
    block_cap: u32,
    #[command(flatten)]
    modulation: ModulationArgs,
}

impl GridArgs {
    fn spec(&self, topology_seed: u64) -> CampaignSpec {
        CampaignSpec {
            vertices: self.vertices.clone(),
            graphs: self.graphs,
            units: self.units.clone(),
            fractions: self.fractions.clone(),
            seeds: self.seeds.clone(),
            topology_seed,
            modulation: self.modulation.modulation(),
            max_utilization: self.max_util,
            block_cap: self.block_cap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Both,
    Generic,
    Filtered,
}

#[derive(Clone, Copy, ValueEnum)]
enum SingleAlgo {
    Generic,
    Filtered,
}

impl From<SingleAlgo> for Algorithm {
    fn from(a: SingleAlgo) -> Self {
        match a {
            SingleAlgo::Generic => Algorithm::Generic,
            SingleAlgo::Filtered => Algorithm::Filtered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CostOnlyDomination,
    LastFit,
}

fn parse_dimension(s: &str) -> Result<Dimension, String> {
    s.parse().map_err(|e: LabError| e.to_string())
}

enum Failure {
    Mismatch,
    Error(LabError),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Error(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |source| {
        Failure::Error(LabError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn gen_topo(cli: &Cli, vertices: usize, count: usize) -> Result<(), Failure> {
    if vertices < 2 {
        return Err(LabError::Config("--vertices must be at least 2".into()).into());
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    create_dir(&dir)?;
    for i in 0..count {
        let seed = cli.seed.wrapping_add(i as u64);
        let topo = generate_gabriel(vertices, seed).map_err(LabError::from)?;
        let path = dir.join(format!("{}.topo", topo_io::topology_name(vertices, i)));
        topo_io::save(&topo, &path)?;
        println!(
            "{}\tvertices={}\tedges={}\tseed={seed}",
            path.display(),
            topo.vertex_count(),
            topo.edge_count()
        );
    }
    Ok(())
}

fn simulate(cli: &Cli, cmd: &Command) -> Result<(), Failure> {
    let Command::Simulate {
        topo,
        units,
        mean_demand_frac,
        max_util,
        algo,
        block_cap,
        modulation,
    } = cmd
    else {
        unreachable!()
    };
    let t = topo_io::load(topo)?;
    let mut cfg = SimConfig::new(
        *units,
        *mean_demand_frac,
        cli.seed,
        modulation.modulation().table_for(&t)?,
    );
    cfg.max_utilization = *max_util;
    cfg.block_cap = *block_cap;
    cfg.algorithms = match algo {
        AlgoArg::Both => Algorithms::Both,
        AlgoArg::Generic => Algorithms::Only(Algorithm::Generic),
        AlgoArg::Filtered => Algorithms::Only(Algorithm::Filtered),
    };
    let calls = simulator::run(&t, &cfg)?;
    let meta = SimMeta {
        topology: topo
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
        vertices: t.vertex_count() as u32,
        edges: t.edge_count() as u32,
        units: *units,
        mean_demand: cfg.mean_units(),
        seed: cli.seed,
    };
    let rows: Vec<_> = calls.iter().map(|c| meta.row(c)).collect();
    match &cli.out {
        Some(path) => records::save(path, &rows)?,
        None => records::write_rows(io::stdout().lock(), &rows)?,
    }
    let demands = calls.iter().map(|c| c.call_index + 1).max().unwrap_or(0);
    let blocked = calls
        .iter()
        .filter(|c| c.outcome == Outcome::Blocked && c.algorithm == calls[0].algorithm)
        .count();
    let final_util = rows.last().map_or(0.0, |r| r.utilization);
    eprintln!("demands={demands} blocked={blocked} last_utilization={final_util:.4}");
    Ok(())
}

fn run_verify(
    cli: &Cli,
    spectrum_ops: u64,
    instances: u64,
    grid: &GridArgs,
    fault: Option<FaultArg>,
) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        seed: cli.seed,
        spectrum_ops,
        instances,
        simulations: grid.spec(cli.seed),
        fault: match fault {
            None => Fault::None,
            Some(FaultArg::CostOnlyDomination) => Fault::CostOnlyDomination,
            Some(FaultArg::LastFit) => Fault::LastFit,
        },
        jobs: cli.jobs,
        ..VerifyConfig::default()
    };
    let report = verify::run(&cfg)?;
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn run_campaign(cli: &Cli, grid: &GridArgs) -> Result<(), Failure> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("campaign"));
    let spec = grid.spec(cli.seed);
    let report = campaign::run(&spec, &out, cli.jobs)?;
    println!(
        "cells={} ran={} skipped={} failed={} merged_rows={}",
        spec.size(),
        report.ran,
        report.skipped,
        report.failed.len(),
        report.merged_rows
    );
    for (cell, err) in &report.failed {
        eprintln!("failed {cell}: {err}");
    }
    if report.failed.is_empty() {
        Ok(())
    } else {
        Err(LabError::Config(format!(
            "{} cells failed, see {}",
            report.failed.len(),
            out.join(campaign::FAILED_FILE).display()
        ))
        .into())
    }
}

fn fit(cli: &Cli, input: &Path, dimension: Dimension, algo: SingleAlgo) -> Result<(), Failure> {
    let rows = records::load(input)?;
    let fits = benchlab::fit_growth(&rows, dimension, algo.into())?;
    for f in &fits {
        println!("{f}");
    }
    if let Some(path) = &cli.out {
        let mut w = csv::Writer::from_path(path).map_err(LabError::from)?;
        w.write_record(["model", "a", "b", "exponent", "r_squared", "samples"])
            .map_err(LabError::from)?;
        for f in &fits {
            w.write_record([
                f.model.name().to_string(),
                f.coefficients[0].to_string(),
                f.coefficients[1].to_string(),
                f.exponent.map_or_else(String::new, |e| e.to_string()),
                f.r_squared.to_string(),
                f.samples.to_string(),
            ])
            .map_err(LabError::from)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    Ok(())
}

fn cdf(cli: &Cli, input: &Path, plot: Option<&Path>) -> Result<(), Failure> {
    let rows = records::load(input)?;
    let c = benchlab::speedup_cdf(&rows)?;
    let n = c.len();
    let points: Vec<(f64, f64)> = c
        .ratios
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, (i + 1) as f64 / n as f64))
        .collect();
    let summary = format!(
        "calls={n} mean_of_ratios={:.4} ratio_of_means={:.4} median={:.4} p10={:.4} p90={:.4} fraction_faster={:.4}",
        c.mean_of_ratios,
        c.ratio_of_means,
        c.median,
        c.quantile(0.1),
        c.quantile(0.9),
        c.fraction_faster
    );
    let write_csv = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(out, "ratio,cumulative_fraction")?;
        for (r, q) in &points {
            writeln!(out, "{r},{q}")?;
        }
        out.flush()
    };
    match &cli.out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
            write_csv(&mut f).map_err(io_err(path))?;
            println!("{summary}");
        }
        None => {
            write_csv(&mut io::stdout().lock()).map_err(io_err(Path::new("<stdout>")))?;
            eprintln!("{summary}");
        }
    }
    if let Some(path) = plot {
        let svg = line_chart(
            "Filtered Graphs time / Generic Dijkstra time",
            "time ratio",
            "fraction of calls",
            &[Series {
                name: "calls",
                points: &points,
            }],
        );
        fs::write(path, svg).map_err(io_err(path))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::GenTopo { vertices, count } => gen_topo(cli, *vertices, *count),
        cmd @ Command::Simulate { .. } => simulate(cli, cmd),
        Command::Verify {
            spectrum_ops,
            instances,
            grid,
            inject_fault,
        } => run_verify(cli, *spectrum_ops, *instances, grid, *inject_fault),
        Command::Campaign { grid } => run_campaign(cli, grid),
        Command::Fit {
            input,
            dimension,
            algo,
        } => fit(cli, input, *dimension, *algo),
        Command::Cdf { input, plot } => cdf(cli, input, plot.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
