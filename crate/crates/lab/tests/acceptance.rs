//! End-to-end acceptance checks. One simulation grid is run once and shared
//! by the criteria that need timings; each criterion prints one line and
//! the test fails at the end if any of them failed.

use eonlab::benchlab::{self, Dimension, Model};
use eonlab::campaign::{CampaignSpec, Cell};
use eonlab::records::{CallRow, SimMeta};
use eonlab::simulator::{self, Algorithm};
use eonlab::verify::{self, VerifyConfig};
use eonpath::topo_format::to_text;
use eonpath::topology::gabriel_pair;
use eonpath::Topology;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(name: &'static str, passed: bool, detail: String) -> Outcome {
    println!(
        "{} criterion {name}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    Outcome {
        name,
        passed,
        detail,
    }
}

struct Run {
    cell: Cell,
    rows: Vec<CallRow>,
    calls: u64,
    cost_agree: u64,
    full_agree: u64,
}

fn simulate(spec: &CampaignSpec, topo: &Topology, cell: &Cell) -> Run {
    let cfg = spec.sim_config(topo, cell).unwrap();
    let meta = SimMeta {
        topology: cell.topology_name(),
        vertices: topo.vertex_count() as u32,
        edges: topo.edge_count() as u32,
        units: cell.units,
        mean_demand: cfg.mean_units(),
        seed: cell.seed,
    };
    let (mut calls, mut cost_agree, mut full_agree) = (0, 0, 0);
    let records = simulator::run_observed(topo, &cfg, |ev| {
        let (g, f) = (ev.generic.unwrap(), ev.filtered.unwrap());
        calls += 1;
        let same_cost = match (g, f) {
            (None, None) => true,
            (Some(a), Some(b)) => a.cost == b.cost,
            _ => false,
        };
        cost_agree += same_cost as u64;
        full_agree += (g == f) as u64;
    })
    .unwrap();
    Run {
        cell: cell.clone(),
        rows: records.iter().map(|r| meta.row(r)).collect(),
        calls,
        cost_agree,
        full_agree,
    }
}

fn rows_where(runs: &[Run], keep: impl Fn(&Cell) -> bool) -> Vec<CallRow> {
    runs.iter()
        .filter(|r| keep(&r.cell))
        .flat_map(|r| r.rows.iter().cloned())
        .collect()
}

fn ranked(fits: &[benchlab::FitResult]) -> String {
    fits.iter()
        .map(|f| match f.exponent {
            Some(e) => format!("{}(r2={:.4}, exp={e:.3})", f.model, f.r_squared),
            None => format!("{}(r2={:.4})", f.model, f.r_squared),
        })
        .collect::<Vec<_>>()
        .join(" > ")
}

fn position(fits: &[benchlab::FitResult], m: Model) -> usize {
    fits.iter().position(|f| f.model == m).unwrap()
}

fn gabriel_is_exact(topo: &Topology) -> bool {
    let n = topo.vertex_count();
    let pts = topo.points();
    (0..n).all(|u| {
        (u + 1..n)
            .all(|v| gabriel_pair(pts, u, v) == topo.edge_between(u as u32, v as u32).is_some())
    })
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();

    // 1: both solvers against exhaustive search
    let oracle_cfg = VerifyConfig {
        seed: 0xACCE,
        instances: 6000,
        instance_vertices: 8,
        instance_units: 16,
        ..VerifyConfig::default()
    };
    let p = verify::oracle_phase(&oracle_cfg);
    outcomes.push(report(
        "1 oracle optimality",
        p.checked >= 5000 && p.cost_mismatches == 0 && p.mismatches == 0,
        format!(
            "{} instances, {} cost/blocking disagreements, {} assignment disagreements",
            p.checked, p.cost_mismatches, p.mismatches
        ),
    ));

    // one grid serves criteria 2 to 7
    let base = CampaignSpec {
        vertices: vec![25, 50, 100, 200],
        graphs: 4,
        units: vec![100, 200],
        fractions: vec![0.1, 0.05],
        seeds: vec![1, 2, 3],
        ..Default::default()
    };
    let wide = CampaignSpec {
        vertices: vec![50],
        units: vec![400, 800],
        ..base.clone()
    };
    let mut topologies = Vec::new();
    let mut runs = Vec::new();
    for spec in [&base, &wide] {
        for &v in &spec.vertices {
            for g in 0..spec.graphs {
                let topo = spec.topology(v, g).unwrap();
                for cell in spec
                    .cells()
                    .iter()
                    .filter(|c| c.vertices == v && c.graph == g)
                {
                    runs.push(simulate(spec, &topo, cell));
                }
                if !topologies.iter().any(|(k, _)| *k == (v, g)) {
                    topologies.push(((v, g), topo));
                }
            }
        }
    }

    // 2: cross-solver agreement on the small and medium graphs
    let equiv: Vec<&Run> = runs
        .iter()
        .filter(|r| r.cell.vertices <= 100 && r.cell.units <= 200)
        .collect();
    let calls: u64 = equiv.iter().map(|r| r.calls).sum();
    let cost_agree: u64 = equiv.iter().map(|r| r.cost_agree).sum();
    let full_agree: u64 = equiv.iter().map(|r| r.full_agree).sum();
    outcomes.push(report(
        "2 cross-solver equivalence",
        calls >= 100_000 && cost_agree == calls && full_agree == calls,
        format!("{calls} matched calls, {cost_agree} agree on outcome and cost, {full_agree} on the full assignment"),
    ));

    // 3: speedup over the same calls
    let equiv_rows = rows_where(&runs, |c| c.vertices <= 100 && c.units <= 200);
    let cdf = benchlab::speedup_cdf(&equiv_rows).unwrap();
    outcomes.push(report(
        "3 speedup majority",
        cdf.fraction_faster >= 0.75 && cdf.mean_of_ratios >= 1.5,
        format!(
            "Generic Dijkstra faster on {:.3} of {} calls, mean ratio {:.2}, ratio of means {:.2}, median {:.2}",
            cdf.fraction_faster,
            cdf.len(),
            cdf.mean_of_ratios,
            cdf.ratio_of_means,
            cdf.median
        ),
    ));

    // 4: growth in the number of vertices
    let by_v = rows_where(&runs, |c| c.units <= 200);
    let g = benchlab::fit_growth(&by_v, Dimension::Vertices, Algorithm::Generic).unwrap();
    let f = benchlab::fit_growth(&by_v, Dimension::Vertices, Algorithm::Filtered).unwrap();
    let g_exp = g[position(&g, Model::PowerLaw)].exponent.unwrap();
    let f_exp = f[position(&f, Model::PowerLaw)].exponent.unwrap();
    let generic_ok = g[0].model == Model::PowerLaw && (1.6..=2.4).contains(&g_exp);
    let filtered_ok = f[0].model == Model::NLogN || (0.9..=1.6).contains(&f_exp);
    outcomes.push(report(
        "4 growth in vertices",
        generic_ok && filtered_ok,
        format!("generic: {}; filtered: {}", ranked(&g), ranked(&f)),
    ));

    // 5: growth in the number of units at 50 vertices
    let by_s = rows_where(&runs, |c| c.vertices == 50);
    let g = benchlab::fit_growth(&by_s, Dimension::Units, Algorithm::Generic).unwrap();
    let f = benchlab::fit_growth(&by_s, Dimension::Units, Algorithm::Filtered).unwrap();
    outcomes.push(report(
        "5 growth in units",
        position(&g, Model::Logarithmic) < position(&g, Model::Linear)
            && f[0].model == Model::Linear,
        format!("generic: {}; filtered: {}", ranked(&g), ranked(&f)),
    ));

    // 6: utilization profile on the larger instances
    let large = rows_where(&runs, |c| c.vertices >= 100 && c.units >= 200);
    let gp = benchlab::utilization_profile(&large, Algorithm::Generic).unwrap();
    let fp = benchlab::utilization_profile(&large, Algorithm::Filtered).unwrap();
    let peak = gp.bins[gp.peak];
    let first = gp.bins[0];
    let profile = |p: &benchlab::UtilizationProfile| {
        p.bins
            .iter()
            .map(|b| format!("{:.3}:{:.0}", b.x, b.mean_ns))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcomes.push(report(
        "6 utilization profile",
        (0.15..=0.35).contains(&peak.x) && first.x < 0.05 && peak.mean_ns >= 1.1 * first.mean_ns && fp.slope < 0.0,
        format!(
            "generic peak at {:.3} ({:.2}x the first bin) [{}]; filtered slope {:.1} ns per unit utilization [{}]",
            peak.x,
            peak.mean_ns / first.mean_ns,
            profile(&gp),
            fp.slope,
            profile(&fp)
        ),
    ));

    // 7: every campaign topology is the exact Gabriel graph of its points
    let mut bad = Vec::new();
    for ((v, g), topo) in &topologies {
        let again = base.topology(*v, *g).unwrap();
        let ok = gabriel_is_exact(topo)
            && topo.edge_count() < 3 * topo.vertex_count()
            && to_text(&again) == to_text(topo);
        if !ok {
            bad.push(format!("g{v}_{g}"));
        }
    }
    outcomes.push(report(
        "7 Gabriel generator",
        bad.is_empty(),
        format!(
            "{} topologies checked, failing: {:?}",
            topologies.len(),
            bad
        ),
    ));

    // 8: spectrum algebra and order laws
    let s = verify::spectrum_phase(0x5EC7, 1_000_000);
    outcomes.push(report(
        "8 spectrum algebra",
        s.checked >= 1_000_000 && s.mismatches == 0,
        format!(
            "{} randomized operations, {} disagreements",
            s.checked, s.mismatches
        ),
    ));

    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}: {}", o.name, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
