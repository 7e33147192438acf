use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eonpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eonpath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_topo_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = eonpath(&[
            "gen-topo",
            "--vertices",
            "25",
            "--count",
            "2",
            "--seed",
            "7",
            "--out",
            p(out),
        ]);
        assert!(o.status.success(), "{o:?}");
    }
    for name in ["g25_0.topo", "g25_1.topo"] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap());
    }
    let first = fs::read_to_string(a.join("g25_0.topo")).unwrap();
    let second = fs::read_to_string(a.join("g25_1.topo")).unwrap();
    assert!(first.starts_with("gabriel v=25 seed=7\n"));
    assert!(second.starts_with("gabriel v=25 seed=8\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        eonpath(&["gen-topo", "--vertices", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(eonpath(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        eonpath(&[
            "fit",
            "--in",
            "x.csv",
            "--dimension",
            "colour",
            "--algo",
            "generic"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        eonpath(&[
            "simulate",
            "--topo",
            "/nonexistent.topo",
            "--units",
            "10",
            "--mean-demand-frac",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn simulate_then_analyse() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(eonpath(&["gen-topo", "--vertices", "20", "--out", p(d)])
        .status
        .success());
    let calls = d.join("calls.csv");
    let o = eonpath(&[
        "simulate",
        "--topo",
        p(&d.join("g20_0.topo")),
        "--units",
        "60",
        "--mean-demand-frac",
        "0.1",
        "--seed",
        "4",
        "--out",
        p(&calls),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&calls).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "topology,vertices,edges,units,mean_demand,seed,call_index,utilization,algorithm,outcome,cost,level,window_start,window_width,hops,time_ns"
    );
    assert!(lines.next().unwrap().starts_with("g20_0,20,"));

    let ratios = d.join("ratios.csv");
    let svg = d.join("cdf.svg");
    let o = eonpath(&[
        "cdf",
        "--in",
        p(&calls),
        "--out",
        p(&ratios),
        "--plot",
        p(&svg),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("fraction_faster="));
    assert!(fs::read_to_string(&ratios)
        .unwrap()
        .starts_with("ratio,cumulative_fraction\n"));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let fits = d.join("fits.csv");
    let o = eonpath(&[
        "fit",
        "--in",
        p(&calls),
        "--dimension",
        "utilization",
        "--algo",
        "filtered",
        "--out",
        p(&fits),
    ]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(fs::read_to_string(&fits).unwrap().lines().count(), 5);

    // a single graph size cannot support a fit over vertices
    let o = eonpath(&[
        "fit",
        "--in",
        p(&calls),
        "--dimension",
        "vertices",
        "--algo",
        "generic",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_single_algorithm_with_explicit_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(eonpath(&["gen-topo", "--vertices", "12", "--out", p(d)])
        .status
        .success());
    let calls = d.join("calls.csv");
    let o = eonpath(&[
        "simulate",
        "--topo",
        p(&d.join("g12_0.topo")),
        "--units",
        "30",
        "--mean-demand-frac",
        "0.1",
        "--algo",
        "generic",
        "--mod-table",
        "100:1,50:2",
        "--max-util",
        "0.3",
        "--out",
        p(&calls),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&calls).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",generic,")));
    // unmatched rows cannot form a speedup distribution
    assert_eq!(eonpath(&["cdf", "--in", p(&calls)]).status.code(), Some(2));
}

const SMALL_GRID: [&str; 10] = [
    "--vertices",
    "10,12",
    "--graphs",
    "2",
    "--units",
    "20,30",
    "--fractions",
    "0.1",
    "--seeds",
    "1,2",
];

#[test]
fn verify_passes_and_catches_faults() {
    let mut args = vec!["verify", "--spectrum-ops", "20000", "--instances", "300"];
    args.extend(SMALL_GRID);
    let o = eonpath(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));

    for fault in ["cost-only-domination", "last-fit"] {
        let mut a = args.clone();
        a.extend(["--inject-fault", fault]);
        let o = eonpath(&a);
        assert_eq!(o.status.code(), Some(1), "{fault}: {}", stdout(&o));
        let out = stdout(&o);
        assert!(out.contains("first counterexample"), "{out}");
        if fault == "last-fit" {
            assert!(
                out.lines()
                    .filter(|l| l.starts_with("FAIL "))
                    .all(|l| l.contains("cost_mismatches=0 ")),
                "{out}"
            );
        }
    }
}

#[test]
fn campaign_writes_resumes_and_merges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("camp");
    let mut args = vec!["campaign", "--jobs", "2", "--out", p(&out)];
    args.extend(SMALL_GRID);

    let o = eonpath(&args);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("cells=16 ran=16 skipped=0 failed=0"));
    let cells: Vec<_> = fs::read_dir(out.join("cells"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(cells.len(), 16);
    let rows_per_file: usize = cells
        .iter()
        .map(|c| fs::read_to_string(c).unwrap().lines().count() - 1)
        .sum();
    let merged = fs::read_to_string(out.join("calls.csv")).unwrap();
    assert_eq!(merged.lines().count() - 1, rows_per_file);
    assert_eq!(fs::read_dir(out.join("topologies")).unwrap().count(), 4);

    let before = fs::metadata(&cells[0]).unwrap().modified().unwrap();
    let o = eonpath(&args);
    assert!(stdout(&o).contains("ran=0 skipped=16"), "{}", stdout(&o));
    assert_eq!(fs::metadata(&cells[0]).unwrap().modified().unwrap(), before);

    // a removed cell is the only one recomputed
    fs::remove_file(&cells[3]).unwrap();
    let o = eonpath(&args);
    assert!(stdout(&o).contains("ran=1 skipped=15"), "{}", stdout(&o));
}
