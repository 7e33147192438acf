use eonlab::simulator::{run_observed, Algorithm, Outcome, SimConfig};
use eonpath::topology::generate_gabriel;
use eonpath::{Assignment, ModulationTable};

/// Replays every run from the observer's view: windows handed out never
/// overlap on an edge, and free plus allocated units always add up to S.
#[test]
fn spectrum_is_conserved_and_never_shared() {
    for (v, s, frac, seed) in [(20, 50, 0.1, 1u64), (30, 80, 0.05, 2), (12, 16, 0.2, 3)] {
        let topo = generate_gabriel(v, seed).unwrap();
        let table = ModulationTable::default_for(topo.longest_shortest_path().unwrap(), 4).unwrap();
        let cfg = SimConfig::new(s, frac, seed, table);
        let mut owned: Vec<Vec<u32>> = vec![vec![0; s as usize]; topo.edge_count()];
        let mut previous: Option<Assignment> = None;
        let mut last_util = 0.0;
        let records = run_observed(&topo, &cfg, |ev| {
            if let Some(a) = previous.take() {
                for e in ev.network.path_edges(&a.path).unwrap() {
                    for u in a.window.start..a.window.end() {
                        let slot = &mut owned[e as usize][u as usize];
                        assert_eq!(*slot, 0, "unit {u} of edge {e} allocated twice");
                        *slot = ev.call_index as u32 + 1;
                    }
                }
            }
            for e in 0..topo.edge_count() as u32 {
                let avail = ev.network.avail(e);
                let taken = owned[e as usize].iter().filter(|&&o| o != 0).count() as u32;
                assert_eq!(avail.len() + taken, s);
                for u in 0..s {
                    assert_eq!(avail.contains_unit(u), owned[e as usize][u as usize] == 0);
                }
            }
            assert!(ev.utilization >= last_util && ev.utilization < cfg.max_utilization);
            last_util = ev.utilization;
            previous = ev.generic.unwrap().clone();
        })
        .unwrap();

        // both tags agree call by call
        for pair in records.chunks(2) {
            let (g, f) = match pair[0].algorithm {
                Algorithm::Generic => (&pair[0], &pair[1]),
                Algorithm::Filtered => (&pair[1], &pair[0]),
            };
            assert_eq!(g.call_index, f.call_index);
            assert_eq!(
                (g.outcome, g.cost, g.level, g.window, g.hops),
                (f.outcome, f.cost, f.level, f.window, f.hops)
            );
            if g.outcome == Outcome::Blocked {
                assert!(g.cost.is_none());
            }
        }
    }
}
