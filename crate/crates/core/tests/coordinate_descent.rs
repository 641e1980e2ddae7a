mod common;

use transit_ca::cd::{run_cd, run_cd_multistart, CdContext, CdOptions};
use transit_ca::cost::{capacity_utilization, NetworkKind};
use transit_ca::harness::{Pattern, Scenario};

fn context_for(s: &Scenario) -> (transit_ca::demand::DemandAggregates, transit_ca::cost::ModelParams) {
    let (_, agg) = s.demand().unwrap();
    (agg, s.model_params())
}

#[test]
fn clamp_free_runs_descend_and_stop_at_stationary_points() {
    for kind in [NetworkKind::Heterogeneous, NetworkKind::Homogeneous] {
        for pattern in [Pattern::Uniform, Pattern::Monocentric, Pattern::Chessboard3] {
            let s = Scenario::new(pattern, 10_000.0, 20.0, kind);
            let (agg, p) = context_for(&s);
            let ctx = CdContext::new(&agg, &p, kind).unwrap();
            let opts = CdOptions::default();
            for start in 0..3 {
                let run = run_cd(&ctx, &opts, start).unwrap();
                let t = &run.trace;
                assert_eq!(t.total_clamps(), 0, "{pattern} {kind:?} start {start}");
                assert!(t.converged && t.iterations() <= 50);
                for w in t.z.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9, "{pattern} {kind:?}: {} -> {}", w[0], w[1]);
                }
                let e = common::elasticities(&run.design, &agg, &p);
                let worst = e.iter().map(|x| x.abs()).fold(0.0, f64::max);
                assert!(worst < 1e-4, "{pattern} {kind:?}: elasticity {worst:e}");
            }
        }
    }
}

#[test]
fn returned_designs_are_feasible() {
    for kind in [NetworkKind::Heterogeneous, NetworkKind::Homogeneous] {
        let s = Scenario::new(Pattern::Commute, 100_000.0, 5.0, kind);
        let (agg, p) = context_for(&s);
        let ctx = CdContext::new(&agg, &p, kind).unwrap();
        let multi = run_cd_multistart(&ctx, &CdOptions::default()).unwrap();
        assert!(multi.best.trace.total_clamps() > 0, "this case should hit capacity");
        let u = capacity_utilization(&multi.best.design, &agg, &p).unwrap();
        assert!(u.iter().all(|u| u.value <= 1.0 + 1e-12));
        assert!(u.iter().any(|u| (u.value - 1.0).abs() < 1e-12));
    }
}

#[test]
fn identical_seeds_give_identical_traces() {
    let s = Scenario::new(Pattern::Chessboard2, 50_000.0, 5.0, NetworkKind::Heterogeneous);
    let (agg, p) = context_for(&s);
    let ctx = CdContext::new(&agg, &p, s.network).unwrap();
    let opts = CdOptions {
        seed: 42,
        ..CdOptions::default()
    };
    let a = run_cd_multistart(&ctx, &opts).unwrap();
    let b = run_cd_multistart(&ctx, &opts).unwrap();
    assert_eq!(a.best.trace.to_json(), b.best.trace.to_json());
    assert_eq!(a.final_z.iter().map(|z| z.to_bits()).collect::<Vec<_>>(), b.final_z.iter().map(|z| z.to_bits()).collect::<Vec<_>>());
    let other = run_cd_multistart(&ctx, &CdOptions { seed: 1042, ..opts }).unwrap();
    assert_ne!(a.best.trace.initial_design, other.best.trace.initial_design);
}

#[test]
fn uniform_multistart_spread_is_small() {
    let s = Scenario::new(Pattern::Uniform, 10_000.0, 20.0, NetworkKind::Heterogeneous);
    let (agg, p) = context_for(&s);
    let ctx = CdContext::new(&agg, &p, s.network).unwrap();
    let multi = run_cd_multistart(&ctx, &CdOptions::default()).unwrap();
    assert_eq!(multi.final_z.len(), 10);
    let best = multi.best.breakdown.z;
    assert!(multi.spread() / best < 1e-6, "spread {}", multi.spread());
}
