use geoprog::{solve_gp, SolveStatus, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transit_ca::cost::{build_gp, capacity_utilization, evaluate_cost, DesignVariables, ModelParams, NetworkKind};
use transit_ca::demand::{aggregate_demand, generate_chessboard_demand, generate_smooth_demand, SmoothDemandParams};
use transit_ca::grid::Grid;

fn random_design(rng: &mut ChaCha8Rng, kind: NetworkKind, n: usize) -> DesignVariables {
    let g = kind.groups(n);
    let mut draw = |lo: f64, hi: f64| -> Vec<f64> {
        (0..g).map(|_| (rng.gen_range(lo.ln()..hi.ln())).exp()).collect()
    };
    DesignVariables {
        kind,
        delta_ew: draw(0.01, 10.0),
        delta_ns: draw(0.01, 10.0),
        headway_ew: draw(1e-3, 1.0),
        headway_ns: draw(1e-3, 1.0),
    }
}

#[test]
fn posynomial_matches_evaluator() {
    let grid = Grid::new(10.0, 0.5).unwrap();
    let od = generate_smooth_demand(&grid, 10_000.0, &SmoothDemandParams::commute()).unwrap();
    let agg = aggregate_demand(&grid, &od);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in [NetworkKind::Heterogeneous, NetworkKind::Homogeneous] {
        for mu in [25.0, 5.0] {
            let mut params = ModelParams::with_mu(mu);
            // nonzero line and stop prices exercise every term
            params.pi_l = 3.0;
            params.pi_s = 0.5;
            let gp = build_gp(kind, &agg, &params).unwrap();
            for _ in 0..100 {
                let d = random_design(&mut rng, kind, 20);
                let direct = evaluate_cost(&d, &agg, &params).unwrap().z;
                let via_gp = gp.total_cost(&d).unwrap();
                assert!((via_gp - direct).abs() / direct < 1e-10, "{kind:?}: {via_gp} vs {direct}");
            }
        }
    }
}

#[test]
fn gp_solutions_are_feasible_and_optimal() {
    let grid = Grid::new(10.0, 0.5).unwrap();
    let (od, _) = generate_chessboard_demand(&grid, 100_000.0, 2, 0.9, 0.9).unwrap();
    let agg = aggregate_demand(&grid, &od);
    let params = ModelParams::with_mu(5.0);
    for kind in [NetworkKind::Heterogeneous, NetworkKind::Homogeneous] {
        let gp = build_gp(kind, &agg, &params).unwrap();
        let sol = solve_gp(&gp.problem, &SolverOptions::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Optimal, "{:?}", sol.report);
        let design = gp.design(&sol.r).unwrap();
        let util = capacity_utilization(&design, &agg, &params).unwrap();
        assert!(util.iter().all(|u| u.value <= 1.0 + 1e-8));
        let z = evaluate_cost(&design, &agg, &params).unwrap().z;
        assert!((z - (sol.report.objective + gp.dropped_constant)).abs() < 1e-9 * z);
    }
}
