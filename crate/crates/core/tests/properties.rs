use proptest::prelude::*;

use viralcond::closed_form::bipartite_fraction;
use viralcond::conductance::{vc_bipartite_as_printed, TwoLineModel};
use viralcond::graph::write_edge_list;
use viralcond::report::table1;
use viralcond::sis::mean_field_map;
use viralcond::{
    analyze, degree_stats, generate, load_edge_list, spectral_radius, vc_bipartite, vc_regular,
    viral_conductance_numeric, Graph, HeuristicInputs, InfectionCurve, NetworkSpec, SolverOptions, SteadyStateSolver,
};

fn small_er() -> impl Strategy<Value = Graph> {
    (6usize..40, 1.2f64..3.0, any::<u64>()).prop_map(|(nodes, density, seed)| {
        let links = ((nodes as f64 * density) as usize).min(nodes * (nodes - 1) / 2);
        generate(&NetworkSpec::ErdosRenyi { nodes, links, seed }).unwrap()
    })
}

fn permuted(g: Graph) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    let perm: Vec<usize> = (0..g.node_count()).collect();
    (Just(g), Just(perm).prop_shuffle())
}

/// Perron vector by plain power iteration on A + I, 20000 steps.
fn perron_vector(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..20_000 {
        for i in 0..n {
            y[i] = x[i] + g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    x
}

fn end_slopes(g: &Graph) -> (f64, f64, f64) {
    let opts = SolverOptions {
        tolerance: 1e-12,
        iteration_cap: 10_000_000,
    };
    let solver = SteadyStateSolver::new(g, opts).unwrap();
    let rho = solver.rho();
    let h = rho / 1000.0;
    let initial = (1.0 - solver.solve(h).unwrap().fraction) / h;
    let terminal = solver.solve(rho - h).unwrap().fraction / h;
    (rho, initial, terminal)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn stats_and_rho_ignore_node_order((g, perm) in small_er().prop_flat_map(permuted)) {
        let h = g.relabeled(&perm).unwrap();
        let (a, b) = (degree_stats(&g).unwrap(), degree_stats(&h).unwrap());
        prop_assert_eq!(a.min_degree, b.min_degree);
        prop_assert_eq!(a.max_degree, b.max_degree);
        prop_assert!((a.mean_degree - b.mean_degree).abs() < 1e-12);
        prop_assert!((a.inverse_degree_mean - b.inverse_degree_mean).abs() < 1e-12);
        let (ra, rb) = (spectral_radius(&g, 1e-10).unwrap().rho, spectral_radius(&h, 1e-10).unwrap().rho);
        prop_assert!((ra - rb).abs() < 1e-8 * ra, "{} vs {}", ra, rb);
    }

    #[test]
    fn edge_list_round_trip(g in small_er()) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = load_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (a, b) in back.edges() {
            let la: usize = back.label(a).parse().unwrap();
            let lb: usize = back.label(b).parse().unwrap();
            prop_assert!(g.has_edge(la, lb));
        }
    }

    #[test]
    fn mean_field_map_is_monotone(g in small_er(), tau in 0.01f64..2.0, seed in any::<u64>()) {
        let n = g.node_count();
        let mut state = seed | 1;
        let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; (state >> 11) as f64 / (1u64 << 53) as f64 };
        let low: Vec<f64> = (0..n).map(|_| next()).collect();
        let high: Vec<f64> = low.iter().map(|v| v + (1.0 - v) * next()).collect();
        let (mut fl, mut fh) = (vec![0.0; n], vec![0.0; n]);
        mean_field_map(&g, tau, &low, &mut fl);
        mean_field_map(&g, tau, &high, &mut fh);
        for i in 0..n {
            prop_assert!(fl[i] <= fh[i] + 1e-15);
            prop_assert!((0.0..1.0).contains(&fh[i]));
        }
    }

    #[test]
    fn bipartite_closed_form_matches_quadrature(m in 1u32..=30, n in 1u32..=30) {
        let rho = f64::from(m * n).sqrt();
        let curve = InfectionCurve::from_fn(rho, 10_001, |s| bipartite_fraction(m, n, s)).unwrap();
        let numeric = viral_conductance_numeric(&curve).value;
        prop_assert!((numeric - vc_bipartite(m, n)).abs() <= 1e-3, "K_{},{}: {} vs {}", m, n, numeric, vc_bipartite(m, n));
    }

    #[test]
    fn bipartite_symmetric_in_sides(m in 1u32..500, n in 1u32..500) {
        let (a, b) = (vc_bipartite(m, n), vc_bipartite(n, m));
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn balanced_bipartite_is_regular(n in 1u32..2000) {
        prop_assert!((vc_bipartite(n, n) - vc_regular(n)).abs() <= 1e-9 * vc_regular(n));
    }

    #[test]
    fn ring_conductance_is_one(nodes in 3usize..300) {
        let g = generate(&NetworkSpec::Ring { nodes }).unwrap();
        let a = analyze("ring", &g, 51, SolverOptions::default()).unwrap();
        prop_assert!((a.report.v_numeric.unwrap() - 1.0).abs() < 1e-6);
        prop_assert!((a.report.v_h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_lines_pass_through_endpoints(g in small_er()) {
        let inputs = HeuristicInputs::from_graph(&g).unwrap();
        let lines = TwoLineModel::new(inputs).unwrap();
        prop_assert!((lines.initial_line(0.0) - 1.0).abs() < 1e-12);
        prop_assert!(lines.terminal_line(inputs.rho).abs() < 1e-12);
        if let Some(s) = lines.intersection() {
            prop_assert!(s > 0.0 && s < inputs.rho);
            prop_assert!((lines.initial_line(s) - lines.terminal_line(s)).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn initial_slope_is_inverse_degree_mean(g in small_er()) {
        let sigma = degree_stats(&g).unwrap().inverse_degree_mean;
        let (_, initial, _) = end_slopes(&g);
        prop_assert!((initial / sigma - 1.0).abs() < 0.05, "{} vs {}", initial, sigma);
    }

    #[test]
    fn terminal_slope_on_regular_graphs(half in 4usize..30, degree in 2usize..6, seed in any::<u64>()) {
        let spec = NetworkSpec::RandomRegular { nodes: 2 * half, degree, seed };
        prop_assume!(spec.validate().is_ok());
        let g = generate(&spec).unwrap();
        let (rho, _, terminal) = end_slopes(&g);
        let target = degree as f64 / (rho * rho);
        prop_assert!((terminal / target - 1.0).abs() < 0.01, "{} vs {}", terminal, target);
    }

    #[test]
    fn terminal_slope_on_complete_bipartite(m in 1usize..25, n in 1usize..25) {
        let g = generate(&NetworkSpec::CompleteBipartite { left: m, right: n }).unwrap();
        let mean_degree = degree_stats(&g).unwrap().mean_degree;
        let (rho, _, terminal) = end_slopes(&g);
        let target = mean_degree / (rho * rho);
        prop_assert!((terminal / target - 1.0).abs() < 0.01, "{} vs {}", terminal, target);
    }
}

/// Near the threshold y(ρ − h) ≈ h Σx Σx² / (N ρ Σx³) with x the Perron
/// vector; E[d]/ρ² is the special case of a constant or two-valued x.
#[test]
fn terminal_slope_follows_perron_vector_on_grid() {
    let g = generate(&NetworkSpec::Grid2d { rows: 10, cols: 10 }).unwrap();
    let x = perron_vector(&g);
    let (rho, _, terminal) = end_slopes(&g);
    let (s1, s2, s3) = x
        .iter()
        .fold((0.0, 0.0, 0.0), |(a, b, c), v| (a + v, b + v * v, c + v * v * v));
    let predicted = s1 * s2 / (g.node_count() as f64 * rho * s3);
    assert!((terminal / predicted - 1.0).abs() < 0.01, "{terminal} vs {predicted}");
    let naive = degree_stats(&g).unwrap().mean_degree / (rho * rho);
    assert!(terminal < 0.8 * naive);
}

#[test]
fn table1_relative_error_signs() {
    let signs: Vec<i32> = table1()
        .unwrap()
        .iter()
        .map(|r| {
            if r.rel_error.abs() < 1e-6 {
                0
            } else {
                r.rel_error.signum() as i32
            }
        })
        .collect();
    assert_eq!(signs, [-1, -1, 0, 1, -1, -1]);
}

#[test]
fn printed_bipartite_form_differs_only_off_balance() {
    assert!((vc_bipartite_as_printed(50, 50) - 25.0).abs() < 1e-9);
    assert!((vc_bipartite_as_printed(10, 90) - vc_bipartite(10, 90)).abs() > 80.0);
}
