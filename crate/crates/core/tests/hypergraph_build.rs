//! Double hypergraph construction against the reference engine.

mod common;

use common::*;
use proptest::prelude::*;
use qnft_core::hypergraph::DoubleHypergraph;
use qnft_core::sim::StateVector;

#[test]
fn single_vertex_state_is_phased_bell_pair() {
    let mut g = DoubleHypergraph::new(1).unwrap();
    g.set_weight(0, 0.7, 0.4).unwrap();
    let state = g.build_state().unwrap();
    let h = 1.0 / 2.0f64.sqrt();
    let expect = vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), phase(1.1).scale(h)];
    assert!(max_deviation(state.amplitudes(), &expect) < 1e-12);
}

#[test]
fn one_edge_state_matches_reference_engine() {
    // Two vertices, one edge, zero weights: only the all-ones amplitude
    // picks up i·i; the golden value comes from the dense engine.
    let mut g = DoubleHypergraph::new(2).unwrap();
    g.add_hyperedge(vec![0, 1]).unwrap();
    let state = g.build_state().unwrap();

    let reference = oracle_run(4, &g.circuit());
    assert!(max_deviation(state.amplitudes(), &reference) < 1e-12);

    // The reference engine confirms the expected support and phases.
    assert!((reference[0] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((reference[3] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((reference[12] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((reference[15] - c(-0.5, 0.0)).norm() < 1e-12);
    for i in (0..16).filter(|i| ![0usize, 3, 12, 15].contains(i)) {
        assert!(reference[i].norm() < 1e-12);
    }
}

#[test]
fn three_vertex_hyperedge_matches_reference_engine() {
    let mut g = DoubleHypergraph::new(3).unwrap();
    g.add_hyperedge(vec![0, 1, 2]).unwrap();
    g.add_hyperedge(vec![0, 2]).unwrap();
    g.set_weight(0, 0.25, 0.0).unwrap();
    g.set_weight(2, 0.0, 0.125).unwrap();
    let state = g.build_state().unwrap();
    let reference = oracle_run(6, &g.circuit());
    assert!(max_deviation(state.amplitudes(), &reference) < 1e-12);
}

fn build_with_edge_order(edges: &[Vec<usize>], weights_first: bool) -> StateVector<f64> {
    // Rebuild by hand to control operation order.
    use qnft_core::sim::{Gate, GateOp};
    let n_vertices = 3usize;
    let mut ops: Vec<GateOp<f64>> = Vec::new();
    for v in 0..n_vertices {
        ops.push(GateOp::new(Gate::H, vec![2 * v]));
        ops.push(GateOp::new(Gate::Cnot, vec![2 * v, 2 * v + 1]));
    }
    let weights = [(0.3f64, 0.1f64), (0.0, 0.2), (0.15, 0.0)];
    let weight_ops = |ops: &mut Vec<GateOp<f64>>| {
        for (v, (a, b)) in weights.iter().enumerate() {
            ops.push(GateOp::new(Gate::Phase(*a), vec![2 * v]));
            ops.push(GateOp::new(Gate::Phase(*b), vec![2 * v + 1]));
        }
    };
    if weights_first {
        weight_ops(&mut ops);
    }
    for edge in edges {
        for class in 0..2usize {
            let qubits: Vec<usize> = edge.iter().map(|&v| 2 * v + class).collect();
            let gate = match qubits.len() {
                2 => Gate::CPhase(std::f64::consts::FRAC_PI_2),
                _ => Gate::CcPhase(std::f64::consts::FRAC_PI_2),
            };
            ops.push(GateOp::new(gate, qubits));
        }
    }
    if !weights_first {
        weight_ops(&mut ops);
    }
    let mut state = StateVector::new(2 * n_vertices).unwrap();
    state.apply_all(&ops).unwrap();
    state
}

#[test]
fn edge_order_and_weight_order_never_matter() {
    // Diagonal gates commute: any edge permutation and either weight
    // placement give the same state.
    let orders: Vec<Vec<Vec<usize>>> = vec![
        vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]],
        vec![vec![0, 1, 2], vec![0, 1], vec![1, 2]],
        vec![vec![1, 2], vec![0, 1, 2], vec![0, 1]],
    ];
    let baseline = build_with_edge_order(&orders[0], false);
    for order in &orders {
        for weights_first in [false, true] {
            let state = build_with_edge_order(order, weights_first);
            assert!(
                max_deviation(state.amplitudes(), baseline.amplitudes()) < 1e-12,
                "order {order:?}, weights_first {weights_first}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_graphs_match_reference_and_stay_normalized(
        n_vertices in 1usize..4,
        edge_seed in 0u64..500,
    ) {
        use rand::Rng;
        let mut rng = qnft_core::master_rng(edge_seed);
        let mut g = DoubleHypergraph::new(n_vertices).unwrap();
        if n_vertices >= 2 {
            let n_edges = rng.gen_range(0..3);
            for _ in 0..n_edges {
                let size = rng.gen_range(2..=n_vertices);
                let mut vertices: Vec<usize> = (0..n_vertices).collect();
                for i in (1..vertices.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    vertices.swap(i, j);
                }
                vertices.truncate(size);
                g.add_hyperedge(vertices).unwrap();
            }
        }
        for v in 0..n_vertices {
            let a = rng.gen::<f64>() * 0.4;
            let b = rng.gen::<f64>() * 0.4;
            g.set_weight(v, a, b).unwrap();
        }
        let state = g.build_state().unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        let reference = oracle_run(2 * n_vertices, &g.circuit());
        prop_assert!(max_deviation(state.amplitudes(), &reference) < 1e-11);
    }
}
