//! Weighted double hypergraph states.
//!
//! Vertex v owns the qubit pair (2v, 2v+1): class A at 2v, class B at 2v+1.
//! Construction: one Bell pair per vertex, then a multi-controlled
//! phase(π/2) across the class-A qubits of every hyperedge and another
//! across the class-B qubits, then the local weight phases P(θ_A) ⊗ P(θ_B)
//! per vertex. All entangling gates are diagonal, so edge and weight order
//! never matters.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::codec;
use crate::error::{Error, Result};
use crate::sim::{Gate, GateOp, StateVector, MAX_STATE_QUBITS};

/// Which qubit of a vertex pair a local operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    A,
    B,
}

/// Running Σθ tracker for local weight application; the chain budget must
/// stay strictly below π.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightBudget {
    used: f64,
}

impl WeightBudget {
    pub fn used(&self) -> f64 {
        self.used
    }

    pub fn charge(&mut self, theta: f64) -> Result<()> {
        if theta < 0.0 || !theta.is_finite() {
            return Err(Error::Parameter(format!(
                "weight phases are non-negative finite radians, got {theta}"
            )));
        }
        if self.used + theta >= PI {
            return Err(Error::Constraint(format!(
                "weight budget exceeded: {} + {theta} ≥ π",
                self.used
            )));
        }
        self.used += theta;
        Ok(())
    }
}

/// Apply one local weight phase to a vertex qubit, charging the budget.
pub fn apply_weight(
    state: &mut StateVector<f64>,
    vertex: usize,
    class: VertexClass,
    theta: f64,
    budget: &mut WeightBudget,
) -> Result<()> {
    let qubit = vertex_qubit(vertex, class);
    if qubit >= state.n_qubits() {
        return Err(Error::QubitIndex(format!(
            "vertex {vertex} outside the register"
        )));
    }
    budget.charge(theta)?;
    state.apply(Gate::Phase(theta), &[qubit])
}

pub fn vertex_qubit(vertex: usize, class: VertexClass) -> usize {
    match class {
        VertexClass::A => 2 * vertex,
        VertexClass::B => 2 * vertex + 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleHypergraph {
    n_vertices: usize,
    hyperedges: Vec<Vec<usize>>,
    /// Per-vertex (θ_A, θ_B).
    weights: Vec<(f64, f64)>,
}

impl DoubleHypergraph {
    pub fn new(n_vertices: usize) -> Result<Self> {
        if n_vertices == 0 || 2 * n_vertices > MAX_STATE_QUBITS {
            return Err(Error::Capacity(format!(
                "double hypergraph supports 1..={} vertices, got {n_vertices}",
                MAX_STATE_QUBITS / 2
            )));
        }
        Ok(Self {
            n_vertices,
            hyperedges: Vec::new(),
            weights: vec![(0.0, 0.0); n_vertices],
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn weights(&self) -> &[(f64, f64)] {
        &self.weights
    }

    /// Add a k-hyperedge over ≥ 2 distinct vertices.
    pub fn add_hyperedge(&mut self, vertices: impl Into<Vec<usize>>) -> Result<()> {
        let mut vertices = vertices.into();
        vertices.sort_unstable();
        if vertices.len() < 2 {
            return Err(Error::Parameter(format!(
                "hyperedge needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("hyperedge repeats a vertex".into()));
        }
        if let Some(&v) = vertices.iter().find(|v| **v >= self.n_vertices) {
            return Err(Error::QubitIndex(format!(
                "hyperedge references vertex {v}, graph has {}",
                self.n_vertices
            )));
        }
        self.hyperedges.push(vertices);
        Ok(())
    }

    /// Set a vertex weight pair; the whole-graph budget Σ(θ_A + θ_B) < π is
    /// enforced immediately.
    pub fn set_weight(&mut self, vertex: usize, theta_a: f64, theta_b: f64) -> Result<()> {
        if vertex >= self.n_vertices {
            return Err(Error::QubitIndex(format!("vertex {vertex} out of range")));
        }
        for theta in [theta_a, theta_b] {
            if theta < 0.0 || !theta.is_finite() {
                return Err(Error::Parameter(format!(
                    "weight phases are non-negative finite radians, got {theta}"
                )));
            }
        }
        let old = self.weights[vertex];
        self.weights[vertex] = (theta_a, theta_b);
        if !codec::budget_ok(&self.weights) {
            self.weights[vertex] = old;
            return Err(Error::Constraint(format!(
                "weights ({theta_a}, {theta_b}) at vertex {vertex} push Σ(θ_A+θ_B) to ≥ π"
            )));
        }
        Ok(())
    }

    /// The canonical gate list realizing the graph state.
    pub fn circuit(&self) -> Vec<GateOp<f64>> {
        let mut ops = Vec::new();
        for v in 0..self.n_vertices {
            let a = vertex_qubit(v, VertexClass::A);
            ops.push(GateOp::new(Gate::H, vec![a]));
            ops.push(GateOp::new(Gate::Cnot, vec![a, a + 1]));
        }
        for edge in &self.hyperedges {
            for class in [VertexClass::A, VertexClass::B] {
                let qubits: Vec<usize> = edge.iter().map(|&v| vertex_qubit(v, class)).collect();
                let gate = match qubits.len() {
                    2 => Gate::CPhase(FRAC_PI_2),
                    3 => Gate::CcPhase(FRAC_PI_2),
                    k => Gate::McPhase {
                        angle: FRAC_PI_2,
                        controls: k - 1,
                    },
                };
                ops.push(GateOp::new(gate, qubits));
            }
        }
        for (v, &(theta_a, theta_b)) in self.weights.iter().enumerate() {
            if theta_a != 0.0 {
                ops.push(GateOp::new(
                    Gate::Phase(theta_a),
                    vec![vertex_qubit(v, VertexClass::A)],
                ));
            }
            if theta_b != 0.0 {
                ops.push(GateOp::new(
                    Gate::Phase(theta_b),
                    vec![vertex_qubit(v, VertexClass::B)],
                ));
            }
        }
        ops
    }

    /// Realize the weighted double hypergraph state on 2·n_vertices qubits.
    pub fn build_state(&self) -> Result<StateVector<f64>> {
        codec::ensure_budget(&self.weights)?;
        let mut state = StateVector::new(2 * self.n_vertices)?;
        state.apply_all(&self.circuit())?;
        Ok(state)
    }

    /// Parse the JSON graph document:
    /// `{"vertices": n, "hyperedges": [[v,…],…], "weights": [[θA,θB],…]}`.
    /// `weights` may be omitted for an unweighted graph.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            vertices: usize,
            #[serde(default)]
            hyperedges: Vec<Vec<usize>>,
            #[serde(default)]
            weights: Vec<(f64, f64)>,
        }
        let doc: Doc = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("graph document: {e}")))?;
        let mut graph = Self::new(doc.vertices)?;
        for edge in doc.hyperedges {
            graph.add_hyperedge(edge)?;
        }
        if !doc.weights.is_empty() {
            if doc.weights.len() != doc.vertices {
                return Err(Error::Config(format!(
                    "weights: expected {} pairs, got {}",
                    doc.vertices,
                    doc.weights.len()
                )));
            }
            for (v, (a, b)) in doc.weights.into_iter().enumerate() {
                graph.set_weight(v, a, b)?;
            }
        }
        Ok(graph)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "vertices": self.n_vertices,
            "hyperedges": self.hyperedges,
            "weights": self.weights,
        })
        .to_string()
    }
}
