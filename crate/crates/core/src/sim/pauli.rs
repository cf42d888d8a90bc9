//! Pauli strings for expectation values and tomography settings.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parameter(format!("unknown Pauli label '{other}'"))),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// One Pauli operator per qubit. `labels[q]` acts on qubit q; the text form
/// follows ket order, leftmost character = highest qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    labels: Vec<Pauli>,
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        Self { labels }
    }

    /// Parse "ZXI…": leftmost char is qubit n−1, rightmost is qubit 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels = Vec::with_capacity(text.len());
        for c in text.chars().rev() {
            labels.push(Pauli::from_char(c)?);
        }
        if labels.is_empty() {
            return Err(Error::Parameter("empty Pauli string".into()));
        }
        Ok(Self { labels })
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, qubit: usize) -> Pauli {
        self.labels[qubit]
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    /// Qubits where the string is not the identity.
    pub fn support(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&q| self.labels[q] != Pauli::I)
            .collect()
    }

    /// Bit mask of qubits where the operator flips the computational basis
    /// (X and Y positions).
    pub fn flip_mask(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0usize, |m, (q, _)| m | (1 << q))
    }

    pub fn text(&self) -> String {
        self.labels.iter().rev().map(|p| p.as_char()).collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text())
    }
}
