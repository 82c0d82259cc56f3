//! Phase-free Pauli strings in the binary symplectic picture.
//!
//! A Pauli string on `n` qubits is a pair of bit vectors `(x, z)`; `Y` sets
//! both bits. Generator matrices use an interleaved column layout: column
//! `2q` is the x bit of qubit `q` and column `2q + 1` its z bit, so a set of
//! qubits maps to a contiguous pair of columns each.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BitVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' | '_' | '.' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::Parse(format!("invalid Pauli letter {c:?}"))),
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

    /// Single-qubit product with the phase dropped.
    pub fn mul(self, other: Pauli) -> Pauli {
        let (a, b) = (self.bits(), other.bits());
        Pauli::from_bits(a.0 ^ b.0, a.1 ^ b.1)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: BitVec,
    z: BitVec,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn from_bits(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension(format!(
                "x part has {} bits but z part has {}",
                x.len(),
                z.len()
            )));
        }
        Ok(Self { x, z })
    }

    /// Builds a string from `(qubit, letter)` pairs; repeated qubits multiply.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, l) in ops {
            if q >= n {
                return Err(Error::Dimension(format!("qubit {q} out of range for {n} qubits")));
            }
            p.mul_assign_at(q, l);
        }
        Ok(p)
    }

    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        Self::from_sparse(n, &[(qubit, letter)])
    }

    /// Parses a dense letter string such as `"XIZY"`.
    pub fn parse(s: &str) -> Result<Self> {
        let letters: Vec<Pauli> = s.chars().map(Pauli::from_char).collect::<Result<_>>()?;
        let mut p = Self::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            p.set(q, l);
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, letter: Pauli) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    fn mul_assign_at(&mut self, q: usize, letter: Pauli) {
        let cur = self.get(q);
        self.set(q, cur.mul(letter));
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_qubits()).filter(move |&q| self.x.get(q) || self.z.get(q))
    }

    /// Phase-free product.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        check_len(self, other)?;
        let mut out = self.clone();
        out.x.xor_assign(&other.x);
        out.z.xor_assign(&other.z);
        Ok(out)
    }

    /// Interleaved symplectic row: bit `2q` is x, bit `2q + 1` is z.
    pub fn to_symplectic(&self) -> BitVec {
        let n = self.n_qubits();
        let mut v = BitVec::zeros(2 * n);
        for q in self.x.iter_ones() {
            v.set(2 * q, true);
        }
        for q in self.z.iter_ones() {
            v.set(2 * q + 1, true);
        }
        v
    }

    pub fn from_symplectic(v: &BitVec) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!("odd symplectic width {}", v.len())));
        }
        let n = v.len() / 2;
        let mut p = Self::identity(n);
        for c in v.iter_ones() {
            if c % 2 == 0 {
                p.x.set(c / 2, true);
            } else {
                p.z.set(c / 2, true);
            }
        }
        Ok(p)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

fn check_len(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::Dimension(format!(
            "Pauli strings act on {} and {} qubits",
            a.n_qubits(),
            b.n_qubits()
        )));
    }
    Ok(())
}

/// Returns `true` when `a` and `b` anticommute.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_len(a, b)?;
    Ok(a.x.dot(&b.z) ^ a.z.dot(&b.x))
}

/// Symplectic product of two interleaved rows.
pub fn symplectic_product_rows(a: &[u64], b: &[u64]) -> bool {
    const X_MASK: u64 = 0x5555_5555_5555_5555;
    let mut acc = 0u32;
    for (&u, &v) in a.iter().zip(b) {
        // swap x/z halves of v so that x·z and z·x pair up
        let vs = ((v & X_MASK) << 1) | ((v >> 1) & X_MASK);
        acc ^= (u & vs).count_ones();
    }
    acc & 1 == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    CZ,
    CNOT,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::S => 1,
            GateKind::CZ | GateKind::CNOT => 2,
        }
    }
}

/// A Clifford gate on concrete qubit indices. For `CNOT` the first qubit is the control.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }

    pub fn s(q: usize) -> Self {
        Self::new(GateKind::S, vec![q])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, vec![a, b])
    }

    pub fn cnot(c: usize, t: usize) -> Self {
        Self::new(GateKind::CNOT, vec![c, t])
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::Dimension(format!(
                "{:?} needs {} qubits, got {}",
                self.kind,
                self.kind.arity(),
                self.qubits.len()
            )));
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= n) {
            return Err(Error::Dimension(format!("qubit {q} out of range for {n} qubits")));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(Error::Dimension(format!(
                "two-qubit gate on repeated qubit {}",
                self.qubits[0]
            )));
        }
        Ok(())
    }

    /// Applies the conjugation to an interleaved symplectic matrix in place.
    pub fn apply_to_matrix(&self, m: &mut BinaryMatrix) -> Result<()> {
        self.check(m.width() / 2)?;
        let q = &self.qubits;
        match self.kind {
            GateKind::H => m.swap_columns(2 * q[0], 2 * q[0] + 1),
            GateKind::S => m.xor_column_into(2 * q[0], 2 * q[0] + 1),
            GateKind::CZ => {
                m.xor_column_into(2 * q[1], 2 * q[0] + 1);
                m.xor_column_into(2 * q[0], 2 * q[1] + 1);
            }
            GateKind::CNOT => {
                m.xor_column_into(2 * q[0], 2 * q[1]);
                m.xor_column_into(2 * q[1] + 1, 2 * q[0] + 1);
            }
        }
        Ok(())
    }
}

/// Symplectic image of `p` under conjugation by `gate`, phases dropped.
pub fn conjugate_by_gate(p: &PauliString, gate: &Gate) -> Result<PauliString> {
    gate.check(p.n_qubits())?;
    let mut out = p.clone();
    let q = &gate.qubits;
    match gate.kind {
        GateKind::H => {
            let (x, z) = (p.x.get(q[0]), p.z.get(q[0]));
            out.x.set(q[0], z);
            out.z.set(q[0], x);
        }
        GateKind::S => {
            if p.x.get(q[0]) {
                out.z.flip(q[0]);
            }
        }
        GateKind::CZ => {
            if p.x.get(q[1]) {
                out.z.flip(q[0]);
            }
            if p.x.get(q[0]) {
                out.z.flip(q[1]);
            }
        }
        GateKind::CNOT => {
            if p.x.get(q[0]) {
                out.x.flip(q[1]);
            }
            if p.z.get(q[1]) {
                out.z.flip(q[0]);
            }
        }
    }
    Ok(out)
}

/// Dimension of the subgroup of the row space supported inside `qubit_mask`.
pub fn supported_subgroup_dim(m: &BinaryMatrix, qubit_mask: &[usize]) -> Result<usize> {
    let n = m.width() / 2;
    let mut inside = vec![false; n];
    for &q in qubit_mask {
        if q >= n {
            return Err(Error::Dimension(format!("mask qubit {q} out of range for {n} qubits")));
        }
        inside[q] = true;
    }
    let outside: Vec<usize> = (0..n)
        .filter(|&q| !inside[q])
        .flat_map(|q| [2 * q, 2 * q + 1])
        .collect();
    Ok(m.rank() - m.select_columns(&outside).rank())
}

/// Interleaved column indices of a set of qubits.
pub fn qubit_columns(qubits: &[usize]) -> Vec<usize> {
    qubits.iter().flat_map(|&q| [2 * q, 2 * q + 1]).collect()
}

/// Builds the interleaved generator matrix of a list of Pauli strings.
pub fn generator_matrix(n: usize, gens: &[PauliString]) -> Result<BinaryMatrix> {
    let mut m = BinaryMatrix::new(2 * n);
    for g in gens {
        if g.n_qubits() != n {
            return Err(Error::Dimension(format!(
                "generator on {} qubits in a {n}-qubit matrix",
                g.n_qubits()
            )));
        }
        m.push_row(&g.to_symplectic())?;
    }
    Ok(m)
}
