//! Gate IR, its text format and brute-force simulators.
//!
//! Qubits are 0-based here and 1-based in the text format. In a basis index
//! `x` qubit 0 is the most significant bit, so `x = 0b01` on two qubits is
//! `|x₁x₂⟩ = |01⟩`.
//!
//! Rotation conventions follow the phase form: `RZ(α)|x⟩ = e^{iαx}|x⟩`,
//! `RX(α) = H·RZ(α)·H` and `RY(α) = S·RX(α)·S†`. Each equals the usual
//! `e^{-iPα/2}` up to the global phase `e^{iα/2}`.

mod sim;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use sim::{
    equal_up_to_global_phase, gzz_phases, simulate_dense, simulate_diagonal, simulate_state, DiagonalPhases, Unitary,
    C64, DENSE_CAP, DIAGONAL_CAP,
};

use crate::{Error, HollowSymmetric, Result};

/// Bit of qubit `q` in basis index `x`.
#[inline]
pub fn qbit(x: usize, n: usize, q: usize) -> usize {
    (x >> (n - 1 - q)) & 1
}

/// Basis-index mask of qubit `q`.
#[inline]
pub fn qmask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// A rotation angle, either an exact multiple of π or plain radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Pi(f64),
    Rad(f64),
}

impl Angle {
    pub fn radians(self) -> f64 {
        match self {
            Angle::Pi(c) => c * std::f64::consts::PI,
            Angle::Rad(r) => r,
        }
    }

    pub fn neg(self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(self, s: f64) -> Self {
        match self {
            Angle::Pi(c) => Angle::Pi(c * s),
            Angle::Rad(r) => Angle::Rad(r * s),
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Angle::Pi(c) => c == 0.0,
            Angle::Rad(r) => r == 0.0,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Pi(c) => write!(f, "{c}pi"),
            Angle::Rad(r) => write!(f, "{r}"),
        }
    }
}

/// Square binary matrix over F₂, at most 64 × 64. Bit `j` of `rows[i]` is
/// entry `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        Self { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n <= 64);
        Self { n, rows: vec![0; n] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n > 64 {
            return Err(Error::CapExceeded { n, cap: 64 });
        }
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            for (j, &v) in r.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(Error::InvalidInput(format!("entry {v} is not a bit"))),
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) as u8).collect()).collect()
    }

    /// `B x` over F₂ with `x` packed as bit `q` = qubit `q`.
    pub fn apply_packed(&self, x: u64) -> u64 {
        let mut y = 0;
        for (i, r) in self.rows.iter().enumerate() {
            y |= (((r & x).count_ones() & 1) as u64) << i;
        }
        y
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0;
                for k in 0..self.n {
                    if (r >> k) & 1 == 1 {
                        acc ^= other.rows[k];
                    }
                }
                acc
            })
            .collect();
        Self { n: self.n, rows }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let piv = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(Self { n, rows: inv })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_some()
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) && (i + 1..self.n).all(|j| !self.get(i, j)))
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) && (0..i).all(|j| !self.get(i, j)))
    }

    /// Conjugate by the qubit-order reversal.
    pub fn reversed(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(n - 1 - i, n - 1 - j, self.get(i, j));
            }
        }
        m
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        BitMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// `GCX(B)` applied to a bit vector.
pub fn gcx_apply(b: &BitMatrix, x: &[bool]) -> Result<Vec<bool>> {
    if x.len() != b.n {
        return Err(Error::DimensionMismatch { expected: b.n, got: x.len() });
    }
    if !b.is_invertible() {
        return Err(Error::InvalidInput("GCX matrix is singular over F2".into()));
    }
    let packed = x.iter().enumerate().fold(0u64, |acc, (q, &v)| acc | ((v as u64) << q));
    let y = b.apply_packed(packed);
    Ok((0..b.n).map(|q| (y >> q) & 1 == 1).collect())
}

/// One gate. Qubit indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    S(usize),
    Sdg(usize),
    SX(usize),
    SXdg(usize),
    RZ(Angle, usize),
    RX(Angle, usize),
    RY(Angle, usize),
    /// Control, target.
    CX(usize, usize),
    CZ(usize, usize),
    CS(usize, usize),
    CRZ(Angle, usize, usize),
    ZZ(Angle, usize, usize),
    GZZ(HollowSymmetric),
    GCRZ(HollowSymmetric),
    GCX(BitMatrix),
    /// `e^{-itH₀}` with `H₀ = -½ ZᵀJZ`.
    Evolve {
        coupling: HollowSymmetric,
        time: f64,
    },
    Phase(Angle),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::SX(_) => "SX",
            Gate::SXdg(_) => "SXDG",
            Gate::RZ(..) => "RZ",
            Gate::RX(..) => "RX",
            Gate::RY(..) => "RY",
            Gate::CX(..) => "CX",
            Gate::CZ(..) => "CZ",
            Gate::CS(..) => "CS",
            Gate::CRZ(..) => "CRZ",
            Gate::ZZ(..) => "ZZ",
            Gate::GZZ(_) => "GZZ",
            Gate::GCRZ(_) => "GCRZ",
            Gate::GCX(_) => "GCX",
            Gate::Evolve { .. } => "EVOLVE",
            Gate::Phase(_) => "PHASE",
        }
    }

    /// Explicitly addressed qubits; matrix-valued gates report none.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::SX(q)
            | Gate::SXdg(q)
            | Gate::RZ(_, q)
            | Gate::RX(_, q)
            | Gate::RY(_, q) => vec![q],
            Gate::CX(a, b) | Gate::CZ(a, b) | Gate::CS(a, b) | Gate::CRZ(_, a, b) | Gate::ZZ(_, a, b) => vec![a, b],
            _ => vec![],
        }
    }

    fn matrix_dim(&self) -> Option<usize> {
        match self {
            Gate::GZZ(a) | Gate::GCRZ(a) => Some(a.n()),
            Gate::Evolve { coupling, .. } => Some(coupling.n()),
            Gate::GCX(b) => Some(b.n()),
            _ => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            Gate::S(_)
                | Gate::Sdg(_)
                | Gate::RZ(..)
                | Gate::CZ(..)
                | Gate::CS(..)
                | Gate::CRZ(..)
                | Gate::ZZ(..)
                | Gate::GZZ(_)
                | Gate::GCRZ(_)
                | Gate::Evolve { .. }
                | Gate::Phase(_)
        )
    }

    /// Phase applied to basis state `x` by a diagonal gate.
    pub fn diagonal_phase(&self, n: usize, x: usize) -> Option<f64> {
        use std::f64::consts::{FRAC_PI_2, PI};
        let b = |q| qbit(x, n, q) as f64;
        Some(match self {
            Gate::S(q) => FRAC_PI_2 * b(*q),
            Gate::Sdg(q) => -FRAC_PI_2 * b(*q),
            Gate::RZ(a, q) => a.radians() * b(*q),
            Gate::CZ(i, j) => PI * b(*i) * b(*j),
            Gate::CS(i, j) => FRAC_PI_2 * b(*i) * b(*j),
            Gate::CRZ(a, i, j) => a.radians() * b(*i) * b(*j),
            Gate::ZZ(a, i, j) => a.radians() * ((qbit(x, n, *i) ^ qbit(x, n, *j)) as f64),
            Gate::GZZ(a) => ising_phase(a, n, x),
            Gate::Evolve { coupling, time } => time * ising_phase(coupling, n, x),
            Gate::GCRZ(a) => {
                let mut acc = 0.0;
                for (k, (i, j)) in crate::frame::pairs(a.n()).enumerate() {
                    acc += a.upper()[k] * b(i) * b(j);
                }
                acc
            }
            Gate::Phase(a) => a.radians(),
            _ => return None,
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidInput(format!(
                "{} addresses qubit {} on a {n}-qubit circuit",
                self.name(),
                q + 1
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidInput(format!("{} on a repeated qubit", self.name())));
        }
        if let Some(d) = self.matrix_dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        if let Gate::GCX(b) = self {
            if !b.is_invertible() {
                return Err(Error::InvalidInput("GCX matrix is singular over F2".into()));
            }
        }
        Ok(())
    }
}

/// `Σ_{i<j} A_ij (-1)^{x_i + x_j}`.
fn ising_phase(a: &HollowSymmetric, n: usize, x: usize) -> f64 {
    let mut acc = 0.0;
    for (k, (i, j)) in crate::frame::pairs(n).enumerate() {
        let v = a.upper()[k];
        if v != 0.0 {
            acc += if qbit(x, n, i) == qbit(x, n, j) { v } else { -v };
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    /// Push a gate built internally; panics on an invalid gate.
    pub(crate) fn add(&mut self, g: Gate) {
        self.push(g).expect("internally built gate is valid");
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn remove(&mut self, idx: usize) -> Gate {
        self.gates.remove(idx)
    }

    /// Gate count per text name.
    pub fn census(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for g in &self.gates {
            *m.entry(g.name()).or_insert(0) += 1;
        }
        m
    }

    pub fn count(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }

    /// Circuit with every gate on qubit `q` moved to `map[q]` on `n` qubits.
    pub fn remap(&self, n: usize, map: &[usize]) -> Result<Self> {
        let r = |q: usize| map[q];
        let mut out = Circuit::new(n);
        for g in &self.gates {
            let g2 = match g.clone() {
                Gate::H(q) => Gate::H(r(q)),
                Gate::X(q) => Gate::X(r(q)),
                Gate::S(q) => Gate::S(r(q)),
                Gate::Sdg(q) => Gate::Sdg(r(q)),
                Gate::SX(q) => Gate::SX(r(q)),
                Gate::SXdg(q) => Gate::SXdg(r(q)),
                Gate::RZ(a, q) => Gate::RZ(a, r(q)),
                Gate::RX(a, q) => Gate::RX(a, r(q)),
                Gate::RY(a, q) => Gate::RY(a, r(q)),
                Gate::CX(a, b) => Gate::CX(r(a), r(b)),
                Gate::CZ(a, b) => Gate::CZ(r(a), r(b)),
                Gate::CS(a, b) => Gate::CS(r(a), r(b)),
                Gate::CRZ(t, a, b) => Gate::CRZ(t, r(a), r(b)),
                Gate::ZZ(t, a, b) => Gate::ZZ(t, r(a), r(b)),
                Gate::GZZ(a) => Gate::GZZ(remap_hollow(&a, n, map)),
                Gate::GCRZ(a) => Gate::GCRZ(remap_hollow(&a, n, map)),
                Gate::Evolve { coupling, time } => Gate::Evolve { coupling: remap_hollow(&coupling, n, map), time },
                Gate::GCX(b) => {
                    let mut m = BitMatrix::identity(n);
                    for i in 0..b.n() {
                        for j in 0..b.n() {
                            m.set(map[i], map[j], b.get(i, j));
                        }
                    }
                    Gate::GCX(m)
                }
                Gate::Phase(a) => Gate::Phase(a),
            };
            out.push(g2)?;
        }
        Ok(out)
    }
}

fn remap_hollow(a: &HollowSymmetric, n: usize, map: &[usize]) -> HollowSymmetric {
    let mut out = HollowSymmetric::zeros(n);
    for (i, j) in crate::frame::pairs(a.n()) {
        out.set(map[i], map[j], a.get(i, j));
    }
    out
}

/// Two-qubit gate counts and encoding cost of a circuit. A `GZZ`/`GCRZ` on
/// `m` coupled qubits costs `m(m−1)/2`; any other two-qubit gate costs 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub gzz: usize,
    pub cz: usize,
    pub two_qubit: usize,
    pub encoding_cost: usize,
}

/// Number of qubits touched by a nonzero coupling.
pub fn coupled_qubits(a: &HollowSymmetric) -> usize {
    let mut seen = 0u64;
    for (i, j) in a.support() {
        seen |= (1 << i) | (1 << j);
    }
    seen.count_ones() as usize
}

pub fn support_cost(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

impl Circuit {
    pub fn cost_report(&self) -> CostReport {
        let mut r = CostReport::default();
        for g in &self.gates {
            match g {
                Gate::GZZ(a) | Gate::GCRZ(a) => {
                    r.gzz += 1;
                    r.encoding_cost += support_cost(coupled_qubits(a));
                }
                Gate::CZ(..) => {
                    r.cz += 1;
                    r.encoding_cost += 1;
                }
                Gate::CX(..) | Gate::CS(..) | Gate::CRZ(..) | Gate::ZZ(..) => {
                    r.two_qubit += 1;
                    r.encoding_cost += 1;
                }
                _ => {}
            }
        }
        r
    }
}

/// `GCRZ(A) = e^{-ia/4} GZZ(A/4) Π RZ(b_i/2)` with `a = Σ_{i<j} A_ij` and
/// `b_i = Σ_j A_ij`. Zero rotations are omitted.
pub fn gcrz_decompose(a: &HollowSymmetric) -> Circuit {
    let n = a.n();
    let mut c = Circuit::new(n);
    if a.is_zero() {
        return c;
    }
    c.add(Gate::Phase(Angle::Rad(-a.upper_sum() / 4.0)));
    c.add(Gate::GZZ(a.scale(0.25)));
    for i in 0..n {
        let b = a.row_sum(i);
        if b != 0.0 {
            c.add(Gate::RZ(Angle::Rad(b / 2.0), i));
        }
    }
    c
}

/// `GZZ(A) = e^{ia} Π_{i<j} ZZ(-2A_ij)`.
pub fn gzz_to_zz(a: &HollowSymmetric) -> Circuit {
    let mut c = Circuit::new(a.n());
    c.add(Gate::Phase(Angle::Rad(a.upper_sum())));
    for (i, j) in a.support() {
        c.add(Gate::ZZ(Angle::Rad(-2.0 * a.get(i, j)), i, j));
    }
    c
}
