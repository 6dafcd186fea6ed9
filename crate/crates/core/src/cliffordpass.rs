//! Clifford entangling layers as GZZ gates.
//!
//! A CZ layer is one GZZ plus local phase gates. A directed CX layer is
//! rewritten as CZ-type fan-outs between Hadamard layers, held as two boolean
//! tables (rows are qubits, columns are time steps), and the Hadamards and
//! fan-outs are then shifted so that neighbouring fan-outs pool into one GZZ.
//!
//! Reading the tables left to right gives `GCX(B⁻¹)`. Every piece is
//! self-inverse, so the emitted circuit runs the steps right to left and
//! realises `GCX(B)`.

use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, BitMatrix, Circuit, Gate};
use crate::{Error, HollowSymmetric, Result};

fn check_binary(a: &HollowSymmetric) -> Result<()> {
    if a.upper().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidInput("CZ layer matrix must be binary".into()));
    }
    Ok(())
}

/// `Π CZ^{A_ij} = e^{-iπa/4} GZZ(πA/4) Π S^{b_i}`.
pub fn compile_cz_layer(a: &HollowSymmetric) -> Result<Circuit> {
    check_binary(a)?;
    let n = a.n();
    let mut c = Circuit::new(n);
    if a.is_zero() {
        return Ok(c);
    }
    let edges = a.upper_sum();
    c.add(Gate::Phase(Angle::Pi(-(edges % 8.0) / 4.0)));
    c.add(Gate::GZZ(a.scale(std::f64::consts::FRAC_PI_4)));
    for q in 0..n {
        push_s_power(&mut c, q, a.row_sum(q) as usize);
    }
    Ok(c)
}

fn push_s_power(c: &mut Circuit, q: usize, k: usize) {
    match k % 4 {
        1 => c.add(Gate::S(q)),
        2 => {
            c.add(Gate::S(q));
            c.add(Gate::S(q));
        }
        3 => c.add(Gate::Sdg(q)),
        _ => {}
    }
}

/// Prepares the graph state `Π CZ^{A_ij}|+ⁿ⟩` from `|0ⁿ⟩`.
pub fn graph_state_circuit(a: &HollowSymmetric) -> Result<Circuit> {
    let mut c = Circuit::new(a.n());
    for q in 0..a.n() {
        c.add(Gate::H(q));
    }
    c.extend(&compile_cz_layer(a)?)?;
    Ok(c)
}

/// Table form of a directed CX layer. Columns are bitsets with bit `q` for
/// qubit `q`. Column `j` of `t_cz` is the fan-out controlled on qubit `j`
/// (empty when it has no targets); column `j` of `t_h` sits just before it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CZTables {
    pub n: usize,
    pub t_cz: Vec<u64>,
    pub t_h: Vec<u64>,
}

impl CZTables {
    pub fn cz(&self, q: usize, j: usize) -> bool {
        (self.t_cz[j] >> q) & 1 == 1
    }

    pub fn h(&self, q: usize, j: usize) -> bool {
        (self.t_h[j] >> q) & 1 == 1
    }

    /// Cost of one GZZ per fan-out.
    pub fn fanout_cost(&self) -> usize {
        self.t_cz.iter().map(|c| support_cost(c.count_ones() as usize)).sum()
    }

    /// Steps in table order without any pooling.
    pub fn steps(&self) -> Vec<CxStep> {
        let mut out = Vec::new();
        for j in 0..self.n {
            if self.t_h[j] != 0 {
                out.push(CxStep::Hadamard(bits(self.t_h[j])));
            }
            let col = self.t_cz[j];
            if col != 0 {
                let ctrl = col.trailing_zeros() as usize;
                let pairs: Vec<_> = bits(col & !(1 << ctrl)).into_iter().map(|t| (ctrl, t)).collect();
                out.push(group_step(pairs));
            }
        }
        out
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|q| (mask >> q) & 1 == 1).collect()
}

fn support_cost(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Fan-out tables with Hadamards in their initial places: qubit `i > 0` gets
/// one before the first fan-out and one just before its own fan-out.
pub fn cx_layer_to_tables(b: &BitMatrix) -> Result<CZTables> {
    let n = b.n();
    if !b.is_lower_unitriangular() {
        return Err(Error::InvalidInput("directed CX layer must be lower triangular with unit diagonal".into()));
    }
    let mut t_cz = vec![0u64; n];
    for (j, col) in t_cz.iter_mut().enumerate() {
        let targets = (j + 1..n).filter(|&i| b.get(i, j)).fold(0u64, |m, i| m | (1 << i));
        if targets != 0 {
            *col = targets | (1 << j);
        }
    }
    let mut t_h = vec![0u64; n];
    if b.to_rows().iter().enumerate().any(|(i, r)| r.iter().take(i).any(|&v| v == 1)) {
        for i in 1..n {
            t_h[0] |= 1 << i;
            t_h[i] |= 1 << i;
        }
    }
    Ok(CZTables { n, t_cz, t_h })
}

/// Hadamard moves: cancel pairs with nothing between them, push right when
/// no fan-out follows, otherwise pull left up to the last fan-out that
/// targets the qubit but never past an earlier moved Hadamard.
pub fn move_hadamards(t: &CZTables) -> CZTables {
    let mut out = t.clone();
    let n = t.n;
    let mut h_max = 0usize;
    for i in 1..n {
        if !t.h(i, i) {
            continue;
        }
        out.t_h[i] &= !(1 << i);
        let last_target = (0..i).rev().find(|&j| t.cz(i, j));
        match last_target.map(|j| j + 1) {
            None => out.t_h[0] &= !(1 << i),
            Some(c) if c == i => {
                if (i..n).any(|j| t.cz(i, j)) {
                    out.t_h[i] |= 1 << i;
                } else {
                    out.t_h[n - 1] |= 1 << i;
                }
            }
            Some(c) => {
                h_max = h_max.max(c);
                out.t_h[h_max] |= 1 << i;
            }
        }
    }
    out
}

/// One step of a compiled directed CX layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CxStep {
    Hadamard(Vec<usize>),
    Cz(usize, usize),
    /// Commuting CZs pooled into one GZZ.
    Pool(Vec<(usize, usize)>),
}

fn group_step(pairs: Vec<(usize, usize)>) -> CxStep {
    if pairs.len() == 1 {
        CxStep::Cz(pairs[0].0, pairs[0].1)
    } else {
        CxStep::Pool(pairs)
    }
}

impl CxStep {
    fn support(pairs: &[(usize, usize)]) -> usize {
        pairs.iter().fold(0u64, |m, &(a, b)| m | (1 << a) | (1 << b)).count_ones() as usize
    }

    pub fn encoding_cost(&self) -> usize {
        match self {
            CxStep::Hadamard(_) => 0,
            CxStep::Cz(..) => 1,
            CxStep::Pool(p) => support_cost(Self::support(p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CxGrouping {
    pub n: usize,
    /// In table order.
    pub steps: Vec<CxStep>,
}

impl CxGrouping {
    pub fn cz_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, CxStep::Cz(..))).count()
    }

    pub fn pool_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, CxStep::Pool(_))).count()
    }

    pub fn encoding_cost(&self) -> usize {
        self.steps.iter().map(CxStep::encoding_cost).sum()
    }

    /// Circuit realising the layer, i.e. the steps run in reverse.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n);
        for step in self.steps.iter().rev() {
            match step {
                CxStep::Hadamard(qs) => qs.iter().for_each(|&q| c.add(Gate::H(q))),
                CxStep::Cz(a, b) => c.add(Gate::CZ(*a, *b)),
                CxStep::Pool(pairs) => {
                    let mut a = HollowSymmetric::zeros(self.n);
                    for &(i, j) in pairs {
                        a.set(i, j, 1.0);
                    }
                    let piece = compile_cz_layer(&a).expect("binary by construction");
                    c.extend(&piece).expect("same width");
                }
            }
        }
        c
    }
}

struct Group {
    slot: usize,
    pairs: Vec<(usize, usize)>,
    /// Summed one-GZZ-per-fan-out cost of the pieces in the group.
    budget: usize,
}

impl Group {
    /// Adds a fan-out unless the pooled cost would exceed the budget.
    fn try_join(&mut self, pairs: Vec<(usize, usize)>, cost: usize) -> Option<Vec<(usize, usize)>> {
        let mut merged = self.pairs.clone();
        merged.extend(&pairs);
        if support_cost(CxStep::support(&merged)) > self.budget + cost {
            return Some(pairs);
        }
        self.pairs = merged;
        self.budget += cost;
        None
    }
}

/// Pool fan-outs. A fan-out with no Hadamard on its support just before it
/// joins the previous group. A blocked fan-out with a single Hadamard right
/// after it splits off the CZ to that qubit and carries the rest one step
/// right, where the next fan-out joins it. A join is skipped when it would
/// cost more than leaving the pieces apart.
pub fn move_cz(t: &CZTables) -> CxGrouping {
    let n = t.n;
    let mut groups: Vec<Group> = Vec::new();
    let fan = |ctrl: usize, mask: u64| -> Vec<(usize, usize)> {
        bits(mask & !(1 << ctrl)).into_iter().map(|q| (ctrl, q)).collect()
    };
    for i in 0..n {
        let col = t.t_cz[i];
        if col.count_ones() < 2 {
            continue;
        }
        let ctrl = col.trailing_zeros() as usize;
        let cost = support_cost(col.count_ones() as usize);
        let blocked = col & t.t_h[i] != 0;
        let mut pairs = fan(ctrl, col);
        if !blocked {
            if let Some(g) = groups.last_mut() {
                if g.slot <= i && (g.slot + 1..=i).all(|k| col & t.t_h[k] == 0) {
                    match g.try_join(pairs, cost) {
                        None => continue,
                        Some(p) => pairs = p,
                    }
                }
            }
            groups.push(Group { slot: i, pairs, budget: cost });
            continue;
        }
        if let Some(g) = groups.last_mut().filter(|g| g.slot == i) {
            match g.try_join(pairs, cost) {
                None => continue,
                Some(p) => pairs = p,
            }
            groups.push(Group { slot: i, pairs, budget: cost });
            continue;
        }
        let right = if i + 1 < n { t.t_h[i + 1] } else { 0 };
        if right.count_ones() == 1 && right & col != 0 && right != 1 << ctrl {
            let h = right.trailing_zeros() as usize;
            groups.push(Group { slot: i, pairs: vec![(ctrl, h)], budget: 1 });
            let rest = col & !right;
            if rest.count_ones() >= 2 {
                groups.push(Group { slot: i + 1, pairs: fan(ctrl, rest), budget: cost - 1 });
            }
        } else {
            groups.push(Group { slot: i, pairs, budget: cost });
        }
    }

    let mut steps = Vec::new();
    let mut next = groups.into_iter().peekable();
    for s in 0..n {
        if t.t_h[s] != 0 {
            steps.push(CxStep::Hadamard(bits(t.t_h[s])));
        }
        while let Some(g) = next.next_if(|g| g.slot == s) {
            steps.push(group_step(g.pairs));
        }
    }
    CxGrouping { n, steps }
}

/// Full pipeline for a directed CX layer. Upper-triangular layers are
/// compiled on the reversed qubit order.
pub fn compile_cx_layer(b: &BitMatrix) -> Result<CxGrouping> {
    let n = b.n();
    if b.is_lower_unitriangular() {
        let t = move_hadamards(&cx_layer_to_tables(b)?);
        return Ok(move_cz(&t));
    }
    if !b.is_upper_unitriangular() {
        return Err(Error::InvalidInput("CX layer is not triangular with unit diagonal".into()));
    }
    let g = compile_cx_layer(&b.reversed())?;
    let flip = |q: usize| n - 1 - q;
    let steps = g
        .steps
        .into_iter()
        .map(|s| match s {
            CxStep::Hadamard(qs) => {
                let mut qs: Vec<_> = qs.into_iter().map(flip).collect();
                qs.sort_unstable();
                CxStep::Hadamard(qs)
            }
            CxStep::Cz(a, b) => CxStep::Cz(flip(a), flip(b)),
            CxStep::Pool(p) => CxStep::Pool(p.into_iter().map(|(a, b)| (flip(a), flip(b))).collect()),
        })
        .collect();
    Ok(CxGrouping { n, steps })
}

/// All-ones lower triangle.
pub fn fully_directed(n: usize) -> BitMatrix {
    let mut b = BitMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            b.set(i, j, true);
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LayerCost {
    pub encoding_cost: usize,
    pub cz: usize,
    pub gzz: usize,
}

/// Closed-form cost of a compiled fully directed layer. The pooled GZZ on
/// `n − 2i` qubits costs `(n−2i)(n−2i−1)/2`; for even `n` the last pair is
/// already one of the CZs.
pub fn fully_directed_cost(n: usize) -> Result<LayerCost> {
    if n < 2 {
        return Err(Error::InvalidInput("a directed CX layer needs n >= 2".into()));
    }
    let cz = n / 2;
    let gzz = (n - 1) / 2;
    let pooled: usize = (0..gzz).map(|i| support_cost(n - 2 * i)).sum();
    Ok(LayerCost { encoding_cost: cz + pooled, cz, gzz })
}

/// GZZ and CZ totals of a compiled Clifford in layer form with two fully
/// directed CX layers and two CZ layers.
pub fn clifford_layer_counts(n: usize) -> Result<(usize, usize)> {
    let l = fully_directed_cost(n)?;
    Ok((2 * l.gzz + 2, 2 * l.cz))
}

/// Clifford in the layer form `X Z CX CZ S H CX CZ S`, listed in time order.
/// Absent layers are identities. Bit and exponent vectors have one entry per
/// qubit.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BruhatLayers {
    pub n: usize,
    #[serde(default)]
    pub x: Option<Vec<u8>>,
    #[serde(default)]
    pub z: Option<Vec<u8>>,
    #[serde(default)]
    pub cx1: Option<BitMatrix>,
    #[serde(default)]
    pub cz1: Option<HollowSymmetric>,
    #[serde(default)]
    pub s1: Option<Vec<u8>>,
    #[serde(default)]
    pub h: Option<Vec<u8>>,
    #[serde(default)]
    pub cx2: Option<BitMatrix>,
    #[serde(default)]
    pub cz2: Option<HollowSymmetric>,
    #[serde(default)]
    pub s2: Option<Vec<u8>>,
}

impl BruhatLayers {
    fn local(&self, v: &Option<Vec<u8>>, what: &str) -> Result<Vec<u8>> {
        match v {
            None => Ok(vec![0; self.n]),
            Some(v) if v.len() == self.n => Ok(v.clone()),
            Some(v) => Err(Error::InvalidInput(format!("layer {what} has {} entries for {} qubits", v.len(), self.n))),
        }
    }

    fn cx(&self, b: &Option<BitMatrix>) -> Result<Circuit> {
        match b {
            None => Ok(Circuit::new(self.n)),
            Some(b) if b.n() != self.n => Err(Error::DimensionMismatch { expected: self.n, got: b.n() }),
            Some(b) => Ok(compile_cx_layer(b)?.to_circuit()),
        }
    }

    fn cz(&self, a: &Option<HollowSymmetric>) -> Result<Circuit> {
        match a {
            None => Ok(Circuit::new(self.n)),
            Some(a) if a.n() != self.n => Err(Error::DimensionMismatch { expected: self.n, got: a.n() }),
            Some(a) => compile_cz_layer(a),
        }
    }
}

/// Compile the entangling layers and pass the local layers through.
pub fn compile_clifford(l: &BruhatLayers) -> Result<Circuit> {
    let n = l.n;
    let mut c = Circuit::new(n);
    for (q, &v) in l.local(&l.x, "x")?.iter().enumerate() {
        if v % 2 == 1 {
            c.add(Gate::X(q));
        }
    }
    for (q, &v) in l.local(&l.z, "z")?.iter().enumerate() {
        push_s_power(&mut c, q, 2 * (v as usize % 2));
    }
    c.extend(&l.cx(&l.cx1)?)?;
    c.extend(&l.cz(&l.cz1)?)?;
    for (q, &v) in l.local(&l.s1, "s1")?.iter().enumerate() {
        push_s_power(&mut c, q, v as usize);
    }
    for (q, &v) in l.local(&l.h, "h")?.iter().enumerate() {
        if v % 2 == 1 {
            c.add(Gate::H(q));
        }
    }
    c.extend(&l.cx(&l.cx2)?)?;
    c.extend(&l.cz(&l.cz2)?)?;
    for (q, &v) in l.local(&l.s2, "s2")?.iter().enumerate() {
        push_s_power(&mut c, q, v as usize);
    }
    Ok(c)
}

/// The CX layers as `GCX` gates and CZ layers as `CZ` gates, for checking a
/// compiled Clifford against.
pub fn clifford_reference(l: &BruhatLayers) -> Result<Circuit> {
    let n = l.n;
    let mut c = Circuit::new(n);
    let cz_gates = |c: &mut Circuit, a: &Option<HollowSymmetric>| {
        if let Some(a) = a {
            for (i, j) in a.support() {
                c.add(Gate::CZ(i, j));
            }
        }
    };
    for (q, &v) in l.local(&l.x, "x")?.iter().enumerate() {
        if v % 2 == 1 {
            c.add(Gate::X(q));
        }
    }
    for (q, &v) in l.local(&l.z, "z")?.iter().enumerate() {
        push_s_power(&mut c, q, 2 * (v as usize % 2));
    }
    if let Some(b) = &l.cx1 {
        c.push(Gate::GCX(b.clone()))?;
    }
    cz_gates(&mut c, &l.cz1);
    for (q, &v) in l.local(&l.s1, "s1")?.iter().enumerate() {
        push_s_power(&mut c, q, v as usize);
    }
    for (q, &v) in l.local(&l.h, "h")?.iter().enumerate() {
        if v % 2 == 1 {
            c.add(Gate::H(q));
        }
    }
    if let Some(b) = &l.cx2 {
        c.push(Gate::GCX(b.clone()))?;
    }
    cz_gates(&mut c, &l.cz2);
    for (q, &v) in l.local(&l.s2, "s2")?.iter().enumerate() {
        push_s_power(&mut c, q, v as usize);
    }
    Ok(c)
}
