//! Ordering of encodings into a physical schedule of X layers and Ising
//! evolutions.
//!
//! A tour `s₁, …, s_k` of flip patterns is realised as
//! `X^{s₁} E(t₁) X^{s₁⊕s₂} E(t₂) … E(t_k) X^{s_k}`, so the X-gate count is
//! the Hamming length of the closed tour through the all-plus encoding.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::solver::{Decomposition, Term};
use crate::{Error, HollowSymmetric, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    /// Terms in the order given.
    IndexOrder,
    NearestNeighbor,
    NnTwoOpt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// X layer applied before this evolution, qubit 1 first.
    pub flip: String,
    /// Evolution time, seconds.
    pub t: f64,
    /// Encoding index in effect during the evolution.
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    pub steps: Vec<Step>,
    pub trailing_flip: String,
    pub x_gates: usize,
}

impl Schedule {
    /// X layers including the trailing one.
    pub fn layer_count(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().fold(0.0, |acc, s| acc + s.t)
    }
}

fn flip_string(n: usize, bits: u64) -> String {
    (0..n).map(|q| if (bits >> q) & 1 == 1 { '1' } else { '0' }).collect()
}

fn dist(a: u64, b: u64) -> usize {
    (a ^ b).count_ones() as usize
}

/// Hamming length of the closed tour from and back to index 0.
pub fn tour_length(order: &[u64]) -> usize {
    let mut prev = 0;
    let mut total = 0;
    for &c in order {
        total += dist(prev, c);
        prev = c;
    }
    total + dist(prev, 0)
}

fn nearest_neighbor(cities: &[u64]) -> Vec<usize> {
    let mut left: Vec<usize> = (0..cities.len()).collect();
    let mut tour = Vec::with_capacity(cities.len());
    let mut cur = 0u64;
    while !left.is_empty() {
        let (k, _) = left.iter().enumerate().min_by_key(|(_, &c)| dist(cur, cities[c])).expect("nonempty");
        let c = left.remove(k);
        cur = cities[c];
        tour.push(c);
    }
    tour
}

fn two_opt(cities: &[u64], tour: &mut [usize]) {
    let k = tour.len();
    let at = |t: &[usize], p: usize| -> u64 {
        if p == 0 || p == k + 1 {
            0
        } else {
            cities[t[p - 1]]
        }
    };
    loop {
        let mut improved = false;
        // Positions 1..=k in the closed tour [depot, t₁…t_k, depot].
        for i in 1..k {
            for j in i + 1..=k {
                let before = dist(at(tour, i - 1), at(tour, i)) + dist(at(tour, j), at(tour, j + 1));
                let after = dist(at(tour, i - 1), at(tour, j)) + dist(at(tour, i), at(tour, j + 1));
                if after < before {
                    tour[i - 1..j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Visit order of the decomposition's terms.
pub fn tour(d: &Decomposition, heuristic: Heuristic) -> Vec<usize> {
    let terms: Vec<&Term> = d.terms.iter().collect();
    let cities: Vec<u64> = terms.iter().map(|t| t.index).collect();
    let given: Vec<usize> = (0..cities.len()).collect();
    if heuristic == Heuristic::IndexOrder {
        return given;
    }
    let len = |t: &[usize]| tour_length(&t.iter().map(|&c| cities[c]).collect::<Vec<_>>());
    let mut order = nearest_neighbor(&cities);
    if len(&given) < len(&order) {
        order = given;
    }
    if heuristic == Heuristic::NnTwoOpt {
        two_opt(&cities, &mut order);
    }
    order
}

/// Order the encodings and derive the X layers. Zero-time terms are dropped.
pub fn order_encodings(d: &Decomposition, heuristic: Heuristic) -> Schedule {
    let kept = Decomposition::new(d.n, d.terms.iter().copied().filter(|t| t.lambda > 0.0).collect());
    let order = tour(&kept, heuristic);
    let mut prev = 0u64;
    let mut steps = Vec::with_capacity(order.len());
    let mut x_gates = 0;
    for &k in &order {
        let t = kept.terms[k];
        x_gates += dist(prev, t.index);
        steps.push(Step { flip: flip_string(d.n, prev ^ t.index), t: t.lambda, index: t.index });
        prev = t.index;
    }
    x_gates += dist(prev, 0);
    Schedule { n: d.n, steps, trailing_flip: flip_string(d.n, prev), x_gates }
}

fn push_flips(c: &mut Circuit, bits: u64) {
    for q in 0..c.n() {
        if (bits >> q) & 1 == 1 {
            c.add(Gate::X(q));
        }
    }
}

fn parse_flip(s: &str) -> u64 {
    s.chars().enumerate().fold(0, |acc, (q, ch)| acc | (((ch == '1') as u64) << q))
}

/// Circuit with adjacent X layers merged.
pub fn schedule_circuit(s: &Schedule, coupling: &HollowSymmetric) -> Result<Circuit> {
    if coupling.n() != s.n {
        return Err(Error::DimensionMismatch { expected: s.n, got: coupling.n() });
    }
    let mut c = Circuit::new(s.n);
    if s.steps.is_empty() {
        return Ok(c);
    }
    for step in &s.steps {
        push_flips(&mut c, parse_flip(&step.flip));
        c.add(Gate::Evolve { coupling: coupling.clone(), time: step.t });
    }
    push_flips(&mut c, parse_flip(&s.trailing_flip));
    Ok(c)
}

/// Merged-layer circuit realising `GZZ(J ∘ Σ λ m mᵀ)`.
pub fn emit_gzz_circuit(d: &Decomposition, coupling: &HollowSymmetric, heuristic: Heuristic) -> Result<Circuit> {
    schedule_circuit(&order_encodings(d, heuristic), coupling)
}

/// Unmerged form: every evolution sits between its own pair of X layers.
pub fn emit_gzz_circuit_raw(d: &Decomposition, coupling: &HollowSymmetric) -> Result<Circuit> {
    if coupling.n() != d.n {
        return Err(Error::DimensionMismatch { expected: d.n, got: coupling.n() });
    }
    let mut c = Circuit::new(d.n);
    for t in d.terms.iter().filter(|t| t.lambda > 0.0) {
        push_flips(&mut c, t.index);
        c.add(Gate::Evolve { coupling: coupling.clone(), time: t.lambda });
        push_flips(&mut c, t.index);
    }
    Ok(c)
}
