//! Brute-force simulators used as verification oracles.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::{qbit, qmask, Circuit, Gate};
use crate::{Error, HollowSymmetric, Result};

pub type C64 = Complex64;

/// Largest qubit count for dense unitaries.
pub const DENSE_CAP: usize = 10;
/// Largest qubit count for phase vectors.
pub const DIAGONAL_CAP: usize = 20;

/// Diagonal operator as a vector of `2ⁿ` phases, indexed by basis state.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPhases {
    pub n: usize,
    pub phases: Vec<f64>,
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

impl DiagonalPhases {
    pub fn zeros(n: usize) -> Self {
        Self { n, phases: vec![0.0; 1 << n] }
    }

    /// Largest phase deviation after removing the best single global phase,
    /// estimated from basis state 0.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        let g = self.phases[0] - other.phases[0];
        self.phases.iter().zip(&other.phases).map(|(a, b)| wrap(a - b - g).abs()).fold(0.0, f64::max)
    }

    pub fn equal_up_to_global_phase(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.distance(other) <= tol
    }

    pub fn to_unitary(&self) -> Unitary {
        let d = 1usize << self.n;
        let mut u = Unitary::zeros(self.n);
        for x in 0..d {
            u.data[x * d + x] = C64::from_polar(1.0, self.phases[x]);
        }
        u
    }
}

/// Phases of `GZZ(A)`: `Σ_{i<j} A_ij (-1)^{x_i + x_j}`.
pub fn gzz_phases(a: &HollowSymmetric) -> DiagonalPhases {
    let n = a.n();
    let g = Gate::GZZ(a.clone());
    let phases = (0..1usize << n).map(|x| g.diagonal_phase(n, x).unwrap()).collect();
    DiagonalPhases { n, phases }
}

/// Phase vector of a circuit of diagonal gates and X gates. X gates are
/// tracked as a relabelling of basis states; the net X pattern must be the
/// identity.
pub fn simulate_diagonal(c: &Circuit) -> Result<DiagonalPhases> {
    let n = c.n();
    if n > DIAGONAL_CAP {
        return Err(Error::CapExceeded { n, cap: DIAGONAL_CAP });
    }
    let dim = 1usize << n;
    let mut phases = vec![0.0; dim];
    // Operator so far is X^flip · D.
    let mut flip = 0usize;
    for g in c.gates() {
        match g {
            Gate::X(q) => flip ^= qmask(n, *q),
            _ if g.is_diagonal() => {
                for (x, p) in phases.iter_mut().enumerate() {
                    *p += g.diagonal_phase(n, x ^ flip).unwrap();
                }
            }
            _ => return Err(Error::NonDiagonal(g.name().to_string())),
        }
    }
    if flip != 0 {
        return Err(Error::NonDiagonal("net X layer".into()));
    }
    Ok(DiagonalPhases { n, phases })
}

/// Dense `2ⁿ × 2ⁿ` matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    pub n: usize,
    pub data: Vec<C64>,
}

impl Unitary {
    pub fn zeros(n: usize) -> Self {
        let d = 1usize << n;
        Self { n, data: vec![C64::new(0.0, 0.0); d * d] }
    }

    pub fn identity(n: usize) -> Self {
        let d = 1usize << n;
        let mut u = Self::zeros(n);
        for i in 0..d {
            u.data[i * d + i] = C64::new(1.0, 0.0);
        }
        u
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Entry at row `r`, column `c`.
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[c * self.dim() + r]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        let d = self.dim();
        self.data[c * d + r] = v;
    }

    pub fn column(&self, c: usize) -> &[C64] {
        let d = self.dim();
        &self.data[c * d..(c + 1) * d]
    }

    /// `‖U†U − I‖∞`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let dot: C64 = self.column(a).iter().zip(self.column(b)).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Whether `min_φ ‖U − e^{iφ}V‖∞ ≤ tol`, with `φ` taken from the entry of
/// `V` with the largest modulus.
pub fn equal_up_to_global_phase(u: &Unitary, v: &Unitary, tol: f64) -> bool {
    if u.n != v.n {
        return false;
    }
    let (k, _) =
        v.data.iter().enumerate().fold((0, -1.0), |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best });
    if v.data[k].norm() == 0.0 || u.data[k].norm() == 0.0 {
        return u.data.iter().zip(&v.data).all(|(a, b)| (a - b).norm() <= tol);
    }
    let phase = (u.data[k] / v.data[k]).arg();
    let rot = C64::from_polar(1.0, phase);
    u.data.iter().zip(&v.data).all(|(a, b)| (a - rot * b).norm() <= tol)
}

fn single_qubit_matrix(g: &Gate) -> Option<[C64; 4]> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let h = FRAC_1_SQRT_2;
    // Row-major [a, b, c, d] for [[a, b], [c, d]].
    Some(match g {
        Gate::H(_) => [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        Gate::X(_) => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        Gate::SX(_) => [c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)],
        Gate::SXdg(_) => [c(0.5, -0.5), c(0.5, 0.5), c(0.5, 0.5), c(0.5, -0.5)],
        Gate::RX(a, _) => {
            let e = C64::from_polar(1.0, a.radians());
            let one = c(1.0, 0.0);
            [(one + e) * 0.5, (one - e) * 0.5, (one - e) * 0.5, (one + e) * 0.5]
        }
        Gate::RY(a, _) => {
            let t = a.radians();
            let ph = C64::from_polar(1.0, t / 2.0);
            let (s, co) = (t / 2.0).sin_cos();
            [ph * co, -ph * s, ph * s, ph * co]
        }
        _ => return None,
    })
}

fn apply_single(state: &mut [C64], n: usize, q: usize, m: &[C64; 4]) {
    let mask = qmask(n, q);
    for x in 0..state.len() {
        if x & mask == 0 {
            let (a, b) = (state[x], state[x | mask]);
            state[x] = m[0] * a + m[1] * b;
            state[x | mask] = m[2] * a + m[3] * b;
        }
    }
}

/// A gate prepared for repeated application to state vectors.
enum Prepared {
    Single(usize, [C64; 4]),
    Diagonal(Vec<C64>),
    Permutation(Vec<usize>),
}

fn prepare(g: &Gate, n: usize) -> Prepared {
    let dim = 1usize << n;
    if let Some(m) = single_qubit_matrix(g) {
        return Prepared::Single(g.qubits()[0], m);
    }
    if g.is_diagonal() {
        return Prepared::Diagonal((0..dim).map(|x| C64::from_polar(1.0, g.diagonal_phase(n, x).unwrap())).collect());
    }
    let perm = match g {
        Gate::CX(c, t) => (0..dim).map(|x| if qbit(x, n, *c) == 1 { x ^ qmask(n, *t) } else { x }).collect(),
        Gate::GCX(b) => (0..dim)
            .map(|x| {
                let packed = (0..n).fold(0u64, |acc, q| acc | ((qbit(x, n, q) as u64) << q));
                let y = b.apply_packed(packed);
                (0..n).fold(0usize, |acc, q| acc | (((y >> q) & 1) as usize) << (n - 1 - q))
            })
            .collect(),
        _ => unreachable!("gate {} has no simulation rule", g.name()),
    };
    Prepared::Permutation(perm)
}

fn apply_prepared(p: &Prepared, n: usize, state: &mut [C64], scratch: &mut [C64]) {
    match p {
        Prepared::Single(q, m) => apply_single(state, n, *q, m),
        Prepared::Diagonal(d) => state.iter_mut().zip(d).for_each(|(s, z)| *s *= z),
        Prepared::Permutation(perm) => {
            for (x, &y) in perm.iter().enumerate() {
                scratch[y] = state[x];
            }
            state.copy_from_slice(scratch);
        }
    }
}

/// Dense unitary of a circuit, gates applied in order.
pub fn simulate_dense(c: &Circuit) -> Result<Unitary> {
    let n = c.n();
    if n > DENSE_CAP {
        return Err(Error::CapExceeded { n, cap: DENSE_CAP });
    }
    let d = 1usize << n;
    let mut u = Unitary::identity(n);
    let mut scratch = vec![C64::new(0.0, 0.0); d];
    for g in c.gates() {
        let p = prepare(g, n);
        for col in u.data.chunks_mut(d) {
            apply_prepared(&p, n, col, &mut scratch);
        }
    }
    Ok(u)
}

/// Apply a circuit to a state vector.
pub fn simulate_state(c: &Circuit, initial: &[C64]) -> Result<Vec<C64>> {
    let n = c.n();
    if n > DIAGONAL_CAP {
        return Err(Error::CapExceeded { n, cap: DIAGONAL_CAP });
    }
    if initial.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, got: initial.len() });
    }
    let mut state = initial.to_vec();
    let mut scratch = state.clone();
    for g in c.gates() {
        apply_prepared(&prepare(g, n), n, &mut state, &mut scratch);
    }
    Ok(state)
}
