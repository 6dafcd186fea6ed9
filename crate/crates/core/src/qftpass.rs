//! Quantum Fourier transform without the terminal swaps, compiled with the
//! fully directed layer scheme: `H, CS, H, GCRZ, H, CS, H, GCRZ, …`.
//!
//! Qubit `a` picks up `CRZ(2π/2^{b−a+1})` from every later qubit `b`. Pairs
//! `(a, a+1)` with `a` even stay a CS; the couplings of `a` and `a+1` to all
//! qubits beyond `a+1` form one controlled-phase layer.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{gcrz_decompose, Angle, Circuit, Gate, Unitary, C64, DENSE_CAP};
use crate::{Error, HollowSymmetric, Result};

/// Dense QFT with bit-reversed output, `⟨rev(y)|U|x⟩ = 2^{-n/2} e^{2πixy/2ⁿ}`.
pub fn qft_reference(n: usize) -> Result<Unitary> {
    if n == 0 || n > DENSE_CAP {
        return Err(Error::CapExceeded { n, cap: DENSE_CAP });
    }
    let dim = 1usize << n;
    let norm = (dim as f64).sqrt().recip();
    let rev = |y: usize| (0..n).fold(0, |acc, b| acc | (((y >> b) & 1) << (n - 1 - b)));
    let mut u = Unitary::zeros(n);
    for x in 0..dim {
        for y in 0..dim {
            let theta = 2.0 * PI * ((x * y) % dim) as f64 / dim as f64;
            u.set(rev(y), x, C64::from_polar(norm, theta));
        }
    }
    Ok(u)
}

/// The `(n−j+1)`-qubit coupling block of the `j`-th layer (`1 ≤ j ≤ n−2`).
/// Its first two rows couple to the rest with `2π·2^{-k}` and `2π·2^{-k+1}`
/// at local column `k ≥ 2`.
pub fn build_a(n: usize, j: usize) -> Result<HollowSymmetric> {
    if n < 3 || j == 0 || j > n - 2 {
        return Err(Error::InvalidInput(format!("layer index {j} out of range for n = {n}")));
    }
    let m = n - j + 1;
    let mut a = HollowSymmetric::zeros(m);
    for k in 2..m {
        a.set(0, k, 2.0 * PI * 2f64.powi(-(k as i32)));
        a.set(1, k, 2.0 * PI * 2f64.powi(-(k as i32) + 1));
    }
    Ok(a)
}

fn push_swaps(c: &mut Circuit, n: usize) {
    for a in 0..n / 2 {
        let b = n - 1 - a;
        c.add(Gate::CX(a, b));
        c.add(Gate::CX(b, a));
        c.add(Gate::CX(a, b));
    }
}

/// Compiled QFT with `GCRZ` gates. The block built by `build_a` holds twice
/// the controlled-phase angles, so each layer is `GCRZ(A_j/2)` placed on
/// qubits `j−1 … n−1`.
pub fn qft_compile(n: usize, with_swaps: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidInput("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    let mut a = 0;
    while a < n {
        c.add(Gate::H(a));
        if a + 1 < n {
            c.add(Gate::CS(a, a + 1));
            c.add(Gate::H(a + 1));
            if a + 2 < n {
                let block = build_a(n, a + 1)?.scale(0.5).embed(n, a);
                c.add(Gate::GCRZ(block));
            }
        }
        a += 2;
    }
    if with_swaps {
        push_swaps(&mut c, n);
    }
    Ok(c)
}

/// As `qft_compile` with every `GCRZ` lowered to a phase and one `GZZ`. The
/// local `RZ` of each layer move to the circuit ends: those on the pair
/// qubits, whose Hadamards are done, to the end, the rest to the start.
pub fn qft_compile_gzz(n: usize, with_swaps: bool) -> Result<Circuit> {
    let native = qft_compile(n, false)?;
    let mut head = vec![0.0; n];
    let mut tail = vec![0.0; n];
    let mut body = Circuit::new(n);
    let mut pair_start = 0;
    for g in native.gates() {
        match g {
            Gate::GCRZ(a) => {
                for piece in gcrz_decompose(a).gates() {
                    match piece {
                        Gate::RZ(angle, q) if *q <= pair_start + 1 => tail[*q] += angle.radians(),
                        Gate::RZ(angle, q) => head[*q] += angle.radians(),
                        other => body.add(other.clone()),
                    }
                }
                pair_start += 2;
            }
            other => body.add(other.clone()),
        }
    }
    let mut c = Circuit::new(n);
    for (q, &t) in head.iter().enumerate() {
        if t != 0.0 {
            c.add(Gate::RZ(Angle::Rad(t), q));
        }
    }
    c.extend(&body)?;
    for (q, &t) in tail.iter().enumerate() {
        if t != 0.0 {
            c.add(Gate::RZ(Angle::Rad(t), q));
        }
    }
    if with_swaps {
        push_swaps(&mut c, n);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QftCensus {
    pub cs: usize,
    pub gcrz: usize,
    pub h: usize,
}

/// Expected gate counts: `⌈(n−1)/2⌉` CS, `⌊(n−1)/2⌋` GCRZ, `n` H.
pub fn qft_census(n: usize) -> QftCensus {
    let m = n.saturating_sub(1);
    QftCensus { cs: m.div_ceil(2), gcrz: m / 2, h: n }
}
