//! Givens rotation layers and the factorised molecular-dynamics circuit.
//!
//! One two-qubit Givens rotation is local Cliffords around two `ZZ(−φ)`
//! gates. On a layer of disjoint neighbour pairs each set of parallel
//! `ZZ(−φ)` is one `GZZ(φ/2 · A_NN)` up to global phase.

use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Circuit, Gate, Unitary, C64};
use crate::{Error, HollowSymmetric, Result};

/// `G(φ)` on `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn givens_reference(phi: f64) -> Unitary {
    let (s, c) = phi.sin_cos();
    let mut u = Unitary::identity(2);
    u.set(1, 1, C64::new(c, 0.0));
    u.set(1, 2, C64::new(s, 0.0));
    u.set(2, 1, C64::new(-s, 0.0));
    u.set(2, 2, C64::new(c, 0.0));
    u
}

/// Coupling matrix of the pairs `(1,2), (3,4), …`.
pub fn neighbor_pairs(n: usize) -> HollowSymmetric {
    let mut a = HollowSymmetric::zeros(n);
    for p in 0..n / 2 {
        a.set(2 * p, 2 * p + 1, 1.0);
    }
    a
}

/// Gates of one Givens rotation on `(a, b)` up to the first `ZZ`, and after
/// the second `ZZ`.
fn prologue(c: &mut Circuit, a: usize, b: usize) {
    c.add(Gate::S(a));
    c.add(Gate::S(b));
    c.add(Gate::H(b));
    c.add(Gate::SX(a));
    c.add(Gate::Sdg(b));
    c.add(Gate::H(a));
    c.add(Gate::H(b));
}

fn middle(c: &mut Circuit, a: usize, b: usize) {
    c.add(Gate::H(a));
    c.add(Gate::H(b));
}

fn epilogue(c: &mut Circuit, a: usize, b: usize) {
    c.add(Gate::SXdg(a));
    c.add(Gate::S(b));
    c.add(Gate::H(b));
    c.add(Gate::Sdg(a));
    c.add(Gate::Sdg(b));
}

/// Two-qubit Givens rotation with two `ZZ(−φ)` gates.
pub fn givens_compile(phi: f64) -> Circuit {
    let mut c = Circuit::new(2);
    let zz = Gate::ZZ(Angle::Rad(-phi), 0, 1);
    prologue(&mut c, 0, 1);
    c.add(zz.clone());
    middle(&mut c, 0, 1);
    c.add(zz);
    epilogue(&mut c, 0, 1);
    c
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "a Givens layer pairs neighbouring qubits and needs an even n, got {n}"
        )));
    }
    Ok(())
}

fn push_layer(c: &mut Circuit, phi: f64) {
    let n = c.n();
    let pairs: Vec<(usize, usize)> = (0..n / 2).map(|p| (2 * p, 2 * p + 1)).collect();
    let layer = Gate::GZZ(neighbor_pairs(n).scale(phi / 2.0));
    pairs.iter().for_each(|&(a, b)| prologue(c, a, b));
    c.add(layer.clone());
    pairs.iter().for_each(|&(a, b)| middle(c, a, b));
    c.add(layer);
    pairs.iter().for_each(|&(a, b)| epilogue(c, a, b));
}

/// Givens rotations with a common angle on all neighbour pairs, each `ZZ`
/// sub-layer as one `GZZ`.
pub fn givens_layer_compile(phi: f64, n: usize) -> Result<Circuit> {
    check_even(n)?;
    let mut c = Circuit::new(n);
    push_layer(&mut c, phi);
    Ok(c)
}

/// Inputs of the factorised evolution
/// `Ĝ(φ_m) [Π_k GZZ(A_k) Ĝ(φ_k)] R̂_Z(θ₀,θ₁) Ĝ(φ₀)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicsSpec {
    pub n: usize,
    pub m: usize,
    /// `m − 1` coupling matrices, in radians.
    pub couplings: Vec<HollowSymmetric>,
    /// `m + 1` Givens angles `φ₀ … φ_m`.
    pub phis: Vec<f64>,
    pub theta0: f64,
    pub theta1: f64,
}

/// Circuit in time order: `Ĝ(φ₀)`, the `RZ` layer (`θ₀` on odd, `θ₁` on even
/// qubits counting from 1), `Ĝ(φ₁)`, then `GZZ(A_k) Ĝ(φ_{k+1})` for each `k`.
pub fn dynamics_circuit(spec: &DynamicsSpec) -> Result<Circuit> {
    let n = spec.n;
    check_even(n)?;
    if spec.m == 0 {
        return Err(Error::InvalidInput("need m >= 1".into()));
    }
    if spec.couplings.len() != spec.m - 1 {
        return Err(Error::DimensionMismatch { expected: spec.m - 1, got: spec.couplings.len() });
    }
    if spec.phis.len() != spec.m + 1 {
        return Err(Error::DimensionMismatch { expected: spec.m + 1, got: spec.phis.len() });
    }
    if let Some(a) = spec.couplings.iter().find(|a| a.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: a.n() });
    }
    let mut c = Circuit::new(n);
    push_layer(&mut c, spec.phis[0]);
    for q in 0..n {
        let theta = if q % 2 == 0 { spec.theta0 } else { spec.theta1 };
        c.add(Gate::RZ(Angle::Rad(theta), q));
    }
    push_layer(&mut c, spec.phis[1]);
    for (k, a) in spec.couplings.iter().enumerate() {
        c.add(Gate::GZZ(a.clone()));
        push_layer(&mut c, spec.phis[k + 2]);
    }
    Ok(c)
}
