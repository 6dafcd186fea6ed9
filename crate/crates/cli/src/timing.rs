//! Physical evolution time of a compiled circuit on a given coupling matrix.

use std::f64::consts::PI;

use gzz_forge::circuit::CostReport;
use gzz_forge::solver::{hadamard_quotient, solve_lp};
use gzz_forge::{Circuit, Error, Gate, HollowSymmetric, Result, SolveOptions};
use serde::Serialize;

fn pair_time(angle: f64, j: &HollowSymmetric, a: usize, b: usize) -> Result<f64> {
    let jv = j.get(a, b);
    if jv == 0.0 {
        return Err(Error::VanishingCoupling { i: a + 1, j: b + 1, value: angle });
    }
    Ok((angle / jv).abs())
}

/// Summed LP time of every entangling gate. A `GZZ` coupling `A` needs the
/// LP time of `A/J`; two-qubit gates are priced as the `GZZ` they equal.
pub fn total_time(c: &Circuit, j: &HollowSymmetric, opts: &SolveOptions) -> Result<f64> {
    if j.n() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: j.n() });
    }
    let mut t = 0.0;
    for g in c.gates() {
        t += match g {
            Gate::GZZ(a) => solve_lp(&hadamard_quotient(a, j)?, opts)?.total_time,
            Gate::GCRZ(a) => solve_lp(&hadamard_quotient(&a.scale(0.25), j)?, opts)?.total_time,
            Gate::CZ(a, b) | Gate::CX(a, b) => pair_time(PI / 4.0, j, *a, *b)?,
            Gate::CS(a, b) => pair_time(PI / 8.0, j, *a, *b)?,
            Gate::CRZ(th, a, b) => pair_time(th.radians() / 4.0, j, *a, *b)?,
            Gate::ZZ(th, a, b) => pair_time(th.radians() / 2.0, j, *a, *b)?,
            Gate::Evolve { time, .. } => *time,
            _ => 0.0,
        };
    }
    Ok(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitReport {
    pub gzz: usize,
    pub cz: usize,
    pub encoding_cost: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
}

pub fn circuit_report(c: &Circuit, j: Option<&HollowSymmetric>, opts: &SolveOptions) -> Result<CircuitReport> {
    let CostReport { gzz, cz, encoding_cost, .. } = c.cost_report();
    let total_time = j.map(|j| total_time(c, j, opts)).transpose()?;
    Ok(CircuitReport { gzz, cz, encoding_cost, total_time })
}
