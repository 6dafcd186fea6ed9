//! Time-optimal decomposition of a target `M` over the encoding frame.
//!
//! The LP is `min 1ᵀλ` subject to `Σ_m λ_m m mᵀ = M`, `λ ≥ 0`, with one
//! column per canonical encoding. Columns are generated from their index
//! during pricing, never stored.

mod mip;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::frame::{pair_count, pairs, Encoding};
use crate::{Error, HollowSymmetric, Result};

pub use mip::{solve_mip, MipOutcome};
pub use simplex::PivotRule;
use simplex::{ColumnSource, LpProblem, SimplexSettings};

/// Default lower bound on a single evolution time, seconds.
pub const DEFAULT_EPS_L: f64 = 27e-6;
/// Largest qubit count accepted by the solvers by default.
pub const DEFAULT_MAX_N: usize = 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub pivot_rule: PivotRule,
    /// Lower bound on nonzero times. `None` means 27 µs.
    pub eps_l: Option<f64>,
    /// Upper bound on times. `None` means 1.5 · max |M_ij|.
    pub eps_u: Option<f64>,
    pub alpha: f64,
    pub mip_rel_gap: f64,
    pub node_limit: usize,
    pub max_n: usize,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            pivot_rule: PivotRule::DantzigWithBlandFallback,
            eps_l: None,
            eps_u: None,
            alpha: 0.5,
            mip_rel_gap: 0.6,
            node_limit: 20_000,
            max_n: DEFAULT_MAX_N,
            max_iter: 1_000_000,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if let (Some(l), Some(u)) = (self.eps_l, self.eps_u) {
            if !(0.0 <= l && l < u) {
                return Err(Error::InvalidInput(format!("need 0 <= eps_l < eps_u, got {l}, {u}")));
            }
        }
        if self.eps_l.is_some_and(|l| l < 0.0) || self.eps_u.is_some_and(|u| !(u > 0.0)) {
            return Err(Error::InvalidInput("eps bounds must be non-negative".into()));
        }
        if !(self.mip_rel_gap >= 0.0) || !(self.feas_tol > 0.0) {
            return Err(Error::InvalidInput("gap and tolerance must be non-negative".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> SimplexSettings {
        SimplexSettings {
            pivot_rule: self.pivot_rule,
            opt_tol: 1e-10,
            feas_tol: self.feas_tol * 1e-2,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub index: u64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub terms: Vec<Term>,
    pub total_time: f64,
    pub encoding_cost: usize,
}

impl Decomposition {
    pub fn new(n: usize, mut terms: Vec<Term>) -> Self {
        terms.retain(|t| t.lambda != 0.0);
        let total_time = terms.iter().fold(0.0, |acc, t| acc + t.lambda);
        let encoding_cost = terms.len();
        Self { n, terms, total_time, encoding_cost }
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new())
    }

    pub fn encoding(&self, t: &Term) -> Encoding {
        Encoding::new(self.n, t.index).expect("term index fits its qubit count")
    }

    /// `Σ_m λ_m m mᵀ`.
    pub fn reconstruct(&self) -> HollowSymmetric {
        let mut out = HollowSymmetric::zeros(self.n);
        for t in &self.terms {
            let m = self.encoding(t);
            for (k, (i, j)) in pairs(self.n).enumerate() {
                out.upper_mut()[k] += t.lambda * m.sign(i) * m.sign(j);
            }
        }
        out
    }

    /// `‖M − Σ λ_m m mᵀ‖∞`.
    pub fn residual(&self, target: &HollowSymmetric) -> f64 {
        self.reconstruct().upper().iter().zip(target.upper()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > 63 {
            return Err(Error::InvalidInput(format!("qubit count {} out of range", self.n)));
        }
        for t in &self.terms {
            Encoding::new(self.n, t.index)?;
            if !(t.lambda >= 0.0) {
                return Err(Error::InvalidInput(format!("negative time {}", t.lambda)));
            }
        }
        Ok(())
    }
}

/// Frame columns `m mᵀ` generated from the encoding index.
pub(crate) struct FrameSource {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl FrameSource {
    pub(crate) fn new(n: usize) -> Self {
        Self { n, pairs: pairs(n).collect() }
    }

    #[inline]
    fn sign(&self, j: usize, q: usize) -> f64 {
        if q + 1 < self.n && (j >> q) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

impl ColumnSource for FrameSource {
    fn rows(&self) -> usize {
        self.pairs.len()
    }
    fn cols(&self) -> usize {
        1 << (self.n - 1)
    }
    fn column(&self, j: usize, out: &mut [f64]) {
        for (o, &(a, b)) in out.iter_mut().zip(&self.pairs) {
            *o = self.sign(j, a) * self.sign(j, b);
        }
    }
    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (v, &(a, b)) in y.iter().zip(&self.pairs) {
            acc += self.sign(j, a) * self.sign(j, b) * v;
        }
        acc
    }
}

/// Entrywise `M_ij = A_ij / J_ij`.
pub fn hadamard_quotient(a: &HollowSymmetric, j: &HollowSymmetric) -> Result<HollowSymmetric> {
    if a.n() != j.n() {
        return Err(Error::DimensionMismatch { expected: j.n(), got: a.n() });
    }
    let mut m = HollowSymmetric::zeros(a.n());
    for (k, (p, q)) in pairs(a.n()).enumerate() {
        let (av, jv) = (a.upper()[k], j.upper()[k]);
        if av != 0.0 {
            if jv == 0.0 {
                return Err(Error::VanishingCoupling { i: p + 1, j: q + 1, value: av });
            }
            m.upper_mut()[k] = av / jv;
        }
    }
    Ok(m)
}

fn check_size(n: usize, opts: &SolveOptions) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 qubits, got {n}")));
    }
    let cap = opts.max_n.min(24);
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// Basic solutions carry a few ulps of noise; values this small relative to
/// the target scale are treated as zero.
const DROP_REL: f64 = 1e-13;

/// Minimum total time decomposition.
pub fn solve_lp(target: &HollowSymmetric, opts: &SolveOptions) -> Result<Decomposition> {
    opts.validate()?;
    let n = target.n();
    check_size(n, opts)?;
    let scale = target.max_abs();
    if scale == 0.0 {
        return Ok(Decomposition::empty(n));
    }
    let src = FrameSource::new(n);
    let ncols = src.cols();
    let problem = LpProblem {
        source: &src,
        cost: vec![1.0; ncols],
        lower: vec![0.0; ncols],
        upper: vec![f64::INFINITY; ncols],
        rhs: target.upper().iter().map(|v| v / scale).collect(),
    };
    let res = simplex::solve(&problem, opts.simplex())?;
    let terms = res
        .x
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > DROP_REL)
        .map(|(j, &v)| Term { index: j as u64, lambda: v * scale })
        .collect();
    let d = Decomposition::new(n, terms);
    let resid = d.residual(target);
    if resid > opts.feas_tol * scale.max(1.0) {
        return Err(Error::Numerical(format!("reconstruction residual {resid:e} above tolerance")));
    }
    debug_assert!(d.encoding_cost <= pair_count(n));
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub kept: Decomposition,
    pub dropped_time: f64,
    /// `¼ Σ_{i≠j} |J_ij| Σ_{m∈C} λ_m`.
    pub bound: f64,
    /// `max_x |sin(½ δ(x))|` with `δ` the GZZ phase of the dropped terms.
    pub exact: Option<f64>,
}

/// Largest qubit count for which the exact truncation error is enumerated.
pub const EXACT_TRUNCATION_CAP: usize = 16;

/// Drop every term with `λ ≤ eps` and bound the resulting error.
pub fn truncate(d: &Decomposition, j: &HollowSymmetric, eps: f64) -> Result<Truncation> {
    if d.n != j.n() {
        return Err(Error::DimensionMismatch { expected: j.n(), got: d.n });
    }
    let n = d.n;
    let (drop, keep): (Vec<Term>, Vec<Term>) = d.terms.iter().partition(|t| t.lambda <= eps);
    let dropped = Decomposition::new(n, drop);
    let abs_sum: f64 = j.upper().iter().map(|v| v.abs()).sum();
    let bound = 0.5 * abs_sum * dropped.total_time;
    let exact = (n <= EXACT_TRUNCATION_CAP).then(|| {
        let coeff = dropped.reconstruct().hadamard(j);
        crate::circuit::gzz_phases(&coeff).phases.iter().map(|p| (0.5 * p).sin().abs()).fold(0.0, f64::max)
    });
    Ok(Truncation { kept: Decomposition::new(n, keep), dropped_time: dropped.total_time, bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_source_dot_matches_column() {
        for n in 2..7 {
            let src = FrameSource::new(n);
            let y: Vec<f64> = (0..src.rows()).map(|k| (k as f64 * 0.37).sin()).collect();
            let mut col = vec![0.0; src.rows()];
            for j in 0..src.cols() {
                src.column(j, &mut col);
                let direct: f64 = col.iter().zip(&y).map(|(a, b)| a * b).sum();
                assert!((direct - src.dot(j, &y)).abs() < 1e-12);
                let m = crate::frame::outer_product(&Encoding::new(n, j as u64).unwrap());
                assert_eq!(m.upper(), &col[..]);
            }
        }
    }

    #[test]
    fn hadamard_quotient_examples() {
        let a = HollowSymmetric::new(2, vec![std::f64::consts::FRAC_PI_4]).unwrap();
        let j = HollowSymmetric::new(2, vec![200.0 * std::f64::consts::PI]).unwrap();
        let m = hadamard_quotient(&a, &j).unwrap();
        assert!((m.upper()[0] - 1.0 / 800.0).abs() < 1e-18);
        let m = hadamard_quotient(&j, &j).unwrap();
        assert_eq!(m.upper(), &[1.0]);
        let zero = HollowSymmetric::zeros(2);
        assert!(hadamard_quotient(&zero, &zero).unwrap().is_zero());
        let err = hadamard_quotient(&a, &zero).unwrap_err();
        assert!(matches!(err, Error::VanishingCoupling { i: 1, j: 2, .. }));
    }

    #[test]
    fn lp_small_examples() {
        let opts = SolveOptions::default();
        let d = solve_lp(&HollowSymmetric::new(2, vec![0.3]).unwrap(), &opts).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms[0].index, 0);
        assert!((d.total_time - 0.3).abs() < 1e-15);

        let d = solve_lp(&HollowSymmetric::new(3, vec![1.0; 3]).unwrap(), &opts).unwrap();
        assert_eq!(d.terms, vec![Term { index: 0, lambda: 1.0 }]);

        let d = solve_lp(&HollowSymmetric::new(3, vec![1.0, -1.0, -1.0]).unwrap(), &opts).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.encoding(&d.terms[0]).signs(), vec![-1, -1, 1]);
        assert!((d.total_time - 1.0).abs() < 1e-12);

        let d = solve_lp(&HollowSymmetric::zeros(5), &opts).unwrap();
        assert_eq!(d, Decomposition::empty(5));
    }

    #[test]
    fn lp_rejects_oversized() {
        let opts = SolveOptions::default();
        assert!(matches!(solve_lp(&HollowSymmetric::zeros(15), &opts), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn truncation_extremes() {
        let target = HollowSymmetric::new(3, vec![0.2, -0.1, 0.05]).unwrap();
        let j = HollowSymmetric::new(3, vec![3.0, 1.0, 2.0]).unwrap();
        let d = solve_lp(&target, &SolveOptions::default()).unwrap();
        let t = truncate(&d, &j, 0.0).unwrap();
        assert_eq!((t.bound, t.exact), (0.0, Some(0.0)));
        assert_eq!(t.kept, d);
        let all = truncate(&d, &j, f64::INFINITY).unwrap();
        assert!((all.bound - 0.25 * 12.0 * d.total_time).abs() < 1e-12);
        assert!(all.kept.terms.is_empty());
        assert!(all.exact.unwrap() <= all.bound);
    }
}
