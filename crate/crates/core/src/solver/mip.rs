//! Branch-and-bound for the bounded-time decomposition
//!
//! ```text
//! min  α·1ᵀλ + (1−α)·1ᵀb
//! s.t. Σ λ_m m mᵀ = M,   ε_l b_m ≤ λ_m ≤ ε_u b_m,   b ∈ {0,1}
//! ```
//!
//! In a relaxation each undecided `b_m` is replaced by its smallest feasible
//! value `λ_m/ε_u`, so an undecided column costs `α + (1−α)/ε_u` per unit of
//! time and is capped at `ε_u`. Fixing `b_m = 1` imposes `λ_m ≥ ε_l` and adds
//! the constant `1 − α`; fixing `b_m = 0` removes the column.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::simplex::{self, ColumnSource, LpProblem};
use super::{check_size, Decomposition, FrameSource, SolveOptions, Term, DEFAULT_EPS_L};
use crate::{Error, HollowSymmetric, Result};

#[derive(Clone, Debug, Serialize)]
pub struct MipOutcome {
    pub decomposition: Decomposition,
    pub objective: f64,
    pub best_bound: f64,
    /// `(objective − best_bound) / objective` at termination.
    pub gap: f64,
    pub nodes: usize,
    /// Whether the search ended by the gap criterion rather than the node
    /// limit.
    pub converged: bool,
    pub eps_l: f64,
    pub eps_u: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    Zero,
    One,
}

struct Node {
    fix: Vec<Fix>,
    bound: f64,
    lambda: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.bound == o.bound
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // Min-heap on the bound.
    fn cmp(&self, o: &Self) -> Ordering {
        o.bound.total_cmp(&self.bound)
    }
}

struct Context<'a> {
    src: &'a FrameSource,
    rhs: Vec<f64>,
    /// Target scale: λ in seconds is `scale ×` the LP variable.
    scale: f64,
    alpha: f64,
    eps_l: f64,
    eps_u: f64,
    opts: &'a SolveOptions,
}

const TOL: f64 = 1e-9;

impl Context<'_> {
    fn free_cost(&self) -> f64 {
        let b = if self.eps_u.is_finite() { (1.0 - self.alpha) / self.eps_u } else { 0.0 };
        self.alpha * self.scale + b
    }

    /// Relaxation bound and scaled times, or `None` when infeasible.
    fn relax(&self, fix: &[Fix]) -> Result<Option<(f64, Vec<f64>)>> {
        let ncols = self.src.cols();
        let free = self.free_cost();
        let mut cost = vec![0.0; ncols];
        let mut lower = vec![0.0; ncols];
        let mut upper = vec![self.eps_u; ncols];
        let mut ones = 0usize;
        for j in 0..ncols {
            match fix[j] {
                Fix::Free => cost[j] = free,
                Fix::Zero => upper[j] = 0.0,
                Fix::One => {
                    cost[j] = self.alpha * self.scale;
                    lower[j] = self.eps_l;
                    ones += 1;
                }
            }
        }
        let norm = cost.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(f64::MIN_POSITIVE);
        let scaled: Vec<f64> = cost.iter().map(|c| c / norm).collect();
        let problem = LpProblem { source: self.src, cost: scaled, lower, upper, rhs: self.rhs.clone() };
        match simplex::solve(&problem, self.opts.simplex()) {
            Ok(r) => {
                let obj = r.objective * norm;
                Ok(Some((obj + (1.0 - self.alpha) * ones as f64, r.x)))
            }
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Objective of `λ` read as an integer solution, when it is one.
    fn as_incumbent(&self, lambda: &[f64]) -> Option<f64> {
        let mut count = 0usize;
        let mut total = 0.0;
        for &v in lambda {
            if v > TOL * 1e-3 {
                if v < self.eps_l - TOL || v > self.eps_u + TOL {
                    return None;
                }
                count += 1;
                total += v;
            }
        }
        Some(self.alpha * self.scale * total + (1.0 - self.alpha) * count as f64)
    }

    /// Most fractional undecided column.
    fn branch_column(&self, fix: &[Fix], lambda: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &v) in lambda.iter().enumerate() {
            if fix[j] != Fix::Free || v <= TOL * 1e-3 {
                continue;
            }
            let score = if self.eps_u.is_finite() {
                let b = v / self.eps_u;
                if b >= 1.0 - TOL {
                    continue;
                }
                b.min(1.0 - b)
            } else {
                // b can shrink to zero; columns below ε_l are the worst.
                if v < self.eps_l {
                    1.0
                } else {
                    0.5
                }
            };
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }
}

/// Bounded-time decomposition by best-bound branch and bound.
pub fn solve_mip(target: &HollowSymmetric, opts: &SolveOptions) -> Result<MipOutcome> {
    opts.validate()?;
    let n = target.n();
    check_size(n, opts)?;
    let max = target.max_abs();
    let eps_l = opts.eps_l.unwrap_or(DEFAULT_EPS_L);
    let eps_u = opts.eps_u.unwrap_or(1.5 * max);
    if max == 0.0 {
        return Ok(MipOutcome {
            decomposition: Decomposition::empty(n),
            objective: 0.0,
            best_bound: 0.0,
            gap: 0.0,
            nodes: 0,
            converged: true,
            eps_l,
            eps_u,
        });
    }
    if !(0.0 <= eps_l && eps_l < eps_u) {
        return Err(Error::InvalidInput(format!("need 0 <= eps_l < eps_u, got {eps_l}, {eps_u}")));
    }
    let src = FrameSource::new(n);
    let ctx = Context {
        src: &src,
        rhs: target.upper().iter().map(|v| v / max).collect(),
        scale: max,
        alpha: opts.alpha,
        eps_l: eps_l / max,
        eps_u: eps_u / max,
        opts,
    };

    let ncols = src.cols();
    let root_fix = vec![Fix::Free; ncols];
    let Some((root_bound, root_lambda)) = ctx.relax(&root_fix)? else {
        return Err(Error::Infeasible(format!("no decomposition with times in [{eps_l:e}, {eps_u:e}] s")));
    };
    let mut heap = BinaryHeap::new();
    heap.push(Node { fix: root_fix, bound: root_bound, lambda: root_lambda });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut converged = false;
    let gap_ok = |inc: f64, lb: f64| inc - lb <= opts.mip_rel_gap * inc.abs() + 1e-12;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if gap_ok(*inc, node.bound) {
                heap.push(node);
                converged = true;
                break;
            }
        }
        if nodes >= opts.node_limit {
            heap.push(node);
            break;
        }
        nodes += 1;
        if let Some(obj) = ctx.as_incumbent(&node.lambda) {
            if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                incumbent = Some((obj, node.lambda.clone()));
            }
        }
        let Some(col) = ctx.branch_column(&node.fix, &node.lambda) else {
            continue;
        };
        for choice in [Fix::One, Fix::Zero] {
            let mut fix = node.fix.clone();
            fix[col] = choice;
            if let Some((bound, lambda)) = ctx.relax(&fix)? {
                if incumbent.as_ref().map_or(true, |(inc, _)| bound < *inc - 1e-12) {
                    heap.push(Node { fix, bound, lambda });
                }
            }
        }
    }
    if heap.is_empty() {
        converged = true;
    }

    let Some((objective, lambda)) = incumbent else {
        return Err(Error::Infeasible(if converged {
            format!("no decomposition with times in [{eps_l:e}, {eps_u:e}] s")
        } else {
            format!("node limit {} reached without a feasible decomposition", opts.node_limit)
        }));
    };
    let best_bound = heap.peek().map_or(objective, |n| n.bound.min(objective));
    let terms = lambda
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > TOL * 1e-3)
        .map(|(j, &v)| Term { index: j as u64, lambda: (v * max).clamp(eps_l, eps_u) })
        .collect();
    let decomposition = Decomposition::new(n, terms);
    let resid = decomposition.residual(target);
    if resid > opts.feas_tol * max.max(1.0) {
        return Err(Error::Numerical(format!("reconstruction residual {resid:e} above tolerance")));
    }
    let gap = if objective != 0.0 { (objective - best_bound) / objective.abs() } else { 0.0 };
    Ok(MipOutcome { decomposition, objective, best_bound, gap, nodes, converged, eps_l, eps_u })
}
