//! Bounded-variable revised simplex with an explicit basis inverse.
//!
//! Two phases: artificial variables first absorb the initial residual, then
//! the true costs are optimised. Pricing is Dantzig's rule, switching to
//! Bland's rule after a run of degenerate pivots.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Columns of the constraint matrix, possibly generated on demand.
pub(crate) trait ColumnSource {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn column(&self, j: usize, out: &mut [f64]);
    fn dot(&self, j: usize, y: &[f64]) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotRule {
    Bland,
    DantzigWithBlandFallback,
}

pub(crate) struct LpProblem<'a> {
    pub source: &'a dyn ColumnSource,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct LpResult {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexSettings {
    pub pivot_rule: PivotRule,
    pub opt_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 50;
const STALL_LIMIT: usize = 40;

struct Solver<'a, 'p> {
    p: &'p LpProblem<'a>,
    m: usize,
    ncols: usize,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    /// Position in `basis`, or `usize::MAX` when nonbasic.
    pos: Vec<usize>,
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    iterations: usize,
    settings: SimplexSettings,
    col: Vec<f64>,
}

impl<'a, 'p> Solver<'a, 'p> {
    fn column(&self, j: usize, out: &mut [f64]) {
        if j < self.ncols {
            self.p.source.column(j, out);
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j - self.ncols] = self.art_sign[j - self.ncols];
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.ncols {
            self.p.source.dot(j, y)
        } else {
            self.art_sign[j - self.ncols] * y[j - self.ncols]
        }
    }

    fn binv_times(&self, v: &[f64], out: &mut [f64]) {
        let m = self.m;
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.binv[k * m..(k + 1) * m];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut b = DMatrix::zeros(m, m);
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                b[(i, k)] = col[i];
            }
        }
        let inv = b.try_inverse().ok_or_else(|| Error::Numerical("basis matrix became singular".into()))?;
        for k in 0..m {
            for i in 0..m {
                self.binv[k * m + i] = inv[(k, i)];
            }
        }
        // Recompute basic values from the nonbasic ones.
        let mut r = self.p.rhs.clone();
        for j in 0..self.ncols + m {
            if self.pos[j] == usize::MAX && self.x[j] != 0.0 {
                self.column(j, &mut col);
                for i in 0..m {
                    r[i] -= col[i] * self.x[j];
                }
            }
        }
        let mut xb = vec![0.0; m];
        self.binv_times(&r, &mut xb);
        for (k, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[k];
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let piv = w[r];
        for i in 0..m {
            self.binv[r * m + i] /= piv;
        }
        for k in 0..m {
            if k != r && w[k] != 0.0 {
                let f = w[k];
                for i in 0..m {
                    self.binv[k * m + i] -= f * self.binv[r * m + i];
                }
            }
        }
        self.pivots_since_refactor += 1;
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                for i in 0..m {
                    y[i] += c * self.binv[k * m + i];
                }
            }
        }
        y
    }

    /// Optimise `cost` over the columns accepted by `allow`.
    fn run(&mut self, cost: &[f64], allow: &dyn Fn(usize) -> bool) -> Result<()> {
        let m = self.m;
        let total = self.ncols + m;
        let mut w = vec![0.0; m];
        let mut stall = 0usize;
        loop {
            if self.iterations >= self.settings.max_iter {
                return Err(Error::IterationLimit(self.iterations));
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let bland = self.settings.pivot_rule == PivotRule::Bland || stall >= STALL_LIMIT;
            let y = self.duals(cost);
            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..total {
                if self.pos[j] != usize::MAX || !allow(j) || self.upper[j] <= self.lower[j] {
                    continue;
                }
                let d = cost[j] - self.dot(j, &y);
                let at_upper = self.x[j] >= self.upper[j];
                let (score, dir) = if !at_upper && d < -self.settings.opt_tol {
                    (-d, 1.0)
                } else if at_upper && d > self.settings.opt_tol {
                    (d, -1.0)
                } else {
                    continue;
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if score > best {
                    best = score;
                    enter = Some((j, dir));
                }
            }
            let Some((q, dir)) = enter else {
                return Ok(());
            };
            self.iterations += 1;

            let mut col = std::mem::take(&mut self.col);
            self.column(q, &mut col);
            self.binv_times(&col, &mut w);
            self.col = col;

            // Ratio test.
            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_key = (f64::INFINITY, 0.0f64, usize::MAX);
            for k in 0..m {
                let rate = dir * w[k];
                let j = self.basis[k];
                let limit = if rate > PIVOT_TOL {
                    ((self.x[j] - self.lower[j]) / rate, false)
                } else if rate < -PIVOT_TOL && self.upper[j].is_finite() {
                    ((self.upper[j] - self.x[j]) / -rate, true)
                } else {
                    continue;
                };
                let t = limit.0.max(0.0);
                // Prefer the smallest step; among ties, Bland takes the
                // lowest variable index and Dantzig the largest pivot.
                let better = if t < leave_key.0 - 1e-12 {
                    true
                } else if t <= leave_key.0 + 1e-12 {
                    if bland {
                        j < leave_key.2
                    } else {
                        rate.abs() > leave_key.1
                    }
                } else {
                    false
                };
                if better {
                    leave_key = (t, rate.abs(), j);
                    leave = Some((k, limit.1));
                }
            }
            if leave_key.0 < theta {
                theta = leave_key.0;
            } else {
                leave = None;
            }
            if theta.is_infinite() {
                return Err(Error::Numerical("linear program is unbounded".into()));
            }

            for k in 0..m {
                let j = self.basis[k];
                self.x[j] -= dir * theta * w[k];
            }
            self.x[q] += dir * theta;
            stall = if theta <= 1e-12 { stall + 1 } else { 0 };

            match leave {
                None => {
                    // Bound flip.
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.upper[out] } else { self.lower[out] };
                    self.pos[out] = usize::MAX;
                    self.basis[r] = q;
                    self.pos[q] = r;
                    self.pivot(r, &w);
                }
            }
        }
    }

    /// Pivot basic artificials out wherever a structural column can replace
    /// them; rows where none can are redundant.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        let mut col = vec![0.0; m];
        let mut w = vec![0.0; m];
        for r in 0..m {
            if self.basis[r] < self.ncols {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.pos[j] != usize::MAX {
                    continue;
                }
                let v = self.p.source.dot(j, &row).abs();
                let fixed = self.upper[j] <= self.lower[j];
                let score = if fixed { v * 1e-3 } else { v };
                if v > 1e-7 && best.map_or(true, |(_, s)| score > s) {
                    best = Some((j, score));
                }
            }
            if let Some((q, _)) = best {
                self.column(q, &mut col);
                self.binv_times(&col, &mut w);
                let out = self.basis[r];
                self.x[out] = 0.0;
                self.pos[out] = usize::MAX;
                self.basis[r] = q;
                self.pos[q] = r;
                self.pivot(r, &w);
            }
        }
    }
}

pub(crate) fn solve(p: &LpProblem<'_>, settings: SimplexSettings) -> Result<LpResult> {
    let m = p.source.rows();
    let ncols = p.source.cols();
    assert_eq!(p.rhs.len(), m);
    assert_eq!(p.cost.len(), ncols);
    if p.lower.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidInput("lower bounds must be finite".into()));
    }
    if p.lower.iter().zip(&p.upper).any(|(l, u)| l > u) {
        return Err(Error::Infeasible("a variable has lower bound above upper bound".into()));
    }

    let mut x: Vec<f64> = p.lower.clone();
    let mut r = p.rhs.clone();
    let mut col = vec![0.0; m];
    for (j, &l) in p.lower.iter().enumerate() {
        if l != 0.0 {
            p.source.column(j, &mut col);
            for i in 0..m {
                r[i] -= col[i] * l;
            }
        }
    }
    let art_sign: Vec<f64> = r.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    x.extend(r.iter().map(|v| v.abs()));
    let mut lower = p.lower.clone();
    lower.extend(std::iter::repeat(0.0).take(m));
    let mut upper = p.upper.clone();
    upper.extend(std::iter::repeat(f64::INFINITY).take(m));
    let mut pos = vec![usize::MAX; ncols + m];
    let basis: Vec<usize> = (ncols..ncols + m).collect();
    for (k, &j) in basis.iter().enumerate() {
        pos[j] = k;
    }
    let mut binv = vec![0.0; m * m];
    for k in 0..m {
        binv[k * m + k] = art_sign[k];
    }

    let mut s = Solver {
        p,
        m,
        ncols,
        art_sign,
        lower,
        upper,
        x,
        basis,
        pos,
        binv,
        pivots_since_refactor: 0,
        iterations: 0,
        settings,
        col: vec![0.0; m],
    };

    let structural = |j: usize| j < ncols;
    let mut phase1 = vec![0.0; ncols + m];
    phase1[ncols..].iter_mut().for_each(|c| *c = 1.0);
    s.run(&phase1, &structural)?;
    s.refactor()?;
    let infeas: f64 = s.x[ncols..].iter().map(|v| v.abs()).sum();
    let scale = p.rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if infeas > settings.feas_tol * scale {
        return Err(Error::Infeasible(format!("phase one ended with residual {infeas:e}")));
    }
    s.drive_out_artificials();
    for j in ncols..ncols + m {
        s.upper[j] = 0.0;
        if s.pos[j] == usize::MAX {
            s.x[j] = 0.0;
        }
    }
    s.refactor()?;

    let mut phase2 = p.cost.clone();
    phase2.extend(std::iter::repeat(0.0).take(m));
    s.run(&phase2, &structural)?;
    s.refactor()?;

    let mut x = s.x[..ncols].to_vec();
    for (j, v) in x.iter_mut().enumerate() {
        // Clip round-off outside the bounds.
        *v = v.clamp(p.lower[j], p.upper[j]);
    }
    let objective = x.iter().zip(&p.cost).map(|(a, c)| a * c).sum();
    Ok(LpResult { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense {
        m: usize,
        cols: Vec<Vec<f64>>,
    }

    impl ColumnSource for Dense {
        fn rows(&self) -> usize {
            self.m
        }
        fn cols(&self) -> usize {
            self.cols.len()
        }
        fn column(&self, j: usize, out: &mut [f64]) {
            out.copy_from_slice(&self.cols[j]);
        }
        fn dot(&self, j: usize, y: &[f64]) -> f64 {
            self.cols[j].iter().zip(y).map(|(a, b)| a * b).sum()
        }
    }

    fn settings() -> SimplexSettings {
        SimplexSettings {
            pivot_rule: PivotRule::DantzigWithBlandFallback,
            opt_tol: 1e-10,
            feas_tol: 1e-9,
            max_iter: 10_000,
        }
    }

    #[test]
    fn small_bounded_lp() {
        // min -x0 - 2x1  s.t. x0 + x1 + s = 4, 0<=x0<=3, 0<=x1<=2, s>=0.
        let src = Dense { m: 1, cols: vec![vec![1.0], vec![1.0], vec![1.0]] };
        let p = LpProblem {
            source: &src,
            cost: vec![-1.0, -2.0, 0.0],
            lower: vec![0.0; 3],
            upper: vec![3.0, 2.0, f64::INFINITY],
            rhs: vec![4.0],
        };
        for rule in [PivotRule::Bland, PivotRule::DantzigWithBlandFallback] {
            let r = solve(&p, SimplexSettings { pivot_rule: rule, ..settings() }).unwrap();
            assert!((r.objective + 6.0).abs() < 1e-12, "{rule:?}: {r:?}");
            assert!((r.x[0] - 2.0).abs() < 1e-12 && (r.x[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_infeasibility() {
        let src = Dense { m: 1, cols: vec![vec![1.0]] };
        let p = LpProblem { source: &src, cost: vec![1.0], lower: vec![0.0], upper: vec![1.0], rhs: vec![2.0] };
        assert!(matches!(solve(&p, settings()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn nonzero_lower_bounds_and_redundant_rows() {
        // Two identical rows: x0 + x1 = 3 twice, x0 >= 1, min x1 + 2x0.
        let src = Dense { m: 2, cols: vec![vec![1.0, 1.0], vec![1.0, 1.0]] };
        let p = LpProblem {
            source: &src,
            cost: vec![2.0, 1.0],
            lower: vec![1.0, 0.0],
            upper: vec![f64::INFINITY; 2],
            rhs: vec![3.0, 3.0],
        };
        let r = solve(&p, settings()).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-12 && (r.x[1] - 2.0).abs() < 1e-12, "{r:?}");
    }
}
