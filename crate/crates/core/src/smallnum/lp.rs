//! Dense two-phase simplex with Bland's rule.

use serde::Serialize;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpResult {
    pub feasible: bool,
    /// Convex weights, one per point. Present even when infeasible (the
    /// closest point found by phase one).
    pub weights: Vec<f64>,
    /// `max_i |target_i - sum_j w_j p_j[i]|`.
    pub residual: f64,
    /// Separating hyperplane `(a, b)` with `a.p_j + b <= 0` for every point
    /// and `a.target + b > 0`; only set when infeasible.
    pub certificate: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub enum LpStatus {
    Optimal { x: Vec<f64>, objective: f64 },
    /// Phase one ended with positive infeasibility. `dual` certifies it:
    /// `dual.A_j <= 0` for all columns and `dual.b > 0`.
    Infeasible { x: Vec<f64>, infeasibility: f64, dual: Vec<f64> },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize, tol: f64) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j] < -tol) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14 * (1.0 + lr.abs())
                                || (ratio <= lr + 1e-14 * (1.0 + lr.abs())
                                    && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Minimizes `c.x` subject to `A x = b`, `x >= 0`. Phase one is declared
/// successful when its optimum is at most `feas_tol`.
pub fn simplex(a: &[Vec<f64>], b: &[f64], c: &[f64], feas_tol: f64) -> LpStatus {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let scale = a
        .iter()
        .flatten()
        .chain(b)
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut rows = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        signs.push(s);
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            row[j] = s * a[i][j];
        }
        row[n + i] = 1.0;
        row[width] = s * b[i];
        rows.push(row);
    }
    let mut cost = vec![0.0; width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width] -= row[width];
    }
    let mut t = Tableau { rows, cost, basis: (n..n + m).collect(), width };
    let red_tol = 1e-12 * scale;
    t.optimize(width, red_tol);

    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).max(0.0);
        }
    }
    let infeasibility = -t.cost[width];
    if infeasibility > feas_tol {
        let dual = (0..m).map(|i| signs[i] * (1.0 - t.cost[n + i])).collect();
        return LpStatus::Infeasible { x, infeasibility, dual };
    }

    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                t.pivot(i, j);
            }
        }
    }
    for j in 0..=width {
        t.cost[j] = if j < n { c[j] } else { 0.0 };
    }
    for i in 0..m {
        let bv = t.basis[i];
        let cb = if bv < n { c[bv] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..=width {
                t.cost[j] -= cb * t.rows[i][j];
            }
        }
    }
    let c_scale = c.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if !t.optimize(n, 1e-12 * c_scale) {
        return LpStatus::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).max(0.0);
        }
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    LpStatus::Optimal { x, objective }
}

/// Decides whether `target` lies in the convex hull of `points`, with
/// component-wise equality slack `tol`.
pub fn lp_feasible_convex(target: &[f64], points: &[Vec<f64>], tol: f64) -> Result<LpResult> {
    let m = target.len();
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} against target of length {m}",
            p.len()
        )));
    }
    let n = points.len();
    let mut a: Vec<Vec<f64>> = (0..m).map(|i| points.iter().map(|p| p[i]).collect()).collect();
    a.push(vec![1.0; n]);
    let mut b = target.to_vec();
    b.push(1.0);
    let status = simplex(&a, &b, &vec![0.0; n], 1e-13 * (1.0 + max_norm(target)));
    let (weights, dual) = match status {
        LpStatus::Optimal { x, .. } => (x, None),
        LpStatus::Infeasible { x, dual, .. } => (x, Some(dual)),
        LpStatus::Unbounded => unreachable!("zero objective cannot be unbounded"),
    };
    let residual = hull_residual(target, points, &weights);
    let feasible = residual <= tol && (weights.iter().sum::<f64>() - 1.0).abs() <= tol;
    let certificate = if feasible { None } else { dual };
    Ok(LpResult { feasible, weights, residual, certificate })
}

pub fn hull_residual(target: &[f64], points: &[Vec<f64>], weights: &[f64]) -> f64 {
    (0..target.len())
        .map(|i| {
            let v: f64 = points.iter().zip(weights).map(|(p, w)| p[i] * w).sum();
            (v - target[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_target() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = lp_feasible_convex(&[0.0, 0.0], &pts, 1e-7).unwrap();
        assert!(r.feasible);
        assert!((r.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_and_exterior() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = lp_feasible_convex(&[0.2, 0.3], &pts, 1e-7).unwrap();
        assert!(r.feasible);
        assert!(r.residual < 1e-12);
        let r = lp_feasible_convex(&[0.8, 0.8], &pts, 1e-7).unwrap();
        assert!(!r.feasible);
        let cert = r.certificate.unwrap();
        for p in &pts {
            assert!(cert[0] * p[0] + cert[1] * p[1] + cert[2] <= 1e-9);
        }
        assert!(cert[0] * 0.8 + cert[1] * 0.8 + cert[2] > 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let pts = vec![vec![0.0, 0.0], vec![1.0]];
        assert!(matches!(lp_feasible_convex(&[0.0, 0.0], &pts, 1e-7), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn phase_two_minimizes() {
        // min -x0 s.t. x0 + x1 = 1
        match simplex(&[vec![1.0, 1.0]], &[1.0], &[-1.0, 0.0], 1e-12) {
            LpStatus::Optimal { x, objective } => {
                assert!((x[0] - 1.0).abs() < 1e-12);
                assert!((objective + 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        // min -x0 s.t. x0 - x1 = 1 is unbounded
        assert!(matches!(simplex(&[vec![1.0, -1.0]], &[1.0], &[-1.0, 0.0], 1e-12), LpStatus::Unbounded));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        match simplex(&a, &[1.0, 2.0, 1.0], &[0.0, 1.0, 0.0], 1e-12) {
            LpStatus::Optimal { x, objective } => {
                assert!(objective.abs() < 1e-12);
                assert!((x[0] - 1.0).abs() < 1e-12 && (x[2] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}
