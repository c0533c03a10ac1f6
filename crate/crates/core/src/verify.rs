//! Independent oracles: pencil expansion by interpolation, generalized mixed
//! discriminants, and real-zero sampling.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bpoly::BivariatePoly;
use crate::error::{Error, Result};
use crate::smallnum::{det, elementary_symmetric, max_abs, poly_roots_with_tol, rel_imag, C64};

fn check_pencil(d1: &[f64], a2: &DMatrix<f64>) -> Result<usize> {
    let d = d1.len();
    if a2.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "D1 has {d} entries but A2 is {}x{}",
            a2.nrows(),
            a2.ncols()
        )));
    }
    let asym = max_abs(&(a2 - a2.transpose()));
    if asym > 1e-10 * max_abs(a2).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(d)
}

fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect()
}

/// Recovers the coefficient grid of a bivariate polynomial of degree at most
/// `d` in each variable from its values on a Chebyshev tensor grid.
fn interpolate(d: usize, s1: f64, s2: f64, f: impl Fn(f64, f64) -> f64) -> Result<BivariatePoly> {
    let nodes = chebyshev_nodes(d + 1);
    let n = d + 1;
    let vals = DMatrix::from_fn(n, n, |i, j| f(s1 * nodes[i], s2 * nodes[j]));
    let vander = DMatrix::from_fn(n, n, |i, a| nodes[i].powi(a as i32));
    let lu = vander.lu();
    // rows: powers of x1, columns: nodes in x2
    let partial = lu
        .solve(&vals)
        .ok_or_else(|| Error::NearSingular(f64::INFINITY))?;
    let coeffs = lu
        .solve(&partial.transpose())
        .ok_or_else(|| Error::NearSingular(f64::INFINITY))?
        .transpose();
    let c00 = coeffs[(0, 0)];
    if (c00 - 1.0).abs() > 1e-8 {
        return Err(Error::NonUnitConstant(c00));
    }
    let mut grid = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n - a {
            grid[a][b] = coeffs[(a, b)] / (s1.powi(a as i32) * s2.powi(b as i32));
        }
    }
    BivariatePoly::with_nominal_degree(d, &grid)
}

fn node_scale(spread: f64) -> f64 {
    1.0 / spread.max(1.0)
}

/// Coefficients of `det(I + x1 diag(d1) + x2 A2)` by interpolation.
pub fn expand_pencil(d1: &[f64], a2: &DMatrix<f64>) -> Result<BivariatePoly> {
    let d = check_pencil(d1, a2)?;
    if d == 0 {
        return Err(Error::DimensionMismatch("empty pencil".into()));
    }
    let s1 = node_scale(d1.iter().fold(0.0, |m, x| m.max(x.abs())));
    let s2 = node_scale(a2.norm());
    interpolate(d, s1, s2, |x, y| {
        let m = DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 + x * d1[i] } else { 0.0 };
            id + y * a2[(i, j)]
        });
        det(&m)
    })
}

/// Same as [`expand_pencil`] for a Hermitian `A2`.
pub fn expand_hermitian_pencil(d1: &[f64], a2: &DMatrix<C64>) -> Result<BivariatePoly> {
    let d = d1.len();
    if a2.shape() != (d, d) || d == 0 {
        return Err(Error::DimensionMismatch("pencil shapes disagree".into()));
    }
    let asym = (a2 - a2.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if asym > 1e-10 * a2.norm().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let s1 = node_scale(d1.iter().fold(0.0, |m, x| m.max(x.abs())));
    let s2 = node_scale(a2.norm());
    interpolate(d, s1, s2, |x, y| {
        let m = DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 + x * d1[i] } else { 0.0 };
            C64::new(id, 0.0) + a2[(i, j)] * y
        });
        m.determinant().re
    })
}

/// Generalized mixed discriminant of `(matrix, copies)` groups: the
/// coefficient of `prod x_i^{copies_i}` in `det(I + sum x_i M_i)`.
pub fn mixed_discriminant(groups: &[(&DMatrix<f64>, usize)]) -> Result<f64> {
    let Some((first, _)) = groups.first() else {
        return Ok(1.0);
    };
    let d = first.nrows();
    if groups.iter().any(|(m, _)| m.shape() != (d, d)) {
        return Err(Error::DimensionMismatch("mixed discriminant of unequal shapes".into()));
    }
    let k: usize = groups.iter().map(|g| g.1).sum();
    if k > d {
        return Err(Error::GradeOverflow { order: k, d });
    }
    if k == 0 {
        return Ok(1.0);
    }
    let counts: Vec<usize> = groups.iter().map(|g| g.1).collect();
    let mut total = 0.0;
    for rows in (0..d).combinations(k) {
        for owner in assignments(&counts) {
            let sub = DMatrix::from_fn(k, k, |r, c| groups[owner[r]].0[(rows[r], rows[c])]);
            total += det(&sub);
        }
    }
    Ok(total)
}

/// Every way to label `sum(counts)` ordered slots with group indices so that
/// group `g` is used `counts[g]` times.
fn assignments(counts: &[usize]) -> Vec<Vec<usize>> {
    let k: usize = counts.iter().sum();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    let mut left = counts.to_vec();
    fn rec(left: &mut [usize], current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for g in 0..left.len() {
            if left[g] > 0 {
                left[g] -= 1;
                current.push(g);
                rec(left, current, k, out);
                current.pop();
                left[g] += 1;
            }
        }
    }
    rec(&mut left, &mut current, k, &mut out);
    out
}

/// `f_{a b}` of `det(I + x1 diag(d1) + x2 A2)` through the mixed discriminant.
pub fn coefficient_via_gmd(d1: &[f64], a2: &DMatrix<f64>, a: usize, b: usize) -> Result<f64> {
    let d = check_pencil(d1, a2)?;
    if a + b > d {
        return Err(Error::GradeOverflow { order: a + b, d });
    }
    let a1 = DMatrix::from_diagonal(&DVector::from_column_slice(d1));
    mixed_discriminant(&[(&a1, a), (a2, b)])
}

/// Full coefficient grid from principal minors of `A2`:
/// `f_ab = sum_{|J| = b} det A2[J, J] * e_a(d1 outside J)`.
pub(crate) fn coefficients_by_minors(d1: &[f64], a2: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = d1.len();
    let mut grid = vec![vec![0.0; d + 1]; d + 1];
    for mask in 0u32..(1 << d) {
        let inside: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        let outside: Vec<f64> = (0..d).filter(|&i| mask >> i & 1 == 0).map(|i| d1[i]).collect();
        let b = inside.len();
        let minor = if b == 0 {
            1.0
        } else {
            det(&DMatrix::from_fn(b, b, |r, c| a2[(inside[r], inside[c])]))
        };
        for (a, e) in elementary_symmetric(&outside).into_iter().enumerate() {
            grid[a][b] += minor * e;
        }
    }
    grid
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionProbe {
    pub direction: [f64; 2],
    pub rel_imag: f64,
    pub failed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RzReport {
    pub directions_tested: usize,
    pub failures: usize,
    pub tol: f64,
    /// Largest `|Im t| / (1 + |Re t|)` over all roots and directions.
    pub worst_rel_imag: f64,
    pub worst_direction: [f64; 2],
    /// Worst failing direction, if any.
    pub witness: Option<[f64; 2]>,
    /// Results for the fixed rational probe directions.
    pub probes: Vec<DirectionProbe>,
}

pub const RATIONAL_PROBES: [(f64, f64); 12] = [
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (3.0, -1.0),
    (1.0, -3.0),
    (2.0, -1.0),
    (1.0, -2.0),
    (2.0, 1.0),
    (1.0, 2.0),
    (3.0, 1.0),
    (1.0, 3.0),
];

/// Samples restrictions `t -> f(t x)` and reports complex roots. A falsifier:
/// a clean report does not prove the real-zero property.
pub fn rz_sample_check(p: &BivariatePoly, trials: usize, tol: f64) -> RzReport {
    let trials = trials.max(1);
    let mut dirs: Vec<([f64; 2], bool)> = RATIONAL_PROBES
        .iter()
        .map(|&(a, b)| {
            let n = (a * a + b * b).sqrt();
            ([a / n, b / n], true)
        })
        .collect();
    for k in 0..trials {
        let th = std::f64::consts::PI * (k as f64 + 0.5) / trials as f64;
        dirs.push(([th.cos(), th.sin()], false));
    }
    let mut report = RzReport {
        directions_tested: dirs.len(),
        failures: 0,
        tol,
        worst_rel_imag: 0.0,
        worst_direction: dirs[0].0,
        witness: None,
        probes: Vec::new(),
    };
    let mut worst_fail = 0.0;
    for (dir, probe) in dirs {
        let c = p.restrict_direction(dir[0], dir[1]);
        let score = match poly_roots_with_tol(&c, tol) {
            Ok(r) => r.roots.iter().map(|z| rel_imag(*z)).fold(0.0, f64::max),
            Err(_) => 0.0,
        };
        let failed = score > tol;
        if failed {
            report.failures += 1;
            if score > worst_fail {
                worst_fail = score;
                report.witness = Some(dir);
            }
        }
        if score > report.worst_rel_imag {
            report.worst_rel_imag = score;
            report.worst_direction = dir;
        }
        if probe {
            report.probes.push(DirectionProbe { direction: dir, rel_imag: score, failed });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpoly::parse;

    #[test]
    fn zero_pencil_is_constant_one() {
        let p = expand_pencil(&[0.0, 0.0], &DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(p.coeff(0, 0), 1.0);
        for a in 0..=2 {
            for b in 0..=2 - a {
                if a + b > 0 {
                    assert!(p.coeff(a, b).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn diagonal_pencil_expansion() {
        let a2 = DMatrix::from_diagonal(&DVector::from_vec(vec![6.0, 3.0, 2.0]));
        let p = expand_pencil(&[3.0, 2.0, 1.0], &a2).unwrap();
        // u^c_{1,1} = (3, 4, 5) against w = (6, 3, 2)
        assert!((p.coeff(1, 1) - 40.0).abs() < 1e-10);
        assert!((p.coeff(3, 0) - 6.0).abs() < 1e-10);
        assert!((p.coeff(0, 3) - 36.0).abs() < 1e-10);
    }

    #[test]
    fn gmd_single_matrix_is_elementary_symmetric() {
        let a2 = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let d1 = [3.0, 2.0, 1.0];
        assert!((coefficient_via_gmd(&d1, &a2, 2, 0).unwrap() - 11.0).abs() < 1e-12);
        assert!((coefficient_via_gmd(&d1, &a2, 0, 1).unwrap() - 9.0).abs() < 1e-12);
        assert!(matches!(coefficient_via_gmd(&d1, &a2, 2, 2), Err(Error::GradeOverflow { .. })));
        let grid = coefficients_by_minors(&d1, &a2);
        let p = expand_pencil(&d1, &a2).unwrap();
        for a in 0..=3 {
            for b in 0..=3 - a {
                let g = coefficient_via_gmd(&d1, &a2, a, b).unwrap();
                assert!((g - p.coeff(a, b)).abs() < 1e-9, "({a},{b})");
                assert!((g - grid[a][b]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn product_of_linear_forms_is_real_zero() {
        // (1 + x1 - 3 x2)(1 + 2 x1 + x2)
        let q = parse("1+3*x1-2*x2+2*x1^2-5*x1*x2-3*x2^2").unwrap();
        let r = rz_sample_check(&q, 200, 1e-7);
        assert_eq!(r.failures, 0);
    }
}
