//! Eigenvalue and diagonal data of a putative pencil, the vectors used by the
//! scalar-product formulas, and the necessary-condition battery.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bpoly::{Axis, BivariatePoly};
use crate::error::{Error, Result};
use crate::exterior::{exterior_power, SubsetIndex};
use crate::smallnum::{elementary_symmetric, lin_solve, lstsq_with_null, poly_roots_with_tol, simplex, LpStatus};
use crate::tol::Tolerances;

/// Eigenvalues of the coefficient matrix of `axis`, descending, padded with
/// zeros when the axis restriction has degree below `d`.
pub fn extract_eigenvalues(p: &BivariatePoly, axis: Axis, tol: f64) -> Result<Vec<f64>> {
    let d = p.degree();
    let slice = p.restrict_axis(axis);
    let mut eig = Vec::with_capacity(d);
    if slice.effective_degree() > 0 {
        let report = poly_roots_with_tol(&slice.coeffs, tol)?;
        if !report.all_real {
            let z = report.worst_complex().unwrap();
            return Err(Error::ComplexRoots { axis: axis.index(), re: z.re, im: z.im });
        }
        eig.extend(report.roots.iter().map(|z| -1.0 / z.re));
    }
    eig.resize(d, 0.0);
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// `G[j][i] = e_j(eigs without the i-th)`.
pub fn build_g(eigs: &[f64]) -> DMatrix<f64> {
    let d = eigs.len();
    let mut g = DMatrix::zeros(d, d);
    for i in 0..d {
        let rest: Vec<f64> = eigs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect();
        let e = elementary_symmetric(&rest);
        for j in 0..d {
            g[(j, i)] = e[j];
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagonalSolution {
    Unique { y: Vec<f64> },
    /// Solutions `particular + span(null_basis)`; the other axis has a repeated eigenvalue.
    Degenerate { particular: Vec<f64>, null_basis: Vec<Vec<f64>> },
}

impl DiagonalSolution {
    pub fn unique(&self) -> Option<&[f64]> {
        match self {
            DiagonalSolution::Unique { y } => Some(y),
            DiagonalSolution::Degenerate { .. } => None,
        }
    }
}

/// Right-hand side `(f_{1,0}, f_{1,1}, .., f_{1,d-1})` for axis 1 and the mirror for axis 2.
fn diagonal_rhs(p: &BivariatePoly, axis: Axis) -> DVector<f64> {
    let d = p.degree();
    DVector::from_fn(d, |j, _| match axis {
        Axis::X1 => p.coeff(1, j),
        Axis::X2 => p.coeff(j, 1),
    })
}

fn solve_axis(p: &BivariatePoly, axis: Axis, other_eigs: &[f64], tol: f64) -> Result<DiagonalSolution> {
    let g = build_g(other_eigs);
    let z = diagonal_rhs(p, axis);
    match lin_solve(&g, &z) {
        Ok(y) => Ok(DiagonalSolution::Unique { y: y.iter().copied().collect() }),
        Err(Error::NearSingular(_)) => {
            let (y, null) = lstsq_with_null(&g, &z, 1e-10);
            let residual = (&g * &y - &z).amax();
            if residual > tol * (1.0 + z.amax()) {
                return Err(Error::InconsistentSystem { axis: axis.index(), residual });
            }
            Ok(DiagonalSolution::Degenerate {
                particular: y.iter().copied().collect(),
                null_basis: null.iter().map(|v| v.iter().copied().collect()).collect(),
            })
        }
        Err(e) => Err(e),
    }
}

/// Diagonals `y1 = diag(A1)` in the frame where `A2` is diagonal, and
/// `y2 = diag(A2)` in the frame where `A1` is diagonal.
pub fn solve_diagonals(
    p: &BivariatePoly,
    u1: &[f64],
    w1: &[f64],
    tol: f64,
) -> Result<(DiagonalSolution, DiagonalSolution)> {
    let y1 = solve_axis(p, Axis::X1, w1, tol)?;
    let y2 = solve_axis(p, Axis::X2, u1, tol)?;
    Ok((y1, y2))
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationViolation {
    /// Number of leading entries in the failing partial sum; `k = d` flags
    /// unequal totals.
    pub k: usize,
    pub diagonal_partial_sum: f64,
    pub eigenvalue_partial_sum: f64,
}

/// First partial-sum violation of `y ≺ x`, if any.
pub fn majorization_violation(x: &[f64], y: &[f64], tol: f64) -> Option<MajorizationViolation> {
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let d = xs.len();
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..d {
        sx += xs[k];
        sy += ys[k];
        let bad = if k + 1 < d { sy > sx + tol } else { (sy - sx).abs() > tol };
        if bad {
            return Some(MajorizationViolation {
                k: k + 1,
                diagonal_partial_sum: sy,
                eigenvalue_partial_sum: sx,
            });
        }
    }
    None
}

/// `y ≺ x` with absolute slack `1e-7` on partial sums.
pub fn majorizes(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && majorization_violation(x, y, 1e-7).is_none()
}

/// Subset inequalities `sum_{i in S} y_i <= sum of the |S| largest x`, listed
/// as `(S, bound)` for every nonempty proper subset.
fn subset_bounds(x: &[f64]) -> Vec<(Vec<usize>, f64)> {
    let xs = sorted_desc(x);
    let d = x.len();
    let mut out = Vec::new();
    for k in 1..d {
        let top: f64 = xs[..k].iter().sum();
        for s in (0..d).combinations(k) {
            out.push((s, top));
        }
    }
    out
}

/// Interval of `t` with `y0 + t n ≺ x`, or `None` when empty.
pub fn majorization_interval(x: &[f64], y0: &[f64], n: &[f64], tol: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (s, top) in subset_bounds(x) {
        let a: f64 = s.iter().map(|&i| n[i]).sum();
        let b = top - s.iter().map(|&i| y0[i]).sum::<f64>() + tol;
        if a.abs() < 1e-14 {
            if b < 0.0 {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(b / a);
        } else {
            lo = lo.max(b / a);
        }
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// A point of `particular + span(null)` majorized by `x`, found by LP.
pub fn majorized_point_on_affine(
    x: &[f64],
    particular: &[f64],
    null: &[Vec<f64>],
    tol: f64,
) -> Option<Vec<f64>> {
    let bounds = subset_bounds(x);
    let r = null.len();
    let m = bounds.len();
    let n = 2 * r + m;
    let mut a = vec![vec![0.0; n]; m];
    let mut b = vec![0.0; m];
    for (row, (s, top)) in bounds.iter().enumerate() {
        for (k, v) in null.iter().enumerate() {
            let coef: f64 = s.iter().map(|&i| v[i]).sum();
            a[row][k] = coef;
            a[row][r + k] = -coef;
        }
        a[row][2 * r + row] = 1.0;
        b[row] = top - s.iter().map(|&i| particular[i]).sum::<f64>() + tol;
    }
    match simplex(&a, &b, &vec![0.0; n], 1e-12) {
        LpStatus::Optimal { x: sol, .. } => {
            let mut y = particular.to_vec();
            for (k, v) in null.iter().enumerate() {
                let t = sol[k] - sol[r + k];
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi += t * vi;
                }
            }
            Some(y)
        }
        _ => None,
    }
}

/// `u_k`, `w_k`, `u^c_{k,k'}` and `w^c_{k,k'}` keyed by subsets.
#[derive(Clone, Debug, Serialize)]
pub struct IndexedVector {
    pub index: SubsetIndex,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarVectors {
    pub u_k: IndexedVector,
    pub w_k: IndexedVector,
    pub uc: IndexedVector,
    pub wc: IndexedVector,
}

/// Products `prod_{i in S} v_i` over the `k`-subsets.
pub fn subset_products(v: &[f64], k: usize) -> IndexedVector {
    let index = SubsetIndex::new(v.len(), k);
    let values = index.subsets.iter().map(|s| s.iter().map(|&i| v[i]).product()).collect();
    IndexedVector { index, values }
}

/// Over `k'`-subsets `S`: the sum of `k`-fold products of entries outside `S`.
pub fn complement_sums(v: &[f64], k: usize, kp: usize) -> IndexedVector {
    let d = v.len();
    let index = SubsetIndex::new(d, kp);
    let values = index
        .subsets
        .iter()
        .map(|s| {
            let rest: Vec<f64> = (0..d).filter(|i| !s.contains(i)).map(|i| v[i]).collect();
            elementary_symmetric(&rest).get(k).copied().unwrap_or(0.0)
        })
        .collect();
    IndexedVector { index, values }
}

pub fn build_vectors(u1: &[f64], w1: &[f64], k: usize, kp: usize) -> Result<ScalarVectors> {
    let d = u1.len();
    if w1.len() != d {
        return Err(Error::DimensionMismatch("u1 and w1 lengths differ".into()));
    }
    for g in [k, kp] {
        if g == 0 || g > d {
            return Err(Error::GradeOutOfRange { k: g, d });
        }
    }
    Ok(ScalarVectors {
        u_k: subset_products(u1, k),
        w_k: subset_products(w1, k),
        uc: complement_sums(u1, k, kp),
        wc: complement_sums(w1, k, kp),
    })
}

/// `f_ab` of `det(I + x1 diag(u1) + x2 V diag(w1) V^T)` by the scalar-product
/// formulas: `u^c_{a,b} . Q^b w_b` when `a >= b`, else `w^c_{b,a} . (Q^a)^T u_a`,
/// with `Q^k` the Hadamard square of the `k`-th exterior power of `V`.
pub fn scalar_product_coefficient(v: &DMatrix<f64>, u1: &[f64], w1: &[f64], a: usize, b: usize) -> Result<f64> {
    let d = u1.len();
    if a + b > d {
        return Err(Error::GradeOverflow { order: a + b, d });
    }
    if b == 0 {
        return Ok(elementary_symmetric(u1)[a]);
    }
    if a == 0 {
        return Ok(elementary_symmetric(w1)[b]);
    }
    if a >= b {
        let q = exterior_power(v, b)?.map(|x| x * x);
        let uc = complement_sums(u1, a, b).values;
        let wb = DVector::from_vec(subset_products(w1, b).values);
        Ok(DVector::from_vec(uc).dot(&(q * wb)))
    } else {
        let q = exterior_power(v, a)?.map(|x| x * x);
        let wc = complement_sums(w1, b, a).values;
        let ua = DVector::from_vec(subset_products(u1, a).values);
        Ok(DVector::from_vec(wc).dot(&(q.transpose() * ua)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralProfile {
    pub u1: Vec<f64>,
    pub w1: Vec<f64>,
    pub y1: DiagonalSolution,
    pub y2: DiagonalSolution,
    pub repeated_u: bool,
    pub repeated_w: bool,
}

fn has_repeats(v: &[f64]) -> bool {
    v.windows(2).any(|w| w[0] == w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub axis: Axis,
    pub status: CheckStatus,
    pub detail: String,
    pub certificate: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub profile: Option<SpectralProfile>,
}

impl BatteryReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }
}

const CHECKS: [(&str, Axis); 6] = [
    ("real_roots", Axis::X1),
    ("real_roots", Axis::X2),
    ("diagonal_system", Axis::X1),
    ("diagonal_system", Axis::X2),
    ("majorization", Axis::X1),
    ("majorization", Axis::X2),
];

struct Recorder {
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn pass(&mut self, detail: String) {
        let (name, axis) = CHECKS[self.checks.len()];
        self.checks.push(CheckResult { name: name.into(), axis, status: CheckStatus::Pass, detail, certificate: None });
    }

    fn fail(mut self, detail: String, certificate: serde_json::Value) -> BatteryReport {
        let (name, axis) = CHECKS[self.checks.len()];
        self.checks.push(CheckResult {
            name: name.into(),
            axis,
            status: CheckStatus::Fail,
            detail,
            certificate: Some(certificate),
        });
        while self.checks.len() < CHECKS.len() {
            let (name, axis) = CHECKS[self.checks.len()];
            self.checks.push(CheckResult {
                name: name.into(),
                axis,
                status: CheckStatus::Skipped,
                detail: String::new(),
                certificate: None,
            });
        }
        BatteryReport { passed: false, checks: self.checks, profile: None }
    }
}

fn majorization_check(x: &[f64], y: &DiagonalSolution, tol: f64) -> std::result::Result<String, (String, serde_json::Value)> {
    match y {
        DiagonalSolution::Unique { y } => match majorization_violation(x, y, tol) {
            None => Ok(format!("diagonal {y:?} is majorized by eigenvalues {x:?}")),
            Some(v) => Err((
                format!(
                    "partial sum of the {} largest diagonal entries is {} > {}",
                    v.k, v.diagonal_partial_sum, v.eigenvalue_partial_sum
                ),
                serde_json::json!({ "diagonal": y, "eigenvalues": x, "violation": v }),
            )),
        },
        DiagonalSolution::Degenerate { particular, null_basis } => {
            match majorized_point_on_affine(x, particular, null_basis, tol) {
                Some(p) => Ok(format!("solution set contains the majorized diagonal {p:?}")),
                None => Err((
                    "no diagonal in the solution set is majorized by the eigenvalues".into(),
                    serde_json::json!({ "particular": particular, "null_basis": null_basis, "eigenvalues": x }),
                )),
            }
        }
    }
}

/// Runs the necessary conditions in order and stops at the first failure.
pub fn necessary_battery(p: &BivariatePoly, tol: &Tolerances) -> BatteryReport {
    let mut rec = Recorder { checks: Vec::new() };
    let mut eigs = Vec::new();
    for axis in [Axis::X1, Axis::X2] {
        match extract_eigenvalues(p, axis, tol.root) {
            Ok(e) => {
                rec.pass(format!("eigenvalues {e:?}"));
                eigs.push(e);
            }
            Err(Error::ComplexRoots { re, im, .. }) => {
                return rec.fail(
                    format!("restriction to x{axis} has the complex root {re} + {im}i"),
                    serde_json::json!({ "root": [re, im] }),
                )
            }
            Err(e) => return rec.fail(e.to_string(), serde_json::Value::Null),
        }
    }
    let (u1, w1) = (eigs[0].clone(), eigs[1].clone());
    let mut ys = Vec::new();
    for axis in [Axis::X1, Axis::X2] {
        let other = if axis == Axis::X1 { &w1 } else { &u1 };
        match solve_axis(p, axis, other, tol.residual) {
            Ok(y) => {
                let detail = match &y {
                    DiagonalSolution::Unique { y } => format!("diagonal {y:?}"),
                    DiagonalSolution::Degenerate { null_basis, .. } => {
                        format!("underdetermined, {} free direction(s)", null_basis.len())
                    }
                };
                rec.pass(detail);
                ys.push(y);
            }
            Err(Error::InconsistentSystem { residual, .. }) => {
                return rec.fail(
                    format!("coefficients are outside the range of G (residual {residual:e})"),
                    serde_json::json!({ "residual": residual }),
                )
            }
            Err(e) => return rec.fail(e.to_string(), serde_json::Value::Null),
        }
    }
    for (k, x) in [&u1, &w1].into_iter().enumerate() {
        match majorization_check(x, &ys[k], tol.majorization) {
            Ok(detail) => rec.pass(detail),
            Err((detail, cert)) => return rec.fail(detail, cert),
        }
    }
    let profile = SpectralProfile {
        repeated_u: has_repeats(&u1),
        repeated_w: has_repeats(&w1),
        u1,
        w1,
        y1: ys[0].clone(),
        y2: ys[1].clone(),
    };
    BatteryReport { passed: true, checks: rec.checks, profile: Some(profile) }
}
